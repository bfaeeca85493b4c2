#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsum::metrics {

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MetricConfig {
    int bleu_max_n = 4;
    double meteor_alpha = 0.9;   // recall weight in harmonic mean
    double meteor_beta = 3.0;    // fragmentation penalty exponent
    double meteor_gamma = 0.5;   // fragmentation penalty weight
    double rouge_beta = 1.0;     // F-measure recall weight
    bool stemming = false;
};

using Tokens = std::vector<std::string>;

/// Lowercases and splits on maximal runs of non-alphanumeric characters.
Tokens tokenize(const std::string& text);

/// Sentence BLEU-4 with add-one smoothing on orders >= 2, scaled to [0,100].
double bleu4(const Tokens& candidate, const Tokens& reference,
             const MetricConfig& cfg = {});

/// LCS-based ROUGE-L F-measure, scaled to [0,100].
double rouge_l(const Tokens& candidate, const Tokens& reference,
               const MetricConfig& cfg = {});

/// Exact-match METEOR with fragmentation penalty, scaled to [0,100].
double meteor(const Tokens& candidate, const Tokens& reference,
              const MetricConfig& cfg = {});

/// Maps a token to a unit-normalized embedding vector.
using Embedder = std::function<std::vector<double>(const std::string&)>;

struct BertScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Greedy-matching embedding similarity, no idf weighting, no rescaling.
BertScore bertscore(const Tokens& candidate, const Tokens& reference,
                    const Embedder& embedder);

}  // namespace testsum::metrics
