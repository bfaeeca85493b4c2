#pragma once

#include <string>
#include <vector>

#include "testsum/metrics.hpp"
#include "testsum/promptkit.hpp"

namespace testsum::metrics {

struct ScoreRecord {
    std::string case_id;
    std::string model_id;
    promptkit::Variant variant = promptkit::Variant::TestOnly;
    double bleu = 0.0;
    double meteor = 0.0;
    double rouge_l = 0.0;
    double bertscore_f1 = 0.0;
    double judge = 1.0;
    std::string error;  // non-empty marks a failed cell

    bool ok() const { return error.empty(); }
};

struct AggregateRow {
    std::string model_id;
    promptkit::Variant variant;
    int count = 0;
    double bleu = 0.0;
    double meteor = 0.0;
    double rouge_l = 0.0;
    double bertscore_f1 = 0.0;
    double judge = 0.0;
};

/// Per-(model, variant) arithmetic means, rounded to 2 decimals.
/// Rows are ordered by first appearance of the model, then by the
/// canonical seven-variant order. Error records are excluded.
std::vector<AggregateRow> aggregate(const std::vector<ScoreRecord>& records);

/// One JSON object per line.
void save_records(const std::vector<ScoreRecord>& records,
                  const std::string& path);
std::vector<ScoreRecord> load_records(const std::string& path);

}  // namespace testsum::metrics
