#include "testsum/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

namespace testsum::metrics {

Tokens tokenize(const std::string& text) {
    Tokens out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

namespace {

std::map<Tokens, int> ngram_counts(const Tokens& toks, int n) {
    std::map<Tokens, int> counts;
    if (static_cast<int>(toks.size()) < n) return counts;
    for (size_t i = 0; i + n <= toks.size(); ++i)
        ++counts[Tokens(toks.begin() + i, toks.begin() + i + n)];
    return counts;
}

}  // namespace

double bleu4(const Tokens& candidate, const Tokens& reference,
             const MetricConfig& cfg) {
    if (reference.empty()) throw MetricError("bleu4: empty reference");
    if (candidate.empty()) return 0.0;

    double log_sum = 0.0;
    for (int n = 1; n <= cfg.bleu_max_n; ++n) {
        auto cand = ngram_counts(candidate, n);
        auto ref = ngram_counts(reference, n);
        long long clipped = 0, total = 0;
        for (const auto& [gram, count] : cand) {
            total += count;
            auto it = ref.find(gram);
            if (it != ref.end()) clipped += std::min(count, it->second);
        }
        double num = static_cast<double>(clipped);
        double den = static_cast<double>(total);
        if (n >= 2) {  // add-one smoothing on higher orders only
            num += 1.0;
            den += 1.0;
        }
        if (num <= 0.0 || den <= 0.0) return 0.0;
        log_sum += std::log(num / den);
    }
    double geo = std::exp(log_sum / cfg.bleu_max_n);

    double c = static_cast<double>(candidate.size());
    double r = static_cast<double>(reference.size());
    double bp = (c < r) ? std::exp(1.0 - r / c) : 1.0;
    return 100.0 * geo * bp;
}

double rouge_l(const Tokens& candidate, const Tokens& reference,
               const MetricConfig& cfg) {
    if (reference.empty()) throw MetricError("rouge_l: empty reference");
    const size_t n = candidate.size(), m = reference.size();
    std::vector<size_t> prev(m + 1, 0), row(m + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            row[j] = (candidate[i - 1] == reference[j - 1])
                         ? prev[j - 1] + 1
                         : std::max(prev[j], row[j - 1]);
        }
        std::swap(prev, row);
    }
    double lcs = static_cast<double>(prev[m]);
    double p = candidate.empty() ? 0.0 : lcs / static_cast<double>(n);
    double r = lcs / static_cast<double>(m);
    if (p + r == 0.0) return 0.0;
    double b2 = cfg.rouge_beta * cfg.rouge_beta;
    return 100.0 * (1.0 + b2) * p * r / (r + b2 * p);
}

namespace {

struct Pair {
    int cand;
    int ref;
};

int count_chunks(std::vector<Pair> pairs) {
    if (pairs.empty()) return 0;
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& a, const Pair& b) { return a.cand < b.cand; });
    int chunks = 1;
    for (size_t i = 1; i < pairs.size(); ++i) {
        if (pairs[i].cand != pairs[i - 1].cand + 1 ||
            pairs[i].ref != pairs[i - 1].ref + 1)
            ++chunks;
    }
    return chunks;
}

// Exhaustive search over maximum-cardinality one-to-one alignments,
// returning the minimum chunk count.
struct ExactAligner {
    const Tokens& cand;
    const Tokens& ref;
    int max_matches;
    std::vector<bool> ref_used;
    std::vector<Pair> pairs;
    int best_chunks = -1;

    ExactAligner(const Tokens& c, const Tokens& r, int m)
        : cand(c), ref(r), max_matches(m), ref_used(r.size(), false) {}

    // Upper bound on matches achievable from candidate position i onward.
    int remaining_bound(size_t i) const {
        std::map<std::string, int> cand_left, ref_left;
        for (size_t k = i; k < cand.size(); ++k) ++cand_left[cand[k]];
        for (size_t k = 0; k < ref.size(); ++k)
            if (!ref_used[k]) ++ref_left[ref[k]];
        int bound = 0;
        for (const auto& [tok, cnt] : cand_left) {
            auto it = ref_left.find(tok);
            if (it != ref_left.end()) bound += std::min(cnt, it->second);
        }
        return bound;
    }

    void search(size_t i) {
        if (static_cast<int>(pairs.size()) +
                remaining_bound(i) < max_matches)
            return;
        if (i == cand.size()) {
            if (static_cast<int>(pairs.size()) == max_matches) {
                int chunks = count_chunks(pairs);
                if (best_chunks < 0 || chunks < best_chunks)
                    best_chunks = chunks;
            }
            return;
        }
        for (size_t j = 0; j < ref.size(); ++j) {
            if (!ref_used[j] && ref[j] == cand[i]) {
                ref_used[j] = true;
                pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
                search(i + 1);
                pairs.pop_back();
                ref_used[j] = false;
            }
        }
        search(i + 1);  // leave position i unmatched
    }
};

// Greedy longest-run alignment for larger inputs.
int greedy_chunks(const Tokens& cand, const Tokens& ref, int max_matches) {
    std::vector<bool> cu(cand.size(), false), ru(ref.size(), false);
    int chunks = 0, matched = 0;
    while (matched < max_matches) {
        size_t best_len = 0, best_i = 0, best_j = 0;
        for (size_t i = 0; i < cand.size(); ++i) {
            for (size_t j = 0; j < ref.size(); ++j) {
                size_t len = 0;
                while (i + len < cand.size() && j + len < ref.size() &&
                       !cu[i + len] && !ru[j + len] &&
                       cand[i + len] == ref[j + len])
                    ++len;
                if (len > best_len) {
                    best_len = len;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_len == 0) break;
        for (size_t k = 0; k < best_len; ++k) {
            cu[best_i + k] = true;
            ru[best_j + k] = true;
        }
        matched += static_cast<int>(best_len);
        ++chunks;
    }
    return chunks;
}

int max_cardinality(const Tokens& cand, const Tokens& ref) {
    std::map<std::string, int> cc, rc;
    for (const auto& t : cand) ++cc[t];
    for (const auto& t : ref) ++rc[t];
    int m = 0;
    for (const auto& [tok, cnt] : cc) {
        auto it = rc.find(tok);
        if (it != rc.end()) m += std::min(cnt, it->second);
    }
    return m;
}

constexpr int kExactAlignLimit = 12;

}  // namespace

double meteor(const Tokens& candidate, const Tokens& reference,
              const MetricConfig& cfg) {
    if (reference.empty()) throw MetricError("meteor: empty reference");
    if (candidate.empty()) return 0.0;

    int m = max_cardinality(candidate, reference);
    if (m == 0) return 0.0;

    int chunks;
    if (m <= kExactAlignLimit) {
        ExactAligner aligner(candidate, reference, m);
        aligner.search(0);
        chunks = aligner.best_chunks;
    } else {
        chunks = greedy_chunks(candidate, reference, m);
    }

    double p = static_cast<double>(m) / static_cast<double>(candidate.size());
    double r = static_cast<double>(m) / static_cast<double>(reference.size());
    double fmean = p * r / (cfg.meteor_alpha * p + (1.0 - cfg.meteor_alpha) * r);
    double penalty =
        cfg.meteor_gamma *
        std::pow(static_cast<double>(chunks) / static_cast<double>(m),
                 cfg.meteor_beta);
    return 100.0 * fmean * (1.0 - penalty);
}

BertScore bertscore(const Tokens& candidate, const Tokens& reference,
                    const Embedder& embedder) {
    if (candidate.empty() || reference.empty())
        throw MetricError("bertscore: empty input");

    std::vector<std::vector<double>> ce, re;
    ce.reserve(candidate.size());
    re.reserve(reference.size());
    for (const auto& t : candidate) ce.push_back(embedder(t));
    for (const auto& t : reference) re.push_back(embedder(t));

    auto cosine = [](const std::vector<double>& a,
                     const std::vector<double>& b) {
        double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
        return dot;  // inputs are unit-normalized
    };

    double p_sum = 0.0;
    for (const auto& c : ce) {
        double best = -1.0;
        for (const auto& r : re) best = std::max(best, cosine(c, r));
        p_sum += best;
    }
    double r_sum = 0.0;
    for (const auto& r : re) {
        double best = -1.0;
        for (const auto& c : ce) best = std::max(best, cosine(r, c));
        r_sum += best;
    }

    BertScore s;
    s.precision = 100.0 * p_sum / static_cast<double>(ce.size());
    s.recall = 100.0 * r_sum / static_cast<double>(re.size());
    s.f1 = (s.precision + s.recall > 0.0)
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

}  // namespace testsum::metrics
