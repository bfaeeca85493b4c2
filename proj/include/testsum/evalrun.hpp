#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "testsum/corpus.hpp"
#include "testsum/llmgw.hpp"
#include "testsum/scores.hpp"

namespace testsum::evalrun {

struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when more than the tolerated share of cells fail.
struct TooManyCellErrors : RunError {
    using RunError::RunError;
};

struct RunPlan {
    std::string corpus_path;
    std::vector<promptkit::Variant> variants;  // empty means invalid
    std::vector<std::string> models;
    std::string providers = "mock";  // config path or the literal "mock"
    uint64_t seed = 0;
    std::string output_dir;
    std::string judge_model = "judge-default";
    std::optional<double> mock_judge_score;  // fixes the mock judge reply
};

RunPlan load_plan(const std::string& path);
void validate_plan(const RunPlan& plan);

struct RunMetadata {
    std::map<std::string, std::string> prompt_hash_per_variant;
    double summary_temperature = 0.2;
    int summary_max_tokens = 128;
    double judge_temperature = 0.0;
    std::string judge_model;
    std::string created_at;
    long provider_calls = 0;
    long cache_hits = 0;
};

struct RunResult {
    RunPlan plan;
    std::vector<metrics::ScoreRecord> records;
    double gt_judge_mean = 0.0;
    RunMetadata metadata;
};

/// Fills in a semantic for every assertion of every kept case.
/// One cached provider call per distinct assertion statement.
corpus::Corpus generate_semantics(const corpus::Corpus& input,
                                  llmgw::Gateway& gateway,
                                  const std::string& model_id);

/// Full pipeline: prompts, summaries, metrics, judging, aggregation inputs.
/// Writes corpus/, prompts/, replies/, records.l, report.csv, report.txt,
/// meta.l under plan.output_dir.
RunResult run_ablation(const RunPlan& plan);

struct VariantComparison {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double delta = 0.0;  // rounded to 2 decimals
    double pct = 0.0;    // rounded to 1 decimal
};

/// Means across all models' records per variant for one metric
/// ("bleu", "meteor", "rouge_l", "bertscore_f1", "judge").
VariantComparison compare_variants(const std::vector<metrics::ScoreRecord>& records,
                                   promptkit::Variant variant_a,
                                   promptkit::Variant variant_b,
                                   const std::string& metric);

/// Aggregate table rendering; gt_judge_mean < 0 omits the baseline line.
std::string render_report_text(const std::vector<metrics::ScoreRecord>& records,
                               double gt_judge_mean = -1.0);
std::string render_report_csv(const std::vector<metrics::ScoreRecord>& records,
                              double gt_judge_mean = -1.0);

}  // namespace testsum::evalrun
