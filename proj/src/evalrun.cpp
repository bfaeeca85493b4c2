#include "testsum/evalrun.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "testsum/promptkit.hpp"
#include "testsum/sha256.hpp"

namespace testsum::evalrun {

namespace fs = std::filesystem;
using corpus::Corpus;
using corpus::TestCase;
using metrics::ScoreRecord;
using nlohmann::json;
using promptkit::Variant;

RunPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RunError("cannot open plan: " + path);
    json j = json::parse(in);
    RunPlan plan;
    plan.corpus_path = j.at("corpus_path");
    if (j.contains("variants")) {
        for (const auto& v : j["variants"])
            plan.variants.push_back(
                promptkit::variant_from_string(v.get<std::string>()));
    } else {
        plan.variants = promptkit::all_variants();
    }
    plan.models = j.at("models").get<std::vector<std::string>>();
    plan.providers = j.value("providers", "mock");
    plan.seed = j.value("seed", 0ULL);
    plan.output_dir = j.at("output_dir");
    plan.judge_model = j.value("judge_model", "judge-default");
    if (j.contains("mock_judge_score") && !j["mock_judge_score"].is_null())
        plan.mock_judge_score = j["mock_judge_score"].get<double>();
    return plan;
}

void validate_plan(const RunPlan& plan) {
    if (plan.variants.empty()) throw RunError("plan: variants must be non-empty");
    if (plan.models.empty()) throw RunError("plan: models must be non-empty");
    if (plan.corpus_path.empty()) throw RunError("plan: corpus_path missing");
    if (plan.output_dir.empty()) throw RunError("plan: output_dir missing");
}

namespace {

bool variant_needs_semantics(Variant v) {
    return v == Variant::WithSemantics || v == Variant::WithMsgAndSemantics ||
           v == Variant::WithMsgMutSemantics;
}

// Routes chat and embedding calls to separate providers.
class CompositeProvider final : public llmgw::Provider {
  public:
    CompositeProvider(std::shared_ptr<llmgw::Provider> chat,
                      std::shared_ptr<llmgw::Provider> embedding)
        : chat_(std::move(chat)), embedding_(std::move(embedding)) {}

    std::string name() const override { return chat_->name(); }
    llmgw::ChatReply complete(const llmgw::ChatRequest& r) override {
        return chat_->complete(r);
    }
    llmgw::EmbeddingReply embed(const llmgw::EmbeddingRequest& r) override {
        return embedding_->embed(r);
    }

  private:
    std::shared_ptr<llmgw::Provider> chat_;
    std::shared_ptr<llmgw::Provider> embedding_;
};

std::shared_ptr<llmgw::Provider> build_provider(const RunPlan& plan) {
    if (plan.providers == "mock") {
        llmgw::MockOptions opts;
        opts.seed = plan.seed;
        opts.fixed_judge_score = plan.mock_judge_score;
        return std::shared_ptr<llmgw::Provider>(
            llmgw::make_mock_provider(opts));
    }
    auto configs = llmgw::load_provider_config(plan.providers);
    std::shared_ptr<llmgw::Provider> chat, embedding;
    for (const auto& cfg : configs) {
        if (cfg.kind == "chat" && !chat)
            chat = std::shared_ptr<llmgw::Provider>(
                llmgw::make_http_provider(cfg));
        if (cfg.kind == "embedding" && !embedding)
            embedding = std::shared_ptr<llmgw::Provider>(
                llmgw::make_http_provider(cfg));
    }
    if (!chat) throw RunError("provider config defines no chat provider");
    if (!embedding) {
        llmgw::MockOptions opts;
        opts.seed = plan.seed;
        embedding = std::shared_ptr<llmgw::Provider>(
            llmgw::make_mock_provider(opts));
    }
    return std::make_shared<CompositeProvider>(chat, embedding);
}

std::string extract_summary(const std::string& reply_text) {
    auto open = reply_text.find("[SUMMARY]");
    if (open == std::string::npos) {
        // trim whitespace only
        auto a = reply_text.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        auto b = reply_text.find_last_not_of(" \t\r\n");
        return reply_text.substr(a, b - a + 1);
    }
    auto start = open + 9;
    auto close = reply_text.find("[/SUMMARY]", start);
    std::string inner = (close == std::string::npos)
                            ? reply_text.substr(start)
                            : reply_text.substr(start, close - start);
    auto a = inner.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = inner.find_last_not_of(" \t\r\n");
    return inner.substr(a, b - a + 1);
}

std::string now_utc() {
    auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

Corpus generate_semantics(const Corpus& input, llmgw::Gateway& gateway,
                          const std::string& model_id) {
    Corpus out = input;
    for (auto& tc : out.entries) {
        if (!tc.filter_status.kept) continue;
        for (auto& assertion : tc.assertions) {
            if (assertion.semantic && !assertion.semantic->empty()) continue;
            llmgw::ChatRequest req;
            req.model_id = model_id;
            req.user_text = promptkit::build_semantics_prompt(assertion);
            req.temperature = 0.0;
            req.max_output_tokens = 128;
            try {
                assertion.semantic = gateway.complete(req).text;
            } catch (const std::exception& e) {
                throw RunError("semantics failed for case " + tc.id +
                               ", assertion '" + assertion.statement +
                               "': " + e.what());
            }
        }
    }
    return out;
}

RunResult run_ablation(const RunPlan& plan) {
    validate_plan(plan);
    const bool mock = plan.providers == "mock";

    fs::create_directories(plan.output_dir);
    fs::create_directories(fs::path(plan.output_dir) / "corpus");
    fs::create_directories(fs::path(plan.output_dir) / "prompts");

    Corpus loaded = corpus::load_corpus(plan.corpus_path);

    llmgw::GatewayConfig gw_cfg;
    gw_cfg.cache_dir = (fs::path(plan.output_dir) / "replies").string();
    llmgw::Gateway gateway(build_provider(plan), gw_cfg);

    bool needs_semantics = std::any_of(plan.variants.begin(),
                                       plan.variants.end(),
                                       variant_needs_semantics);
    Corpus enriched = needs_semantics
                          ? generate_semantics(loaded, gateway, "semantics")
                          : loaded;
    corpus::save_corpus(
        enriched, (fs::path(plan.output_dir) / "corpus" / "corpus.l").string());

    std::vector<const TestCase*> kept;
    for (const auto& tc : enriched.entries)
        if (tc.filter_status.kept) kept.push_back(&tc);
    if (kept.empty()) throw RunError("corpus has no kept cases");

    RunResult result;
    result.plan = plan;
    result.metadata.judge_model = plan.judge_model;
    result.metadata.created_at = mock ? "1970-01-01T00:00:00Z" : now_utc();

    // golden prompt copies and per-variant prompt hashes
    std::map<Variant, std::string> hash_material;
    for (auto variant : plan.variants) {
        for (const auto* tc : kept) {
            auto bundle = promptkit::build_summary_prompt(*tc, variant);
            hash_material[variant] += bundle.text;
            std::ofstream out(fs::path(plan.output_dir) / "prompts" /
                              (tc->id + "__" + promptkit::to_string(variant) +
                               ".txt"),
                              std::ios::binary);
            out << bundle.text;
        }
        result.metadata.prompt_hash_per_variant[promptkit::to_string(
            variant)] = sha256_hex(hash_material[variant]);
    }

    std::string records_path =
        (fs::path(plan.output_dir) / "records.l").string();
    std::ofstream records_out(records_path, std::ios::binary | std::ios::trunc);

    auto embedder_for = [&](const std::vector<std::string>& tokens) {
        llmgw::EmbeddingRequest req;
        req.model_id = "embedder";
        req.tokens = tokens;
        auto reply = gateway.embed(req);
        std::map<std::string, std::vector<double>> lookup;
        for (size_t i = 0; i < tokens.size(); ++i)
            lookup[tokens[i]] = reply.vectors[i];
        return lookup;
    };

    auto judge_score = [&](const std::string& code,
                           const std::string& comment) {
        llmgw::ChatRequest req;
        req.model_id = plan.judge_model;
        req.user_text = promptkit::build_judge_prompt(code, comment);
        req.temperature = 0.0;
        req.max_output_tokens = 64;
        return promptkit::parse_judge_reply(gateway.complete(req).text);
    };

    long total_cells = 0, error_cells = 0;
    metrics::MetricConfig metric_cfg;

    for (const auto& model : plan.models) {
        for (auto variant : plan.variants) {
            for (const auto* tc : kept) {
                ++total_cells;
                ScoreRecord rec;
                rec.case_id = tc->id;
                rec.model_id = model;
                rec.variant = variant;
                try {
                    auto bundle = promptkit::build_summary_prompt(*tc, variant);
                    llmgw::ChatRequest req;
                    req.model_id = model;
                    req.user_text = bundle.text;
                    req.temperature = result.metadata.summary_temperature;
                    req.max_output_tokens = result.metadata.summary_max_tokens;
                    std::string summary =
                        extract_summary(gateway.complete(req).text);

                    auto cand = metrics::tokenize(summary);
                    auto ref = metrics::tokenize(tc->comment_norm);
                    rec.bleu = metrics::bleu4(cand, ref, metric_cfg);
                    rec.rouge_l = metrics::rouge_l(cand, ref, metric_cfg);
                    rec.meteor = metrics::meteor(cand, ref, metric_cfg);

                    if (!cand.empty() && !ref.empty()) {
                        auto lookup = embedder_for([&] {
                            std::vector<std::string> all = cand;
                            all.insert(all.end(), ref.begin(), ref.end());
                            std::sort(all.begin(), all.end());
                            all.erase(std::unique(all.begin(), all.end()),
                                      all.end());
                            return all;
                        }());
                        rec.bertscore_f1 =
                            metrics::bertscore(cand, ref,
                                               [&](const std::string& t) {
                                                   return lookup.at(t);
                                               })
                                .f1;
                    }
                    rec.judge = judge_score(tc->test_source, summary);
                } catch (const std::exception& e) {
                    rec.error = e.what();
                    ++error_cells;
                }
                json j = {{"case_id", rec.case_id},
                          {"model_id", rec.model_id},
                          {"variant", promptkit::to_string(rec.variant)},
                          {"bleu", rec.bleu},
                          {"meteor", rec.meteor},
                          {"rouge_l", rec.rouge_l},
                          {"bertscore_f1", rec.bertscore_f1},
                          {"judge", rec.judge},
                          {"error", rec.error}};
                records_out << j.dump() << '\n';
                records_out.flush();
                result.records.push_back(std::move(rec));
            }
        }
    }

    if (error_cells * 10 > total_cells)
        throw TooManyCellErrors(std::to_string(error_cells) + " of " +
                                std::to_string(total_cells) +
                                " cells failed (over 10% tolerance)");

    // ground-truth baseline: one judge call per kept case
    double gt_sum = 0.0;
    long gt_count = 0;
    for (const auto* tc : kept) {
        gt_sum += judge_score(tc->test_source, tc->comment_norm);
        ++gt_count;
    }
    result.gt_judge_mean = round2(gt_sum / static_cast<double>(gt_count));

    auto stats = gateway.stats();
    result.metadata.provider_calls = stats.provider_calls;
    result.metadata.cache_hits = stats.cache_hits;

    // reports
    {
        std::ofstream out(fs::path(plan.output_dir) / "report.txt",
                          std::ios::binary);
        out << render_report_text(result.records, result.gt_judge_mean);
    }
    {
        std::ofstream out(fs::path(plan.output_dir) / "report.csv",
                          std::ios::binary);
        out << render_report_csv(result.records, result.gt_judge_mean);
    }
    {
        std::ofstream out(fs::path(plan.output_dir) / "meta.l",
                          std::ios::binary);
        json plan_j = {{"corpus_path", plan.corpus_path},
                       {"models", plan.models},
                       {"providers", plan.providers},
                       {"seed", plan.seed},
                       {"output_dir", plan.output_dir},
                       {"judge_model", plan.judge_model}};
        json variants_j = json::array();
        for (auto v : plan.variants)
            variants_j.push_back(promptkit::to_string(v));
        plan_j["variants"] = variants_j;
        out << json{{"plan", plan_j}}.dump() << '\n';
        out << json{{"prompt_hashes",
                     result.metadata.prompt_hash_per_variant}}
                   .dump()
            << '\n';
        out << json{{"decoding",
                     {{"summary_temperature",
                       result.metadata.summary_temperature},
                      {"summary_max_tokens",
                       result.metadata.summary_max_tokens},
                      {"judge_temperature",
                       result.metadata.judge_temperature},
                      {"judge_model", result.metadata.judge_model}}}}
                   .dump()
            << '\n';
        out << json{{"run",
                     {{"created_at", result.metadata.created_at},
                      {"gt_judge_mean", result.gt_judge_mean}}}}
                   .dump()
            << '\n';
    }
    return result;
}

VariantComparison compare_variants(const std::vector<ScoreRecord>& records,
                                   Variant variant_a, Variant variant_b,
                                   const std::string& metric) {
    auto pick = [&](const ScoreRecord& r) -> double {
        if (metric == "bleu") return r.bleu;
        if (metric == "meteor") return r.meteor;
        if (metric == "rouge_l") return r.rouge_l;
        if (metric == "bertscore_f1") return r.bertscore_f1;
        if (metric == "judge") return r.judge;
        throw RunError("unknown metric: " + metric);
    };
    auto mean_of = [&](Variant v) {
        double sum = 0.0;
        long n = 0;
        for (const auto& r : records) {
            if (r.variant == v && r.ok()) {
                sum += pick(r);
                ++n;
            }
        }
        if (n == 0)
            throw RunError("UnknownVariant: " + promptkit::to_string(v));
        return sum / static_cast<double>(n);
    };
    VariantComparison cmp;
    cmp.mean_a = mean_of(variant_a);
    cmp.mean_b = mean_of(variant_b);
    cmp.delta = round2(cmp.mean_a - cmp.mean_b);
    cmp.pct = std::round(1000.0 * (cmp.mean_a - cmp.mean_b) / cmp.mean_b) / 10.0;
    return cmp;
}

namespace {

struct MaxMarks {
    // per model: which rows hold the per-metric maximum
    std::map<std::string, std::array<double, 5>> maxima;
};

std::array<double, 5> row_values(const metrics::AggregateRow& row) {
    return {row.bleu, row.meteor, row.rouge_l, row.bertscore_f1, row.judge};
}

MaxMarks find_maxima(const std::vector<metrics::AggregateRow>& rows) {
    MaxMarks marks;
    for (const auto& row : rows) {
        auto values = row_values(row);
        auto it = marks.maxima.find(row.model_id);
        if (it == marks.maxima.end()) {
            marks.maxima[row.model_id] = values;
        } else {
            for (int i = 0; i < 5; ++i)
                it->second[i] = std::max(it->second[i], values[i]);
        }
    }
    return marks;
}

std::string fmt2(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << v;
    return out.str();
}

}  // namespace

std::string render_report_text(const std::vector<ScoreRecord>& records,
                               double gt_judge_mean) {
    auto rows = metrics::aggregate(records);
    auto marks = find_maxima(rows);

    std::ostringstream out;
    if (gt_judge_mean >= 0.0)
        out << "Ground-truth judge mean: " << fmt2(gt_judge_mean) << "\n\n";

    const std::array<std::string, 5> headers = {
        "BLEU", "METEOR", "ROUGE-L", "BERTScore F1", "LLM Evals"};
    size_t model_w = 5, variant_w = 7;
    for (const auto& row : rows) {
        model_w = std::max(model_w, row.model_id.size());
        variant_w =
            std::max(variant_w, promptkit::variant_label(row.variant).size());
    }

    out << std::left << std::setw(static_cast<int>(model_w) + 2) << "Model"
        << std::setw(static_cast<int>(variant_w) + 2) << "Variant";
    for (const auto& h : headers)
        out << std::right << std::setw(static_cast<int>(h.size()) + 4) << h;
    out << '\n';

    for (const auto& row : rows) {
        out << std::left << std::setw(static_cast<int>(model_w) + 2)
            << row.model_id << std::setw(static_cast<int>(variant_w) + 2)
            << promptkit::variant_label(row.variant);
        auto values = row_values(row);
        const auto& maxima = marks.maxima.at(row.model_id);
        for (int i = 0; i < 5; ++i) {
            std::string cell = fmt2(values[i]);
            if (values[i] == maxima[i]) cell += "*";
            out << std::right
                << std::setw(static_cast<int>(headers[i].size()) + 4) << cell;
        }
        out << '\n';
    }
    return out.str();
}

std::string render_report_csv(const std::vector<ScoreRecord>& records,
                              double gt_judge_mean) {
    auto rows = metrics::aggregate(records);
    auto marks = find_maxima(rows);

    std::ostringstream out;
    if (gt_judge_mean >= 0.0)
        out << "# ground_truth_judge_mean," << fmt2(gt_judge_mean) << '\n';
    out << "model,variant,bleu,meteor,rouge_l,bertscore_f1,llm_evals,"
           "max_marks\n";
    for (const auto& row : rows) {
        auto values = row_values(row);
        const auto& maxima = marks.maxima.at(row.model_id);
        std::string max_marks;
        const std::array<std::string, 5> names = {"bleu", "meteor", "rouge_l",
                                                  "bertscore_f1", "llm_evals"};
        for (int i = 0; i < 5; ++i) {
            if (values[i] == maxima[i]) {
                if (!max_marks.empty()) max_marks += ';';
                max_marks += names[i];
            }
        }
        out << row.model_id << ",\"" << promptkit::variant_label(row.variant)
            << "\"," << fmt2(row.bleu) << ',' << fmt2(row.meteor) << ','
            << fmt2(row.rouge_l) << ',' << fmt2(row.bertscore_f1) << ','
            << fmt2(row.judge) << ',' << max_marks << '\n';
    }
    return out.str();
}

}  // namespace testsum::evalrun
