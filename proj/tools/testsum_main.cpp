#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "testsum/corpus.hpp"
#include "testsum/evalrun.hpp"
#include "testsum/extractor.hpp"
#include "testsum/llmgw.hpp"
#include "testsum/metrics.hpp"
#include "testsum/scores.hpp"

namespace fs = std::filesystem;
using namespace testsum;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitProviderFailure = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::pair<std::string, std::string>> read_mapping(
    const std::string& path) {
    std::vector<std::pair<std::string, std::string>> out;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mapping file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("mapping line missing tab: " + line);
        out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

llmgw::Gateway make_gateway(const std::string& provider_spec,
                            const std::string& cache_dir, uint64_t seed) {
    std::shared_ptr<llmgw::Provider> provider;
    if (provider_spec == "mock") {
        llmgw::MockOptions opts;
        opts.seed = seed;
        provider = llmgw::make_mock_provider(opts);
    } else {
        auto configs = llmgw::load_provider_config(provider_spec);
        if (configs.empty())
            throw std::runtime_error("empty provider config: " + provider_spec);
        provider = llmgw::make_http_provider(configs.front());
    }
    llmgw::GatewayConfig cfg;
    cfg.cache_dir = cache_dir;
    return llmgw::Gateway(provider, cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Test summary generation and evaluation toolkit"};
    app.require_subcommand(1);

    // extract
    auto* extract = app.add_subcommand(
        "extract", "Build a corpus from a Java source tree");
    std::string src_dir, map_file, extract_out;
    extract->add_option("src_dir", src_dir, "directory of .java files")
        ->required();
    extract->add_option("--map", map_file,
                        "two-column test->production mapping file");
    extract->add_option("-o,--output", extract_out, "corpus output path")
        ->required();

    // filter
    auto* filter = app.add_subcommand(
        "filter", "Re-apply comment quality filters to a corpus");
    std::string filter_in, filter_out, filter_report;
    filter->add_option("corpus", filter_in, "corpus path")->required();
    filter->add_option("-o,--output", filter_out, "filtered corpus path")
        ->required();
    filter->add_option("--report", filter_report,
                       "write a <id>\\t<reason> rejection report");

    // semantics
    auto* semantics = app.add_subcommand(
        "semantics", "Generate assertion semantics for kept cases");
    std::string sem_in, sem_out, sem_provider = "mock", sem_cache = "cache";
    uint64_t sem_seed = 0;
    semantics->add_option("corpus", sem_in, "corpus path")->required();
    semantics->add_option("--provider", sem_provider,
                          "provider config path or 'mock'");
    semantics->add_option("--cache", sem_cache, "reply cache directory");
    semantics->add_option("--seed", sem_seed, "mock provider seed");
    semantics->add_option("-o,--output", sem_out, "enriched corpus path")
        ->required();

    // run
    auto* run = app.add_subcommand("run", "Execute an ablation run plan");
    std::string plan_path;
    run->add_option("--plan", plan_path, "run plan file")->required();

    // report
    auto* report = app.add_subcommand(
        "report", "Render the aggregate table from a records file");
    std::string report_in, report_format = "text", report_out;
    report->add_option("records", report_in, "records file")->required();
    report->add_option("--format", report_format, "csv or text")
        ->check(CLI::IsMember({"csv", "text"}));
    report->add_option("-o,--output", report_out,
                       "output file (default stdout)");

    // metrics
    auto* metrics_cmd = app.add_subcommand(
        "metrics", "Score one candidate file against one reference file");
    std::string cand_path, ref_path;
    metrics_cmd->add_option("--candidate", cand_path, "candidate text file")
        ->required();
    metrics_cmd->add_option("--reference", ref_path, "reference text file")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*extract) {
            std::vector<std::pair<std::string, std::string>> mapping;
            if (!map_file.empty()) mapping = read_mapping(map_file);
            auto corpus = extractor::extract_corpus(src_dir, mapping);
            corpus::save_corpus(corpus, extract_out);
            std::cout << "extracted " << corpus.entries.size() << " cases to "
                      << extract_out << '\n';
        } else if (*filter) {
            auto corpus = corpus::load_corpus(filter_in);
            std::ofstream rep;
            if (!filter_report.empty()) rep.open(filter_report);
            size_t kept = 0;
            for (auto& tc : corpus.entries) {
                tc.filter_status = corpus::filter_comment(tc.comment_norm);
                if (tc.filter_status.kept) {
                    ++kept;
                } else if (rep.is_open()) {
                    rep << tc.id << '\t'
                        << corpus::to_string(*tc.filter_status.reason) << '\n';
                }
            }
            corpus::save_corpus(corpus, filter_out);
            std::cout << "kept " << kept << " of " << corpus.entries.size()
                      << " cases\n";
        } else if (*semantics) {
            auto corpus = corpus::load_corpus(sem_in);
            auto gateway = make_gateway(sem_provider, sem_cache, sem_seed);
            auto enriched =
                evalrun::generate_semantics(corpus, gateway, "semantics");
            corpus::save_corpus(enriched, sem_out);
            std::cout << "semantics written to " << sem_out << '\n';
        } else if (*run) {
            auto plan = evalrun::load_plan(plan_path);
            auto result = evalrun::run_ablation(plan);
            std::cout << "run complete: " << result.records.size()
                      << " records, gt judge mean "
                      << result.gt_judge_mean << ", outputs in "
                      << plan.output_dir << '\n';
        } else if (*report) {
            auto records = metrics::load_records(report_in);
            std::string rendered = (report_format == "csv")
                                       ? evalrun::render_report_csv(records)
                                       : evalrun::render_report_text(records);
            if (report_out.empty()) {
                std::cout << rendered;
            } else {
                std::ofstream out(report_out, std::ios::binary);
                out << rendered;
            }
        } else if (*metrics_cmd) {
            auto cand = metrics::tokenize(read_file(cand_path));
            auto ref = metrics::tokenize(read_file(ref_path));
            metrics::MetricConfig cfg;
            llmgw::MockOptions opts;
            auto embedder_provider = llmgw::make_mock_provider(opts);
            auto bert = metrics::bertscore(
                cand, ref, [&](const std::string& t) {
                    llmgw::EmbeddingRequest req;
                    req.model_id = "embedder";
                    req.tokens = {t};
                    return embedder_provider->embed(req).vectors[0];
                });
            std::cout << "BLEU " << metrics::bleu4(cand, ref, cfg) << '\n'
                      << "METEOR " << metrics::meteor(cand, ref, cfg) << '\n'
                      << "ROUGE-L " << metrics::rouge_l(cand, ref, cfg) << '\n'
                      << "BERTScore-F1 " << bert.f1 << '\n';
        }
    } catch (const evalrun::TooManyCellErrors& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitProviderFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
