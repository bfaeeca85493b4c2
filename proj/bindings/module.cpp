#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "testsum/corpus.hpp"
#include "testsum/evalrun.hpp"
#include "testsum/extractor.hpp"
#include "testsum/metrics.hpp"
#include "testsum/promptkit.hpp"
#include "testsum/scores.hpp"

namespace py = pybind11;
using namespace testsum;

namespace {

std::string filter_comment_str(const std::string& text) {
    auto status = corpus::filter_comment(text);
    if (status.kept) return "kept";
    return "rejected:" + corpus::to_string(*status.reason);
}

std::vector<std::string> variant_names() {
    std::vector<std::string> out;
    for (auto v : promptkit::all_variants())
        out.push_back(promptkit::to_string(v));
    return out;
}

py::list extract_assertions_py(const std::string& method_source) {
    py::list out;
    for (const auto& a : extractor::extract_assertions(method_source)) {
        py::dict d;
        d["statement"] = a.statement;
        d["api"] = corpus::to_string(a.api);
        d["message"] = a.message ? py::object(py::str(*a.message))
                                 : py::object(py::none());
        out.append(d);
    }
    return out;
}

size_t extract_corpus_py(const std::string& src_dir,
                         const std::string& output_path) {
    auto corpus = extractor::extract_corpus(src_dir);
    corpus::save_corpus(corpus, output_path);
    return corpus.entries.size();
}

py::dict run_py(const std::string& plan_path) {
    auto plan = evalrun::load_plan(plan_path);
    auto result = evalrun::run_ablation(plan);
    py::dict out;
    out["records"] = result.records.size();
    out["gt_judge_mean"] = result.gt_judge_mean;
    out["output_dir"] = result.plan.output_dir;
    return out;
}

std::string render_report_py(const std::string& records_path,
                             const std::string& format) {
    auto records = metrics::load_records(records_path);
    if (format == "csv") return evalrun::render_report_csv(records);
    return evalrun::render_report_text(records);
}

}  // namespace

PYBIND11_MODULE(_testsum, m) {
    m.doc() = "Test summarization toolkit: extraction, prompts, metrics";

    m.def("normalize_comment", &corpus::normalize_comment,
          "Strip comment markers and collapse whitespace");
    m.def("word_count", &corpus::word_count);
    m.def("is_english", &corpus::is_english, py::arg("text"),
          py::arg("latin_threshold") = 0.9);
    m.def("filter_comment", &filter_comment_str,
          "Classify a normalized comment: 'kept' or 'rejected:<Reason>'");

    m.def("tokenize", &metrics::tokenize);
    m.def(
        "bleu4",
        [](const metrics::Tokens& c, const metrics::Tokens& r) {
            return metrics::bleu4(c, r);
        },
        py::arg("candidate"), py::arg("reference"));
    m.def(
        "rouge_l",
        [](const metrics::Tokens& c, const metrics::Tokens& r) {
            return metrics::rouge_l(c, r);
        },
        py::arg("candidate"), py::arg("reference"));
    m.def(
        "meteor",
        [](const metrics::Tokens& c, const metrics::Tokens& r) {
            return metrics::meteor(c, r);
        },
        py::arg("candidate"), py::arg("reference"));

    m.def("extract_assertions", &extract_assertions_py);
    m.def("strip_assertion_messages", &extractor::strip_assertion_messages);
    m.def("extract_corpus", &extract_corpus_py, py::arg("src_dir"),
          py::arg("output_path"),
          "Walk a Java tree and write a corpus file; returns the case count");

    m.def("variants", &variant_names);
    m.def("build_judge_prompt", &promptkit::build_judge_prompt,
          py::arg("code"), py::arg("comment"));
    m.def("parse_judge_reply", &promptkit::parse_judge_reply);

    m.def("run", &run_py, py::arg("plan_path"),
          "Execute an ablation run plan; returns summary statistics");
    m.def("render_report", &render_report_py, py::arg("records_path"),
          py::arg("format") = "text");
}
