#include "testsum/scores.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

namespace testsum::metrics {

using nlohmann::json;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ScoreRecord>& records) {
    std::vector<std::string> model_order;
    std::map<std::pair<std::string, promptkit::Variant>, AggregateRow> groups;

    for (const auto& r : records) {
        if (!r.ok()) continue;
        if (std::find(model_order.begin(), model_order.end(), r.model_id) ==
            model_order.end())
            model_order.push_back(r.model_id);
        auto& row = groups[{r.model_id, r.variant}];
        row.model_id = r.model_id;
        row.variant = r.variant;
        ++row.count;
        row.bleu += r.bleu;
        row.meteor += r.meteor;
        row.rouge_l += r.rouge_l;
        row.bertscore_f1 += r.bertscore_f1;
        row.judge += r.judge;
    }
    std::vector<AggregateRow> out;
    for (const auto& model : model_order) {
        for (auto variant : promptkit::all_variants()) {
            auto it = groups.find({model, variant});
            if (it == groups.end()) continue;
            AggregateRow row = it->second;
            row.bleu = round2(row.bleu / row.count);
            row.meteor = round2(row.meteor / row.count);
            row.rouge_l = round2(row.rouge_l / row.count);
            row.bertscore_f1 = round2(row.bertscore_f1 / row.count);
            row.judge = round2(row.judge / row.count);
            out.push_back(row);
        }
    }
    return out;
}

void save_records(const std::vector<ScoreRecord>& records,
                  const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MetricError("cannot open for write: " + path);
    for (const auto& r : records) {
        json j = {{"case_id", r.case_id},
                  {"model_id", r.model_id},
                  {"variant", promptkit::to_string(r.variant)},
                  {"bleu", r.bleu},
                  {"meteor", r.meteor},
                  {"rouge_l", r.rouge_l},
                  {"bertscore_f1", r.bertscore_f1},
                  {"judge", r.judge},
                  {"error", r.error}};
        out << j.dump() << '\n';
    }
}

std::vector<ScoreRecord> load_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MetricError("cannot open for read: " + path);
    std::vector<ScoreRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw MetricError("malformed record at line " +
                              std::to_string(line_no) + ": " + e.what());
        }
        ScoreRecord r;
        r.case_id = j.at("case_id");
        r.model_id = j.at("model_id");
        r.variant = promptkit::variant_from_string(j.at("variant"));
        r.bleu = j.at("bleu");
        r.meteor = j.at("meteor");
        r.rouge_l = j.at("rouge_l");
        r.bertscore_f1 = j.at("bertscore_f1");
        r.judge = j.at("judge");
        r.error = j.value("error", "");
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace testsum::metrics
