#include "testsum/corpus.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace testsum::corpus {

using nlohmann::json;

std::string to_string(AssertApi api) {
    switch (api) {
        case AssertApi::AssertEquals: return "assert_equals";
        case AssertApi::AssertTrue: return "assert_true";
        case AssertApi::AssertFalse: return "assert_false";
        case AssertApi::AssertNull: return "assert_null";
        case AssertApi::AssertNotNull: return "assert_not_null";
        case AssertApi::AssertThat: return "assert_that";
        case AssertApi::AssertSame: return "assert_same";
        case AssertApi::AssertNotSame: return "assert_not_same";
        case AssertApi::AssertArrayEquals: return "assert_array_equals";
        case AssertApi::Fail: return "fail";
        case AssertApi::Other: return "other";
    }
    return "other";
}

AssertApi assert_api_from_string(const std::string& s) {
    if (s == "assert_equals") return AssertApi::AssertEquals;
    if (s == "assert_true") return AssertApi::AssertTrue;
    if (s == "assert_false") return AssertApi::AssertFalse;
    if (s == "assert_null") return AssertApi::AssertNull;
    if (s == "assert_not_null") return AssertApi::AssertNotNull;
    if (s == "assert_that") return AssertApi::AssertThat;
    if (s == "assert_same") return AssertApi::AssertSame;
    if (s == "assert_not_same") return AssertApi::AssertNotSame;
    if (s == "assert_array_equals") return AssertApi::AssertArrayEquals;
    if (s == "fail") return AssertApi::Fail;
    if (s == "other") return AssertApi::Other;
    throw CorpusError("unknown assertion api: " + s);
}

std::string to_string(RejectReason r) {
    switch (r) {
        case RejectReason::Empty: return "Empty";
        case RejectReason::NonEnglish: return "NonEnglish";
        case RejectReason::TooShort: return "TooShort";
        case RejectReason::Placeholder: return "Placeholder";
        case RejectReason::LinkOnly: return "LinkOnly";
    }
    return "Empty";
}

RejectReason reject_reason_from_string(const std::string& s) {
    if (s == "Empty") return RejectReason::Empty;
    if (s == "NonEnglish") return RejectReason::NonEnglish;
    if (s == "TooShort") return RejectReason::TooShort;
    if (s == "Placeholder") return RejectReason::Placeholder;
    if (s == "LinkOnly") return RejectReason::LinkOnly;
    throw CorpusError("unknown rejection reason: " + s);
}

namespace {

std::string collapse_whitespace(const std::string& s) {
    std::string out;
    bool in_space = true;  // swallow leading whitespace
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            in_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::istringstream in(text);
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

}  // namespace

std::string normalize_comment(const std::string& raw) {
    std::string text = raw;
    // outer block markers
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text.compare(first, 2, "/*") == 0) {
        size_t pos = first + 2;
        while (pos < text.size() && text[pos] == '*') ++pos;
        text = text.substr(pos);
        auto close = text.rfind("*/");
        if (close != std::string::npos) text = text.substr(0, close);
    }
    // per-line gutters
    std::string joined;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        size_t p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos) continue;
        if (line.compare(p, 2, "//") == 0) {
            p += 2;
        } else {
            while (p < line.size() && line[p] == '*') ++p;
        }
        joined += line.substr(p);
        joined += ' ';
    }
    return collapse_whitespace(joined);
}

int word_count(const std::string& text) {
    int count = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

namespace {

// Decodes one UTF-8 codepoint starting at i; advances i past it.
uint32_t next_codepoint(const std::string& s, size_t& i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    uint32_t cp = c;
    int extra = 0;
    if ((c & 0x80) == 0) {
        extra = 0;
    } else if ((c & 0xE0) == 0xC0) {
        cp = c & 0x1F;
        extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
        cp = c & 0x0F;
        extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
        cp = c & 0x07;
        extra = 3;
    }
    ++i;
    for (int k = 0; k < extra && i < s.size(); ++k, ++i)
        cp = (cp << 6) | (static_cast<unsigned char>(s[i]) & 0x3F);
    return cp;
}

bool is_nonlatin_punct(uint32_t cp) {
    return (cp >= 0x2000 && cp <= 0x206F) ||  // general punctuation
           (cp >= 0x00A0 && cp <= 0x00BF) ||  // latin-1 signs
           (cp >= 0x3000 && cp <= 0x303F);    // CJK punctuation
}

}  // namespace

bool is_english(const std::string& text, double latin_threshold) {
    size_t i = 0;
    long alphabetic = 0, basic_latin = 0;
    while (i < text.size()) {
        uint32_t cp = next_codepoint(text, i);
        if (cp < 0x80) {
            if (std::isalpha(static_cast<int>(cp))) {
                ++alphabetic;
                ++basic_latin;
            }
        } else if (!is_nonlatin_punct(cp)) {
            ++alphabetic;
        }
    }
    if (alphabetic == 0) return false;
    return static_cast<double>(basic_latin) >=
           latin_threshold * static_cast<double>(alphabetic);
}

namespace {

std::string lower_strip_punct(const std::string& word) {
    std::string out;
    for (unsigned char c : word)
        if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

const std::set<std::string> kPlaceholderWords = {"todo", "fixme", "deprecated"};

bool is_placeholder(const std::vector<std::string>& words) {
    std::vector<std::string> cleaned;
    for (const auto& w : words) {
        auto c = lower_strip_punct(w);
        if (!c.empty()) cleaned.push_back(c);
    }
    if (cleaned.empty()) return false;
    bool all_placeholder = true;
    for (const auto& w : cleaned)
        if (!kPlaceholderWords.contains(w)) all_placeholder = false;
    if (all_placeholder) return true;
    return kPlaceholderWords.contains(cleaned.front()) &&
           static_cast<int>(cleaned.size()) - 1 < 4;
}

bool is_url_token(const std::string& w) {
    return w.starts_with("http://") || w.starts_with("https://") ||
           w.starts_with("www.");
}

std::string remove_html_tags(const std::string& text) {
    std::string out;
    bool in_tag = false;
    for (char c : text) {
        if (c == '<') {
            in_tag = true;
        } else if (c == '>' && in_tag) {
            in_tag = false;
        } else if (!in_tag) {
            out.push_back(c);
        }
    }
    return out;
}

bool is_link_only(const std::string& text) {
    bool saw_link = text.find("http://") != std::string::npos ||
                    text.find("https://") != std::string::npos ||
                    text.find("www.") != std::string::npos ||
                    text.find('<') != std::string::npos;
    if (!saw_link) return false;
    int words = 0;
    for (const auto& w : split_words(remove_html_tags(text)))
        if (!is_url_token(w)) ++words;
    return words < 4;
}

}  // namespace

FilterStatus filter_comment(const std::string& text) {
    if (text.empty()) return FilterStatus::reject(RejectReason::Empty);
    if (!is_english(text)) return FilterStatus::reject(RejectReason::NonEnglish);
    auto words = split_words(text);
    // Placeholder and link-only checks take precedence over plain length:
    // "TODO" is a placeholder, not merely a short comment.
    if (is_placeholder(words))
        return FilterStatus::reject(RejectReason::Placeholder);
    if (is_link_only(text)) return FilterStatus::reject(RejectReason::LinkOnly);
    if (static_cast<int>(words.size()) < 4)
        return FilterStatus::reject(RejectReason::TooShort);
    return FilterStatus::keep();
}

namespace {

json assertion_to_json(const Assertion& a) {
    json j;
    j["statement"] = a.statement;
    j["api"] = to_string(a.api);
    j["message"] = a.message ? json(*a.message) : json(nullptr);
    j["semantic"] = a.semantic ? json(*a.semantic) : json(nullptr);
    return j;
}

Assertion assertion_from_json(const json& j) {
    Assertion a;
    a.statement = j.at("statement").get<std::string>();
    a.api = assert_api_from_string(j.at("api").get<std::string>());
    if (j.contains("message") && !j["message"].is_null())
        a.message = j["message"].get<std::string>();
    if (j.contains("semantic") && !j["semantic"].is_null())
        a.semantic = j["semantic"].get<std::string>();
    return a;
}

const std::set<std::string> kCaseFields = {
    "id",          "project",      "test_file_path", "test_class_name",
    "test_method_name", "test_source", "comment_raw", "comment_norm",
    "assertions",  "muts",         "filter_status"};

json case_to_json(const TestCase& tc) {
    json j;
    j["id"] = tc.id;
    j["project"] = tc.project;
    j["test_file_path"] = tc.test_file_path;
    j["test_class_name"] = tc.test_class_name;
    j["test_method_name"] = tc.test_method_name;
    j["test_source"] = tc.test_source;
    j["comment_raw"] = tc.comment_raw;
    j["comment_norm"] = tc.comment_norm;
    j["assertions"] = json::array();
    for (const auto& a : tc.assertions)
        j["assertions"].push_back(assertion_to_json(a));
    j["muts"] = json::array();
    for (const auto& m : tc.muts)
        j["muts"].push_back({{"qualified_name", m.qualified_name},
                             {"signature", m.signature},
                             {"body", m.body}});
    j["filter_status"] = tc.filter_status.kept
                             ? "kept"
                             : "rejected:" + to_string(*tc.filter_status.reason);
    return j;
}

TestCase case_from_json(const json& j, int line_no) {
    for (const auto& [key, value] : j.items()) {
        if (!kCaseFields.contains(key))
            throw CorpusError("unknown field '" + key + "' at line " +
                              std::to_string(line_no));
    }
    TestCase tc;
    try {
        tc.id = j.at("id").get<std::string>();
        tc.project = j.at("project").get<std::string>();
        tc.test_file_path = j.at("test_file_path").get<std::string>();
        tc.test_class_name = j.at("test_class_name").get<std::string>();
        tc.test_method_name = j.at("test_method_name").get<std::string>();
        tc.test_source = j.at("test_source").get<std::string>();
        tc.comment_raw = j.at("comment_raw").get<std::string>();
        tc.comment_norm = j.at("comment_norm").get<std::string>();
        for (const auto& a : j.at("assertions"))
            tc.assertions.push_back(assertion_from_json(a));
        for (const auto& m : j.at("muts"))
            tc.muts.push_back({m.at("qualified_name").get<std::string>(),
                               m.at("signature").get<std::string>(),
                               m.at("body").get<std::string>()});
        auto fs = j.at("filter_status").get<std::string>();
        if (fs == "kept") {
            tc.filter_status = FilterStatus::keep();
        } else if (fs.starts_with("rejected:")) {
            tc.filter_status =
                FilterStatus::reject(reject_reason_from_string(fs.substr(9)));
        } else {
            throw CorpusError("bad filter_status '" + fs + "'");
        }
    } catch (const json::exception& e) {
        throw CorpusError("malformed record at line " + std::to_string(line_no) +
                          ": " + e.what());
    }
    return tc;
}

}  // namespace

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CorpusError("cannot open for write: " + path);
    json meta = {{"_meta",
                  {{"source_name", corpus.meta.source_name},
                   {"created_at", corpus.meta.created_at},
                   {"tool_version", corpus.meta.tool_version}}}};
    out << meta.dump() << '\n';
    for (const auto& tc : corpus.entries) out << case_to_json(tc).dump() << '\n';
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError("cannot open for read: " + path);
    Corpus corpus;
    std::set<std::string> seen_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw CorpusError("malformed record at line " +
                              std::to_string(line_no) + ": " + e.what());
        }
        if (j.contains("_meta")) {
            const auto& m = j["_meta"];
            corpus.meta.source_name = m.value("source_name", "");
            corpus.meta.created_at = m.value("created_at", "");
            corpus.meta.tool_version = m.value("tool_version", "");
            continue;
        }
        TestCase tc = case_from_json(j, line_no);
        if (!seen_ids.insert(tc.id).second)
            throw CorpusError("duplicate id '" + tc.id + "' at line " +
                              std::to_string(line_no));
        corpus.entries.push_back(std::move(tc));
    }
    return corpus;
}

}  // namespace testsum::corpus
