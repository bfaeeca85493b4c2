#include "testsum/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>

namespace testsum::extractor {

namespace fs = std::filesystem;
using corpus::AssertApi;
using corpus::Assertion;
using corpus::MethodUnderTest;

namespace {

// Marks each byte as code (true) or comment/string/char content (false).
std::vector<bool> code_mask(const std::string& text) {
    std::vector<bool> mask(text.size(), true);
    enum class State { Code, Line, Block, Str, Chr } state = State::Code;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        char next = (i + 1 < text.size()) ? text[i + 1] : '\0';
        switch (state) {
            case State::Code:
                if (c == '/' && next == '/') {
                    state = State::Line;
                    mask[i] = mask[i + 1] = false;
                    ++i;
                } else if (c == '/' && next == '*') {
                    state = State::Block;
                    mask[i] = mask[i + 1] = false;
                    ++i;
                } else if (c == '"') {
                    state = State::Str;  // quotes stay code, contents do not
                } else if (c == '\'') {
                    state = State::Chr;
                }
                break;
            case State::Line:
                if (c == '\n')
                    state = State::Code;
                else
                    mask[i] = false;
                break;
            case State::Block:
                mask[i] = false;
                if (c == '*' && next == '/') {
                    mask[i + 1] = false;
                    ++i;
                    state = State::Code;
                }
                break;
            case State::Str:
                if (c == '\\') {
                    mask[i] = false;
                    if (i + 1 < text.size()) mask[++i] = false;
                } else if (c == '"') {
                    state = State::Code;
                } else {
                    mask[i] = false;
                }
                break;
            case State::Chr:
                if (c == '\\') {
                    mask[i] = false;
                    if (i + 1 < text.size()) mask[++i] = false;
                } else if (c == '\'') {
                    state = State::Code;
                } else {
                    mask[i] = false;
                }
                break;
        }
    }
    return mask;
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

size_t skip_ws(const std::string& t, size_t i) {
    while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    return i;
}

// Finds the position after the matching close for the opener at `open`.
// Returns npos when unbalanced. Only code bytes count.
size_t match_balanced(const std::string& t, const std::vector<bool>& mask,
                      size_t open, char oc, char cc) {
    int depth = 0;
    for (size_t i = open; i < t.size(); ++i) {
        if (!mask[i]) continue;
        if (t[i] == oc) ++depth;
        else if (t[i] == cc && --depth == 0) return i + 1;
    }
    return std::string::npos;
}

// @Test occurrences in code regions, as positions of '@'.
std::vector<size_t> find_test_annotations(const std::string& t,
                                          const std::vector<bool>& mask) {
    std::vector<size_t> out;
    size_t pos = 0;
    while ((pos = t.find("@Test", pos)) != std::string::npos) {
        bool code = mask[pos];
        bool boundary =
            pos + 5 >= t.size() || !ident_char(t[pos + 5]);
        if (code && boundary) out.push_back(pos);
        pos += 5;
    }
    return out;
}

// Raw comment block immediately above position `at`, or "".
std::string leading_comment_before(const std::string& t, size_t at) {
    size_t end = at;
    while (end > 0 &&
           std::isspace(static_cast<unsigned char>(t[end - 1])))
        --end;
    if (end == 0) return "";
    if (end >= 2 && t.compare(end - 2, 2, "*/") == 0) {
        auto start = t.rfind("/*", end - 2);
        if (start == std::string::npos) return "";
        return t.substr(start, end - start);
    }
    // contiguous run of // lines directly above
    size_t block_end = end;
    size_t line_end = end;
    size_t block_start = std::string::npos;
    while (true) {
        size_t line_start = t.rfind('\n', line_end == 0 ? 0 : line_end - 1);
        line_start = (line_start == std::string::npos) ? 0 : line_start + 1;
        size_t p = skip_ws(t, line_start);
        if (p < line_end && t.compare(p, 2, "//") == 0) {
            block_start = p;
            if (line_start == 0) break;
            line_end = line_start - 1;
            while (line_end > 0 &&
                   t[line_end - 1] != '\n' &&
                   std::isspace(static_cast<unsigned char>(t[line_end - 1])))
                --line_end;
            if (line_end == 0) break;
        } else {
            break;
        }
    }
    if (block_start == std::string::npos) return "";
    return t.substr(block_start, block_end - block_start);
}

struct SignatureEntry {
    AssertApi api;
    int arity_with_message;  // message at argument index 0
};

const std::map<std::string, SignatureEntry>& signature_table() {
    static const std::map<std::string, SignatureEntry> table = {
        {"assertEquals", {AssertApi::AssertEquals, 3}},
        {"assertTrue", {AssertApi::AssertTrue, 2}},
        {"assertFalse", {AssertApi::AssertFalse, 2}},
        {"assertNull", {AssertApi::AssertNull, 2}},
        {"assertNotNull", {AssertApi::AssertNotNull, 2}},
        {"assertSame", {AssertApi::AssertSame, 3}},
        {"assertNotSame", {AssertApi::AssertNotSame, 3}},
        {"assertArrayEquals", {AssertApi::AssertArrayEquals, 3}},
        {"assertThat", {AssertApi::AssertThat, 3}},
        {"fail", {AssertApi::Fail, 1}},
    };
    return table;
}

struct CallSite {
    std::string name;
    size_t name_start;
    size_t open_paren;
    size_t close_paren;           // index of ')'
    std::vector<std::string> args;
    std::vector<std::pair<size_t, size_t>> arg_spans;  // [start, end)
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Splits the argument list of the call opening at `open` (index of '(').
std::optional<CallSite> parse_call(const std::string& t,
                                   const std::vector<bool>& mask,
                                   size_t name_start, size_t name_end) {
    size_t open = skip_ws(t, name_end);
    if (open >= t.size() || t[open] != '(' || !mask[open]) return std::nullopt;
    size_t after = match_balanced(t, mask, open, '(', ')');
    if (after == std::string::npos) return std::nullopt;

    CallSite call;
    call.name = t.substr(name_start, name_end - name_start);
    call.name_start = name_start;
    call.open_paren = open;
    call.close_paren = after - 1;

    bool empty = true;
    for (size_t i = open + 1; i + 1 < after; ++i) {
        if (!mask[i] || !std::isspace(static_cast<unsigned char>(t[i]))) {
            empty = false;
            break;
        }
    }
    int depth = 0;
    size_t arg_start = open + 1;
    for (size_t i = open; i < after; ++i) {
        if (!mask[i]) continue;
        char c = t[i];
        if (c == '(' || c == '[' || c == '{') {
            ++depth;
        } else if (c == ')' || c == ']' || c == '}') {
            --depth;
        } else if (c == ',' && depth == 1) {
            call.arg_spans.emplace_back(arg_start, i);
            arg_start = i + 1;
        }
    }
    if (!empty) call.arg_spans.emplace_back(arg_start, after - 1);
    for (auto [a, b] : call.arg_spans)
        call.args.push_back(trim(t.substr(a, b - a)));
    return call;
}

// All assertion call sites, in source order.
std::vector<CallSite> find_assertion_calls(const std::string& t,
                                           const std::vector<bool>& mask) {
    std::vector<CallSite> calls;
    size_t i = 0;
    while (i < t.size()) {
        if (!mask[i] || !ident_char(t[i]) ||
            std::isdigit(static_cast<unsigned char>(t[i]))) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < t.size() && mask[i] && ident_char(t[i])) ++i;
        std::string name = t.substr(start, i - start);
        if (!signature_table().contains(name)) continue;
        // skip qualified forms like Assert.fail handled fine: '.' before
        // the simple name is allowed, statement text starts at the name
        auto call = parse_call(t, mask, start, i);
        if (call) {
            i = call->close_paren + 1;
            calls.push_back(std::move(*call));
        }
    }
    return calls;
}

bool is_string_literal(const std::string& expr) {
    return expr.size() >= 2 && expr.front() == '"' && expr.back() == '"';
}

std::string unescape_literal(const std::string& expr) {
    std::string out;
    for (size_t i = 1; i + 1 < expr.size(); ++i) {
        if (expr[i] == '\\' && i + 2 < expr.size()) {
            char n = expr[++i];
            switch (n) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '\\': out.push_back('\\'); break;
                case '"': out.push_back('"'); break;
                default: out.push_back(n); break;
            }
        } else {
            out.push_back(expr[i]);
        }
    }
    return out;
}

bool is_identifier(const std::string& expr) {
    if (expr.empty() || std::isdigit(static_cast<unsigned char>(expr[0])))
        return false;
    return std::all_of(expr.begin(), expr.end(), ident_char);
}

// Resolves `String <name> = "...";` local initializers.
std::optional<std::string> resolve_local_string(const std::string& method,
                                                const std::string& name) {
    std::regex decl("String\\s+" + name + "\\s*=\\s*(\"(?:[^\"\\\\]|\\\\.)*\")");
    std::smatch m;
    if (std::regex_search(method, m, decl))
        return unescape_literal(m[1].str());
    return std::nullopt;
}

std::string resolve_message(const std::string& method,
                            const std::string& expr) {
    if (is_string_literal(expr)) return unescape_literal(expr);
    if (is_identifier(expr)) {
        if (auto lit = resolve_local_string(method, expr)) return *lit;
    }
    return expr;
}

const std::set<std::string> kJavaKeywords = {
    "if",     "for",   "while", "switch", "catch",  "synchronized",
    "return", "new",   "super", "this",   "do",     "else",
    "try",    "assert"};

}  // namespace

bool detect_test_file(const SourceFile& file) {
    return !find_test_annotations(file.text, code_mask(file.text)).empty();
}

std::vector<ExtractedMethod> extract_test_methods(const SourceFile& file) {
    const std::string& t = file.text;
    auto mask = code_mask(t);
    std::vector<ExtractedMethod> out;

    for (size_t ann : find_test_annotations(t, mask)) {
        size_t i = ann + 5;  // past "@Test"
        i = skip_ws(t, i);
        if (i < t.size() && t[i] == '(' && mask[i]) {
            i = match_balanced(t, mask, i, '(', ')');
            if (i == std::string::npos)
                throw ExtractError("UnbalancedBraces(<annotation>)");
        }
        // skip any further annotations before the signature
        while (true) {
            size_t p = skip_ws(t, i);
            if (p < t.size() && t[p] == '@' && mask[p]) {
                ++p;
                while (p < t.size() && ident_char(t[p])) ++p;
                size_t q = skip_ws(t, p);
                if (q < t.size() && t[q] == '(' && mask[q])
                    p = match_balanced(t, mask, q, '(', ')');
                i = p;
            } else {
                break;
            }
        }
        // method name: identifier before the first code '(' of the signature
        size_t paren = std::string::npos;
        for (size_t p = i; p < t.size(); ++p) {
            if (mask[p] && t[p] == '(') {
                paren = p;
                break;
            }
            if (mask[p] && t[p] == '{') break;  // malformed, no signature
        }
        std::string name = "<anonymous>";
        if (paren != std::string::npos) {
            size_t e = paren;
            while (e > i && std::isspace(static_cast<unsigned char>(t[e - 1])))
                --e;
            size_t s = e;
            while (s > i && ident_char(t[s - 1])) --s;
            if (s < e) name = t.substr(s, e - s);
        }
        // body open brace
        size_t body = std::string::npos;
        size_t search_from =
            (paren != std::string::npos)
                ? match_balanced(t, mask, paren, '(', ')')
                : i;
        if (search_from == std::string::npos)
            throw ExtractError("UnbalancedBraces(" + name + ")");
        for (size_t p = search_from; p < t.size(); ++p) {
            if (mask[p] && t[p] == '{') {
                body = p;
                break;
            }
            if (mask[p] && t[p] == ';') break;  // abstract/interface, skip
        }
        if (body == std::string::npos) continue;
        size_t end = match_balanced(t, mask, body, '{', '}');
        if (end == std::string::npos)
            throw ExtractError("UnbalancedBraces(" + name + ")");

        ExtractedMethod m;
        m.name = name;
        m.source = t.substr(ann, end - ann);
        m.leading_comment = leading_comment_before(t, ann);
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<Assertion> extract_assertions(const std::string& method_source) {
    auto mask = code_mask(method_source);
    std::vector<Assertion> out;
    for (const auto& call : find_assertion_calls(method_source, mask)) {
        const auto& entry = signature_table().at(call.name);
        Assertion a;
        size_t stmt_end = call.close_paren + 1;
        if (stmt_end < method_source.size() && method_source[stmt_end] == ';')
            ++stmt_end;
        a.statement = method_source.substr(call.name_start,
                                           stmt_end - call.name_start);
        while (!a.statement.empty() &&
               std::isspace(static_cast<unsigned char>(a.statement.back())))
            a.statement.pop_back();
        a.api = entry.api;
        if (static_cast<int>(call.args.size()) == entry.arity_with_message)
            a.message = resolve_message(method_source, call.args[0]);
        out.push_back(std::move(a));
    }
    return out;
}

std::string strip_assertion_messages(const std::string& method_source) {
    auto mask = code_mask(method_source);
    auto calls = find_assertion_calls(method_source, mask);
    std::string out;
    size_t copied = 0;
    for (const auto& call : calls) {
        const auto& entry = signature_table().at(call.name);
        if (static_cast<int>(call.args.size()) != entry.arity_with_message)
            continue;
        if (entry.arity_with_message > 1 && call.arg_spans.size() < 2)
            throw ExtractError("RewriteFailed(" + call.name + ")");
        // drop [first-arg-start, second-arg-start) keeping the '(';
        // single-argument calls (fail) lose their whole argument list
        size_t cut_start = call.open_paren + 1;
        size_t cut_end = (entry.arity_with_message == 1)
                             ? call.close_paren
                             : skip_ws(method_source, call.arg_spans[1].first);
        out.append(method_source, copied, cut_start - copied);
        copied = cut_end;
    }
    out.append(method_source, copied, method_source.size() - copied);
    return out;
}

namespace {

struct ProductionMethod {
    std::string name;
    MethodUnderTest mut;
};

std::string class_name_of(const std::string& t, const std::vector<bool>& mask) {
    size_t pos = 0;
    while ((pos = t.find("class ", pos)) != std::string::npos) {
        if (mask[pos] && (pos == 0 || !ident_char(t[pos - 1]))) {
            size_t s = skip_ws(t, pos + 6);
            size_t e = s;
            while (e < t.size() && ident_char(t[e])) ++e;
            if (e > s) return t.substr(s, e - s);
        }
        pos += 6;
    }
    return "";
}

std::vector<ProductionMethod> parse_production_methods(const SourceFile& file) {
    const std::string& t = file.text;
    auto mask = code_mask(t);
    std::string cls = class_name_of(t, mask);
    std::vector<ProductionMethod> out;

    for (size_t i = 0; i < t.size(); ++i) {
        if (!(mask[i] && t[i] == '(')) continue;
        // identifier before '('
        size_t e = i;
        while (e > 0 && std::isspace(static_cast<unsigned char>(t[e - 1]))) --e;
        size_t s = e;
        while (s > 0 && ident_char(t[s - 1])) --s;
        if (s == e) continue;
        std::string name = t.substr(s, e - s);
        if (kJavaKeywords.contains(name)) continue;
        if (name == cls) continue;  // constructors are not MUT candidates
        // not a call: no '.' directly before, and a '{' follows the params
        size_t before = s;
        while (before > 0 &&
               std::isspace(static_cast<unsigned char>(t[before - 1])))
            --before;
        if (before > 0 && (t[before - 1] == '.' || t[before - 1] == '@'))
            continue;
        size_t after = match_balanced(t, mask, i, '(', ')');
        if (after == std::string::npos) continue;
        size_t p = skip_ws(t, after);
        if (p + 6 < t.size() && t.compare(p, 6, "throws") == 0) {
            p += 6;
            while (p < t.size() && t[p] != '{' && t[p] != ';') ++p;
        }
        if (p >= t.size() || t[p] != '{' || !mask[p]) continue;
        size_t end = match_balanced(t, mask, p, '{', '}');
        if (end == std::string::npos) continue;

        // body starts at the beginning of the declaration line
        size_t line_start = t.rfind('\n', s);
        line_start = (line_start == std::string::npos) ? 0 : line_start + 1;
        std::string body = t.substr(line_start, end - line_start);
        size_t lead = body.find_first_not_of(" \t");
        if (lead != std::string::npos && lead > 0) body.erase(0, lead);
        auto first_nl = body.find('\n');
        std::string first_line =
            body.substr(0, first_nl == std::string::npos ? body.size()
                                                         : first_nl);
        std::string sig = first_line;
        while (!sig.empty() && (sig.back() == '{' ||
               std::isspace(static_cast<unsigned char>(sig.back()))))
            sig.pop_back();
        sig = trim(sig);
        // skip block openers mistaken for methods (e.g. static init)
        if (sig.empty()) continue;

        ProductionMethod pm;
        pm.name = name;
        pm.mut.qualified_name = cls.empty() ? name : cls + "." + name;
        pm.mut.signature = sig;
        pm.mut.body = std::move(body);
        out.push_back(std::move(pm));
        i = p;  // continue after the body opener
    }
    return out;
}

std::set<std::string> call_site_names(const std::string& t) {
    auto mask = code_mask(t);
    std::set<std::string> names;
    size_t i = 0;
    while (i < t.size()) {
        if (!mask[i] || !ident_char(t[i]) ||
            std::isdigit(static_cast<unsigned char>(t[i]))) {
            ++i;
            continue;
        }
        size_t s = i;
        while (i < t.size() && mask[i] && ident_char(t[i])) ++i;
        size_t p = skip_ws(t, i);
        if (p < t.size() && t[p] == '(' && mask[p]) {
            std::string name = t.substr(s, i - s);
            if (!kJavaKeywords.contains(name)) names.insert(name);
        }
    }
    return names;
}

}  // namespace

std::vector<MethodUnderTest> resolve_mut(const corpus::TestCase& test,
                                         const SourceFile& production) {
    auto methods = parse_production_methods(production);
    if (methods.empty())
        throw ExtractError("ProductionParseFailed: " + production.path);
    auto invoked = call_site_names(test.test_source);
    std::vector<MethodUnderTest> out;
    std::set<std::string> seen_signatures;
    for (const auto& pm : methods) {
        if (invoked.contains(pm.name) &&
            seen_signatures.insert(pm.mut.signature).second)
            out.push_back(pm.mut);
    }
    return out;
}

namespace {

std::string base_name_no_ext(const std::string& path) {
    return fs::path(path).stem().string();
}

std::string strip_test_affix(const std::string& base) {
    if (base.ends_with("Tests")) return base.substr(0, base.size() - 5);
    if (base.ends_with("Test")) return base.substr(0, base.size() - 4);
    if (base.starts_with("Test") && base.size() > 4) return base.substr(4);
    return "";
}

int shared_dir_prefix(const std::string& a, const std::string& b) {
    fs::path pa = fs::path(a).parent_path();
    fs::path pb = fs::path(b).parent_path();
    auto ia = pa.begin(), ib = pb.begin();
    int shared = 0;
    while (ia != pa.end() && ib != pb.end() && *ia == *ib) {
        ++shared;
        ++ia;
        ++ib;
    }
    return shared;
}

}  // namespace

std::optional<std::string> map_test_to_production(
    const std::string& test_path,
    const std::vector<std::string>& candidate_paths) {
    std::string target = strip_test_affix(base_name_no_ext(test_path));
    if (target.empty()) return std::nullopt;
    std::optional<std::string> best;
    int best_shared = -1;
    for (const auto& cand : candidate_paths) {
        if (base_name_no_ext(cand) != target) continue;
        int shared = shared_dir_prefix(test_path, cand);
        if (shared > best_shared ||
            (shared == best_shared && best && cand < *best)) {
            best = cand;
            best_shared = shared;
        }
    }
    return best;
}

corpus::Corpus extract_corpus(
    const std::string& src_dir,
    const std::vector<std::pair<std::string, std::string>>&
        mapping_overrides) {
    std::vector<SourceFile> tests, productions;
    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(src_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".java")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());

    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        SourceFile sf{p.string(), std::move(text), SourceKind::Unknown};
        if (detect_test_file(sf)) {
            sf.kind = SourceKind::Test;
            tests.push_back(std::move(sf));
        } else {
            sf.kind = SourceKind::Production;
            productions.push_back(std::move(sf));
        }
    }

    std::vector<std::string> candidates;
    for (const auto& p : productions) candidates.push_back(p.path);
    std::map<std::string, std::string> overrides(mapping_overrides.begin(),
                                                 mapping_overrides.end());

    corpus::Corpus result;
    result.meta.source_name = src_dir;
    result.meta.tool_version = "testsum 0.1.0";

    for (const auto& tf : tests) {
        std::string cls = base_name_no_ext(tf.path);
        std::optional<std::string> prod_path;
        if (auto it = overrides.find(tf.path); it != overrides.end())
            prod_path = it->second;
        else
            prod_path = map_test_to_production(tf.path, candidates);

        const SourceFile* prod = nullptr;
        if (prod_path) {
            for (const auto& p : productions)
                if (p.path == *prod_path) prod = &p;
        }

        for (const auto& m : extract_test_methods(tf)) {
            corpus::TestCase tc;
            tc.id = cls + "." + m.name;
            tc.project = fs::path(src_dir).filename().string();
            tc.test_file_path = tf.path;
            tc.test_class_name = cls;
            tc.test_method_name = m.name;
            tc.test_source = m.source;
            tc.comment_raw = m.leading_comment;
            tc.comment_norm = corpus::normalize_comment(m.leading_comment);
            tc.assertions = extract_assertions(m.source);
            tc.filter_status = corpus::filter_comment(tc.comment_norm);
            if (prod) {
                try {
                    tc.muts = resolve_mut(tc, *prod);
                } catch (const ExtractError&) {
                    // unmappable production file leaves muts empty
                }
            }
            result.entries.push_back(std::move(tc));
        }
    }
    return result;
}

}  // namespace testsum::extractor
