#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixture_cases.hpp"
#include "testsum/corpus.hpp"

using namespace testsum::corpus;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("testsum_corpus_" + name);
}

}  // namespace

TEST_CASE("normalize_comment strips block markers and gutters") {
    std::string raw =
        "/* Test that the principal ID assigned to a principal is correctly "
        "stored and \n   returned using the Java Principal API */";
    CHECK(normalize_comment(raw) ==
          "Test that the principal ID assigned to a principal is correctly "
          "stored and returned using the Java Principal API");
}

TEST_CASE("normalize_comment handles empty and line comments") {
    CHECK(normalize_comment("") == "");
    CHECK(normalize_comment("//   hello   world  again   now") ==
          "hello world again now");
    CHECK(normalize_comment("/**\n * Checks the result.\n */") ==
          "Checks the result.");
    CHECK(normalize_comment("// first line\n// second line") ==
          "first line second line");
}

TEST_CASE("normalize_comment is idempotent") {
    std::mt19937 rng(7);
    const std::vector<std::string> words = {"checks", "the",    "value",
                                            "of",     "result", "state"};
    const std::vector<std::string> wrappers = {"/* % */", "// %", "/** % */",
                                               "%"};
    for (int i = 0; i < 200; ++i) {
        std::string body;
        int n = 1 + static_cast<int>(rng() % 8);
        for (int k = 0; k < n; ++k) {
            body += words[rng() % words.size()];
            body += (rng() % 4 == 0) ? "\n  " : "   ";
        }
        std::string wrapper = wrappers[rng() % wrappers.size()];
        std::string raw = wrapper;
        raw.replace(raw.find('%'), 1, body);
        auto once = normalize_comment(raw);
        CHECK(normalize_comment(once) == once);
    }
}

TEST_CASE("word_count counts maximal non-whitespace runs") {
    CHECK(word_count("fix this later") == 3);
    CHECK(word_count("") == 0);
    CHECK(word_count("  a\t b \n c  ") == 3);
    // normalized UserPrincipal fixture comment has 19 words
    std::string norm =
        "Test that the principal ID assigned to a principal is correctly "
        "stored and returned using the Java Principal API";
    CHECK(word_count(norm) == 19);
}

TEST_CASE("is_english character-class heuristic") {
    CHECK(is_english("Checks the user age"));
    CHECK_FALSE(is_english("проверяет возраст пользователя"));
    CHECK(is_english("Prüft Grenzfälle beim Parser"));  // 23/25
    CHECK_FALSE(is_english("1234 ..."));  // no alphabetic characters
}

TEST_CASE("filter_comment classifies each rejection rule") {
    CHECK(filter_comment("TODO") ==
          FilterStatus::reject(RejectReason::Placeholder));
    CHECK(filter_comment("see https://github.com/example/issue/42") ==
          FilterStatus::reject(RejectReason::LinkOnly));
    CHECK(filter_comment("Test that the principal ID assigned to a principal "
                         "is correctly stored and returned using the Java "
                         "Principal API") == FilterStatus::keep());
    CHECK(filter_comment("fix this later") ==
          FilterStatus::reject(RejectReason::TooShort));
    CHECK(filter_comment("") == FilterStatus::reject(RejectReason::Empty));
    CHECK(filter_comment("проверяет возраст пользователя здесь") ==
          FilterStatus::reject(RejectReason::NonEnglish));
    CHECK(filter_comment("TODO: fix the rounding") ==
          FilterStatus::reject(RejectReason::Placeholder));
    CHECK(filter_comment("<a href=\"x\">see</a> www.example.com docs") ==
          FilterStatus::reject(RejectReason::LinkOnly));
}

TEST_CASE("filter_comment is idempotent in classification") {
    const std::vector<std::string> samples = {
        "", "TODO", "fix this later", "Checks that the result is stored",
        "see https://github.com/x"};
    for (const auto& s : samples) CHECK(filter_comment(s) == filter_comment(s));
}

TEST_CASE("kept comments satisfy the filter invariants") {
    const std::vector<std::string> samples = {
        "Checks that the sum is computed correctly",
        "TODO document this behaviour fully before the next release cycle",
        "Verifies https://example.org/spec section four paragraphs in detail",
        "deprecated", "ok", ""};
    for (const auto& s : samples) {
        auto status = filter_comment(s);
        if (status.kept) {
            CHECK(word_count(s) >= 4);
            CHECK(is_english(s));
        }
    }
}

TEST_CASE("corpus round-trip is the identity") {
    Corpus c;
    c.meta = {"fixtures", "2026-01-01T00:00:00Z", "testsum 0.1.0"};
    c.entries = testsum::testfix::golden_cases();
    c.entries[1].filter_status = FilterStatus::reject(RejectReason::TooShort);

    auto path = temp_file("roundtrip.l");
    save_corpus(c, path.string());
    auto loaded = load_corpus(path.string());
    CHECK(loaded == c);
    fs::remove(path);
}

TEST_CASE("duplicate ids are rejected with the line number") {
    Corpus c;
    c.entries = {testsum::testfix::principal_case(),
                 testsum::testfix::principal_case()};
    auto path = temp_file("dup.l");
    save_corpus(c, path.string());
    CHECK_THROWS_WITH_AS(load_corpus(path.string()),
                         doctest::Contains("duplicate id"), CorpusError);
    fs::remove(path);
}

TEST_CASE("malformed and unknown-field records name the line") {
    auto path = temp_file("bad.l");
    {
        std::ofstream out(path);
        out << "{not json\n";
    }
    CHECK_THROWS_WITH_AS(load_corpus(path.string()),
                         doctest::Contains("line 1"), CorpusError);
    {
        std::ofstream out(path);
        Corpus c;
        c.entries = {testsum::testfix::principal_case()};
        save_corpus(c, path.string());
        std::ofstream app(path, std::ios::app);
        app << R"({"id":"x","bogus":1})" << "\n";
    }
    CHECK_THROWS_WITH_AS(load_corpus(path.string()),
                         doctest::Contains("unknown field"), CorpusError);
    fs::remove(path);
}

TEST_CASE("empty file loads as an empty corpus") {
    auto path = temp_file("empty.l");
    std::ofstream(path).close();
    auto loaded = load_corpus(path.string());
    CHECK(loaded.entries.empty());
    fs::remove(path);
}
