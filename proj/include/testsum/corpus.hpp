#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsum::corpus {

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AssertApi {
    AssertEquals,
    AssertTrue,
    AssertFalse,
    AssertNull,
    AssertNotNull,
    AssertThat,
    AssertSame,
    AssertNotSame,
    AssertArrayEquals,
    Fail,
    Other,
};

std::string to_string(AssertApi api);
AssertApi assert_api_from_string(const std::string& s);

struct Assertion {
    std::string statement;  // full call text, no trailing whitespace
    AssertApi api = AssertApi::Other;
    std::optional<std::string> message;
    std::optional<std::string> semantic;

    bool operator==(const Assertion&) const = default;
};

struct MethodUnderTest {
    std::string qualified_name;
    std::string signature;
    std::string body;

    bool operator==(const MethodUnderTest&) const = default;
};

enum class RejectReason {
    Empty,
    NonEnglish,
    TooShort,
    Placeholder,
    LinkOnly,
};

std::string to_string(RejectReason r);
RejectReason reject_reason_from_string(const std::string& s);

struct FilterStatus {
    bool kept = true;
    std::optional<RejectReason> reason;

    static FilterStatus keep() { return {true, std::nullopt}; }
    static FilterStatus reject(RejectReason r) { return {false, r}; }
    bool operator==(const FilterStatus&) const = default;
};

struct TestCase {
    std::string id;
    std::string project;
    std::string test_file_path;
    std::string test_class_name;
    std::string test_method_name;
    std::string test_source;
    std::string comment_raw;
    std::string comment_norm;
    std::vector<Assertion> assertions;
    std::vector<MethodUnderTest> muts;
    FilterStatus filter_status;

    bool operator==(const TestCase&) const = default;
};

struct CorpusMeta {
    std::string source_name;
    std::string created_at;
    std::string tool_version;

    bool operator==(const CorpusMeta&) const = default;
};

struct Corpus {
    std::vector<TestCase> entries;
    CorpusMeta meta;

    bool operator==(const Corpus&) const = default;
};

/// Strips comment markers and the leading `*` gutter, collapses whitespace.
std::string normalize_comment(const std::string& raw);

/// Number of maximal non-whitespace runs.
int word_count(const std::string& text);

/// True iff at least 90% of alphabetic characters are basic Latin.
bool is_english(const std::string& text, double latin_threshold = 0.9);

/// Classifies a normalized comment; the first matching rejection wins
/// (Empty, NonEnglish, Placeholder, LinkOnly, TooShort).
FilterStatus filter_comment(const std::string& text);

/// One JSON object per line, fields as declared on TestCase.
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace testsum::corpus
