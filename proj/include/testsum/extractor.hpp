#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "testsum/corpus.hpp"

namespace testsum::extractor {

struct ExtractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SourceKind { Test, Production, Unknown };

struct SourceFile {
    std::string path;
    std::string text;
    SourceKind kind = SourceKind::Unknown;
};

struct ExtractedMethod {
    std::string name;
    std::string source;       // annotation through closing brace
    std::string leading_comment;  // raw comment block above, or ""
};

/// True iff an @Test annotation occurs outside comments and string literals.
bool detect_test_file(const SourceFile& file);

/// One entry per @Test-annotated method, in source order.
std::vector<ExtractedMethod> extract_test_methods(const SourceFile& file);

/// Finds JUnit4/Hamcrest assertion calls and resolves their messages.
std::vector<corpus::Assertion> extract_assertions(
    const std::string& method_source);

/// Rewrites assertion calls to drop the message argument; other text intact.
std::string strip_assertion_messages(const std::string& method_source);

/// Production methods invoked by name from the test body, in source order.
std::vector<corpus::MethodUnderTest> resolve_mut(
    const corpus::TestCase& test, const SourceFile& production);

/// Picks the production file matching the test base name (Test/Tests
/// suffix or Test prefix stripped); ties by shared directory prefix.
std::optional<std::string> map_test_to_production(
    const std::string& test_path,
    const std::vector<std::string>& candidate_paths);

/// Walks a directory tree, extracting a corpus from every test file.
/// mapping_overrides: test_path -> production_path pairs.
corpus::Corpus extract_corpus(
    const std::string& src_dir,
    const std::vector<std::pair<std::string, std::string>>& mapping_overrides =
        {});

}  // namespace testsum::extractor
