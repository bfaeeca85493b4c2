#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "testsum/extractor.hpp"

using namespace testsum;
using namespace testsum::extractor;
namespace fs = std::filesystem;

#ifndef TESTSUM_FIXTURE_DIR
#define TESTSUM_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

SourceFile load_fixture(const std::string& rel) {
    fs::path p = fs::path(TESTSUM_FIXTURE_DIR) / rel;
    return {p.string(), slurp(p), SourceKind::Unknown};
}

}  // namespace

TEST_CASE("detect_test_file finds @Test outside strings and comments") {
    CHECK(detect_test_file(
        {"T.java", "class T { @Test\nvoid principalIdTest() {} }"}));
    CHECK_FALSE(detect_test_file(
        {"T.java", "class T { String s = \"@Test\"; }"}));
    CHECK_FALSE(detect_test_file(
        {"T.java", "class T { // @Test\n /* @Test */ int x; }"}));
    CHECK_FALSE(detect_test_file({"P.java", "class P { void run() {} }"}));
    // @Testable must not count as @Test
    CHECK_FALSE(detect_test_file({"T.java", "@Testable class T {}"}));
}

TEST_CASE("extract_test_methods on the UserPrincipal fixture") {
    auto file = load_fixture(
        "src/test/com/example/security/UserPrincipalTest.java");
    auto methods = extract_test_methods(file);
    REQUIRE(methods.size() == 1);
    CHECK(methods[0].name == "principalIdTest");
    CHECK(methods[0].leading_comment.starts_with(
        "/* Test that the principal ID"));
    CHECK(methods[0].source.starts_with("@Test"));
    CHECK(methods[0].source.ends_with("}"));
    // contiguous substring of the file
    CHECK(file.text.find(methods[0].source) != std::string::npos);
}

TEST_CASE("extract_test_methods preserves source order") {
    auto file =
        load_fixture("src/test/com/example/math/CalculatorTest.java");
    auto methods = extract_test_methods(file);
    REQUIRE(methods.size() == 4);
    CHECK(methods[0].name == "additionTest");
    CHECK(methods[1].name == "subtractionWorks");
    CHECK(methods[2].name == "multiplicationTest");
    CHECK(methods[3].name == "divisionByZero");
    CHECK(methods[1].leading_comment.empty());
    CHECK(methods[2].leading_comment == "/* TODO */");
    CHECK(methods[3].leading_comment.starts_with("// Checks"));
    for (const auto& m : methods)
        CHECK(file.text.find(m.source) != std::string::npos);
}

TEST_CASE("brace balancing ignores braces inside string literals") {
    auto file =
        load_fixture("src/test/com/example/store/ListHolderTest.java");
    auto methods = extract_test_methods(file);
    REQUIRE(methods.size() == 4);
    CHECK(methods[0].name == "braceLiteralSurvivesRendering");
    CHECK(methods[0].source.find("\"{ \\\"}\\\" }\"") != std::string::npos);
    CHECK(methods[0].source.ends_with("}"));
    // the extracted method must contain its own assertion
    CHECK(methods[0].source.find("assertEquals") != std::string::npos);
}

TEST_CASE("unbalanced method bodies raise an error") {
    SourceFile bad{"Bad.java",
                   "class Bad { @Test void broken() { if (x) { }"};
    CHECK_THROWS_WITH_AS(extract_test_methods(bad),
                         doctest::Contains("UnbalancedBraces"), ExtractError);
}

TEST_CASE("extract_assertions resolves messages per the signature table") {
    std::string method =
        "@Test\npublic void principalIdTest() {\n"
        "    final String USER_ID = \"someId\";\n"
        "    String error = \"Principal ID does not match expected value\";\n"
        "    assertThat(error, principal.getName(), is(equalTo(USER_ID)));\n"
        "}";
    auto assertions = extract_assertions(method);
    REQUIRE(assertions.size() == 1);
    CHECK(assertions[0].api == corpus::AssertApi::AssertThat);
    CHECK(assertions[0].message == "Principal ID does not match expected value");
    CHECK(assertions[0].statement ==
          "assertThat(error, principal.getName(), is(equalTo(USER_ID)));");
    CHECK(method.find(assertions[0].statement) != std::string::npos);
}

TEST_CASE("assertions without message arity carry no message") {
    auto assertions =
        extract_assertions("void t() { assertTrue(list.isEmpty()); }");
    REQUIRE(assertions.size() == 1);
    CHECK(assertions[0].api == corpus::AssertApi::AssertTrue);
    CHECK_FALSE(assertions[0].message.has_value());
}

TEST_CASE("string-literal messages are used verbatim") {
    auto assertions = extract_assertions(
        "void t() { assertThat(\"Invalid age\", user.getAge(), "
        "is(equalTo(18))); }");
    REQUIRE(assertions.size() == 1);
    CHECK(assertions[0].message == "Invalid age");
}

TEST_CASE("unresolvable message identifiers fall back to expression text") {
    auto assertions = extract_assertions(
        "void t() { assertEquals(ERR_CONSTANT, 4, add(2, 2)); }");
    REQUIRE(assertions.size() == 1);
    CHECK(assertions[0].message == "ERR_CONSTANT");
}

TEST_CASE("fail() with zero arguments has no message") {
    auto assertions = extract_assertions("void t() { fail(); }");
    REQUIRE(assertions.size() == 1);
    CHECK(assertions[0].api == corpus::AssertApi::Fail);
    CHECK_FALSE(assertions[0].message.has_value());
}

TEST_CASE("strip_assertion_messages removes only the message argument") {
    CHECK(strip_assertion_messages(
              "assertThat(error, principal.getName(), is(equalTo(USER_ID)));") ==
          "assertThat(principal.getName(), is(equalTo(USER_ID)));");
    CHECK(strip_assertion_messages("assertTrue(list.isEmpty());") ==
          "assertTrue(list.isEmpty());");
    CHECK(strip_assertion_messages("assertEquals(\"bad sum\", 4, add(2,2));") ==
          "assertEquals(4, add(2,2));");
}

TEST_CASE("stripping then extracting yields the same count, no messages") {
    std::string method =
        "void t() {\n"
        "    assertEquals(\"bad sum\", 4, add(2, 2));\n"
        "    assertTrue(\"must hold\", x > 0);\n"
        "    assertNotNull(value);\n"
        "}";
    auto before = extract_assertions(method);
    auto stripped = strip_assertion_messages(method);
    auto after = extract_assertions(stripped);
    REQUIRE(after.size() == before.size());
    for (const auto& a : after) CHECK_FALSE(a.message.has_value());
}

TEST_CASE("resolve_mut matches invoked production methods in order") {
    auto production =
        load_fixture("src/main/com/example/security/UserPrincipal.java");
    corpus::TestCase tc;
    tc.test_source =
        "@Test void principalIdTest() {\n"
        "    Principal principal = new UserPrincipal(USER_ID);\n"
        "    assertThat(error, principal.getName(), is(equalTo(USER_ID)));\n"
        "}";
    auto muts = resolve_mut(tc, production);
    REQUIRE(muts.size() == 1);
    CHECK(muts[0].qualified_name == "UserPrincipal.getName");
    CHECK(muts[0].body.find("return name;") != std::string::npos);
    CHECK(muts[0].body.find(muts[0].signature) == 0);
}

TEST_CASE("resolve_mut returns empty when nothing is invoked") {
    auto production =
        load_fixture("src/main/com/example/math/Calculator.java");
    corpus::TestCase tc;
    tc.test_source = "@Test void t() { int x = 1; }";
    CHECK(resolve_mut(tc, production).empty());
}

TEST_CASE("resolve_mut deduplicates repeated invocations") {
    auto production =
        load_fixture("src/main/com/example/math/Calculator.java");
    corpus::TestCase tc;
    tc.test_source =
        "@Test void t() { assertEquals(4, c.add(2, 2)); "
        "assertEquals(5, c.add(2, 3)); }";
    auto muts = resolve_mut(tc, production);
    REQUIRE(muts.size() == 1);
    CHECK(muts[0].qualified_name == "Calculator.add");
}

TEST_CASE("resolve_mut output is a subset of declared production methods") {
    auto production =
        load_fixture("src/main/com/example/store/ListHolder.java");
    corpus::TestCase tc;
    tc.test_source =
        "@Test void t() { holder.addItem(\"x\"); holder.clear(); "
        "assertTrue(holder.getItems().isEmpty()); }";
    auto muts = resolve_mut(tc, production);
    for (const auto& m : muts)
        CHECK(production.text.find(m.body) != std::string::npos);
}

TEST_CASE("production files without methods raise ProductionParseFailed") {
    SourceFile empty{"E.java", "public interface E { }"};
    corpus::TestCase tc;
    tc.test_source = "@Test void t() {}";
    CHECK_THROWS_WITH_AS(resolve_mut(tc, empty),
                         doctest::Contains("ProductionParseFailed"),
                         ExtractError);
}

TEST_CASE("map_test_to_production strips suffixes and prefixes") {
    CHECK(map_test_to_production("src/test/UserPrincipalTest.java",
                                 {"src/main/UserPrincipal.java"}) ==
          "src/main/UserPrincipal.java");
    CHECK(map_test_to_production("TestParser.java", {"Parser.java"}) ==
          "Parser.java");
    CHECK(map_test_to_production("FooTests.java", {"Foo.java"}) == "Foo.java");
    CHECK_FALSE(
        map_test_to_production("Unrelated.java", {"Foo.java"}).has_value());
}

TEST_CASE("map_test_to_production breaks ties by shared directory prefix") {
    CHECK(map_test_to_production("a/FooTest.java",
                                 {"a/Foo.java", "a/b/Foo.java"}) ==
          "a/Foo.java");
    CHECK(map_test_to_production("a/b/FooTest.java",
                                 {"a/Foo.java", "a/b/Foo.java"}) ==
          "a/b/Foo.java");
}

TEST_CASE("extract_corpus walks the fixture tree") {
    auto corpus = testsum::extractor::extract_corpus(TESTSUM_FIXTURE_DIR
                                                     "/src");
    CHECK(corpus.entries.size() == 12);

    const corpus::TestCase* principal = nullptr;
    for (const auto& tc : corpus.entries)
        if (tc.test_method_name == "principalIdTest") principal = &tc;
    REQUIRE(principal != nullptr);
    CHECK(principal->comment_norm.starts_with("Test that the principal ID"));
    REQUIRE(principal->assertions.size() == 1);
    CHECK(principal->assertions[0].message ==
          "Principal ID does not match expected value");
    REQUIRE(principal->muts.size() == 1);
    CHECK(principal->muts[0].qualified_name == "UserPrincipal.getName");

    // every extracted assertion occurs verbatim in its test source
    for (const auto& tc : corpus.entries)
        for (const auto& a : tc.assertions)
            CHECK(tc.test_source.find(a.statement) != std::string::npos);
}
