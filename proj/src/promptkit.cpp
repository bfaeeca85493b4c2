#include "testsum/promptkit.hpp"

#include <regex>
#include <sstream>

#include "testsum/extractor.hpp"

namespace testsum::promptkit {

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> order = {
        Variant::TestOnly,          Variant::WithAssertMsg,
        Variant::WithoutAssertMsg,  Variant::WithSemantics,
        Variant::WithMsgAndSemantics, Variant::WithMut,
        Variant::WithMsgMutSemantics,
    };
    return order;
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::TestOnly: return "test_only";
        case Variant::WithAssertMsg: return "with_assert_msg";
        case Variant::WithoutAssertMsg: return "without_assert_msg";
        case Variant::WithSemantics: return "with_semantics";
        case Variant::WithMsgAndSemantics: return "with_msg_and_semantics";
        case Variant::WithMut: return "with_mut";
        case Variant::WithMsgMutSemantics: return "with_msg_mut_semantics";
    }
    return "test_only";
}

Variant variant_from_string(const std::string& s) {
    for (Variant v : all_variants())
        if (to_string(v) == s) return v;
    throw PromptError("unknown variant: " + s);
}

std::string variant_label(Variant v) {
    switch (v) {
        case Variant::TestOnly: return "Test method only";
        case Variant::WithAssertMsg: return "Test method with assert msg";
        case Variant::WithoutAssertMsg:
            return "Test method without assert msg";
        case Variant::WithSemantics: return "Test method with semantics";
        case Variant::WithMsgAndSemantics:
            return "Test method with assert msg, semantics";
        case Variant::WithMut: return "Test method with mut";
        case Variant::WithMsgMutSemantics:
            return "Test method with assert msg, mut, semantics";
    }
    return "Test method only";
}

namespace {

constexpr const char* kRoleSentence =
    "Role: You are a senior Java test engineer focused on summarizing "
    "unit-test behavior and expected outcomes.";

constexpr const char* kInstructionSentence =
    "Instruction:\n"
    "Your task is to analyze the provided test code and generate a short "
    "summary comment.";

constexpr const char* kConnectiveSentence =
    "Please find more information about assertions in "
    "[ASSERTIONS][/ASSERTIONS] and methods under test in [MUTS][/MUTS]";

constexpr const char* kClosingSentences =
    "Please generate a short summary comment in one sentence for the test "
    "code.\n"
    "Please do not use more than 20 words.";

bool wants_assertions(Variant v) {
    return v == Variant::WithAssertMsg || v == Variant::WithSemantics ||
           v == Variant::WithMsgAndSemantics ||
           v == Variant::WithMsgMutSemantics;
}

bool wants_messages(Variant v) {
    return v == Variant::WithAssertMsg || v == Variant::WithMsgAndSemantics ||
           v == Variant::WithMsgMutSemantics;
}

bool wants_semantics(Variant v) {
    return v == Variant::WithSemantics || v == Variant::WithMsgAndSemantics ||
           v == Variant::WithMsgMutSemantics;
}

bool wants_muts(Variant v) {
    return v == Variant::WithMut || v == Variant::WithMsgMutSemantics;
}

std::string assertion_lines(const corpus::TestCase& tc, Variant v) {
    std::ostringstream out;
    bool first = true;
    for (const auto& a : tc.assertions) {
        if (!first) out << '\n';
        first = false;
        out << a.statement;
        if (wants_messages(v) && a.message) out << "  // message: " << *a.message;
        if (wants_semantics(v)) {
            if (!a.semantic || a.semantic->empty())
                throw PromptError("MissingSemantics(" + tc.id + ")");
            out << "  // meaning: " << *a.semantic;
        }
    }
    return out.str();
}

std::string mut_lines(const corpus::TestCase& tc) {
    if (tc.muts.empty()) return "// no method under test resolved";
    std::ostringstream out;
    bool first = true;
    for (const auto& m : tc.muts) {
        if (!first) out << "\n\n";
        first = false;
        out << m.body;
    }
    return out.str();
}

std::string quote_java(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

// Messages resolved through local String declarations would otherwise
// survive message stripping inside the CODE block; drop those lines.
std::string drop_message_literals(std::string code,
                                  const std::vector<corpus::Assertion>& as) {
    for (const auto& a : as) {
        if (!a.message) continue;
        std::string literal = quote_java(*a.message);
        size_t pos;
        while ((pos = code.find(literal)) != std::string::npos) {
            size_t line_start = code.rfind('\n', pos);
            if (line_start == std::string::npos) line_start = 0;
            size_t line_end = code.find('\n', pos);
            if (line_end == std::string::npos) line_end = code.size();
            code.erase(line_start, line_end - line_start);
        }
    }
    return code;
}

}  // namespace

PromptBundle build_summary_prompt(const corpus::TestCase& test_case,
                                  Variant variant) {
    PromptBundle bundle;
    bundle.case_id = test_case.id;
    bundle.variant = variant;
    bundle.included_blocks.insert(Block::Code);

    std::string code =
        (variant == Variant::WithoutAssertMsg)
            ? drop_message_literals(
                  extractor::strip_assertion_messages(test_case.test_source),
                  test_case.assertions)
            : test_case.test_source;

    std::ostringstream out;
    out << kRoleSentence << "\n\n" << kInstructionSentence << "\n\n";
    out << "[CODE]\n" << code << "\n[/CODE]\n";

    bool has_assertions = wants_assertions(variant);
    bool has_muts = wants_muts(variant);
    if (has_assertions || has_muts) out << '\n' << kConnectiveSentence << '\n';
    if (has_assertions) {
        bundle.included_blocks.insert(Block::Assertions);
        out << "\n[ASSERTIONS]\n"
            << assertion_lines(test_case, variant) << "\n[/ASSERTIONS]\n";
    }
    if (has_muts) {
        bundle.included_blocks.insert(Block::Muts);
        out << "\n[MUTS]\n" << mut_lines(test_case) << "\n[/MUTS]\n";
    }

    out << '\n' << kClosingSentences << "\n\n[SUMMARY]\n[/SUMMARY]\n";
    bundle.text = out.str();
    return bundle;
}

std::string build_semantics_prompt(const corpus::Assertion& assertion) {
    std::ostringstream out;
    out << "You are a senior Java test engineer. Read the following JUnit "
           "assertion statement and describe its intent.\n\n"
        << "Assertion:\n"
        << assertion.statement << "\n\n"
        << "Reply with exactly one sentence, beginning with a verb such as "
           "\"Checks\", that states what the assertion verifies or why it "
           "might fail. Do not add anything else.\n";
    return out.str();
}

std::string build_judge_prompt(const std::string& code,
                               const std::string& comment) {
    std::ostringstream out;
    out << "Here is a piece of Java unit-test code and ONE comment. Please "
           "rate the comment on a scale from 1 to 5, where a higher score "
           "indicates better quality.\n\n"
        << "Consider the following:\n"
        << "1) Accurately states what behavior is verified and under which "
           "conditions.\n"
        << "2) Reflects the expected outcomes expressed by the assertions "
           "(values, state changes, exceptions).\n"
        << "3) Identifies the method, class, feature, or scenario under "
           "test.\n"
        << "4) Mentions edge cases, negative paths, exceptions, or side "
           "effects when applicable (no penalty if not applicable).\n"
        << "5) Is expressed naturally and concisely, without burdening the "
           "developer with reading.\n"
        << "6) Helps the developer understand the code quickly.\n\n"
        << "Return ONE line ONLY in the exact format:\n"
        << "Score: X\n"
        << "(where X is a number from 1 to 5, integer or decimal).\n\n"
        << "Code: " << code << "\n\n"
        << "Comment: " << comment << "\n";
    return out.str();
}

double parse_judge_reply(const std::string& reply) {
    static const std::regex score_line(
        R"(^\s*Score:\s*([0-9]+(?:\.[0-9]+)?)\s*$)");
    std::istringstream in(reply);
    std::string line;
    while (std::getline(in, line)) {
        std::smatch m;
        if (std::regex_match(line, m, score_line)) {
            double v = std::stod(m[1].str());
            if (v < 1.0 || v > 5.0)
                throw PromptError("OutOfRange(" + m[1].str() + ")");
            return v;
        }
    }
    throw PromptError("NoScoreFound");
}

}  // namespace testsum::promptkit
