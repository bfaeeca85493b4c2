#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "testsum/corpus.hpp"

namespace testsum::promptkit {

struct PromptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Variant {
    TestOnly,
    WithAssertMsg,
    WithoutAssertMsg,
    WithSemantics,
    WithMsgAndSemantics,
    WithMut,
    WithMsgMutSemantics,
};

/// All seven variants in their canonical ablation order.
const std::vector<Variant>& all_variants();

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

/// Human-readable row label as used in result tables.
std::string variant_label(Variant v);

enum class Block { Code, Assertions, Muts };

struct PromptBundle {
    std::string case_id;
    Variant variant;
    std::string text;
    std::set<Block> included_blocks;
};

/// Assembles the role-based summary prompt for one (case, variant) pair.
PromptBundle build_summary_prompt(const corpus::TestCase& test_case,
                                  Variant variant);

/// Prompt asking for the one-sentence meaning of a single assertion.
std::string build_semantics_prompt(const corpus::Assertion& assertion);

/// Six-criterion 1-5 rubric prompt for judging one comment against code.
std::string build_judge_prompt(const std::string& code,
                               const std::string& comment);

/// Extracts the first `Score: X` line; throws when absent or out of [1,5].
double parse_judge_reply(const std::string& reply);

}  // namespace testsum::promptkit
