"""Smoke tests for the python bindings; runs without pytest."""

import math

import testsum


def test_normalize_and_filter():
    raw = "/* Test that the principal ID assigned to a principal is\n * correctly stored */"
    norm = testsum.normalize_comment(raw)
    assert norm.startswith("Test that the principal ID")
    assert "*" not in norm
    assert testsum.word_count(norm) == 12
    assert testsum.filter_comment(norm) == "kept"
    assert testsum.filter_comment("TODO") == "rejected:Placeholder"
    assert testsum.filter_comment("") == "rejected:Empty"
    assert testsum.is_english(norm)


def test_metrics():
    cand = testsum.tokenize("Checks that the result is correct.")
    assert cand == ["checks", "that", "the", "result", "is", "correct"]
    assert math.isclose(testsum.bleu4(cand, cand), 100.0)
    assert math.isclose(testsum.rouge_l(cand, cand), 100.0)
    assert testsum.meteor(cand, ["unrelated"]) == 0.0


def test_assertions():
    method = 'void t() { assertEquals("bad sum", 4, add(2, 2)); }'
    found = testsum.extract_assertions(method)
    assert len(found) == 1
    assert found[0]["api"] == "assert_equals"
    assert found[0]["message"] == "bad sum"
    stripped = testsum.strip_assertion_messages(method)
    assert '"bad sum"' not in stripped
    assert "assertEquals(4, add(2, 2));" in stripped


def test_prompts_and_judge():
    assert len(testsum.variants()) == 7
    prompt = testsum.build_judge_prompt("void t() {}", "Checks something.")
    assert "rate the comment on a scale from 1 to 5" in prompt
    assert math.isclose(testsum.parse_judge_reply("Score: 4.5"), 4.5)


def main():
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok {name}")


if __name__ == "__main__":
    main()
