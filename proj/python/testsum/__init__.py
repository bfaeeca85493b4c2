"""Test summarization toolkit: extraction, prompt variants, metrics."""

from _testsum import (  # noqa: F401
    bleu4,
    build_judge_prompt,
    extract_assertions,
    extract_corpus,
    filter_comment,
    is_english,
    meteor,
    normalize_comment,
    parse_judge_reply,
    render_report,
    rouge_l,
    run,
    strip_assertion_messages,
    tokenize,
    variants,
    word_count,
)

__all__ = [
    "bleu4",
    "build_judge_prompt",
    "extract_assertions",
    "extract_corpus",
    "filter_comment",
    "is_english",
    "meteor",
    "normalize_comment",
    "parse_judge_reply",
    "render_report",
    "rouge_l",
    "run",
    "strip_assertion_messages",
    "tokenize",
    "variants",
    "word_count",
]
