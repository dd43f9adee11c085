"""Corpus BLEU with standardized "13a" tokenization and exponential smoothing.

The tokenizer reproduces the classic mteval-13a rules: entity unescaping and
newline handling, padding of ASCII punctuation with spaces (periods and commas
stay attached to adjacent digits, dashes split only after a digit), then
whitespace splitting. Non-ASCII text (e.g. Korean) passes through untouched
apart from the whitespace split.

The score is corpus-level, single-reference: clipped n-gram precision for
orders 1-4 aggregated over the whole corpus, geometric mean with exponential
smoothing of zero counts (each zero order contributes 1 / (2^k * total)), and
a multiplicative brevity penalty exp(1 - r/c) when the hypothesis corpus is
shorter than the reference corpus. Scores live in [0, 100].

A corpus whose hypotheses contain no n-gram of some order (every hypothesis
shorter than 4 tokens) scores 0, matching the reference tool's corpus-level
behavior: the geometric mean has no mass at that order.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from typing import Callable, Sequence

MAX_NGRAM_ORDER = 4

_PUNCT_RE = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_PERIOD_COMMA_PRE_RE = re.compile(r"([^0-9])([\.,])")
_PERIOD_COMMA_POST_RE = re.compile(r"([\.,])([^0-9])")
_DIGIT_DASH_RE = re.compile(r"([0-9])(-)")


def tokenize_13a(text: str) -> list[str]:
    """Apply the 13a normalization rules and split on whitespace."""
    text = text.replace("<skipped>", "")
    text = text.replace("-\n", "")
    text = text.replace("\n", " ")
    if "&" in text:
        text = text.replace("&quot;", '"')
        text = text.replace("&amp;", "&")
        text = text.replace("&lt;", "<")
        text = text.replace("&gt;", ">")
    text = f" {text} "
    text = _PUNCT_RE.sub(r" \1 ", text)
    text = _PERIOD_COMMA_PRE_RE.sub(r"\1 \2 ", text)
    text = _PERIOD_COMMA_POST_RE.sub(r" \1 \2", text)
    text = _DIGIT_DASH_RE.sub(r"\1 \2 ", text)
    return text.split()


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1))


def corpus_bleu(
    hypotheses: Sequence[str],
    references: Sequence[str],
    tokenize: Callable[[str], list[str]] = tokenize_13a,
) -> float:
    """Corpus-level BLEU of single-reference pairs, in [0, 100]."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"length mismatch: {len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not hypotheses:
        raise ValueError("empty corpus")

    correct = [0] * MAX_NGRAM_ORDER
    total = [0] * MAX_NGRAM_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_tokens = tokenize(hyp)
        ref_tokens = tokenize(ref)
        hyp_len += len(hyp_tokens)
        ref_len += len(ref_tokens)
        for n in range(1, MAX_NGRAM_ORDER + 1):
            hyp_counts = _ngram_counts(hyp_tokens, n)
            if not hyp_counts:
                continue
            ref_counts = _ngram_counts(ref_tokens, n)
            total[n - 1] += sum(hyp_counts.values())
            correct[n - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in hyp_counts.items()
            )

    # Geometric mean over orders; zero counts get exponentially decaying mass.
    smooth = 1.0
    log_sum = 0.0
    for n in range(1, MAX_NGRAM_ORDER + 1):
        if total[n - 1] == 0:
            return 0.0
        if correct[n - 1] == 0:
            smooth *= 2.0
            precision = 1.0 / (smooth * total[n - 1])
        else:
            precision = correct[n - 1] / total[n - 1]
        log_sum += math.log(precision)

    if hyp_len == 0:
        return 0.0
    brevity = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * brevity * math.exp(log_sum / MAX_NGRAM_ORDER)
