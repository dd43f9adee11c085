"""Evaluation metrics for tutor runs, plus annotation-agreement statistics.

Covers the full report row (act accuracy, act invariability, corpus BLEU,
greedy embedding-match F1, coherence with the previous utterance, length
stats), rater-agreement quantities (Fleiss's kappa, most-confused act pairs),
and the normalized learning-gain formula.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .acts import ActId
from .bleu import corpus_bleu
from .providers import EmbeddingProvider


@dataclass(frozen=True)
class PredictionRecord:
    """One evaluated scenario; predicted_act is None on act-selection failure."""

    scenario_id: str
    predicted_act: Optional[str]
    generated: str
    gold_act: str
    gold_utterance: str
    prev_utterance: str


@dataclass
class EvalReport:
    accuracy: float
    invariability: float
    corpus_bleu: float
    embed_match_f1: float
    coherence: float
    length_mean: float
    length_std: float
    n: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "invariability": self.invariability,
            "corpus_bleu": self.corpus_bleu,
            "embed_match_f1": self.embed_match_f1,
            "coherence": self.coherence,
            "length_mean": self.length_mean,
            "length_std": self.length_std,
            "n": self.n,
        }


# --------------------------------------------------------------------------
# act-level metrics

def act_accuracy(records: Sequence[PredictionRecord]) -> float:
    """Fraction of records whose predicted act equals gold; failures count wrong."""
    if not records:
        raise ValueError("no records")
    hits = sum(1 for r in records if r.predicted_act is not None and r.predicted_act == r.gold_act)
    return hits / len(records)


def act_invariability(
    records: Sequence[PredictionRecord],
    teaching_acts: Sequence["ActId | str"],
    target: int = 10,
) -> float:
    """Mean absolute deviation of per-act prediction counts from the target.

    The denominator set is the union of the Teaching acts (target ``target``
    each) and every act actually predicted (target 0 for non-Teaching acts),
    so 0 is attained exactly by a perfectly balanced, on-category run. Lower
    is better.
    """
    if not records:
        raise ValueError("no records")
    counts = Counter(r.predicted_act for r in records if r.predicted_act is not None)
    teaching = [str(a) for a in teaching_acts]
    acts = set(teaching) | set(counts)
    deviations = [abs(counts.get(a, 0) - (target if a in teaching else 0)) for a in acts]
    return sum(deviations) / len(acts)


# --------------------------------------------------------------------------
# utterance-level metrics

def embed_match_f1(
    hyp_vectors: np.ndarray, ref_vectors: np.ndarray
) -> dict[str, float]:
    """Greedy token-matching similarity between two token-vector sequences.

    Precision: mean over hypothesis tokens of the best cosine similarity to
    any reference token; recall is symmetric; F1 the harmonic mean. No
    inverse-frequency weighting.
    """
    hyp = np.asarray(hyp_vectors, dtype=float)
    ref = np.asarray(ref_vectors, dtype=float)
    if hyp.ndim != 2 or ref.ndim != 2 or hyp.shape[0] == 0 or ref.shape[0] == 0:
        raise ValueError("both token-vector sequences must be non-empty 2d arrays")
    if hyp.shape[1] != ref.shape[1]:
        raise ValueError(f"dimension mismatch: {hyp.shape[1]} vs {ref.shape[1]}")
    hyp_norm = hyp / np.maximum(np.linalg.norm(hyp, axis=1, keepdims=True), 1e-12)
    ref_norm = ref / np.maximum(np.linalg.norm(ref, axis=1, keepdims=True), 1e-12)
    sims = hyp_norm @ ref_norm.T
    precision = float(sims.max(axis=1).mean())
    recall = float(sims.max(axis=0).mean())
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return {"precision": precision, "recall": recall, "f1": f1}


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def coherence(provider: EmbeddingProvider, generated: str, previous: str) -> float:
    """Cosine similarity of whole-text embeddings of a reply and its predecessor."""
    if not generated.strip() or not previous.strip():
        raise ValueError("both texts must be non-empty")
    return cosine(provider.embed_text(generated), provider.embed_text(previous))


def length_stats(texts: Sequence[str]) -> dict[str, float]:
    """Mean and population standard deviation of whitespace-token counts."""
    if not texts:
        raise ValueError("no texts")
    lengths = np.array([len(t.split()) for t in texts], dtype=float)
    return {"mean": float(lengths.mean()), "std": float(lengths.std())}


# --------------------------------------------------------------------------
# annotation agreement

class KappaUndefinedError(ValueError):
    """All ratings fall in a single category; chance agreement is 1."""


def fleiss_kappa(matrix: Sequence[Sequence[int]]) -> float:
    """Fleiss's kappa for an items x categories matrix of rating counts.

    Every row must sum to the same number of raters (>= 2). Raises
    KappaUndefinedError when every rating lands in one category.
    """
    data = np.asarray(matrix, dtype=float)
    if data.ndim != 2 or data.shape[0] < 1:
        raise ValueError("matrix must be 2d with at least one item row")
    if (data < 0).any():
        raise ValueError("rating counts must be non-negative")
    row_sums = data.sum(axis=1)
    n_raters = row_sums[0]
    if n_raters < 2 or not np.all(row_sums == n_raters):
        raise ValueError("every item needs the same number of raters (>= 2)")

    per_item = ((data**2).sum(axis=1) - n_raters) / (n_raters * (n_raters - 1))
    p_observed = float(per_item.mean())
    proportions = data.sum(axis=0) / data.sum()
    p_expected = float((proportions**2).sum())
    if math.isclose(p_expected, 1.0):
        raise KappaUndefinedError("all ratings in one category; kappa is undefined")
    return (p_observed - p_expected) / (1.0 - p_expected)


def ratings_to_matrix(items: Sequence[Sequence[str]]) -> tuple[list[list[int]], list[str]]:
    """Per-item rater label lists -> (counts matrix, category order)."""
    categories = sorted({label for item in items for label in item})
    index = {c: i for i, c in enumerate(categories)}
    matrix = []
    for item in items:
        row = [0] * len(categories)
        for label in item:
            row[index[label]] += 1
        matrix.append(row)
    return matrix, categories


def confusion_pairs(items: Sequence[Sequence[str]]) -> list[tuple[str, str, int]]:
    """Unordered act pairs co-assigned to the same item by disagreeing raters.

    Each pair of raters that labeled one item differently contributes one
    count to that act pair; pairs are returned most-disagreed first.
    """
    counts: Counter[tuple[str, str]] = Counter()
    for item in items:
        labels = list(item)
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                if labels[i] != labels[j]:
                    counts[tuple(sorted((labels[i], labels[j])))] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(a, b, n) for (a, b), n in ranked]


# --------------------------------------------------------------------------
# learning gain

def learning_gain(pre: float, post: float) -> float:
    """Normalized gain between a pre-test and post-test score on a 0-100 scale."""
    for name, score in (("pre", pre), ("post", post)):
        if not 0 <= score <= 100:
            raise ValueError(f"{name} score {score} outside [0, 100]")
    return (post - pre) / 100.0


# --------------------------------------------------------------------------
# report assembly

def build_report(
    records: Sequence[PredictionRecord],
    embedding_provider: EmbeddingProvider,
    teaching_acts: Sequence["ActId | str"],
    target: int = 10,
) -> EvalReport:
    """One report row. Records without a prediction still count against
    accuracy and invariability but are excluded from the text metrics."""
    if not records:
        raise ValueError("no records")
    completed = [r for r in records if r.predicted_act is not None]

    bleu = (
        corpus_bleu([r.generated for r in completed], [r.gold_utterance for r in completed])
        if completed
        else 0.0
    )

    f1_values = []
    coherence_values = []
    for r in completed:
        if r.generated.strip() and r.gold_utterance.strip():
            _, hyp_vecs = embedding_provider.embed_tokens(r.generated)
            _, ref_vecs = embedding_provider.embed_tokens(r.gold_utterance)
            f1_values.append(embed_match_f1(hyp_vecs, ref_vecs)["f1"])
        if r.generated.strip() and r.prev_utterance.strip():
            coherence_values.append(coherence(embedding_provider, r.generated, r.prev_utterance))

    lengths = (
        length_stats([r.generated for r in completed])
        if completed
        else {"mean": 0.0, "std": 0.0}
    )
    return EvalReport(
        accuracy=act_accuracy(records),
        invariability=act_invariability(records, teaching_acts, target),
        corpus_bleu=bleu,
        embed_match_f1=float(np.mean(f1_values)) if f1_values else 0.0,
        coherence=float(np.mean(coherence_values)) if coherence_values else 0.0,
        length_mean=lengths["mean"],
        length_std=lengths["std"],
        n=len(records),
    )


def format_report_table(reports: dict[str, EvalReport]) -> str:
    """Plain-text table, one row per configuration, headline column order."""
    header = (
        f"{'Model':<24} {'Accuracy':>9} {'Invariab.':>10} {'sBLEU':>8} "
        f"{'EmbedF1':>8} {'Coherence':>10} {'Length':>12} {'n':>5}"
    )
    lines = [header, "-" * len(header)]
    for name, r in reports.items():
        lines.append(
            f"{name:<24} {r.accuracy:>9.3f} {r.invariability:>10.3f} {r.corpus_bleu:>8.3f} "
            f"{r.embed_match_f1:>8.3f} {r.coherence:>10.3f} "
            f"{f'{r.length_mean:.0f} ± {r.length_std:.0f}':>12} {r.n:>5}"
        )
    return "\n".join(lines)


def write_predictions(records: Sequence[PredictionRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "scenario_id": r.scenario_id,
                        "predicted_act": r.predicted_act,
                        "generated": r.generated,
                        "gold_act": r.gold_act,
                        "gold_utterance": r.gold_utterance,
                        "prev_utterance": r.prev_utterance,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_predictions(path: str) -> list[PredictionRecord]:
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            if d["scenario_id"] in seen:
                raise ValueError(f"duplicate scenario_id {d['scenario_id']!r}")
            seen.add(d["scenario_id"])
            records.append(PredictionRecord(**d))
    return records
