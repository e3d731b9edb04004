"""Dataset statistics: counts, byte lengths, category distribution, edit-type
frequencies, and inter-rater agreement on the category decision."""

from __future__ import annotations

from collections import Counter
from typing import Sequence

from .corpus import Category, EditType, Example
from .metrics import byte_len


def dataset_stats(examples: Sequence[Example]) -> dict:
    """Aggregate counts, mean byte lengths, category and edit-type distributions."""
    n = len(examples)
    para_lens = [byte_len(" ".join(e.sentences)) for e in examples]
    sent_lens = [byte_len(e.target_sentence) for e in examples]

    categories: Counter[str] = Counter()
    edit_types: Counter[str] = Counter()
    n_annotations = 0
    for e in examples:
        for a in e.annotations:
            n_annotations += 1
            if a.category is Category.UNNECESSARY:
                categories["FEASIBLE_AS_IS"] += 1
            elif a.category is Category.FEASIBLE:
                categories["FEASIBLE_WITH_EDIT"] += 1
            else:
                categories["INFEASIBLE"] += 1
            for edit in a.edits or ():
                edit_types[edit.type.value] += 1

    def pct(counter: Counter[str], total: int) -> dict[str, float]:
        if total == 0:
            return {k: 0.0 for k in counter}
        return {k: 100.0 * v / total for k, v in sorted(counter.items())}

    n_edits = sum(edit_types.values())
    return {
        "n_examples": n,
        "n_annotations": n_annotations,
        "mean_paragraph_len_bytes": round(sum(para_lens) / n, 1) if n else 0.0,
        "mean_sentence_len_bytes": round(sum(sent_lens) / n, 1) if n else 0.0,
        "category_pct": pct(categories, n_annotations),
        "edit_type_pct": pct(edit_types, n_edits),
        "fleiss_kappa_category": round(category_fleiss_kappa(examples), 4),
        "binary_agreement": round(binary_agreement(examples), 4),
    }


def _binary_label(cat: Category) -> int:
    return 1 if cat is Category.INFEASIBLE else 0


def category_fleiss_kappa(examples: Sequence[Example]) -> float:
    """Fleiss' kappa over the three-way category decision.

    Uses the variable-rater generalization: per-example agreement
    sum(n_ij * (n_ij - 1)) / (n_i * (n_i - 1)); examples with fewer than two
    annotations are skipped.
    """
    rows = []
    totals: Counter[Category] = Counter()
    grand = 0
    for e in examples:
        if len(e.annotations) < 2:
            continue
        counts = Counter(a.category for a in e.annotations)
        rows.append(counts)
        totals.update(counts)
        grand += len(e.annotations)
    if not rows or grand == 0:
        return 0.0
    p_bar = sum(
        sum(c * (c - 1) for c in counts.values())
        / (sum(counts.values()) * (sum(counts.values()) - 1))
        for counts in rows
    ) / len(rows)
    p_e = sum((totals[c] / grand) ** 2 for c in totals)
    if p_e == 1.0:
        return 1.0
    return (p_bar - p_e) / (1 - p_e)


def binary_agreement(examples: Sequence[Example]) -> float:
    """Mean pairwise agreement on the binary infeasible-vs-not decision."""
    total = 0.0
    n = 0
    for e in examples:
        anns = [_binary_label(a.category) for a in e.annotations]
        m = len(anns)
        if m < 2:
            continue
        agree = sum(
            1 for i in range(m) for j in range(i + 1, m) if anns[i] == anns[j]
        )
        total += agree / (m * (m - 1) / 2)
        n += 1
    return total / n if n else 0.0
