"""Sentence-level rewrite metrics: match, length increase, fractional SARI add/delete,
feasibility accuracy, and the report aggregation with the Repeat baseline."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .corpus import Category, CorpusError, Example, Prediction, SKIP, select_human_and_references
from .textnorm import normalize, tokenize

ZERO = Fraction(0)


@dataclass(frozen=True)
class EditCounts:
    """Fractional true/false positive and false negative mass for add and delete edits."""

    tp_add: Fraction = ZERO
    fp_add: Fraction = ZERO
    fn_add: Fraction = ZERO
    tp_del: Fraction = ZERO
    fp_del: Fraction = ZERO
    fn_del: Fraction = ZERO

    def __add__(self, other: "EditCounts") -> "EditCounts":
        return EditCounts(
            self.tp_add + other.tp_add,
            self.fp_add + other.fp_add,
            self.fn_add + other.fn_add,
            self.tp_del + other.tp_del,
            self.fp_del + other.fp_del,
            self.fn_del + other.fn_del,
        )


@dataclass
class PerExampleResult:
    example_id: str
    output: str
    matched: bool
    length_increase: Fraction
    edited: bool
    counts: EditCounts
    infeasible_substituted: bool = False


@dataclass
class EvalReport:
    length_increase: Fraction
    pct_edited: Fraction
    match_all: Fraction
    match_edited: Fraction
    sari_add: tuple[Fraction, Fraction, Fraction]  # precision, recall, f1
    sari_del: tuple[Fraction, Fraction, Fraction]
    feasibility_accuracy: Fraction
    n_examples: int
    n_edited_examples: int
    infeasible_substituted_ids: list[str] = field(default_factory=list)
    per_example: list[PerExampleResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        def r(x) -> float:
            return round(float(x), 4)

        return {
            "length_increase": r(self.length_increase),
            "pct_edited": r(self.pct_edited),
            "match_all": r(self.match_all),
            "match_edited": r(self.match_edited),
            "sari_add": {
                "precision": r(self.sari_add[0]),
                "recall": r(self.sari_add[1]),
                "f1": r(self.sari_add[2]),
            },
            "sari_del": {
                "precision": r(self.sari_del[0]),
                "recall": r(self.sari_del[1]),
                "f1": r(self.sari_del[2]),
            },
            "feasibility_accuracy": r(self.feasibility_accuracy),
            "n_examples": self.n_examples,
            "n_edited_examples": self.n_edited_examples,
            "infeasible_substituted_ids": list(self.infeasible_substituted_ids),
        }


def sentence_match(output: str, references: Sequence[str]) -> bool:
    """True iff the output equals any reference after normalization."""
    if not references:
        raise CorpusError("sentence_match: empty reference list")
    norm_out = normalize(output)
    return any(norm_out == normalize(r) for r in references)


def byte_len(s: str) -> int:
    return len(s.encode("utf-8"))


def length_increase(original: str, output: str) -> Fraction:
    """(len(output) - len(original)) / len(original), lengths in UTF-8 bytes."""
    lo = byte_len(original)
    if lo == 0:
        raise CorpusError("length_increase: empty original sentence")
    return Fraction(byte_len(output) - lo, lo)


def unigrams(s: str) -> frozenset[str]:
    return frozenset(tokenize(s).tokens)


def sari_edit_counts(
    original: str, output: str, references: Sequence[str]
) -> EditCounts:
    """Fractional unigram add/delete counts against multiple references.

    A unigram present in j of r references carries weight j/r; system add
    edits are unigrams in the output but not the original, delete edits the
    reverse. Precision mass (fp) is the complement weight of each system edit.
    """
    if not references:
        raise CorpusError("sari_edit_counts: empty reference list")
    orig = unigrams(original)
    out = unigrams(output)
    refs = [unigrams(r) for r in references]
    r_count = len(refs)

    sys_add = out - orig
    sys_del = orig - out

    add_weight: dict[str, Fraction] = {}
    del_weight: dict[str, Fraction] = {}
    for ref in refs:
        for u in ref - orig:
            add_weight[u] = add_weight.get(u, ZERO) + Fraction(1, r_count)
        for u in orig - ref:
            del_weight[u] = del_weight.get(u, ZERO) + Fraction(1, r_count)

    tp_add = sum((add_weight.get(u, ZERO) for u in sys_add), ZERO)
    fp_add = sum((1 - add_weight.get(u, ZERO) for u in sys_add), ZERO)
    fn_add = sum((w for u, w in add_weight.items() if u not in sys_add), ZERO)
    tp_del = sum((del_weight.get(u, ZERO) for u in sys_del), ZERO)
    fp_del = sum((1 - del_weight.get(u, ZERO) for u in sys_del), ZERO)
    fn_del = sum((w for u, w in del_weight.items() if u not in sys_del), ZERO)

    return EditCounts(tp_add, fp_add, fn_add, tp_del, fp_del, fn_del)


def _prf(tp: Fraction, fp: Fraction, fn: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    p = tp / (tp + fp) if tp + fp > 0 else ZERO
    r = tp / (tp + fn) if tp + fn > 0 else ZERO
    f1 = 2 * p * r / (p + r) if p + r > 0 else ZERO
    return p, r, f1


def micro_average(counts: Iterable[EditCounts]):
    """Sum counts globally, then compute (P, R, F1) for add and for delete."""
    total = EditCounts()
    for c in counts:
        total = total + c
    return (
        _prf(total.tp_add, total.fp_add, total.fn_add),
        _prf(total.tp_del, total.fp_del, total.fn_del),
    )


def _binarize(cat: Category) -> bool:
    return cat is Category.INFEASIBLE


def feasibility_accuracy(
    predictions: Sequence[Prediction], examples: Sequence[Example]
) -> Fraction:
    """Mean over examples of per-annotation binary (infeasible vs. not) agreement."""
    by_id = {e.id: e for e in examples}
    total = ZERO
    n = 0
    for pred in predictions:
        ex = by_id.get(pred.example_id)
        if ex is None:
            raise CorpusError(f"feasibility_accuracy: unknown example id {pred.example_id!r}")
        if not ex.annotations:
            raise CorpusError(f"feasibility_accuracy: example {ex.id} has no annotations")
        agree = sum(
            1 for a in ex.annotations if _binarize(a.category) == _binarize(pred.category)
        )
        total += Fraction(agree, len(ex.annotations))
        n += 1
    if n == 0:
        return ZERO
    return total / n


def repeat_baseline(examples: Iterable[Example]) -> list[Prediction]:
    """The Repeat baseline: echo every original sentence, never predict INFEASIBLE."""
    return [
        Prediction(e.id, Category.UNNECESSARY, e.target_sentence) for e in examples
    ]


def evaluate(
    examples: Sequence[Example],
    predictions: Sequence[Prediction],
    mode: str = "all",
    min_feasible: int = 3,
    count_unnecessary: bool = True,
) -> EvalReport:
    """Score predictions against the median-length human split of each example.

    Examples without enough feasible annotations are skipped. INFEASIBLE
    predictions on retained examples are scored as the unedited original and
    flagged. `mode="edited_only"` restricts all aggregates to examples where
    every reference edited the sentence.
    """
    if mode not in ("all", "edited_only"):
        raise ValueError(f"evaluate: unknown mode {mode!r}")
    pred_by_id: dict[str, Prediction] = {}
    for p in predictions:
        pred_by_id[p.example_id] = p

    rows: list[PerExampleResult] = []
    edited_flags: list[bool] = []
    missing: list[str] = []
    kept_examples: list[Example] = []
    kept_refs: list[list[str]] = []

    for ex in examples:
        sel = select_human_and_references(
            ex.annotations,
            ex.target_sentence,
            min_feasible=min_feasible,
            count_unnecessary=count_unnecessary,
        )
        if sel is SKIP:
            continue
        _, references = sel
        if ex.id not in pred_by_id:
            missing.append(ex.id)
            continue
        kept_examples.append(ex)
        kept_refs.append(references)
    if missing:
        raise CorpusError(
            "evaluate: missing predictions for examples: " + ", ".join(missing)
        )

    for ex, references in zip(kept_examples, kept_refs):
        pred = pred_by_id[ex.id]
        original = ex.target_sentence
        substituted = pred.category is Category.INFEASIBLE
        output = original if substituted else pred.sentence
        all_refs_edited = all(r != original for r in references)
        rows.append(
            PerExampleResult(
                example_id=ex.id,
                output=output,
                matched=sentence_match(output, references),
                length_increase=length_increase(original, output),
                edited=output != original,
                counts=sari_edit_counts(original, output, references),
                infeasible_substituted=substituted,
            )
        )
        edited_flags.append(all_refs_edited)

    if mode == "edited_only":
        selected = [(r, f) for r, f in zip(rows, edited_flags) if f]
        rows = [r for r, _ in selected]
        edited_flags = [f for _, f in selected]

    n = len(rows)
    n_edited = sum(edited_flags)

    def mean(values: list[Fraction]) -> Fraction:
        return sum(values, ZERO) / n if n else ZERO

    match_all = mean([Fraction(int(r.matched)) for r in rows])
    match_edited = (
        sum(
            (Fraction(int(r.matched)) for r, f in zip(rows, edited_flags) if f), ZERO
        )
        / n_edited
        if n_edited
        else ZERO
    )
    add_prf, del_prf = micro_average(r.counts for r in rows)

    # Feasibility accuracy is over every scored example, skipped or not.
    feas_preds = [pred_by_id[e.id] for e in examples if e.id in pred_by_id]
    feas = feasibility_accuracy(feas_preds, list(examples)) if feas_preds else ZERO

    return EvalReport(
        length_increase=mean([r.length_increase for r in rows]),
        pct_edited=mean([Fraction(int(r.edited)) for r in rows]),
        match_all=match_all,
        match_edited=match_edited,
        sari_add=add_prf,
        sari_del=del_prf,
        feasibility_accuracy=feas,
        n_examples=n,
        n_edited_examples=n_edited,
        infeasible_substituted_ids=[r.example_id for r in rows if r.infeasible_substituted],
        per_example=rows,
    )
