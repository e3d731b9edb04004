"""Rule-based rewriter: replace target-sentence mentions with earlier, longer
mentions from the same coreference cluster."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Optional, Sequence

from .corpus import Category, CorpusError, EditType, Example, assemble_model_input

log = logging.getLogger(__name__)


class CorefError(ValueError):
    """Raised for clusters inconsistent with the assembled input."""


@dataclass(frozen=True)
class Mention:
    """A token span [start, end) over the assembled-input token sequence."""

    start: int
    end: int
    text: str

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise CorefError(f"bad mention span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Cluster:
    mentions: tuple[Mention, ...]

    def __post_init__(self) -> None:
        prev_end = -1
        for m in self.mentions:
            if m.start < prev_end:
                raise CorefError("cluster mentions overlap or are unsorted")
            prev_end = m.end


def assembled_tokens(e: Example) -> list[str]:
    """Whitespace tokens of the assembled model input; the coref offset space."""
    return assemble_model_input(e).split()


def target_token_span(e: Example) -> tuple[int, int]:
    """Token span of the target sentence inside the assembled input."""
    pre = " ".join(e.sentences[: e.target_index])
    sections = " ".join(e.section_titles)
    # [CLS], title, [S], sections, [S], pre-context, [S]; separators survive
    # even when a run between them is empty.
    start = (
        1
        + len(e.page_title.split())
        + 1
        + len(sections.split())
        + 1
        + len(pre.split())
        + 1
    )
    return start, start + len(e.target_sentence.split())


def make_cluster(tokens: Sequence[str], spans: Iterable[tuple[int, int]]) -> Cluster:
    n = len(tokens)
    mentions = []
    for s, t in sorted(spans):
        if not 0 <= s < t <= n:
            raise CorefError(f"mention span [{s}, {t}) outside input of {n} tokens")
        mentions.append(Mention(s, t, " ".join(tokens[s:t])))
    return Cluster(tuple(mentions))


def rewrite(
    input_tokens: Sequence[str],
    target_span: tuple[int, int],
    clusters: Sequence[Cluster],
):
    """Rewrite the target sentence by earliest-longer-mention substitution.

    For each cluster with a mention inside the target span, the first such
    mention is replaced with the earliest pre-target mention of the same
    cluster that is strictly longer in tokens. Replacements apply right to
    left; a later one overlapping an already replaced span is skipped.
    Returns (rewritten sentence, edits).
    """
    t_start, t_end = target_span
    if not 0 <= t_start <= t_end <= len(input_tokens):
        raise CorefError(f"target span [{t_start}, {t_end}) outside input")

    replacements: list[tuple[Mention, Mention]] = []
    for cluster in clusters:
        for m in cluster.mentions:
            if m.start < t_end and m.end > t_start and not (
                t_start <= m.start and m.end <= t_end
            ):
                raise CorefError(
                    f"mention [{m.start}, {m.end}) crosses the target span boundary"
                )
        in_target = [m for m in cluster.mentions if t_start <= m.start and m.end <= t_end]
        if not in_target:
            continue
        target_mention = in_target[0]
        candidates = [
            m
            for m in cluster.mentions
            if m.start < t_start and len(m) > len(target_mention)
        ]
        if not candidates:
            continue
        best = min(candidates, key=lambda m: (m.start, -len(m.text), m.text))
        replacements.append((target_mention, best))

    # clusters are processed by ascending first-target-mention start; a later
    # replacement overlapping an accepted one is skipped
    replacements.sort(key=lambda pair: pair[0].start)
    accepted: list[tuple[Mention, Mention]] = []
    for target_mention, antecedent in replacements:
        if any(
            target_mention.start < prev.end and target_mention.end > prev.start
            for prev, _ in accepted
        ):
            log.warning(
                "skipping overlapping replacement of %r at [%d, %d)",
                target_mention.text,
                target_mention.start,
                target_mention.end,
            )
            continue
        accepted.append((target_mention, antecedent))

    # applied right to left so earlier offsets stay valid
    out_tokens = list(input_tokens[t_start:t_end])
    for target_mention, antecedent in reversed(accepted):
        rel_start = target_mention.start - t_start
        rel_end = target_mention.end - t_start
        new_tokens = antecedent.text.split()
        if rel_start == 0 and new_tokens:
            new_tokens = [new_tokens[0][:1].upper() + new_tokens[0][1:]] + new_tokens[1:]
        out_tokens[rel_start:rel_end] = new_tokens
    edits = [
        (EditType.PRONOUN_NP_SWAP, m.text, a.text) for m, a in accepted
    ]
    return " ".join(out_tokens), edits


def rewrite_stats(edit_lists: Sequence[Sequence]) -> float:
    """Fraction of examples with at least one replacement."""
    if not edit_lists:
        return 0.0
    return sum(1 for edits in edit_lists if edits) / len(edit_lists)


def load_clusters(source: BinaryIO | Iterable[bytes]) -> dict[str, list[list[tuple[int, int]]]]:
    """Read per-example cluster span files: {"example_id", "clusters": [[[s,e],...],...]}."""
    out: dict[str, list[list[tuple[int, int]]]] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.decode("utf-8").strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: malformed JSON ({exc.msg})") from exc
        try:
            eid = obj["example_id"]
            clusters = [
                [(int(s), int(t)) for s, t in cluster] for cluster in obj["clusters"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"line {lineno}: bad cluster record") from exc
        out[eid] = clusters
    return out


def rewrite_example(
    e: Example, cluster_spans: Optional[list[list[tuple[int, int]]]]
):
    """Run the rewriter on one example; returns (sentence, edits)."""
    tokens = assembled_tokens(e)
    span = target_token_span(e)
    clusters = [make_cluster(tokens, spans) for spans in (cluster_spans or [])]
    return rewrite(tokens, span, clusters)


def rewrite_prediction_raw(sentence: str, edits: Sequence) -> str:
    """Format a rewriter result as a `[CAT] [SEP] y` prediction string."""
    category = Category.FEASIBLE if edits else Category.UNNECESSARY
    return f"{category.value} [SEP] {sentence}"
