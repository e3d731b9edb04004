"""Domain types for examples, annotations and predictions, plus JSONL I/O."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import BinaryIO, Callable, Iterable, Optional


class CorpusError(ValueError):
    """Raised for malformed dataset files or invalid records."""


class Category(enum.Enum):
    UNNECESSARY = "UNNECESSARY"
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"


class EditType(enum.Enum):
    PRONOUN_NP_SWAP = "PRONOUN_NP_SWAP"
    NAME_COMPLETION = "NAME_COMPLETION"
    DM_REMOVAL = "DM_REMOVAL"
    BRIDGING = "BRIDGING"
    GLOBAL_SCOPING = "GLOBAL_SCOPING"
    ADDITION = "ADDITION"


@dataclass(frozen=True)
class Edit:
    """A single bag-notation edit: remove one string, add another, at a position."""

    type: EditType
    removed: str
    added: str


@dataclass(frozen=True)
class Annotation:
    """One rater's judgement: a category, and the rewritten sentence if feasible."""

    category: Category
    decontextualized: Optional[str] = None
    edits: Optional[tuple[Edit, ...]] = None

    def validate(self, original: Optional[str] = None) -> None:
        has_sentence = self.decontextualized is not None
        if self.category is Category.INFEASIBLE:
            if has_sentence:
                raise CorpusError("INFEASIBLE annotation must not carry a sentence")
        else:
            if not has_sentence:
                raise CorpusError(
                    f"{self.category.value} annotation requires a decontextualized sentence"
                )
        if original is not None and self.category is Category.UNNECESSARY:
            if self.decontextualized != original:
                raise CorpusError(
                    "UNNECESSARY annotation must repeat the original sentence"
                )
        if self.edits and original is not None and self.decontextualized is not None:
            for e in self.edits:
                if e.removed and e.removed not in original:
                    raise CorpusError(
                        f"edit removes {e.removed!r} which is not in the original sentence"
                    )
                if e.added and e.added not in self.decontextualized:
                    raise CorpusError(
                        f"edit adds {e.added!r} which is not in the rewritten sentence"
                    )


@dataclass(frozen=True)
class Example:
    """A target sentence in its paragraph, with page/section titles and annotations."""

    id: str
    page_title: str
    section_titles: tuple[str, ...]
    sentences: tuple[str, ...]
    target_index: int
    annotations: tuple[Annotation, ...] = ()

    def __post_init__(self) -> None:
        if len(self.sentences) < 1:
            raise CorpusError(f"example {self.id}: needs at least one sentence")
        if not 0 <= self.target_index < len(self.sentences):
            raise CorpusError(
                f"example {self.id}: target_index {self.target_index} out of range"
            )
        for ann in self.annotations:
            ann.validate(self.target_sentence)

    @property
    def target_sentence(self) -> str:
        return self.sentences[self.target_index]


@dataclass(frozen=True)
class Prediction:
    """A system output for one example."""

    example_id: str
    category: Category
    sentence: str

    def __post_init__(self) -> None:
        if self.category is not Category.INFEASIBLE and not self.sentence:
            raise CorpusError(
                f"prediction for {self.example_id}: empty sentence with category "
                f"{self.category.value}"
            )


SKIP = None  # sentinel returned by select_human_and_references

_REQUIRED_FIELDS = ("id", "page_title", "section_titles", "sentences", "target_index")


def _annotation_from_dict(d: dict) -> Annotation:
    try:
        category = Category(d["category"])
    except (KeyError, ValueError) as exc:
        raise CorpusError(f"bad annotation category: {d.get('category')!r}") from exc
    edits = None
    if d.get("edits") is not None:
        edits = tuple(
            Edit(type=EditType(e["type"]), removed=e["removed"], added=e["added"])
            for e in d["edits"]
        )
    return Annotation(
        category=category,
        decontextualized=d.get("decontextualized"),
        edits=edits,
    )


def example_from_dict(d: dict) -> Example:
    for f in _REQUIRED_FIELDS:
        if f not in d:
            raise CorpusError(f"missing field {f!r}")
    return Example(
        id=d["id"],
        page_title=d["page_title"],
        section_titles=tuple(d["section_titles"]),
        sentences=tuple(d["sentences"]),
        target_index=d["target_index"],
        annotations=tuple(_annotation_from_dict(a) for a in d.get("annotations", [])),
    )


def example_to_dict(e: Example) -> dict:
    return {
        "id": e.id,
        "page_title": e.page_title,
        "section_titles": list(e.section_titles),
        "sentences": list(e.sentences),
        "target_index": e.target_index,
        "annotations": [
            {
                "category": a.category.value,
                "decontextualized": a.decontextualized,
                "edits": None
                if a.edits is None
                else [
                    {"type": ed.type.value, "removed": ed.removed, "added": ed.added}
                    for ed in a.edits
                ],
            }
            for a in e.annotations
        ],
    }


def load_examples(
    source: BinaryIO | Iterable[bytes],
    adapter: Optional[Callable[[dict], dict]] = None,
) -> list[Example]:
    """Parse a UTF-8 JSONL stream of examples.

    `adapter`, when given, maps each raw JSON object onto the canonical schema
    before parsing; use it to load externally released dataset layouts.
    """
    examples: list[Example] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.decode("utf-8").strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: malformed JSON ({exc.msg})") from exc
        if adapter is not None:
            obj = adapter(obj)
        try:
            ex = example_from_dict(obj)
        except CorpusError as exc:
            raise CorpusError(f"line {lineno}: {exc}") from exc
        if ex.id in seen:
            raise CorpusError(f"line {lineno}: duplicate id {ex.id!r}")
        seen.add(ex.id)
        examples.append(ex)
    return examples


def dump_examples(examples: Iterable[Example]) -> bytes:
    """Serialize examples to canonical JSONL (sorted keys, compact separators)."""
    lines = [
        json.dumps(example_to_dict(e), sort_keys=True, ensure_ascii=False)
        for e in examples
    ]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def assemble_model_input(e: Example) -> str:
    """Concatenate title, section titles and paragraph around the target sentence.

    Layout: [CLS] title [S] sections [S] pre-context [S] target [S] post-context [S]
    Empty context runs keep their separators so token positions stay predictable.
    """
    pre = " ".join(e.sentences[: e.target_index])
    post = " ".join(e.sentences[e.target_index + 1 :])
    parts = [
        "[CLS]",
        e.page_title,
        "[S]",
        " ".join(e.section_titles),
        "[S]",
        pre,
        "[S]",
        e.target_sentence,
        "[S]",
        post,
        "[S]",
    ]
    return " ".join(p for p in parts if p)


def parse_prediction(raw: str, example_id: str = "") -> Prediction:
    """Parse a `CATEGORY [SEP] sentence` string into a Prediction."""
    stripped = raw.strip()
    cat_token, _, rest = stripped.partition(" ")
    try:
        category = Category(cat_token.upper())
    except ValueError as exc:
        raise CorpusError(f"unknown category {cat_token!r}") from exc
    head, sep, tail = rest.partition("[SEP]")
    if not sep or head.strip():
        if category is Category.INFEASIBLE:
            return Prediction(example_id=example_id, category=category, sentence="")
        raise CorpusError(f"missing [SEP] in prediction {raw!r}")
    return Prediction(example_id=example_id, category=category, sentence=tail.strip())


def select_human_and_references(
    annotations: Iterable[Annotation],
    original: str,
    min_feasible: int = 3,
    count_unnecessary: bool = True,
):
    """Pick the median-length output as the human row; the rest become references.

    Returns SKIP (None) unless at least `min_feasible` annotations are FEASIBLE
    (or UNNECESSARY, when `count_unnecessary`). INFEASIBLE annotations are
    dropped. Remaining output sentences are sorted by UTF-8 byte length
    (lexicographic tie-break); the lower median is the human output, the second
    shortest when there are exactly four.
    """
    annotations = list(annotations)
    if not annotations:
        raise CorpusError("select_human_and_references: no annotations")
    if count_unnecessary:
        ok = [a for a in annotations if a.category is not Category.INFEASIBLE]
        n_qualifying = len(ok)
    else:
        ok = [a for a in annotations if a.category is not Category.INFEASIBLE]
        n_qualifying = sum(1 for a in annotations if a.category is Category.FEASIBLE)
    if n_qualifying < min_feasible:
        return SKIP
    outputs = sorted(
        (a.decontextualized for a in ok),
        key=lambda s: (len(s.encode("utf-8")), s),
    )
    m = len(outputs)
    idx = (m - 1) // 2  # lower median; equals "second shortest" when m == 4
    human = outputs[idx]
    references = outputs[:idx] + outputs[idx + 1 :]
    return human, references
