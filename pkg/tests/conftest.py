import json

import pytest

from decontext.corpus import Annotation, Category, Example


def ann(category, sentence=None):
    return Annotation(category=Category(category), decontextualized=sentence)


def make_example(
    id="ex1",
    page_title="T",
    section_titles=("S1",),
    sentences=("a.", "b.", "c."),
    target_index=1,
    annotations=(),
):
    return Example(
        id=id,
        page_title=page_title,
        section_titles=tuple(section_titles),
        sentences=tuple(sentences),
        target_index=target_index,
        annotations=tuple(annotations),
    )


@pytest.fixture
def swift_example():
    """Paragraph where the target uses a pronoun resolvable to an earlier name."""
    return make_example(
        id="swift",
        page_title="Taylor Swift",
        section_titles=("Career",),
        sentences=(
            "Taylor Swift released a new album in 2017 .",
            "She sang the lead single at the awards show .",
        ),
        target_index=1,
        annotations=(
            ann("FEASIBLE", "Taylor Swift sang the lead single at the awards show ."),
            ann("FEASIBLE", "Taylor Swift sang the lead single at the 2017 awards show ."),
            ann("UNNECESSARY", "She sang the lead single at the awards show ."),
            ann("FEASIBLE", "Taylor Swift sang the single at the awards show ."),
            ann("INFEASIBLE"),
        ),
    )


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n")
    return str(path)
