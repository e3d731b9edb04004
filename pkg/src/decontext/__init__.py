"""Sentence decontextualization tooling: data model, evaluation metrics, a
rule-based coreference rewriter, and a compute-budget retrieval benchmark."""

from .corpus import (
    Annotation,
    Category,
    Edit,
    EditType,
    Example,
    Prediction,
    SKIP,
    assemble_model_input,
    dump_examples,
    load_examples,
    parse_prediction,
    select_human_and_references,
)
from .metrics import (
    EditCounts,
    EvalReport,
    evaluate,
    feasibility_accuracy,
    length_increase,
    micro_average,
    repeat_baseline,
    sari_edit_counts,
    sentence_match,
)
from .textnorm import TokenSeq, normalize, tokenize

__all__ = [
    "Annotation",
    "Category",
    "Edit",
    "EditCounts",
    "EditType",
    "EvalReport",
    "Example",
    "Prediction",
    "SKIP",
    "TokenSeq",
    "assemble_model_input",
    "dump_examples",
    "evaluate",
    "feasibility_accuracy",
    "length_increase",
    "load_examples",
    "micro_average",
    "normalize",
    "parse_prediction",
    "repeat_baseline",
    "sari_edit_counts",
    "select_human_and_references",
    "sentence_match",
    "tokenize",
]

__version__ = "0.1.0"
