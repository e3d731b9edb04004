"""Document segmentation, TF-IDF retrieval, answer matching, and recall at a
quadratic compute budget."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Optional, Sequence

from .corpus import CorpusError
from .textnorm import normalize, tokenize


class Strategy(enum.Enum):
    PARAGRAPH = "paragraph"
    WINDOW100 = "window100"
    SENTENCE = "sentence"
    DECONTEXT_SENTENCE = "decontext_sentence"


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    paragraphs: tuple[tuple[str, ...], ...]  # paragraphs pre-split into sentences


@dataclass(frozen=True)
class Passage:
    passage_id: str
    doc_id: str
    strategy: Strategy
    text: str  # title-prepended
    token_len: int

    @classmethod
    def make(cls, passage_id: str, doc_id: str, strategy: Strategy, text: str) -> "Passage":
        return cls(passage_id, doc_id, strategy, text, len(tokenize(text).tokens))


@dataclass(frozen=True)
class Question:
    qid: str
    question: str
    answers: tuple[str, ...]


@dataclass
class RetrievalRun:
    qid: str
    strategy: Strategy
    hit_index: int  # 1-based; k+1 when no retrieved passage matches
    cost: float  # cumulative encoding cost up to the hit; inf when no hit
    k: int


def _windows(n_words: int, window: int, stride: int) -> list[tuple[int, int]]:
    """Overlapping [start, end) word spans that jointly cover all words."""
    if n_words <= 0:
        return []
    spans = [(0, min(window, n_words))]
    start = 0
    while spans[-1][1] < n_words:
        start += stride
        end = min(start + window, n_words)
        if end > spans[-1][1]:
            spans.append((start, end))
    return spans


def segment(
    doc: Document,
    strategy: Strategy,
    decontext_map: Optional[dict[tuple[int, int], str]] = None,
    window: int = 100,
    stride: int = 50,
) -> list[Passage]:
    """Cut one document into title-prepended retrieval passages.

    `decontext_map` maps (paragraph index, sentence index) to a replacement
    sentence; sentences without an entry fall back to the original text.
    """
    passages: list[Passage] = []

    def add(suffix: str, body: str) -> None:
        text = f"{doc.title} {body}" if body else doc.title
        passages.append(
            Passage.make(f"{doc.doc_id}:{strategy.value}:{suffix}", doc.doc_id, strategy, text)
        )

    if strategy is Strategy.PARAGRAPH:
        for pi, para in enumerate(doc.paragraphs):
            add(str(pi), " ".join(para))
    elif strategy is Strategy.WINDOW100:
        words = " ".join(" ".join(p) for p in doc.paragraphs).split()
        for wi, (s, e) in enumerate(_windows(len(words), window, stride)):
            add(str(wi), " ".join(words[s:e]))
    elif strategy in (Strategy.SENTENCE, Strategy.DECONTEXT_SENTENCE):
        mapping = decontext_map or {}
        for pi, para in enumerate(doc.paragraphs):
            for si, sent in enumerate(para):
                body = sent
                if strategy is Strategy.DECONTEXT_SENTENCE:
                    body = mapping.get((pi, si), sent)
                add(f"{pi}.{si}", body)
    else:  # pragma: no cover
        raise ValueError(f"unknown strategy {strategy!r}")
    return passages


def _terms(text: str, ngrams: int) -> list[str]:
    toks = list(tokenize(text).tokens)
    terms = list(toks)
    if ngrams >= 2:
        terms.extend(f"{a} {b}" for a, b in zip(toks, toks[1:]))
    return terms


class TfidfIndex:
    """Sparse TF-IDF index with cosine scoring; tf * ln(N/df) weighting."""

    def __init__(self, passages: Sequence[Passage], ngrams: int = 2):
        if not passages:
            raise CorpusError("build_index: no passages")
        self.ngrams = ngrams
        self.passages = sorted(passages, key=lambda p: p.passage_id)
        self.df: dict[str, int] = {}
        raw_tf: list[dict[str, int]] = []
        for p in self.passages:
            tf: dict[str, int] = {}
            for term in _terms(p.text, ngrams):
                tf[term] = tf.get(term, 0) + 1
            raw_tf.append(tf)
            for term in tf:
                self.df[term] = self.df.get(term, 0) + 1
        n = len(self.passages)
        self.norms: list[float] = []
        self.postings: dict[str, list[tuple[int, float]]] = {}
        for i, tf in enumerate(raw_tf):
            sq = 0.0
            for t, c in tf.items():
                w = c * math.log(n / self.df[t])
                sq += w * w
                self.postings.setdefault(t, []).append((i, w))
            self.norms.append(math.sqrt(sq))

    def score(self, query: str) -> list[float]:
        qtf: dict[str, int] = {}
        for term in _terms(query, self.ngrams):
            if term in self.df:
                qtf[term] = qtf.get(term, 0) + 1
        n = len(self.passages)
        qvec = {t: c * math.log(n / self.df[t]) for t, c in qtf.items()}
        qnorm = math.sqrt(sum(w * w for w in qvec.values()))
        scores = [0.0] * n
        if qnorm == 0:
            return scores
        for t, qw in qvec.items():
            for i, pw in self.postings[t]:
                scores[i] += qw * pw
        for i, pnorm in enumerate(self.norms):
            scores[i] = scores[i] / (qnorm * pnorm) if pnorm else 0.0
        return scores


def build_index(passages: Sequence[Passage], ngrams: int = 2) -> TfidfIndex:
    return TfidfIndex(passages, ngrams=ngrams)


def retrieve(index: TfidfIndex, question: str, k: int = 100) -> list[tuple[Passage, float]]:
    """Top-k passages by cosine similarity; ties break by ascending passage id."""
    if k < 1:
        raise ValueError("retrieve: k must be >= 1")
    scores = index.score(question)
    order = sorted(
        range(len(index.passages)),
        key=lambda i: (-scores[i], index.passages[i].passage_id),
    )
    return [(index.passages[i], scores[i]) for i in order[:k]]


def answer_match(passage_text: str, answers: Sequence[str]) -> bool:
    """True iff some normalized answer occurs as a contiguous token run in the passage."""
    if not answers:
        raise CorpusError("answer_match: empty answer list")
    passage_toks = normalize(passage_text).split()
    for answer in answers:
        ans_toks = normalize(answer).split()
        if not ans_toks:
            continue
        m = len(ans_toks)
        for i in range(len(passage_toks) - m + 1):
            if passage_toks[i : i + m] == ans_toks:
                return True
    return False


def cost(question_len: int, passage_len: int) -> int:
    """Quadratic encoding cost of co-encoding question, separator, and passage."""
    return (question_len + 1 + passage_len) ** 2


def run_question(index: TfidfIndex, q: Question, strategy: Strategy, k: int = 100) -> RetrievalRun:
    """Retrieve, find the first answer-bearing passage, and accumulate its cost."""
    ranked = retrieve(index, q.question, k)
    q_len = len(tokenize(q.question).tokens)
    cumulative = 0
    for rank, (passage, _) in enumerate(ranked, start=1):
        cumulative += cost(q_len, passage.token_len)
        if answer_match(passage.text, q.answers):
            return RetrievalRun(q.qid, strategy, rank, float(cumulative), k)
    return RetrievalRun(q.qid, strategy, k + 1, math.inf, k)


def recall_curve(
    runs: Sequence[RetrievalRun], budgets: Sequence[float]
) -> list[tuple[float, float]]:
    """Fraction of runs whose cumulative cost is strictly under each budget."""
    if list(budgets) != sorted(budgets):
        raise ValueError("recall_curve: budgets must be ascending")
    n = len(runs)
    out = []
    for t in budgets:
        hit = sum(1 for r in runs if r.cost < t)
        out.append((t, hit / n if n else 0.0))
    return out


def load_corpus(source: BinaryIO | Iterable[bytes]) -> list[Document]:
    """Read JSONL documents: {"doc_id", "title", "paragraphs": [[sentence,...],...]}."""
    docs = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.decode("utf-8").strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            docs.append(
                Document(
                    doc_id=obj["doc_id"],
                    title=obj["title"],
                    paragraphs=tuple(tuple(p) for p in obj["paragraphs"]),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorpusError(f"line {lineno}: bad document record ({exc})") from exc
    return docs


def load_decontext_map(
    source: BinaryIO | Iterable[bytes],
) -> dict[str, dict[tuple[int, int], str]]:
    """Read JSONL decontext replacements: {"doc_id", "para", "sent", "text"}."""
    out: dict[str, dict[tuple[int, int], str]] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.decode("utf-8").strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            out.setdefault(obj["doc_id"], {})[(obj["para"], obj["sent"])] = obj["text"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorpusError(f"line {lineno}: bad decontext record ({exc})") from exc
    return out


def load_questions(source: BinaryIO | Iterable[bytes]) -> list[Question]:
    """Read JSONL questions: {"qid", "question", "answers": [str]}."""
    questions = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.decode("utf-8").strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            questions.append(
                Question(obj["qid"], obj["question"], tuple(obj["answers"]))
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorpusError(f"line {lineno}: bad question record ({exc})") from exc
    return questions
