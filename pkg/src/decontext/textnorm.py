"""Tokenization and string normalization shared by the metrics and retrieval code."""

from __future__ import annotations

import string
import unicodedata
from dataclasses import dataclass, field

ARTICLES = {"a", "an", "the"}

# Unicode P* categories plus the ASCII symbol characters commonly stripped
# by QA answer normalization.
_ASCII_SYMBOLS = set(string.punctuation)


def _is_punct(ch: str) -> bool:
    return ch in _ASCII_SYMBOLS or unicodedata.category(ch).startswith("P")


@dataclass(frozen=True)
class TokenSeq:
    """A tokenized string plus the string it came from."""

    tokens: tuple[str, ...]
    source: str

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def joined(self) -> str:
        return " ".join(self.tokens)


def split_tokens(s: str) -> list[str]:
    """Split on whitespace and break punctuation characters into their own tokens.

    Case-preserving; `tokenize` adds lowercasing on top of this.
    """
    out: list[str] = []
    for chunk in s.split():
        buf: list[str] = []
        for ch in chunk:
            if _is_punct(ch):
                if buf:
                    out.append("".join(buf))
                    buf = []
                out.append(ch)
            else:
                buf.append(ch)
        if buf:
            out.append("".join(buf))
    return out


def tokenize(s: str) -> TokenSeq:
    """Lowercased unigram tokenization: whitespace split with punctuation isolated."""
    folded = unicodedata.normalize("NFKC", s).lower()
    return TokenSeq(tokens=tuple(split_tokens(folded)), source=s)


def normalize(s: str) -> str:
    """Lowercase, drop punctuation, drop articles, collapse whitespace.

    Punctuation characters are deleted in place ("Swift's" -> "swifts"),
    then {a, an, the} are removed as whole tokens.
    """
    folded = unicodedata.normalize("NFKC", s).lower()
    stripped = "".join(ch for ch in folded if not _is_punct(ch))
    toks = [t for t in stripped.split() if t not in ARTICLES]
    return " ".join(toks)
