import string

from hypothesis import given, settings
from hypothesis import strategies as st

from decontext.textnorm import ARTICLES, normalize, split_tokens, tokenize

text_strategy = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), max_size=60
)


def test_tokenize_basic():
    assert tokenize("The cat sat.").tokens == ("the", "cat", "sat", ".")


def test_tokenize_empty():
    assert tokenize("").tokens == ()


def test_tokenize_splits_punctuation_runs():
    assert tokenize("4-2 to France").tokens == ("4", "-", "2", "to", "france")


def test_split_tokens_preserves_case():
    assert split_tokens("Taylor Swift's song") == ["Taylor", "Swift", "'", "s", "song"]


def test_normalize_basic():
    assert normalize("The Cat sat.") == "cat sat"


def test_normalize_all_articles():
    assert normalize("A an the") == ""


def test_normalize_possessive_and_quotes():
    assert (
        normalize('Taylor Swift\'s "Look What You Made Me Do"')
        == "taylor swifts look what you made me do"
    )


@given(text_strategy)
@settings(max_examples=300)
def test_normalize_idempotent(s):
    assert normalize(normalize(s)) == normalize(s)


@given(text_strategy)
@settings(max_examples=300)
def test_normalize_has_no_articles_upper_or_ascii_punct(s):
    out = normalize(s)
    assert out == out.lower()
    assert not any(ch in string.punctuation for ch in out)
    assert not any(t in ARTICLES for t in out.split())


@given(text_strategy)
@settings(max_examples=300)
def test_tokenize_fixpoint(s):
    once = tokenize(s)
    again = tokenize(once.joined())
    assert again.tokens == once.tokens


@given(text_strategy)
@settings(max_examples=200)
def test_tokenize_no_empty_tokens(s):
    assert all(t for t in tokenize(s).tokens)
