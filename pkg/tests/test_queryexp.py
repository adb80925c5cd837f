import pytest
from hypothesis import given
from hypothesis import strategies as st

from mailrank.porter import stem
from mailrank.queryexp import (
    EmptyQueryError,
    Vocabulary,
    expand,
    expand_query,
    levenshtein,
    tokenize,
    within_edit_distance,
)

from conftest import DATA


def _dp_levenshtein(a, b):
    # reference: full table, no early exit, no swapping
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d[-1][-1]


@pytest.mark.parametrize("raw, words", [
    ("Conference Call", ("conference", "call")),
    ("FERC", ("ferc",)),
    ("the budget of the desk", ("budget", "desk")),
    ("budget Budget", ("budget",)),
    ("Q3 2001 forecast", ("q3", "2001", "forecast")),
])
def test_tokenize(raw, words):
    assert tokenize(raw).words == words


@pytest.mark.parametrize("raw", ["", "   ", "the of", "!!!"])
def test_tokenize_empty(raw):
    with pytest.raises(EmptyQueryError):
        tokenize(raw)


@pytest.mark.parametrize("a, b, d", [
    ("busget", "budget", 1), ("accoint", "account", 1), ("meeing", "meeting", 1),
    ("requeriments", "requirements", 2), ("gouvernement", "government", 2),
    ("kitten", "sitting", 3), ("", "abc", 3), ("same", "same", 0),
])
def test_levenshtein_known(a, b, d):
    assert levenshtein(a, b) == d


_short = st.text(alphabet="abcde", max_size=8)


@given(_short, _short)
def test_levenshtein_matches_reference(a, b):
    assert levenshtein(a, b) == _dp_levenshtein(a, b)


@given(_short, _short, st.integers(0, 3))
def test_bounded_levenshtein(a, b, k):
    exact = _dp_levenshtein(a, b)
    assert levenshtein(a, b, k) == (exact if exact <= k else k + 1)


@given(_short, _short)
def test_edit_relation_is_symmetric(a, b):
    assert within_edit_distance(a, b) == within_edit_distance(b, a)


def test_length_gate_and_stopwords():
    assert not within_edit_distance("meet", "meat")
    assert within_edit_distance("meets", "meats")
    assert not within_edit_distance("there", "where")  # both would pass otherwise


def test_expand_budget_row():
    x = expand("budget", ["budgets", "budge", "busget", "budget", "gadgetry"])
    assert {"budgets", "budge", "busget"} <= x.terms
    assert "budget" in x.terms
    assert "gadgetry" not in x.terms  # 3+ from budget and budgets


def test_expand_is_vocabulary_restricted():
    x = expand("meeting", ["meet", "unrelated"])
    assert x.terms == {"meet"}
    assert not x.in_vocabulary


def test_stem_closure():
    vocab = Vocabulary(["account", "accounts", "accounted", "accounting"])
    fam = {"account", "accounts", "accounted", "accounting"}
    for w in fam:
        assert fam <= expand(w, vocab).terms | {w}


def test_stem_side_is_porter():
    words = (DATA / "table2_vocabulary.txt").read_text().split()
    vocab = Vocabulary(words)
    for w in words:
        expected = {v for v in words if stem(v) == stem(w)} - {w}
        assert expand(w, vocab).stem_variants == expected


def test_expand_query_always_keeps_word():
    q = expand_query(tokenize("budget netting"), Vocabulary(["budgets"]))
    assert q.variants["budget"] == {"budget", "budgets"}
    assert q.variants["netting"] == {"netting"}
    assert q.matching_words("budgets") == 1
    assert q.satisfied_by({"budgets", "netting"})
    assert not q.satisfied_by({"budgets"})


def test_expansion_disabled():
    q = expand_query(tokenize("budget"), Vocabulary(["budgets"]), enabled=False)
    assert q.all_terms() == {"budget"}


def test_vocabulary_items_sorted():
    v = Vocabulary(["b", "a"])
    v.add("c", stem="custom")
    assert v.items() == [("a", "a"), ("b", "b"), ("c", "custom")]
    assert len(v) == 3 and "c" in v
