import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mailrank.index import IndexConsistencyError, IndexStore, _tf_idf, cosine
from mailrank.mailbox import Mailbox
from mailrank.queryexp import expand_query, tokenize
from mailrank.synth import random_text


def _store(*texts):
    idx = IndexStore()
    for i, t in enumerate(texts):
        idx.index_document(i, t)
    return idx


def test_first_occurrence_df():
    idx = _store("master netting agreement")
    assert idx.doc_freq("netting") == 1
    assert idx.total_docs == 1


def test_double_index_is_a_noop(caplog):
    idx = _store("alpha beta")
    assert idx.index_document(0, "gamma gamma") is False
    assert idx.doc_freq("gamma") == 0
    assert idx.tf("alpha", 0) == 1
    assert "already indexed" in caplog.text


def test_df_counts_over_fixture():
    idx = _store("credit memo", "credit limit", "weather window")
    assert (idx.doc_freq("credit"), idx.total_docs) == (2, 3)


def test_tf_idf_values():
    idx = _store("swap swap swap", "swap", "other", "words")
    assert idx.tf_idf("swap", 0) == pytest.approx(3 * math.log10(2), rel=1e-12)
    assert idx.tf_idf("swap", 2) == 0
    every = _store("x1 common", "x2 common")
    assert every.tf_idf("common", 0) == 0


def test_df_zero_with_tf_is_inconsistent():
    with pytest.raises(IndexConsistencyError):
        _tf_idf(2, 0, 5)


@given(st.integers(1, 50), st.integers(1, 50), st.integers(2, 100))
def test_tf_idf_monotone(tf, df, n):
    df = min(df, n)
    assert _tf_idf(tf + 1, df, n) >= _tf_idf(tf, df, n)
    if df < n:
        assert _tf_idf(tf, df + 1, n) <= _tf_idf(tf, df, n)


@pytest.mark.parametrize("a, b, expected", [
    ({"x": 1.0, "y": 1.0}, {"x": 1.0}, 1 / math.sqrt(2)),
    ({"x": 2.0}, {"x": 2.0}, 1.0),
    ({"x": 1.0}, {"y": 1.0}, 0.0),
    ({}, {"y": 1.0}, 0.0),
])
def test_cosine(a, b, expected):
    assert cosine(a, b) == pytest.approx(expected, abs=1e-12)


def test_retrieve_docs_and_semantics():
    idx = _store("budget review today", "budgets only", "review only", "nothing here")
    q = expand_query(tokenize("budget"), idx.vocabulary)
    assert idx.retrieve_docs(q) == {0, 1}
    q2 = expand_query(tokenize("budget review"), idx.vocabulary)
    assert idx.retrieve_docs(q2) == {0}
    q3 = expand_query(tokenize("review nothing"), idx.vocabulary)
    assert idx.retrieve_docs(q3) == set()


def test_sender_weights():
    idx = IndexStore()
    idx.add_sender_text("a@x", ["hedge"] * 5 + ["desk"])
    idx.add_sender_text("b@x", ["desk"])
    assert idx.sender_tf_idf("a@x", "hedge") == pytest.approx(5 * math.log10(2))
    assert idx.sender_tf_idf("a@x", "desk") == 0
    assert idx.sender_vector("nobody", ["hedge"]) == {"hedge": 0.0}
    solo = IndexStore()
    solo.add_sender_text("a@x", ["hedge"])
    assert solo.sender_tf_idf("a@x", "hedge") == 0


def test_doc_vector_zero_when_no_terms():
    idx = _store("alpha beta", "gamma")
    assert idx.doc_vector(0, ["zeta"]) == {"zeta": 0.0}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_postings_consistent_with_direct_counts(seed):
    rng = random.Random(seed)
    texts = [random_text(rng, rng.randint(0, 10)) for _ in range(rng.randint(1, 12))]
    idx = _store(*texts)
    for term, plist in idx.postings.items():
        direct = sum(1 for t in texts if term in t.split())
        assert len(plist) == direct == idx.doc_freq(term)
    for i, t in enumerate(texts):
        expected = math.sqrt(sum(
            (t.split().count(term) * math.log10(len(texts) / idx.doc_freq(term))) ** 2
            for term in set(t.split())))
        assert idx.doc_norm(i) == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_total_docs_equals_node_count(chain):
    mb = Mailbox()
    mb.add_all(chain)
    assert mb.index.total_docs == len(mb.threads.nodes) == 3


def test_round_trip():
    idx = _store("alpha beta beta", "beta gamma")
    idx.add_sender_text("a@x", ["alpha"])
    again = IndexStore.from_dict(idx.to_dict())
    assert again.postings == idx.postings
    assert again.doc_norm(0) == idx.doc_norm(0)
    assert again.sender_tf_idf("a@x", "alpha") == idx.sender_tf_idf("a@x", "alpha")
    assert again.vocabulary.items() == idx.vocabulary.items()
