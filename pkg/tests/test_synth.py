from mailrank.corpus import parse_email
from mailrank.synth import large_corpus, planted_corpus


def test_large_corpus_parses_and_is_seeded():
    a = large_corpus(40, seed=3)
    assert a == large_corpus(40, seed=3)
    assert len(a) == 40
    for path, text in a.items():
        parse_email(text, path)


def test_planted_corpus_judgments_point_at_real_emails():
    files, queries, qrels = planted_corpus(n_topics=3, per_topic=10, n_noise=20, seed=1)
    ids = {parse_email(text, path).email_id for path, text in files.items()}
    assert [q for q, _ in queries] == ["T01", "T02", "T03"]
    assert all(eid in ids for _, eid, _ in qrels)
    for qid, _ in queries:
        assert max(g for q, _, g in qrels if q == qid) == 3
