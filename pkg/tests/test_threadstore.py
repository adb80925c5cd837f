import random

from hypothesis import given, settings
from hypothesis import strategies as st

from mailrank.corpus import fingerprint, parse_email
from mailrank.queryexp import expand_query, tokenize
from mailrank.synth import render, reply_forest
from mailrank.threadstore import Case, ThreadStore, canonical_forest, jaccard, shingles

from conftest import SUBJ, TEXT_1, TEXT_2, TEXT_B, email


def tree(node):
    """(text, [children]) nested form for readable node-for-node comparison."""
    return (node.doc.text, [tree(c) for c in node.children])


def test_first_email_creates_thread(chain):
    a, _, _ = chain
    store = ThreadStore()
    out = store.add_email(a)
    assert out.case is Case.NEW_THREAD
    assert out.inserted_node_ids == [0]
    (t,) = store.threads.values()
    assert t.subject == "revised daily notice"
    assert [tree(r) for r in t.roots] == [(TEXT_2, [])]


def test_new_thread_chain_is_eldest_first(chain):
    _, _, e = chain
    store = ThreadStore()
    out = store.add_email(e)
    assert out.case is Case.NEW_THREAD
    (t,) = store.threads.values()
    assert [tree(r) for r in t.roots] == [(TEXT_2, [(TEXT_1, [(TEXT_B, [])])])]
    assert store.nodes[2].main_body_of == ["<e@x>"]


def test_case1_all_quotations_matched(chain):
    a, b, e = chain
    store = ThreadStore()
    store.add_email(a)
    store.add_email(b)
    out = store.add_email(e)
    assert out.case is Case.ALL_QUOTATIONS_MATCHED
    assert out.path.length == 2
    assert [store.nodes[n].doc.text for n in out.inserted_node_ids] == [TEXT_B]
    assert store.nodes[out.inserted_node_ids[0]].parent.doc.text == TEXT_1


def test_case2_some_quotations_matched(chain):
    a, _, e = chain
    store = ThreadStore()
    store.add_email(a)
    out = store.add_email(e)
    assert out.case is Case.SOME_QUOTATIONS_MATCHED
    assert out.path.length == 1
    assert [store.nodes[n].doc.text for n in out.inserted_node_ids] == [TEXT_1, TEXT_B]
    (t,) = store.threads.values()
    assert [tree(r) for r in t.roots] == [(TEXT_2, [(TEXT_1, [(TEXT_B, [])])])]


def test_case3_all_documents_matched_for_late_email(chain):
    a, b, e = chain
    store = ThreadStore()
    store.add_email(a)
    store.add_email(e)
    out = store.add_email(b)  # arrives late; its content is already quoted by e
    assert out.case is Case.ALL_DOCUMENTS_MATCHED
    assert out.inserted_node_ids == []
    assert len(store.nodes) == 3
    assert "<b@x>" in store.nodes[1].main_body_of


def test_case4_no_document_matched_spawns_second_thread(chain):
    a, _, _ = chain
    store = ThreadStore()
    store.add_email(a)
    other = email("z@x", "pat@enron.com", "RE: " + SUBJ, "Unrelated new topic about parking.",
                  [("pat@enron.com", SUBJ, "Parking garage closes Friday.")])
    out = store.add_email(other)
    assert out.case is Case.NO_DOCUMENT_MATCHED
    assert len(store.threads) == 2
    found = store.find_threads_by_subject("revised daily notice")
    assert [t.thread_id for t in found] == [0, 1]
    assert store.find_threads_by_subject("nothing") == []


def test_readding_is_idempotent(chain):
    store = ThreadStore()
    for m in chain:
        store.add_email(m)
    before = canonical_forest(store)
    for m in chain:
        out = store.add_email(m)
        assert out.case is Case.ALL_DOCUMENTS_MATCHED
    assert canonical_forest(store) == before
    assert len(store.nodes) == 3


def test_fuzzy_match_tolerates_small_rewrap():
    long = " ".join(f"word{i}" for i in range(60))
    a = email("a@x", "kim@enron.com", "Plan", long)
    tweaked = long.replace("word30", "word30,")
    b = email("b@x", "lee@enron.com", "RE: Plan", "reply here", [("kim@enron.com", "Plan", tweaked)])
    store = ThreadStore()
    store.add_email(a)
    out = store.add_email(b)
    assert out.case is Case.ALL_QUOTATIONS_MATCHED


def test_fuzzy_threshold_rejects_different_text():
    assert jaccard(shingles("a b c d"), shingles("a b c e")) < 0.9
    assert jaccard(frozenset(), frozenset()) == 1.0


def test_ties_go_to_oldest_thread():
    store = ThreadStore()
    store.add_email(email("a@x", "p@x", "S", "alpha text"))
    store.add_email(email("b@x", "p@x", "S", "beta text"))
    reply = email("c@x", "p@x", "RE: S", "reply", [("p@x", "S", "gamma text")])
    out = store.add_email(reply)
    assert out.case is Case.NO_DOCUMENT_MATCHED
    both = email("d@x", "p@x", "RE: S", "again", [("p@x", "S", "beta text")])
    assert store.add_email(both).thread_id == 1


def test_retrieve_subject_and_descendants():
    store = ThreadStore()
    root = email("r@x", "p@x", "Conference call rescheduled", "root text")
    c1 = email("c1@x", "p@x", "RE: Conference call rescheduled", "child one", [("p@x", "s", "root text")])
    c2 = email("c2@x", "p@x", "RE: Conference call rescheduled", "child two", [("p@x", "s", "root text")])
    g = email("g@x", "p@x", "RE: Conference call rescheduled", "grandchild",
              [("p@x", "s", "child one"), ("p@x", "s", "root text")])
    mid_parent = email("m@x", "p@x", "Other", "top")
    for m in (root, c1, c2, g, mid_parent):
        store.add_email(m)
    q = expand_query(tokenize("conference call"), None)
    t_r, desc = store.retrieve(q, [0])
    assert [t.subject for t in t_r] == ["conference call rescheduled"]
    # manual traversal: root has children c1, c2 and grandchild g
    assert sorted(n.doc.text for n in desc[0]) == ["child one", "child two", "grandchild"]
    assert store.retrieve(expand_query(tokenize("absent"), None), [])[0] == []


def test_persistence_round_trip(chain):
    store = ThreadStore()
    for m in chain:
        store.add_email(m)
    again = ThreadStore.from_dict(store.to_dict())
    assert canonical_forest(again) == canonical_forest(store)
    assert again.email_nodes == store.email_nodes
    assert again.add_email(chain[2]).case is Case.ALL_DOCUMENTS_MATCHED


def _check_invariants(store, emails):
    for t in store.threads.values():
        seen = [n.fingerprint for n in t.nodes()]
        assert len(seen) == len(set(seen))
    by_id = {e.email_id: e for e in emails}
    for n in store.nodes:
        if n.parent is None:
            continue
        # some contributing email quoted the parent one level above this node
        ok = False
        for eid, nids in store.email_nodes.items():
            if n.node_id in nids:
                lvl = nids.index(n.node_id)
                docs = by_id[eid].documents
                if lvl + 1 < len(docs) and fingerprint(docs[lvl + 1].text) == n.parent.fingerprint:
                    ok = True
        assert ok


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 20))
def test_random_forests_keep_invariants(seed, n):
    rng = random.Random(seed)
    msgs = reply_forest(rng, n)
    emails = [parse_email(render(m)) for m in msgs]
    store = ThreadStore()
    for e in emails:
        store.add_email(e)
    _check_invariants(store, emails)
    assert len(store.nodes) == n
