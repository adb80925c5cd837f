"""Brute-force reference scorer used by the acceptance suite.

Works from raw material only: the text of every stored thread node, each
email's node chain, senders and thread subjects. Term statistics are
recounted here from scratch with plain loops; nothing is read from the
engine's index.
"""

import math
import re

from mailrank.tokens import STOPWORDS

_TOKEN = re.compile(r"[a-z0-9]+")


def toks(text, keep_stopwords=False):
    out = []
    for t in _TOKEN.findall(text.lower()):
        if t.isdigit() and len(t) == 1:
            continue
        if not keep_stopwords and t in STOPWORDS:
            continue
        out.append(t)
    return out


def count(term, tokens):
    n = 0
    for t in tokens:
        if t == term:
            n += 1
    return n


def weight(tf, df, n):
    if tf == 0 or df == 0:
        return 0.0
    return tf * math.log10(n / df)


def cos(doc_tokens, all_docs, qweights):
    """Cosine between one pseudo-document and the query, full doc norm."""
    n = len(all_docs)
    dot = 0.0
    norm_sq = 0.0
    for term in set(doc_tokens):
        df = sum(1 for d in all_docs if term in d)
        w = weight(count(term, doc_tokens), df, n)
        norm_sq += w * w
        if term in qweights:
            dot += w * qweights[term]
    q_sq = sum(w * w for w in qweights.values())
    if norm_sq == 0 or q_sq == 0:
        return 0.0
    return dot / (math.sqrt(norm_sq) * math.sqrt(q_sq))


def query_weights(variants, all_docs):
    n = len(all_docs)
    out = {}
    terms = set()
    for vs in variants.values():
        terms |= set(vs)
    for term in terms:
        qtf = sum(1 for vs in variants.values() if term in vs)
        df = sum(1 for d in all_docs if term in d)
        w = weight(qtf, df, n)
        if w:
            out[term] = w
    return out


def score_all(node_texts, node_parent, email_chains, email_sender, email_main_subject,
              email_thread_subject, variants):
    """Scores for every retrieved email.

    node_texts:   {node_id: text}
    node_parent:  {node_id: parent node_id or None}
    email_chains: {email_id: [node_id at level 0, level 1, ...]}
    email_sender: {email_id: sender}
    email_main_subject: {email_id: (main body text, normalized subject)}
    email_thread_subject: {email_id: subject of the email's thread}
    variants:     {query word: set of accepted terms}

    Returns {email_id: (t, c, s, score)} over the retrieved set.
    """
    node_ids = sorted(node_texts)
    node_toks = {n: toks(node_texts[n]) for n in node_ids}
    doc_sets = [set(node_toks[n]) for n in node_ids]

    # retrieval: a node matches when each word has a variant in it
    def satisfies(tokset):
        return all(any(v in tokset for v in vs) for vs in variants.values())

    matched = {n for n in node_ids if satisfies(set(node_toks[n]))}

    def under_match(n):
        while n is not None:
            if n in matched:
                return True
            n = node_parent[n]
        return False

    retrieved = set()
    for eid, chain in email_chains.items():
        if under_match(chain[0]):
            retrieved.add(eid)
        if satisfies(set(toks(email_thread_subject[eid], keep_stopwords=True))):
            retrieved.add(eid)

    # sender pseudo-documents
    sender_toks = {}
    for eid in sorted(email_chains):
        body, subject = email_main_subject[eid]
        sender_toks.setdefault(email_sender[eid], []).extend(toks(body) + toks(subject))
    sender_sets = [set(v) for v in sender_toks.values()]

    q_doc = query_weights(variants, doc_sets)
    q_sender = query_weights(variants, sender_sets)

    out = {}
    for eid in retrieved:
        t = 1 if satisfies(set(toks(email_thread_subject[eid], keep_stopwords=True))) else 0
        c = 0.0
        for level, n in enumerate(email_chains[eid]):
            c += 0.5 ** level * cos(node_toks[n], doc_sets, q_doc)
        s = cos(sender_toks[email_sender[eid]], sender_sets, q_sender)
        out[eid] = (t, c, s, s * (c + t))
    return out


def from_mailbox(mailbox, variants):
    """Pull the raw material out of a mailbox and score it."""
    store = mailbox.threads
    return score_all(
        node_texts={n.node_id: n.doc.text for n in store.nodes},
        node_parent={n.node_id: (n.parent.node_id if n.parent else None) for n in store.nodes},
        email_chains={eid: list(nids) for eid, nids in store.email_nodes.items()},
        email_sender={eid: e.sender for eid, e in mailbox.emails.items()},
        email_main_subject={eid: (e.main_body.text, e.norm_subject) for eid, e in mailbox.emails.items()},
        email_thread_subject={eid: store.thread_of(eid).subject for eid in mailbox.emails},
        variants={w: set(vs) for w, vs in variants.items()},
    )
