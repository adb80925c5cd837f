"""Email scoring: subject, content and sender components and their product.

    score = sscore * (cscore + tscore)

``tscore`` is 1 for emails in a thread whose subject holds every query word,
``cscore`` sums level-discounted (0.5 ** level) cosine similarities of an
email's documents, ``sscore`` is the cosine between the sender's pooled
term profile and the query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .index import cosine
from .mailbox import Mailbox
from .queryexp import ExpandedQuery, expand_query, tokenize
from .threadstore import Thread
from .tokens import terms

__all__ = [
    "RetrievedSet",
    "ScoredEmail",
    "RankedList",
    "BASELINES",
    "cosine",
    "score",
    "tscore",
    "cscore",
    "sscore",
    "retrieve",
    "rank",
    "score_retrieved",
    "baseline_rank",
    "expand",
]

LEVEL_DECAY = 0.5


@dataclass
class RetrievedSet:
    emails: set[str] = field(default_factory=set)
    via_subject: set[str] = field(default_factory=set)
    via_content: set[str] = field(default_factory=set)
    threads: list[Thread] = field(default_factory=list)
    indexed_nodes: set[int] = field(default_factory=set)


@dataclass(frozen=True)
class ScoredEmail:
    email_id: str
    t_score: int
    c_score: float
    s_score: float
    score: float
    tie_key: float


def _order_key(s: ScoredEmail):
    return (-s.score, -s.tie_key, s.email_id)


@dataclass
class RankedList:
    items: list[ScoredEmail]
    retrieved: RetrievedSet = field(default_factory=RetrievedSet)
    expanded: ExpandedQuery | None = None

    @classmethod
    def ordered(cls, scored, retrieved=None, expanded=None) -> RankedList:
        return cls(sorted(scored, key=_order_key), retrieved or RetrievedSet(), expanded)

    def email_ids(self) -> list[str]:
        return [s.email_id for s in self.items]

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def score(s_score: float, c_score: float, t_score: float) -> float:
    return s_score * (c_score + t_score)


def expand(mailbox: Mailbox, raw_query: str, enabled: bool = True) -> ExpandedQuery:
    return expand_query(tokenize(raw_query), mailbox.index.vocabulary, enabled=enabled)


def retrieve(mailbox: Mailbox, expanded: ExpandedQuery) -> RetrievedSet:
    store = mailbox.threads
    indexed = mailbox.index.retrieve_docs(expanded)
    t_r, descendants = store.retrieve(expanded, indexed)

    content_nodes = set(indexed)
    for nodes in descendants.values():
        content_nodes.update(n.node_id for n in nodes)
    via_content = set()
    for nid in content_nodes:
        via_content.update(store.nodes[nid].main_body_of)
    via_subject = set()
    for thread in t_r:
        via_subject.update(thread.email_ids)
    return RetrievedSet(
        emails=via_subject | via_content,
        via_subject=via_subject,
        via_content=via_content,
        threads=t_r,
        indexed_nodes=indexed,
    )


def tscore(mailbox: Mailbox, email_id: str, t_r: list[Thread]) -> int:
    tid = mailbox.threads.email_thread.get(email_id)
    return int(any(t.thread_id == tid for t in t_r))


def _doc_sim(mailbox: Mailbox, node_id: int, qvec: dict[str, float], qnorm: float) -> float:
    idx = mailbox.index
    dvec = {t: idx.tf_idf(t, node_id) for t in qvec}
    return cosine(dvec, qvec, idx.doc_norm(node_id), qnorm)


def cscore(mailbox: Mailbox, email_id: str, expanded: ExpandedQuery) -> float:
    qvec = mailbox.index.query_vector(expanded, "doc")
    return _cscore(mailbox, email_id, qvec, _norm(qvec), {})


def _norm(vec: dict[str, float]) -> float:
    return math.sqrt(sum(v * v for v in vec.values()))


def _cscore(mailbox: Mailbox, email_id: str, qvec: dict[str, float], qnorm: float,
            cache: dict[int, float]) -> float:
    total = 0.0
    for level, node in enumerate(mailbox.threads.nodes_of(email_id)):
        sim = cache.get(node.node_id)
        if sim is None:
            sim = cache[node.node_id] = _doc_sim(mailbox, node.node_id, qvec, qnorm)
        total += LEVEL_DECAY ** level * sim
    return total


def sscore(mailbox: Mailbox, sender: str, expanded: ExpandedQuery,
           network_weights: Mapping[str, float] | None = None) -> float:
    """Sender-query cosine at sender granularity.

    ``network_weights`` overrides the sender's components term by term
    (network profile wins where present); the sender norm is adjusted
    accordingly.
    """
    idx = mailbox.index
    if sender not in idx.senders:
        return 0.0
    qvec = idx.query_vector(expanded, "sender")
    svec = idx.sender_vector(sender, qvec)
    norm_sq = idx.sender_norm(sender) ** 2
    if network_weights:
        for term, w in network_weights.items():
            local = idx.sender_tf_idf(sender, term)
            norm_sq += w * w - local * local
            if term in qvec:
                svec[term] = w
    return cosine(svec, qvec, math.sqrt(max(norm_sq, 0.0)), None)


def rank(mailbox: Mailbox, raw_query: str, *, expand_terms: bool = True,
         sscore_epsilon: float = 0.0,
         network: Mapping[str, Mapping[str, float]] | None = None) -> RankedList:
    """Retrieve and score emails for ``raw_query``.

    ``network`` maps sender -> {term: weight} from the expertise server;
    senders absent from it keep their local profile.
    """
    expanded = expand(mailbox, raw_query, expand_terms)
    retrieved = retrieve(mailbox, expanded)
    return score_retrieved(mailbox, expanded, retrieved,
                           sscore_epsilon=sscore_epsilon, network=network)


def score_retrieved(mailbox: Mailbox, expanded: ExpandedQuery, retrieved: RetrievedSet, *,
                    sscore_epsilon: float = 0.0,
                    network: Mapping[str, Mapping[str, float]] | None = None) -> RankedList:
    t_r_ids = {t.thread_id for t in retrieved.threads}
    qvec = mailbox.index.query_vector(expanded, "doc")
    qnorm = _norm(qvec)
    sim_cache: dict[int, float] = {}
    sender_cache: dict[str, float] = {}
    scored = []
    for eid in retrieved.emails:
        email = mailbox.emails[eid]
        t = int(mailbox.threads.email_thread.get(eid) in t_r_ids)
        c = _cscore(mailbox, eid, qvec, qnorm, sim_cache)
        if email.sender not in sender_cache:
            weights = (network or {}).get(email.sender)
            sender_cache[email.sender] = sscore(mailbox, email.sender, expanded, weights)
        s = sender_cache[email.sender] + sscore_epsilon
        scored.append(ScoredEmail(eid, t, c, s, score(s, c, t), email.timestamp))
    return RankedList.ordered(scored, retrieved, expanded)


# --- baselines ---------------------------------------------------------------

BASELINES = ("date", "thread_date", "subject_alpha", "sender_alpha", "clues")


def _plain(mailbox: Mailbox, ordered_ids: list[str], retrieved, expanded,
           scores: list[float] | None = None) -> RankedList:
    n = len(ordered_ids)
    items = [
        ScoredEmail(eid, 0, 0.0, 0.0,
                    float(n - i) if scores is None else scores[i],
                    mailbox.emails[eid].timestamp)
        for i, eid in enumerate(ordered_ids)
    ]
    return RankedList(items, retrieved, expanded)


def _by_date(mailbox: Mailbox, ids) -> list[str]:
    return sorted(ids, key=lambda e: (-mailbox.emails[e].timestamp, e))


def clue_ratio(text: str, expanded: ExpandedQuery, clue_terms: set[str]) -> float:
    """Share of query-word occurrences that sit in a paragraph with a clue word."""
    accepted = expanded.all_terms()
    total = near_clue = 0
    for block in _paragraphs(text):
        toks = terms(block)
        hits = sum(1 for t in toks if t in accepted)
        total += hits
        if clue_terms.intersection(toks):
            near_clue += hits
    return near_clue / total if total else 0.0


def _paragraphs(text: str) -> list[str]:
    blocks, cur = [], []
    for line in text.split("\n"):
        if line.strip():
            cur.append(line)
        elif cur:
            blocks.append("\n".join(cur))
            cur = []
    if cur:
        blocks.append("\n".join(cur))
    return blocks


def baseline_rank(method: str, retrieved: RetrievedSet, mailbox: Mailbox,
                  expanded: ExpandedQuery | None = None,
                  clue: str | None = None) -> RankedList:
    if method not in BASELINES:
        raise ValueError(f"unknown ranking method {method!r}; choose from {', '.join(BASELINES)}")
    ids = list(retrieved.emails)
    emails = mailbox.emails

    if method == "date":
        return _plain(mailbox, _by_date(mailbox, ids), retrieved, expanded)

    if method == "thread_date":
        groups: dict[int, list[str]] = {}
        for eid in ids:
            groups.setdefault(mailbox.threads.email_thread.get(eid, -1), []).append(eid)
        newest = {tid: max(emails[e].timestamp for e in g) for tid, g in groups.items()}
        ordered = []
        for tid in sorted(groups, key=lambda t: (-newest[t], t)):
            ordered.extend(_by_date(mailbox, groups[tid]))
        return _plain(mailbox, ordered, retrieved, expanded)

    if method in ("subject_alpha", "sender_alpha"):
        field_of = (lambda e: e.norm_subject) if method == "subject_alpha" else (lambda e: e.sender)
        # descending text, then newest first, then id
        ordered = _by_date(mailbox, ids)
        ordered.sort(key=lambda e: field_of(emails[e]), reverse=True)
        return _plain(mailbox, ordered, retrieved, expanded)

    # clues
    clue_terms = set(terms(clue or ""))
    ratios = {}
    for eid in ids:
        ratios[eid] = (clue_ratio(emails[eid].main_body.text, expanded, clue_terms)
                       if expanded is not None and clue_terms else 0.0)
    ordered = sorted(ids, key=lambda e: (-ratios[e], -emails[e].timestamp, e))
    return _plain(mailbox, ordered, retrieved, expanded, [ratios[e] for e in ordered])
