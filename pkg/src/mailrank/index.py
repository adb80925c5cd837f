"""Inverted index over thread-node documents, plus per-sender term profiles.

Weights are ``tf * log10(N / df)`` at two granularities: node documents
(N = number of indexed nodes) and senders (each sender's emails pooled
into one pseudo-document, N = number of senders).
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .queryexp import ExpandedQuery, Vocabulary
from .tokens import terms

log = logging.getLogger(__name__)


class IndexConsistencyError(RuntimeError):
    pass


@dataclass
class SenderProfile:
    sender: str
    term_freq: Counter = field(default_factory=Counter)
    email_count: int = 0


def _tf_idf(tf: int, df: int, n: int) -> float:
    if tf == 0:
        return 0.0
    if df == 0:
        raise IndexConsistencyError("term has tf > 0 but df = 0")
    return tf * math.log10(n / df)


def cosine(a: dict[str, float], b: dict[str, float],
           norm_a: float | None = None, norm_b: float | None = None) -> float:
    """Cosine similarity of sparse vectors; 0 when either norm is 0.

    Explicit norms let callers divide by a full-vector magnitude while
    passing only the components that overlap the other vector.
    """
    if norm_a is None:
        norm_a = math.sqrt(sum(v * v for v in a.values()))
    if norm_b is None:
        norm_b = math.sqrt(sum(v * v for v in b.values()))
    if norm_a == 0 or norm_b == 0:
        return 0.0
    if len(a) > len(b):
        a, b = b, a
    dot = sum(v * b.get(k, 0.0) for k, v in a.items())
    return dot / (norm_a * norm_b)


class IndexStore:
    def __init__(self):
        self.postings: dict[str, dict[int, int]] = {}
        self.doc_lengths: dict[int, int] = {}
        self.senders: dict[str, SenderProfile] = {}
        self.sender_df: Counter = Counter()
        self.vocabulary = Vocabulary()
        self._doc_norms: dict[int, float] | None = None
        self._sender_norms: dict[str, float] | None = None

    # -- documents ------------------------------------------------------------

    @property
    def total_docs(self) -> int:
        return len(self.doc_lengths)

    def doc_freq(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def index_document(self, doc_id: int, text: str) -> bool:
        if doc_id in self.doc_lengths:
            log.warning("document %s already indexed; ignoring", doc_id)
            return False
        toks = terms(text)
        self.doc_lengths[doc_id] = len(toks)
        for term, tf in Counter(toks).items():
            self.postings.setdefault(term, {})[doc_id] = tf
            self.vocabulary.add(term)
        self._doc_norms = None
        return True

    def add_vocabulary(self, toks: Iterable[str]) -> None:
        for t in toks:
            self.vocabulary.add(t)

    def tf(self, term: str, doc_id: int) -> int:
        return self.postings.get(term, {}).get(doc_id, 0)

    def idf(self, term: str) -> float:
        df = self.doc_freq(term)
        return math.log10(self.total_docs / df) if df else 0.0

    def tf_idf(self, term: str, doc_id: int) -> float:
        return _tf_idf(self.tf(term, doc_id), self.doc_freq(term), self.total_docs)

    def doc_vector(self, doc_id: int, universe: Iterable[str]) -> dict[str, float]:
        return {t: self.tf_idf(t, doc_id) for t in universe}

    def doc_norm(self, doc_id: int) -> float:
        if self._doc_norms is None:
            self._doc_norms = self._compute_doc_norms()
        return self._doc_norms.get(doc_id, 0.0)

    def _compute_doc_norms(self) -> dict[int, float]:
        n = self.total_docs
        sq: dict[int, float] = dict.fromkeys(self.doc_lengths, 0.0)
        for plist in self.postings.values():
            idf = math.log10(n / len(plist))
            if idf == 0:
                continue
            for doc_id, tf in plist.items():
                sq[doc_id] += (tf * idf) ** 2
        return {d: math.sqrt(v) for d, v in sq.items()}

    def retrieve_docs(self, expanded: ExpandedQuery) -> set[int]:
        """Documents holding a variant of every original query word."""
        result: set[int] | None = None
        for variants in expanded.variants.values():
            hits: set[int] = set()
            for v in variants:
                hits.update(self.postings.get(v, ()))
            result = hits if result is None else result & hits
            if not result:
                return set()
        return result or set()

    # -- senders --------------------------------------------------------------

    @property
    def total_senders(self) -> int:
        return len(self.senders)

    def add_sender_text(self, sender: str, toks: Iterable[str]) -> None:
        profile = self.senders.get(sender)
        if profile is None:
            profile = self.senders[sender] = SenderProfile(sender)
        before = set(profile.term_freq)
        profile.term_freq.update(toks)
        profile.email_count += 1
        for t in set(profile.term_freq) - before:
            self.sender_df[t] += 1
        self._sender_norms = None

    def sender_idf(self, term: str) -> float:
        df = self.sender_df.get(term, 0)
        return math.log10(self.total_senders / df) if df else 0.0

    def sender_tf_idf(self, sender: str, term: str) -> float:
        profile = self.senders.get(sender)
        if profile is None:
            return 0.0
        return _tf_idf(profile.term_freq.get(term, 0), self.sender_df.get(term, 0), self.total_senders)

    def sender_vector(self, sender: str, universe: Iterable[str]) -> dict[str, float]:
        return {t: self.sender_tf_idf(sender, t) for t in universe}

    def sender_norm(self, sender: str) -> float:
        if self._sender_norms is None:
            n = self.total_senders
            self._sender_norms = {}
            for s, profile in self.senders.items():
                total = 0.0
                for t, tf in profile.term_freq.items():
                    total += (tf * math.log10(n / self.sender_df[t])) ** 2
                self._sender_norms[s] = math.sqrt(total)
        return self._sender_norms.get(sender, 0.0)

    # -- queries --------------------------------------------------------------

    def query_vector(self, expanded: ExpandedQuery, granularity: str = "doc") -> dict[str, float]:
        """TF-IDF query vector over the expanded variant terms.

        A variant's query tf is the number of original words accepting it.
        """
        idf = self.idf if granularity == "doc" else self.sender_idf
        vec = {}
        for term in sorted(expanded.all_terms()):
            w = expanded.matching_words(term) * idf(term)
            if w:
                vec[term] = w
        return vec

    # -- persistence ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            # flat [doc, tf, doc, tf, ...] lists keep the file quick to decode
            "postings": {t: [x for item in p.items() for x in item] for t, p in self.postings.items()},
            "doc_lengths": [x for item in self.doc_lengths.items() for x in item],
            "doc_norms": [self.doc_norm(d) for d in self.doc_lengths],
            "senders": {
                s: {"term_freq": dict(p.term_freq), "email_count": p.email_count}
                for s, p in self.senders.items()
            },
            "vocabulary": [[t, st] for t, st in self.vocabulary.items()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> IndexStore:
        idx = cls()
        idx.postings = {t: dict(zip(p[::2], p[1::2])) for t, p in data["postings"].items()}
        lengths = data["doc_lengths"]
        idx.doc_lengths = dict(zip(lengths[::2], lengths[1::2]))
        idx._doc_norms = dict(zip(idx.doc_lengths, data["doc_norms"]))
        for s, rec in data["senders"].items():
            idx.senders[s] = SenderProfile(s, Counter(rec["term_freq"]), rec["email_count"])
            idx.sender_df.update(rec["term_freq"].keys())
        for t, st in data["vocabulary"]:
            idx.vocabulary.add(t, st)
        return idx
