"""Query tokenization and expansion with Porter stem families and misspellings."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from . import porter
from .tokens import STOPWORDS, terms

__all__ = [
    "EmptyQueryError",
    "Query",
    "Expansion",
    "ExpandedQuery",
    "Vocabulary",
    "tokenize",
    "levenshtein",
    "within_edit_distance",
    "expand",
    "expand_query",
]

MAX_EDIT_DISTANCE = 2
MIN_EDIT_LENGTH = 5


class EmptyQueryError(ValueError):
    pass


@dataclass(frozen=True)
class Query:
    raw: str
    words: tuple[str, ...]


@dataclass(frozen=True)
class Expansion:
    word: str
    stem_variants: frozenset[str]
    edit_variants: frozenset[str]
    in_vocabulary: bool

    @property
    def terms(self) -> frozenset[str]:
        out = self.stem_variants | self.edit_variants
        if self.in_vocabulary:
            out = out | {self.word}
        return out


@dataclass(frozen=True)
class ExpandedQuery:
    original: Query
    variants: dict[str, frozenset[str]] = field(default_factory=dict)

    def all_terms(self) -> set[str]:
        out: set[str] = set()
        for vs in self.variants.values():
            out |= vs
        return out

    def matching_words(self, term: str) -> int:
        """How many original words accept ``term`` as a variant."""
        return sum(1 for vs in self.variants.values() if term in vs)

    def satisfied_by(self, tokens: set[str]) -> bool:
        """True when every original word has a variant among ``tokens``."""
        return all(not vs.isdisjoint(tokens) for vs in self.variants.values())


def tokenize(raw: str) -> Query:
    words = tuple(dict.fromkeys(terms(raw)))
    if not words:
        raise EmptyQueryError(f"empty query: {raw!r}")
    return Query(raw=raw, words=words)


def levenshtein(a: str, b: str, max_distance: int | None = None) -> int:
    """Edit distance with unit insert/delete/substitute costs.

    With ``max_distance`` set, returns ``max_distance + 1`` as soon as the
    distance is known to exceed it.
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if max_distance is not None and len(a) - len(b) > max_distance:
        return max_distance + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if max_distance is not None and min(cur) > max_distance:
            return max_distance + 1
        prev = cur
    return prev[-1]


def within_edit_distance(
    a: str,
    b: str,
    max_distance: int = MAX_EDIT_DISTANCE,
    min_length: int = MIN_EDIT_LENGTH,
) -> bool:
    if min(len(a), len(b)) < min_length:
        return False
    if a in STOPWORDS or b in STOPWORDS:
        return False
    return levenshtein(a, b, max_distance) <= max_distance


class Vocabulary:
    """Term set with a stem index and length buckets for edit-distance lookups."""

    def __init__(self, terms: Iterable[str] = ()):
        self._terms: set[str] = set()
        self._stems: dict[str, str] = {}
        self._by_stem: dict[str, set[str]] = defaultdict(set)
        self._by_length: dict[int, set[str]] = defaultdict(set)
        for t in terms:
            self.add(t)

    def add(self, term: str, stem: str | None = None) -> None:
        if term in self._terms:
            return
        self._terms.add(term)
        self._stems[term] = stem = stem or porter.stem(term)
        self._by_stem[stem].add(term)
        self._by_length[len(term)].add(term)

    def __contains__(self, term: object) -> bool:
        return term in self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def items(self) -> list[tuple[str, str]]:
        """(term, stem) pairs, sorted."""
        return sorted(self._stems.items())

    def stem_family(self, word: str) -> set[str]:
        return set(self._by_stem.get(porter.stem(word), ()))

    def near(self, word: str, max_distance: int = MAX_EDIT_DISTANCE,
             min_length: int = MIN_EDIT_LENGTH) -> set[str]:
        out = set()
        for n in range(len(word) - max_distance, len(word) + max_distance + 1):
            for cand in self._by_length.get(n, ()):
                if within_edit_distance(word, cand, max_distance, min_length):
                    out.add(cand)
        return out


def expand(word: str, vocabulary: Vocabulary | Iterable[str],
           max_distance: int = MAX_EDIT_DISTANCE) -> Expansion:
    """Expand ``word`` into vocabulary terms.

    Stem variants share the word's Porter stem. Edit variants lie within
    ``max_distance`` of the word or of one of its in-vocabulary stem
    variants, and are not themselves stem variants.
    """
    if not isinstance(vocabulary, Vocabulary):
        vocabulary = Vocabulary(vocabulary)
    family = vocabulary.stem_family(word) - {word}
    anchors = family | {word}
    near: set[str] = set()
    for anchor in anchors:
        near |= vocabulary.near(anchor, max_distance)
    edit = near - anchors
    return Expansion(
        word=word,
        stem_variants=frozenset(family),
        edit_variants=frozenset(edit),
        in_vocabulary=word in vocabulary,
    )


def expand_query(query: Query, vocabulary: Vocabulary | Iterable[str] | None,
                 enabled: bool = True) -> ExpandedQuery:
    """Variant sets per query word. The word itself is always accepted."""
    if vocabulary is not None and not isinstance(vocabulary, Vocabulary):
        vocabulary = Vocabulary(vocabulary)
    variants = {}
    for w in query.words:
        if enabled and vocabulary is not None:
            variants[w] = expand(w, vocabulary).terms | {w}
        else:
            variants[w] = frozenset({w})
    return ExpandedQuery(original=query, variants=variants)
