"""Tokenization shared by the index, sender profiles, subjects and queries."""

from __future__ import annotations

import re

# Kept deliberately small: articles, pronouns, auxiliaries, prepositions.
STOPWORDS = frozenset(
    """
    a an and are as at be been but by do does for from had has have he her
    him his i if in into is it its me my no not of on or our she so than
    that the their them then there these they this those to was we were
    what when which who will with you your
    """.split()
)

_WORD_RE = re.compile(r"[^\W_]+")


def words(text: str) -> list[str]:
    """Casefolded alphanumeric runs, single digits dropped, stopwords kept."""
    out = []
    for tok in _WORD_RE.findall(text.casefold()):
        if tok.isdigit() and len(tok) < 2:
            continue
        out.append(tok)
    return out


def terms(text: str) -> list[str]:
    """Index terms: :func:`words` without stopwords."""
    return [w for w in words(text) if w not in STOPWORDS]
