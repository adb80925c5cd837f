"""Thread trees whose nodes are deduplicated email documents.

Adding an email walks the candidate threads sharing its normalized
subject, finds the longest chain of nodes matching its documents taken
eldest quotation first, and inserts only what is missing.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable

from .corpus import Email, EmailDocument, fingerprint
from .queryexp import ExpandedQuery
from .tokens import words

log = logging.getLogger(__name__)

SHINGLE_SIZE = 3
FUZZY_JACCARD = 0.9


class Case(enum.Enum):
    NEW_THREAD = "NewThread"
    ALL_QUOTATIONS_MATCHED = "AllQuotationsMatched"
    SOME_QUOTATIONS_MATCHED = "SomeQuotationsMatched"
    ALL_DOCUMENTS_MATCHED = "AllDocumentsMatched"
    NO_DOCUMENT_MATCHED = "NoDocumentMatched"


def shingles(fp: str, size: int = SHINGLE_SIZE) -> frozenset[tuple[str, ...]]:
    toks = fp.split()
    if len(toks) < size:
        return frozenset([tuple(toks)]) if toks else frozenset()
    return frozenset(tuple(toks[i:i + size]) for i in range(len(toks) - size + 1))


def jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


@dataclass(eq=False)
class ThreadNode:
    node_id: int
    thread_id: int
    doc: EmailDocument
    parent: ThreadNode | None = None
    children: list[ThreadNode] = field(default_factory=list)
    main_body_of: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._shingles: frozenset | None = None

    @property
    def fingerprint(self) -> str:
        return self.doc.fingerprint

    @property
    def shingles(self) -> frozenset:
        if self._shingles is None:
            self._shingles = shingles(self.doc.fingerprint)
        return self._shingles

    def depth(self) -> int:
        d, node = 0, self.parent
        while node is not None:
            d, node = d + 1, node.parent
        return d

    def descendants(self) -> list[ThreadNode]:
        out, stack = [], list(reversed(self.children))
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    def __repr__(self):
        return f"ThreadNode({self.node_id}, {self.doc.fingerprint[:30]!r})"


@dataclass(eq=False)
class Thread:
    thread_id: int
    subject: str
    roots: list[ThreadNode] = field(default_factory=list)
    email_ids: list[str] = field(default_factory=list)

    def nodes(self) -> list[ThreadNode]:
        out = []
        for root in self.roots:
            out.append(root)
            out.extend(root.descendants())
        return out


@dataclass
class MatchPath:
    nodes: list[ThreadNode] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.nodes)


@dataclass
class AdditionOutcome:
    case: Case
    thread_id: int
    inserted_node_ids: list[int]
    path: MatchPath = field(default_factory=MatchPath)


def _same_content(node: ThreadNode, doc: EmailDocument, doc_shingles: frozenset | None) -> bool:
    if node.fingerprint == doc.fingerprint:
        return True
    if doc_shingles is None:
        return False
    a, b = node.shingles, doc_shingles
    if not a or not b:
        return False
    # Jaccard >= t requires min/max set size >= t.
    if min(len(a), len(b)) < FUZZY_JACCARD * max(len(a), len(b)):
        return False
    return jaccard(a, b) >= FUZZY_JACCARD


class ThreadStore:
    def __init__(self):
        self.threads: dict[int, Thread] = {}
        self.nodes: list[ThreadNode] = []
        self.email_nodes: dict[str, list[int]] = {}
        self.email_thread: dict[str, int] = {}
        self._by_subject: dict[str, list[int]] = {}
        self._fp_index: dict[int, dict[str, list[ThreadNode]]] = {}
        self._subject_words: dict[int, frozenset[str]] = {}

    # -- lookups --------------------------------------------------------------

    def find_threads_by_subject(self, subject: str) -> list[Thread]:
        return [self.threads[t] for t in self._by_subject.get(subject, ())]

    def thread_of(self, email_id: str) -> Thread | None:
        tid = self.email_thread.get(email_id)
        return None if tid is None else self.threads[tid]

    def nodes_of(self, email_id: str) -> list[ThreadNode]:
        """Nodes holding the email's documents, indexed by level."""
        return [self.nodes[n] for n in self.email_nodes.get(email_id, ())]

    def _start_candidates(self, thread: Thread, doc: EmailDocument) -> list[ThreadNode]:
        exact = self._fp_index[thread.thread_id].get(doc.fingerprint, [])
        if exact:
            return list(exact)
        sh = shingles(doc.fingerprint)
        return [n for n in thread.nodes() if _same_content(n, doc, sh)]

    @staticmethod
    def _matching_children(node: ThreadNode, doc: EmailDocument) -> list[ThreadNode]:
        exact = [c for c in node.children if c.fingerprint == doc.fingerprint]
        if exact:
            return exact
        sh = shingles(doc.fingerprint)
        return [c for c in node.children if _same_content(c, doc, sh)]

    def longest_match_path(self, thread: Thread, email: Email) -> MatchPath:
        eldest_first = list(reversed(email.documents))
        best: list[ThreadNode] = []

        def descend(node: ThreadNode, k: int, path: list[ThreadNode]):
            nonlocal best
            path.append(node)
            if len(path) > len(best):
                best = list(path)
            if k + 1 < len(eldest_first):
                for child in self._matching_children(node, eldest_first[k + 1]):
                    descend(child, k + 1, path)
            path.pop()

        for start in self._start_candidates(thread, eldest_first[0]):
            descend(start, 0, [])
            if len(best) == len(eldest_first):
                break
        return MatchPath(best)

    # -- mutation -------------------------------------------------------------

    def _new_node(self, thread: Thread, doc: EmailDocument, parent: ThreadNode | None) -> ThreadNode:
        node = ThreadNode(node_id=len(self.nodes), thread_id=thread.thread_id, doc=doc, parent=parent)
        self.nodes.append(node)
        if parent is None:
            thread.roots.append(node)
        else:
            parent.children.append(node)
        self._fp_index[thread.thread_id].setdefault(doc.fingerprint, []).append(node)
        return node

    def _new_thread(self, subject: str) -> Thread:
        thread = Thread(thread_id=len(self.threads), subject=subject)
        self.threads[thread.thread_id] = thread
        self._by_subject.setdefault(subject, []).append(thread.thread_id)
        self._fp_index[thread.thread_id] = {}
        self._subject_words[thread.thread_id] = frozenset(words(subject))
        return thread

    def _record(self, email: Email, thread: Thread, level_nodes: list[ThreadNode]) -> None:
        self.email_nodes[email.email_id] = [n.node_id for n in level_nodes]
        main = level_nodes[0]
        if email.email_id not in main.main_body_of:
            main.main_body_of.append(email.email_id)
        if email.email_id not in self.email_thread:
            thread.email_ids.append(email.email_id)
        self.email_thread[email.email_id] = thread.thread_id

    def _insert_chain(self, thread: Thread, docs_eldest_first: list[EmailDocument],
                      parent: ThreadNode | None) -> list[ThreadNode]:
        inserted = []
        for doc in docs_eldest_first:
            parent = self._new_node(thread, doc, parent)
            inserted.append(parent)
        return inserted

    def add_email(self, email: Email) -> AdditionOutcome:
        eldest_first = list(reversed(email.documents))
        n_e = len(eldest_first)
        candidates = self.find_threads_by_subject(email.norm_subject)

        best_thread, best_path = None, MatchPath()
        for thread in candidates:
            path = self.longest_match_path(thread, email)
            if path.length > best_path.length:
                best_thread, best_path = thread, path
                if path.length == n_e:
                    break

        n_p = best_path.length
        if n_p == 0:
            case = Case.NO_DOCUMENT_MATCHED if candidates else Case.NEW_THREAD
            thread = self._new_thread(email.norm_subject)
            inserted = self._insert_chain(thread, eldest_first, None)
            chain = inserted
        else:
            thread = best_thread
            if n_p == n_e:
                case = Case.ALL_DOCUMENTS_MATCHED
            elif n_p == n_e - 1:
                case = Case.ALL_QUOTATIONS_MATCHED
            else:
                case = Case.SOME_QUOTATIONS_MATCHED
            inserted = self._insert_chain(thread, eldest_first[n_p:], best_path.nodes[-1])
            chain = best_path.nodes + inserted

        self._record(email, thread, list(reversed(chain)))
        return AdditionOutcome(
            case=case,
            thread_id=thread.thread_id,
            inserted_node_ids=[n.node_id for n in inserted],
            path=best_path,
        )

    # -- retrieval ------------------------------------------------------------

    def subject_matches(self, thread: Thread, expanded: ExpandedQuery) -> bool:
        return expanded.satisfied_by(self._subject_words[thread.thread_id])

    def retrieve(self, expanded: ExpandedQuery, indexed_node_ids: Iterable[int]
                 ) -> tuple[list[Thread], dict[int, list[ThreadNode]]]:
        """Subject-matched threads and, per indexed node, its strict descendants."""
        t_r = [t for t in self.threads.values() if self.subject_matches(t, expanded)]
        descendants = {n: self.nodes[n].descendants() for n in indexed_node_ids}
        return t_r, descendants

    # -- persistence ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "threads": [
                {"id": t.thread_id, "subject": t.subject, "emails": t.email_ids}
                for t in self.threads.values()
            ],
            "nodes": [
                {
                    "thread": n.thread_id,
                    "parent": None if n.parent is None else n.parent.node_id,
                    "doc": [n.doc.doc_id, n.doc.owner_email_id, n.doc.level, n.doc.text],
                    "main_body_of": n.main_body_of,
                }
                for n in self.nodes
            ],
            "email_nodes": self.email_nodes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ThreadStore:
        store = cls()
        for t in data["threads"]:
            thread = store._new_thread(t["subject"])
            assert thread.thread_id == t["id"]
            thread.email_ids = list(t["emails"])
            for eid in thread.email_ids:
                store.email_thread[eid] = thread.thread_id
        for rec in data["nodes"]:
            doc_id, owner, level, text = rec["doc"]
            doc = EmailDocument(doc_id, owner, level, text, fingerprint(text))
            thread = store.threads[rec["thread"]]
            parent = None if rec["parent"] is None else store.nodes[rec["parent"]]
            node = store._new_node(thread, doc, parent)
            node.main_body_of = list(rec["main_body_of"])
        store.email_nodes = {k: list(v) for k, v in data["email_nodes"].items()}
        return store


def canonical_tree(node: ThreadNode) -> tuple:
    """Order-insensitive structural form of the subtree at ``node``."""
    return (node.fingerprint, tuple(sorted(canonical_tree(c) for c in node.children)))


def canonical_forest(store: ThreadStore) -> list[tuple]:
    """Sorted (subject, roots) forms of every thread, for isomorphism checks."""
    return sorted(
        (t.subject, tuple(sorted(canonical_tree(r) for r in t.roots)))
        for t in store.threads.values()
    )
