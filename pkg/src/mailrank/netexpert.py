"""Network expertise server and client.

Wire protocol: newline-delimited UTF-8 JSON over TCP, one response line per
request line, connections reusable::

    {"type": "publish", "user": U, "terms": {term: weight}}  -> {"type": "ack"}
    {"type": "experts", "terms": [term, ...]}
        -> {"type": "answer", "per_term": {term: [[user, weight], ...]}}
    anything malformed -> {"type": "error", "msg": "..."}

The server keeps only what publishers send (precomputed sender-level TF-IDF
weights) and replaces a user's profile wholesale on re-publish.
"""

from __future__ import annotations

import json
import logging
import math
import os
import socket
import socketserver
import threading
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .mailbox import Mailbox
from .ranker import sscore
from .queryexp import ExpandedQuery
from .tokens import terms

log = logging.getLogger(__name__)

MAX_LINE = 16 * 1024 * 1024


class ProtocolError(ValueError):
    pass


@dataclass
class ExpertAnswer:
    per_term: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    def weights_by_user(self) -> dict[str, dict[str, float]]:
        out: dict[str, dict[str, float]] = {}
        for term, entries in self.per_term.items():
            for user, w in entries:
                out.setdefault(user, {})[term] = w
        return out

    def is_empty(self) -> bool:
        return not any(self.per_term.values())


# --- server side -------------------------------------------------------------


def _validate_profile(user, terms_) -> dict[str, float]:
    if not isinstance(user, str) or not user:
        raise ProtocolError("'user' must be a non-empty string")
    if not isinstance(terms_, dict):
        raise ProtocolError("'terms' must be an object of term -> weight")
    out = {}
    for term, w in terms_.items():
        if isinstance(w, bool) or not isinstance(w, (int, float)) or not math.isfinite(w):
            raise ProtocolError(f"weight for {term!r} is not a finite number")
        if w < 0:
            raise ProtocolError(f"negative weight for {term!r}")
        out[str(term)] = float(w)
    return out


class ProfileStore:
    """User -> {term: weight}. Writers swap in a new snapshot under a lock."""

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._profiles: dict[str, dict[str, float]] = {}
        if self.path and self.path.exists():
            data = json.loads(self.path.read_text(encoding="utf-8") or "{}")
            self._profiles = {u: _validate_profile(u, t) for u, t in data.items()}

    def snapshot(self) -> dict[str, dict[str, float]]:
        return self._profiles

    def publish(self, user: str, terms_: Mapping[str, float]) -> None:
        profile = _validate_profile(user, dict(terms_))
        with self._lock:
            profiles = dict(self._profiles)
            profiles[user] = profile
            self._profiles = profiles
            if self.path:
                tmp = self.path.with_name(self.path.name + ".tmp")
                tmp.write_text(json.dumps(profiles, sort_keys=True), encoding="utf-8")
                os.replace(tmp, self.path)

    def experts(self, terms_: Iterable[str]) -> ExpertAnswer:
        snap = self._profiles
        per_term = {}
        for term in terms_:
            entries = [(u, p[term]) for u, p in snap.items() if p.get(term, 0.0) > 0]
            entries.sort(key=lambda e: (-e[1], e[0]))
            per_term[term] = entries
        return ExpertAnswer(per_term)


def handle_message(store: ProfileStore, msg) -> dict:
    if not isinstance(msg, dict):
        raise ProtocolError("message must be a JSON object")
    kind = msg.get("type")
    if kind == "publish":
        store.publish(msg.get("user"), msg.get("terms"))
        return {"type": "ack"}
    if kind == "experts":
        terms_ = msg.get("terms")
        if not isinstance(terms_, list) or not all(isinstance(t, str) for t in terms_):
            raise ProtocolError("'terms' must be a list of strings")
        answer = store.experts(terms_)
        return {"type": "answer", "per_term": {t: [[u, w] for u, w in e] for t, e in answer.per_term.items()}}
    raise ProtocolError(f"unknown message type {kind!r}")


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        store: ProfileStore = self.server.store
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            try:
                reply = handle_message(store, json.loads(line))
            except (ProtocolError, json.JSONDecodeError) as exc:
                reply = {"type": "error", "msg": str(exc)}
            self.wfile.write((json.dumps(reply) + "\n").encode("utf-8"))
            self.wfile.flush()


class ExpertServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int], store: ProfileStore):
        self.store = store
        super().__init__(address, _Handler)

    def start_background(self) -> threading.Thread:
        t = threading.Thread(target=self.serve_forever, daemon=True)
        t.start()
        return t


# --- client side -------------------------------------------------------------


def parse_address(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    if not port.isdigit():
        raise ValueError(f"bad server address {addr!r}; expected HOST:PORT")
    return host or "127.0.0.1", int(port)


class ExpertClient:
    def __init__(self, address: str | tuple[str, int], timeout: float = 5.0):
        self.address = parse_address(address) if isinstance(address, str) else address
        self.timeout = timeout
        self._sock: socket.socket | None = None
        self._rfile = None

    def __enter__(self):
        self.connect()
        return self

    def __exit__(self, *exc):
        self.close()

    def connect(self) -> None:
        self._sock = socket.create_connection(self.address, timeout=self.timeout)
        self._rfile = self._sock.makefile("rb")

    def close(self) -> None:
        if self._rfile is not None:
            self._rfile.close()
        if self._sock is not None:
            self._sock.close()
        self._sock = self._rfile = None

    def request(self, msg: dict) -> dict:
        if self._sock is None:
            self.connect()
        self._sock.sendall((json.dumps(msg) + "\n").encode("utf-8"))
        line = self._rfile.readline(MAX_LINE)
        if not line:
            raise ConnectionError("server closed the connection")
        reply = json.loads(line.decode("utf-8"))
        if reply.get("type") == "error":
            raise ProtocolError(reply.get("msg", "server error"))
        return reply

    def publish(self, user: str, terms_: Mapping[str, float]) -> None:
        self.request({"type": "publish", "user": user, "terms": dict(terms_)})

    def experts(self, terms_: Iterable[str]) -> ExpertAnswer:
        reply = self.request({"type": "experts", "terms": sorted(set(terms_))})
        return ExpertAnswer({t: [(u, float(w)) for u, w in e] for t, e in reply["per_term"].items()})


def fetch_experts(address: str, terms_: Iterable[str], timeout: float = 5.0) -> ExpertAnswer | None:
    """Ask the server; None (with a warning) when it cannot be reached."""
    try:
        with ExpertClient(address, timeout) as client:
            return client.experts(terms_)
    except (OSError, ProtocolError, ValueError) as exc:
        log.warning("expertise server %s unavailable (%s); using local sender scores", address, exc)
        return None


# --- scoring and recommendations ------------------------------------------------


def global_sscore(mailbox: Mailbox, sender: str, expanded: ExpandedQuery,
                  answer: ExpertAnswer | None) -> float:
    weights = answer.weights_by_user().get(sender) if answer else None
    return sscore(mailbox, sender, expanded, weights)


def recommend(answer: ExpertAnswer, expanded: ExpandedQuery, contacts: Iterable[str]) -> list[tuple[str, float]]:
    """Network users covering every query word, not already in ``contacts``.

    A user covers a word through any of its variants; the combined weight
    sums the best variant weight per word.
    """
    by_user = answer.weights_by_user()
    contacts = set(contacts)
    out = []
    for user, weights in by_user.items():
        if user in contacts:
            continue
        total = 0.0
        for variants in expanded.variants.values():
            best = max((weights.get(v, 0.0) for v in variants), default=0.0)
            if best <= 0:
                break
            total += best
        else:
            out.append((user, total))
    out.sort(key=lambda e: (-e[1], e[0]))
    return out


def owner_profile(mailbox: Mailbox, user: str, public_folders: Iterable[str]) -> dict[str, float]:
    """Sender-level TF-IDF weights of ``user`` over their public-folder emails.

    TF counts the user's public emails only; the sender-level IDF comes from
    the whole local mailbox.
    """
    folders = {f.lower() for f in public_folders}
    tf: Counter = Counter()
    for e in mailbox.emails.values():
        if e.sender != user:
            continue
        parts = {p.lower() for p in e.folder.split("/") if p}
        if not parts & folders:
            continue
        tf.update(terms(e.main_body.text))
        tf.update(terms(e.norm_subject))
    idx = mailbox.index
    out = {}
    for term, count in sorted(tf.items()):
        w = count * idx.sender_idf(term)
        if w > 0:
            out[term] = w
    return out


def mailbox_owner(mailbox: Mailbox, folders: Iterable[str] = ("sent_items",)) -> str | None:
    """Most frequent sender among emails in ``folders``."""
    folders = {f.lower() for f in folders}
    counts = Counter(
        e.sender for e in mailbox.emails.values()
        if e.sender and {p.lower() for p in e.folder.split("/")} & folders
    )
    if not counts:
        return None
    return min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
