"""A mailbox: parsed emails, their thread trees and the index, with persistence.

The store file starts with a magic line ``MAILRANK-STORE <version>`` followed
by one JSON object::

    {"emails": [...], "threads": {"threads": [...], "nodes": [...],
     "email_nodes": {...}}, "index": {"postings": ..., "doc_lengths": ...,
     "doc_norms": ..., "senders": ..., "vocabulary": ...}}

Thread nodes reference their parent by node index.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable

from .corpus import Email, EmailDocument
from .index import IndexStore
from .threadstore import AdditionOutcome, ThreadStore
from .tokens import terms

log = logging.getLogger(__name__)

MAGIC = "MAILRANK-STORE"
VERSION = 1


class StoreFormatError(ValueError):
    pass


@dataclass
class Counts:
    emails: int
    documents: int
    threads: int
    nodes: int

    def __str__(self):
        return (f"{self.emails} emails, {self.documents} documents, "
                f"{self.threads} threads, {self.nodes} nodes")


class Mailbox:
    def __init__(self):
        self.emails: dict[str, Email] = {}
        self.threads = ThreadStore()
        self.index = IndexStore()

    def add(self, email: Email) -> AdditionOutcome | None:
        """Thread and index one email. Returns None for an already-seen id."""
        if email.email_id in self.emails:
            log.debug("duplicate email id %s (%s) skipped", email.email_id, email.source_path)
            return None
        outcome = self.threads.add_email(email)
        for nid in outcome.inserted_node_ids:
            self.index.index_document(nid, self.threads.nodes[nid].doc.text)
        subject_terms = terms(email.norm_subject)
        self.index.add_vocabulary(subject_terms)
        self.index.add_sender_text(email.sender, terms(email.main_body.text) + subject_terms)
        self.emails[email.email_id] = email
        return outcome

    def add_all(self, emails: Iterable[Email]) -> list[AdditionOutcome | None]:
        return [self.add(e) for e in emails]

    def counts(self) -> Counts:
        return Counts(
            emails=len(self.emails),
            documents=sum(len(e.documents) for e in self.emails.values()),
            threads=len(self.threads.threads),
            nodes=len(self.threads.nodes),
        )

    def contacts(self) -> set[str]:
        return {e.sender for e in self.emails.values() if e.sender}

    # -- persistence ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "emails": [_email_to_json(e) for e in self.emails.values()],
            "threads": self.threads.to_dict(),
            "index": self.index.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Mailbox:
        mb = cls()
        mb.threads = ThreadStore.from_dict(data["threads"])
        for rec in data["emails"]:
            e = _email_from_json(rec, mb.threads)
            mb.emails[e.email_id] = e
        mb.index = IndexStore.from_dict(data["index"])
        return mb

    def save(self, path: str | os.PathLike) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(f"{MAGIC} {VERSION}\n")
            json.dump(self.to_dict(), fh, separators=(",", ":"))
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | os.PathLike) -> Mailbox:
        with open(path, encoding="utf-8") as fh:
            head = fh.readline().split()
            if len(head) != 2 or head[0] != MAGIC:
                raise StoreFormatError(f"{path}: not a mailrank store")
            if int(head[1]) != VERSION:
                raise StoreFormatError(f"{path}: unsupported store version {head[1]}")
            return cls.from_dict(json.load(fh))


def _email_to_json(e: Email) -> dict:
    return {
        "id": e.email_id,
        "sender": e.sender,
        "recipients": list(e.recipients),
        "date": e.date.isoformat(),
        "raw_subject": e.raw_subject,
        "norm_subject": e.norm_subject,
        "source_path": e.source_path,
        "folder": e.folder,
    }


def _email_from_json(rec: dict, store: ThreadStore) -> Email:
    # Documents are rebuilt from the thread nodes they were matched to.
    eid = rec["id"]
    return Email(
        email_id=eid,
        sender=rec["sender"],
        recipients=tuple(rec["recipients"]),
        date=datetime.fromisoformat(rec["date"]),
        raw_subject=rec["raw_subject"],
        norm_subject=rec["norm_subject"],
        documents=tuple(
            EmailDocument(f"{eid}#{lvl}", eid, lvl, node.doc.text, node.doc.fingerprint)
            for lvl, node in enumerate(store.nodes_of(eid))
        ),
        source_path=rec["source_path"],
        folder=rec["folder"],
    )
