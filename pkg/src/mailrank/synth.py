"""Synthetic Enron-style mail for tests, benchmarks and the experiment scripts."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from email.utils import format_datetime
from pathlib import Path

BASE_DATE = datetime(2001, 1, 1, 9, 0, tzinfo=timezone(timedelta(hours=-7)))

WORDS = """
agreement analysis approval asset auction balance billing broker capacity
cash comment contract counterparty credit curve deadline delivery demand
desk draft exposure facility filing forecast forward hedge hourly invoice
issue legal limit liquidity margin memo meter model nomination notice
option outage payment pipeline pricing position proposal rate regulatory
reserve revenue review risk schedule settlement shipper spread storage
summary supply swap tariff trader transfer transmission update utility
valuation volume weather window
""".split()


@dataclass
class Message:
    msg_id: str
    sender: str
    subject: str
    text: str
    date: datetime
    parent: Message | None = None
    recipients: list[str] = field(default_factory=list)

    def ancestors(self) -> list[Message]:
        out, node = [], self.parent
        while node is not None:
            out.append(node)
            node = node.parent
        return out


def render(msg: Message) -> str:
    """Raw file text: own text, then each ancestor as an Outlook-style quote."""
    subject = msg.subject if msg.parent is None else "RE: " + msg.subject
    lines = [
        f"Message-ID: <{msg.msg_id}>",
        f"Date: {format_datetime(msg.date)}",
        f"From: {msg.sender}",
        f"To: {', '.join(msg.recipients) or 'owner@enron.com'}",
        f"Subject: {subject}",
        "",
        msg.text,
    ]
    for anc in msg.ancestors():
        lines += [
            "",
            " -----Original Message-----",
            f"From: \t{anc.sender}",
            f"Sent:\t{format_datetime(anc.date)}",
            "To:\towner@enron.com",
            f"Subject:\t{anc.subject}",
            "",
            anc.text,
        ]
    return "\n".join(lines) + "\n"


def random_text(rng: random.Random, n_words: int, vocab=WORDS) -> str:
    return " ".join(rng.choice(vocab) for _ in range(n_words))


def reply_forest(rng: random.Random, n_emails: int, max_depth: int = 6,
                 n_subjects: int = 3, senders: int = 5) -> list[Message]:
    """Random reply trees; every message body is unique by construction."""
    people = [f"user{i}@enron.com" for i in range(senders)]
    subjects = [f"topic {random_text(rng, 2)} {i}" for i in range(n_subjects)]
    msgs: list[Message] = []
    for i in range(n_emails):
        candidates = [m for m in msgs if len(m.ancestors()) + 1 < max_depth]
        parent = rng.choice(candidates) if candidates and rng.random() < 0.75 else None
        subject = parent.subject if parent else rng.choice(subjects)
        date = BASE_DATE + timedelta(hours=i)
        msgs.append(Message(
            msg_id=f"m{i}.synthetic",
            sender=rng.choice(people),
            subject=subject,
            text=f"note{i} " + random_text(rng, 8),
            date=date,
            parent=parent,
        ))
    return msgs


def write_maildir(root: str | Path, files: dict[str, str]) -> Path:
    """Write ``{relative path: raw text}`` under ``root``."""
    root = Path(root)
    for rel, text in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return root


def large_corpus(n_emails: int, seed: int = 0, n_senders: int = 200,
                 vocab_size: int = 5000) -> dict[str, str]:
    """A maildir-like mapping of ``n_emails`` files for throughput runs."""
    rng = random.Random(seed)
    vocab = [f"{rng.choice(WORDS)}{i}" for i in range(vocab_size)] + WORDS
    people = [f"person{i}@enron.com" for i in range(n_senders)]
    msgs: list[Message] = []
    files = {}
    for i in range(n_emails):
        parent = None
        if msgs and rng.random() < 0.6:
            parent = msgs[rng.randrange(max(0, len(msgs) - 500), len(msgs))]
            if len(parent.ancestors()) >= 5:
                parent = None
        subject = parent.subject if parent else random_text(rng, 3, WORDS)
        msg = Message(
            msg_id=f"bulk{i}.synthetic",
            sender=rng.choice(people),
            subject=subject,
            text=random_text(rng, rng.randint(20, 120), vocab),
            date=BASE_DATE + timedelta(minutes=7 * i),
            parent=parent,
        )
        msgs.append(msg)
        folder = "sent_items" if i % 5 == 0 else "inbox"
        files[f"owner-u/{folder}/{i}."] = render(msg)
    return files


def planted_corpus(n_topics: int = 5, per_topic: int = 20, n_noise: int = 50,
                   seed: int = 0) -> tuple[dict[str, str], list[tuple[str, str]], list[tuple[str, str, int]]]:
    """Maildir files plus queries and graded judgments with known answers.

    Each topic gets one subject-matched thread (grade 3, sent first), some
    emails discussing the topic in the body (grade 2), and passing mentions
    inside otherwise unrelated emails (grade 0). Returns
    ``(files, [(query_id, text)], [(query_id, email_id, grade)])``.
    """
    rng = random.Random(seed)
    pool = list(WORDS)
    rng.shuffle(pool)
    people = [f"person{i}@enron.com" for i in range(12)]
    files: dict[str, str] = {}
    queries, qrels = [], []
    clock = iter(range(10 ** 6))

    def emit(msg: Message, folder: str = "inbox"):
        files[f"owner-u/{folder}/{len(files)}."] = render(msg)

    def stamp() -> datetime:
        return BASE_DATE + timedelta(hours=next(clock))

    topics = [(pool[2 * t], pool[2 * t + 1]) for t in range(n_topics)]
    others = pool[2 * n_topics:]
    for t, (w1, w2) in enumerate(topics):
        qid = f"T{t + 1:02d}"
        queries.append((qid, f"{w1} {w2}"))
        expert = people[t % len(people)]
        n_thread = max(2, per_topic // 4)
        n_body = max(1, per_topic // 4)
        n_passing = per_topic - n_thread - n_body
        parent = None
        for i in range(n_thread):
            msg = Message(f"{qid}-thread{i}.synthetic", expert, f"{w1} {w2} plan",
                          f"{w1} {w2} " + random_text(rng, 6, others), stamp(), parent)
            emit(msg)
            qrels.append((qid, f"<{msg.msg_id}>", 3))
            parent = msg
        for i in range(n_body):
            msg = Message(f"{qid}-body{i}.synthetic", rng.choice(people), f"notes {random_text(rng, 1, others)}",
                          f"{w1} {w2} {w1} " + random_text(rng, 4, others), stamp())
            emit(msg)
            qrels.append((qid, f"<{msg.msg_id}>", 2))
        for i in range(n_passing):
            msg = Message(f"{qid}-passing{i}.synthetic", rng.choice(people), random_text(rng, 2, others),
                          random_text(rng, 10, others) + f" {w1} {w2} " + random_text(rng, 10, others),
                          stamp())
            emit(msg)
            qrels.append((qid, f"<{msg.msg_id}>", 0))
    for i in range(n_noise):
        emit(Message(f"noise{i}.synthetic", rng.choice(people), random_text(rng, 2, others),
                     random_text(rng, 12, others), stamp()), "sent_items" if i % 3 == 0 else "inbox")
    return files, queries, qrels
