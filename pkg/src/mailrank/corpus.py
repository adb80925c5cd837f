"""Parsing of Enron-style plain-text email files.

Each file holds header lines (``Name: value``, continuation lines
indented), a blank line, then the body. Bodies are split into the
sender's own text (level 0) and quotation documents (levels 1..n-1,
most recent first).
"""

from __future__ import annotations

import hashlib
import logging
import os
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from email.utils import getaddresses, parseaddr, parsedate_to_datetime
from pathlib import Path
from typing import Iterator

log = logging.getLogger(__name__)

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
DEFAULT_FOLDERS = ("sent_items", "inbox")


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class RawEmail:
    source_path: str
    headers: tuple[tuple[str, str], ...]
    body: str

    def header(self, name: str, default: str | None = None) -> str | None:
        name = name.lower()
        for key, value in self.headers:
            if key.lower() == name:
                return value
        return default

    def header_all(self, name: str) -> list[str]:
        name = name.lower()
        return [v for k, v in self.headers if k.lower() == name]


@dataclass(frozen=True)
class EmailDocument:
    doc_id: str
    owner_email_id: str
    level: int
    text: str
    fingerprint: str


@dataclass(frozen=True)
class Email:
    email_id: str
    sender: str
    recipients: tuple[str, ...]
    date: datetime
    raw_subject: str
    norm_subject: str
    documents: tuple[EmailDocument, ...]
    source_path: str = ""
    folder: str = ""

    @property
    def main_body(self) -> EmailDocument:
        return self.documents[0]

    @property
    def timestamp(self) -> float:
        return self.date.timestamp()


# --- subjects ---------------------------------------------------------------

_PREFIX_RE = re.compile(r"^\s*(?:re|fwd|fw)\s*:\s*", re.IGNORECASE)


def normalize_subject(raw_subject: str) -> str:
    s = raw_subject or ""
    while True:
        stripped = _PREFIX_RE.sub("", s, count=1)
        if stripped == s:
            break
        s = stripped
    return " ".join(s.split()).casefold()


# --- fingerprints -------------------------------------------------------------

_QUOTE_MARKER_RE = re.compile(r"^[ \t]*(?:>[ \t]?)+", re.MULTILINE)


def fingerprint(text: str) -> str:
    text = _QUOTE_MARKER_RE.sub("", text)
    return " ".join(text.lower().split())


# --- body segmentation -------------------------------------------------------

_SEPARATOR_RE = re.compile(
    r"^\s*(?:-{2,}\s*original message\s*-{2,}"
    r"|-{2,}\s*forwarded by\b.*?-{2,}"
    r"|-{2,}\s*forwarded message\s*-{2,})\s*$",
    re.IGNORECASE,
)
_HEADER_LINE_RE = re.compile(
    r"^\s*(?:from|sent|to|cc|bcc|subject|date|importance)\s*:", re.IGNORECASE
)
_OPENING_HEADER_RE = re.compile(r"^\s*(?:from|sent|to|subject)\s*:", re.IGNORECASE)
# Lotus Notes lead line: '"Smith, John" <j@x.com> on 05/01/2001 04:23:49 PM'
_LOTUS_LEAD_RE = re.compile(
    r"\bon\s+\d{1,2}/\d{1,2}/\d{2,4}\s+\d{1,2}:\d{2}(?::\d{2})?\s*(?:am|pm)?\s*$",
    re.IGNORECASE,
)
_QUOTED_RE = re.compile(r"^[ \t]*>")


def _quote_depth_strip(line: str) -> str:
    """Remove one level of '>' quoting."""
    m = re.match(r"^[ \t]*>[ \t]?", line)
    return line[m.end():] if m else line


def _header_block_end(lines: list[str], start: int) -> int | None:
    """End index (exclusive) of a header block opening at ``start``.

    A block is >= 2 header lines, optionally preceded by a Lotus lead line,
    with indented continuation lines allowed. Returns None if no block.
    """
    i = start
    if i < len(lines) and _LOTUS_LEAD_RE.search(lines[i]) and not _HEADER_LINE_RE.match(lines[i]):
        i += 1
    if i >= len(lines) or not _OPENING_HEADER_RE.match(lines[i]):
        return None
    count = 0
    while i < len(lines):
        line = lines[i]
        if _HEADER_LINE_RE.match(line):
            count += 1
        elif count and line[:1] in (" ", "\t") and line.strip():
            pass
        else:
            break
        i += 1
    return i if count >= 2 else None


def _find_boundary(lines: list[str]) -> tuple[int, int] | None:
    """First separator or header-block boundary outside '>' quoting.

    Returns (boundary_start, quoted_text_start).
    """
    for i, line in enumerate(lines):
        if _QUOTED_RE.match(line):
            continue
        if _SEPARATOR_RE.match(line):
            j = i + 1
            while j < len(lines) and not lines[j].strip():
                j += 1
            end = _header_block_end(lines, j)
            return i, (end if end is not None else j)
        end = _header_block_end(lines, i)
        if end is not None:
            return i, end
    return None


def _segment_lines(lines: list[str]) -> list[str]:
    boundary = _find_boundary(lines)
    if boundary is None:
        head, rest = lines, None
    else:
        head, rest = lines[: boundary[0]], lines[boundary[1]:]

    own: list[str] = []
    quoted: list[str] = []
    for line in head:
        if _QUOTED_RE.match(line):
            quoted.append(_quote_depth_strip(line))
        else:
            own.append(line)

    segments = ["\n".join(own).strip()]
    if quoted:
        segments.extend(_segment_lines(quoted))
    if rest is not None:
        segments.extend(_segment_lines(rest))
    return segments


def segment_body(body: str) -> list[str]:
    """Split a body into [own text, newest quotation, ..., eldest quotation].

    Separator lines, quoted header blocks and '>' markers are removed.
    The first element is the sender's own text and may be empty.
    """
    lines = body.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    return _segment_lines(lines)


# --- parsing -----------------------------------------------------------------


def split_raw(raw: bytes | str, source_path: str = "<memory>") -> RawEmail:
    text = raw.decode("utf-8", errors="replace") if isinstance(raw, bytes) else raw
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    lines = text.split("\n")
    try:
        blank = next(i for i, line in enumerate(lines) if not line.strip())
    except StopIteration:
        raise ParseError(f"{source_path}: no blank line between headers and body") from None

    headers: list[list[str]] = []
    for line in lines[:blank]:
        if line[:1] in (" ", "\t") and headers:
            headers[-1][1] += " " + line.strip()
            continue
        name, sep, value = line.partition(":")
        if not sep:
            log.debug("%s: skipping non-header line %r", source_path, line)
            continue
        headers.append([name.strip(), value.strip()])
    return RawEmail(
        source_path=source_path,
        headers=tuple((k, v) for k, v in headers),
        body="\n".join(lines[blank + 1:]),
    )


def _parse_date(value: str | None) -> datetime:
    if not value:
        return EPOCH
    try:
        dt = parsedate_to_datetime(value)
    except (TypeError, ValueError, IndexError):
        return EPOCH
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def _address(value: str) -> str:
    name, addr = parseaddr(value)
    return (addr or name or value).strip().lower()


def parse_email(raw: bytes | str, source_path: str = "<memory>", folder: str = "") -> Email:
    msg = split_raw(raw, source_path)
    sender = _address(msg.header("From", "") or "")
    recipients = tuple(
        addr.lower()
        for _, addr in getaddresses(msg.header_all("To") + msg.header_all("Cc") + msg.header_all("Bcc"))
        if addr
    )
    date = _parse_date(msg.header("Date"))
    raw_subject = msg.header("Subject", "") or ""

    email_id = (msg.header("Message-ID") or "").strip()
    if not email_id:
        h = hashlib.sha1(
            f"{date.isoformat()}\x00{sender}\x00{fingerprint(msg.body)}".encode("utf-8")
        )
        email_id = "<sha1:" + h.hexdigest() + ">"

    documents = tuple(
        EmailDocument(
            doc_id=f"{email_id}#{level}",
            owner_email_id=email_id,
            level=level,
            text=text,
            fingerprint=fingerprint(text),
        )
        for level, text in enumerate(segment_body(msg.body))
    )
    return Email(
        email_id=email_id,
        sender=sender,
        recipients=recipients,
        date=date,
        raw_subject=raw_subject,
        norm_subject=normalize_subject(raw_subject),
        documents=documents,
        source_path=source_path,
        folder=folder,
    )


def iter_maildir(root: str | os.PathLike, folders: tuple[str, ...] | None = DEFAULT_FOLDERS) -> Iterator[Path]:
    """Email files under ``root`` whose path passes through one of ``folders``.

    ``folders=None`` selects every file.
    """
    root = Path(root)
    wanted = None if folders is None else {f.lower() for f in folders}
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        rel_parts = {p.lower() for p in Path(dirpath).relative_to(root).parts}
        if wanted is not None and not (rel_parts & wanted):
            continue
        for name in sorted(filenames):
            if name.startswith("."):
                continue
            yield Path(dirpath) / name


def folder_of(path: Path, root: Path) -> str:
    parts = path.relative_to(root).parts[:-1]
    return "/".join(parts)


def load_maildir(root: str | os.PathLike, folders: tuple[str, ...] | None = DEFAULT_FOLDERS) -> Iterator[Email]:
    root = Path(root)
    for path in iter_maildir(root, folders):
        yield parse_email(path.read_bytes(), str(path), folder=folder_of(path, root))
