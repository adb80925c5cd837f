"""Email retrieval ranking over threaded, deduplicated email documents."""

from .corpus import Email, EmailDocument, fingerprint, normalize_subject, parse_email, segment_body
from .mailbox import Mailbox
from .ranker import RankedList, baseline_rank, rank

__all__ = [
    "Email",
    "EmailDocument",
    "Mailbox",
    "RankedList",
    "baseline_rank",
    "fingerprint",
    "normalize_subject",
    "parse_email",
    "rank",
    "segment_body",
]
