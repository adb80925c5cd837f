from __future__ import annotations

from datetime import datetime, timedelta, timezone
from email.utils import format_datetime
from pathlib import Path

import pytest

from mailrank.corpus import parse_email
from mailrank.mailbox import Mailbox

DATA = Path(__file__).parent / "data"
T0 = datetime(2001, 5, 1, 9, 0, tzinfo=timezone(timedelta(hours=-7)))


def raw_email(msg_id, sender, subject, own, quotes=(), date=None, to="owner@enron.com"):
    """Outlook-style raw email. ``quotes`` are (sender, subject, text), newest first."""
    date = date or T0
    lines = [
        f"Message-ID: <{msg_id}>",
        f"Date: {format_datetime(date)}",
        f"From: {sender}",
        f"To: {to}",
        f"Subject: {subject}",
        "",
        own,
    ]
    for q_sender, q_subject, q_text in quotes:
        lines += [
            "",
            " -----Original Message-----",
            f"From: \t{q_sender}",
            "Sent:\tMonday, April 30, 2001 8:00 AM",
            f"To:\t{to}",
            f"Subject:\t{q_subject}",
            "",
            q_text,
        ]
    return "\n".join(lines) + "\n"


def email(msg_id, sender, subject, own, quotes=(), hours=0, folder="", **kw):
    return parse_email(raw_email(msg_id, sender, subject, own, quotes, T0 + timedelta(hours=hours), **kw),
                       source_path=f"<{msg_id}>", folder=folder)


# The Fig. 2 style chain: A is the original, B replies to A, E replies to B.
TEXT_2 = "Attached is the revised daily notice for gas day May 1."
TEXT_1 = "Please confirm the volumes on the revised notice before noon."
TEXT_B = "Volumes confirmed, thanks for the quick turnaround."
SUBJ = "Revised Daily Notice"


@pytest.fixture
def chain():
    a = email("a@x", "kim@enron.com", SUBJ, TEXT_2, hours=0)
    b = email("b@x", "lee@enron.com", "RE: " + SUBJ, TEXT_1, [("kim@enron.com", SUBJ, TEXT_2)], hours=1)
    e = email("e@x", "kim@enron.com", "RE: " + SUBJ, TEXT_B,
              [("lee@enron.com", "RE: " + SUBJ, TEXT_1), ("kim@enron.com", SUBJ, TEXT_2)], hours=2)
    return a, b, e


@pytest.fixture
def mailbox():
    return Mailbox()
