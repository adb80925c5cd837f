"""Graded-relevance evaluation: DCG/NDCG@K and binarized precision/recall/F.

File formats (whitespace/tab separated, '#' starts a comment line):

* qrels:   ``query_id <TAB> email_id <TAB> grade``  (grade in 0..3)
* queries: ``query_id <TAB> query text [<TAB> clue]``
* runs:    ``query_id email_id rank score tag``
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

GRADES = (0, 1, 2, 3)


@dataclass(frozen=True)
class Judgment:
    query_id: str
    email_id: str
    grade: int

    def __post_init__(self):
        if self.grade not in GRADES:
            raise ValueError(f"grade {self.grade} outside the 0-3 scale")


Qrels = dict[str, dict[str, int]]
Run = dict[str, list[str]]


def dcg_at_k(grades: Sequence[int], k: int) -> float:
    if k < 1:
        raise ValueError("K must be >= 1")
    return sum((2 ** g - 1) / math.log2(1 + i) for i, g in enumerate(grades[:k], 1))


def ndcg_at_k(grades: Sequence[int], k: int) -> float:
    ideal = dcg_at_k(sorted(grades, reverse=True), k)
    if ideal == 0:
        return 0.0
    return dcg_at_k(grades, k) / ideal


def precision_recall_f(retrieved: Sequence[str], qrels: Qrels, query_id: str) -> tuple[float, float, float]:
    """(recall, precision, f) with grade >= 1 relevant and unjudged irrelevant."""
    if query_id not in qrels:
        raise KeyError(f"query {query_id!r} has no judgments")
    judged = qrels[query_id]
    relevant = {e for e, g in judged.items() if g >= 1}
    hits = sum(1 for e in set(retrieved) if e in relevant)
    recall = hits / len(relevant) if relevant else 0.0
    precision = hits / len(set(retrieved)) if retrieved else 0.0
    f = 2 * recall * precision / (recall + precision) if recall + precision else 0.0
    return recall, precision, f


# --- files -------------------------------------------------------------------


def _rows(path: str | Path) -> Iterable[list[str]]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield line


def read_qrels(path: str | Path) -> Qrels:
    qrels: Qrels = defaultdict(dict)
    for line in _rows(path):
        qid, eid, grade = line.split("\t") if "\t" in line else line.split()
        j = Judgment(qid.strip(), eid.strip(), int(grade))
        qrels[j.query_id][j.email_id] = j.grade
    return dict(qrels)


def write_qrels(path: str | Path, judgments: Iterable[Judgment]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for j in judgments:
            fh.write(f"{j.query_id}\t{j.email_id}\t{j.grade}\n")


def read_queries(path: str | Path) -> list[tuple[str, str, str | None]]:
    out = []
    for line in _rows(path):
        parts = line.split("\t")
        qid, text = parts[0].strip(), parts[1].strip()
        clue = parts[2].strip() if len(parts) > 2 and parts[2].strip() else None
        out.append((qid, text, clue))
    return out


def format_run_lines(query_id: str, ranked: Iterable[tuple[str, float]], tag: str) -> list[str]:
    return [f"{query_id} {eid} {i} {s:.6f} {tag}" for i, (eid, s) in enumerate(ranked, 1)]


def read_run(path: str | Path) -> tuple[str, Run]:
    run: dict[str, list[tuple[int, str]]] = defaultdict(list)
    tag = Path(path).stem
    for line in _rows(path):
        qid, eid, rank, _score, tag = line.split()
        run[qid].append((int(rank), eid))
    return tag, {q: [e for _, e in sorted(v)] for q, v in run.items()}


# --- reports -----------------------------------------------------------------


@dataclass
class QueryMetrics:
    ndcg: dict[int, float]
    recall: float
    precision: float
    f_measure: float


@dataclass
class MetricReport:
    name: str
    ks: list[int]
    per_query: dict[str, QueryMetrics] = field(default_factory=dict)

    def mean_ndcg(self, k: int) -> float:
        return fmean(m.ndcg[k] for m in self.per_query.values()) if self.per_query else 0.0

    def mean(self, attr: str) -> float:
        return fmean(getattr(m, attr) for m in self.per_query.values()) if self.per_query else 0.0

    def as_dict(self) -> dict[str, float]:
        out = {f"ndcg@{k}": self.mean_ndcg(k) for k in self.ks}
        out.update(recall=self.mean("recall"), precision=self.mean("precision"),
                   f_measure=self.mean("f_measure"), queries=len(self.per_query))
        return out


def evaluate_run(name: str, run: Run, qrels: Qrels, ks: Sequence[int]) -> MetricReport:
    report = MetricReport(name, list(ks))
    for qid, ranked in run.items():
        if qid not in qrels:
            log.warning("run %s: query %s not in qrels; skipped", name, qid)
            continue
        grades = [qrels[qid].get(e, 0) for e in ranked]
        r, p, f = precision_recall_f(ranked, qrels, qid)
        report.per_query[qid] = QueryMetrics({k: ndcg_at_k(grades, k) for k in ks}, r, p, f)
    return report


def evaluate_runs(run_files: Sequence[str | Path], qrels_file: str | Path,
                  ks: Sequence[int]) -> list[MetricReport]:
    qrels = read_qrels(qrels_file)
    reports = []
    for path in run_files:
        tag, run = read_run(path)
        reports.append(evaluate_run(tag, run, qrels, ks))
    return reports


def format_table(reports: Sequence[MetricReport]) -> str:
    if not reports:
        return ""
    ks = reports[0].ks
    header = ["method"] + [f"NDCG@{k}" for k in ks] + ["R", "P", "F"]
    rows = [header]
    for rep in reports:
        d = rep.as_dict()
        rows.append([rep.name] + [f"{d[f'ndcg@{k}']:.4f}" for k in ks]
                    + [f"{d['recall']:.4f}", f"{d['precision']:.4f}", f"{d['f_measure']:.4f}"])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def format_keyvalue(reports: Sequence[MetricReport]) -> str:
    lines = []
    for rep in reports:
        for key, value in rep.as_dict().items():
            lines.append(f"{rep.name}.{key}={value:.6f}" if isinstance(value, float)
                         else f"{rep.name}.{key}={value}")
    return "\n".join(lines) + "\n"
