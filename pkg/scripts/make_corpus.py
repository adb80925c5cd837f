"""Write a synthetic Enron-style maildir.

    python scripts/make_corpus.py --out /tmp/mail --emails 10000
    python scripts/make_corpus.py --out /tmp/planted --planted

``--planted`` also writes queries.tsv and qrels.tsv next to the maildir.
"""

import argparse
from pathlib import Path

from mailrank.evalkit import Judgment, write_qrels
from mailrank.synth import large_corpus, planted_corpus, write_maildir


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--emails", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--planted", action="store_true", help="topic corpus with graded judgments")
    ap.add_argument("--topics", type=int, default=8)
    args = ap.parse_args()

    if args.planted:
        files, queries, qrels = planted_corpus(n_topics=args.topics, seed=args.seed)
        write_maildir(args.out / "maildir", files)
        (args.out / "queries.tsv").write_text("".join(f"{q}\t{t}\n" for q, t in queries))
        write_qrels(args.out / "qrels.tsv", [Judgment(*j) for j in qrels])
        print(f"{len(files)} emails, {len(queries)} queries under {args.out}")
    else:
        files = large_corpus(args.emails, seed=args.seed)
        write_maildir(args.out, files)
        print(f"{len(files)} emails under {args.out}")


if __name__ == "__main__":
    main()
