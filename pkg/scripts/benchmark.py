"""Time ingest and search on a generated corpus.

    python scripts/benchmark.py --emails 10000 --queries 20
"""

import argparse
import random
import statistics
import tempfile
import time
from pathlib import Path

from mailrank import ranker
from mailrank.cli import main as cli
from mailrank.mailbox import Mailbox
from mailrank.synth import WORDS, large_corpus, write_maildir


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--emails", type=int, default=10_000)
    ap.add_argument("--queries", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        root = write_maildir(Path(tmp) / "maildir", large_corpus(args.emails, seed=args.seed))
        store = Path(tmp) / "store.mrs"
        t0 = time.perf_counter()
        cli(["ingest", "--maildir", str(root), "--store", str(store)])
        ingest = time.perf_counter() - t0

        t0 = time.perf_counter()
        mailbox = Mailbox.load(store)
        load = time.perf_counter() - t0

        rng = random.Random(args.seed)
        timings, sizes = [], []
        for _ in range(args.queries):
            query = " ".join(rng.sample(WORDS, rng.randint(1, 2)))
            t0 = time.perf_counter()
            result = ranker.rank(mailbox, query)
            timings.append(time.perf_counter() - t0)
            sizes.append(len(result))

    print(f"ingest      {ingest:8.2f} s")
    print(f"store load  {load:8.2f} s")
    print(f"rank        median {statistics.median(timings) * 1000:.1f} ms, "
          f"max {max(timings) * 1000:.1f} ms, mean results {statistics.fmean(sizes):.0f}")


if __name__ == "__main__":
    main()
