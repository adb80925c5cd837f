"""Command line entry point: ingest, search, eval, serve, publish, experts."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import evalkit, netexpert, ranker
from .corpus import DEFAULT_FOLDERS, ParseError, folder_of, iter_maildir, parse_email
from .mailbox import Mailbox, StoreFormatError
from .queryexp import EmptyQueryError

log = logging.getLogger("mailrank")

METHODS = ("era",) + ranker.BASELINES


class CommandError(Exception):
    pass


def _csv(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _store_path(args) -> Path:
    if not args.store:
        raise CommandError("no store given (use --store or set MAILRANK_STORE)")
    return Path(args.store)


def _load(args) -> Mailbox:
    path = _store_path(args)
    if not path.exists():
        raise CommandError(f"store {path} does not exist; run 'mailrank ingest' first")
    return Mailbox.load(path)


# --- ingest ------------------------------------------------------------------


def cmd_ingest(args) -> int:
    root = Path(args.maildir)
    if not root.is_dir():
        raise CommandError(f"cannot read maildir {root}")
    folders = None if args.folders.strip().lower() == "all" else tuple(_csv(args.folders))
    store = _store_path(args)
    mailbox = Mailbox.load(store) if store.exists() else Mailbox()
    for path in iter_maildir(root, folders):
        try:
            email = parse_email(path.read_bytes(), str(path), folder=folder_of(path, root))
        except ParseError as exc:
            log.warning("skipping %s", exc)
            continue
        mailbox.add(email)
    mailbox.save(store)
    print(mailbox.counts())
    return 0


# --- search ------------------------------------------------------------------


def _search_once(mailbox: Mailbox, query: str, args):
    expanded = ranker.expand(mailbox, query, not args.no_expand)
    answer = None
    if args.baseline:
        retrieved = ranker.retrieve(mailbox, expanded)
        result = ranker.baseline_rank(args.baseline, retrieved, mailbox, expanded, args.clue)
        return result, None
    if args.global_server:
        with ThreadPoolExecutor(max_workers=1) as pool:
            pending = pool.submit(netexpert.fetch_experts, args.global_server, sorted(expanded.all_terms()))
            retrieved = ranker.retrieve(mailbox, expanded)
            answer = pending.result()
    else:
        retrieved = ranker.retrieve(mailbox, expanded)
    network = answer.weights_by_user() if answer else None
    result = ranker.score_retrieved(mailbox, expanded, retrieved,
                                    sscore_epsilon=args.sscore_epsilon, network=network)
    return result, answer


def _print_results(mailbox: Mailbox, result: ranker.RankedList, top: int, out=None):
    out = out or sys.stdout
    if not result.items:
        print("no results", file=out)
        return
    for i, item in enumerate(result.items[:top], 1):
        e = mailbox.emails[item.email_id]
        print(f"{i:>4}  {item.score:10.6f}  {e.date.strftime('%Y-%m-%d %H:%M')}  "
              f"{e.sender or '-':<32.32}  {e.raw_subject}", file=out)
    if len(result.items) > top:
        print(f"... {len(result.items) - top} more", file=out)


def _print_recommendations(mailbox: Mailbox, answer, result, out=None):
    out = out or sys.stdout
    if answer is None:
        return
    recs = netexpert.recommend(answer, result.expanded, mailbox.contacts())
    # silent when empty so a degenerate network leaves the output unchanged
    if recs:
        print("recommended contacts:", ", ".join(u for u, _ in recs), file=out)


def cmd_search(args) -> int:
    mailbox = _load(args)
    if args.baseline and args.baseline not in ranker.BASELINES:
        raise CommandError(f"unknown baseline {args.baseline!r}; choose from {', '.join(ranker.BASELINES)}")
    run_lines: list[str] = []
    tag = args.baseline or ("global_era" if args.global_server else "era")

    def one(query: str, qid: str):
        result, answer = _search_once(mailbox, query, args)
        _print_results(mailbox, result, args.top)
        _print_recommendations(mailbox, answer, result)
        run_lines.extend(evalkit.format_run_lines(qid, ((s.email_id, s.score) for s in result.items), tag))

    if args.interactive:
        n = 0
        for line in sys.stdin:
            query = line.strip()
            if not query:
                continue
            n += 1
            try:
                one(query, f"q{n}")
            except EmptyQueryError as exc:
                print(f"error: {exc}", file=sys.stderr)
    else:
        if args.query is None:
            raise CommandError("--query is required unless --interactive is given")
        one(args.query, args.query_id)

    if args.run_out:
        Path(args.run_out).write_text("".join(l + "\n" for l in run_lines), encoding="utf-8")
    return 0


# --- eval --------------------------------------------------------------------


def run_method(mailbox: Mailbox, method: str, query: str, clue: str | None, *,
               expand_terms: bool = True, sscore_epsilon: float = 0.0,
               network=None) -> ranker.RankedList:
    if method == "era":
        return ranker.rank(mailbox, query, expand_terms=expand_terms,
                           sscore_epsilon=sscore_epsilon, network=network)
    expanded = ranker.expand(mailbox, query, expand_terms)
    retrieved = ranker.retrieve(mailbox, expanded)
    return ranker.baseline_rank(method, retrieved, mailbox, expanded, clue)


def cmd_eval(args) -> int:
    mailbox = _load(args)
    methods = _csv(args.methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise CommandError(f"unknown method(s) {', '.join(unknown)}; valid: {', '.join(METHODS)}")
    try:
        ks = [int(k) for k in _csv(args.k)]
    except ValueError:
        raise CommandError(f"bad --k value {args.k!r}") from None
    if not ks or min(ks) < 1:
        raise CommandError("--k values must be >= 1")
    queries = evalkit.read_queries(args.queries)
    qrels = evalkit.read_qrels(args.qrels)

    reports = []
    for method in methods:
        run: evalkit.Run = {}
        lines: list[str] = []
        for qid, text, clue in queries:
            result = run_method(mailbox, method, text, clue, expand_terms=not args.no_expand,
                                sscore_epsilon=args.sscore_epsilon)
            run[qid] = result.email_ids()
            lines.extend(evalkit.format_run_lines(qid, ((s.email_id, s.score) for s in result.items), method))
        if args.run_dir:
            Path(args.run_dir).mkdir(parents=True, exist_ok=True)
            (Path(args.run_dir) / f"{method}.run").write_text("".join(l + "\n" for l in lines), encoding="utf-8")
        reports.append(evalkit.evaluate_run(method, run, qrels, ks))

    print(evalkit.format_table(reports))
    if args.report_out:
        Path(args.report_out).write_text(evalkit.format_keyvalue(reports), encoding="utf-8")
    return 0


# --- network -----------------------------------------------------------------


def cmd_serve(args) -> int:
    store = netexpert.ProfileStore(args.store)
    server = netexpert.ExpertServer((args.host, args.port), store)
    host, port = server.server_address[:2]
    print(f"serving on {host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_publish(args) -> int:
    mailbox = _load(args)
    folders = _csv(args.public_folders)
    user = args.user or netexpert.mailbox_owner(mailbox) or ""
    if not user:
        raise CommandError("cannot determine the mailbox owner; pass --user")
    profile = netexpert.owner_profile(mailbox, user, folders) if folders else {}
    with netexpert.ExpertClient(args.server) as client:
        client.publish(user, profile)
    print(f"published {len(profile)} terms for {user}")
    return 0


def cmd_experts(args) -> int:
    with netexpert.ExpertClient(args.server) as client:
        answer = client.experts(args.terms)
    for term in sorted(answer.per_term):
        entries = ", ".join(f"{u}:{w:.6f}" for u, w in answer.per_term[term])
        print(f"{term}\t{entries}")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    default_store = os.environ.get("MAILRANK_STORE")
    p = argparse.ArgumentParser(prog="mailrank", description="Email retrieval ranking")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="parse, thread and index a maildir")
    s.add_argument("--maildir", required=True)
    s.add_argument("--store", default=default_store)
    s.add_argument("--folders", default=",".join(DEFAULT_FOLDERS),
                   help="comma-separated folder names, or 'all' (default: %(default)s)")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("search", help="rank emails for a query")
    s.add_argument("--store", default=default_store)
    s.add_argument("--query")
    s.add_argument("--query-id", default="q1")
    s.add_argument("--top", type=int, default=10)
    s.add_argument("--global", dest="global_server", metavar="HOST:PORT")
    s.add_argument("--baseline", metavar="METHOD")
    s.add_argument("--clue", help="clue word for the clues baseline")
    s.add_argument("--run-out", metavar="FILE")
    s.add_argument("--interactive", action="store_true")
    s.add_argument("--no-expand", action="store_true")
    s.add_argument("--sscore-epsilon", type=float, default=0.0)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("eval", help="evaluate ranking methods against qrels")
    s.add_argument("--store", default=default_store)
    s.add_argument("--queries", required=True)
    s.add_argument("--qrels", required=True)
    s.add_argument("--k", default="1,5,10")
    s.add_argument("--methods", default="era,date,thread_date,subject_alpha,sender_alpha,clues")
    s.add_argument("--run-dir")
    s.add_argument("--report-out")
    s.add_argument("--no-expand", action="store_true")
    s.add_argument("--sscore-epsilon", type=float, default=0.0)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("serve", help="run the expertise server")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, required=True)
    s.add_argument("--store", help="JSON file persisting published profiles")
    s.set_defaults(func=cmd_serve)

    s = sub.add_parser("publish", help="publish the owner's public expertise profile")
    s.add_argument("--store", default=default_store)
    s.add_argument("--server", required=True, metavar="HOST:PORT")
    s.add_argument("--public-folders", default="sent_items")
    s.add_argument("--user")
    s.set_defaults(func=cmd_publish)

    s = sub.add_parser("experts", help="ask the server who is expert in some terms")
    s.add_argument("--server", required=True, metavar="HOST:PORT")
    s.add_argument("terms", nargs="+")
    s.set_defaults(func=cmd_experts)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CommandError, EmptyQueryError, ParseError, StoreFormatError,
            netexpert.ProtocolError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
