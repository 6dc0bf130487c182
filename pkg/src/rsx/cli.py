"""Command-line front end: check, run, undo, replay, props, serve."""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

from .congruence import canonicalize
from .errors import RsxError
from .properties import (
    CheckReport, GenSpec, check_causal, check_loop, check_square, explore,
    generate_initial)
from .semantics import (
    Label, apply_redex, enumerate_backward, enumerate_forward, replay_keys,
    stuck_diagnostics)
from .surface import parse_config
from .syntax import Configuration


def _want_color() -> bool:
    mode = os.environ.get("RSX_COLOR", "auto")
    if mode == "never":
        return False
    return sys.stdout.isatty()


def _c(text: str, code: str) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if _want_color() else text


@dataclass
class TraceRecord:
    step: int
    direction: str | None
    rule: str | None
    label: Label | None
    config: str

    def to_json(self) -> dict:
        return {"step": self.step, "direction": self.direction,
                "rule": self.rule,
                "label": self.label.to_json() if self.label else None,
                "config": self.config}


def _load(path: str) -> Configuration:
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read())


def _emit_trace(records: list[TraceRecord], out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            for rec in records:
                f.write(json.dumps(rec.to_json()) + "\n")


def _stepper(args, backward: bool) -> int:
    try:
        m = _load(args.file)
    except (RsxError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    rng = random.Random(args.seed)
    cfg = canonicalize(m).to_configuration()
    records = [TraceRecord(0, None, None, None, canonicalize(cfg).text)]
    print(f"[0] {_c('init', '36')}")
    print(f"    {records[0].config}")
    enum = enumerate_backward if backward else enumerate_forward
    steps_done = 0
    for step in range(1, args.steps + 1):
        redexes = enum(cfg)
        if not redexes:
            word = "backward" if backward else "forward"
            print(f"stuck after {steps_done} steps: no {word} redex applies")
            for note in stuck_diagnostics(cfg):
                print(f"  {note}")
            break
        r = redexes[0] if args.policy == "first" else rng.choice(redexes)
        cfg = canonicalize(apply_redex(cfg, r)).to_configuration()
        text = canonicalize(cfg).text
        records.append(TraceRecord(step, r.direction, r.rule, r.label, text))
        print(f"[{step}] {r.direction} {_c(r.rule, '33')} {r.label.render()}")
        print(f"    {text}")
        steps_done += 1
    _emit_trace(records, args.out)
    return 0


def cmd_check(args) -> int:
    try:
        m = _load(args.file)
    except (RsxError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(canonicalize(m).text)
    return 0


def cmd_run(args) -> int:
    return _stepper(args, backward=False)


def cmd_undo(args) -> int:
    return _stepper(args, backward=True)


def cmd_replay(args) -> int:
    try:
        m = _load(args.file)
        keys = [k for k in args.keys.split(",") if k]
        print(replay_keys(m, keys))
    except (RsxError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def cmd_props(args) -> int:
    totals: dict[str, CheckReport] = {}
    truncated = 0
    for seed in range(args.seed, args.seed + args.corpus):
        spec = GenSpec(processes=args.processes, depth=args.depth, seed=seed)
        graph = explore(generate_initial(spec), args.budget)
        if graph.truncated:
            truncated += 1
        for report in (check_loop(graph), check_square(graph), check_causal(graph)):
            agg = totals.setdefault(
                report.check, CheckReport(report.check, 0, 0, []))
            agg.nodes += report.nodes
            agg.edges += report.edges
            for v in report.violations:
                agg.violations.append({"seed": seed, **v})
    failed = False
    for report in totals.values():
        status = _c("PASS", "32") if report.passed else _c("FAIL", "31")
        print(f"{report.check}: {status} nodes={report.nodes} "
              f"edges={report.edges} violations={len(report.violations)}")
        failed = failed or not report.passed
    if truncated:
        print(f"warning: {truncated} graph(s) truncated at budget={args.budget}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump([r.to_json() for r in totals.values()], f, indent=2)
            f.write("\n")
    return 2 if failed else 0


def cmd_serve(args) -> int:
    from .service import serve
    serve(args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="rsx",
        description="Reversible monitored-session workbench")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="parse and validate; print canonical form")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    for name, helptext in (("run", "apply forward steps until stuck"),
                           ("undo", "apply backward steps until stuck")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file")
        p.add_argument("--steps", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--policy", choices=["first", "random"], default="first")
        p.add_argument("--out", help="write the trace as JSON lines")
        p.set_defaults(fn=cmd_run if name == "run" else cmd_undo)

    p = sub.add_parser("replay", help="apply an explicit redex-key sequence")
    p.add_argument("file")
    p.add_argument("--keys", required=True, help="comma-separated redex keys")
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("props", help="generate programs, explore, run checkers")
    p.add_argument("--corpus", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--processes", type=int, default=4)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--out", help="write the aggregated report as JSON")
    p.set_defaults(fn=cmd_props)

    p = sub.add_parser("serve", help="start the interactive stepper service")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("RSX_PORT", "7643")))
    p.set_defaults(fn=cmd_serve)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
