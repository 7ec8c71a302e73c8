"""Command-line entry point: classify, verify, identify, report.

Exit codes: 0 success, 2 configuration error, 3 budget or timeout, 4 parse
error, 5 internal invariant violation.  Errors are written to stderr as one
JSON record.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .gf import UnsupportedOrder, make_field

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_PARSE, EXIT_INVARIANT = 0, 2, 3, 4, 5
BUILTIN_FIXTURES = ("q8_lines", "q9_lines", "q9_lines_printed")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    q: Optional[int] = None
    max_dim: int = 3
    workers: int = 1
    memory_budget: int = 4 << 30
    oracle_bound: int = 10 ** 6
    checkpoint: Optional[str] = None
    output_format: str = "text"
    timeout: Optional[float] = None

    def validate(self) -> "RunConfig":
        if self.q is not None:
            make_field(self.q)  # raises UnsupportedOrder
        if not 0 <= self.max_dim <= 3:
            raise ConfigError(f"--max-dim must lie in [0, 3], got {self.max_dim}")
        if self.workers < 1 or self.memory_budget <= 0 or self.oracle_bound <= 0:
            raise ConfigError("workers and budgets must be positive")
        if self.output_format not in ("json", "text", "latex"):
            raise ConfigError(f"unknown format {self.output_format!r}")
        return self


def parse_size(s: str) -> int:
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([kKmMgGtT]?)i?[bB]?\s*", s)
    if not m:
        raise argparse.ArgumentTypeError(f"bad size {s!r}")
    mult = {"": 1, "k": 1 << 10, "m": 1 << 20, "g": 1 << 30, "t": 1 << 40}[m.group(2).lower()]
    return int(float(m.group(1)) * mult)


def parse_workers(s: str) -> int:
    if s == "max":
        return os.cpu_count() or 1
    try:
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad worker count {s!r}") from None


def config_from_args(args) -> RunConfig:
    return RunConfig(
        q=getattr(args, "q", None),
        max_dim=getattr(args, "max_dim", 3),
        workers=getattr(args, "workers", 1),
        memory_budget=getattr(args, "memory_budget", 4 << 30),
        oracle_bound=getattr(args, "oracle_bound", 10 ** 6),
        checkpoint=getattr(args, "checkpoint", None),
        output_format=getattr(args, "format", "text"),
        timeout=getattr(args, "timeout", None),
    ).validate()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        p = Path(out)
        tmp = p.with_name(p.name + ".tmp")
        tmp.write_text(text)
        tmp.replace(p)
    else:
        sys.stdout.write(text)


def _read(path: str) -> tuple[str, str]:
    """Text of a file, or of a shipped fixture when ``path`` names one."""
    name = path[:-4] if path.endswith(".txt") else path
    if not Path(path).exists() and name in BUILTIN_FIXTURES:
        return resources.files("symsemi.data").joinpath(name + ".txt").read_text(), f"builtin:{name}"
    return Path(path).read_text(), path


def _load_classification(path: Optional[str], cfg: RunConfig, q: int):
    from .classify import classify, load_result
    if path:
        res = load_result(path)
        if res.q != q:
            raise ConfigError(f"classification {path} is for q={res.q}, input is over GF({q})")
        return res
    return classify(q, max_dim=3, memory_budget=cfg.memory_budget, workers=cfg.workers,
                    checkpoint=cfg.checkpoint, timeout=cfg.timeout)


# ---------------------------------------------------------------- commands

def cmd_classify(args) -> int:
    from .classify import classify, dumps_result
    from .formats import summary_table
    cfg = config_from_args(args)
    if cfg.q is None:
        raise ConfigError("classify needs --q")
    res = classify(cfg.q, max_dim=cfg.max_dim, memory_budget=cfg.memory_budget, workers=cfg.workers,
                   checkpoint=cfg.checkpoint, timeout=cfg.timeout)
    if args.out:
        _emit(dumps_result(res), args.out)
    if cfg.output_format == "json":
        doc = {"q": res.q, "summary": res.summary_row(), "counts": list(res.counts),
               "maximal_counts": list(res.maximal_counts)}
        sys.stdout.write(json.dumps(doc) + "\n")
    else:
        if cfg.output_format == "text":
            sys.stdout.write(res.summary_row() + "\n")
        sys.stdout.write(summary_table([res], cfg.output_format))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .formats import parse_fixture
    from .verify import verify_representatives
    cfg = config_from_args(args)
    text, source = _read(args.fixture)
    fl = parse_fixture(text, source)
    if cfg.q is not None and cfg.q != fl.q:
        raise ConfigError(f"--q {cfg.q} does not match fixture q={fl.q}")
    res = None
    if args.classification:
        res = _load_classification(args.classification, cfg, fl.q)
    rep = verify_representatives(fl, res, cfg.oracle_bound)
    if cfg.output_format == "json":
        out = json.dumps(rep.to_json(), indent=1) + "\n"
    else:
        out = f"fixture {source}\n" + rep.to_text()
    _emit(out, args.out)
    return EXIT_OK if rep.all_pass else 1


def _solid_from_input(arg: str, q: Optional[int]):
    from .formats import ParseError, parse_array, parse_subspace_file, sniff_kind
    from .semifield import dickson_algebra, field_algebra, symmetric_spread_solid
    if arg in ("field", "dickson"):
        if q is None:
            raise ConfigError(f"builtin algebra {arg!r} needs --q")
        F = make_field(q)
        c = field_algebra(F) if arg == "field" else dickson_algebra(F)
        return symmetric_spread_solid(c), f"{arg} algebra over GF({q})"
    text = Path(arg).read_text()
    kind = sniff_kind(text)
    if kind == "array":
        return symmetric_spread_solid(parse_array(text, arg)), f"array {arg}"
    if kind == "subspace":
        return parse_subspace_file(text, arg), f"subspace {arg}"
    raise ParseError("expected a cubical array ('q=.. basis=..') or subspace ('q=.. subspace') file", 1, 1, arg)


def cmd_identify(args) -> int:
    from .semifield import identify
    cfg = config_from_args(args)
    W, what = _solid_from_input(args.input, cfg.q)
    res = _load_classification(args.classification, cfg, W.q)
    idx, g = identify(W, res)
    n = len(res.levels[3])
    if cfg.output_format == "json":
        out = json.dumps({"input": what, "q": W.q, "orbit": idx, "orbits": n,
                          "witness": [[W.field.render(x) for x in r] for r in g.mat]}) + "\n"
    else:
        out = f"{what}: orbit {idx} of {n}\nwitness:\n{g.to_text()}\n"
    _emit(out, args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    from .classify import load_result
    from .formats import render_report
    cfg = config_from_args(args)
    res = load_result(args.result)
    _emit(render_report(res, cfg.output_format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, help="field order")
    common.add_argument("--workers", type=parse_workers, default=1, help="worker threads, or 'max'")
    common.add_argument("--memory-budget", type=parse_size, default=4 << 30, help="e.g. 512M, 4G")
    common.add_argument("--oracle-bound", type=int, default=10 ** 6,
                        help="largest |PGL(4,q)| for brute-force equivalence checks")
    common.add_argument("--checkpoint", help="classification checkpoint file (resumed when present)")
    common.add_argument("--timeout", type=float, help="seconds before a classification run stops")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("text", "json", "latex"), default="text")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="symsemi",
                                description="Orbits of symplectic semifield subspaces of PG(9,q).")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("classify", parents=[common], help="classify semifield subspaces up to dimension --max-dim")
    c.add_argument("--max-dim", type=int, default=3)
    c.set_defaults(func=cmd_classify)
    v = sub.add_parser("verify", parents=[common], help="check a representative list")
    v.add_argument("fixture", help=f"fixture file or builtin name ({', '.join(BUILTIN_FIXTURES)})")
    v.add_argument("--classification", help="classification result used to certify inequivalence")
    v.set_defaults(func=cmd_verify)
    i = sub.add_parser("identify", parents=[common], help="locate a semifield solid in a classification")
    i.add_argument("input", help="subspace file, cubical array file, or 'field' / 'dickson'")
    i.add_argument("--classification", help="classification result (computed when omitted)")
    i.set_defaults(func=cmd_identify)
    r = sub.add_parser("report", parents=[common], help="render a classification result")
    r.add_argument("result", help="classification result file")
    r.set_defaults(func=cmd_report)
    return p


def _fail(code: int, exc: BaseException, extra: Optional[dict] = None) -> int:
    rec = {"error": type(exc).__name__, "message": str(exc), "exit": code}
    if extra:
        rec.update(extra)
    sys.stderr.write(json.dumps(rec) + "\n")
    return code


def main(argv: Optional[list[str]] = None) -> int:
    from .classify import InvariantViolation, NotFound, Timeout, UnexpectedOrbitCount
    from .formats import ParseError
    from .group import MemoryBudgetExceeded, OracleBoundExceeded
    from .semifield import NotCommutative, NotPresemifield, SolidNotSemifield

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ParseError as e:
        return _fail(EXIT_PARSE, e, {"source": e.source, "line": e.line, "column": e.column})
    except (MemoryBudgetExceeded, OracleBoundExceeded, Timeout) as e:
        return _fail(EXIT_BUDGET, e)
    except (InvariantViolation, UnexpectedOrbitCount, SolidNotSemifield, NotFound) as e:
        return _fail(EXIT_INVARIANT, e)
    except (UnsupportedOrder, ConfigError, NotCommutative, NotPresemifield, OSError, ValueError) as e:
        return _fail(EXIT_CONFIG, e)


if __name__ == "__main__":
    sys.exit(main())
