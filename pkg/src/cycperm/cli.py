"""Command-line front end for the enumeration, spectral, and series routes.

Subcommands map one-to-one onto the library entry points:

  enumerate    window-weighted sums over S_n (boundary weights included)
  cyclic       the same sums with windows read modulo n
  montecarlo   sampling estimate of the cyclic mean weight
  spectrum     discretized transfer operator: eigenvalues and traces
  series       eigenvalue power series (cyclic 123 counts, Euler numbers)
  verify       cross-check battery comparing all routes

Output is a plain table by default; --format json emits a canonical
report (sorted keys, shortest round-trip floats) and --format csv a
flat table.  Exit codes: 0 success, 1 usage error, 2 domain error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from dataclasses import dataclass

from .enumeration import (
    N_MAX_DEFAULT,
    alpha_bruteforce,
    beta_bruteforce,
    beta_montecarlo,
)
from .errors import CycpermError, InvalidPattern
from .perms import WeightScheme
from .series import euler_series, series_beta_123
from .spectral import (
    STATE_CAP_DEFAULT,
    assemble_operator,
    full_spectrum,
    top_eigenvalue,
    trace_powers,
)
from .verify import ALL_CHECKS, run_battery


@dataclass(frozen=True)
class RunConfig:
    """One parsed invocation; every field has the parser's default."""

    command: str
    avoid: str | None = None
    weights_path: str | None = None
    n_range: tuple[int, int] | None = None
    n_max: int = N_MAX_DEFAULT
    resolution: int = 64
    top_k: int | None = None
    traces: tuple[int, int] | None = None
    leading_only: bool = False
    state_cap: int = STATE_CAP_DEFAULT
    samples: int = 100_000
    seed: int = 0
    tol: float = 1e-6
    which: str = "beta123"
    checks: tuple[str, ...] | None = None
    threads: int = 1
    output_format: str = "table"
    output_path: str | None = None


class _UsageError(Exception):
    """Bad flag value detected after argparse has finished."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; remap to the documented 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _parse_range(text: str) -> tuple[int, int]:
    match = re.fullmatch(r"(\d+)(?:\.\.(\d+))?", text)
    if not match:
        raise argparse.ArgumentTypeError(
            f"expected an integer or LO..HI range, got {text!r}"
        )
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) else lo
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _build_parser(default_threads: int) -> _Parser:
    parser = _Parser(prog="cycperm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    out = _Parser(add_help=False)
    out.add_argument(
        "--format",
        choices=("table", "json", "csv"),
        default="table",
        help="output format (default table)",
    )
    out.add_argument("--output", metavar="PATH", help="write the report to a file")

    scheme = _Parser(add_help=False)
    group = scheme.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--avoid",
        metavar="PATTERNS",
        help="comma-separated forbidden patterns, e.g. 123 or 123,321",
    )
    group.add_argument(
        "--weights",
        metavar="FILE",
        help='JSON weight file, e.g. {"window": 3, "wt": {"321": 2, "123": 0}}',
    )

    for name, text in (("enumerate", "linear"), ("cyclic", "cyclic")):
        p = sub.add_parser(
            name,
            parents=[scheme, out],
            help=f"exact weighted sums over S_n with {text} windows",
        )
        p.add_argument("--n", type=_parse_range, required=True, metavar="N|LO..HI")
        p.add_argument(
            "--n-max",
            type=_positive_int,
            default=N_MAX_DEFAULT,
            help=f"refuse n beyond this bound (default {N_MAX_DEFAULT})",
        )
        p.add_argument(
            "--threads",
            type=_positive_int,
            default=default_threads,
            help="worker threads for the shard loop (env CYCPERM_THREADS)",
        )

    p = sub.add_parser(
        "montecarlo", parents=[scheme, out], help="sampled mean cyclic weight"
    )
    p.add_argument("--n", type=_parse_range, required=True, metavar="N|LO..HI")
    p.add_argument("--samples", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser(
        "spectrum",
        parents=[scheme, out],
        help="eigenvalues and traces of the discretized operator",
    )
    p.add_argument("--resolution", type=_positive_int, default=64, metavar="N")
    p.add_argument(
        "--top-k",
        type=_positive_int,
        default=None,
        help="eigenvalues to report, largest modulus first (default min(8, dim))",
    )
    p.add_argument(
        "--traces",
        type=_parse_range,
        default=None,
        metavar="LO..HI",
        help="also report tr(M^n) for n in this range",
    )
    p.add_argument(
        "--leading",
        action="store_true",
        help="power iteration for the leading eigenvalue only",
    )
    p.add_argument("--tol", type=float, default=1e-10, help="power iteration tolerance")
    p.add_argument(
        "--state-cap",
        type=_positive_int,
        default=STATE_CAP_DEFAULT,
        help=f"refuse matrices larger than this (default {STATE_CAP_DEFAULT})",
    )

    p = sub.add_parser(
        "series", parents=[out], help="tail-bounded eigenvalue power series"
    )
    p.add_argument(
        "--which",
        choices=("beta123", "euler"),
        default="beta123",
        help="beta123: cyclic 123-avoider counts; euler: alternating counts",
    )
    p.add_argument("--n", type=_parse_range, required=True, metavar="N|LO..HI")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser(
        "verify", parents=[out], help="run the cross-check battery (exit 3 on failure)"
    )
    p.add_argument(
        "--checks",
        metavar="NAMES",
        help="comma-separated subset to run; known names: " + ", ".join(ALL_CHECKS),
    )
    return parser


def _config_from_namespace(ns: argparse.Namespace) -> RunConfig:
    fields = {
        "avoid": "avoid",
        "weights_path": "weights",
        "n_range": "n",
        "n_max": "n_max",
        "resolution": "resolution",
        "top_k": "top_k",
        "traces": "traces",
        "leading_only": "leading",
        "state_cap": "state_cap",
        "samples": "samples",
        "seed": "seed",
        "tol": "tol",
        "which": "which",
        "threads": "threads",
        "output_format": "format",
        "output_path": "output",
    }
    kwargs = {}
    for attr, flag in fields.items():
        if hasattr(ns, flag) and getattr(ns, flag) is not None:
            kwargs[attr] = getattr(ns, flag)
    if getattr(ns, "checks", None) is not None:
        kwargs["checks"] = tuple(
            name.strip() for name in ns.checks.split(",") if name.strip()
        )
    return RunConfig(command=ns.command, **kwargs)


def _scheme_from_config(config: RunConfig) -> WeightScheme:
    if config.weights_path is not None:
        with open(config.weights_path, "r", encoding="utf-8") as handle:
            try:
                data = json.load(handle)
            except json.JSONDecodeError as exc:
                raise InvalidPattern(
                    f"weight file {config.weights_path} is not valid JSON: {exc}"
                ) from exc
        if not isinstance(data, dict):
            raise InvalidPattern("weight file must hold a JSON object")
        return WeightScheme.from_json_dict(data)
    patterns = [p.strip() for p in config.avoid.split(",") if p.strip()]
    if not patterns:
        raise InvalidPattern("--avoid needs at least one pattern")
    return WeightScheme.from_forbidden_set(patterns)


def _fmt6(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool) or not isinstance(value, float):
        return str(value)
    return f"{value:.6g}"


def _render_table(preamble: list[str], headers: list[str], rows: list[list]) -> str:
    cells = [[_fmt6(v) for v in row] for row in rows]
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in cells)) if cells else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [f"# {line}" for line in preamble]
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip())
    for row in cells:
        lines.append("  ".join(c.rjust(widths[i]) for i, c in enumerate(row)))
    return "\n".join(lines) + "\n"


def _render_csv(headers: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buffer.getvalue()


def _render(config: RunConfig, report: dict, preamble, headers, rows) -> str:
    if config.output_format == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if config.output_format == "csv":
        return _render_csv(headers, rows)
    return _render_table(preamble, headers, rows)


def _run_enumeration(config: RunConfig) -> tuple[int, str]:
    scheme = _scheme_from_config(config)
    lo, hi = config.n_range
    mode = "linear" if config.command == "enumerate" else "cyclic"
    compute = alpha_bruteforce if mode == "linear" else beta_bruteforce
    results = [
        compute(n, scheme, n_max=config.n_max, threads=config.threads)
        for n in range(lo, hi + 1)
    ]
    report = {
        "command": config.command,
        "scheme": scheme.to_json_dict(),
        "digest": scheme.digest,
        "results": [r.to_json_dict() for r in results],
    }
    preamble = [f"scheme {scheme.digest}", f"mode {mode}"]
    headers = ["n", "mode", "scheme", "value", "exact"]
    rows = [[r.n, mode, scheme.digest, r.value, r.exact] for r in results]
    return 0, _render(config, report, preamble, headers, rows)


def _run_montecarlo(config: RunConfig) -> tuple[int, str]:
    scheme = _scheme_from_config(config)
    lo, hi = config.n_range
    rows = []
    result_dicts = []
    for n in range(lo, hi + 1):
        est = beta_montecarlo(n, scheme, config.samples, config.seed)
        rows.append([n, est.mean, est.std_error, est.samples, est.seed])
        result_dicts.append({"n": n, **est.to_json_dict()})
    report = {
        "command": "montecarlo",
        "scheme": scheme.to_json_dict(),
        "digest": scheme.digest,
        "samples": config.samples,
        "seed": config.seed,
        "results": result_dicts,
    }
    preamble = [
        f"scheme {scheme.digest}",
        f"samples {config.samples} seed {config.seed}",
        "mean estimates beta_n / n!",
    ]
    headers = ["n", "mean", "std_error", "samples", "seed"]
    return 0, _render(config, report, preamble, headers, rows)


def _run_spectrum(config: RunConfig) -> tuple[int, str]:
    scheme = _scheme_from_config(config)
    matrix = assemble_operator(scheme, config.resolution, state_cap=config.state_cap)
    if config.leading_only:
        leading = top_eigenvalue(matrix, config.tol)
        pairs = [[leading, 0.0]]
        method = "power"
    else:
        top_k = config.top_k if config.top_k is not None else min(8, matrix.dim)
        spectrum = full_spectrum(matrix, top_k)
        pairs = [[z.real, z.imag] for z in spectrum.eigenvalues]
        method = "dense"
    traces = {}
    if config.traces is not None:
        lo, hi = config.traces
        traces = {
            str(n): value
            for n, value in trace_powers(matrix, range(lo, hi + 1)).items()
        }
    report = {
        "command": "spectrum",
        "scheme": scheme.digest,
        "N": config.resolution,
        "method": method,
        "eigenvalues": pairs,
        "traces": traces,
    }
    preamble = [
        f"scheme {scheme.digest}",
        f"N {config.resolution} dim {matrix.dim} method {method}",
    ]
    headers = ["kind", "scheme", "N", "index", "real", "imag"]
    rows = [
        ["eigenvalue", scheme.digest, config.resolution, i, re_, im_]
        for i, (re_, im_) in enumerate(pairs)
    ]
    rows += [
        ["trace", scheme.digest, config.resolution, int(n), value, None]
        for n, value in sorted(traces.items(), key=lambda kv: int(kv[0]))
    ]
    return 0, _render(config, report, preamble, headers, rows)


def _run_series(config: RunConfig) -> tuple[int, str]:
    compute = series_beta_123 if config.which == "beta123" else euler_series
    lo, hi = config.n_range
    results = [compute(n, config.tol) for n in range(lo, hi + 1)]
    report = {
        "command": "series",
        "which": config.which,
        "tol": config.tol,
        "results": [r.to_json_dict() for r in results],
    }
    preamble = [f"series {config.which} tol {config.tol:g}"]
    headers = ["n", "value", "terms_used", "tail_bound"]
    rows = [[r.n, r.value, r.terms_used, r.tail_bound] for r in results]
    return 0, _render(config, report, preamble, headers, rows)


def _run_verify(config: RunConfig) -> tuple[int, str]:
    names = list(config.checks) if config.checks is not None else None
    try:
        results = run_battery(names)
    except KeyError as exc:
        raise _UsageError(exc.args[0]) from exc
    passed = all(r.passed for r in results)
    report = {
        "command": "verify",
        "passed": passed,
        "checks": [r.to_json_dict() for r in results],
    }
    if config.output_format == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    elif config.output_format == "csv":
        text = _render_csv(
            ["name", "passed", "detail"],
            [[r.name, r.passed, r.detail] for r in results],
        )
    else:
        lines = [
            f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}" for r in results
        ]
        lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
        text = "\n".join(lines) + "\n"
    return (0 if passed else 3), text


_HANDLERS = {
    "enumerate": _run_enumeration,
    "cyclic": _run_enumeration,
    "montecarlo": _run_montecarlo,
    "spectrum": _run_spectrum,
    "series": _run_series,
    "verify": _run_verify,
}


def run(config: RunConfig) -> tuple[int, str]:
    """Dispatch one config; returns (exit code, rendered report)."""
    return _HANDLERS[config.command](config)


def main(argv=None) -> int:
    raw_threads = os.environ.get("CYCPERM_THREADS", "1")
    try:
        default_threads = int(raw_threads)
        if default_threads < 1:
            raise ValueError
    except ValueError:
        sys.stderr.write(
            f"cycperm: error: CYCPERM_THREADS must be a positive integer, "
            f"got {raw_threads!r}\n"
        )
        return 1
    parser = _build_parser(default_threads)
    try:
        namespace = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    config = _config_from_namespace(namespace)
    try:
        code, text = run(config)
        if config.output_path is not None:
            with open(config.output_path, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
    except _UsageError as exc:
        sys.stderr.write(f"cycperm: error: {exc}\n")
        return 1
    except CycpermError as exc:
        sys.stderr.write(f"cycperm: error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"cycperm: error: {exc}\n")
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
