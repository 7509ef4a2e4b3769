"""Command-line front end.

Exit status: 0 on success, 1 when a computation rejects its input
(domain, genericity, capacity errors), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .betti import planar_profile, spatial_profile, total_betti_bound
from .chambers import chamber_code, dump_orbits, enumerate_chamber_orbits
from .core import parse_lengths
from .errors import PolyspaceError
from .experiments import (
    DEFAULT_SAMPLES,
    ExperimentConfig,
    Invariant,
    convergence_scan,
    default_workers,
    scan_csv,
    timed_run,
    total_betti_avg,
    write_manifest,
)
from .measures import MeasureSpec, RngStream, Sampler, estimate_kn, relative_error_warning
from .volume import decimal, frustum_ratio, gamma_bounds, lambda_bound, r0, vj_ratio

DEFAULT_SEED = 0
FORMATS = ("text", "json", "csv")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _emit(fmt: str, text: str, payload, rows) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _csv(rows)
    return text if text.endswith("\n") else text + "\n"


# -- subcommands --------------------------------------------------------------


def cmd_betti(args) -> str:
    lv = parse_lengths(args.lengths)
    profile = planar_profile(lv) if args.space == "planar" else spatial_profile(lv)
    values = ",".join(map(str, profile.values))
    text = f"{profile.space} n={profile.n}: {values}"
    rows = [["degree", "betti"]] + [[d, v] for d, v in enumerate(profile.values)]
    return _emit(args.format, text, profile.to_dict(), rows)


def _rational_payload(label: str, value) -> tuple[str, dict, list]:
    payload = {"quantity": label, "exact": str(value), "decimal": decimal(value)}
    return f"{value}\t{decimal(value)}", payload, [["quantity", "exact", "decimal"], [label, str(value), decimal(value)]]


def cmd_volume(args) -> str:
    what = args.quantity
    if what == "r0":
        text, payload, rows = _rational_payload(f"r0(p={args.p},q={args.q})", r0(args.p, args.q))
    elif what == "frustum":
        text, payload, rows = _rational_payload(f"r(x={args.x},p={args.p},q={args.q})", frustum_ratio(args.x, args.p, args.q))
    elif what == "vj":
        text, payload, rows = _rational_payload(f"vj(n={args.n},p={args.p})", vj_ratio(args.n, args.p))
    elif what == "lambda":
        text, payload, rows = _rational_payload(f"lambda_bound(n={args.n},p={args.p})", lambda_bound(args.n, args.p))
    else:
        b = gamma_bounds(args.n, args.p)
        payload = {
            "quantity": f"gamma_lower_bound(n={args.n},p={args.p})",
            "headline": {"exact": str(b.headline), "decimal": decimal(b.headline)},
            "union": {"exact": str(b.union), "decimal": decimal(b.union)},
        }
        text = f"headline\t{b.headline}\t{decimal(b.headline)}\nunion\t{b.union}\t{decimal(b.union)}"
        rows = [["bound", "exact", "decimal"], ["headline", str(b.headline), decimal(b.headline)],
                ["union", str(b.union), decimal(b.union)]]
    return _emit(args.format, text, payload, rows)


def cmd_chambers(args) -> str:
    if args.action == "code":
        code = chamber_code(parse_lengths(args.lengths))
        payload = code.to_dict()
        rows = [["subset"]] + [[" ".join(map(str, s))] for s in code.maximal_shorts]
        return _emit(args.format, str(code), payload, rows)
    if args.n is None:
        raise _UsageError("chambers enumerate: --n is required")
    orbits = enumerate_chamber_orbits(args.n)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dump_orbits(orbits, args.n) + "\n")
    lines = [f"{len(orbits)} orbits"] + [f"{o.code}\t{','.join(o.witness.to_json())}" for o in orbits]
    payload = json.loads(dump_orbits(orbits, args.n))
    rows = [["code", "witness", "planar_betti", "spatial_betti"]]
    for o in payload["orbits"]:
        rows.append([json.dumps(o["code"]), " ".join(o["witness"]),
                     " ".join(map(str, o["planar_betti"])), " ".join(map(str, o["spatial_betti"]))])
    return _emit(args.format, "\n".join(lines), payload, rows)


def cmd_sample(args) -> str:
    spec = MeasureSpec(args.measure, args.n)
    vectors = Sampler(spec, RngStream(args.seed, args.shard)).vectors(args.count)
    payload = {"measure": spec.kind.value, "n": args.n, "seed": args.seed, "shard": args.shard,
               "samples": [v.to_json() for v in vectors]}
    text = "\n".join(",".join(v.to_json()) for v in vectors)
    rows = [[f"l{i}" for i in range(1, args.n + 1)]] + [v.to_json() for v in vectors]
    return _emit(args.format, text, payload, rows)


def _config(args, n=None) -> ExperimentConfig:
    return ExperimentConfig(
        measure=args.measure,
        invariant=Invariant(args.invariant, args.p, args.k),
        n=args.n if n is None else n,
        samples=args.samples,
        seed=args.seed,
        shards=args.shards,
    )


def _scan_rows(args):
    template = _config(args, n=args.n_from)
    return convergence_scan(template, range(args.n_from, args.n_to + 1), args.threads)


def cmd_experiment(args) -> str:
    if args.action == "run":
        if args.n is None:
            raise _UsageError("experiment run: --n is required")
        cfg = _config(args)
        est, seconds = timed_run(cfg, args.threads)
        if args.out:
            write_manifest(cfg, est, args.out, seconds)
        payload = est.to_dict()
        theory = "" if est.theory is None else f"  theory {est.theory!r}"
        text = f"{cfg.invariant.label()} n={cfg.n} {cfg.measure.value}: mean {est.mean!r} +/- {est.stderr!r}{theory}"
        rows = [["n", "estimate", "stderr", "theory", "count", "rejected"],
                [cfg.n, repr(est.mean), repr(est.stderr), "" if est.theory is None else repr(est.theory),
                 est.count, est.rejected]]
        return _emit(args.format, text, payload, rows)
    if args.action == "scan":
        rows = _scan_rows(args)
        if args.format == "json":
            return _emit("json", "", [r.__dict__ for r in rows], [])
        return scan_csv(rows)
    if args.action == "total":
        if args.n is None:
            raise _UsageError("experiment total: --n is required")
        report = total_betti_avg(args.n, args.measure, args.samples, args.seed, shards=args.shards,
                                 workers=args.threads)
        est = report.estimate
        text = f"total Betti n={args.n}: mean {est.mean!r} +/- {est.stderr!r}  bound {report.bound}"
        rows = [["value", "count"]] + [[k, v] for k, v in sorted(report.histogram.items())]
        return _emit(args.format, text, report.to_dict(), rows)
    # kn
    if args.n is None:
        raise _UsageError("experiment kn: --n is required")
    est = estimate_kn(args.n, args.samples, RngStream(args.seed, 0))
    warning = relative_error_warning(est)
    if warning:
        print(f"warning: {warning}", file=sys.stderr)
    text = f"k_{args.n} = {est.mean!r} +/- {est.stderr!r}"
    rows = [["n", "k_n", "stderr"], [args.n, repr(est.mean), repr(est.stderr)]]
    return _emit(args.format, text, est.to_dict(), rows)


def cmd_report(args) -> str:
    rows = _scan_rows(args)
    table = [["n", "abs_dev", "stderr", "log10_abs_dev"]]
    for r in rows:
        log_dev = "" if not r.abs_dev else repr(math.log10(r.abs_dev))
        table.append([r.n, repr(r.abs_dev), repr(r.stderr), log_dev])
    payload = {"y_scale": "log", "rows": [dict(zip(table[0], row)) for row in table[1:]]}
    return _emit("json" if args.format == "json" else "csv", "", payload, table)


# -- parser ------------------------------------------------------------------


def _add_format(p):
    p.add_argument("--format", choices=FORMATS, default="text")


def _add_experiment_flags(p):
    p.add_argument("--measure", choices=("uniform", "cube"), default="uniform")
    p.add_argument("--invariant", default="bettiM")
    p.add_argument("--p", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $POLYSPACE_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyspace", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"polyspace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("betti", help="Betti profile of a polygon space")
    p.add_argument("--space", choices=("planar", "spatial"), default="planar")
    p.add_argument("--lengths", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("chambers", help="chamber codes and orbit enumeration")
    p.add_argument("action", choices=("code", "enumerate"))
    p.add_argument("--lengths")
    p.add_argument("--n", type=int)
    p.add_argument("--out")
    _add_format(p)
    p.set_defaults(func=cmd_chambers)

    p = sub.add_parser("volume", help="exact slice volumes and region bounds")
    p.add_argument("quantity", choices=("r0", "frustum", "vj", "gamma", "lambda"))
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--x", default="0")
    _add_format(p)
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("sample", help="draw exact length vectors")
    p.add_argument("--measure", choices=("uniform", "cube"), default="uniform")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--shard", type=int, default=0)
    _add_format(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("experiment", help="Monte Carlo expectations")
    p.add_argument("action", choices=("run", "scan", "total", "kn"))
    p.add_argument("--n", type=int)
    p.add_argument("--n-from", type=int, default=8)
    p.add_argument("--n-to", type=int, default=20)
    p.add_argument("--out")
    _add_experiment_flags(p)
    _add_format(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="plot-ready CSV of deviation against n")
    p.add_argument("--n-from", type=int, default=8)
    p.add_argument("--n-to", type=int, default=20)
    _add_experiment_flags(p)
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.set_defaults(func=cmd_report)
    return parser


def _check_args(args) -> None:
    needs_q = getattr(args, "quantity", None) in ("r0", "frustum")
    if args.command == "volume":
        if needs_q and args.q is None:
            raise _UsageError(f"volume {args.quantity}: --q is required")
        if not needs_q and args.n is None:
            raise _UsageError(f"volume {args.quantity}: --n is required")
    if args.command == "chambers" and args.action == "code" and not args.lengths:
        raise _UsageError("chambers code: --lengths is required")
    if args.command in ("experiment", "report"):
        if args.threads is None:
            args.threads = default_workers()
        if args.command == "report" or args.action == "scan":
            if args.n_from > args.n_to:
                raise _UsageError("--n-from must not exceed --n-to")


def dispatch(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_args(args)
        text = args.func(args)
    except _UsageError as exc:
        msg = str(exc)
        if not msg.startswith("usage"):
            msg = f"{parser.format_usage()}polyspace: error: {msg}"
        print(msg, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except PolyspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out.write(text)
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
