"""Seeded Monte Carlo estimates of Betti-number statistics over random linkages.

Sampling layout: the ``samples`` draws are cut into fixed-size blocks; block
``b`` always reads substream ``RngStream(seed, b)``.  Shards are contiguous
runs of blocks, so the shard count only changes who computes a block, never
what it contains.  Block tallies are pooled exactly (see ``stats.Tally``),
so estimates are bit-identical for every shard count and worker count.

Wall-hitting draws are replaced by the next draw of the same substream and
counted in ``Estimate.rejected``.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from math import comb, sqrt

import numpy as np

from . import __version__
from .betti import (
    batch_betti_m,
    batch_betti_n,
    batch_in_gamma,
    batch_in_lambda,
    batch_is_generic,
    batch_is_normal,
    batch_total_betti_m,
    total_betti_bound,
)
from .errors import CapacityError, DomainError
from .measures import RNG_ALGORITHM, MeasureKind, MeasureSpec, RngStream, Sampler
from .stats import Estimate, Tally
from .volume import gamma_bounds, lambda_bound

DEFAULT_SAMPLES = 100_000
DEFAULT_BLOCK = 4096
TOTAL_BETTI_CAP = 24

_KINDS = {
    "bettiM": ("p",),
    "bettiN": ("p",),
    "bettiM_pow": ("p", "k"),
    "bettiN_pow": ("p", "k"),
    "total_bettiM": (),
    "gamma": ("p",),
    "normal": (),
    "lambda": ("p",),
}
_ALIASES = {k.lower(): k for k in _KINDS} | {
    "bettim": "bettiM",
    "bettin": "bettiN",
    "totalbettim": "total_bettiM",
    "total": "total_bettiM",
    "gammaindicator": "gamma",
    "normalindicator": "normal",
    "lambdaindicator": "lambda",
}


@dataclass(frozen=True)
class Invariant:
    kind: str
    p: int | None = None
    k: int | None = None

    def __post_init__(self):
        kind = _ALIASES.get(self.kind.lower().replace("-", "_"), self.kind)
        if kind not in _KINDS:
            raise DomainError(f"unknown invariant {self.kind!r}; choose from {sorted(_KINDS)}")
        object.__setattr__(self, "kind", kind)
        needs = _KINDS[kind]
        if "p" in needs and self.p is None:
            raise DomainError(f"invariant {kind} needs p")
        if "k" in needs and (self.k is None or self.k < 1):
            raise DomainError(f"invariant {kind} needs k >= 1")
        if "p" not in needs:
            object.__setattr__(self, "p", None)
        if "k" not in needs:
            object.__setattr__(self, "k", None)

    def validate(self, n: int) -> None:
        if n < 3:
            raise DomainError(f"experiments need n >= 3, got {n}")
        p = self.p
        if self.kind.startswith("betti") and not 0 <= p <= n - 3:
            raise DomainError(f"{self.kind} needs 0 <= p <= {n - 3}, got {p}")
        if self.kind == "gamma" and not 0 <= p <= n:
            raise DomainError(f"gamma needs 0 <= p <= {n}, got {p}")
        if self.kind == "lambda" and p < 1:
            raise DomainError(f"lambda needs p >= 1, got {p}")
        if self.kind == "total_bettiM" and n > TOTAL_BETTI_CAP:
            raise CapacityError(f"total Betti numbers are capped at n <= {TOTAL_BETTI_CAP}")

    def theory(self, n: int) -> int | None:
        """Large-n limit of the expectation, where one is known."""
        if self.kind in ("bettiM", "bettiM_pow"):
            base = comb(n - 1, self.p)
        elif self.kind in ("bettiN", "bettiN_pow"):
            base = sum(comb(n - 1, i) for i in range(self.p + 1))
        else:
            return None
        return base ** (self.k or 1)

    def evaluate(self, weights: np.ndarray) -> np.ndarray:
        kind = self.kind
        if kind in ("bettiM", "bettiM_pow"):
            values = batch_betti_m(weights, self.p)
        elif kind in ("bettiN", "bettiN_pow"):
            values = batch_betti_n(weights, self.p)
        elif kind == "total_bettiM":
            values = batch_total_betti_m(weights)
        elif kind == "gamma":
            values = batch_in_gamma(weights, self.p).astype(np.int64)
        elif kind == "normal":
            values = batch_is_normal(weights).astype(np.int64)
        else:
            values = batch_in_lambda(weights, self.p).astype(np.int64)
        if self.k and self.k > 1:
            values = values.astype(object) ** self.k
        return values

    def label(self) -> str:
        args = [f"{name}={getattr(self, name)}" for name in ("p", "k") if getattr(self, name) is not None]
        return f"{self.kind}({','.join(args)})" if args else self.kind

    def to_dict(self) -> dict:
        return {"kind": self.kind, "p": self.p, "k": self.k}

    @classmethod
    def from_dict(cls, data: dict) -> Invariant:
        return cls(data["kind"], data.get("p"), data.get("k"))


@dataclass(frozen=True)
class ExperimentConfig:
    measure: MeasureKind
    invariant: Invariant
    n: int
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    shards: int = 1
    block_size: int = DEFAULT_BLOCK
    condition_gamma: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "measure", MeasureKind.parse(self.measure))
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples}")
        if self.shards < 1:
            raise DomainError(f"shards must be >= 1, got {self.shards}")
        if self.block_size < 1:
            raise DomainError(f"block size must be >= 1, got {self.block_size}")
        MeasureSpec(self.measure, self.n)
        self.invariant.validate(self.n)
        if self.condition_gamma is not None and not 0 <= self.condition_gamma < (self.n + 1) // 2:
            raise DomainError(f"conditioning on Gamma_{self.condition_gamma} is empty for n={self.n}")

    @property
    def spec(self) -> MeasureSpec:
        return MeasureSpec(self.measure, self.n)

    @property
    def blocks(self) -> int:
        return -(-self.samples // self.block_size)

    def shard_blocks(self) -> list[range]:
        """Contiguous block ranges, one per shard (possibly empty)."""
        per, extra = divmod(self.blocks, self.shards)
        out, start = [], 0
        for s in range(self.shards):
            size = per + (s < extra)
            out.append(range(start, start + size))
            start += size
        return out

    def to_dict(self) -> dict:
        d = {
            "measure": self.measure.value,
            "invariant": self.invariant.to_dict(),
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "shards": self.shards,
            "block_size": self.block_size,
        }
        if self.condition_gamma is not None:
            d["condition_gamma"] = self.condition_gamma
        return d

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        return cls(
            measure=data["measure"],
            invariant=Invariant.from_dict(data["invariant"]),
            n=int(data["n"]),
            samples=int(data["samples"]),
            seed=int(data["seed"]),
            shards=int(data.get("shards", 1)),
            block_size=int(data.get("block_size", DEFAULT_BLOCK)),
            condition_gamma=data.get("condition_gamma"),
        )


def _accept(cfg: ExperimentConfig):
    def accept(w: np.ndarray) -> np.ndarray:
        ok = batch_is_generic(w)
        if cfg.condition_gamma is not None:
            ok &= batch_in_gamma(w, cfg.condition_gamma)
        return ok

    return accept


def block_weights(cfg: ExperimentConfig, block: int) -> tuple[np.ndarray, int]:
    """Accepted snapped weights of one block and its rejection count."""
    size = min(cfg.block_size, cfg.samples - block * cfg.block_size)
    sampler = Sampler(cfg.spec, RngStream(cfg.seed, block))
    return sampler.weights(size, accept=_accept(cfg))


def run_blocks(cfg: ExperimentConfig, blocks, histogram: bool = False) -> tuple[Tally, dict]:
    tally = Tally()
    hist: dict[int, int] = {}
    for b in blocks:
        w, rejected = block_weights(cfg, b)
        values = cfg.invariant.evaluate(w)
        tally.add(values)
        tally.rejected += rejected
        if histogram:
            vals, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
            for v, c in zip(vals.tolist(), counts.tolist()):
                hist[v] = hist.get(v, 0) + c
    return tally, hist


def _run_shard(args):
    cfg_dict, blocks, histogram = args
    return run_blocks(ExperimentConfig.from_dict(cfg_dict), blocks, histogram)


def default_workers() -> int:
    return max(1, int(os.environ.get("POLYSPACE_THREADS", "1")))


def _pooled(cfg: ExperimentConfig, workers: int | None, histogram: bool) -> tuple[Tally, dict]:
    workers = default_workers() if workers is None else workers
    shards = cfg.shard_blocks()
    if workers > 1 and cfg.shards > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_shard, [(cfg.to_dict(), r, histogram) for r in shards]))
    else:
        parts = [run_blocks(cfg, r, histogram) for r in shards]
    tally, hist = Tally(), {}
    for t, h in parts:
        tally = tally.merge(t)
        for v, c in h.items():
            hist[v] = hist.get(v, 0) + c
    return tally, hist


def run_expectation(cfg: ExperimentConfig, workers: int | None = None) -> Estimate:
    """Monte Carlo mean of the configured invariant under the configured measure."""
    tally, _ = _pooled(cfg, workers, histogram=False)
    extras = {}
    inv = cfg.invariant
    if inv.kind == "gamma" and inv.p >= 1:
        bounds = gamma_bounds(cfg.n, inv.p)
        extras = {"gamma_lower_bound": str(bounds.headline), "gamma_union_bound": str(bounds.union)}
    elif inv.kind == "lambda":
        extras = {"lambda_bound": str(lambda_bound(cfg.n, inv.p))}
    elif inv.kind == "total_bettiM":
        extras = {"total_betti_bound": total_betti_bound(cfg.n)}
    return Estimate.from_tally(tally, theory=inv.theory(cfg.n), config=cfg.to_dict(), extras=extras)


@dataclass(frozen=True)
class ScanRow:
    n: int
    estimate: float
    stderr: float
    theory: float | None
    abs_dev: float | None


def convergence_scan(template: ExperimentConfig, n_values, workers: int | None = None) -> list[ScanRow]:
    rows = []
    for n in n_values:
        est = run_expectation(replace(template, n=n), workers)
        rows.append(ScanRow(n, est.mean, est.stderr, est.theory, est.deviation))
    return rows


def smoothed(values, window: int = 3) -> list[float]:
    """Centered moving average; the ends use the available neighbours."""
    half = window // 2
    out = []
    for i in range(len(values)):
        chunk = values[max(0, i - half):i + half + 1]
        out.append(sum(chunk) / len(chunk))
    return out


def trend_violations(rows: list[ScanRow], sigmas: float = 4.0) -> list[tuple[int, float, float]]:
    """Places where the smoothed deviation rises by more than the noise allows.

    The smoothed deviation at each n must not exceed the previous one by
    more than ``sigmas`` times the smoothed standard error.
    """
    devs = smoothed([r.abs_dev for r in rows])
    errs = smoothed([r.stderr for r in rows])
    bad = []
    for i in range(1, len(rows)):
        allowed = devs[i - 1] + sigmas * max(errs[i], errs[i - 1])
        if devs[i] > allowed:
            bad.append((rows[i].n, devs[i], allowed))
    return bad


def scan_csv(rows: list[ScanRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "estimate", "stderr", "theory", "abs_dev"])
    for r in rows:
        writer.writerow([r.n, repr(r.estimate), repr(r.stderr), "" if r.theory is None else repr(r.theory),
                         "" if r.abs_dev is None else repr(r.abs_dev)])
    return buf.getvalue()


@dataclass
class TotalBettiReport:
    estimate: Estimate
    bound: int
    histogram: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate.to_dict(),
            "bound": self.bound,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def total_betti_avg(n: int, measure="uniform", samples: int = DEFAULT_SAMPLES, seed: int = 0, *,
                    shards: int = 1, condition_gamma: int | None = None,
                    workers: int | None = None) -> TotalBettiReport:
    """Average total planar Betti number, its value histogram and the upper bound."""
    cfg = ExperimentConfig(measure, Invariant("total_bettiM"), n, samples, seed, shards,
                           condition_gamma=condition_gamma)
    tally, hist = _pooled(cfg, workers, histogram=True)
    bound = total_betti_bound(n)
    est = Estimate.from_tally(tally, config=cfg.to_dict(), extras={"total_betti_bound": bound})
    return TotalBettiReport(est, bound, hist)


# -- manifests ---------------------------------------------------------------


def manifest_dict(cfg: ExperimentConfig, result: Estimate, wall_clock: float | None = None) -> dict:
    return {
        "tool": "polyspace",
        "version": __version__,
        "rng": RNG_ALGORITHM,
        "config": cfg.to_dict(),
        "shard_layout": {
            "block_size": cfg.block_size,
            "blocks": cfg.blocks,
            "shards": [[r.start, r.stop] for r in cfg.shard_blocks()],
        },
        "results": result.to_dict(),
        "timing": {
            "finished_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "wall_clock_seconds": wall_clock,
        },
    }


def write_manifest(cfg: ExperimentConfig, result: Estimate, path, wall_clock: float | None = None) -> None:
    """Write the run manifest; only the ``timing`` field varies between reruns."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest_dict(cfg, result, wall_clock), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def rerun_manifest(path, workers: int | None = None) -> Estimate:
    data = read_manifest(path)
    return run_expectation(ExperimentConfig.from_dict(data["config"]), workers)


def timed_run(cfg: ExperimentConfig, workers: int | None = None) -> tuple[Estimate, float]:
    start = time.perf_counter()
    est = run_expectation(cfg, workers)
    return est, time.perf_counter() - start


def jensen_gap(first: Estimate, second: Estimate) -> float:
    """``E[X^2] - E[X]^2`` measured in combined standard errors (should be > -5)."""
    err = sqrt(second.stderr**2 + (2 * first.mean * first.stderr) ** 2)
    return (second.mean - first.mean**2) / err if err else float("inf")

