"""Probability measures on the open simplex and their samplers.

Two families are supported:

* ``uniform`` -- normalized Lebesgue measure, drawn as normalized
  independent unit-rate exponentials;
* ``cube`` -- bar lengths iid uniform on (0, 1], then rescaled to sum 1.
  Its density with respect to the uniform measure is ``k_n |l|^-n``.

Float draws are snapped to integer weights on a 2**-52 grid before any
predicate is evaluated, so the vector a sample stands for is an exact
rational and every downstream classification is exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import ceil

import numpy as np

from .core import LengthVector
from .errors import DomainError
from .stats import Estimate, Tally

SNAP_BITS = 52
RNG_ALGORITHM = "numpy PCG64, SeedSequence(entropy=seed, spawn_key=(shard,))"


class MeasureKind(enum.Enum):
    UNIFORM = "uniform"
    CUBE = "cube"

    @classmethod
    def parse(cls, value) -> MeasureKind:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown measure {value!r}; use 'uniform' or 'cube'") from None


@dataclass(frozen=True)
class MeasureSpec:
    kind: MeasureKind
    n: int

    def __post_init__(self):
        object.__setattr__(self, "kind", MeasureKind.parse(self.kind))
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        # int64 weights: twice the total must stay below 2**63
        if self.n > 63:
            raise DomainError(f"n must be at most 63, got {self.n}")


@dataclass(frozen=True)
class RngStream:
    """Independent substream ``shard`` of the stream keyed by ``seed``."""

    seed: int
    shard: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 1 << 64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.shard < 0:
            raise DomainError(f"shard index must be non-negative, got {self.shard}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.shard,))
        return np.random.Generator(np.random.PCG64(seq))


def draw_floats(spec: MeasureSpec, gen: np.random.Generator, count: int) -> np.ndarray:
    """``count`` raw positive float vectors (not yet normalized)."""
    if spec.kind is MeasureKind.UNIFORM:
        return gen.standard_exponential((count, spec.n))
    return 1.0 - gen.random((count, spec.n))


def snap(raw: np.ndarray) -> np.ndarray:
    """Normalize rows and round onto the 2**-52 grid as int64 weights."""
    x = raw / raw.sum(axis=1, keepdims=True)
    return np.rint(np.ldexp(x, SNAP_BITS)).astype(np.int64)


class Sampler:
    """Sequential draws from one substream; zero-weight rows are redrawn and counted."""

    def __init__(self, spec: MeasureSpec, rng: RngStream):
        self.spec = spec
        self.rng = rng
        self._gen = rng.generator()
        self.degenerate = 0

    def weights(self, count: int, accept=None) -> tuple[np.ndarray, int]:
        """``count`` snapped rows plus the number rejected by ``accept``.

        ``accept`` maps a weight block to a boolean mask; rejected rows are
        replaced by the next draws of the same stream.
        """
        out = np.empty((count, self.spec.n), dtype=np.int64)
        filled = 0
        rejected = 0
        while filled < count:
            w = snap(draw_floats(self.spec, self._gen, count - filled))
            positive = (w > 0).all(axis=1)
            bad = int((~positive).sum())
            self.degenerate += bad
            rejected += bad
            w = w[positive]
            if accept is not None:
                good = accept(w)
                rejected += int((~good).sum())
                w = w[good]
            out[filled:filled + len(w)] = w
            filled += len(w)
        return out, rejected

    def vectors(self, count: int) -> list[LengthVector]:
        w, _ = self.weights(count)
        return [LengthVector.from_weights([int(v) for v in row]) for row in w]


def sample(spec: MeasureSpec, rng: RngStream) -> LengthVector:
    """First vector of the substream ``rng``; normalized, exact, positive."""
    return Sampler(spec, rng).vectors(1)[0]


def density_cube(lv: LengthVector, k_n) -> float:
    """``k_n * |l|^-n`` for a normalized vector."""
    top = lv.max_coord / sum(lv.coords)
    return float(k_n) * float(top) ** (-lv.n)


def _max_power(weights: np.ndarray) -> np.ndarray:
    n = weights.shape[1]
    ratio = weights.sum(axis=1) / weights.max(axis=1)
    return ratio.astype(np.float64) ** n


def estimate_kn(n: int, samples: int, rng: RngStream, block: int = 1 << 14) -> Estimate:
    """Monte Carlo estimate of the cube-density constant ``k_n``.

    ``1/k_n`` is the uniform-measure mean of ``|l|^-n``; the integrand lies
    in ``[1, n^n]``.  The returned stderr comes from the delta method.
    """
    if n < 1 or samples < 1:
        raise DomainError(f"need n >= 1 and samples >= 1, got n={n}, samples={samples}")
    config = {"n": n, "samples": samples, "seed": rng.seed, "shard": rng.shard}
    if n == 1:
        return Estimate(1.0, 0.0, 0.0, samples, theory=1.0, config=config)
    spec = MeasureSpec(MeasureKind.UNIFORM, n)
    sampler = Sampler(spec, rng)
    tally = Tally()
    for lo in range(0, samples, block):
        w, _ = sampler.weights(min(block, samples - lo))
        tally.add(_max_power(w))
    tally.rejected = sampler.degenerate
    inv = Estimate.from_tally(tally)
    mean = 1.0 / inv.mean
    stderr = inv.stderr / inv.mean**2
    return Estimate(
        mean=mean,
        variance=stderr**2 * samples,
        stderr=stderr,
        count=samples,
        rejected=tally.rejected,
        config=config,
        extras={"inverse_mean": inv.mean, "inverse_stderr": inv.stderr},
    )


def admissibility_heuristic(ns, p: int, samples: int, seed: int) -> dict:
    """Largest sampled cube density on Lambda_p per n, and a fitted ``A b^n``.

    Only a heuristic: the property concerns the whole sequence of measures.
    """
    from .betti import batch_in_lambda

    maxima = {}
    for n in ns:
        kn = estimate_kn(n, samples, RngStream(seed, 0)).mean
        w, _ = Sampler(MeasureSpec(MeasureKind.UNIFORM, n), RngStream(seed, 1)).weights(samples)
        inside = batch_in_lambda(w, p)
        if inside.any():
            maxima[n] = float(kn * _max_power(w[inside]).max())
    if len(maxima) < 2:
        return {"maxima": maxima, "A": None, "b": None}
    xs = np.array(sorted(maxima), dtype=float)
    ys = np.log([maxima[int(x)] for x in xs])
    slope, intercept = np.polyfit(xs, ys, 1)
    return {"maxima": maxima, "A": float(np.exp(intercept)), "b": float(np.exp(slope))}


def blocks_for(samples: int, block_size: int) -> int:
    return ceil(samples / block_size)


def relative_error_warning(est: Estimate, limit: float = 0.05) -> str | None:
    rel = est.relative_stderr
    if rel > limit:
        return f"relative standard error {rel:.1%} exceeds {limit:.0%}; increase --samples"
    return None

