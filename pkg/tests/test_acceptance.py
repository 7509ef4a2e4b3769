"""Acceptance criteria, each checked at its stated tolerance.

Every criterion records one PASS/FAIL line; the lines are printed in the
pytest terminal summary, or directly when this file is run as a script::

    python3 tests/test_acceptance.py
"""

import json
import random
import sys
import time
from dataclasses import replace
from fractions import Fraction
from math import comb, sqrt
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from polyspace.betti import betti_m, betti_n, planar_profile, spatial_profile  # noqa: E402
from polyspace.chambers import enumerate_chamber_orbits  # noqa: E402
from polyspace.core import LengthVector, is_generic  # noqa: E402
from polyspace.experiments import (  # noqa: E402
    ExperimentConfig,
    Invariant,
    convergence_scan,
    rerun_manifest,
    run_expectation,
    smoothed,
    trend_violations,
    write_manifest,
)
from polyspace.measures import MeasureKind, MeasureSpec, RngStream, Sampler  # noqa: E402
from polyspace.volume import beta_tail_half, gamma_lower_bound, r0, vj_ratio  # noqa: E402

SEED = 12345
SAMPLES = 100_000
RESULTS: list[str] = []

pytestmark = pytest.mark.acceptance


def record(label: str, passed: bool, detail: str) -> bool:
    line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
    RESULTS.append(line)
    print(line, flush=True)
    return passed


def uniform_run(kind, n, p=None, k=None, measure="uniform", samples=SAMPLES):
    cfg = ExperimentConfig(measure, Invariant(kind, p, k), n, samples, SEED)
    return run_expectation(cfg)


def test_1_chamber_counts():
    expected = {3: 2, 4: 3, 5: 7, 6: 21, 7: 135}
    start = time.perf_counter()
    got = {n: len(enumerate_chamber_orbits(n)) for n in expected}
    elapsed = time.perf_counter() - start
    ok = got == expected and elapsed <= 300
    assert record("1 chamber counts n=3..7", ok, f"{got} in {elapsed:.1f}s (budget 300s)")


def test_1x_chamber_count_eight():
    start = time.perf_counter()
    count = len(enumerate_chamber_orbits(8))
    elapsed = time.perf_counter() - start
    ok = count == 2470 and elapsed <= 3600
    assert record("1x chamber count n=8 (non-gating)", ok, f"{count} in {elapsed:.1f}s")


def test_2_pentagon_profiles():
    start = time.perf_counter()
    pent = LengthVector.equilateral(5)
    planar = planar_profile(pent).values
    spatial = spatial_profile(pent).values[::2]
    coords = list(pent.coords)
    oracle_planar = tuple(oracles.betti_m(coords, p) for p in range(3))
    oracle_spatial = tuple(oracles.betti_n(coords, p) for p in range(3))
    elapsed = time.perf_counter() - start
    ok = planar == oracle_planar == (1, 8, 1) and spatial == oracle_spatial == (1, 5, 1) and elapsed < 1
    assert record("2 pentagon profiles", ok,
                  f"planar {planar} oracle {oracle_planar}; spatial {spatial} oracle {oracle_spatial}; {elapsed:.3f}s")


def test_3_frustum_identities():
    start = time.perf_counter()
    bad = []
    for total in range(2, 21):
        for p in range(1, total):
            q = total - p
            if r0(p, q) + r0(q, p) != 1:
                bad.append(("complement", p, q))
            if beta_tail_half(p, q) != r0(p, q) or oracles.beta_upper_tail_half(p, q) != r0(p, q):
                bad.append(("beta", p, q))
    for n in range(5, 31):
        for p in range(1, min(5, n - 1) + 1):
            if not vj_ratio(n, p) < Fraction(n**p, 2**n):
                bad.append(("power bound", n, p))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    assert record("3 frustum identities", ok, f"{len(bad)} violations {bad[:3]}; {elapsed:.2f}s")


def test_4_sampler_pair_mass():
    start = time.perf_counter()
    n, count = 8, 1_000_000
    sampler = Sampler(MeasureSpec(MeasureKind.UNIFORM, n), RngStream(SEED))
    hits = 0
    for lo in range(0, count, 1 << 17):
        w, _ = sampler.weights(min(1 << 17, count - lo))
        hits += int((2 * w[:, :2].sum(axis=1) >= w.sum(axis=1)).sum())
    m = hits / count
    target = float(vj_ratio(8, 2))
    se = sqrt(m * (1 - m) / count)
    elapsed = time.perf_counter() - start
    ok = abs(m - target) <= 4 * se and elapsed < 60
    assert record("4 sampler P(l1+l2>=1/2), n=8", ok,
                  f"{m:.6f} vs {target} (|dev| {abs(m - target):.2e}, 4se {4 * se:.2e}); {elapsed:.1f}s")


def test_5a_betti_m_expectation():
    est = uniform_run("bettiM", 15, p=1)
    tol = max(0.1, 4 * est.stderr)
    assert record("5a E[b_1(M)] n=15 vs 14", est.deviation <= tol,
                  f"{est.mean:.5f} +/- {est.stderr:.5f}, |dev| {est.deviation:.4f}, tol {tol:.4f}")


def test_5b_betti_n_expectation():
    est = uniform_run("bettiN", 15, p=1)
    tol = max(0.1, 4 * est.stderr)
    assert record("5b E[b_2(N)] n=15 vs 15", est.deviation <= tol,
                  f"{est.mean:.5f} +/- {est.stderr:.5f}, |dev| {est.deviation:.4f}, tol {tol:.4f}")


def test_5c_convergence_scan():
    start = time.perf_counter()
    template = ExperimentConfig("uniform", Invariant("bettiM", 1), 8, SAMPLES, SEED)
    rows = convergence_scan(template, range(8, 21))
    bad = trend_violations(rows)
    devs = smoothed([r.abs_dev for r in rows])
    elapsed = time.perf_counter() - start
    trace = " ".join(f"{r.n}:{d:.3g}" for r, d in zip(rows, devs))
    assert record("5c scan n=8..20 smoothed |dev| non-increasing", not bad,
                  f"violations {bad}; smoothed {trace}; {elapsed:.1f}s")


def test_6_universality():
    start = time.perf_counter()
    fails = []
    for n in range(12, 19):
        for p in (0, 1):
            u = uniform_run("bettiM", n, p=p)
            c = uniform_run("bettiM", n, p=p, measure="cube")
            diff = abs(u.mean - c.mean)
            tol = 4 * sqrt(u.stderr**2 + c.stderr**2)
            if diff > tol:
                fails.append(f"n={n},p={p}: {diff:.4f}>{tol:.4f}")
    elapsed = time.perf_counter() - start
    ok = not fails and elapsed < 600
    assert record("6 universality uniform vs cube, n=12..18, p=0,1", ok,
                  f"{14 - len(fails)}/14 agree; {'; '.join(fails[:4])}{' ...' if len(fails) > 4 else ''}; {elapsed:.1f}s")


def test_7_second_moment():
    start = time.perf_counter()
    est = uniform_run("bettiM_pow", 15, p=1, k=2)
    tol = max(1.0, 4 * est.stderr)
    elapsed = time.perf_counter() - start
    ok = est.deviation <= tol and elapsed < 120
    assert record("7 E[b_1(M)^2] n=15 vs 196", ok,
                  f"{est.mean:.4f} +/- {est.stderr:.4f}, |dev| {est.deviation:.4f}, tol {tol:.4f}; {elapsed:.1f}s")


def test_8_region_bounds():
    start = time.perf_counter()
    parts, ok = [], True
    for n in (16, 20, 24):
        est = uniform_run("gamma", n, p=2)
        bound = float(gamma_lower_bound(n, 2))
        good = est.mean >= bound - 4 * est.stderr
        ok &= good
        parts.append(f"gamma2 n={n} {est.mean:.5f}>={bound:.5f}" if good else f"gamma2 n={n} {est.mean:.5f}<{bound:.5f}")
    normal = uniform_run("normal", 16)
    gamma3 = uniform_run("gamma", 16, p=3)
    good = normal.mean >= gamma3.mean - 4 * normal.stderr
    ok &= good
    parts.append(f"normal {normal.mean:.5f} vs gamma3 {gamma3.mean:.5f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    assert record("8 region bounds", ok, f"{'; '.join(parts)}; {elapsed:.1f}s")


def _corpus(seed, size, max_n):
    rng = random.Random(seed)
    out = []
    while len(out) < size:
        n = rng.randint(3, max_n)
        v = LengthVector([Fraction(rng.randint(1, 60), rng.choice([1, 2, 5])) for _ in range(n)])
        if is_generic(v):
            out.append(v)
    return out


def test_9_property_suites(tmp_path):
    problems = []
    rng = random.Random(SEED)
    cases = 0
    while cases < 1000:
        n = rng.randint(3, 10)
        v = LengthVector([rng.randint(1, 10**6) for _ in range(n)])
        if not is_generic(v):
            continue
        perm = list(range(n))
        rng.shuffle(perm)
        w = v.permuted(perm)
        for p in range(n - 2):
            if betti_m(w, p) != betti_m(v, p) or betti_n(w, p) != betti_n(v, p):
                problems.append(f"permutation {v.to_json()} {perm}")
            if betti_m(v, p) != betti_m(v, n - 3 - p):
                problems.append(f"duality {v.to_json()} p={p}")
        cases += 1

    for v in _corpus(SEED, 300, 8):
        coords = list(v.coords)
        for p in range(v.n - 2):
            if betti_m(v, p) != oracles.betti_m(coords, p) or betti_n(v, p) != oracles.betti_n(coords, p):
                problems.append(f"oracle {v.to_json()} p={p}")

    cfg = ExperimentConfig("uniform", Invariant("bettiN", 1), 12, 20_000, SEED, block_size=2048)
    one = run_expectation(cfg)
    eight = run_expectation(replace(cfg, shards=8))
    if one.exact_mean != eight.exact_mean or one.variance != eight.variance:
        problems.append("shard invariance")
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    write_manifest(cfg, one, first, wall_clock=0.0)
    write_manifest(cfg, rerun_manifest(first), second, wall_clock=0.0)
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    a.pop("timing"), b.pop("timing")
    if json.dumps(a, sort_keys=True).encode() != json.dumps(b, sort_keys=True).encode():
        problems.append("manifest round-trip bytes")

    assert record("9 property suites", not problems,
                  f"1000 permutation cases, 300 oracle vectors, shards 1 vs 8, manifest bytes; "
                  f"{len(problems)} problems {problems[:3]}")


if __name__ == "__main__":
    import tempfile

    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                pass
    print("\n".join(["", "summary:"] + RESULTS))
    sys.exit(0 if all(line.startswith("PASS") for line in RESULTS) else 1)
