from fractions import Fraction
from math import factorial, sqrt

import numpy as np
import pytest
from scipy import stats

from polyspace.betti import batch_in_lambda
from polyspace.core import LengthVector
from polyspace.errors import DomainError
from polyspace.measures import (
    MeasureKind,
    MeasureSpec,
    RngStream,
    Sampler,
    SNAP_BITS,
    admissibility_heuristic,
    density_cube,
    draw_floats,
    estimate_kn,
    relative_error_warning,
    sample,
)
from polyspace.volume import lambda_bound

F = Fraction
SEED = 20240611

# 1/k_3 by scipy dblquad over the 2-simplex, computed once and frozen
K3_INVERSE_QUADRATURE = 6.000000061347877


def uniform(n):
    return MeasureSpec(MeasureKind.UNIFORM, n)


def cube(n):
    return MeasureSpec(MeasureKind.CUBE, n)


def mean_within(values, target, sigmas=4.0):
    values = np.asarray(values, dtype=float)
    se = values.std(ddof=1) / sqrt(len(values))
    return abs(values.mean() - target) <= sigmas * se


@pytest.mark.parametrize("spec", [uniform(3), uniform(9), cube(4), cube(11)])
@pytest.mark.parametrize("seed", [0, 1, 2**64 - 1])
def test_sample_postconditions(spec, seed):
    v = sample(spec, RngStream(seed, 3))
    assert v.n == spec.n
    assert sum(v.coords) == 1
    assert all(c > 0 for c in v.coords)


def test_weights_are_exact_grid_points():
    w, rejected = Sampler(uniform(6), RngStream(SEED)).weights(1000)
    assert rejected == 0
    assert (w > 0).all()
    assert (np.abs(w.sum(axis=1) - (1 << SNAP_BITS)) <= 6).all()


def test_determinism_by_seed_and_shard():
    a = draw_floats(uniform(5), RngStream(7, 2).generator(), 50)
    b = draw_floats(uniform(5), RngStream(7, 2).generator(), 50)
    c = draw_floats(uniform(5), RngStream(7, 3).generator(), 50)
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != c.tobytes()
    w1, _ = Sampler(cube(8), RngStream(1)).weights(300)
    w2, _ = Sampler(cube(8), RngStream(1)).weights(300)
    assert np.array_equal(w1, w2)


def test_rejections_are_counted_and_replaced():
    sampler = Sampler(uniform(4), RngStream(5))
    w, rejected = sampler.weights(500, accept=lambda rows: rows[:, 0] < rows[:, 1])
    assert len(w) == 500 and (w[:, 0] < w[:, 1]).all()
    assert 300 < rejected < 800


def test_invalid_specs():
    with pytest.raises(DomainError):
        MeasureSpec("gaussian", 4)
    with pytest.raises(DomainError):
        MeasureSpec("uniform", 0)
    with pytest.raises(DomainError):
        RngStream(-1)
    with pytest.raises(DomainError):
        RngStream(2**64)


def test_uniform_coordinate_means():
    w, _ = Sampler(uniform(5), RngStream(SEED)).weights(100_000)
    x = w / float(1 << SNAP_BITS)
    for i in range(5):
        assert mean_within(x[:, i], 0.2)


def test_cube_is_not_uniform():
    n, count = 8, 200_000
    u, _ = Sampler(uniform(n), RngStream(SEED, 0)).weights(count)
    c, _ = Sampler(cube(n), RngStream(SEED, 1)).weights(count)
    pu = (2 * u[:, :2].sum(axis=1) >= u.sum(axis=1)).mean()
    pc = (2 * c[:, :2].sum(axis=1) >= c.sum(axis=1)).mean()
    se = sqrt(pu * (1 - pu) / count + pc * (1 - pc) / count)
    assert abs(pu - 1 / 16) <= 4 * sqrt(pu * (1 - pu) / count)
    assert abs(pu - pc) > 6 * se


@pytest.mark.parametrize("n, p", [(5, 1), (8, 2), (12, 4)])
def test_partial_sums_follow_beta(n, p):
    w, _ = Sampler(uniform(n), RngStream(SEED, n)).weights(100_000)
    s = w[:, :p].sum(axis=1) / w.sum(axis=1).astype(float)
    assert stats.kstest(s, stats.beta(p, n - p).cdf).pvalue > 1e-3


def test_density_cube_examples():
    assert density_cube(LengthVector((1,)), 1) == 1
    assert density_cube(LengthVector((F(1, 2), F(1, 2))), F(1, 2)) == 2
    assert density_cube(LengthVector((F(1, 2), F(1, 4), F(1, 4))), 1) == 8


def test_k1_exact():
    est = estimate_kn(1, 10, RngStream(0))
    assert est.mean == 1 and est.stderr == 0


def test_k2_closed_form():
    est = estimate_kn(2, 100_000, RngStream(SEED))
    assert est.within(0.5, 4)


def test_k3_quadrature_oracle():
    est = estimate_kn(3, 100_000, RngStream(SEED))
    assert est.within(1 / K3_INVERSE_QUADRATURE, 4)


@pytest.mark.parametrize("n", [4, 5])
def test_kn_factorial(n):
    # change of variables from the unit cube gives k_n = 1/n!
    est = estimate_kn(n, 200_000, RngStream(SEED, n))
    assert est.within(1 / factorial(n), 4)


@pytest.mark.parametrize("n", [10, 15, 20])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_lambda_mass_below_bound(n, p):
    count = 50_000
    w, _ = Sampler(uniform(n), RngStream(SEED, 100 + n)).weights(count)
    hits = batch_in_lambda(w, p)
    m = hits.mean()
    se = sqrt(max(m * (1 - m), 1e-12) / count)
    assert m <= float(lambda_bound(n, p)) + 4 * se


def test_admissibility_heuristic_reports():
    out = admissibility_heuristic([4, 6, 8], 1, 2000, SEED)
    assert set(out["maxima"]) == {4, 6, 8}
    assert out["b"] is not None and out["b"] > 0


def test_relative_error_warning():
    noisy = estimate_kn(12, 200, RngStream(1))
    quiet = estimate_kn(2, 50_000, RngStream(1))
    assert relative_error_warning(quiet) is None
    msg = relative_error_warning(noisy, limit=1e-6)
    assert msg is not None and "increase --samples" in msg
