import numpy as np
import pytest

from conftest import el, trivial
from eabp.algebra import InheritanceTensor, ShapeError, jacobian, norm_l1
from eabp.dynamics import check_fixed_point_necessary
from eabp.oracle import (
    SearchConfig,
    brute_force_solutions,
    evolve_batch,
    grid_seeds,
    jacobian_batch,
    sample_elements,
)
from eabp.special import StochasticMatrixPair, evolve_special, idempotents


def test_trivial_idempotents():
    roots = brute_force_solutions(trivial(), "idempotent")
    assert len(roots) == 2
    assert any(r.allclose(el([1], [1]), 1e-9) for r in roots)
    assert any(r.allclose(el([0], [0]), 1e-9) for r in roots)


def test_trivial_nilpotents_lie_on_axes():
    roots = brute_force_solutions(trivial(), "nilpotent")
    assert len(roots) > 2
    for r in roots:
        assert abs(r.x[0] * r.y[0]) <= 1e-12
        assert min(abs(r.x[0]), abs(r.y[0])) <= 1e-6


def test_identity_pair_recovers_every_part():
    P = StochasticMatrixPair(np.eye(2), np.eye(2))
    roots = brute_force_solutions(P, "idempotent")
    S = idempotents(P)
    seen = set()
    for r in roots:
        assert S.distance(r) <= 1e-6
        assert check_fixed_point_necessary(r, 1e-9)
        for p, lab in zip(S.points, S.point_labels):
            if norm_l1(r - p) <= 1e-6:
                seen.add(lab + str(p.to_vector().round(6).tolist()))
        for f in S.families:
            if f.distance(r) <= 1e-6 and f.admits(r):
                seen.add(f.case_label)
    assert {"I0", "I1"} <= seen
    assert len(seen) == 5


def test_roots_satisfy_equation():
    P = StochasticMatrixPair.random(2, 2, np.random.default_rng(3))
    cfg = SearchConfig(grid_points_per_axis=5)
    for eq, target in (("idempotent", 1.0), ("nilpotent", 0.0)):
        for z in brute_force_solutions(P, eq, cfg):
            assert norm_l1(evolve_special(P, z) - target * z) <= cfg.newton_tol
            assert np.all(np.abs(z.to_vector()) <= 2.0 + 1e-9)


def test_batched_kernels_match_scalar(rng):
    T = InheritanceTensor.random(3, 2, rng)
    Z = rng.uniform(-1, 1, (6, 5))
    J = jacobian_batch(T, Z)
    for m in range(6):
        np.testing.assert_allclose(J[m], jacobian(T, T.element(Z[m])), atol=1e-15)
    h = 1e-6
    for m in range(6):
        fd = np.empty((5, 5))
        for c in range(5):
            e = np.zeros(5)
            e[c] = h
            fd[:, c] = (evolve_batch(T, (Z[m] + e)[None])[0] - evolve_batch(T, (Z[m] - e)[None])[0]) / (2 * h)
        assert np.abs(fd - J[m]).max() <= 1e-6 * max(1.0, np.abs(J[m]).max())


def test_guards():
    with pytest.raises(ShapeError):
        brute_force_solutions(InheritanceTensor.random(4, 3, np.random.default_rng(0)), "idempotent")
    with pytest.raises(ValueError):
        brute_force_solutions(trivial(), "square")
    with pytest.raises(TypeError):
        brute_force_solutions("tensor", "idempotent")
    with pytest.raises(ValueError):
        SearchConfig(grid_points_per_axis=1)
    with pytest.raises(ValueError):
        SearchConfig(box=(1.0, 1.0))


def test_grid_and_jitter():
    seeds = grid_seeds(2, SearchConfig(grid_points_per_axis=3))
    assert seeds.shape == (9, 2)
    assert sorted(set(seeds[:, 0])) == [-2.0, 0.0, 2.0]
    a = grid_seeds(2, SearchConfig(grid_points_per_axis=3, jitter=0.1, seed=4))
    b = grid_seeds(2, SearchConfig(grid_points_per_axis=3, jitter=0.1, seed=4))
    np.testing.assert_array_equal(a, b)
    assert np.abs(a - seeds).max() <= 0.2


def test_sample_elements():
    assert sample_elements(2, 2, 0, seed=1) == []
    a = sample_elements(2, 3, 5, seed=1)
    b = sample_elements(2, 3, 5, seed=1)
    assert all(u.allclose(v, 0.0) for u, v in zip(a, b))
    big = sample_elements(3, 2, 1000, seed=2, box=(-1.0, 1.0))
    assert all(np.all(np.abs(z.to_vector()) <= 1.0) for z in big)
    assert all(z.n == 3 and z.nu == 2 for z in big)
    with pytest.raises(ValueError):
        sample_elements(1, 1, -1, seed=0)
