import numpy as np
import pytest

from conftest import el, one_female, trivial
from eabp.algebra import (
    InheritanceTensor,
    SexDiffElement,
    ShapeError,
    StochasticityError,
    dibaric_image,
    evolve,
    jacobian,
    left_mult,
    left_mult_bound,
    multiply,
    norm_l1,
    plenary_power,
    sexdiff_multiply,
    validate_tensor,
)
from eabp.special import StochasticMatrixPair, expand_tensor


# hand-computed values, written before the implementation

def test_validate_trivial_tensor_ok():
    assert validate_tensor(trivial()).ok


def test_validate_reports_slice_and_residual():
    pm = np.array([[[0.3, 0.6], [0.5, 0.5]]])
    T = InheritanceTensor(1, 2, np.ones((1, 2, 1)), pm)
    report = validate_tensor(T)
    assert not report.ok
    (v,) = report.violations
    assert (v["array"], v["kind"], v["i"], v["k"]) == ("pm", "row_sum", 1, 1)
    assert v["residual"] == pytest.approx(0.1, abs=1e-12)


def test_validate_negative_entry():
    pm = np.array([[[1.2, -0.2], [0.5, 0.5]]])
    report = validate_tensor(InheritanceTensor(1, 2, np.ones((1, 2, 1)), pm))
    assert [v["kind"] for v in report.violations] == ["negative"]


def test_expanded_identity_pair_is_stochastic():
    assert validate_tensor(expand_tensor(StochasticMatrixPair(np.eye(2), np.eye(2)))).ok


def test_shape_errors_are_not_stochasticity_errors():
    with pytest.raises(ShapeError):
        InheritanceTensor(1, 2, np.ones((1, 1, 1)), np.ones((1, 2, 2)))
    with pytest.raises(ShapeError):
        InheritanceTensor(0, 1, np.ones((0, 1, 0)), np.ones((0, 1, 1)))
    with pytest.raises(StochasticityError) as info:
        InheritanceTensor.checked(1, 1, [[[0.5]]], [[[1.0]]])
    assert info.value.report.violations[0]["residual"] == pytest.approx(0.5)


def test_multiply_examples():
    T = one_female(0.0, 1.0)
    ef, em = el([1], [0, 0]), el([0], [1, 0])
    assert multiply(T, ef, em).allclose(el([0.5], [0, 0.5]))
    assert multiply(T, ef, ef).allclose(el([0], [0, 0]), 0.0)
    assert multiply(T, ef + em, ef).allclose(el([0.5], [0, 0.5]))


def test_evolve_examples():
    assert evolve(trivial(), el([0.5], [0.5])).allclose(el([0.25], [0.25]))
    T = one_female(0.3, 0.7)
    assert evolve(T, el([1], [1, 0])).allclose(el([1], [0.3, 0.7]))
    assert norm_l1(evolve(T, T.zero())) == 0.0


def test_plenary_power_examples():
    T = one_female(0.0, 1.0)
    z = el([1], [1, 0])
    assert plenary_power(T, z, 0) is z
    assert plenary_power(T, z, 2).allclose(el([1], [1, 0]))
    assert plenary_power(trivial(), el([0.5], [0.5]), 3).allclose(el([0.00390625], [0.00390625]), 0.0)
    with pytest.raises(ValueError):
        plenary_power(T, z, -1)


def test_norm_examples():
    assert norm_l1(el([1], [1])) == 2.0
    assert norm_l1(el([1, -1], [0.5])) == 2.5
    assert norm_l1(el([0], [0])) == 0.0


def test_left_mult_examples(rng):
    T = one_female(0.0, 1.0)
    M = left_mult(T, el([1], [0, 0]))
    np.testing.assert_allclose(M[:, 1], [0.5, 0, 0.5])
    assert not np.any(left_mult(T, T.zero()))
    a = el([1], [1, 0])
    for _ in range(200):
        z = T.element(rng.uniform(-1, 1, 3))
        assert np.abs(M @ z.to_vector()).sum() <= norm_l1(z) + 1e-12
        assert np.abs(left_mult(T, a) @ z.to_vector()).sum() <= left_mult_bound(a) * norm_l1(z) + 1e-12


def test_left_mult_matches_multiply(rng):
    T = InheritanceTensor.random(3, 2, rng)
    for _ in range(20):
        a, z = (T.element(rng.uniform(-1, 1, 5)) for _ in range(2))
        np.testing.assert_allclose(left_mult(T, a) @ z.to_vector(), multiply(T, a, z).to_vector(), atol=1e-14)


def test_dibaric_image_and_sexdiff():
    assert dibaric_image(el([1], [0])) == SexDiffElement(1.0, 0.0)
    d = dibaric_image(el([0.2, 0.3], [0.5]))
    assert (d.alpha, d.beta) == pytest.approx((0.5, 0.5))
    assert dibaric_image(el([0], [0])) == SexDiffElement(0.0, 0.0)
    w, m = SexDiffElement(1, 0), SexDiffElement(0, 1)
    assert sexdiff_multiply(w, m) == SexDiffElement(0.5, 0.5)
    assert sexdiff_multiply(w, w) == SexDiffElement(0.0, 0.0)
    assert sexdiff_multiply(SexDiffElement(1, 1), SexDiffElement(1, 1)) == SexDiffElement(1.0, 1.0)


@pytest.mark.parametrize("n,nu", [(1, 1), (2, 3), (3, 2), (4, 4)])
def test_algebra_invariants(n, nu, rng):
    T = InheritanceTensor.random(n, nu, rng)
    for _ in range(200):
        z, t = (T.element(rng.uniform(-1, 1, n + nu)) for _ in range(2))
        zt, tz = multiply(T, z, t), multiply(T, t, z)
        assert norm_l1(zt - tz) <= 1e-15
        assert abs(zt.x.sum() - zt.y.sum()) <= 1e-12
        assert norm_l1(evolve(T, z) - multiply(T, z, z)) <= 1e-12
    female_only = el(rng.uniform(-1, 1, n), np.zeros(nu))
    male_only = el(np.zeros(n), rng.uniform(-1, 1, nu))
    assert norm_l1(multiply(T, female_only, female_only)) == 0.0
    assert norm_l1(multiply(T, male_only, male_only)) == 0.0


def test_jacobian_matches_central_differences(rng):
    T = InheritanceTensor.random(2, 3, rng)
    h = 1e-6
    for _ in range(20):
        v = rng.uniform(-1, 1, 5)
        J = jacobian(T, T.element(v))
        fd = np.empty((5, 5))
        for c in range(5):
            e = np.zeros(5)
            e[c] = h
            fd[:, c] = (evolve(T, T.element(v + e)).to_vector() - evolve(T, T.element(v - e)).to_vector()) / (2 * h)
        assert np.abs(J - fd).max() <= 1e-6 * max(1.0, np.abs(J).max())


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        multiply(trivial(), el([1, 0], [1]), el([1], [1]))


def test_elements_are_immutable():
    z = el([1], [1])
    with pytest.raises(ValueError):
        z.x[0] = 2.0
