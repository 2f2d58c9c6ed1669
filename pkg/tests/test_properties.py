import numpy as np
import pytest

from conftest import el, one_female, trivial
from eabp.algebra import InheritanceTensor, multiply, norm_l1
from eabp.properties import (
    PropertyReport,
    associator,
    check_dibaric,
    check_norm_bound,
    find_associativity_violation,
    find_characters,
    find_power_assoc_violation,
    power_assoc_gap,
    property_suite,
)


def test_associator_witness():
    T = one_female(0.0, 1.0)
    ef, em = el([1], [0, 0]), el([0], [1, 0])
    assert norm_l1(multiply(T, ef, multiply(T, em, em))) == 0.0
    a = associator(T, ef, em, em)
    assert a.allclose(el([0.25], [0, 0.25]), 1e-15)
    assert norm_l1(a) == pytest.approx(0.5, abs=1e-12)


def test_associator_trivial_cases(rng):
    T = InheritanceTensor.random(2, 2, rng)
    z, t, u = (T.element(rng.uniform(-1, 1, 4)) for _ in range(3))
    assert norm_l1(associator(T, z, z, z)) <= 1e-15
    assert norm_l1(associator(T, T.zero(), t, u)) == 0.0
    assert norm_l1(associator(T, 3.0 * z, t, u) - 3.0 * associator(T, z, t, u)) <= 1e-12


def test_power_assoc_gap_examples():
    z = el([1], [1, 0])
    assert power_assoc_gap(one_female(0.0, 1.0), z) == pytest.approx(1.5, abs=1e-12)
    assert power_assoc_gap(one_female(0.5, 0.5), z) <= 1e-15
    assert power_assoc_gap(one_female(0.0, 1.0), el([0], [0, 0])) == 0.0


def test_power_assoc_gap_vanishes_on_single_sex(rng):
    T = InheritanceTensor.random(3, 2, rng)
    assert power_assoc_gap(T, el(rng.uniform(-1, 1, 3), [0, 0])) <= 1e-12
    assert power_assoc_gap(T, el([0, 0, 0], rng.uniform(-1, 1, 2))) <= 1e-12


def test_power_assoc_violation_found():
    r = find_power_assoc_violation(one_female(0.0, 1.0), trials=100, seed=0)
    assert r.verdict == "fails" and r.residual > 1e-9
    (z,) = r.witness
    assert power_assoc_gap(one_female(0.0, 1.0), z) == r.residual


def test_trivial_tensor_is_not_power_associative():
    # with V(x, y) = (xy, xy) the gap is 2|x^2 y^2 - xy(x + y)^2 / 4|, zero only on
    # x = y or xy = 0; an earlier hand argument claiming it vanishes is wrong
    T = trivial()
    for x, y in [(1.0, 0.5), (0.3, -0.7), (2.0, 0.0), (0.4, 0.4)]:
        expected = 2 * abs(x * x * y * y - 0.25 * x * y * (x + y) ** 2)
        assert power_assoc_gap(T, el([x], [y])) == pytest.approx(expected, abs=1e-15)
    r = find_power_assoc_violation(T, trials=100, seed=0)
    assert r.verdict == "fails"


def test_power_assoc_search_is_deterministic():
    T = one_female(0.2, 0.9)
    a = find_power_assoc_violation(T, trials=1, seed=7)
    b = find_power_assoc_violation(T, trials=1, seed=7)
    assert a.verdict == b.verdict and a.residual == b.residual
    assert a.witness[0].allclose(b.witness[0], 0.0)
    with pytest.raises(ValueError):
        find_power_assoc_violation(T, trials=0)


def test_associativity_violation_found():
    r = find_associativity_violation(one_female(0.0, 1.0))
    assert r.verdict == "fails" and len(r.witness) == 3


@pytest.mark.parametrize("T", [trivial(), one_female(0.0, 1.0), one_female(0.3, 0.7)])
def test_no_characters_examples(T):
    rep = find_characters(T)
    assert rep.characters == []
    d = T.dim
    assert rep.constraint_count == d * (d + 1) // 2
    assert rep.forced_zero == list(range(d))
    assert rep.max_residual == 0.0


def test_characters_rejects_other_inputs():
    with pytest.raises(TypeError):
        find_characters("not a tensor")


def test_property_report_needs_witness_to_fail():
    with pytest.raises(ValueError):
        PropertyReport("associativity", "fails", None, 1.0)
    with pytest.raises(ValueError):
        PropertyReport("commutativity", "holds")


def test_dibaric_and_norm_bound_hold(rng):
    T = InheritanceTensor.random(3, 3, rng)
    assert check_dibaric(T, pairs=300, seed=1).verdict == "holds"
    assert check_norm_bound(T, pairs=300, seed=1).verdict == "holds"


def test_property_suite_shape():
    reports = property_suite(one_female(0.0, 1.0), trials=50, seed=3)
    verdicts = {r.property_name: r.verdict for r in reports}
    assert verdicts == {
        "associativity": "fails",
        "power_associativity": "fails",
        "character": "holds",
        "dibaric": "holds",
        "norm_bound": "holds",
    }
