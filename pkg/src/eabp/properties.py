"""Checkable algebraic properties: associators, power-associativity gaps,
characters, the dibaric homomorphism and the L_a norm bound.

Sampling searches only falsify.  A ``none_found`` verdict is evidence,
never a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import (
    AlgebraElement,
    InheritanceTensor,
    _conform,
    dibaric_image,
    left_mult,
    left_mult_bound,
    multiply,
    norm_l1,
    sexdiff_multiply,
)

PROPERTIES = ("associativity", "power_associativity", "character", "dibaric", "norm_bound")
VERDICTS = ("holds", "fails", "none_found")


@dataclass
class PropertyReport:
    property_name: str
    verdict: str
    witness: Optional[tuple[AlgebraElement, ...]] = None
    residual: float = 0.0

    def __post_init__(self):
        if self.property_name not in PROPERTIES:
            raise ValueError(f"unknown property {self.property_name!r}")
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "fails" and not self.witness:
            raise ValueError("a failing report needs a witness")


@dataclass
class CharacterReport:
    """Outcome of solving sigma(e_p e_q) = sigma(e_p) sigma(e_q).

    ``characters`` holds the nonzero solutions as (a, b) coefficient pairs.
    The certificate fields make an empty answer auditable.
    """

    characters: list[tuple[np.ndarray, np.ndarray]]
    constraint_count: int
    diagonal_square_norms: list[float]
    forced_zero: list[int]
    candidate: np.ndarray
    max_residual: float
    residuals: np.ndarray = field(repr=False)


def sample_cube(T: InheritanceTensor, rng: np.random.Generator, box: float = 1.0) -> AlgebraElement:
    return T.element(rng.uniform(-box, box, T.dim))


def associator(T: InheritanceTensor, z: AlgebraElement, t: AlgebraElement, u: AlgebraElement) -> AlgebraElement:
    """(zt)u - z(tu)."""
    _conform(T, z, t, u)
    return multiply(T, multiply(T, z, t), u) - multiply(T, z, multiply(T, t, u))


def power_assoc_gap(T: InheritanceTensor, z: AlgebraElement) -> float:
    """||(z^2)^2 - ((z^2)z)z||_1."""
    z2 = multiply(T, z, z)
    lhs = multiply(T, z2, z2)
    rhs = multiply(T, multiply(T, z2, z), z)
    return norm_l1(lhs - rhs)


def find_associativity_violation(
    T: InheritanceTensor, trials: int = 100, seed: int = 0, tol: float = 1e-9
) -> PropertyReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        z, t, u = (sample_cube(T, rng) for _ in range(3))
        r = norm_l1(associator(T, z, t, u))
        if r > tol:
            return PropertyReport("associativity", "fails", (z, t, u), r)
        worst = max(worst, r)
    return PropertyReport("associativity", "none_found", None, worst)


def find_power_assoc_violation(
    T: InheritanceTensor, trials: int = 100, seed: int = 0, tol: float = 1e-9
) -> PropertyReport:
    """First z from [-1, 1]^(n+nu) whose power-associativity gap exceeds tol."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        z = sample_cube(T, rng)
        gap = power_assoc_gap(T, z)
        if gap > tol:
            return PropertyReport("power_associativity", "fails", (z,), gap)
        worst = max(worst, gap)
    return PropertyReport("power_associativity", "none_found", None, worst)


def find_characters(T: InheritanceTensor, tol: float = 1e-12) -> CharacterReport:
    """Nonzero linear sigma(z) = a.x + b.y with sigma(zt) = sigma(z) sigma(t).

    By bilinearity it suffices to impose the condition on basis pairs,
    giving one equation c . (e_p e_q) = c_p c_q per unordered pair.  A
    diagonal pair with e_p e_p = 0 reads c_p^2 = 0 and pins c_p = 0.
    """
    if not isinstance(T, InheritanceTensor):
        raise TypeError("find_characters expects an InheritanceTensor")
    basis = T.basis()
    d = T.dim
    products = {}
    for p in range(d):
        for q in range(p, d):
            products[p, q] = multiply(T, basis[p], basis[q]).to_vector()

    diag = [float(np.abs(products[p, p]).sum()) for p in range(d)]
    forced = [p for p in range(d) if diag[p] <= tol]
    free = [p for p in range(d) if diag[p] > tol]
    if free:
        # cannot happen for a bisexual tensor: every e_p squares to zero
        raise NotImplementedError(f"basis vectors {free} have nonzero squares")

    candidate = np.zeros(d)
    residuals = np.array(
        [abs(candidate @ prod - candidate[p] * candidate[q]) for (p, q), prod in products.items()]
    )
    max_res = float(residuals.max(initial=0.0))
    chars = []
    if max_res <= tol and np.abs(candidate).max(initial=0.0) > tol:
        chars.append((candidate[: T.n].copy(), candidate[T.n :].copy()))
    return CharacterReport(
        characters=chars,
        constraint_count=len(products),
        diagonal_square_norms=diag,
        forced_zero=forced,
        candidate=candidate,
        max_residual=max_res,
        residuals=residuals,
    )


def dibaric_residual(T: InheritanceTensor, z: AlgebraElement, t: AlgebraElement) -> float:
    """max-norm of phi(zt) - phi(z) phi(t)."""
    lhs = dibaric_image(multiply(T, z, t))
    rhs = sexdiff_multiply(dibaric_image(z), dibaric_image(t))
    return max(abs(lhs.alpha - rhs.alpha), abs(lhs.beta - rhs.beta))


def check_dibaric(T: InheritanceTensor, pairs: int = 1000, seed: int = 0, tol: float = 1e-12) -> PropertyReport:
    rng = np.random.default_rng(seed)
    worst, witness = 0.0, None
    for _ in range(pairs):
        z, t = sample_cube(T, rng), sample_cube(T, rng)
        r = dibaric_residual(T, z, t)
        if r > worst:
            worst, witness = r, (z, t)
    if worst > tol:
        return PropertyReport("dibaric", "fails", witness, worst)
    return PropertyReport("dibaric", "holds", None, worst)


def check_norm_bound(T: InheritanceTensor, pairs: int = 1000, seed: int = 0, tol: float = 1e-12) -> PropertyReport:
    """Sampled slack of ||L_a z|| <= max(||a_f||, ||a_m||) ||z||; residual is the worst excess."""
    rng = np.random.default_rng(seed)
    worst, witness = -np.inf, None
    for _ in range(pairs):
        a, z = sample_cube(T, rng), sample_cube(T, rng)
        excess = float(np.abs(left_mult(T, a) @ z.to_vector()).sum()) - left_mult_bound(a) * norm_l1(z)
        if excess > worst:
            worst, witness = excess, (a, z)
    if worst > tol:
        return PropertyReport("norm_bound", "fails", witness, worst)
    return PropertyReport("norm_bound", "holds", None, max(worst, 0.0))


def property_suite(T: InheritanceTensor, trials: int = 100, seed: int = 0, tol: float = 1e-9) -> list[PropertyReport]:
    # the character system is solved exactly, so an empty answer is a proof
    chars = find_characters(T)
    if chars.characters:
        a, b = chars.characters[0]
        char_report = PropertyReport("character", "fails", (AlgebraElement(a, b),), chars.max_residual)
    else:
        char_report = PropertyReport("character", "holds", None, chars.max_residual)
    return [
        find_associativity_violation(T, trials, seed, tol),
        find_power_assoc_violation(T, trials, seed, tol),
        char_report,
        check_dibaric(T, trials, seed),
        check_norm_bound(T, trials, seed),
    ]
