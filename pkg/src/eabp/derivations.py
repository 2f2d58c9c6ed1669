"""Derivations D(zt) = D(z)t + zD(t) of the algebra.

A linear map D is stored as four blocks giving the images of the basis:

    D(e_k^f) = sum_i dff[k, i] e_i^f + sum_l dfm[k, l] e_l^m
    D(e_k^m) = sum_i dmf[k, i] e_i^f + sum_l dmm[k, l] e_l^m

The derivation condition on basis pairs is a homogeneous linear system in
the n^2 + 2 n nu + nu^2 block entries.  Unknowns are laid out as dff, dfm,
dmf, dmm, each row-major.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import RANK_TOL, null_space
from .algebra import AlgebraElement, InheritanceTensor, ShapeError, multiply, norm_l1


@dataclass(frozen=True, eq=False)
class DerivationMatrix:
    dff: np.ndarray  # (n, n)
    dfm: np.ndarray  # (n, nu)
    dmf: np.ndarray  # (nu, n)
    dmm: np.ndarray  # (nu, nu)

    def __post_init__(self):
        for name in ("dff", "dfm", "dmf", "dmm"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=float)))
        n, nu = self.dff.shape[0], self.dmm.shape[0]
        shapes = {"dff": (n, n), "dfm": (n, nu), "dmf": (nu, n), "dmm": (nu, nu)}
        for name, shape in shapes.items():
            if getattr(self, name).shape != shape:
                raise ShapeError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def n(self) -> int:
        return self.dff.shape[0]

    @property
    def nu(self) -> int:
        return self.dmm.shape[0]

    @classmethod
    def zeros(cls, n: int, nu: int) -> "DerivationMatrix":
        return cls(np.zeros((n, n)), np.zeros((n, nu)), np.zeros((nu, n)), np.zeros((nu, nu)))

    @classmethod
    def from_vector(cls, v: np.ndarray, n: int, nu: int) -> "DerivationMatrix":
        v = np.asarray(v, dtype=float)
        if v.shape != (unknown_count(n, nu),):
            raise ShapeError(f"vector of length {v.shape} does not fit n={n}, nu={nu}")
        a, b, c = n * n, n * n + n * nu, n * n + 2 * n * nu
        return cls(
            v[:a].reshape(n, n),
            v[a:b].reshape(n, nu),
            v[b:c].reshape(nu, n),
            v[c:].reshape(nu, nu),
        )

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.dff.ravel(), self.dfm.ravel(), self.dmf.ravel(), self.dmm.ravel()])

    def scaled(self, c: float) -> "DerivationMatrix":
        return DerivationMatrix(c * self.dff, c * self.dfm, c * self.dmf, c * self.dmm)


@dataclass(frozen=True)
class LinearSystem:
    """Coefficient matrix of the derivation constraints.

    Row blocks, in order:
      female-female pairs, female output   (k, j, i) over n, n, n
      female-female pairs, male output     (k, j, q) over n, n, nu
      male-male pairs, female output       (k, j, s) over nu, nu, n
      male-male pairs, male output         (k, j, q) over nu, nu, nu
      mixed pairs, female output           (i, j, s) over n, nu, n
      mixed pairs, male output             (i, j, t) over n, nu, nu
    The last index varies fastest.  Rows are not deduplicated.
    """

    entries: np.ndarray
    n: int
    nu: int
    unknown_layout: str = "dff, dfm, dmf, dmm (row-major)"

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


def unknown_count(n: int, nu: int) -> int:
    return n * n + 2 * n * nu + nu * nu


def _index(n: int, nu: int):
    off_fm = n * n
    off_mf = off_fm + n * nu
    off_mm = off_mf + nu * n
    return (
        lambda k, i: k * n + i,
        lambda k, l: off_fm + k * nu + l,
        lambda k, i: off_mf + k * n + i,
        lambda k, l: off_mm + k * nu + l,
    )


def build_derivation_system(T: InheritanceTensor) -> LinearSystem:
    n, nu = T.n, T.nu
    Pf, Pm = T.pf, T.pm
    ff, fm, mf, mm = _index(n, nu)
    rows = []

    def new_row():
        r = np.zeros(unknown_count(n, nu))
        rows.append(r)
        return r

    # D(e_k^f e_j^f) = 0
    for k in range(n):
        for j in range(n):
            for i in range(n):
                r = new_row()
                for l in range(nu):
                    r[fm(k, l)] += Pf[j, l, i]
                    r[fm(j, l)] += Pf[k, l, i]
    for k in range(n):
        for j in range(n):
            for q in range(nu):
                r = new_row()
                for l in range(nu):
                    r[fm(k, l)] += Pm[j, l, q]
                    r[fm(j, l)] += Pm[k, l, q]

    # D(e_k^m e_j^m) = 0
    for k in range(nu):
        for j in range(nu):
            for s in range(n):
                r = new_row()
                for i in range(n):
                    r[mf(k, i)] += Pf[i, j, s]
                    r[mf(j, i)] += Pf[i, k, s]
    for k in range(nu):
        for j in range(nu):
            for q in range(nu):
                r = new_row()
                for i in range(n):
                    r[mf(k, i)] += Pm[i, j, q]
                    r[mf(j, i)] += Pm[i, k, q]

    # D(e_i^f e_j^m) = D(e_i^f) e_j^m + e_i^f D(e_j^m)
    for i in range(n):
        for j in range(nu):
            for s in range(n):
                r = new_row()
                for p in range(n):
                    r[ff(i, p)] += Pf[p, j, s]
                    r[ff(p, s)] -= Pf[i, j, p]
                for q in range(nu):
                    r[mm(j, q)] += Pf[i, q, s]
                    r[mf(q, s)] -= Pm[i, j, q]
    for i in range(n):
        for j in range(nu):
            for t in range(nu):
                r = new_row()
                for p in range(n):
                    r[ff(i, p)] += Pm[p, j, t]
                    r[fm(p, t)] -= Pf[i, j, p]
                for q in range(nu):
                    r[mm(j, q)] += Pm[i, q, t]
                    r[mm(q, t)] -= Pm[i, j, q]

    return LinearSystem(np.array(rows), n, nu)


def derivation_basis(T: InheritanceTensor, rank_tol: float = RANK_TOL) -> list[DerivationMatrix]:
    """Orthonormal basis of Der(B), as unit vectors in the unknown layout.

    An empty list means only the zero map is a derivation.
    """
    system = build_derivation_system(T)
    K = null_space(system.entries, rank_tol)
    return [DerivationMatrix.from_vector(K[:, c], T.n, T.nu) for c in range(K.shape[1])]


def apply_derivation(D: DerivationMatrix, z: AlgebraElement) -> AlgebraElement:
    if z.x.shape != (D.n,) or z.y.shape != (D.nu,):
        raise ShapeError("element does not match derivation blocks")
    return AlgebraElement(D.dff.T @ z.x + D.dmf.T @ z.y, D.dfm.T @ z.x + D.dmm.T @ z.y)


def leibniz_residual(T: InheritanceTensor, D: DerivationMatrix) -> float:
    """max over basis pairs of ||D(e_p e_q) - D(e_p) e_q - e_p D(e_q)||_1.

    Uses only the product and apply_derivation, never the linear system, so
    it checks derivation_basis independently.
    """
    basis = T.basis()
    images = [apply_derivation(D, e) for e in basis]
    worst = 0.0
    for p, ep in enumerate(basis):
        for q in range(p, len(basis)):
            eq = basis[q]
            lhs = apply_derivation(D, multiply(T, ep, eq))
            rhs = multiply(T, images[p], eq) + multiply(T, ep, images[q])
            worst = max(worst, norm_l1(lhs - rhs))
    return worst
