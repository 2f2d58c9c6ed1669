"""The algebra B1 built from a pair of stochastic matrices (A, B).

Type 1 parents are preferred: a pair with a type-1 male produces daughters
distributed by the row of A for the mother, otherwise only type-1
daughters; sons mirror this with B and the mother's type.  The evolution
operator then reads

    x'_1 = y_1 (A^T x)_1 + (Y - y_1) X      x'_j = y_1 (A^T x)_j   (j >= 2)
    y'_1 = x_1 (B^T y)_1 + (X - x_1) Y      y'_l = x_1 (B^T y)_l   (l >= 2)

with X = sum x, Y = sum y.  This module enumerates the idempotents
(z^2 = z) and absolute nilpotents (z^2 = 0) exactly, as finite unions of
points and affine families.

Reduced matrices acting on (x_2..x_n) are applied as M^T v: their entries
are indexed (summed row, output column).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as Poly

from ._linalg import DET_TOL, det_polynomial, is_singular, is_zero_poly, real_roots, solve_affine
from .algebra import TOL_STOCH, AlgebraElement, InheritanceTensor, ShapeError, evolve, norm_l1
from .dynamics import linear_forms

TOL_MEMBER = 1e-9
# coordinate tests such as "x_1 != 0" and "s is an eigen-parameter"
COORD_TOL = 1e-7

IDEMPOTENT_LABELS = ("H0", "I0", "I1", "I2", "I3")
NILPOTENT_LABELS = tuple(f"N{c}_{a}{b}" for c in range(3) for a in "01" for b in "01")


class InternalInconsistency(RuntimeError):
    """An emitted solution failed its defining equation."""


class StochasticMatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class StochasticMatrixPair:
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.A, dtype=float))
        B = np.atleast_2d(np.array(self.B, dtype=float))
        for name, M in (("A", A), ("B", B)):
            if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
                raise ShapeError(f"{name} must be a nonempty square matrix, got shape {M.shape}")
            if not np.all(np.isfinite(M)):
                raise ShapeError(f"{name} has non-finite entries")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def nu(self) -> int:
        return self.B.shape[0]

    def violations(self, tol_stoch: float = TOL_STOCH) -> list[dict]:
        out = []
        for name, M in (("A", self.A), ("B", self.B)):
            for i, row in enumerate(M):
                residual = float(1.0 - row.sum())
                if abs(residual) > tol_stoch:
                    out.append({"matrix": name, "kind": "row_sum", "row": i + 1, "residual": residual})
                if row.min() < -tol_stoch:
                    out.append({"matrix": name, "kind": "negative", "row": i + 1, "residual": float(row.min())})
        return out

    @classmethod
    def checked(cls, A, B, tol_stoch: float = TOL_STOCH) -> "StochasticMatrixPair":
        pair = cls(A, B)
        bad = pair.violations(tol_stoch)
        if bad:
            raise StochasticMatrixError(f"matrices are not stochastic: {bad[0]}")
        return pair

    @classmethod
    def random(cls, n: int, nu: int, rng: np.random.Generator) -> "StochasticMatrixPair":
        A = rng.random((n, n)) + 1e-3
        B = rng.random((nu, nu)) + 1e-3
        return cls(A / A.sum(axis=1, keepdims=True), B / B.sum(axis=1, keepdims=True))

    def is_identity(self, tol: float = TOL_STOCH) -> bool:
        return bool(
            np.abs(self.A - np.eye(self.n)).max() <= tol and np.abs(self.B - np.eye(self.nu)).max() <= tol
        )

    def swapped(self) -> "StochasticMatrixPair":
        return StochasticMatrixPair(self.B, self.A)

    def element(self, vector) -> AlgebraElement:
        return AlgebraElement.from_vector(vector, self.n)


def expand_tensor(P: StochasticMatrixPair) -> InheritanceTensor:
    n, nu = P.n, P.nu
    pf = np.zeros((n, nu, n))
    pm = np.zeros((n, nu, nu))
    pf[:, 0, :] = P.A
    pf[:, 1:, 0] = 1.0
    pm[0, :, :] = P.B
    pm[1:, :, 0] = 1.0
    return InheritanceTensor(n, nu, pf, pm)


def evolve_special(P: StochasticMatrixPair, z: AlgebraElement) -> AlgebraElement:
    if z.x.shape != (P.n,) or z.y.shape != (P.nu,):
        raise ShapeError(f"element does not match pair sizes ({P.n}, {P.nu})")
    x, y = z.x, z.y
    X, Y = x.sum(), y.sum()
    ax = P.A.T @ x
    by = P.B.T @ y
    xn = y[0] * ax
    xn[0] += (Y - y[0]) * X
    yn = x[0] * by
    yn[0] += (X - x[0]) * Y
    return AlgebraElement(xn, yn)


def _scale(z: AlgebraElement) -> float:
    return max(1.0, norm_l1(z)) ** 2


def is_idempotent(P: StochasticMatrixPair, z: AlgebraElement, tol: float = TOL_MEMBER) -> bool:
    return norm_l1(evolve_special(P, z) - z) <= tol


def is_absolute_nilpotent(P: StochasticMatrixPair, z: AlgebraElement, tol: float = TOL_MEMBER) -> bool:
    return norm_l1(evolve_special(P, z)) <= tol


# --------------------------------------------------------------------------
# solution sets


@dataclass(eq=False)
class Family:
    """anchor + span(basis), minus the hyperplanes listed in exclusions.

    An exclusion (c, v) removes members with c . z == v (flat coordinates).
    """

    anchor: AlgebraElement
    basis: list[AlgebraElement]
    constraints: str
    case_label: str
    exclusions: list[tuple[np.ndarray, float]] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def _matrix(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((self.anchor.n + self.anchor.nu, 0))
        return np.column_stack([b.to_vector() for b in self.basis])

    def admits(self, z: AlgebraElement, tol: float = COORD_TOL) -> bool:
        v = z.to_vector()
        return all(abs(c @ v - val) > tol for c, val in self.exclusions)

    def sample(self, rng: np.random.Generator, count: int = 10) -> list[AlgebraElement]:
        """Members with basis coefficients uniform in [-1, 1]."""
        out = []
        if not self.basis:
            return [self.anchor] if self.admits(self.anchor) else []
        M = self._matrix()
        a = self.anchor.to_vector()
        for _ in range(50 * count):
            if len(out) == count:
                break
            z = AlgebraElement.from_vector(a + M @ rng.uniform(-1, 1, M.shape[1]), self.anchor.n)
            if self.admits(z):
                out.append(z)
        return out

    def distance(self, z: AlgebraElement) -> float:
        """l1 distance from z to the affine hull (exclusions ignored)."""
        d = z.to_vector() - self.anchor.to_vector()
        M = self._matrix()
        if M.shape[1]:
            d = d - M @ np.linalg.lstsq(M, d, rcond=None)[0]
        return float(np.abs(d).sum())

    def swapped(self) -> "Family":
        n = self.anchor.n
        return Family(
            _swap(self.anchor),
            [_swap(b) for b in self.basis],
            self.constraints,
            self.case_label,
            [(np.concatenate([c[n:], c[:n]]), v) for c, v in self.exclusions],
        )


@dataclass
class EmptyCase:
    case_label: str
    certificate: str


@dataclass
class UnresolvedCase:
    case_label: str
    diagnostics: str


@dataclass
class SolutionSet:
    kind: str  # "idempotent" or "nilpotent"
    points: list[AlgebraElement] = field(default_factory=list)
    point_labels: list[str] = field(default_factory=list)
    families: list[Family] = field(default_factory=list)
    empties: list[EmptyCase] = field(default_factory=list)
    unresolved: list[UnresolvedCase] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.unresolved and not any(e.certificate.startswith("unsupported") for e in self.empties)

    def add(self, fam: Family, tol: float = COORD_TOL) -> None:
        """File a family, demoting zero-dimensional ones to points."""
        if fam.basis:
            if _exclusions_attainable(fam, tol):
                self.families.append(fam)
            else:
                self.empties.append(EmptyCase(fam.case_label, f"{fam.constraints}; excluded hyperplane contains the family"))
            return
        if not fam.admits(fam.anchor, tol):
            self.empties.append(EmptyCase(fam.case_label, f"{fam.constraints}; only candidate is excluded"))
            return
        self.add_point(fam.anchor, fam.case_label)

    def add_point(self, z: AlgebraElement, label: str) -> None:
        if any(norm_l1(z - p) <= 1e-9 * max(1.0, norm_l1(z)) and lab == label
               for p, lab in zip(self.points, self.point_labels)):
            return
        self.points.append(z)
        self.point_labels.append(label)

    def distance(self, z: AlgebraElement) -> float:
        dists = [norm_l1(z - p) for p in self.points] + [f.distance(z) for f in self.families]
        return min(dists, default=np.inf)

    def labels(self) -> list[str]:
        return list(self.point_labels) + [f.case_label for f in self.families]


def _swap(z: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(z.y, z.x)


def _exclusions_attainable(fam: Family, tol: float) -> bool:
    a = fam.anchor.to_vector()
    M = fam._matrix()
    for c, v in fam.exclusions:
        if abs(c @ a - v) <= tol and np.abs(c @ M).max(initial=0.0) <= tol:
            return False
    return True


def _e1(k: int) -> np.ndarray:
    e = np.zeros(k)
    e[0] = 1.0
    return e


def _slice(rows: list, rhs: list, k: int):
    """Affine solution set of stacked linear conditions on a k-vector."""
    if not rows:
        return np.zeros(k), np.eye(k)
    M = np.vstack([np.atleast_2d(r) for r in rows])
    b = np.concatenate([np.atleast_1d(np.asarray(v, dtype=float)) for v in rhs])
    return solve_affine(M, b)


def _product(label: str, xs, ys, n: int, nu: int, constraints: str, exclusions=()) -> Optional[Family]:
    """Family {(x, y)} from independent affine slices of x and y."""
    if xs is None or ys is None:
        return None
    (xa, xK), (ya, yK) = xs, ys
    basis = [AlgebraElement(xK[:, c], np.zeros(nu)) for c in range(xK.shape[1])]
    basis += [AlgebraElement(np.zeros(n), yK[:, c]) for c in range(yK.shape[1])]
    return Family(AlgebraElement(xa, ya), basis, constraints, label, list(exclusions))


def _coord(n: int, nu: int, which: str, index: int = 0) -> np.ndarray:
    c = np.zeros(n + nu)
    c[index if which == "x" else n + index] = 1.0
    return c


def _mass(n: int, nu: int, which: str) -> np.ndarray:
    c = np.zeros(n + nu)
    if which == "x":
        c[:n] = 1.0
    else:
        c[n:] = 1.0
    return c


def _verify(P: StochasticMatrixPair, S: SolutionSet, residual: Callable, tol: float, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    for z, lab in zip(S.points, S.point_labels):
        r = residual(z)
        if r > tol * _scale(z):
            raise InternalInconsistency(f"{S.kind} point {z} ({lab}) has residual {r:.3e}")
    for fam in S.families:
        members = fam.sample(rng, 10)
        if fam.admits(fam.anchor):
            members.append(fam.anchor)
        for z in members:
            r = residual(z)
            if r > tol * _scale(z):
                raise InternalInconsistency(
                    f"{S.kind} family {fam.case_label} ({fam.constraints}) has member {z} with residual {r:.3e}"
                )


# --------------------------------------------------------------------------
# idempotents


def _reduced(M: np.ndarray) -> np.ndarray:
    """Entries m_ij - m_1j for i, j >= 2: M acting on the sum-zero hyperplane."""
    return M[1:, 1:] - M[0:1, 1:]


def h0_matrix(M: np.ndarray, t: float) -> np.ndarray:
    """The C_y (or D_x) matrix: (m_ij - m_1j) t - delta_ij, i, j >= 2."""
    k = M.shape[0] - 1
    return t * _reduced(M) - np.eye(k)


def h0_matrix_from_operator(P: StochasticMatrixPair, y1: float) -> np.ndarray:
    """C_{y1} rebuilt by probing evolve_special on the H0 slice.

    Column i-2 holds the female coordinates 2..n of V(z) - z for
    x = e_i - e_1 and a male part with y_1 = y1 and Y = 0; only the
    reduced form of the first-coordinate-free equations survives.
    Returned transposed so it compares entrywise with ``h0_matrix``.
    """
    n, nu = P.n, P.nu
    y = np.zeros(nu)
    y[0] = y1
    if nu > 1:
        y[1] = -y1
    cols = []
    for i in range(1, n):
        x = np.zeros(n)
        x[i], x[0] = 1.0, -1.0
        z = AlgebraElement(x, y)
        cols.append((evolve_special(P, z).x - x)[1:])
    return np.array(cols)


def _h0_idempotents(P: StochasticMatrixPair, S: SolutionSet, rank_tol: float) -> None:
    n, nu = P.n, P.nu
    detC = det_polynomial(lambda t: h0_matrix(P.A, t), n - 1)
    detD = det_polynomial(lambda t: h0_matrix(P.B, t), nu - 1)
    y_roots = [s for s in real_roots(detC) if abs(s) > COORD_TOL]
    x_roots = [r for r in real_roots(detD) if abs(r) > COORD_TOL]
    if not x_roots or not y_roots:
        which = "det(D_x)" if not x_roots else "det(C_y)"
        S.empties.append(
            EmptyCase("H0", f"{which} has no nonzero real root, so x1*y1 != 0 is impossible in H0; only z = 0")
        )
        return
    MA, MB = _reduced(P.A), _reduced(P.B)
    ones_x, ones_y = np.ones((1, n - 1)), np.ones((1, nu - 1))
    for r in x_roots:
        for s in y_roots:
            # x_j = s sum_i (a_ij - a_1j) x_i with x_1 = -sum x_j = r; mirror for y
            xs = _slice([s * MA.T - np.eye(n - 1), ones_x], [np.zeros(n - 1), -r], n - 1)
            ys = _slice([r * MB.T - np.eye(nu - 1), ones_y], [np.zeros(nu - 1), -s], nu - 1)
            cert = f"x1*={r:.17g} root of det(D_x), y1*={s:.17g} root of det(C_y)"
            if xs is None or ys is None:
                S.empties.append(EmptyCase("H0", f"{cert}; kernel has no member with the required first coordinate"))
                continue
            xs = (np.concatenate([[r], xs[0]]), np.vstack([np.zeros((1, xs[1].shape[1])), xs[1]]))
            ys = (np.concatenate([[s], ys[0]]), np.vstack([np.zeros((1, ys[1].shape[1])), ys[1]]))
            S.add(_product("H0", xs, ys, n, nu, f"X=Y=0, C_y1 x=0, D_x1 y=0 with {cert}"))


def _i0(A: np.ndarray, B: np.ndarray, label: str, det_tol: float):
    """x = e_1, y = (0, y_2..): B_0^T y = y, sum_k b_k1 y_k = 0, Y = 1.

    Returned as (family or None, certificate).  I1 is the mirror image.
    """
    n, nu = A.shape[0], B.shape[0]
    B2 = B[1:, 1:] - np.eye(nu - 1)
    singular, d = is_singular(B2, det_tol) if nu > 1 else (False, 1.0)
    if not singular:
        return None, f"det(B2) = {d:.6g} != 0"
    ys = _slice([B2.T, B[1:, 0], np.ones(nu - 1)], [np.zeros(nu - 1), 0.0, 1.0], nu - 1)
    if ys is None:
        return None, "det(B2) = 0 but no kernel vector has sum 1 and sum_k b_k1 y_k = 0"
    ys = (np.concatenate([[0.0], ys[0]]), np.vstack([np.zeros((1, ys[1].shape[1])), ys[1]]))
    xs = (_e1(n), np.zeros((n, 0)))
    return _product(label, xs, ys, n, nu, "x = e1, y1 = 0, B2 y = 0, sum b_k1 y_k = 0, Y = 1"), "det(B2) = 0"


class _Side:
    """One sex's half of the H1 system with x1 y1 != 0.

    For the female side, with s = y_1, x solves (I - s A^T) x = (1 - s) e_1
    and X = 1.  When s is not an eigen-parameter (s != 1 and 1/s not an
    eigenvalue of A) the solution is unique and x_1 = p(s) / c(s) with
    c(s) = det(C_s) and p(s) = det(s A_0 - I).
    """

    def __init__(self, M: np.ndarray):
        self.M = M
        self.k = M.shape[0]
        self.c = det_polynomial(lambda t: h0_matrix(M, t), self.k - 1)
        self.p = det_polynomial(lambda t: t * M[1:, 1:] - np.eye(self.k - 1), self.k - 1)
        self.special = sorted({1.0, *real_roots(self.c)})

    def is_special(self, s: float) -> bool:
        return any(abs(s - e) <= COORD_TOL * max(1.0, abs(e)) for e in self.special)

    def fiber(self, s: float, first: Optional[float] = None):
        k = self.k
        rows = [np.eye(k) - s * self.M.T, np.ones(k)]
        rhs = [(1.0 - s) * _e1(k), 1.0]
        if first is not None:
            rows.append(_e1(k))
            rhs.append(first)
        return _slice(rows, rhs, k)

    def point(self, s: float) -> Optional[np.ndarray]:
        sol = self.fiber(s)
        if sol is None or sol[1].shape[1]:
            return None
        return sol[0]

    def first_is_constant(self) -> bool:
        # p == c means x_1 == 1 for every generic s
        return is_zero_poly(Poly.polysub(self.p, self.c), 1e-10)


def _compose(outer_c, outer_p, inner_num, inner_den, s_factor: bool) -> np.ndarray:
    """Numerator of s * outer_c(u) - outer_p(u) with u = inner_num / inner_den."""
    m = max(len(outer_c), len(outer_p)) - 1
    oc = np.pad(outer_c, (0, m + 1 - len(outer_c)))
    op = np.pad(outer_p, (0, m + 1 - len(outer_p)))
    hc = np.zeros(1)
    hp = np.zeros(1)
    for j in range(m + 1):
        term = Poly.polymul(Poly.polypow(inner_num, j), Poly.polypow(inner_den, m - j))
        hc = Poly.polyadd(hc, oc[j] * term)
        hp = Poly.polyadd(hp, op[j] * term)
    if s_factor:
        hc = Poly.polymulx(hc)
    return Poly.polysub(hc, hp)


def _h1_interior(P: StochasticMatrixPair, S: SolutionSet) -> None:
    """H1 idempotents with x_1 != 0 and y_1 != 0 (the I3 case)."""
    n, nu = P.n, P.nu
    fem, mal = _Side(P.A), _Side(P.B)
    label = "I3"

    # generic: r = f(s), s = g(r), both fibers single points
    if fem.first_is_constant() or mal.first_is_constant():
        S.empties.append(EmptyCase(label, "generic branch: x1 (or y1) is identically 1 off the eigen-parameters, forcing the partner onto an eigen-parameter"))
    else:
        H = _compose(mal.c, mal.p, fem.p, fem.c, s_factor=True)
        if is_zero_poly(H):
            S.unresolved.append(UnresolvedCase(label, "generic branch: composed polynomial vanishes identically (solution curve)"))
        else:
            found = 0
            for s in real_roots(H):
                if abs(s) <= COORD_TOL or fem.is_special(s):
                    continue
                x = fem.point(s)
                if x is None or abs(x[0]) <= COORD_TOL or mal.is_special(x[0]):
                    continue
                y = mal.point(x[0])
                if y is None or abs(y[0] - s) > COORD_TOL * max(1.0, abs(s)):
                    continue
                S.add_point(AlgebraElement(x, y), label)
                found += 1
            if not found:
                S.empties.append(EmptyCase(label, "generic branch: no admissible real root of the composed polynomial"))

    for side, other, flip in ((fem, mal, False), (mal, fem, True)):
        for fam in _h1_one_special(side, other, S):
            S.add(fam.swapped() if flip else fam)

    # both parameters special
    for s in fem.special:
        for r in mal.special:
            if abs(s) <= COORD_TOL or abs(r) <= COORD_TOL:
                continue
            fam = _product(
                label, fem.fiber(s, r), mal.fiber(r, s), n, nu,
                f"y1 = {s:.17g} and x1 = {r:.17g} both eigen-parameters",
            )
            if fam is not None:
                S.add(fam)


def _h1_one_special(side: _Side, other: _Side, S: SolutionSet) -> list[Family]:
    """Families where this side's parameter is special and the other's is not.

    Written for the female side (parameter s = y_1 special); the male-side
    call returns families in swapped coordinates.
    """
    n, nu = side.k, other.k
    label = "I3"
    out = []
    for s in side.special:
        if abs(s) <= COORD_TOL:
            continue
        fiber = side.fiber(s)
        if fiber is None:
            continue
        poly = Poly.polysub(s * np.asarray(other.c), other.p)
        if is_zero_poly(poly):
            # y_1(r) == s for every generic r; usable only if y(r) is constant
            probes = [r for r in (0.37, -1.3, 2.9, -0.61) if not other.is_special(r)]
            ys = [other.point(r) for r in probes]
            if any(y is None for y in ys) or max(np.abs(y - ys[0]).max() for y in ys) > 1e-9:
                S.unresolved.append(UnresolvedCase(label, f"y1 = {s:.17g}: male fiber varies along a curve"))
                continue
            excl = [(_coord(n, nu, "x"), 0.0)] + [(_coord(n, nu, "x"), e) for e in other.special]
            out.append(
                _product(label, fiber, (ys[0], np.zeros((nu, 0))), n, nu,
                         f"y1 = {s:.17g} eigen-parameter, x1 free off the male eigen-parameters", excl)
            )
            continue
        for r in real_roots(poly):
            if abs(r) <= COORD_TOL or other.is_special(r):
                continue
            y = other.point(r)
            if y is None or abs(y[0] - s) > COORD_TOL * max(1.0, abs(s)):
                continue
            fam = _product(label, side.fiber(s, r), (y, np.zeros((nu, 0))), n, nu,
                           f"y1 = {s:.17g} eigen-parameter, x1 = {r:.17g}")
            if fam is not None:
                out.append(fam)
    return out


def _identity_idempotents(P: StochasticMatrixPair, S: SolutionSet) -> None:
    """A = B = I: the five explicit parts solving (1-y1)x1 = (Y-y1)X etc."""
    n, nu = P.n, P.nu
    ex, ey = _e1(n), _e1(nu)
    ox, oy = np.ones(n), np.ones(nu)
    x1, y1 = _coord(n, nu, "x"), _coord(n, nu, "y")
    parts = [
        ("I3", _slice([ex, ox], [1.0, 1.0], n), _slice([ey, oy], [1.0, 1.0], nu),
         "x1 = y1 = 1, sum x_i (i>=2) = sum y_k (k>=2) = 0", []),
        ("H0", _slice([ex, ox], [1.0, 0.0], n), _slice([ey, oy], [1.0, 0.0], nu),
         "x1 = y1 = 1, sum x_i (i>=2) = sum y_k (k>=2) = -1", []),
        ("I0", (ex, np.zeros((n, 0))), _slice([oy], [1.0], nu), "x = e1, Y = 1, y1 != 1", [(y1, 1.0)]),
        ("I1", _slice([ox], [1.0], n), (ey, np.zeros((nu, 0))), "y = e1, X = 1, x1 != 1", [(x1, 1.0)]),
    ]
    for label, xs, ys, text, excl in parts:
        fam = _product(label, xs, ys, n, nu, text, excl)
        if fam is None:
            S.empties.append(EmptyCase(label, f"{text}: no solution at n={n}, nu={nu}"))
        else:
            S.add(fam)


def idempotents(
    P: StochasticMatrixPair,
    tol: float = TOL_MEMBER,
    det_tol: float = DET_TOL,
    rank_tol: float = 1e-9,
    seed: int = 0,
) -> SolutionSet:
    """All z with z^2 = z, split by the case analysis on X, Y, x_1, y_1."""
    S = SolutionSet("idempotent")
    S.add_point(AlgebraElement(np.zeros(P.n), np.zeros(P.nu)), "H0")
    if P.is_identity():
        _identity_idempotents(P, S)
    else:
        _h0_idempotents(P, S, rank_tol)
        fam, cert = _i0(P.A, P.B, "I0", det_tol)
        if fam is None:
            S.empties.append(EmptyCase("I0", cert))
        else:
            S.add(fam)
        fam, cert = _i0(P.B, P.A, "I1", det_tol)
        if fam is None:
            S.empties.append(EmptyCase("I1", cert))
        else:
            S.add(fam.swapped())
        a11 = P.A[0, 0]
        if abs(a11 - 1.0) <= TOL_STOCH:
            S.empties.append(EmptyCase("I2", "unsupported: a11=1"))
            S.empties.append(EmptyCase("I3", "unsupported: a11=1"))
        else:
            S.empties.append(EmptyCase("I2", _i2_certificate(P)))
            _h1_interior(P, S)
    _verify(P, S, lambda z: norm_l1(evolve_special(P, z) - z), tol, seed)
    return S


def u_matrix(A: np.ndarray, y: float) -> np.ndarray:
    """U_y: a_1j((a_i1 - 1) y + 1)/(1 - a11) + a_ij y - delta_ij, i, j >= 2."""
    a11 = A[0, 0]
    c = (A[1:, 0] - 1.0) * y + 1.0
    return np.outer(c, A[0, 1:]) / (1.0 - a11) + y * A[1:, 1:] - np.eye(A.shape[0] - 1)


def _i2_certificate(P: StochasticMatrixPair) -> str:
    detU = det_polynomial(lambda t: u_matrix(P.A, t), P.n - 1)
    worst = float(np.abs(detU).max(initial=0.0)) if P.n > 1 else 0.0
    return (
        f"det(U_y) vanishes identically (max |coeff| = {worst:.3g}; rows of U_y sum to 0), "
        "and x = e1 with y1 != 0 gives x1' = 1 - y1 (1 - a11) != 1"
    )


# --------------------------------------------------------------------------
# absolute nilpotents


def _nil_case(A: np.ndarray, B: np.ndarray, c: int, det_tol: float) -> tuple[list[Family], list[EmptyCase]]:
    """Nilpotents with X = 0 and Y = 0 (c = 0) or Y != 0 (c = 1)."""
    n, nu = A.shape[0], B.shape[0]
    ex, ey = _e1(n), _e1(nu)
    ox, oy = np.ones(n), np.ones(nu)
    x1, y1 = _coord(n, nu, "x"), _coord(n, nu, "y")
    Ymass = (_mass(n, nu, "y"), 0.0)
    fams, empties = [], []
    lab = lambda a, b: f"N{c}_{a}{b}"

    def zero(k):
        return np.zeros(k)

    def emit(label, xs, ys, text, excl):
        fam = _product(label, xs, ys, n, nu, text, excl)
        if fam is None:
            empties.append(EmptyCase(label, f"{text}: linear conditions inconsistent"))
        else:
            fams.append(fam)

    # x1 = y1 = 0
    y_excl = [Ymass] if c == 1 else []
    y_rows = [ey] if c == 1 else [ey, oy]
    emit(lab(0, 0), _slice([ex, ox], [0.0, 0.0], n), _slice(y_rows, [zero(1)] * len(y_rows), nu),
         "x1 = y1 = 0, X = 0" + (", Y != 0" if c else ", Y = 0"), y_excl)

    # x1 = 0, y1 != 0: A^T x = 0 on x1 = 0
    A0 = A[1:, 1:]
    singular, d = is_singular(A0, det_tol) if n > 1 else (False, 1.0)
    gate = f"det(A0) = {d:.6g}" + (" = 0" if singular else " != 0, so x = 0")
    xs = _slice([ex, A.T], [0.0, zero(n)], n)
    ys = (zero(nu), np.eye(nu)) if c == 1 else _slice([oy], [0.0], nu)
    emit(lab(0, 1), xs, ys, f"x1 = 0, A^T x = 0, y1 != 0; {gate}",
         [(y1, 0.0)] + ([Ymass] if c == 1 else []))

    # x1 != 0, y1 = 0
    B0 = B[1:, 1:]
    singular, d = is_singular(B0, det_tol) if nu > 1 else (False, 1.0)
    if c == 1 and not singular:
        empties.append(EmptyCase(lab(1, 0), f"det(B0) = {d:.6g} != 0 forces y = 0, contradicting Y != 0"))
    else:
        gate = f"det(B0) = {d:.6g}" + (" = 0" if singular else " != 0, so y = 0")
        emit(lab(1, 0), _slice([ox], [0.0], n), _slice([ey, B[:, 1:].T if c == 1 else B.T], [0.0, zero(nu - 1 if c == 1 else nu)], nu),
             f"x1 != 0, X = 0, y1 = 0, {'(B^T y)_l = 0 for l >= 2' if c else 'B^T y = 0'}; {gate}",
             [(x1, 0.0)] + ([Ymass] if c == 1 else []))

    # x1 != 0, y1 != 0
    if c == 0:
        detA, detB = is_singular(A, det_tol), is_singular(B, det_tol)
        names = "det(A), det(B)"
    else:
        bold_A = A.copy()
        bold_A[:, 0] = 1.0
        bold_B = B.copy()
        bold_B[:, 0] -= 1.0
        detA, detB = is_singular(bold_A, det_tol), is_singular(bold_B, det_tol)
        names = "det(bold A), det(bold B)"
    if not (detA[0] and detB[0]):
        empties.append(EmptyCase(lab(1, 1), f"{names} = {detA[1]:.6g}, {detB[1]:.6g}: not both zero"))
    else:
        yr = B.T if c == 0 else B[:, 1:].T
        emit(lab(1, 1), _slice([A.T], [zero(n)], n), _slice([yr], [zero(yr.shape[0])], nu),
             f"A^T x = 0, {'B^T y = 0' if c == 0 else '(B^T y)_l = 0 for l >= 2'}, x1 != 0, y1 != 0; {names} = 0",
             [(x1, 0.0), (y1, 0.0)] + ([Ymass] if c == 1 else []))
    return fams, empties


_SWAP_LETTERS = {"x": "y", "y": "x", "X": "Y", "Y": "X", "A": "B", "B": "A"}


def _swap_text(text: str) -> str:
    """Rename x/y, X/Y, A/B in a certificate (single-letter symbols only)."""
    return re.sub(r"(?<![A-Za-z])[xyXYAB](?![a-z])", lambda m: _SWAP_LETTERS[m.group(0)], text)


def absolute_nilpotents(
    P: StochasticMatrixPair, tol: float = TOL_MEMBER, det_tol: float = DET_TOL, seed: int = 0
) -> SolutionSet:
    """All z with z^2 = 0.  X Y = 0 is necessary; the cases are
    X = Y = 0, X = 0 != Y, and the mirror X != 0 = Y obtained by swapping
    the sexes (x <-> y, A <-> B)."""
    S = SolutionSet("nilpotent")
    S.add_point(AlgebraElement(np.zeros(P.n), np.zeros(P.nu)), "N0_00")
    for c in (0, 1):
        fams, empties = _nil_case(P.A, P.B, c, det_tol)
        for f in fams:
            S.add(f)
        S.empties.extend(empties)
    fams, empties = _nil_case(P.B, P.A, 1, det_tol)
    for f in fams:
        f = f.swapped()
        f.case_label = "N2" + f.case_label[2:]
        f.constraints = _swap_text(f.constraints)
        S.add(f)
    S.empties.extend(EmptyCase("N2" + e.case_label[2:], _swap_text(e.certificate)) for e in empties)
    _verify(P, S, lambda z: norm_l1(evolve_special(P, z)), tol, seed)
    return S


# --------------------------------------------------------------------------


def classify_membership(P: StochasticMatrixPair, z: AlgebraElement, tol: float = TOL_MEMBER) -> str:
    """Case label of z if it is idempotent or nilpotent, else "none".

    Idempotency is tested first, so 0 reports "H0".  Order for idempotents:
    X = Y = 0 -> H0; then y1 = 0 -> I0, x1 = 0 -> I1, otherwise I3.  For
    A = B = I the explicit parts are tested in the order H0, I3 (x1 = y1
    = 1), I0 (x = e1), I1 (y = e1).  Nilpotents: N<case>_<a><b>, where case
    0 is X = Y = 0, case 1 is X = 0 != Y and case 2 is Y = 0 != X; a, b
    flag x1 != 0 and y1 != 0, in swapped order for case 2.
    """
    X, Y = linear_forms(z)
    ct = COORD_TOL * max(1.0, norm_l1(z))
    small = lambda v: abs(v) <= ct
    x1, y1 = float(z.x[0]), float(z.y[0])
    if is_idempotent(P, z, tol * _scale(z)):
        if small(X) and small(Y):
            return "H0"
        if P.is_identity():
            if small(x1 - 1) and small(y1 - 1):
                return "I3"
            if np.abs(z.x - _e1(P.n)).sum() <= ct:
                return "I0"
            return "I1"
        if small(y1):
            return "I0"
        if small(x1):
            return "I1"
        return "I3"
    if is_absolute_nilpotent(P, z, tol * _scale(z)):
        if small(X) and small(Y):
            case, a, b = 0, x1, y1
        elif small(X):
            case, a, b = 1, x1, y1
        else:
            case, a, b = 2, y1, x1
        return f"N{case}_{int(not small(a))}{int(not small(b))}"
    return "none"
