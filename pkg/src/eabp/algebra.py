"""Evolution algebra of a bisexual population.

The algebra lives on R^(n+nu) with basis e_1^f..e_n^f, e_1^m..e_nu^m
(female types first).  Structure constants come from an inheritance
tensor: ``pf[i, k, j]`` is the probability that the pair (female i,
male k) has a female offspring of type j, ``pm[i, k, l]`` the same for a
male offspring of type l.  Same-sex products vanish; a mixed product is
half the offspring distribution of the pair.

Indices are 0-based here and 1-based in anything user facing
(JSON, violation reports).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TOL_STOCH = 1e-9
TOL_ALG = 1e-12


class ShapeError(ValueError):
    """Arrays do not have the shape their declared sizes require."""


class StochasticityError(ValueError):
    """Inheritance coefficients are negative or do not sum to one."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        first = report.violations[0]
        super().__init__(f"tensor is not stochastic: {first}")


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class InheritanceTensor:
    n: int
    nu: int
    pf: np.ndarray  # (n, nu, n)
    pm: np.ndarray  # (n, nu, nu)

    def __post_init__(self):
        if int(self.n) < 1 or int(self.nu) < 1:
            raise ShapeError("both sexes need at least one type (n >= 1, nu >= 1)")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "nu", int(self.nu))
        try:
            pf = _frozen(self.pf)
            pm = _frozen(self.pm)
        except ValueError as exc:  # ragged nested lists
            raise ShapeError(f"inheritance arrays are ragged: {exc}") from None
        if pf.shape != (self.n, self.nu, self.n):
            raise ShapeError(f"pf has shape {pf.shape}, expected {(self.n, self.nu, self.n)}")
        if pm.shape != (self.n, self.nu, self.nu):
            raise ShapeError(f"pm has shape {pm.shape}, expected {(self.n, self.nu, self.nu)}")
        if not (np.all(np.isfinite(pf)) and np.all(np.isfinite(pm))):
            raise ShapeError("inheritance coefficients must be finite")
        object.__setattr__(self, "pf", pf)
        object.__setattr__(self, "pm", pm)

    @property
    def dim(self) -> int:
        return self.n + self.nu

    @classmethod
    def checked(cls, n, nu, pf, pm, tol_stoch: float = TOL_STOCH) -> "InheritanceTensor":
        """Build a tensor and refuse it unless it is stochastic."""
        T = cls(n, nu, pf, pm)
        report = validate_tensor(T, tol_stoch)
        if not report.ok:
            raise StochasticityError(report)
        return T

    @classmethod
    def random(cls, n: int, nu: int, rng: np.random.Generator) -> "InheritanceTensor":
        pf = rng.random((n, nu, n)) + 1e-3
        pm = rng.random((n, nu, nu)) + 1e-3
        pf /= pf.sum(axis=2, keepdims=True)
        pm /= pm.sum(axis=2, keepdims=True)
        return cls(n, nu, pf, pm)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(np.zeros(self.n), np.zeros(self.nu))

    def female_basis(self, i: int) -> "AlgebraElement":
        x = np.zeros(self.n)
        x[i] = 1.0
        return AlgebraElement(x, np.zeros(self.nu))

    def male_basis(self, k: int) -> "AlgebraElement":
        y = np.zeros(self.nu)
        y[k] = 1.0
        return AlgebraElement(np.zeros(self.n), y)

    def basis(self) -> list["AlgebraElement"]:
        return [self.female_basis(i) for i in range(self.n)] + [
            self.male_basis(k) for k in range(self.nu)
        ]

    def element(self, vector) -> "AlgebraElement":
        return AlgebraElement.from_vector(vector, self.n)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A point z = (x, y) of R^(n+nu); no sign or sum restriction."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _frozen(np.atleast_1d(self.x))
        y = _frozen(np.atleast_1d(self.y))
        if x.ndim != 1 or y.ndim != 1:
            raise ShapeError("element parts must be vectors")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_vector(cls, v, n: int) -> "AlgebraElement":
        v = np.asarray(v, dtype=float)
        return cls(v[:n], v[n:])

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def nu(self) -> int:
        return self.y.shape[0]

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.x - other.x, self.y - other.y)

    def __mul__(self, c: float) -> "AlgebraElement":
        return AlgebraElement(c * self.x, c * self.y)

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(-self.x, -self.y)

    def allclose(self, other: "AlgebraElement", atol: float = TOL_ALG) -> bool:
        return (
            self.x.shape == other.x.shape
            and self.y.shape == other.y.shape
            and norm_l1(self - other) <= atol
        )

    def __repr__(self) -> str:
        return f"AlgebraElement(x={self.x.tolist()}, y={self.y.tolist()})"


@dataclass(frozen=True)
class SexDiffElement:
    """alpha*w + beta*m in the sex differentiation algebra."""

    alpha: float
    beta: float


@dataclass
class ValidationReport:
    ok: bool
    violations: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": self.violations}


def validate_tensor(T: InheritanceTensor, tol_stoch: float = TOL_STOCH) -> ValidationReport:
    """Check nonnegativity and unit row sums of every (i, k) slice.

    Shape problems never get here: they raise :class:`ShapeError` when the
    tensor is built.
    """
    violations = []
    for name, arr in (("pf", T.pf), ("pm", T.pm)):
        sums = arr.sum(axis=2)
        for i in range(T.n):
            for k in range(T.nu):
                residual = float(1.0 - sums[i, k])
                if abs(residual) > tol_stoch:
                    violations.append(
                        {"array": name, "kind": "row_sum", "i": i + 1, "k": k + 1, "residual": residual}
                    )
                low = float(arr[i, k].min())
                if low < -tol_stoch:
                    violations.append(
                        {"array": name, "kind": "negative", "i": i + 1, "k": k + 1, "residual": low}
                    )
    return ValidationReport(ok=not violations, violations=violations)


def _conform(T: InheritanceTensor, *elements: AlgebraElement) -> None:
    for z in elements:
        if z.x.shape != (T.n,) or z.y.shape != (T.nu,):
            raise ShapeError(
                f"element of size ({z.n}, {z.nu}) does not match tensor ({T.n}, {T.nu})"
            )


def multiply(T: InheritanceTensor, z: AlgebraElement, t: AlgebraElement) -> AlgebraElement:
    """Bilinear product zt; symmetric in z and t by construction."""
    _conform(T, z, t)
    # w[i, k] = x_i v_k + u_i y_k is symmetric under z <-> t
    w = np.outer(z.x, t.y) + np.outer(t.x, z.y)
    x = 0.5 * np.einsum("ikj,ik->j", T.pf, w)
    y = 0.5 * np.einsum("ikl,ik->l", T.pm, w)
    return AlgebraElement(x, y)


def evolve(T: InheritanceTensor, z: AlgebraElement) -> AlgebraElement:
    """The evolution operator V(z) = z^2 on all of R^(n+nu)."""
    _conform(T, z)
    x = np.einsum("ikj,i,k->j", T.pf, z.x, z.y)
    y = np.einsum("ikl,i,k->l", T.pm, z.x, z.y)
    return AlgebraElement(x, y)


def plenary_power(T: InheritanceTensor, z: AlgebraElement, t: int) -> AlgebraElement:
    """z^[t]: square t times, so z^[t] = V^t(z) and z^[0] = z."""
    if t < 0:
        raise ValueError("plenary power needs t >= 0")
    _conform(T, z)
    for _ in range(t):
        z = evolve(T, z)
    return z


def norm_l1(z: AlgebraElement) -> float:
    return float(np.abs(z.x).sum() + np.abs(z.y).sum())


def left_mult(T: InheritanceTensor, a: AlgebraElement) -> np.ndarray:
    """Matrix of z -> az in the basis (female first, then male)."""
    _conform(T, a)
    n, nu = T.n, T.nu
    M = np.zeros((n + nu, n + nu))
    # a * e_p^f only meets the male part of a; a * e_k^m only the female part
    M[:n, :n] = 0.5 * np.einsum("ikj,k->ji", T.pf, a.y)
    M[n:, :n] = 0.5 * np.einsum("ikl,k->li", T.pm, a.y)
    M[:n, n:] = 0.5 * np.einsum("ikj,i->jk", T.pf, a.x)
    M[n:, n:] = 0.5 * np.einsum("ikl,i->lk", T.pm, a.x)
    return M


def left_mult_bound(a: AlgebraElement) -> float:
    """Operator-norm bound max(||a_f||, ||a_m||) for L_a in the l1 norm."""
    return max(float(np.abs(a.x).sum()), float(np.abs(a.y).sum()))


def jacobian(T: InheritanceTensor, z: AlgebraElement) -> np.ndarray:
    """Derivative of V at z; V is quadratic so this is 2 L_z."""
    return 2.0 * left_mult(T, z)


def dibaric_image(z: AlgebraElement) -> SexDiffElement:
    return SexDiffElement(float(z.x.sum()), float(z.y.sum()))


def sexdiff_multiply(u: SexDiffElement, v: SexDiffElement) -> SexDiffElement:
    # w^2 = m^2 = 0, wm = (w + m)/2
    c = 0.5 * (u.alpha * v.beta + v.alpha * u.beta)
    return SexDiffElement(c, c)
