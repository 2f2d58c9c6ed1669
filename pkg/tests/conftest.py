import numpy as np
import pytest

from eabp.algebra import AlgebraElement, InheritanceTensor

# filled by the acceptance suite, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1][1:])):
            terminalreporter.write_line(line)


def one_female(a: float, b: float) -> InheritanceTensor:
    """n=1, nu=2 with P^m_{11,1}=a and P^m_{12,1}=b."""
    pf = np.ones((1, 2, 1))
    pm = np.array([[[a, 1 - a], [b, 1 - b]]])
    return InheritanceTensor(1, 2, pf, pm)


def trivial() -> InheritanceTensor:
    return InheritanceTensor(1, 1, np.ones((1, 1, 1)), np.ones((1, 1, 1)))


def male_swap_symmetric(n: int, rng: np.random.Generator) -> InheritanceTensor:
    """nu=2 tensor invariant under exchanging the male types; has a derivation."""
    a = rng.random(n)
    f = rng.random((n, n))
    f /= f.sum(axis=1, keepdims=True)
    pf = np.stack([f, f], axis=1)
    pm = np.stack([np.stack([a, 1 - a], 1), np.stack([1 - a, a], 1)], axis=1)
    return InheritanceTensor(n, 2, pf, pm)


def el(x, y) -> AlgebraElement:
    return AlgebraElement(np.array(x, dtype=float), np.array(y, dtype=float))


def _span(vectors, dim):
    return np.column_stack(vectors) if vectors else np.zeros((dim, 0))


def same_hull(fam, anchor, directions, tol=1e-9):
    """Affine hull of the family equals anchor + span(directions)."""
    dim = anchor.size
    rank = np.linalg.matrix_rank(_span(directions, dim)) if directions else 0
    if fam.dimension != rank:
        return False
    if fam.distance(AlgebraElement.from_vector(anchor, fam.anchor.n)) > tol:
        return False
    F = _span([b.to_vector() for b in fam.basis], dim)
    for d in directions:
        resid = d - F @ np.linalg.lstsq(F, d, rcond=None)[0] if F.shape[1] else d
        if np.abs(resid).sum() > tol:
            return False
    return True


def identity_description(n, nu):
    """The five parts for A = B = I, written out by hand as (anchor, directions)."""
    d = n + nu

    def vec(x, y):
        return np.concatenate([x, y])

    def e(k, i):
        v = np.zeros(k)
        v[i] = 1.0
        return v

    zx, zy = np.zeros(n), np.zeros(nu)
    x_zero_sum = [vec(e(n, i) - e(n, 1), zy) for i in range(2, n)]
    y_zero_sum = [vec(zx, e(nu, k) - e(nu, 1)) for k in range(2, nu)]
    return [
        ("H0", np.zeros(d), []),
        ("I3", vec(e(n, 0), e(nu, 0)), x_zero_sum + y_zero_sum),
        ("H0", vec(e(n, 0) - e(n, 1), e(nu, 0) - e(nu, 1)), x_zero_sum + y_zero_sum),
        ("I0", vec(e(n, 0), e(nu, 0)), [vec(zx, e(nu, k) - e(nu, 0)) for k in range(1, nu)]),
        ("I1", vec(e(n, 0), e(nu, 0)), [vec(e(n, i) - e(n, 0), zy) for i in range(1, n)]),
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
