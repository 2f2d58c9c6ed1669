"""Brute-force verifiers: grid-seeded Newton on z^2 = z or z^2 = 0.

These never look at the analytic case analysis, so they can be used to
check it.  Only for small algebras (n + nu <= 6).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .algebra import AlgebraElement, InheritanceTensor, ShapeError
from .special import StochasticMatrixPair, expand_tensor

EQUATIONS = ("idempotent", "nilpotent")
MAX_DIM = 6
DEDUP_TOL = 1e-6


@dataclass(frozen=True)
class SearchConfig:
    box: tuple[float, float] = (-2.0, 2.0)
    grid_points_per_axis: int = 9
    newton_iters: int = 50
    newton_tol: float = 1e-12
    seed: int = 0
    # fraction of the grid spacing by which seeds are randomly shifted
    jitter: float = 0.0

    def __post_init__(self):
        if self.grid_points_per_axis < 2:
            raise ValueError("grid_points_per_axis must be >= 2")
        lo, hi = self.box
        if not lo < hi:
            raise ValueError(f"empty box {self.box}")
        if self.newton_iters < 1:
            raise ValueError("newton_iters must be >= 1")


def _as_tensor(obj: Union[InheritanceTensor, StochasticMatrixPair]) -> InheritanceTensor:
    if isinstance(obj, StochasticMatrixPair):
        return expand_tensor(obj)
    if isinstance(obj, InheritanceTensor):
        return obj
    raise TypeError(f"expected a tensor or a stochastic pair, got {type(obj).__name__}")


def evolve_batch(T: InheritanceTensor, Z: np.ndarray) -> np.ndarray:
    """V applied row-wise to an (m, n+nu) array."""
    x, y = Z[:, : T.n], Z[:, T.n :]
    return np.concatenate(
        [np.einsum("ikj,mi,mk->mj", T.pf, x, y), np.einsum("ikl,mi,mk->ml", T.pm, x, y)], axis=1
    )


def jacobian_batch(T: InheritanceTensor, Z: np.ndarray) -> np.ndarray:
    """Jacobians of V at each row of Z, shape (m, n+nu, n+nu)."""
    n = T.n
    x, y = Z[:, :n], Z[:, n:]
    top = np.concatenate([np.einsum("ikj,mk->mji", T.pf, y), np.einsum("ikj,mi->mjk", T.pf, x)], axis=2)
    bot = np.concatenate([np.einsum("ikl,mk->mli", T.pm, y), np.einsum("ikl,mi->mlk", T.pm, x)], axis=2)
    return np.concatenate([top, bot], axis=1)


def grid_seeds(dim: int, cfg: SearchConfig) -> np.ndarray:
    axis = np.linspace(cfg.box[0], cfg.box[1], cfg.grid_points_per_axis)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    seeds = np.stack([m.ravel() for m in mesh], axis=1)
    if cfg.jitter:
        spacing = axis[1] - axis[0]
        rng = np.random.default_rng(cfg.seed)
        seeds = seeds + rng.uniform(-cfg.jitter, cfg.jitter, seeds.shape) * spacing
    return seeds


def brute_force_solutions(
    obj: Union[InheritanceTensor, StochasticMatrixPair],
    equation: str,
    cfg: SearchConfig = SearchConfig(),
) -> list[AlgebraElement]:
    """Deduplicated roots of F(z) = V(z) - z (idempotent) or V(z) (nilpotent).

    Newton runs from every grid node at once, stepping with the
    pseudo-inverse so it still moves on singular Jacobians (solution sets
    are often positive-dimensional).  Roots are kept when ||F||_1 <=
    newton_tol and lie in the search box, and are merged within DEDUP_TOL
    in l1, in grid order.
    """
    if equation not in EQUATIONS:
        raise ValueError(f"equation must be one of {EQUATIONS}, got {equation!r}")
    T = _as_tensor(obj)
    dim = T.dim
    if dim > MAX_DIM:
        raise ShapeError(f"n + nu = {dim} exceeds the search limit {MAX_DIM}")
    shift = np.eye(dim) if equation == "idempotent" else np.zeros((dim, dim))

    def residual(Z):
        return evolve_batch(T, Z) - (Z if equation == "idempotent" else 0.0)

    Z = grid_seeds(dim, cfg)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(cfg.newton_iters):
            F = residual(Z)
            # rows already at machine precision stop moving
            active = ~(np.abs(F).sum(axis=1) <= 1e-3 * cfg.newton_tol)
            if not active.any():
                break
            Za = Z[active]
            step = np.einsum("mij,mj->mi", np.linalg.pinv(jacobian_batch(T, Za) - shift), F[active])
            Z[active] = np.where(np.isfinite(step), Za - step, Za)
        F = residual(Z)
    norms = np.abs(F).sum(axis=1)
    lo, hi = cfg.box
    inside = np.all((Z >= lo - 1e-9) & (Z <= hi + 1e-9), axis=1)
    good = Z[np.isfinite(norms) & (norms <= cfg.newton_tol) & inside]

    roots = np.empty((0, dim))
    for z in good:
        if not roots.shape[0] or np.abs(roots - z).sum(axis=1).min() >= DEDUP_TOL:
            roots = np.vstack([roots, z])
    return [AlgebraElement.from_vector(r, T.n) for r in roots]


def sample_elements(n: int, nu: int, count: int, seed: int, box: tuple[float, float] = (-1.0, 1.0)) -> list[AlgebraElement]:
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = np.random.default_rng(seed)
    V = rng.uniform(box[0], box[1], size=(count, n + nu))
    return [AlgebraElement.from_vector(v, n) for v in V]
