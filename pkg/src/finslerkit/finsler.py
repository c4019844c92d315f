"""Generic Finsler operators computed from their definitions.

Nothing here knows about (alpha, beta)-metrics: the spray comes from the
fundamental tensor of ``F^2``, curvature from the spray, and the Weyl
curvature from one more vertical derivative.  This is the independent
oracle for the closed forms in :mod:`finslerkit.abmetric` and
:mod:`finslerkit.contraction`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .evaluators import FinslerFunction, SprayField, seed_xy
from .tensors import inv, values


class StrongConvexityError(ValueError):
    """The fundamental tensor is not positive definite."""


class DegenerateDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class FinslerPoint:
    """A point of the slit tangent bundle."""
    x: tuple
    y: tuple
    margin: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same length")
        if not any(self.y):
            raise ValueError("y must be nonzero")


def fundamental_tensor(F: FinslerFunction, x, y):
    """``g_ij = 1/2 [F^2]_{y^i y^j}`` and its inverse at (x, y)."""
    n = F.n
    X, Y = seed_xy(x, y, 2)
    F2 = F(X, Y) ** 2
    g = np.array([[0.5 * F2.deriv(n + i).deriv(n + j).value for j in range(n)]
                  for i in range(n)])
    lam = np.linalg.eigvalsh(g)
    if lam[0] <= 0.0:
        raise StrongConvexityError(
            f"fundamental tensor not positive definite at x={list(x)}, "
            f"y={list(y)} (smallest eigenvalue {lam[0]:.3g})")
    return g, np.linalg.inv(g)


def spray_field(F: FinslerFunction) -> SprayField:
    """Spray ``G^i = 1/4 g^ij {[F^2]_{x^k y^j} y^k - [F^2]_{x^j}}`` as a field."""
    n = F.n

    def fn(X, Y):
        K = X[0].order
        F2 = F(X, Y) ** 2
        if not isinstance(F2, jets.Jet):
            F2 = jets.constant(float(F2), X[0].n, K)
        F2y = [F2.deriv(n + j) for j in range(n)]
        g = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = 0.5 * F2y[i].deriv(n + j)
        ginv = inv(g)
        low = K - 2
        Yl = [v.truncate(low) for v in Y]
        rhs = []
        for j in range(n):
            t = -F2.deriv(j).truncate(low)
            for k in range(n):
                t = t + F2y[j].deriv(k) * Yl[k]
            rhs.append(t)
        return [0.25 * sum((ginv[i, j] * rhs[j] for j in range(1, n)),
                           ginv[i, 0] * rhs[0]) for i in range(n)]

    return SprayField(n, fn, loss=2, name=f"spray of {F.name}")


def spray_direct(F: FinslerFunction, x, y) -> np.ndarray:
    fundamental_tensor(F, x, y)
    return spray_field(F).values(x, y)


def curvature_jets(G: list, Y: list) -> np.ndarray:
    """``R^i_k`` as jets two orders below the spray jets ``G``."""
    n = len(G)
    K = G[0].order
    low = K - 2
    Gy = [[G[i].deriv(n + j) for j in range(n)] for i in range(n)]
    Gl = [g.truncate(low) for g in G]
    Yl = [v.truncate(low) for v in Y]
    Gyl = [[g.truncate(low) for g in row] for row in Gy]
    R = np.empty((n, n), dtype=object)
    for i in range(n):
        for k in range(n):
            t = 2.0 * G[i].deriv(k).truncate(low)
            for j in range(n):
                t = t - G[i].deriv(j).deriv(n + k) * Yl[j]
                t = t + 2.0 * Gl[j] * Gy[i][j].deriv(n + k)
                t = t - Gyl[i][j] * Gyl[j][k]
            R[i, k] = t
    return R


def riemann_curvature(G: SprayField, x, y) -> np.ndarray:
    """Riemann curvature ``R^i_k`` of the spray at (x, y)."""
    X, Y = seed_xy(x, y, 2 + G.loss)
    return values(curvature_jets(_as_jets(G(X, Y), X), Y))


def _as_jets(G, X):
    space, order = X[0].n, X[0].order
    return [g if isinstance(g, jets.Jet) else jets.constant(float(g), space, order)
            for g in G]


def ricci(R) -> float:
    return float(np.trace(np.asarray(R, dtype=float)))


@dataclass(frozen=True)
class CurvatureReport:
    R: np.ndarray
    Ric: float
    A: np.ndarray
    W: np.ndarray
    K: float
    scalar_residual: float
    weyl_norm: float

    def to_dict(self) -> dict:
        return {"R": self.R.tolist(), "Ric": self.Ric, "A": self.A.tolist(),
                "W": self.W.tolist(), "K": self.K,
                "scalar_residual": self.scalar_residual,
                "W_norm": self.weyl_norm}


def _weyl_from_curvature_jets(R1: np.ndarray, y, n: int):
    Ric = sum(R1[m, m] for m in range(n))
    A = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            A[i, j] = R1[i, j] - Ric / (n - 1) if i == j else R1[i, j]
    divA = np.array([sum(A[k, j].deriv(n + k).value for k in range(n))
                     for j in range(n)])
    Av = values(A)
    W = Av - np.outer(np.asarray(y, dtype=float), divA) / (n + 1)
    return Av, W


def weyl(G: SprayField, x, y) -> np.ndarray:
    n = G.n
    if n < 3:
        raise DegenerateDimensionError("Weyl curvature needs n >= 3")
    X, Y = seed_xy(x, y, 3 + G.loss)
    R1 = curvature_jets(_as_jets(G(X, Y), X), Y)
    return _weyl_from_curvature_jets(R1, y, n)[1]


def scalar_flag_residual(F: FinslerFunction, R, x, y):
    """``K = Ric/((n-1)F^2)`` and the max-norm misfit of the scalar form."""
    n = F.n
    X, Y = seed_xy(x, y, 1)
    Fj = F(X, Y)
    Fv = Fj.value
    if Fv <= 0.0:
        raise ValueError("F must be positive at (x, y)")
    Fy = np.array([Fj.deriv(n + k).value for k in range(n)])
    R = np.asarray(R, dtype=float)
    K = float(np.trace(R)) / ((n - 1) * Fv ** 2)
    model = Fv ** 2 * np.eye(n) - Fv * np.outer(np.asarray(y, dtype=float), Fy)
    return K, float(np.abs(R - K * model).max())


def curvature_report(F: FinslerFunction, G: SprayField, x, y) -> CurvatureReport:
    n = G.n
    if n < 3:
        raise DegenerateDimensionError("Weyl curvature needs n >= 3")
    X, Y = seed_xy(x, y, 3 + G.loss)
    R1 = curvature_jets(_as_jets(G(X, Y), X), Y)
    R = values(R1)
    A, W = _weyl_from_curvature_jets(R1, y, n)
    K, res = scalar_flag_residual(F, R, x, y)
    return CurvatureReport(R=R, Ric=float(np.trace(R)), A=A, W=W, K=K,
                           scalar_residual=res,
                           weyl_norm=float(np.abs(W).max()))


def projective_shift(G: SprayField, P) -> SprayField:
    """Spray ``G^i + P y^i`` for a 1-homogeneous function field ``P``."""
    p_loss = getattr(P, "loss", 0)
    loss = max(G.loss, p_loss)

    def fn(X, Y):
        K = X[0].order
        low = K - loss
        g = _as_jets(G(X, Y), X)
        p = P(X, Y)
        p = p.truncate(low) if isinstance(p, jets.Jet) else p
        return [g[i].truncate(low) + p * Y[i].truncate(low) for i in range(G.n)]

    return SprayField(G.n, fn, loss=loss, name=f"{G.name} + P y")
