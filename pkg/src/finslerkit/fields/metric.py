"""Riemannian metric and 1-form fields defined by expressions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import jets
from .expr import FieldExpr, evaluate, max_coordinate, parse_expr, to_text


class FieldError(ValueError):
    pass


class NotPositiveDefiniteError(FieldError):
    pass


def _parse_all(texts, n):
    return tuple(parse_expr(t, n) if isinstance(t, str) else t for t in texts)


@dataclass(frozen=True)
class MetricField:
    """Component functions a_ij(x) of a Riemannian metric on one chart."""

    n: int
    components: tuple  # n tuples of n FieldExpr
    sources: tuple = field(default=None, compare=False)

    @classmethod
    def from_strings(cls, rows, n: int | None = None) -> "MetricField":
        n = len(rows) if n is None else n
        if len(rows) != n or any(len(r) != n for r in rows):
            raise FieldError(f"metric must be {n}x{n}")
        comps = tuple(_parse_all(r, n) for r in rows)
        sources = tuple(tuple(t if isinstance(t, str) else to_text(t)
                              for t in r) for r in rows)
        m = cls(n, comps, sources)
        m.check_symmetric()
        return m

    def check_symmetric(self, probes: int = 3, seed: int = 0):
        n = self.n
        rng = np.random.default_rng(seed)
        pts = [np.zeros(n)] + [rng.uniform(-0.3, 0.3, n) for _ in range(probes)]
        for i in range(n):
            for j in range(i + 1, n):
                a, b = self.components[i][j], self.components[j][i]
                if a == b:
                    continue
                for p in pts:
                    u, v = evaluate(a, p), evaluate(b, p)
                    if abs(u - v) > 1e-12 * max(1.0, abs(u)):
                        raise FieldError(
                            f"metric not symmetric: a[{i}][{j}] != a[{j}][{i}]")

    def evaluate(self, coords) -> np.ndarray:
        """Components on float or jet coordinates, as an (n, n) array."""
        n = self.n
        out = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(i, n):
                v = evaluate(self.components[i][j], coords)
                out[i, j] = out[j, i] = v
        return out

    def values(self, x) -> np.ndarray:
        return self.evaluate([float(v) for v in x]).astype(float)

    def check_positive_definite(self, x) -> np.ndarray:
        a = self.values(x)
        lam = np.linalg.eigvalsh(a)
        if lam[0] <= 0.0:
            raise NotPositiveDefiniteError(
                f"metric not positive definite at x={list(map(float, x))}: "
                f"smallest eigenvalue {lam[0]:.3g}")
        return a

    def texts(self):
        return self.sources or tuple(tuple(to_text(e) for e in r)
                                     for r in self.components)


@dataclass(frozen=True)
class OneFormField:
    """Component functions b_i(x) of a 1-form."""

    n: int
    components: tuple
    sources: tuple = field(default=None, compare=False)

    @classmethod
    def from_strings(cls, comps, n: int | None = None) -> "OneFormField":
        n = len(comps) if n is None else n
        if len(comps) != n:
            raise FieldError(f"1-form must have {n} components")
        parsed = _parse_all(comps, n)
        sources = tuple(t if isinstance(t, str) else to_text(t) for t in comps)
        return cls(n, parsed, sources)

    @classmethod
    def zero(cls, n: int) -> "OneFormField":
        return cls.from_strings(["0"] * n)

    def evaluate(self, coords) -> np.ndarray:
        out = np.empty(self.n, dtype=object)
        for i, e in enumerate(self.components):
            out[i] = evaluate(e, coords)
        return out

    def values(self, x) -> np.ndarray:
        return self.evaluate([float(v) for v in x]).astype(float)

    def is_zero(self) -> bool:
        return all(max_coordinate(e) < 0 and float(evaluate(e, [])) == 0.0
                   for e in self.components)

    def texts(self):
        return self.sources or tuple(to_text(e) for e in self.components)


def lift(values, space_n: int, order: int) -> np.ndarray:
    """Promote floats in an object array to constant jets of one space."""
    out = np.empty(np.shape(values), dtype=object)
    for idx, v in np.ndenumerate(values):
        out[idx] = v if isinstance(v, jets.Jet) else \
            jets.constant(float(v), space_n, order)
    return out


def beta_norm_squared(metric: MetricField, oneform: OneFormField, x) -> float:
    a = metric.values(x)
    b = oneform.values(x)
    return float(b @ np.linalg.solve(a, b))
