"""Callable wrappers for Finsler functions and spray fields.

Both take coordinate lists ``X`` (position) and ``Y`` (direction) whose
entries are jets of one common space in which the first ``n`` variables are
x and the next ``n`` are y.  ``loss`` is how many jet orders the evaluation
consumes (derivatives of the inputs that the formula takes internally).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets


@dataclass(frozen=True)
class FinslerFunction:
    n: int
    fn: Callable
    name: str = "F"
    loss: int = 0

    def __call__(self, X, Y):
        return self.fn(X, Y)

    def value(self, x, y) -> float:
        return float(self.fn([float(v) for v in x], [float(v) for v in y]))


@dataclass(frozen=True)
class SprayField:
    n: int
    fn: Callable  # (X, Y) -> length-n sequence of jets
    loss: int
    name: str = "G"

    def __call__(self, X, Y):
        return self.fn(X, Y)

    def jets_at(self, x, y, order: int) -> list:
        """Spray components at (x, y) as jets of the stated order in (x, y)."""
        X, Y = seed_xy(x, y, max(1, order + self.loss))
        out = self.fn(X, Y)
        return [g.truncate(order) if isinstance(g, jets.Jet)
                else jets.constant(float(g), 2 * self.n, order) for g in out]

    def values(self, x, y) -> np.ndarray:
        return np.array([g.value for g in self.jets_at(x, y, 0)])


def seed_xy(x, y, order: int):
    pts = [float(v) for v in x] + [float(v) for v in y]
    seeds = jets.seed_point(pts, order)
    n = len(x)
    return seeds[:n], seeds[n:]
