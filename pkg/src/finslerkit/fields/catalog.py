"""Built-in metrics and 1-forms used by the scenarios and verify suites.

Every entry builds expression strings, so a catalog pair can be written to
a scenario file and read back unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .expr import _format_number
from .metric import FieldError, MetricField, OneFormField


class CatalogError(FieldError):
    pass


def num(v) -> str:
    """Exact literal for a float or Fraction (shortest round-trip decimal)."""
    if isinstance(v, Fraction):
        f = v
    else:
        f = Fraction(repr(float(v)))
    s = _format_number(f)
    return f"({s})" if f < 0 or "/" in s else s


def _sq_norm(n: int) -> str:
    return " + ".join(f"x{i + 1}^2" for i in range(n))


def _poly2(n: int, rng, scale: float) -> str:
    """Random degree-2 polynomial with coefficients in [-scale, scale]."""
    terms = [num(round(rng.uniform(-1, 1) * scale, 4))]
    for i in range(n):
        terms.append(f"{num(round(rng.uniform(-1, 1) * scale, 4))}*x{i + 1}")
    for i in range(n):
        for j in range(i, n):
            terms.append(
                f"{num(round(rng.uniform(-1, 1) * scale, 4))}*x{i + 1}*x{j + 1}")
    return " + ".join(terms)


@dataclass(frozen=True)
class CatalogPair:
    metric: MetricField
    oneform: Optional[OneFormField]


def euclidean(n: int = 3) -> CatalogPair:
    rows = [["1" if i == j else "0" for j in range(n)] for i in range(n)]
    return CatalogPair(MetricField.from_strings(rows), None)


def space_form(n: int = 3, mu: float = 1.0) -> CatalogPair:
    if not -4.0 <= float(mu) <= 4.0:
        raise CatalogError(f"space_form curvature mu={mu} outside [-4, 4]")
    mu4 = Fraction(repr(float(mu))) / 4 if not isinstance(mu, Fraction) \
        else mu / 4
    if mu4 == 0:
        return euclidean(n)
    factor = f"1/(1 + {num(mu4)}*({_sq_norm(n)}))^2"
    rows = [[factor if i == j else "0" for j in range(n)] for i in range(n)]
    return CatalogPair(MetricField.from_strings(rows), None)


def constant_oneform(n: int = 3, c=(0.2, 0.0, 0.0)) -> CatalogPair:
    c = list(c)
    if len(c) != n:
        raise CatalogError(f"constant_oneform needs {n} components")
    return CatalogPair(euclidean(n).metric,
                       OneFormField.from_strings([num(v) for v in c]))


def linear_oneform(n: int = 3, M=None) -> CatalogPair:
    """b_i = M_ij x^j on flat space; closed iff M is symmetric."""
    M = np.zeros((n, n)) if M is None else np.asarray(M, dtype=object)
    if M.shape != (n, n):
        raise CatalogError(f"linear_oneform needs an {n}x{n} matrix")
    comps = []
    for i in range(n):
        terms = [f"{num(M[i, j])}*x{j + 1}" for j in range(n) if M[i, j] != 0]
        comps.append(" + ".join(terms) if terms else "0")
    return CatalogPair(euclidean(n).metric, OneFormField.from_strings(comps))


def perturbed_metric(n: int = 3, seed: int = 0, eps: float = 0.1) -> CatalogPair:
    if not 0.0 <= eps <= 0.2:
        raise CatalogError(f"perturbed_metric eps={eps} outside [0, 0.2]")
    rng = np.random.default_rng(seed)
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            p = _poly2(n, rng, eps)
            rows[i][j] = f"1 + {p}" if i == j else p
            rows[j][i] = rows[i][j]
    return CatalogPair(MetricField.from_strings(rows), None)


def perturbed_oneform(n: int = 3, seed: int = 0, eps: float = 0.1,
                      base=None) -> CatalogPair:
    """``b_i = base_i + eps * (random degree-2 polynomial)``."""
    if not 0.0 <= eps <= 0.15:
        raise CatalogError(f"perturbed_oneform eps={eps} outside [0, 0.15]")
    rng = np.random.default_rng(seed)
    base = [0.0] * n if base is None else list(base)
    comps = []
    for i in range(n):
        p = _poly2(n, rng, eps)
        comps.append(f"{num(base[i])} + {p}" if base[i] else p)
    return CatalogPair(euclidean(n).metric, OneFormField.from_strings(comps))


def hopf_oneform(c: float = 0.3) -> CatalogPair:
    """Hopf Killing field of the unit 3-sphere, scaled by ``c``.

    Lives on ``space_form(3, 1)``.  Its alpha-length is ``|c|`` everywhere,
    so it is a constant Killing form that is not parallel.
    """
    if not 0.0 < abs(c) < 0.5:
        raise CatalogError(f"hopf_oneform scale c={c} outside 0 < |c| < 0.5")
    metric = space_form(3, 1.0).metric
    conf = f"{num(c)}/(1 + (1/4)*({_sq_norm(3)}))^2"
    v = ["x1*x3/2 - x2", "x1 + x2*x3/2", "1 - (x1^2 + x2^2 - x3^2)/4"]
    comps = [f"{conf}*({vi})" for vi in v]
    return CatalogPair(metric, OneFormField.from_strings(comps))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: str
    formula: str
    build: Callable[..., CatalogPair]


ENTRIES = {
    e.name: e for e in [
        CatalogEntry("euclidean", "n", "a_ij = δ_ij (n x n identity)", euclidean),
        CatalogEntry("space_form", "n, μ in [-4, 4]",
                     "a_ij = δ_ij/(1 + (μ/4)|x|^2)^2, sectional curvature μ",
                     space_form),
        CatalogEntry("constant_oneform", "n, c (n-vector)",
                     "b_i = c_i on euclidean(n)", constant_oneform),
        CatalogEntry("linear_oneform", "n, M (n x n matrix)",
                     "b_i = M_ij x^j on euclidean(n); closed iff M symmetric",
                     linear_oneform),
        CatalogEntry("perturbed_metric", "n, seed, eps in [0, 0.2]",
                     "a_ij = δ_ij + eps*(random symmetric degree-2 polynomial)",
                     perturbed_metric),
        CatalogEntry("perturbed_oneform", "n, seed, eps in [0, 0.15], base",
                     "b_i = base_i + eps*(random degree-2 polynomial) on euclidean(n)",
                     perturbed_oneform),
        CatalogEntry("hopf_oneform", "c with 0 < |c| < 1/2",
                     "b = c * (Hopf Killing field)^flat on space_form(3, 1)",
                     hopf_oneform),
    ]
}


def catalog(name: str, **params) -> CatalogPair:
    try:
        entry = ENTRIES[name]
    except KeyError:
        raise CatalogError(f"unknown catalog entry {name!r}") from None
    return entry.build(**params)
