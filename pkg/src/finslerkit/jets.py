"""Truncated multivariate Taylor arithmetic ("jets").

A :class:`Jet` holds the Taylor coefficients of a scalar function of ``n``
variables about a base point, truncated at total degree ``order``.
Arithmetic on jets propagates those coefficients exactly (up to floating
point), so composing field expressions on seeded coordinate jets yields
every mixed partial derivative up to ``order`` without finite differences.

Coefficients are stored densely, one slot per monomial of total degree
``<= order``.  Monomials are ordered by degree first, so truncating to a
lower order is a prefix slice.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from numbers import Real

import numpy as np

__all__ = [
    "Jet",
    "JetDomainError",
    "JetShapeError",
    "seed_variable",
    "seed_point",
    "constant",
    "jet_combine",
    "jet_apply",
    "partial",
    "sin",
    "cos",
    "exp",
    "log",
    "sqrt",
    "recip",
    "pow_rational",
    "value_of",
    "MAX_ORDER",
]

MAX_ORDER = 6


class JetShapeError(ValueError):
    """Two jets with different (n, order) were combined."""


class JetDomainError(ValueError):
    """A function was applied outside its domain at the base point."""


@lru_cache(maxsize=None)
def _basis(n: int, order: int):
    monos = []
    for d in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            m = [0] * n
            for v in combo:
                m[v] += 1
            monos.append(tuple(m))
    # combinations_with_replacement walks each degree in lexicographic order
    # of the variable multiset, so this ordering is stable across orders.
    index = {m: k for k, m in enumerate(monos)}
    degrees = np.array([sum(m) for m in monos], dtype=np.int64)
    return tuple(monos), index, degrees


def basis_size(n: int, order: int) -> int:
    return math.comb(n + order, order)


@lru_cache(maxsize=None)
def _mul_table(n: int, order: int):
    monos, index, degrees = _basis(n, order)
    offsets = [basis_size(n, d) for d in range(order + 1)]
    ii, jj, kk = [], [], []
    for i, mi in enumerate(monos):
        room = order - degrees[i]
        for j in range(offsets[room]):
            mj = monos[j]
            ii.append(i)
            jj.append(j)
            kk.append(index[tuple(a + b for a, b in zip(mi, mj))])
    return (np.array(ii, dtype=np.intp), np.array(jj, dtype=np.intp),
            np.array(kk, dtype=np.intp))


@lru_cache(maxsize=None)
def _deriv_table(n: int, order: int, var: int):
    monos, _, _ = _basis(n, order)
    _, low_index, _ = _basis(n, order - 1)
    src, dst, fac = [], [], []
    for k, m in enumerate(monos):
        if m[var] == 0:
            continue
        lowered = list(m)
        lowered[var] -= 1
        src.append(k)
        dst.append(low_index[tuple(lowered)])
        fac.append(float(m[var]))
    return (np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp),
            np.array(fac))


class Jet:
    """Truncated Taylor expansion of a scalar field in ``n`` variables."""

    __slots__ = ("n", "order", "coeffs")
    # numpy scalars must defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, n: int, order: int, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (basis_size(n, order),):
            raise JetShapeError(
                f"expected {basis_size(n, order)} coefficients for n={n}, "
                f"order={order}, got shape {coeffs.shape}")
        coeffs.flags.writeable = False
        self.n = n
        self.order = order
        self.coeffs = coeffs

    # -- construction helpers -------------------------------------------
    @classmethod
    def const(cls, value: float, n: int, order: int) -> "Jet":
        c = np.zeros(basis_size(n, order))
        c[0] = value
        return cls(n, order, c)

    @classmethod
    def from_dict(cls, n: int, order: int, entries: dict) -> "Jet":
        _, index, _ = _basis(n, order)
        c = np.zeros(basis_size(n, order))
        for m, v in entries.items():
            c[index[tuple(m)]] = v
        return cls(n, order, c)

    # -- inspection ------------------------------------------------------
    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def coefficient(self, m) -> float:
        m = tuple(m)
        if len(m) != self.n:
            raise ValueError(f"multi-index {m} has wrong length for n={self.n}")
        if any(e < 0 for e in m):
            raise ValueError(f"negative exponent in multi-index {m}")
        if sum(m) > self.order:
            raise ValueError(
                f"multi-index {m} has degree {sum(m)} > order {self.order}")
        return float(self.coeffs[_basis(self.n, self.order)[1][m]])

    def partial(self, m) -> float:
        """Mixed partial derivative of total degree ``|m| <= order``."""
        c = self.coefficient(m)
        return c * math.prod(math.factorial(e) for e in m)

    def gradient(self) -> np.ndarray:
        if self.order < 1:
            raise ValueError("gradient needs order >= 1")
        return np.array(self.coeffs[1:1 + self.n])

    def as_dict(self) -> dict:
        monos = _basis(self.n, self.order)[0]
        return {m: float(c) for m, c in zip(monos, self.coeffs) if c != 0.0}

    def deriv(self, var: int) -> "Jet":
        """Jet of the partial derivative along ``var``, one order lower."""
        if not 0 <= var < self.n:
            raise IndexError(f"variable {var} out of range for n={self.n}")
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        src, dst, fac = _deriv_table(self.n, self.order, var)
        out = np.zeros(basis_size(self.n, self.order - 1))
        out[dst] = self.coeffs[src] * fac
        return Jet(self.n, self.order - 1, out)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError(f"cannot raise order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.n, order, self.coeffs[:basis_size(self.n, order)])

    # -- arithmetic ------------------------------------------------------
    def _check(self, other: "Jet"):
        if other.n != self.n or other.order != self.order:
            raise JetShapeError(
                f"jet shape mismatch: (n={self.n}, order={self.order}) vs "
                f"(n={other.n}, order={other.order})")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.n, self.order, self.coeffs + other.coeffs)
        if isinstance(other, Real):
            c = self.coeffs.copy()
            c[0] += other
            return Jet(self.n, self.order, c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.n, self.order, -self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.n, self.order, self.coeffs - other.coeffs)
        if isinstance(other, Real):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Real):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            ii, jj, kk = _mul_table(self.n, self.order)
            out = np.bincount(kk, weights=self.coeffs[ii] * other.coeffs[jj],
                              minlength=self.coeffs.size)
            return Jet(self.n, self.order, out)
        if isinstance(other, Real):
            return Jet(self.n, self.order, self.coeffs * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return self * recip(other)
        if isinstance(other, Real):
            return Jet(self.n, self.order, self.coeffs / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Real):
            return recip(self) * other
        return NotImplemented

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            p = int(p)
            if p < 0:
                return recip(self) ** (-p)
            result = Jet.const(1.0, self.n, self.order)
            base = self
            while p:
                if p & 1:
                    result = result * base
                p >>= 1
                if p:
                    base = base * base
            return result
        return pow_rational(self, p)

    def __repr__(self):
        return f"Jet(n={self.n}, order={self.order}, value={self.value:.6g})"


# -- construction -----------------------------------------------------------

def constant(value: float, n: int, order: int) -> Jet:
    return Jet.const(value, n, order)


def seed_variable(i: int, value: float, n: int, order: int) -> Jet:
    """Jet of the coordinate function ``x_i`` about ``x_i = value``."""
    if not 0 <= i < n:
        raise IndexError(f"coordinate index {i} out of range for n={n}")
    if order < 1:
        raise ValueError("seeding needs order >= 1")
    if order > MAX_ORDER:
        raise ValueError(f"order {order} exceeds MAX_ORDER={MAX_ORDER}")
    c = np.zeros(basis_size(n, order))
    c[0] = value
    c[1 + i] = 1.0
    return Jet(n, order, c)


def seed_point(point, order: int) -> list:
    point = [float(v) for v in point]
    return [seed_variable(i, v, len(point), order) for i, v in enumerate(point)]


def partial(a: Jet, m) -> float:
    return a.partial(m)


def value_of(a) -> float:
    return a.value if isinstance(a, Jet) else float(a)


# -- composition with univariate functions ---------------------------------

def _compose(a: Jet, taylor) -> Jet:
    # f(a0 + h) = sum_k t_k h^k with h nilpotent past `order`; Horner form.
    h = a - a.value
    result = Jet.const(taylor[a.order], a.n, a.order)
    for k in range(a.order - 1, -1, -1):
        result = result * h + taylor[k]
    return result


def _power_taylor(a0: float, p: float, order: int):
    out = []
    coef = 1.0
    for k in range(order + 1):
        out.append(coef * a0 ** (p - k))
        coef *= (p - k) / (k + 1)
    return out


def _jet_sin(a: Jet) -> Jet:
    s, c = math.sin(a.value), math.cos(a.value)
    cycle = [s, c, -s, -c]
    return _compose(a, [cycle[k % 4] / math.factorial(k)
                        for k in range(a.order + 1)])


def _jet_cos(a: Jet) -> Jet:
    s, c = math.sin(a.value), math.cos(a.value)
    cycle = [c, -s, -c, s]
    return _compose(a, [cycle[k % 4] / math.factorial(k)
                        for k in range(a.order + 1)])


def _jet_exp(a: Jet) -> Jet:
    e = math.exp(a.value)
    return _compose(a, [e / math.factorial(k) for k in range(a.order + 1)])


def _jet_log(a: Jet) -> Jet:
    a0 = a.value
    if a0 <= 0.0:
        raise JetDomainError(f"log of jet with non-positive value {a0!r}")
    taylor = [math.log(a0)]
    for k in range(1, a.order + 1):
        taylor.append((-1) ** (k - 1) / (k * a0 ** k))
    return _compose(a, taylor)


def _jet_pow(a: Jet, p: float) -> Jet:
    a0 = a.value
    if a0 <= 0.0 and float(p) != int(p):
        raise JetDomainError(
            f"non-integer power {p} of jet with non-positive value {a0!r}")
    if a0 == 0.0:
        raise JetDomainError("power of jet with zero value")
    return _compose(a, _power_taylor(a0, float(p), a.order))


def _jet_sqrt(a: Jet) -> Jet:
    if a.value <= 0.0:
        raise JetDomainError(f"sqrt of jet with non-positive value {a.value!r}")
    return _compose(a, _power_taylor(a.value, 0.5, a.order))


def _jet_recip(a: Jet) -> Jet:
    if a.value == 0.0:
        raise JetDomainError("division by jet with zero constant term")
    return _compose(a, _power_taylor(a.value, -1.0, a.order))


_APPLY = {
    "sin": _jet_sin,
    "cos": _jet_cos,
    "exp": _jet_exp,
    "log": _jet_log,
    "sqrt": _jet_sqrt,
    "recip": _jet_recip,
}


def jet_apply(fn: str, a: Jet, exponent=None) -> Jet:
    """Compose ``fn`` with the jet ``a``; ``pow_rational`` needs ``exponent``."""
    if fn == "pow_rational":
        if exponent is None:
            raise ValueError("pow_rational needs an exponent")
        return _jet_pow(a, exponent)
    try:
        return _APPLY[fn](a)
    except KeyError:
        raise ValueError(f"unknown jet function {fn!r}") from None


def jet_combine(kind: str, a: Jet, b: Jet) -> Jet:
    a._check(b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown combination {kind!r}")


# -- float/jet polymorphic helpers ----------------------------------------
# Geometry code calls these so the same formula runs on floats and jets.

def sin(a):
    return _jet_sin(a) if isinstance(a, Jet) else math.sin(a)


def cos(a):
    return _jet_cos(a) if isinstance(a, Jet) else math.cos(a)


def exp(a):
    return _jet_exp(a) if isinstance(a, Jet) else math.exp(a)


def log(a):
    if isinstance(a, Jet):
        return _jet_log(a)
    if a <= 0:
        raise JetDomainError(f"log of non-positive value {a!r}")
    return math.log(a)


def sqrt(a):
    if isinstance(a, Jet):
        return _jet_sqrt(a)
    if a < 0:
        raise JetDomainError(f"sqrt of negative value {a!r}")
    return math.sqrt(a)


def recip(a):
    if isinstance(a, Jet):
        return _jet_recip(a)
    if a == 0:
        raise JetDomainError("division by zero")
    return 1.0 / a


def pow_rational(a, p):
    if isinstance(a, Jet):
        return _jet_pow(a, p)
    return float(a) ** float(p)
