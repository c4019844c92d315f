"""(alpha, beta)-metrics ``F = alpha phi(beta/alpha)``.

The closed-form spray is written once over object arrays, so the same code
gives spray values at a point (float path) and spray jets in (x, y) for the
curvature operators (jet path).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Callable

import numpy as np

from . import jets
from .evaluators import FinslerFunction, SprayField
from .fields.expr import evaluate, parse_expr, to_text
from .fields.metric import MetricField, OneFormField
from .riemann import beta_field_jets, tensor_data

DEFAULT_MARGIN = 0.05
GRID_STEP = 1e-3


class PhiDomainError(ValueError):
    """phi or one of the Q/Theta/psi denominators is singular at (s, B)."""


class ConeError(ValueError):
    """Direction too close to the singular cone of phi."""


@dataclass(frozen=True)
class PhiFunction:
    """``phi(s)`` with its domain bound ``b0``.

    ``fn`` must accept floats and jets.  ``pole`` is the value of s where phi
    blows up (1 for Matsumoto); directions with ``s > pole - margin`` are
    rejected.  ``core`` optionally gives closed forms of (Q, Theta, psi).
    """

    name: str
    fn: Callable
    b0: float
    pole: float | None = None
    core: Callable | None = None
    text: str | None = None

    def __call__(self, s):
        return self.fn(s)

    def derivative(self, s, m: int):
        """``phi^(m)`` at a float or jet ``s``."""
        if not isinstance(s, jets.Jet):
            if m == 0:
                return float(self.fn(float(s)))
            u = jets.seed_variable(0, float(s), 1, m)
            return _univariate(self.fn(u), 1, m).partial((m,))
        K = s.order
        top = max(1, m + K)
        u = jets.seed_variable(0, s.value, 1, top)
        t = _univariate(self.fn(u), 1, top)
        # phi^(m)(s0 + h) = sum_j phi^(m+j)(s0) h^j / j!
        taylor = [t.coefficient((m + j,)) * math.factorial(m + j)
                  / math.factorial(j) for j in range(K + 1)]
        return jets._compose(s, taylor)

    def to_spec(self):
        if self.name in ("matsumoto", "randers"):
            return self.name
        return {"custom": self.text}


def _univariate(v, n, order):
    return v if isinstance(v, jets.Jet) else jets.constant(float(v), n, order)


def _matsumoto_core(s, B):
    A1 = 1.0 - 2.0 * s
    A2 = 1.0 + 2.0 * B - 3.0 * s
    _nonzero(A1, "A1 = 1 - 2s")
    _nonzero(A2, "A2 = 1 + 2B - 3s")
    return 1.0 / A1, (1.0 - 4.0 * s) / (2.0 * A2), 1.0 / A2


def matsumoto() -> PhiFunction:
    return PhiFunction("matsumoto", lambda s: 1.0 / (1.0 - s), b0=0.5,
                       pole=1.0, core=_matsumoto_core, text="1/(1 - s)")


def randers() -> PhiFunction:
    return PhiFunction("randers", lambda s: 1.0 + s, b0=1.0, text="1 + s")


def custom(text: str, b0: float = math.inf) -> PhiFunction:
    e = parse_expr(text, 1, aliases={"s": 0})
    return PhiFunction(f"custom:{to_text(e)}", lambda s: evaluate(e, [s]),
                       b0=b0, text=text)


def phi_from_spec(spec) -> PhiFunction:
    if isinstance(spec, PhiFunction):
        return spec
    if spec == "matsumoto":
        return matsumoto()
    if spec == "randers":
        return randers()
    if isinstance(spec, dict) and set(spec) == {"custom"}:
        return custom(spec["custom"])
    raise ValueError(f"unsupported phi {spec!r}")


def _nonzero(v, what):
    if abs(jets.value_of(v)) < 1e-14:
        raise PhiDomainError(f"{what} vanishes")


def strong_convexity_check(phi: PhiFunction, b: float,
                           step: float = GRID_STEP) -> bool:
    """Is ``phi - s phi' + (b^2 - s^2) phi'' > 0`` on a grid of |s| <= b."""
    if not 0.0 <= b < phi.b0:
        raise ValueError(f"b = {b} outside [0, b0) with b0 = {phi.b0}")
    count = max(2, int(round(2 * b / step)) + 1)
    for s in np.linspace(-b, b, count):
        u = jets.seed_variable(0, float(s), 1, 2)
        t = _univariate(phi(u), 1, 2)
        p0, p1, p2 = t.partial((0,)), t.partial((1,)), t.partial((2,))
        if not p0 > 0.0 or not p0 - s * p1 + (b * b - s * s) * p2 > 0.0:
            return False
    return True


def qtp_core(phi: PhiFunction, s, B):
    """``(Q, Theta, psi)`` at float or jet (s, B)."""
    if phi.core is not None:
        return phi.core(s, B)
    return generic_core(phi, s, B)


def generic_core(phi: PhiFunction, s, B):
    p0 = phi.derivative(s, 0)
    p1 = phi.derivative(s, 1)
    p2 = phi.derivative(s, 2)
    _nonzero(p0, "phi")
    d1 = p0 - s * p1
    _nonzero(d1, "phi - s phi'")
    d2 = d1 + (B - s * s) * p2
    _nonzero(d2, "phi - s phi' + (B - s^2) phi''")
    psi = p2 / (2.0 * d2)
    theta = p1 * d1 / (2.0 * p0 * d2) - s * psi
    return p1 / d1, theta, psi


@dataclass(frozen=True)
class QTP:
    s: float
    B: float
    Q: float
    Theta: float
    psi: float
    v: float
    Q_s: float
    Q_ss: float
    Q_sss: float
    psi_s: float
    psi_ss: float
    psi_sss: float
    psi_B: float
    psi_sB: float
    v_s: float
    v_ss: float
    v_B: float
    v_sB: float
    Theta_s: float
    Theta_B: float

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def qtp(phi: PhiFunction, s: float, B: float) -> QTP:
    """Q/Theta/psi and their derivative table by jets in (s, B)."""
    S = jets.seed_variable(0, float(s), 2, 3)
    Bj = jets.seed_variable(1, float(B), 2, 3)
    Q, Th, psi = generic_core(phi, S, Bj)
    v = -2.0 * psi * Q
    return QTP(
        s=float(s), B=float(B), Q=Q.value, Theta=Th.value, psi=psi.value,
        v=v.value, Q_s=Q.partial((1, 0)), Q_ss=Q.partial((2, 0)),
        Q_sss=Q.partial((3, 0)), psi_s=psi.partial((1, 0)),
        psi_ss=psi.partial((2, 0)), psi_sss=psi.partial((3, 0)),
        psi_B=psi.partial((0, 1)), psi_sB=psi.partial((1, 1)),
        v_s=v.partial((1, 0)), v_ss=v.partial((2, 0)), v_B=v.partial((0, 1)),
        v_sB=v.partial((1, 1)), Theta_s=Th.partial((1, 0)),
        Theta_B=Th.partial((0, 1)))


def qtp_matsumoto(s, B) -> QTP:
    """Closed-form Matsumoto table; arithmetic only, so jets pass through."""
    A1 = 1.0 - 2.0 * s
    A2 = 1.0 + 2.0 * B - 3.0 * s
    _nonzero(A1, "A1 = 1 - 2s")
    _nonzero(A2, "A2 = 1 + 2B - 3s")
    Q, Q_s, Q_ss, Q_sss = 1 / A1, 2 / A1 ** 2, 8 / A1 ** 3, 48 / A1 ** 4
    psi, psi_s, psi_ss, psi_sss = 1 / A2, 3 / A2 ** 2, 18 / A2 ** 3, 162 / A2 ** 4
    psi_B, psi_sB = -2 / A2 ** 2, -12 / A2 ** 3
    return QTP(
        s=s, B=B, Q=Q, Theta=(1 - 4 * s) / (2 * A2), psi=psi, v=-2 * psi * Q,
        Q_s=Q_s, Q_ss=Q_ss, Q_sss=Q_sss, psi_s=psi_s, psi_ss=psi_ss,
        psi_sss=psi_sss, psi_B=psi_B, psi_sB=psi_sB,
        v_s=-2 * (psi_s * Q + psi * Q_s),
        v_ss=-2 * (psi_ss * Q + 2 * psi_s * Q_s + psi * Q_ss),
        v_B=-2 * psi_B * Q, v_sB=-2 * (psi_sB * Q + psi_B * Q_s),
        Theta_s=-(1 + 8 * B) / (2 * A2 ** 2),
        Theta_B=-(1 - 4 * s) / A2 ** 2)


# -- F and its spray ----------------------------------------------------------

def finsler_function(metric: MetricField, oneform: OneFormField,
                     phi: PhiFunction) -> FinslerFunction:
    def fn(X, Y):
        a = metric.evaluate(X)
        b = oneform.evaluate(X)
        Y = np.asarray(Y, dtype=object)
        alpha = jets.sqrt(Y @ a @ Y)
        beta = b @ Y
        return alpha * phi(beta / alpha)
    return FinslerFunction(metric.n, fn, name=f"{phi.name} F")


def check_cone(phi: PhiFunction, s: float, margin: float = DEFAULT_MARGIN):
    if phi.pole is not None and s > phi.pole - margin:
        raise ConeError(
            f"s = {s:.6g} violates the cone margin (need s <= "
            f"{phi.pole - margin:.6g})")


def _split_terms(phi, a, gamma, b, bsharp, B, r, s_up, svec, y):
    """``(alpha G, P, Q)`` of the projective split at one direction."""
    n = len(y)
    ay = np.einsum("ij,j->i", a, y)
    alpha = jets.sqrt(np.einsum("i,i->", ay, y))
    beta = np.einsum("i,i->", b, y)
    s = beta / alpha
    Qf, Th, psi = qtp_core(phi, s, B)
    r00 = np.einsum("ij,i,j->", r, y, y)
    s0 = np.einsum("i,i->", svec, y)
    si0 = np.einsum("ij,j->i", s_up, y)
    h = r00 - 2.0 * alpha * Qf * s0
    aG = 0.5 * np.einsum("ijk,j,k->i", gamma, y, y)
    P = Th * h / alpha
    Qvec = np.array([alpha * Qf * si0[i] + psi * h * bsharp[i]
                     for i in range(n)], dtype=object)
    return aG, P, Qvec, s


@dataclass(frozen=True)
class ProjectiveSplit:
    alpha_G: np.ndarray
    P: float
    Q: np.ndarray
    G_bar: np.ndarray
    G: np.ndarray

    def to_dict(self) -> dict:
        return {"alpha_G": self.alpha_G.tolist(), "P": self.P,
                "Q": self.Q.tolist(), "G_bar": self.G_bar.tolist(),
                "G": self.G.tolist()}


def projective_split(metric, oneform, phi, x, y,
                     margin: float = DEFAULT_MARGIN) -> ProjectiveSplit:
    phi = phi_from_spec(phi)
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise ValueError("direction y must be nonzero")
    td = tensor_data(metric, oneform, x)
    aG, P, Qv, s = _split_terms(phi, td.a, td.gamma, td.b, td.bsharp, td.B,
                                td.r, td.s_up, td.svec, y)
    check_cone(phi, float(s), margin)
    aG = np.asarray(aG, dtype=float)
    Qv = np.asarray(Qv, dtype=float)
    return ProjectiveSplit(alpha_G=aG, P=float(P), Q=Qv, G_bar=aG + Qv,
                           G=aG + float(P) * y + Qv)


def spray_closed_form(metric, oneform, phi, x, y,
                      margin: float = DEFAULT_MARGIN) -> np.ndarray:
    return projective_split(metric, oneform, phi, x, y, margin).G


def _field(metric, oneform, phi, part: str, name: str):
    phi = phi_from_spec(phi)
    n = metric.n

    def fn(X, Y):
        bj = beta_field_jets(metric, oneform, X)
        low = X[0].order - 1
        Yl = np.array([v.truncate(low) for v in Y], dtype=object)
        aG, P, Qv, _ = _split_terms(phi, bj.a, bj.gamma, bj.b, bj.bsharp,
                                    bj.B, bj.r, bj.s_up, bj.svec, Yl)
        if part == "P":
            return P
        if part == "bar":
            return [aG[i] + Qv[i] for i in range(n)]
        return [aG[i] + P * Yl[i] + Qv[i] for i in range(n)]

    if part == "P":
        return _ScalarField(fn, loss=1, name=name)
    return SprayField(n, fn, loss=1, name=name)


@dataclass(frozen=True)
class _ScalarField:
    fn: Callable
    loss: int
    name: str

    def __call__(self, X, Y):
        return self.fn(X, Y)


def spray_field(metric, oneform, phi) -> SprayField:
    """Closed-form spray ``G`` as a jet-capable field."""
    return _field(metric, oneform, phi, "full", "closed-form spray")


def bar_spray_field(metric, oneform, phi) -> SprayField:
    """``G_bar = alpha G + Q``, the spray with the ``P y`` part removed."""
    return _field(metric, oneform, phi, "bar", "bar spray")


def p_field(metric, oneform, phi):
    return _field(metric, oneform, phi, "P", "P")


__all__ = [
    "ConeError", "PhiDomainError", "PhiFunction", "ProjectiveSplit", "QTP",
    "bar_spray_field", "check_cone",
    "custom", "finsler_function", "generic_core", "matsumoto", "p_field",
    "phi_from_spec", "projective_split", "qtp", "qtp_core", "qtp_matsumoto",
    "randers", "spray_closed_form", "spray_field", "strong_convexity_check",
]
