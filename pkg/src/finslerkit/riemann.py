"""Riemannian machinery for alpha and the covariant data of beta.

Indices are raised and lowered with ``a_ij``.  Covariant derivatives of the
derived tensors (r_ij, s_ij, s_i) are obtained by differentiating their
component fields with jets and adding the Christoffel corrections.

All contractions with a direction ``y`` are written with numpy ``einsum``
and therefore accept ``y`` as a float array or as an object array of jets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .evaluators import FinslerFunction, SprayField
from .fields.metric import MetricField, OneFormField, lift
from .tensors import inv, truncate, values

STRUCTURE_TOL = 1e-9


def _coords_jets(metric: MetricField, X):
    order = X[0].order
    space = X[0].n
    return lift(metric.evaluate(X), space, order), order, space


def levi_civita(metric: MetricField, X):
    """Jets of ``a_ij``, ``a^ij`` and ``Gamma^i_jk`` on coordinate jets ``X``.

    ``a`` keeps the order of ``X``; the inverse and the Christoffel symbols
    come back one order lower.
    """
    a, order, _ = _coords_jets(metric, X)
    n = metric.n
    da = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                da[i, j, k] = da[j, i, k] = a[i, j].deriv(k)
    ainv = inv(truncate(a, order - 1))
    # t[l, j, k] = d_k a_lj + d_j a_lk - d_l a_jk
    t = np.empty((n, n, n), dtype=object)
    for l in range(n):
        for j in range(n):
            for k in range(j, n):
                t[l, j, k] = t[l, k, j] = da[l, j, k] + da[l, k, j] - da[j, k, l]
    gamma = 0.5 * np.einsum("il,ljk->ijk", ainv, t)
    return a, ainv, gamma


def christoffel(metric: MetricField, x) -> np.ndarray:
    """``Gamma^i_jk`` at ``x`` as an (n, n, n) array, symmetric in j, k."""
    metric.check_positive_definite(x)
    _, _, gamma = levi_civita(metric, jets.seed_point(x, 1))
    return values(gamma)


def alpha_spray(metric: MetricField, x, y) -> np.ndarray:
    gamma = christoffel(metric, x)
    y = np.asarray(y, dtype=float)
    return 0.5 * np.einsum("ijk,j,k->i", gamma, y, y)


def alpha_spray_field(metric: MetricField) -> SprayField:
    def fn(X, Y):
        _, _, gamma = levi_civita(metric, X)
        k = X[0].order - 1
        Yk = np.array([v.truncate(k) for v in Y], dtype=object)
        return list(0.5 * np.einsum("ijk,j,k->i", gamma, Yk, Yk))
    return SprayField(metric.n, fn, loss=1, name="alpha spray")


def alpha_function(metric: MetricField) -> FinslerFunction:
    def fn(X, Y):
        a = metric.evaluate(X)
        Y = np.asarray(Y, dtype=object)
        return jets.sqrt(Y @ a @ Y)
    return FinslerFunction(metric.n, fn, name="alpha")


def _cov2(t1, gamma):
    """``T_ij|k`` from order-1 jets of a (0,2) tensor and Gamma values."""
    n = t1.shape[0]
    dt = np.array([[t1[i, j].gradient()[:n] for j in range(n)]
                   for i in range(n)])
    t = values(t1)
    return (dt - np.einsum("mik,mj->ijk", gamma, t)
            - np.einsum("mjk,im->ijk", gamma, t))


def _cov1(v1, gamma):
    n = v1.shape[0]
    dv = np.array([v1[i].gradient()[:n] for i in range(n)])
    return dv - np.einsum("mik,m->ik", gamma, values(v1))


@dataclass(frozen=True)
class TensorData:
    """Direction-independent tensors of (alpha, beta) at one point x."""

    x: np.ndarray
    a: np.ndarray
    ainv: np.ndarray
    gamma: np.ndarray        # Gamma^i_jk
    riemann: np.ndarray      # R^i_jkl
    b: np.ndarray            # b_i
    bsharp: np.ndarray       # b^i
    B: float
    bij: np.ndarray          # b_i|j
    r: np.ndarray            # r_ij
    s: np.ndarray            # s_ij
    s_up: np.ndarray         # s^i_j
    r_up: np.ndarray         # r^i_j
    svec: np.ndarray         # s_j
    rvec: np.ndarray         # r_j
    rscal: float             # r
    r_cov: np.ndarray        # r_ij|k
    s_cov: np.ndarray        # s_ij|k
    svec_cov: np.ndarray     # s_i|k
    dB: np.ndarray           # d_k (b^2)

    @property
    def n(self) -> int:
        return self.a.shape[0]


def tensor_data(metric: MetricField, oneform: OneFormField, x) -> TensorData:
    x = np.asarray(x, dtype=float)
    metric.check_positive_definite(x)
    n = metric.n
    X = jets.seed_point(x, 2)
    a2, ainv1, gamma1 = levi_civita(metric, X)
    gamma = values(gamma1)
    dgamma = np.array([[[gamma1[i, j, k].gradient() for k in range(n)]
                        for j in range(n)] for i in range(n)])
    # R^i_jkl = d_k G^i_jl - d_l G^i_jk + G^i_km G^m_jl - G^i_lm G^m_jk
    riem = (dgamma.transpose(0, 1, 3, 2) - dgamma
            + np.einsum("ikm,mjl->ijkl", gamma, gamma)
            - np.einsum("ilm,mjk->ijkl", gamma, gamma))

    b2 = lift(oneform.evaluate(X), n, 2)
    b1 = truncate(b2, 1)
    db1 = np.array([[b2[i].deriv(j) for j in range(n)] for i in range(n)],
                   dtype=object)
    bij1 = db1 - np.einsum("kij,k->ij", gamma1, b1)
    r1 = 0.5 * (bij1 + bij1.T)
    s1 = 0.5 * (bij1 - bij1.T)
    bsharp1 = ainv1 @ b1
    svec1 = np.einsum("i,ij->j", bsharp1, s1)
    rvec1 = np.einsum("i,ij->j", bsharp1, r1)

    a = values(a2)
    ainv = values(ainv1)
    b = values(b1)
    bsharp = values(bsharp1)
    bij = values(bij1)
    r = values(r1)
    s = values(s1)
    svec = values(svec1)
    rvec = values(rvec1)
    r_cov = _cov2(r1, gamma)
    s_cov = _cov2(s1, gamma)
    svec_cov = _cov1(svec1, gamma)
    dB = 2.0 * np.einsum("i,ik->k", bsharp, bij)
    return TensorData(
        x=x, a=a, ainv=ainv, gamma=gamma, riemann=riem, b=b, bsharp=bsharp,
        B=float(b @ bsharp), bij=bij, r=r, s=s, s_up=ainv @ s, r_up=ainv @ r,
        svec=svec, rvec=rvec, rscal=float(bsharp @ rvec), r_cov=r_cov,
        s_cov=s_cov, svec_cov=svec_cov, dB=dB)


@dataclass(frozen=True)
class BetaFieldJets:
    """Tensors of (alpha, beta) as jets in (x, y), one order below the seeds."""

    a: np.ndarray
    ainv: np.ndarray
    gamma: np.ndarray
    b: np.ndarray
    bsharp: np.ndarray
    B: object
    r: np.ndarray
    s: np.ndarray
    s_up: np.ndarray
    svec: np.ndarray


def beta_field_jets(metric: MetricField, oneform: OneFormField,
                    X) -> BetaFieldJets:
    order = X[0].order
    n = metric.n
    a, ainv, gamma = levi_civita(metric, X)
    bK = lift(oneform.evaluate(X), X[0].n, order)
    b = truncate(bK, order - 1)
    bij = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            t = bK[i].deriv(j)
            for k in range(n):
                t = t - gamma[k, i, j] * b[k]
            bij[i, j] = t
    r = 0.5 * (bij + bij.T)
    s = 0.5 * (bij - bij.T)
    bsharp = np.array([sum((ainv[i, j] * b[j] for j in range(1, n)),
                           ainv[i, 0] * b[0]) for i in range(n)], dtype=object)
    s_up = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            s_up[i, j] = sum((ainv[i, k] * s[k, j] for k in range(1, n)),
                             ainv[i, 0] * s[0, j])
    svec = np.array([sum((bsharp[i] * s[i, j] for i in range(1, n)),
                         bsharp[0] * s[0, j]) for j in range(n)], dtype=object)
    B = sum((b[i] * bsharp[i] for i in range(1, n)), b[0] * bsharp[0])
    return BetaFieldJets(a=truncate(a, order - 1), ainv=ainv, gamma=gamma,
                         b=b, bsharp=bsharp, B=B, r=r, s=s, s_up=s_up,
                         svec=svec)


def riemann_tensor(metric: MetricField, x) -> np.ndarray:
    """``R^i_jkl`` of alpha at x (convention: R^i_k(y) = R^i_jkl y^j y^l)."""
    return tensor_data(metric, OneFormField.zero(metric.n), x).riemann


def alpha_curvature(td: TensorData, y):
    """Riemann curvature ``R^i_k`` of alpha along y."""
    return np.einsum("ijkl,j,l->ik", td.riemann, y, y)


@dataclass(frozen=True)
class BetaInvariants:
    """The r/s family of beta and its contractions with one direction y."""

    td: TensorData
    y: np.ndarray
    alpha: object
    beta: object
    s: object
    r00: object
    r0: object
    s0: object
    s_i0: np.ndarray       # s^i_0
    r_i0: np.ndarray       # r^i_0
    r_up_vec: np.ndarray   # r^i
    s_up_vec: np.ndarray   # s^i
    s0k_sk0: object        # s_0k s^k_0
    sk_sk0: object         # s_k s^k_0
    rk0_sk0: object        # r_k0 s^k_0
    sk_sk: object          # s_k s^k
    sik_ski: float         # s^i_k s^k_i
    sik_sk0: np.ndarray    # s^i_k s^k_0
    sik_sk: np.ndarray     # s^i_k s^k
    rmm: float             # r^m_m
    r0m_rm0: object        # r_0m r^m_0
    rm_rm0: object         # r_m r^m_0
    sm_rm0: object         # s_m r^m_0 (= s^k r_0k)
    rm_sm0: object         # r_m s^m_0 (= r^k s_k0)

    @property
    def B(self) -> float:
        return self.td.B

    @property
    def b(self):
        return self.td.b

    @property
    def bsharp(self):
        return self.td.bsharp

    @property
    def r(self) -> float:
        return self.td.rscal


def contract_beta(td: TensorData, y) -> BetaInvariants:
    y = np.asarray(y)
    if y.dtype != object:
        y = y.astype(float)
    a, ainv = td.a, td.ainv
    alpha = jets.sqrt(y @ a @ y)
    beta = td.b @ y
    r0j = td.r @ y            # r_j0 (r symmetric)
    s0j = y @ td.s            # s_0j
    s_i0 = td.s_up @ y
    r_i0 = td.r_up @ y
    s_up_vec = ainv @ td.svec
    r_up_vec = ainv @ td.rvec
    ss = td.s_up @ td.s_up    # s^i_k s^k_j
    return BetaInvariants(
        td=td, y=y, alpha=alpha, beta=beta, s=beta / alpha,
        r00=y @ r0j, r0=td.rvec @ y, s0=td.svec @ y,
        s_i0=s_i0, r_i0=r_i0, r_up_vec=r_up_vec, s_up_vec=s_up_vec,
        s0k_sk0=s0j @ s_i0, sk_sk0=td.svec @ s_i0, rk0_sk0=r0j @ s_i0,
        sk_sk=float(td.svec @ s_up_vec), sik_ski=float(np.trace(ss)),
        sik_sk0=ss @ y, sik_sk=td.s_up @ s_up_vec,
        rmm=float(np.trace(td.r_up)), r0m_rm0=r0j @ r_i0,
        rm_rm0=td.rvec @ r_i0, sm_rm0=td.svec @ r_i0, rm_sm0=td.rvec @ s_i0)


def beta_invariants(metric, oneform, x, y) -> BetaInvariants:
    if not np.any(np.asarray(y, dtype=float)):
        raise ValueError("direction y must be nonzero")
    return contract_beta(tensor_data(metric, oneform, x), y)


@dataclass(frozen=True)
class HorizontalDerivs:
    """Second-level covariant scalars of beta contracted with y and b."""

    r00_0: object      # r_00|0
    r00_b: object      # b^j r_00|j
    rj0_0b: object     # b^j r_j0|0
    s0_0: object       # s_0|0
    s0_b: object       # b^j s_0|j
    sj_0b: object      # b^j s_j|0
    si0_b: np.ndarray  # b^j s^i_0|j
    sij_0b: np.ndarray  # b^j s^i_j|0
    si0_0: np.ndarray  # s^i_0|0
    sk0_k: object      # s^k_0|k
    bk_smk_m: float    # b^k s^m_k|m
    bb_r0k_m: object   # b^k b^m r_0k|m
    bb_rmk_0: object   # b^k b^m r_mk|0


def contract_horizontal(td: TensorData, y) -> HorizontalDerivs:
    y = np.asarray(y)
    if y.dtype != object:
        y = y.astype(float)
    b = td.bsharp
    rc, sc = td.r_cov, td.s_cov
    sc_up = np.einsum("il,ljk->ijk", td.ainv, sc)   # s^i_j|k
    return HorizontalDerivs(
        r00_0=np.einsum("ijk,i,j,k->", rc, y, y, y),
        r00_b=np.einsum("ijk,i,j,k->", rc, y, y, b),
        rj0_0b=np.einsum("ijk,i,j,k->", rc, b, y, y),
        s0_0=np.einsum("ik,i,k->", td.svec_cov, y, y),
        s0_b=np.einsum("ik,i,k->", td.svec_cov, y, b),
        sj_0b=np.einsum("ik,i,k->", td.svec_cov, b, y),
        si0_b=np.einsum("ijk,j,k->i", sc_up, y, b),
        sij_0b=np.einsum("ijk,j,k->i", sc_up, b, y),
        si0_0=np.einsum("ijk,j,k->i", sc_up, y, y),
        sk0_k=np.einsum("kjk,j->", sc_up, y),
        bk_smk_m=float(np.einsum("mkm,k->", sc_up, b)),
        bb_r0k_m=np.einsum("ikm,i,k,m->", rc, y, b, b),
        bb_rmk_0=np.einsum("mki,m,k,i->", rc, b, b, y))


def horizontal_derivatives(metric, oneform, x, y) -> HorizontalDerivs:
    return contract_horizontal(tensor_data(metric, oneform, x), y)


def killing_classifier(metric, oneform, xs, tol: float = STRUCTURE_TOL) -> dict:
    """Structural flags of beta from residuals maximised over sample points."""
    xs = list(xs)
    if not xs:
        raise ValueError("killing_classifier needs at least one sample point")
    res = dict(r=0.0, s=0.0, svec=0.0, bij=0.0, dB=0.0)
    for x in xs:
        td = tensor_data(metric, oneform, x)
        res["r"] = max(res["r"], float(np.abs(td.r).max()))
        res["s"] = max(res["s"], float(np.abs(td.s).max()))
        res["svec"] = max(res["svec"], float(np.abs(td.svec).max()))
        res["bij"] = max(res["bij"], float(np.abs(td.bij).max()))
        res["dB"] = max(res["dB"], float(np.abs(td.dB).max()))
    return {
        "is_killing": res["r"] < tol,
        "is_closed": res["s"] < tol,
        "has_constant_length": res["dB"] < tol,
        "is_constant_killing": res["r"] < tol and res["svec"] < tol,
        "is_parallel": res["bij"] < tol,
        "residuals": res,
    }
