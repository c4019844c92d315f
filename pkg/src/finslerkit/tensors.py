"""Small helpers for arrays whose entries are floats or jets."""

from __future__ import annotations

import numpy as np

from . import jets


def is_jet_array(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object and any(
        isinstance(v, jets.Jet) for v in a.flat)


def values(a) -> np.ndarray:
    """Float array of the base-point values."""
    a = np.asarray(a, dtype=object)
    return np.vectorize(jets.value_of, otypes=[float])(a) if a.size else \
        np.zeros(a.shape)


def truncate(a, order: int):
    """Truncate every jet entry of ``a`` to ``order``; floats pass through."""
    if isinstance(a, jets.Jet):
        return a.truncate(order)
    if isinstance(a, np.ndarray) and a.dtype == object:
        out = np.empty(a.shape, dtype=object)
        for idx, v in np.ndenumerate(a):
            out[idx] = v.truncate(order) if isinstance(v, jets.Jet) else v
        return out
    return a


def deriv(a, var: int):
    """Entrywise derivative of a jet array along jet variable ``var``."""
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = v.deriv(var)
    return out


def inv(m):
    """Matrix inverse for float or jet-valued square matrices."""
    m = np.asarray(m)
    if m.dtype != object:
        return np.linalg.inv(m)
    n = m.shape[0]
    a = m.copy()
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(jets.value_of(a[r, col])))
        if jets.value_of(a[piv, col]) == 0.0:
            raise np.linalg.LinAlgError("singular matrix")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            out[[col, piv]] = out[[piv, col]]
        p = jets.recip(a[col, col])
        for c in range(n):
            a[col, c] = a[col, c] * p
            out[col, c] = out[col, c] * p
        for r in range(n):
            if r == col:
                continue
            f = a[r, col]
            for c in range(n):
                a[r, c] = a[r, c] - f * a[col, c]
                out[r, c] = out[r, c] - f * out[col, c]
    return out
