"""Pure-Python (numpy-vectorised) monodromy kernels; fallback for ``_ckernels``."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _digit_slots(N: int, L: int) -> tuple:
    """``slots[k][b]`` = chain indices whose site ``k`` carries digit ``b``."""
    dim = N**L
    idx = np.arange(dim)
    out = []
    for k in range(L):
        d = (idx // N**k) % N
        out.append(tuple(np.nonzero(d == b)[0] for b in range(N)))
    return tuple(out)


def _zeros(dim: int, like: np.ndarray) -> np.ndarray:
    if like.dtype == object:
        z = np.empty(dim, dtype=object)
        z[:] = 0 * like[0] if dim else 0
        return z
    return np.zeros(dim, dtype=like.dtype)


def apply_entry(amps, N, L, start, end, sites, fv, lo, hi, scale):
    """Matrix-free application of one monodromy entry.

    The auxiliary space starts in basis state ``start`` (0-based) and every site
    ``k`` in ``sites`` (in order) is hit by the local R-matrix: a pair
    ``(aux a, site b)`` keeps its place with weight ``fv[k]`` if ``a == b``
    (weight 1 otherwise) and hops to ``(aux b, site a)`` with weight ``lo[k]``
    when ``b < a`` or ``hi[k]`` when ``b > a``.  The result is the ``end``
    auxiliary component times ``scale``.
    """
    dim = N**L
    if amps.ndim != 1 or amps.shape[0] != dim:
        raise ValueError(f"state has shape {amps.shape}, expected ({dim},)")
    slots = _digit_slots(N, L)
    buf = {start: amps}
    for k in sites:
        stride = N**k
        new: dict = {}
        for a, x in buf.items():
            for b in range(N):
                pos = slots[k][b]
                vals = x[pos]
                if not vals.any():
                    continue
                tgt = new.get(a)
                if tgt is None:
                    tgt = new[a] = _zeros(dim, amps)
                if a == b:
                    tgt[pos] += fv[k] * vals
                    continue
                tgt[pos] += vals
                hop = new.get(b)
                if hop is None:
                    hop = new[b] = _zeros(dim, amps)
                coef = lo[k] if b < a else hi[k]
                hop[pos + (a - b) * stride] += coef * vals
        buf = new
    if end not in buf:
        return _zeros(dim, amps)
    return buf[end] * scale
