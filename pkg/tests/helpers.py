"""Shared fixtures and an independent dense oracle for the monodromy matrix."""

from __future__ import annotations

import itertools

from gmpy2 import mpq

from trigbethe import repchain as rc
from trigbethe.scalars import RationalSampler

Q = mpq(5, 3)


def make_chain(N: int, L: int, seed: int = 0, q=Q) -> rc.ChainSpec:
    S = RationalSampler(("chain", N, L, seed).__repr__())
    return rc.ChainSpec(N, tuple(S.generic(L, [0], q)), tuple(S.distinct(N)), q)


def make_sets(S: RationalSampler, r, avoid, q=Q) -> list:
    used = [0] + list(avoid)
    out = []
    for n in r:
        xs = S.generic(n, used, q)
        used += xs
        out.append(xs)
    return out


def valid_weight(r, L: int) -> bool:
    """Nonvanishing criterion on a fundamental chain: ``L >= r_1 >= r_2 >= ...``."""
    return r[0] <= L and all(r[k] >= r[k + 1] for k in range(len(r) - 1))


# ---------------------------------------------------------------------------
# Dense oracle: T(z) = D R_{0L}(z, xi_L) ... R_{01}(z, xi_1) built from the
# defining formula with explicit basis bookkeeping, no shared code with the
# matrix-free kernels beyond the scalar functions f, g, g~.


def _f(q, u, v):
    return (q * u - v / q) / (u - v)


def _g(q, u, v):
    return (q - 1 / q) * u / (u - v)


def _gt(q, u, v):
    return (q - 1 / q) * v / (u - v)


def _r_action(q, N, u, v, x, y):
    """``R(u, v)|x, y>`` as ``{(x', y'): coefficient}``."""
    if x == y:
        return {(x, x): _f(q, u, v)}
    p = _g(q, u, v) if y < x else _gt(q, u, v)
    return {(x, y): mpq(1) if not isinstance(u, complex) else 1, (y, x): p}


def dense_entry(chain: rc.ChainSpec, i: int, j: int, z) -> dict:
    """``{(row, col): value}`` of the operator ``T_{i,j}(z)`` on the chain."""
    N, L, q = chain.N, chain.L, chain.q
    out: dict = {}
    for col in range(N**L):
        digits = [d - 1 for d in rc.index_config(N, L, col)]  # 1-based -> 0-based
        states = {(j - 1, tuple(digits)): mpq(1)}
        for k in range(L):
            nxt: dict = {}
            for (a, ds), c in states.items():
                for (a2, b2), w in _r_action(q, N, z, chain.xi[k], a, ds[k]).items():
                    nd = ds[:k] + (b2,) + ds[k + 1 :]
                    nxt[(a2, nd)] = nxt.get((a2, nd), 0) + c * w
            states = nxt
        for (a, ds), c in states.items():
            if a == i - 1 and c != 0:
                row = rc.config_index(N, [d + 1 for d in ds])
                out[(row, col)] = out.get((row, col), 0) + chain.d[i - 1] * c
    return out


def dense_apply(chain: rc.ChainSpec, i: int, j: int, z, s):
    M = dense_entry(chain, i, j, z)
    out = rc.zeros(chain)
    for (row, col), c in M.items():
        out[row] = out[row] + c * s[col]
    return out


def quadruples(N: int):
    return itertools.product(range(1, N + 1), repeat=4)


# ---------------------------------------------------------------------------
# Literal extreme recurrences: one step written out term by term, with the
# smaller vectors taken from the library.


def _prod(fn, xs, ys):
    out = mpq(1)
    for x in xs:
        for y in ys:
            out *= fn(x, y)
    return out


def _choices(sets, colors):
    """All ways of picking one element (I) from each listed color."""
    return itertools.product(*[[(k, s) for k in range(len(s))] for s in (sets[c - 1] for c in colors)])


def first_color_step(chain: rc.ChainSpec, z, t: list, build):
    """``B({z, t^1}; t^2..)`` via the extreme recurrence peeling ``z`` from color 1."""
    N, K = chain.N, chain.kernel
    ext = [tuple(s) for s in t] + [()]
    lam = rc.lambda_eval(chain, 1, z)
    out = rc.zeros(chain)
    for j in range(2, N + 1):
        mids = list(range(2, j))
        for pick in _choices(t, mids):
            III = {1: (z,)}
            II = {}
            for p, (k, s) in zip(mids, pick):
                III[p] = (s[k],)
                II[p] = s[:k] + s[k + 1 :]
            c = 1 / _prod(K.f, ext[1], (z,))  # t^2 lives at ext[1]
            for p in mids:
                c *= _prod(K.g, III[p], III[p - 1]) * _prod(K.f, II[p], III[p]) / _prod(K.f, ext[p], III[p])
            sets = [tuple(t[0])] + [II[p] for p in mids] + [tuple(t[p - 1]) for p in range(j, N)]
            out = out + c * rc.apply_entry(chain, 1, j, z, build(sets)) / lam
    return out


def last_color_step(chain: rc.ChainSpec, z, t: list, build):
    """``B(..; {z, t^{N-1}})`` via the extreme recurrence peeling ``z`` from color ``N-1``."""
    N, K = chain.N, chain.kernel
    ext = [()] + [tuple(s) for s in t]  # ext[p] = t^p, ext[0] empty
    lam = rc.lambda_eval(chain, N - 1, z)
    out = rc.zeros(chain)
    for j in range(1, N):
        mids = list(range(j, N - 1))
        for pick in _choices(t, mids):
            I = {N - 1: (z,)}
            II = {}
            for p, (k, s) in zip(mids, pick):
                I[p] = (s[k],)
                II[p] = s[:k] + s[k + 1 :]
            c = 1 / _prod(K.f, (z,), ext[N - 2]) if N > 2 else mpq(1)
            for p in mids:
                c *= rc.beta_set(chain, p, I[p]) * _prod(K.gt, I[p + 1], I[p]) * _prod(K.f, I[p], II[p])
                c /= _prod(K.f, I[p], ext[p - 1])
            sets = [tuple(t[p - 1]) for p in range(1, j)] + [II[p] for p in mids] + [tuple(t[N - 2])]
            out = out + c * rc.apply_entry(chain, j, N, z, build(sets)) / lam
    return out
