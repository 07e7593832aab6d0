"""Scalar products of dual and ordinary Bethe vectors.

Two independent evaluations are provided:

* the direct pairing ``C(u) B(t)`` of vectors built on a chain, and
* the partition sum over ``W(u_I, u_II | t_I, t_II) prod beta(u_II) beta(t_I)``
  with ``W`` assembled from the highest coefficients ``Z`` and ``Zbar``.

The highest coefficients depend on ``q`` and the parameters only.  They are
evaluated by recursions that peel the last element of one color of ``u``.
The general recursions pair each ``g``/``g~`` with its ``f`` denominator, so
the ``1/f``, ``g/f``, ``g~/f`` forms keep them finite when a peeled parameter
reappears in a neighbouring color.  The extreme-color variants are kept in
their literal form as an independent code path.
"""

from __future__ import annotations

from typing import Sequence

from . import bethe as bt
from . import repchain as rc
from .partitions import InfeasiblePartition, enumerate_partitions, split_set
from .scalars import Kernel, PoleError, Scalar, to_scalar

Key = tuple  # (u sets, t sets), each a tuple of N-1 tuples


class CardinalityMismatch(ValueError):
    """Highest coefficients need ``|u^i| = |t^i|`` for every color."""


def _prod(fn, xs, ys) -> Scalar:
    out = fn.__self__.q ** 0  # exact or complex unit, never a bare int
    for x in xs:
        for y in ys:
            out = out * fn(x, y)
    return out


def _canon(sets) -> tuple:
    return tuple(tuple(sorted(s, key=bt.scalar_key)) for s in sets)


def _pad(sets: tuple) -> tuple:
    return ((),) + tuple(sets) + ((),)


def _parts(cons: dict, sets: dict) -> list:
    try:
        return list(enumerate_partitions(sets, cons, remainder="II"))
    except InfeasiblePartition:
        return []


class HighestCoefficients:
    """Memoised ``Z`` and ``Zbar`` for one deformation parameter.

    ``ell`` chooses the color to peel: ``"lowest"`` / ``"highest"`` nonempty
    color at every level, or an integer for the top level only.
    """

    def __init__(self, kernel: Kernel, ell="lowest") -> None:
        self.K = kernel
        self.ell = ell
        self.memo: dict = {}

    # -- public ------------------------------------------------------------

    def Z(self, u: Sequence, t: Sequence) -> Scalar:
        return self._eval("Z", self._key(u, t), top=True)

    def Zbar(self, u: Sequence, t: Sequence) -> Scalar:
        return self._eval("Zbar", self._key(u, t), top=True)

    def terms(self, kind: str, u: Sequence, t: Sequence, ell: int) -> list:
        """``[(sub_key, coefficient)]`` of one recursion step at color ``ell``."""
        key = self._key(u, t)
        return self._z_terms(key, ell) if kind == "Z" else self._zbar_terms(key, ell)

    # -- internals -----------------------------------------------------------

    def _key(self, u, t) -> Key:
        u = tuple(tuple(to_scalar(x) for x in s) for s in u)
        t = tuple(tuple(to_scalar(x) for x in s) for s in t)
        if len(u) != len(t) or [len(s) for s in u] != [len(s) for s in t]:
            raise CardinalityMismatch(f"cardinalities {[len(s) for s in u]} and {[len(s) for s in t]} differ")
        return _canon(u), _canon(t)

    def _choose(self, key: Key, top: bool) -> int:
        u = key[0]
        nonempty = [k + 1 for k, s in enumerate(u) if s]
        if isinstance(self.ell, int) and top:
            if self.ell not in nonempty:
                raise ValueError(f"cannot peel from empty color {self.ell}")
            return self.ell
        return nonempty[-1] if self.ell == "highest" else nonempty[0]

    def _eval(self, kind: str, key: Key, top: bool = False) -> Scalar:
        mk = (kind, key) if not top or not isinstance(self.ell, int) else (kind, key, "top")
        hit = self.memo.get(mk)
        if hit is not None:
            return hit
        if not any(key[0]):
            if any(key[1]):
                raise CardinalityMismatch("recursion reached empty u with nonempty t")
            val = to_scalar(1) if not isinstance(self.K.q, complex) else 1 + 0j
        else:
            ell = self._choose(key, top)
            terms = self._z_terms(key, ell) if kind == "Z" else self._zbar_terms(key, ell)
            val = 0
            for sub, c in terms:
                val = val + c * self._eval(kind, sub)
        self.memo[mk] = val
        return val

    def _z_terms(self, key: Key, ell: int) -> list:
        K = self.K
        U, T = _pad(key[0]), _pad(key[1])
        N = len(U) - 1
        uI = U[ell][-1]
        urest = U[ell][:-1]
        out = []
        for j in range(ell + 1, N + 1):
            sets, cons = {}, {}
            for s in range(1, ell):
                sets[("w", s)] = (uI,) + T[s]
                cons[("w", s)] = {"I": 1}
            for s in range(ell, j):
                sets[("t", s)] = T[s]
                cons[("t", s)] = {"I": 1}
            for s in range(ell + 1, j):
                sets[("u", s)] = U[s]
                cons[("u", s)] = {"III": 1}
            for part in _parts(cons, sets):
                wI = {0: uI}
                wII = {0: ()}
                for s in range(1, ell):
                    wI[s], wII[s] = part[("w", s)].I[0], part[("w", s)].II
                tI = {s: part[("t", s)].I[0] for s in range(ell, j)}
                tII = {s: part[("t", s)].II for s in range(ell, j)}
                uIII = {ell: uI}
                uII = {ell: urest}
                for s in range(ell + 1, j):
                    uIII[s], uII[s] = part[("u", s)].III[0], part[("u", s)].II
                try:
                    c = _prod(K.f, T[ell], (uI,)) * _prod(K.finv, (uI,), U[ell - 1])
                    c *= K.hinv(tI[ell], wI[ell - 1]) * _prod(K.finv, (tI[ell],), wII[ell - 1])
                    c *= _prod(K.f, (tI[ell],), tII[ell])
                    for p in range(1, ell):
                        c *= K.hinv(wI[p], wI[p - 1]) * _prod(K.finv, (wI[p],), wII[p - 1])
                        c *= _prod(K.f, (wI[p],), wII[p])
                    for p in range(ell + 1, j):
                        c *= K.htinv(uIII[p], uIII[p - 1]) * _prod(K.finv, uII[p], (uIII[p - 1],))
                        c *= _prod(K.f, uII[p], (uIII[p],))
                        c *= K.hinv(tI[p], tI[p - 1]) * _prod(K.finv, (tI[p],), tII[p - 1])
                        c *= _prod(K.f, (tI[p],), tII[p])
                    c *= _prod(K.finv, U[j], (uIII[j - 1],))
                except PoleError as exc:
                    raise PoleError(f"Z recursion at color {ell}, j={j}: {exc}") from None
                if c == 0:
                    continue
                su = tuple(uII[s] if ell <= s < j else U[s] for s in range(1, N))
                st = tuple(wII[s] if s < ell else tII[s] if s < j else T[s] for s in range(1, N))
                out.append(((_canon(su), _canon(st)), c))
        return out

    def _zbar_terms(self, key: Key, ell: int) -> list:
        K = self.K
        U, T = _pad(key[0]), _pad(key[1])
        N = len(U) - 1
        uI = U[ell][-1]
        urest = U[ell][:-1]
        out = []
        for i in range(1, ell + 1):
            sets, cons = {}, {}
            for s in range(i, ell):
                sets[("u", s)] = U[s]
                cons[("u", s)] = {"I": 1}
            for s in range(i, ell + 1):
                sets[("t", s)] = T[s]
                cons[("t", s)] = {"III": 1}
            for s in range(ell + 1, N):
                sets[("w", s)] = (uI,) + T[s]
                cons[("w", s)] = {"III": 1}
            for part in _parts(cons, sets):
                uIs = {ell: uI}
                uII = {ell: urest}
                for s in range(i, ell):
                    uIs[s], uII[s] = part[("u", s)].I[0], part[("u", s)].II
                # III chain X^p with companions Y_II^p, p = i..N
                X, YII = {N: uI}, {N: ()}
                for s in range(i, ell + 1):
                    X[s], YII[s] = part[("t", s)].III[0], part[("t", s)].II
                for s in range(ell + 1, N):
                    X[s], YII[s] = part[("w", s)].III[0], part[("w", s)].II
                try:
                    c = _prod(K.f, (uI,), T[ell]) * _prod(K.finv, U[ell + 1], (uI,))
                    for p in range(i + 1, ell + 1):
                        c *= K.hinv(uIs[p], uIs[p - 1]) * _prod(K.finv, (uIs[p],), uII[p - 1])
                    for p in range(i, ell):
                        c *= _prod(K.f, (uIs[p],), uII[p])
                    c *= _prod(K.finv, (uIs[i],), U[i - 1])
                    for p in range(i, N):
                        c *= K.htinv(X[p + 1], X[p]) * _prod(K.finv, YII[p + 1], (X[p],))
                        c *= _prod(K.f, YII[p], (X[p],))
                except PoleError as exc:
                    raise PoleError(f"Zbar recursion at color {ell}, i={i}: {exc}") from None
                if c == 0:
                    continue
                su = tuple(uII[s] if i <= s <= ell else U[s] for s in range(1, N))
                st = tuple(T[s] if s < i else YII[s] for s in range(1, N))
                out.append(((_canon(su), _canon(st)), c))
        return out


# ---------------------------------------------------------------------------
# Extreme colors, literal form


def z_terms_first_color(kernel: Kernel, u: Sequence, t: Sequence) -> list:
    """Terms of the ``Z`` recursion peeling color 1, evaluated as written with ``g``, ``g~``, ``f``."""
    K = kernel
    U, T = _pad(_canon(u)), _pad(_canon(t))
    N = len(U) - 1
    uI, urest = U[1][-1], U[1][:-1]
    out = []
    for j in range(2, N + 1):
        sets = {("t", s): T[s] for s in range(1, j)}
        cons = {("t", s): {"I": 1} for s in range(1, j)}
        sets.update({("u", s): U[s] for s in range(2, j)})
        cons.update({("u", s): {"III": 1} for s in range(2, j)})
        for part in _parts(cons, sets):
            tI = {s: part[("t", s)].I for s in range(1, j)}
            tII = {s: part[("t", s)].II for s in range(1, j)}
            uIII = {1: (uI,)}
            uII = {1: urest}
            for s in range(2, j):
                uIII[s], uII[s] = part[("u", s)].III, part[("u", s)].II
            c = _prod(K.g, tI[1], (uI,)) * _prod(K.f, tII[1], (uI,)) * _prod(K.f, tI[1], tII[1])
            c /= _prod(K.f, U[2], (uI,))
            for p in range(2, j):
                c *= _prod(K.gt, uIII[p], uIII[p - 1]) * _prod(K.f, uII[p], uIII[p])
                c /= _prod(K.f, U[p + 1], uIII[p])
                c *= _prod(K.g, tI[p], tI[p - 1]) * _prod(K.f, tI[p], tII[p])
                c /= _prod(K.f, tI[p], T[p - 1])
            if c == 0:
                continue
            su = tuple(uII[s] if s < j else U[s] for s in range(1, N))
            st = tuple(tII[s] if s < j else T[s] for s in range(1, N))
            out.append(((_canon(su), _canon(st)), c))
    return out


def zbar_terms_last_color(kernel: Kernel, u: Sequence, t: Sequence) -> list:
    """Terms of the ``Zbar`` recursion peeling color ``N-1``, evaluated as written."""
    K = kernel
    U, T = _pad(_canon(u)), _pad(_canon(t))
    N = len(U) - 1
    uI, urest = U[N - 1][-1], U[N - 1][:-1]
    out = []
    for i in range(1, N):
        sets = {("u", s): U[s] for s in range(i, N - 1)}
        cons = {("u", s): {"I": 1} for s in range(i, N - 1)}
        sets.update({("t", s): T[s] for s in range(i, N)})
        cons.update({("t", s): {"III": 1} for s in range(i, N)})
        for part in _parts(cons, sets):
            uIs = {N - 1: (uI,)}
            uII = {N - 1: urest}
            for s in range(i, N - 1):
                uIs[s], uII[s] = part[("u", s)].I, part[("u", s)].II
            tIII = {s: part[("t", s)].III for s in range(i, N)}
            tII = {s: part[("t", s)].II for s in range(i, N)}
            c = _prod(K.gt, (uI,), tIII[N - 1]) * _prod(K.f, (uI,), tII[N - 1])
            c *= _prod(K.f, tII[N - 1], tIII[N - 1]) / _prod(K.f, (uI,), U[N - 2])
            for p in range(i, N - 1):
                c *= _prod(K.gt, tIII[p + 1], tIII[p]) * _prod(K.f, tII[p], tIII[p])
                c /= _prod(K.f, T[p + 1], tIII[p])
                c *= _prod(K.g, uIs[p + 1], uIs[p]) * _prod(K.f, uIs[p], uII[p])
                c /= _prod(K.f, uIs[p], U[p - 1])
            if c == 0:
                continue
            su = tuple(U[s] if s < i else uII[s] for s in range(1, N))
            st = tuple(T[s] if s < i else tII[s] for s in range(1, N))
            out.append(((_canon(su), _canon(st)), c))
    return out


def term_dict(terms: list) -> dict:
    """Aggregate ``[(key, coefficient)]`` by key, dropping zero totals."""
    acc: dict = {}
    for k, c in terms:
        acc[k] = acc.get(k, 0) + c
    return {k: c for k, c in acc.items() if c != 0}


# ---------------------------------------------------------------------------
# Convenience wrappers

_HC: dict = {}


def hc(kernel: Kernel, ell="lowest") -> HighestCoefficients:
    key = (kernel.q, ell)
    obj = _HC.get(key)
    if obj is None:
        obj = _HC[key] = HighestCoefficients(kernel, ell)
    return obj


def Z(u, t, q, ell="lowest") -> Scalar:
    return hc(Kernel(q), ell).Z(u, t)


def Zbar(u, t, q, ell="lowest") -> Scalar:
    return hc(Kernel(q), ell).Zbar(u, t)


def _invert_sets(sets) -> tuple:
    return tuple(tuple(1 / to_scalar(x) for x in s) for s in sets)


def zbar_via_inversion(u, t, q, ell="lowest") -> Scalar:
    """``Zbar_q(u|t)`` computed as ``Z_{1/q}(1/t | 1/u)``.

    This is the form the exchange symmetry takes once the ``q -> 1/q``,
    ``x -> 1/x`` substitution of the dual construction is carried along.
    """
    q = to_scalar(q)
    return hc(Kernel(1 / q), ell).Z(_invert_sets(t), _invert_sets(u))


def scalar_product_direct(u, t, chain: rc.ChainSpec) -> Scalar:
    """``C(u) B(t)`` paired on the chain."""
    return rc.pair(bt.dual_state(chain, u), bt.bethe_state(chain, t))


def scalar_product_partition_sum(u, t, chain: rc.ChainSpec, ell="lowest") -> Scalar:
    """Sum over ``|u^i_I| = |t^i_I|`` partitions of ``W prod beta_i(u^i_II) beta_i(t^i_I)``."""
    u = tuple(tuple(to_scalar(x) for x in s) for s in u)
    t = tuple(tuple(to_scalar(x) for x in s) for s in t)
    if [len(s) for s in u] != [len(s) for s in t]:
        return chain.zero()
    K = chain.kernel
    H = hc(K, ell)
    N = chain.N
    per_color = []
    for s_u, s_t in zip(u, t):
        opts = []
        for k in range(len(s_u) + 1):
            for su in split_set(s_u, {"I": k}):
                for st in split_set(s_t, {"I": k}):
                    opts.append((su, st))
        per_color.append(opts)
    total = chain.zero()

    def rec(c: int, chosen: list) -> None:
        nonlocal total
        if c == N - 1:
            total += _w_term(chosen, H, K, chain)
            return
        for opt in per_color[c]:
            chosen.append(opt)
            rec(c + 1, chosen)
            chosen.pop()

    rec(0, [])
    return total


def _w_term(chosen: list, H: HighestCoefficients, K: Kernel, chain: rc.ChainSpec) -> Scalar:
    uI = [su.I for su, _ in chosen]
    uII = [su.II for su, _ in chosen]
    tI = [st.I for _, st in chosen]
    tII = [st.II for _, st in chosen]
    c = chain.one()
    for i in range(len(chosen)):
        c *= _prod(K.f, uII[i], uI[i]) * _prod(K.f, tI[i], tII[i])
        c *= rc.beta_set(chain, i + 1, uII[i]) * rc.beta_set(chain, i + 1, tI[i])
        if i + 1 < len(chosen):
            c *= _prod(K.finv, uII[i + 1], uI[i]) * _prod(K.finv, tI[i + 1], tII[i])
    if c == 0:
        return c
    return c * H.Z(uI, tI) * H.Zbar(uII, tII)
