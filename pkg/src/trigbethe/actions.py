"""Action formulas: monodromy entries and zero modes on off-shell Bethe vectors.

Each formula is returned as a list of :class:`ActionTerm`; the verification
companions sum the terms over freshly built Bethe vectors and compare them with
direct operator application on the chain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import bethe as bt
from . import repchain as rc
from .partitions import InfeasiblePartition, Split, enumerate_partitions
from .scalars import PoleError, Scalar, format_scalar, izergin_over_f, to_scalar

REPORT_SCHEMA = "trigbethe.action-report/1"


@dataclass(frozen=True)
class ActionTerm:
    partition: dict  # color -> Split; empty for zero-mode terms
    coefficient: Scalar
    sets: tuple  # parameter sets of the resulting Bethe vector

    def as_dict(self) -> dict:
        return {
            "partition": {
                str(c): {k: [format_scalar(x) for x in v] for k, v in s.as_dict().items()}
                for c, s in sorted(self.partition.items())
            },
            "coefficient": format_scalar(self.coefficient),
            "sets": [[format_scalar(x) for x in s] for s in self.sets],
        }


def _prod(fn, xs, ys) -> Scalar:
    out = fn.__self__.q ** 0  # exact or complex unit, never a bare int
    for x in xs:
        for y in ys:
            out = out * fn(x, y)
    return out


def _beta(chain: rc.ChainSpec, p: int, xs) -> Scalar:
    out = 1
    for x in xs:
        out = out * rc.beta_eval(chain, p, x)
    return out


def _w_sets(z: Sequence[Scalar], t: Sequence[Sequence[Scalar]], N: int) -> dict:
    z = tuple(z)
    for c, s in enumerate(t, start=1):
        if set(z) & set(s):
            raise PoleError(f"action parameter coincides with a color-{c} Bethe parameter")
    return {p: z + tuple(t[p - 1]) for p in range(1, N)}


def _partitions(i: int, j: int, w: dict, r: int, N: int):
    cons = {p: {} for p in range(1, N)}
    for p in range(1, N):
        if p < i:
            cons[p]["I"] = r
        if p >= j:
            cons[p]["III"] = r
    try:
        return list(enumerate_partitions(w, cons, remainder="II"))
    except InfeasiblePartition:
        return []


def _boundary(part: dict, z: tuple, N: int) -> dict:
    full = dict(part)
    full[0] = Split(I=z)
    full[N] = Split(III=z)
    return full


def _coefficient(chain: rc.ChainSpec, i: int, j: int, z: tuple, w: dict, multi: bool) -> Scalar:
    """``lambda_1(z) A_ij`` with ``h`` factors as ``g/f`` (single) or ``K/f`` (multi)."""
    K, N = chain.kernel, chain.N
    c = chain.one()
    for x in z:
        c = c * rc.lambda_eval(chain, 1, x)
    if i > j:
        for p in range(j, i):
            c *= _prod(K.f, w[p].I, w[p].III)
        for p in range(j, i - 1):
            c *= _prod(K.finv, w[p + 1].I, w[p].III)
    for p in range(1, i):
        c *= _beta(chain, p, w[p].I) * _prod(K.f, w[p].I, w[p].II) * _prod(K.finv, w[p].I, w[p - 1].II)
        if multi:
            c *= izergin_over_f(w[p].I, w[p - 1].I, K, "K")
        else:
            c *= K.hinv(w[p].I[0], w[p - 1].I[0])
    for p in range(j, N):
        c *= _prod(K.f, w[p].II, w[p].III) * _prod(K.finv, w[p + 1].II, w[p].III)
        if multi:
            c *= izergin_over_f(w[p + 1].III, w[p].III, K, "Kt")
        else:
            c *= K.htinv(w[p + 1].III[0], w[p].III[0])
    return c


def _terms(chain: rc.ChainSpec, i: int, j: int, z: tuple, t, multi: bool) -> list:
    N = chain.N
    if not (1 <= i <= N and 1 <= j <= N):
        raise ValueError(f"entry indices ({i}, {j}) out of range")
    w = _w_sets(z, t, N)
    out = []
    for part in _partitions(i, j, w, len(z), N):
        full = _boundary(part, z, N)
        try:
            c = _coefficient(chain, i, j, z, full, multi)
        except PoleError as exc:
            label = {p: part[p].as_dict() for p in part}
            raise PoleError(f"T_{i}{j} action, partition {label}: {exc}") from None
        if c != 0:
            out.append(ActionTerm(part, c, tuple(part[p].II for p in range(1, N))))
    return out


def single_action(i: int, j: int, z: Scalar, t: Sequence[Sequence[Scalar]], chain: rc.ChainSpec) -> list:
    """Terms of ``T_{i,j}(z) B(t) = lambda_1(z) sum_part B(w_II) A_ij``.

    For ``i <= j`` the crossing factor is an empty product, which is the
    simplified form of the action.
    """
    return _terms(chain, i, j, (to_scalar(z),), t, multi=False)


def multi_action(i: int, j: int, z: Sequence[Scalar], t: Sequence[Sequence[Scalar]], chain: rc.ChainSpec) -> list:
    """Terms of ``T_{i,j}(z_1) ... T_{i,j}(z_r) B(t)`` with Izergin-determinant factors."""
    z = tuple(to_scalar(x) for x in z)
    if not z:
        raise ValueError("multiple action needs at least one parameter")
    if len(set(z)) != len(z):
        raise ValueError("multiple action parameters must be distinct")
    return _terms(chain, i, j, z, t, multi=True)


def t1n_action(z: Scalar, t: Sequence[Sequence[Scalar]], chain: rc.ChainSpec) -> list:
    """``T_{1,N}(z) B(t) = lambda_1(z) B(w)`` with ``w^i = {z, t^i}``."""
    z = to_scalar(z)
    w = _w_sets((z,), t, chain.N)
    return [ActionTerm({}, rc.lambda_eval(chain, 1, z), tuple(w[p] for p in range(1, chain.N)))]


def zero_mode_action(i: int, t: Sequence[Sequence[Scalar]], chain: rc.ChainSpec, literal: bool = False) -> list:
    """Terms of ``T^-_{i+1,i}[0] B(t)``, one per parameter of color ``i``.

    The second denominator is ``f(t^{i+1}, t^i_l)``, which matches the
    operator. ``literal=True`` evaluates it over the complementary set
    ``t^i minus t^i_l`` instead; that form disagrees with the operator as soon
    as ``r_i >= 2`` and ``r_{i+1} >= 1`` and is kept for the negative test.
    """
    N, K = chain.N, chain.kernel
    if not 1 <= i < N:
        raise ValueError(f"zero mode index {i} out of range")
    t = tuple(tuple(s) for s in t)
    ext = ((),) + t + ((),)
    r = [len(s) for s in ext]
    ki, ki1 = rc.kappa(chain, i), rc.kappa(chain, i + 1)
    out = []
    for ell, x in enumerate(ext[i]):
        rest = ext[i][:ell] + ext[i][ell + 1 :]
        a = ki * K.q ** (r[i] - r[i - 1] - 1) * rc.beta_eval(chain, i, x)
        a *= _prod(K.f, (x,), rest) * _prod(K.finv, (x,), ext[i - 1])
        b = ki1 * K.q ** (r[i + 1] - r[i] + 1) * _prod(K.f, rest, (x,))
        b *= _prod(K.finv, ext[i + 1], rest if literal else (x,))
        c = K.c * (a - b)
        if c != 0:
            sets = tuple(rest if p == i else t[p - 1] for p in range(1, N))
            out.append(ActionTerm({}, c, sets))
    return out


# ---------------------------------------------------------------------------
# Verification


def combine(terms: list, chain: rc.ChainSpec) -> np.ndarray:
    out = rc.zeros(chain)
    for term in terms:
        out = out + term.coefficient * bt.bethe_state(chain, term.sets)
    return out


def residual(a: np.ndarray, b: np.ndarray) -> float:
    """Zero for exact equality; otherwise the max-abs difference (``inf`` if unbounded)."""
    d = a - b
    if d.dtype == object:
        return 0.0 if rc.is_zero(d) else float(max(abs(x) for x in d))
    return float(np.max(np.abs(d))) if d.size else 0.0


def verify_single_action(i: int, j: int, z: Scalar, t, chain: rc.ChainSpec, terms: list | None = None) -> float:
    if terms is None:
        terms = single_action(i, j, z, t, chain)
    direct = rc.apply_entry(chain, i, j, to_scalar(z), bt.bethe_state(chain, t))
    return residual(combine(terms, chain), direct)


def verify_multi_action(i: int, j: int, z: Sequence[Scalar], t, chain: rc.ChainSpec, terms: list | None = None) -> float:
    """Compare with ``T_ij(z_1) T_ij(z_2) ... B(t)`` applied right to left."""
    if terms is None:
        terms = multi_action(i, j, z, t, chain)
    direct = bt.bethe_state(chain, t)
    for x in reversed(tuple(z)):
        direct = rc.apply_entry(chain, i, j, to_scalar(x), direct)
    return residual(combine(terms, chain), direct)


def verify_zero_mode_action(i: int, t, chain: rc.ChainSpec, literal: bool = False) -> float:
    terms = zero_mode_action(i, t, chain, literal)
    direct = rc.zero_mode(chain, "lower", i)(bt.bethe_state(chain, t))
    return residual(combine(terms, chain), direct)


def verify_t1n_action(z: Scalar, t, chain: rc.ChainSpec) -> float:
    direct = rc.apply_entry(chain, 1, chain.N, to_scalar(z), bt.bethe_state(chain, t))
    return residual(combine(t1n_action(z, t, chain), chain), direct)


def perturbed(terms: list, index: int = 0, delta: Scalar = 1) -> list:
    """Copy of ``terms`` with one coefficient shifted (negative control for the checks)."""
    out = list(terms)
    if out:
        k = index % len(out)
        tm = out[k]
        out[k] = ActionTerm(tm.partition, tm.coefficient + delta, tm.sets)
    return out


def action_report(kind: str, i: int, j: int, z, t, chain: rc.ChainSpec, terms: list, res: float) -> dict:
    zs = z if isinstance(z, (list, tuple)) else [z]
    return {
        "schema": REPORT_SCHEMA,
        "kind": kind,
        "i": i,
        "j": j,
        "z": [format_scalar(to_scalar(x)) for x in zs],
        "sets": [[format_scalar(to_scalar(x)) for x in s] for s in t],
        "chain": chain.as_dict(),
        "terms": [tm.as_dict() for tm in terms],
        "residual": res,
        "pass": res == 0.0,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)
