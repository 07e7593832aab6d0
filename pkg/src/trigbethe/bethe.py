"""Off-shell Bethe vectors and dual Bethe vectors built from the recurrences.

One parameter ``z`` is peeled from a color ``l`` per step; the vector is then a
double sum over ``i <= l < j`` of ``T_{i,j}(z) / lambda_l(z)`` applied to
smaller vectors, weighted by partition products.  Denominators that can vanish
for coincident parameters in neighbouring colors are paired with their
numerators and evaluated in the reciprocal forms ``1/f``, ``g/f``, ``g~/f``.

The dual recurrence has the same shape with the co-state right-multiplied by
``T_{j,i}(z)`` and with ``g`` and ``g~`` exchanging roles.

Routes decide which parameter is peeled.  Any route gives the same vector; the
choice exists so that this can be tested.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import repchain as rc
from .partitions import InfeasiblePartition, enumerate_partitions
from .scalars import PoleError, Scalar, format_scalar, is_exact, parse_scalar, to_scalar

STATE_SCHEMA = "trigbethe.state/1"


def scalar_key(x: Scalar) -> tuple:
    if is_exact(x):
        return (0, x, 0)
    x = complex(x)
    return (1, x.real, x.imag)


@dataclass(frozen=True)
class BetheSpec:
    """A chain together with colored parameter sets ``t^1..t^{N-1}``."""

    chain: rc.ChainSpec
    sets: tuple

    def __post_init__(self) -> None:
        sets = tuple(tuple(to_scalar(x) for x in s) for s in self.sets)
        if len(sets) != self.chain.N - 1:
            raise ValueError(f"need {self.chain.N - 1} parameter sets, got {len(sets)}")
        for c, s in enumerate(sets, start=1):
            if len(set(s)) != len(s):
                raise ValueError(f"parameters of color {c} must be pairwise distinct")
            if any(x in self.chain.xi for x in s):
                raise PoleError(f"color {c} parameter hits an inhomogeneity")
        object.__setattr__(self, "sets", sets)

    @property
    def r(self) -> tuple:
        return tuple(len(s) for s in self.sets)

    def as_dict(self) -> dict:
        return {"chain": self.chain.as_dict(), "sets": [[format_scalar(x) for x in s] for s in self.sets]}


@dataclass
class BetheVectorHandle:
    spec: BetheSpec
    state: np.ndarray
    route: str
    trace: list = field(default_factory=list)  # top-level (color, peeled parameter)
    dual: bool = False


# ---------------------------------------------------------------------------
# Routes


class InfeasibleRoute(ValueError):
    """The requested color to peel from is empty."""


Chooser = Callable[[tuple, int], tuple]  # (sets, step) -> (color, element index)


def _lowest(sets: tuple, step: int) -> tuple:
    c = next(k for k, s in enumerate(sets) if s)
    return c + 1, len(sets[c]) - 1


def _highest(sets: tuple, step: int) -> tuple:
    c = max(k for k, s in enumerate(sets) if s)
    return c + 1, len(sets[c]) - 1


def _sequence(colors: Sequence[int]) -> Chooser:
    colors = tuple(colors)

    # Sub-vectors of the expansion lose parameters from several colors at once,
    # so a color can be empty there although the top-level sets allow it.  Only
    # the top-level request is binding; deeper steps fall back to the lowest color.
    def choose(sets: tuple, step: int) -> tuple:
        if step >= len(colors):
            return _lowest(sets, step)
        c = colors[step]
        if not 1 <= c <= len(sets) or not sets[c - 1]:
            if step == 0:
                raise InfeasibleRoute(f"route asks for color {c} but it is empty")
            return _lowest(sets, step)
        return c, len(sets[c - 1]) - 1

    return choose


def _seeded(seed: int) -> Chooser:
    def choose(sets: tuple, step: int) -> tuple:
        rng = random.Random(f"{seed}|{[[str(x) for x in s] for s in sets]}")
        c = rng.choice([k for k, s in enumerate(sets) if s])
        return c + 1, rng.randrange(len(sets[c]))

    return choose


def resolve_route(route) -> tuple:
    """Return ``(name, chooser, depends_on_step)`` for a route description.

    Accepted: ``"canonical"``/``"lowest"``, ``"highest"``, ``"random:<seed>"``,
    an integer color (top level only) or a sequence of colors, one per step.
    """
    if route in ("canonical", "lowest", None):
        return "canonical", _lowest, False
    if route == "highest":
        return "highest", _highest, False
    if isinstance(route, str) and route.startswith("random:"):
        seed = int(route.split(":", 1)[1])
        return route, _seeded(seed), False
    if isinstance(route, int):
        return f"top:{route}", _sequence([route]), True
    if isinstance(route, (list, tuple)):
        return "seq:" + ",".join(map(str, route)), _sequence(route), True
    raise ValueError(f"unknown route {route!r}")


# ---------------------------------------------------------------------------
# Builder


class BetheBuilder:
    """Memoised recursive construction of ``B(t)`` (or ``C(u)`` when ``dual``).

    With ``canonicalize`` the sets are sorted before lookup, so permutations
    within a color share one cache entry.  Without it the given order is kept
    and the route's element index refers to that order.
    """

    def __init__(self, chain: rc.ChainSpec, route="canonical", dual: bool = False, canonicalize: bool = True) -> None:
        self.chain = chain
        self.route_name, self.choose, self.stepwise = resolve_route(route)
        self.dual = dual
        self.canonicalize = canonicalize
        self.cache: dict = {}
        self._top = 0

    def _key(self, sets: tuple) -> tuple:
        if self.canonicalize:
            return tuple(tuple(sorted(s, key=scalar_key)) for s in sets)
        return sets

    def build(self, sets: Sequence[Sequence[Scalar]]) -> np.ndarray:
        sets = tuple(tuple(s) for s in sets)
        self._top = sum(map(len, sets))
        return self._build(self._key(sets))

    def top_choice(self, sets: Sequence[Sequence[Scalar]]) -> tuple | None:
        key = self._key(tuple(tuple(s) for s in sets))
        if not any(key):
            return None
        ell, idx = self.choose(key, 0)
        return ell, key[ell - 1][idx]

    def _build(self, key: tuple) -> np.ndarray:
        size = sum(map(len, key))
        ck = (key, self._top - size) if self.stepwise else key
        hit = self.cache.get(ck)
        if hit is not None:
            return hit
        if size == 0:
            out = rc.dual_vacuum(self.chain) if self.dual else rc.vacuum(self.chain)
        else:
            ell, idx = self.choose(key, self._top - size)
            out = self._peel(key, ell, idx)
        self.cache[ck] = out
        return out

    def _peel(self, t: tuple, ell: int, idx: int) -> np.ndarray:
        chain, K, N = self.chain, self.chain.kernel, self.chain.N
        z = t[ell - 1][idx]
        rest = t[ell - 1][:idx] + t[ell - 1][idx + 1 :]
        # s[p] for p = 0..N, with s[0] = s[N] = () and s[ell] the remaining set
        s = ((),) + t[: ell - 1] + (rest,) + t[ell:] + ((),)
        lam = rc.lambda_eval(chain, ell, z)
        if lam == 0:
            raise PoleError(f"lambda_{ell}({z}) vanishes")
        # I-side uses g~/f in the direct recurrence, g/f in the dual one; III-side the other
        side_I, side_III = (K.hinv, K.htinv) if self.dual else (K.htinv, K.hinv)
        out = rc.zeros(chain)
        for i in range(ell, 0, -1):
            if any(len(s[p]) < 1 for p in range(i, ell)):
                break
            for j in range(ell + 1, N + 1):
                if any(len(s[p]) < 1 for p in range(ell + 1, j)):
                    break
                acc = None
                cons = {p: {"I": 1} for p in range(i, ell)}
                cons.update({p: {"III": 1} for p in range(ell + 1, j)})
                try:
                    parts = list(enumerate_partitions({p: s[p] for p in cons}, cons, remainder="II"))
                except InfeasiblePartition:
                    continue
                for part in parts:
                    try:
                        c = self._coefficient(s, part, i, j, ell, z, lam, side_I, side_III)
                    except PoleError as exc:
                        raise PoleError(f"peeling {z} from color {ell}, term (i={i}, j={j}): {exc}") from None
                    if c == 0:
                        continue
                    sub = tuple(
                        part[p].II if p in part else s[p] for p in range(1, N)
                    )
                    vec = self._build(self._key(sub))
                    acc = c * vec if acc is None else acc + c * vec
                if acc is None:
                    continue
                if self.dual:
                    out = out + rc.apply_entry_left(chain, j, i, z, acc)
                else:
                    out = out + rc.apply_entry(chain, i, j, z, acc)
        return out

    def _coefficient(self, s, part, i, j, ell, z, lam, side_I, side_III) -> Scalar:
        chain, K = self.chain, self.chain.kernel
        I = {p: part[p].I[0] for p in range(i, ell)}
        I[ell] = z
        III = {p: part[p].III[0] for p in range(ell + 1, j)}
        III[ell] = z
        c = 1 / lam
        for p in range(i, ell):
            c *= rc.beta_eval(chain, p, I[p])
            for y in part[p].II:
                c *= K.f(I[p], y)
        for p in range(i + 1, ell + 1):
            c *= side_I(I[p], I[p - 1])
            for y in part[p - 1].II:
                c *= K.finv(I[p], y)
        for y in s[i - 1]:
            c *= K.finv(I[i], y)
        for p in range(ell + 1, j):
            for x in part[p].II:
                c *= K.f(x, III[p]) * K.finv(x, III[p - 1])
            c *= side_III(III[p], III[p - 1])
        for x in s[j] if j < len(s) else ():
            c *= K.finv(x, III[j - 1])
        return c


# ---------------------------------------------------------------------------
# Public operations

_BUILDERS: dict = {}


def builder_for(chain: rc.ChainSpec, route="canonical", dual: bool = False, canonicalize: bool = True) -> BetheBuilder:
    name = resolve_route(route)[0]
    key = (chain.digest(), chain.exact, name, dual, canonicalize)
    b = _BUILDERS.get(key)
    if b is None or b.chain != chain:
        b = _BUILDERS[key] = BetheBuilder(chain, route, dual, canonicalize)
    return b


def clear_cache() -> None:
    _BUILDERS.clear()


def build_bethe(spec: BetheSpec, route="canonical", canonicalize: bool = True) -> BetheVectorHandle:
    b = builder_for(spec.chain, route, False, canonicalize)
    state = b.build(spec.sets)
    top = b.top_choice(spec.sets)
    return BetheVectorHandle(spec, state, b.route_name, [] if top is None else [top])


def build_dual(spec: BetheSpec, route="canonical", canonicalize: bool = True) -> BetheVectorHandle:
    b = builder_for(spec.chain, route, True, canonicalize)
    state = b.build(spec.sets)
    top = b.top_choice(spec.sets)
    return BetheVectorHandle(spec, state, b.route_name, [] if top is None else [top], dual=True)


def bethe_state(chain: rc.ChainSpec, sets: Sequence[Sequence[Scalar]]) -> np.ndarray:
    """Canonical-route ``B(t)`` for raw parameter sets."""
    return builder_for(chain).build(sets)


def dual_state(chain: rc.ChainSpec, sets: Sequence[Sequence[Scalar]]) -> np.ndarray:
    return builder_for(chain, dual=True).build(sets)


def renormalize_hlprs(handle: BetheVectorHandle) -> np.ndarray:
    """Rescale to the normalization ``prod_i beta_i(t^i)^{-1} B(t)``."""
    chain = handle.spec.chain
    factor = chain.one()
    for i, s in enumerate(handle.spec.sets, start=1):
        for t in s:
            b = rc.beta_eval(chain, i, t)
            if b == 0:
                raise PoleError(f"beta_{i}({t}) vanishes")
            factor = factor / b
    return handle.state * factor


# ---------------------------------------------------------------------------
# Serialization


def state_to_json(state: np.ndarray, chain: rc.ChainSpec, meta: dict | None = None) -> dict:
    """Sparse listing of nonzero amplitudes, ``[index, numerator, denominator]``
    in exact mode and ``[index, re, im]`` in float mode."""
    entries = []
    exact = state.dtype == object
    for k, x in enumerate(state):
        if x == 0:
            continue
        if exact:
            entries.append([k, str(x.numerator), str(x.denominator)])
        else:
            entries.append([k, float(x.real), float(x.imag)])
    out = {
        "schema": STATE_SCHEMA,
        "mode": "exact" if exact else "float",
        "N": chain.N,
        "L": chain.L,
        "entries": entries,
    }
    if meta:
        out["meta"] = meta
    return out


def state_from_json(doc: dict, chain: rc.ChainSpec) -> np.ndarray:
    if doc.get("schema") != STATE_SCHEMA:
        raise ValueError(f"unsupported state schema {doc.get('schema')!r}")
    if (doc["N"], doc["L"]) != (chain.N, chain.L):
        raise ValueError("state dimensions do not match the chain")
    out = rc.zeros(chain) if doc["mode"] == "exact" else np.zeros(chain.dim, dtype=np.complex128)
    for k, a, b in doc["entries"]:
        if doc["mode"] == "exact":
            out[k] = parse_scalar(f"{a}/{b}")
        else:
            out[k] = complex(a, b)
    return out


def export_bethe(handle: BetheVectorHandle) -> str:
    meta = {"bethe": handle.spec.as_dict(), "route": handle.route, "dual": handle.dual}
    return json.dumps(state_to_json(handle.state, handle.spec.chain, meta), sort_keys=True)


def import_bethe(text: str) -> BetheVectorHandle:
    doc = json.loads(text)
    meta = doc.get("meta", {})
    b = meta.get("bethe")
    if b is None:
        raise ValueError("document carries no Bethe metadata")
    ch = b["chain"]
    chain = rc.ChainSpec(ch["N"], tuple(map(parse_scalar, ch["xi"])), tuple(map(parse_scalar, ch["d"])), parse_scalar(ch["q"]))
    spec = BetheSpec(chain, tuple(tuple(map(parse_scalar, s)) for s in b["sets"]))
    return BetheVectorHandle(spec, state_from_json(doc, chain), meta.get("route", "canonical"), dual=meta.get("dual", False))
