"""Verification battery shared by the command line and the test-suite.

Every check takes a :class:`Context` and returns a list of result dicts with a
``pass`` flag; failures carry a ``witness`` describing the offending input.
Sampling is seeded per check name, so each check is reproducible on its own
and independent of the order in which checks run.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable


from . import actions as ac
from . import bethe as bt
from . import repchain as rc
from . import roots as ro
from . import scalarprod as sp
from .scalars import Kernel, PoleError, RationalSampler, format_scalar, to_scalar

FLOAT_TOL = 1e-8


@dataclass(frozen=True)
class Context:
    N: int = 2
    L: int = 3
    q: object = "5/3"
    xi: tuple | None = None
    d: tuple | None = None
    seed: int = 0
    samples: int = 3
    magnitude: int = 9
    max_total: int = 3
    mode: str = "exact"
    perturb: bool = False
    literal: bool = False
    sets: tuple | None = None
    usets: tuple | None = None
    z: tuple | None = None
    r: tuple | None = None

    def sampler(self, name: str) -> RationalSampler:
        return RationalSampler(f"{self.seed}:{name}", self.magnitude)

    def chain(self, name: str = "chain", N: int | None = None, L: int | None = None) -> rc.ChainSpec:
        N = self.N if N is None else N
        L = self.L if L is None else L
        S = self.sampler(f"{name}:{N}:{L}")
        q = to_scalar(self.q)
        xi = self.xi if self.xi is not None and len(self.xi) == L else S.generic(L, [0], q)
        d = self.d if self.d is not None and len(self.d) == N else S.distinct(N)
        ch = rc.ChainSpec(N, tuple(xi), tuple(d), q)
        return ch.to_float() if self.mode == "float" else ch


def _fmt(res: float) -> float | str:
    return 0 if res == 0 else float(res)


def _ok(res: float, ctx: Context) -> bool:
    return res == 0 if ctx.mode == "exact" else res <= FLOAT_TOL


def _result(name: str, ok: bool, params: dict, residual=0, witness=None) -> dict:
    out = {"check": name, "pass": bool(ok), "params": params, "residual": _fmt(residual)}
    if not ok and witness is not None:
        out["witness"] = witness
    return out


def _residual(a, b) -> float:
    return ac.residual(a, b)


def _fmt_sets(sets) -> list:
    return [[format_scalar(x) for x in s] for s in sets]


def sample_sets(S: RationalSampler, r, avoid, q, exact: bool = True) -> list:
    used = list(avoid)
    out = []
    for n in r:
        xs = S.generic(n, used, q)
        used += xs
        out.append(xs if exact else [complex(x) for x in xs])
    return out


def cardinalities(N: int, max_total: int):
    """All ``(r_1..r_{N-1})`` with ``sum r <= max_total``, smallest totals first."""
    vecs = [r for r in itertools.product(range(max_total + 1), repeat=N - 1) if sum(r) <= max_total]
    return sorted(vecs, key=lambda r: (sum(r), r))


def _rational(x) -> object:
    """Exact value of a sampled parameter, undoing the float conversion of float mode."""
    if isinstance(x, complex):
        return to_scalar(Fraction(x.real).limit_denominator(10**6))
    return x


def _generic(ctx: Context, S: RationalSampler, ch: rc.ChainSpec, r, extra: int = 0, avoid=()):
    q = to_scalar(ctx.q)
    avoid = [to_scalar(0)] + [_rational(x) for x in list(ch.xi) + list(avoid)]
    sets = sample_sets(S, r, avoid, q)
    zs = S.generic(extra, avoid + [x for s in sets for x in s], q)
    if not ch.exact:
        sets = [[complex(x) for x in s] for s in sets]
        zs = [complex(x) for x in zs]
    return sets, zs


# ---------------------------------------------------------------------------
# Checks


def check_yang_baxter(ctx: Context) -> list:
    S = ctx.sampler("ybe")
    K = Kernel(to_scalar(ctx.q))
    out = []
    for k in range(ctx.samples):
        u, v, w = S.distinct(3)
        bad = rc.yang_baxter_residual(u, v, w, ctx.N, K)
        out.append(_result("yang-baxter", not bad, {"N": ctx.N, "sample": k}, len(bad),
                           {"u": format_scalar(u), "v": format_scalar(v), "w": format_scalar(w), "nonzero": len(bad)}))
    return out


def check_rll(ctx: Context, states: int = 3) -> list:
    S = ctx.sampler("rll")
    ch = ctx.chain()
    out = []
    for k in range(ctx.samples):
        u, v = S.generic(2, list(ch.xi) if ch.exact else [], to_scalar(ctx.q)) if ch.exact else [complex(x) for x in S.distinct(2)]
        vecs = [rc.random_state(ch, S) for _ in range(states)]
        worst, witness = 0.0, None
        for i, j, kk, l in itertools.product(range(1, ch.N + 1), repeat=4):
            for s in vecs:
                res = ac.residual(rc.rll_residual(ch, i, j, kk, l, u, v, s), rc.zeros(ch))
                if res > worst:
                    worst, witness = res, {"ijkl": [i, j, kk, l], "u": format_scalar(u), "v": format_scalar(v)}
        out.append(_result("rll", _ok(worst, ctx), {"N": ch.N, "L": ch.L, "sample": k}, worst, witness))
    return out


def check_vacuum(ctx: Context) -> list:
    S = ctx.sampler("vacuum")
    ch = ctx.chain()
    vac = rc.vacuum(ch)
    out = []
    for k in range(ctx.samples):
        z = S.generic(1, [0] + list(ch.xi), to_scalar(ctx.q))[0] if ch.exact else complex(S.scalar()) + 0.5j
        bad = []
        for i, j in itertools.product(range(1, ch.N + 1), repeat=2):
            Tv = rc.apply_entry(ch, i, j, z, vac)
            vT = rc.apply_entry_left(ch, i, j, z, vac)
            if i > j and _residual(Tv, rc.zeros(ch)) > (0 if ch.exact else FLOAT_TOL):
                bad.append(f"T{i}{j}|vac> != 0")
            if i < j and _residual(vT, rc.zeros(ch)) > (0 if ch.exact else FLOAT_TOL):
                bad.append(f"<vac|T{i}{j} != 0")
            if i == j:
                lam = rc.lambda_eval(ch, i, z)
                if _residual(Tv, lam * vac) > (0 if ch.exact else FLOAT_TOL) or _residual(vT, lam * vac) > (0 if ch.exact else FLOAT_TOL):
                    bad.append(f"T{i}{i} vacuum eigenvalue")
                if ch.exact and lam != rc.lambda_closed(ch, i, z):
                    bad.append(f"lambda_{i} closed form")
        out.append(_result("vacuum", not bad, {"N": ch.N, "L": ch.L, "sample": k}, len(bad), {"failures": bad}))
    return out


def check_zero_modes(ctx: Context) -> list:
    S = ctx.sampler("zero-modes")
    ch = ctx.chain()
    out = []
    for k in range(ctx.samples):
        z = S.generic(1, [0] + list(ch.xi), to_scalar(ctx.q))[0] if ch.exact else complex(S.scalar()) + 0.5j
        s = rc.random_state(ch, S)
        worst, witness = 0.0, None
        for i, j in itertools.product(range(1, ch.N + 1), repeat=2):
            cands = []
            if i < ch.N:
                cands.append(("zmc2", rc.zmc2_residual(ch, i, j, z, s)))
            if j > 1:
                cands.append(("zmc3", rc.zmc3_residual(ch, i, j, z, s)))
            for l in range(1, ch.N + 1):
                cands.append((f"zmcd(l={l})", rc.zmcd_residual(ch, i, j, l, z, s)))
            for label, v in cands:
                res = _residual(v, rc.zeros(ch))
                if res > worst:
                    worst, witness = res, {"relation": label, "i": i, "j": j}
        out.append(_result("zero-mode-relations", _ok(worst, ctx), {"N": ch.N, "L": ch.L, "sample": k}, worst, witness))
    for r in cardinalities(ch.N, min(ctx.max_total, 3)):
        sets, _ = _generic(ctx, S, ch, r)
        B = bt.bethe_state(ch, sets)
        ext = (0,) + tuple(r) + (0,)
        for i in range(1, ch.N + 1):
            weight = rc.kappa(ch, i) * ch.kernel.q ** (ext[i] - ext[i - 1])
            res = _residual(rc.zero_mode(ch, "diagonal", i)(B), weight * B)
            out.append(_result("zero-mode-diagonal", _ok(res, ctx), {"r": list(r), "i": i}, res, {"sets": _fmt_sets(sets)}))
        for i in range(1, ch.N):
            res = ac.verify_zero_mode_action(i, sets, ch, literal=ctx.literal)
            name = "zero-mode-action-literal" if ctx.literal else "zero-mode-action"
            out.append(_result(name, _ok(res, ctx), {"r": list(r), "i": i}, res, {"sets": _fmt_sets(sets)}))
    return out


def check_t1n(ctx: Context) -> list:
    S = ctx.sampler("t1n")
    ch = ctx.chain()
    out = []
    for r in cardinalities(ch.N, ctx.max_total):
        sets, zs = _generic(ctx, S, ch, r, 1)
        res = ac.verify_t1n_action(zs[0], sets, ch)
        out.append(_result("t1n-action", _ok(res, ctx), {"r": list(r)}, res, {"sets": _fmt_sets(sets)}))
    return out


def check_action(ctx: Context) -> list:
    S = ctx.sampler("action")
    ch = ctx.chain()
    out = []
    for r in cardinalities(ch.N, ctx.max_total):
        sets, zs = _generic(ctx, S, ch, r, ctx.samples)
        B = bt.bethe_state(ch, sets)
        for z in zs:
            for i, j in itertools.product(range(1, ch.N + 1), repeat=2):
                terms = ac.single_action(i, j, z, sets, ch)
                if ctx.perturb:
                    terms = ac.perturbed(terms)
                res = _residual(ac.combine(terms, ch), rc.apply_entry(ch, i, j, z, B))
                witness = None
                if not _ok(res, ctx):
                    witness = {"sets": _fmt_sets(sets), "z": format_scalar(z), "terms": [t.as_dict() for t in terms]}
                    if ctx.perturb and terms:
                        witness["perturbed_term"] = terms[0].as_dict()
                out.append(_result("single-action", _ok(res, ctx), {"r": list(r), "i": i, "j": j, "z": format_scalar(z)}, res, witness))
    return out


def check_multi_action(ctx: Context) -> list:
    S = ctx.sampler("multi-action")
    ch = ctx.chain()
    out = []
    for r in cardinalities(ch.N, min(ctx.max_total, 2)):
        sets, zs = _generic(ctx, S, ch, r, 2)
        for i, j in itertools.product(range(1, ch.N + 1), repeat=2):
            terms = ac.multi_action(i, j, zs, sets, ch)
            if ctx.perturb:
                terms = ac.perturbed(terms)
            res = ac.verify_multi_action(i, j, zs, sets, ch, terms)
            res_swap = ac.verify_multi_action(i, j, zs[::-1], sets, ch, terms)
            worst = max(res, res_swap)
            out.append(_result("multi-action", _ok(worst, ctx), {"r": list(r), "i": i, "j": j}, worst,
                               {"sets": _fmt_sets(sets), "z": [format_scalar(x) for x in zs]}))
            single = ac.multi_action(i, j, zs[:1], sets, ch)
            ref = ac.single_action(i, j, zs[0], sets, ch)
            if [t.sets for t in single] != [t.sets for t in ref]:
                dev = float("inf")
            else:
                dev = max((abs(a.coefficient - b.coefficient) for a, b in zip(single, ref)), default=0)
            out.append(_result("multi-action-r1", _ok(dev, ctx), {"r": list(r), "i": i, "j": j}, dev))
    return out


def _route_names(N: int) -> list:
    routes = ["canonical", "highest", "random:1", "random:2"]
    routes += list(range(1, N))
    return routes


def check_recurrence(ctx: Context) -> list:
    S = ctx.sampler("recurrence")
    ch = ctx.chain()
    out = []
    for r in cardinalities(ch.N, ctx.max_total):
        sets, _ = _generic(ctx, S, ch, r)
        for dual in (False, True):
            ref = bt.BetheBuilder(ch, "canonical", dual).build(sets)
            for route in _route_names(ch.N):
                try:
                    v = bt.BetheBuilder(ch, route, dual).build(sets)
                except bt.InfeasibleRoute:
                    continue
                res = _residual(v, ref)
                out.append(_result("route-independence", _ok(res, ctx), {"r": list(r), "dual": dual, "route": str(route)}, res,
                                   {"sets": _fmt_sets(sets)}))
            perm = [list(reversed(s)) for s in sets]
            v = bt.BetheBuilder(ch, "canonical", dual, canonicalize=False).build(perm)
            res = _residual(v, ref)
            out.append(_result("permutation-symmetry", _ok(res, ctx), {"r": list(r), "dual": dual}, res, {"sets": _fmt_sets(sets)}))
    return out


def check_scalar_product(ctx: Context) -> list:
    S = ctx.sampler("scalar-product")
    out = []
    for variant in range(2):
        ch = ctx.chain(f"sp{variant}")
        for r in itertools.product(range(3), repeat=ch.N - 1):
            if sum(r) > ctx.max_total + 1:
                continue
            usets, _ = _generic(ctx, S, ch, r)
            tsets, _ = _generic(ctx, S, ch, r, avoid=[x for s in usets for x in s])
            direct = sp.scalar_product_direct(usets, tsets, ch)
            psum = sp.scalar_product_partition_sum(usets, tsets, ch)
            res = abs(complex(direct - psum)) if not ch.exact else (0 if direct == psum else abs(direct - psum))
            out.append(_result("scalar-product", _ok(res, ctx), {"chain": variant, "r": list(r)}, res,
                               {"u": _fmt_sets(usets), "t": _fmt_sets(tsets)}))
    return out


def check_hc(ctx: Context) -> list:
    S = ctx.sampler("hc")
    q = to_scalar(ctx.q)
    K = Kernel(q)
    N = ctx.N
    out = []
    for r in itertools.product(range(3), repeat=N - 1):
        if not any(r) or sum(r) > ctx.max_total + 1:
            continue
        u = sample_sets(S, r, [0], q)
        t = sample_sets(S, r, [0] + [x for s in u for x in s], q)
        for kind in ("Z", "Zbar"):
            get = lambda H: H.Z(u, t) if kind == "Z" else H.Zbar(u, t)  # noqa: E731
            vals = [get(sp.HighestCoefficients(K, ell)) for ell in ["lowest", "highest"] + [l for l in range(1, N) if r[l - 1]]]
            ok = all(v == vals[0] for v in vals)
            out.append(_result("hc-ell-independence", ok, {"kind": kind, "r": list(r)}, 0 if ok else 1,
                               {"u": _fmt_sets(u), "t": _fmt_sets(t), "values": [format_scalar(v) for v in vals]}))
        if r[0]:
            H = sp.HighestCoefficients(K)
            ok = sp.term_dict(H.terms("Z", u, t, 1)) == sp.term_dict(sp.z_terms_first_color(K, u, t))
            out.append(_result("hc-extreme-first", ok, {"r": list(r)}, 0 if ok else 1))
        if r[-1]:
            H = sp.HighestCoefficients(K)
            ok = sp.term_dict(H.terms("Zbar", u, t, N - 1)) == sp.term_dict(sp.zbar_terms_last_color(K, u, t))
            out.append(_result("hc-extreme-last", ok, {"r": list(r)}, 0 if ok else 1))
        H = sp.HighestCoefficients(K)
        if ctx.literal:
            a, b = H.Zbar(u, t), H.Z(t, u)
            name = "hc-symmetry-literal"
        else:
            a, b = H.Zbar(u, t), sp.zbar_via_inversion(u, t, q)
            name = "hc-symmetry"
        out.append(_result(name, a == b, {"r": list(r)}, 0 if a == b else abs(a - b),
                           {"u": _fmt_sets(u), "t": _fmt_sets(t), "lhs": format_scalar(a), "rhs": format_scalar(b)}))
        H2 = sp.HighestCoefficients(Kernel(q))
        ok = H2.Z(u, t) == H.Z(u, t) and H2.Zbar(u, t) == H.Zbar(u, t)
        out.append(_result("hc-purity", ok, {"r": list(r)}, 0 if ok else 1))
    return out


def check_bethe_roots(ctx: Context) -> list:
    out = []
    cases = [(ctx.N, ctx.L, tuple(ctx.r))] if ctx.r else [(ctx.N, ctx.L, (1,) * (ctx.N - 1))]
    S = ctx.sampler("roots")
    for N, L, r in cases:
        ch = ctx.chain("roots", N, L)
        rep = ro.solve(ro.RootProblem(ch, r, seed=ctx.seed))
        zs = [complex(x) + 0.37j for x in S.distinct(5)]
        dev = ro.eigen_check(rep.roots, ch, zs)
        params = {"N": N, "L": L, "r": list(r)}
        out.append(_result("bethe-residual", rep.residual < 1e-10, params, rep.residual,
                           {"roots": [[[z.real, z.imag] for z in s] for s in rep.roots]}))
        out.append(_result("on-shell-eigenvalue", dev < 1e-9, params, dev))
    return out


def check_build_bv(ctx: Context) -> list:
    ch = ctx.chain()
    S = ctx.sampler("build-bv")
    sets = [list(map(to_scalar, s)) for s in ctx.sets] if ctx.sets is not None else _generic(ctx, S, ch, ctx.r or (1,) * (ch.N - 1))[0]
    if not ch.exact:
        sets = [[complex(x) for x in s] for s in sets]
    handle = bt.build_bethe(bt.BetheSpec(ch, tuple(tuple(s) for s in sets)))
    doc = bt.state_to_json(handle.state, ch, {"bethe": handle.spec.as_dict(), "route": handle.route})
    res = max((_residual(bt.BetheBuilder(ch, route).build(sets), handle.state) for route in _route_names(ch.N)
               if _route_feasible(route, sets)), default=0.0)
    return [_result("build-bv", _ok(res, ctx), {"r": [len(s) for s in sets]}, res) | {"state": doc}]


def _route_feasible(route, sets) -> bool:
    return not isinstance(route, int) or bool(sets[route - 1])


CHECKS: dict[str, Callable[[Context], list]] = {
    "check-yang-baxter": check_yang_baxter,
    "check-rll": check_rll,
    "check-vacuum": check_vacuum,
    "check-zero-modes": check_zero_modes,
    "check-t1n": check_t1n,
    "check-action": check_action,
    "check-multi-action": check_multi_action,
    "check-recurrence": check_recurrence,
    "scalar-product": check_scalar_product,
    "check-hc": check_hc,
    "solve-bethe": check_bethe_roots,
    "build-bv": check_build_bv,
}

SUITE = [
    "check-yang-baxter",
    "check-rll",
    "check-vacuum",
    "check-zero-modes",
    "check-t1n",
    "check-action",
    "check-multi-action",
    "check-recurrence",
    "scalar-product",
    "check-hc",
    "solve-bethe",
]


def run_check(name: str, ctx: Context) -> list:
    try:
        return CHECKS[name](ctx)
    except (PoleError, ArithmeticError, ValueError) as exc:
        return [_result(name, False, {}, 1, {"error": f"{type(exc).__name__}: {exc}"})]

