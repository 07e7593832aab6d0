"""Command-line entry point: configuration, check orchestration and JSON reports."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import jsonschema

from . import __version__
from . import checks as ck
from . import roots as ro
from . import scalarprod as sp
from .scalars import Kernel, format_scalar, to_scalar

CONFIG_SCHEMA_ID = "trigbethe.config/1"
REPORT_SCHEMA_ID = "trigbethe.report/1"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

_SCALAR = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_SETS = {"type": "array", "items": {"type": "array", "items": _SCALAR}}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "schema": {"const": CONFIG_SCHEMA_ID},
        "N": {"type": "integer", "minimum": 2, "maximum": 6},
        "L": {"type": "integer", "minimum": 1, "maximum": 8},
        "q": _SCALAR,
        "xi": {"type": "array", "items": _SCALAR},
        "d": {"type": "array", "items": _SCALAR},
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "magnitude": {"type": "integer", "minimum": 2},
        "max_total": {"type": "integer", "minimum": 0, "maximum": 6},
        "mode": {"enum": ["exact", "float"]},
        "r": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "sets": _SETS,
        "u": _SETS,
        "t": _SETS,
        "grid": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["u", "t"],
                "additionalProperties": False,
                "properties": {"u": _SETS, "t": _SETS},
            },
        },
    },
}

DEFAULT_CONFIG = {"schema": CONFIG_SCHEMA_ID, "N": 2, "L": 3, "q": "5/3", "seed": 0, "samples": 3, "magnitude": 9, "max_total": 3}


class ConfigError(ValueError):
    pass


def load_config(path: str | None, seed: int | None = None, mode: str | None = None) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        try:
            jsonschema.validate(user, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"config schema error at {where}: {exc.message}") from None
        cfg.update(user)
    if seed is not None:
        cfg["seed"] = seed
    if mode is not None:
        cfg["mode"] = mode
    cfg.setdefault("mode", "exact")
    _check_consistency(cfg)
    return cfg


def _check_consistency(cfg: dict) -> None:
    N, L = cfg["N"], cfg["L"]
    if "xi" in cfg and len(cfg["xi"]) != L:
        raise ConfigError(f"config schema error: xi has {len(cfg['xi'])} entries, expected L = {L}")
    if "d" in cfg and len(cfg["d"]) != N:
        raise ConfigError(f"config schema error: d has {len(cfg['d'])} entries, expected N = {N}")
    for key in ("sets", "u", "t"):
        if key in cfg and len(cfg[key]) != N - 1:
            raise ConfigError(f"config schema error: {key} needs N - 1 = {N - 1} colors")
    if "r" in cfg and len(cfg["r"]) != N - 1:
        raise ConfigError(f"config schema error: r needs N - 1 = {N - 1} entries")
    if to_scalar(cfg["q"]) in (0, 1, -1):
        raise ConfigError("config schema error: q must avoid 0 and +-1")


def _sets(raw) -> tuple | None:
    return None if raw is None else tuple(tuple(to_scalar(x) for x in s) for s in raw)


def context(cfg: dict, perturb: bool = False, literal: bool = False) -> ck.Context:
    return ck.Context(
        N=cfg["N"],
        L=cfg["L"],
        q=to_scalar(cfg["q"]),
        xi=tuple(to_scalar(x) for x in cfg["xi"]) if "xi" in cfg else None,
        d=tuple(to_scalar(x) for x in cfg["d"]) if "d" in cfg else None,
        seed=cfg["seed"],
        samples=cfg["samples"],
        magnitude=cfg["magnitude"],
        max_total=cfg["max_total"],
        mode=cfg["mode"],
        perturb=perturb,
        literal=literal,
        sets=_sets(cfg.get("sets")),
        r=tuple(cfg["r"]) if "r" in cfg else None,
    )


# ---------------------------------------------------------------------------
# Commands beyond the plain check battery


def _scalar_product_given(cfg: dict, ctx: ck.Context) -> list:
    ch = ctx.chain()
    u, t = _sets(cfg["u"]), _sets(cfg["t"])
    direct = sp.scalar_product_direct(u, t, ch)
    psum = sp.scalar_product_partition_sum(u, t, ch)
    res = 0 if direct == psum else abs(complex(direct - psum))
    return [
        ck._result("scalar-product", ck._ok(res, ctx), {"given": True}, res)
        | {"direct": format_scalar(direct), "partition_sum": format_scalar(psum)}
    ]


def _hc_grid(cfg: dict, ctx: ck.Context) -> list:
    q = to_scalar(cfg["q"])
    H = sp.HighestCoefficients(Kernel(q))
    out = []
    for k, key in enumerate(cfg["grid"]):
        u, t = _sets(key["u"]), _sets(key["t"])
        z, zb = H.Z(u, t), H.Zbar(u, t)
        ok = zb == sp.zbar_via_inversion(u, t, q)
        out.append(ck._result("hc-grid", ok, {"key": k}, 0 if ok else 1) | {"Z": format_scalar(z), "Zbar": format_scalar(zb)})
    return out


def _solve(cfg: dict, ctx: ck.Context, args) -> list:
    ch = ctx.chain("roots").to_float() if ctx.chain("roots").exact else ctx.chain("roots")
    r = tuple(cfg.get("r", (1,) * (ctx.N - 1)))
    guess = None
    if "t" in cfg:
        guess = [[complex(to_scalar(x)) for x in s] for s in cfg["t"]]
    problem = ro.RootProblem(ch, r, guess, args.tol, args.max_iter, args.restarts, cfg["seed"])
    rep = ro.solve(problem)
    zs = [complex(x) + 0.37j for x in ctx.sampler("roots").distinct(5)]
    dev = ro.eigen_check(rep.roots, ch, zs)
    params = {"N": ch.N, "L": ch.L, "r": list(r)}
    return [
        ck._result("bethe-residual", rep.residual < args.tol * 100, params, rep.residual) | {"solver": rep.as_dict()},
        ck._result("on-shell-eigenvalue", dev < max(1e-9, 1e3 * args.tol), params, dev),
    ]


def run(command: str, cfg: dict, jobs: int = 1, perturb: bool = False, literal: bool = False, args=None) -> tuple:
    """Run ``command`` on a validated config; returns ``(exit_status, report)``."""
    ctx = context(cfg, perturb, literal)
    if command == "suite":
        names = list(ck.SUITE)
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                chunks = list(pool.map(ck.run_check, names, [ctx] * len(names)))
        else:
            chunks = [ck.run_check(n, ctx) for n in names]
        results = [r | {"group": n} for n, chunk in zip(names, chunks) for r in chunk]
    elif command == "scalar-product" and "u" in cfg and "t" in cfg:
        results = _scalar_product_given(cfg, ctx)
    elif command == "check-hc" and "grid" in cfg:
        results = _hc_grid(cfg, ctx)
    elif command == "solve-bethe":
        try:
            results = _solve(cfg, ctx, args or argparse.Namespace(tol=1e-12, max_iter=60, restarts=30))
        except ArithmeticError as exc:
            results = [ck._result("solve-bethe", False, {}, 1, {"error": f"{type(exc).__name__}: {exc}"})]
    else:
        results = ck.run_check(command, ctx)
    passed = sum(1 for r in results if r["pass"])
    ok = passed == len(results) and bool(results)
    report = {
        "schema": REPORT_SCHEMA_ID,
        "version": __version__,
        "command": command,
        "config": cfg,
        "options": {"perturb": perturb, "literal": literal},
        "summary": {"total": len(results), "passed": passed, "failed": len(results) - passed},
        "pass": ok,
        "checks": results,
    }
    return (EXIT_OK if ok else EXIT_FAIL), report


COMMANDS = {
    "check-yang-baxter": "Yang-Baxter equation for the R-matrix on sampled triples",
    "check-rll": "RLL relation for every index quadruple on random states",
    "check-zero-modes": "zero-mode commutation relations and the zero-mode action",
    "build-bv": "build a Bethe vector and export it as a State document",
    "check-action": "single-entry action formulas against direct application",
    "check-multi-action": "multiple action formulas against composed application",
    "check-recurrence": "route and permutation independence of the recurrences",
    "scalar-product": "partition-sum scalar product against direct pairing",
    "check-hc": "highest-coefficient recursions: ell-independence, extremes, symmetry",
    "solve-bethe": "solve the Bethe equations and certify the on-shell eigenvalue",
    "suite": "the full acceptance battery",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (schema trigbethe.config/1)")
    common.add_argument("--seed", type=int, help="sampling seed, overrides the config")
    common.add_argument("--mode", choices=["exact", "float"], help="scalar field, overrides the config")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for the suite")

    p = argparse.ArgumentParser(prog="trigbethe", description="Verification engine for trigonometric gl(N) Bethe vectors.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        sp_ = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "check-action":
            sp_.add_argument("--perturb", action="store_true", help="test hook: shift one coefficient per action")
        if name in ("check-zero-modes", "check-hc"):
            sp_.add_argument("--literal", action="store_true", help="check the printed form of the identity")
        if name == "solve-bethe":
            sp_.add_argument("--tol", type=float, default=1e-12)
            sp_.add_argument("--max-iter", type=int, default=60)
            sp_.add_argument("--restarts", type=int, default=30)
    return p


def _json_default(obj):
    try:
        return format_scalar(obj)
    except TypeError:
        return str(obj)


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, args.seed, args.mode)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    status, report = run(
        args.command,
        cfg,
        jobs=args.jobs,
        perturb=getattr(args, "perturb", False),
        literal=getattr(args, "literal", False),
        args=args,
    )
    for r in report["checks"]:
        if not r["pass"] and "witness" in r:
            term = r["witness"].get("perturbed_term")
            detail = json.dumps(term or r["params"], sort_keys=True, default=_json_default)
            print(f"FAIL {r['check']} {detail}", file=sys.stderr)
    _emit(dumps(report), args.out)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
