"""Bethe equations: residuals, a damped Newton solver and the on-shell eigenvalue check."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bethe as bt
from . import repchain as rc
from .scalars import PoleError

REPORT_SCHEMA = "trigbethe.roots-report/1"


class NoConvergence(ArithmeticError):
    pass


class SingularJacobian(ArithmeticError):
    pass


def _f_prod(K, xs, ys) -> complex:
    out = 1 + 0j
    for x in xs:
        for y in ys:
            out *= K.f(x, y)
    return out


def bethe_residual(t: Sequence[Sequence[complex]], chain: rc.ChainSpec) -> np.ndarray:
    """``beta_i(t^i_l) - f(rest, t^i_l)/f(t^i_l, rest) * f(t^i_l, t^{i-1})/f(t^{i+1}, t^i_l)``
    for every color ``i`` and parameter ``l``, flattened color by color."""
    K = chain.kernel
    ext = ((),) + tuple(tuple(s) for s in t) + ((),)
    out = []
    for i in range(1, chain.N):
        for ell, x in enumerate(ext[i]):
            rest = ext[i][:ell] + ext[i][ell + 1 :]
            rhs = _f_prod(K, rest, (x,)) / _f_prod(K, (x,), rest)
            rhs *= _f_prod(K, (x,), ext[i - 1]) / _f_prod(K, ext[i + 1], (x,))
            out.append(complex(rc.beta_eval(chain, i, x)) - rhs)
    return np.array(out, dtype=np.complex128)


def eigenvalue(z: complex, t: Sequence[Sequence[complex]], chain: rc.ChainSpec) -> complex:
    """``tau(z; t) = sum_i lambda_i(z) f(z, t^{i-1}) f(t^i, z)``."""
    K = chain.kernel
    ext = ((),) + tuple(tuple(s) for s in t) + ((),)
    return sum(
        complex(rc.lambda_eval(chain, i, z)) * _f_prod(K, (z,), ext[i - 1]) * _f_prod(K, ext[i], (z,))
        for i in range(1, chain.N + 1)
    )


@dataclass
class RootProblem:
    chain: rc.ChainSpec
    r: tuple
    guess: list | None = None  # one list of complex numbers per color
    tol: float = 1e-12
    max_iter: int = 60
    restarts: int = 30
    seed: int = 0


@dataclass
class RootReport:
    roots: list
    residual: float
    iterations: int
    restarts_used: int
    trace: list = field(default_factory=list)  # residual max-norm per iteration
    condition: float = float("nan")

    def as_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "roots": [[[z.real, z.imag] for z in s] for s in self.roots],
            "residual": self.residual,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "trace": self.trace,
            "condition": self.condition,
        }


def _unflatten(x: np.ndarray, r: Sequence[int]) -> list:
    out, k = [], 0
    for n in r:
        out.append([complex(v) for v in x[k : k + n]])
        k += n
    return out


def _admissible(sets: list, chain: rc.ChainSpec) -> bool:
    for s in sets:
        for a in range(len(s)):
            if any(abs(s[a] - xi) < 1e-12 for xi in chain.xi):
                return False
            if any(abs(s[a] - s[b]) < 1e-8 * max(1.0, abs(s[a])) for b in range(a)):
                return False
    return True


def _jacobian(F, x: np.ndarray, fx: np.ndarray) -> np.ndarray:
    n = len(x)
    J = np.empty((len(fx), n), dtype=np.complex128)
    for k in range(n):
        h = 1e-6 * max(1.0, abs(x[k]))
        e = np.zeros(n, dtype=np.complex128)
        e[k] = h
        J[:, k] = (F(x + e) - F(x - e)) / (2 * h)
    return J


def _default_guess(chain: rc.ChainSpec, r: Sequence[int], rng: random.Random) -> list:
    xi = [complex(x) for x in chain.xi]
    out = []
    for c, n in enumerate(r):
        picks = [xi[(c + k) % len(xi)] for k in range(n)]
        out.append([x * (1 + complex(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2))) for x in picks])
    return out


def _random_guess(chain: rc.ChainSpec, r: Sequence[int], rng: random.Random) -> list:
    scale = max(abs(complex(x)) for x in chain.xi)
    return [
        [complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) * scale for _ in range(n)]
        for n in r
    ]


def _newton(F, x: np.ndarray, tol: float, max_iter: int) -> tuple:
    fx = F(x)
    trace = [float(np.max(np.abs(fx)))]
    for it in range(1, max_iter + 1):
        if trace[-1] < tol:
            return x, trace, it - 1
        J = _jacobian(F, x, fx)
        try:
            step = np.linalg.solve(J, fx)
        except np.linalg.LinAlgError:
            raise SingularJacobian("Jacobian is singular at the current iterate") from None
        lam = 1.0
        while lam > 1e-4:
            try:
                xn = x - lam * step
                fn = F(xn)
            except (PoleError, ZeroDivisionError):
                lam /= 2
                continue
            if np.all(np.isfinite(fn)) and np.max(np.abs(fn)) < trace[-1] * (1 - 1e-4 * lam) + 1e-300:
                break
            lam /= 2
        else:
            raise NoConvergence("line search failed")
        x, fx = xn, fn
        trace.append(float(np.max(np.abs(fx))))
    if trace[-1] < tol:
        return x, trace, max_iter
    raise NoConvergence(f"residual {trace[-1]:.3e} after {max_iter} iterations")


def solve(problem: RootProblem) -> RootReport:
    """Damped Newton iteration on :func:`bethe_residual` with seeded random restarts.

    The Jacobian is a central finite difference, which is accurate to
    ``O(h^2)`` because the residual is holomorphic in the parameters.
    """
    chain = problem.chain if not problem.chain.exact else problem.chain.to_float()
    r = tuple(problem.r)
    rng = random.Random(problem.seed)
    F = lambda x: bethe_residual(_unflatten(x, r), chain)  # noqa: E731
    guesses = [problem.guess] if problem.guess is not None else [_default_guess(chain, r, rng)]
    if problem.guess is not None:
        flat = [complex(z) for s in problem.guess for z in s]
        if any(z in [complex(x) for x in chain.xi] for z in flat):
            raise PoleError("initial guess sits on an inhomogeneity")
    last_err: Exception | None = None
    for attempt in range(problem.restarts + 1):
        g = guesses[0] if attempt == 0 else (_default_guess if attempt % 2 else _random_guess)(chain, r, rng)
        x0 = np.array([complex(z) for s in g for z in s], dtype=np.complex128)
        try:
            x, trace, its = _newton(F, x0, problem.tol, problem.max_iter)
        except (NoConvergence, SingularJacobian, PoleError, ZeroDivisionError) as exc:
            last_err = exc
            continue
        roots = _unflatten(x, r)
        if not _admissible(roots, chain):
            last_err = NoConvergence("converged to coincident or singular parameters")
            continue
        fx = F(x)
        cond = float(np.linalg.cond(_jacobian(F, x, fx)))
        return RootReport(roots, float(np.max(np.abs(fx))), its, attempt, trace, cond)
    raise NoConvergence(f"no admissible root after {problem.restarts} restarts: {last_err}")


def eigen_check(t: Sequence[Sequence[complex]], chain: rc.ChainSpec, zs: Sequence[complex]) -> float:
    """``max_z max|t(z)B - tau(z)B| / max|B|`` for ``B = B(t)`` built in float mode."""
    chain = chain if not chain.exact else chain.to_float()
    t = [[complex(x) for x in s] for s in t]
    B = bt.bethe_state(chain, t).astype(np.complex128)
    norm = float(np.max(np.abs(B)))
    if norm == 0:
        raise ArithmeticError("Bethe vector vanishes identically")
    worst = 0.0
    for z in zs:
        z = complex(z)
        tB = rc.transfer_matrix_apply(chain, z, B)
        worst = max(worst, float(np.max(np.abs(tB - eigenvalue(z, t, chain) * B))) / norm)
    return worst


def rayleigh_quotient(t: Sequence[Sequence[complex]], chain: rc.ChainSpec, z: complex) -> complex:
    """``<B, t(z) B> / <B, B>`` with the transpose (conjugation-free) pairing."""
    chain = chain if not chain.exact else chain.to_float()
    B = bt.bethe_state(chain, [[complex(x) for x in s] for s in t]).astype(np.complex128)
    return complex(np.dot(B, rc.transfer_matrix_apply(chain, complex(z), B)) / np.dot(B, B))


def l1_closed_form_root(chain: rc.ChainSpec) -> complex:
    """The ``N = 2, L = 1, r = 1`` root ``xi (c - 1/q)/(c - q)`` with ``c = d_2/d_1``."""
    if chain.N != 2 or chain.L != 1:
        raise ValueError("closed form applies to N = 2, L = 1 only")
    c = chain.d[1] / chain.d[0]
    return chain.xi[0] * (c - 1 / chain.q) / (c - chain.q)


def report_json(report: RootReport) -> str:
    return json.dumps(report.as_dict(), sort_keys=True, indent=2)
