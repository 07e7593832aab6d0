"""Inhomogeneous twisted fundamental spin chain for the trigonometric R-matrix.

Conventions
-----------
* Basis states of one site are the colors ``1..N``; a chain configuration is
  stored at index ``sum_k (b_k - 1) N^(k-1)`` (site 1 least significant).
* ``R(u, v) = I + sum_ij p_ij(u, v) e_ij (x) e_ji`` on ``aux (x) site``; on a
  basis pair it acts as ``R|a,b> = |a,b> + p_ba |b,a>``.
* ``T(z) = D R_{0,L}(z, xi_L) ... R_{0,1}(z, xi_1)`` with ``D = diag(d)`` in
  the auxiliary space; the vacuum is ``|1...1>``.
* Zero modes ``T^-_{ij}[0]`` are the same monodromy evaluated at ``z = 0``,
  where it is lower triangular in the auxiliary space.

States are 1-d numpy arrays: ``dtype=object`` holding ``mpq`` in exact mode,
``complex128`` in float mode.  Co-states use the same arrays with the entry
operators acting from the right.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from gmpy2 import mpq

from . import kernels
from .scalars import Kernel, PoleError, Scalar, format_scalar, is_exact, to_scalar

State = np.ndarray
CoState = np.ndarray


class NotAnEigenvector(ArithmeticError):
    """The vacuum failed to be an eigenvector of a diagonal monodromy entry."""


class NormalizationError(ArithmeticError):
    """The ``z -> 0`` limit of the monodromy is not lower triangular."""


@dataclass(frozen=True)
class ChainSpec:
    """Rank ``N``, length ``L``, inhomogeneities ``xi``, twist ``d`` and deformation ``q``."""

    N: int
    xi: tuple
    d: tuple
    q: Scalar
    kernel: Kernel = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ValueError("rank N must be at least 2")
        xi = tuple(to_scalar(x) for x in self.xi)
        d = tuple(to_scalar(x) for x in self.d)
        if len(xi) < 1:
            raise ValueError("chain length L must be at least 1")
        if len(d) != self.N:
            raise ValueError(f"twist needs {self.N} entries, got {len(d)}")
        if len(set(xi)) != len(xi) or any(x == 0 for x in xi):
            raise ValueError("inhomogeneities must be pairwise distinct and nonzero")
        if any(x == 0 for x in d):
            raise ValueError("twist entries must be nonzero")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "kernel", Kernel(self.q))
        object.__setattr__(self, "q", self.kernel.q)

    @property
    def L(self) -> int:
        return len(self.xi)

    @property
    def dim(self) -> int:
        return self.N**self.L

    @property
    def exact(self) -> bool:
        return is_exact(self.q) and all(is_exact(x) for x in self.xi + self.d)

    def digest(self) -> str:
        text = repr((self.N, [str(x) for x in self.xi], [str(x) for x in self.d], str(self.q)))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def to_float(self) -> "ChainSpec":
        return ChainSpec(self.N, tuple(complex(x) for x in self.xi), tuple(complex(x) for x in self.d), complex(self.q))

    def with_q(self, q: Scalar) -> "ChainSpec":
        return ChainSpec(self.N, self.xi, self.d, q)

    @classmethod
    def untwisted(cls, N: int, xi: Sequence, q: Scalar) -> "ChainSpec":
        return cls(N, tuple(xi), (1,) * N, q)

    def zero(self) -> Scalar:
        return mpq(0) if self.exact else 0j

    def one(self) -> Scalar:
        return mpq(1) if self.exact else 1 + 0j

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "L": self.L,
            "xi": [format_scalar(x) for x in self.xi],
            "d": [format_scalar(x) for x in self.d],
            "q": format_scalar(self.q),
        }


# ---------------------------------------------------------------------------
# R-matrix


def r_matrix(u: Scalar, v: Scalar, N: int, kernel: Kernel) -> list:
    """Dense ``N^2 x N^2`` R-matrix; row/column index ``a*N + b`` for ``|a> (x) |b>``."""
    if u == v:
        raise PoleError(f"R-matrix pole at u = v = {u}")
    one = to_scalar(1) if is_exact(u) and is_exact(v) else 1 + 0j
    R = [[one * 0 for _ in range(N * N)] for _ in range(N * N)]
    for a in range(N):
        for b in range(N):
            R[a * N + b][a * N + b] += one
            # e_ij (x) e_ji maps |j,i> to |i,j>
            R[a * N + b][b * N + a] += kernel.p(a + 1, b + 1, u, v)
    return R


def _r_apply_sparse(vec: dict, R: list, N: int, slots: tuple, n: int) -> dict:
    """Apply ``R`` on tensor factors ``slots`` of an ``n``-fold product, sparse."""
    s0, s1 = slots
    out: dict = {}
    for idx, x in vec.items():
        digits = list(idx)
        col = digits[s0] * N + digits[s1]
        for row in range(N * N):
            r = R[row][col]
            if r == 0:
                continue
            nd = list(digits)
            nd[s0], nd[s1] = divmod(row, N)
            key = tuple(nd)
            out[key] = out.get(key, 0) + r * x
    return {k: v for k, v in out.items() if v != 0}


def yang_baxter_residual(u: Scalar, v: Scalar, w: Scalar, N: int, kernel: Kernel) -> list:
    """Nonzero entries of ``R12(u,v) R13(u,w) R23(v,w) - R23(v,w) R13(u,w) R12(u,v)``.

    Both products are formed column by column on ``V^(x)3`` with sparse
    matrix-vector products; an empty list means the identity holds exactly.
    """
    R12, R13, R23 = r_matrix(u, v, N, kernel), r_matrix(u, w, N, kernel), r_matrix(v, w, N, kernel)
    bad = []
    for a in range(N):
        for b in range(N):
            for c in range(N):
                e = {(a, b, c): 1}
                lhs = _r_apply_sparse(_r_apply_sparse(_r_apply_sparse(e, R23, N, (1, 2), 3), R13, N, (0, 2), 3), R12, N, (0, 1), 3)
                rhs = _r_apply_sparse(_r_apply_sparse(_r_apply_sparse(e, R12, N, (0, 1), 3), R13, N, (0, 2), 3), R23, N, (1, 2), 3)
                for key in set(lhs) | set(rhs):
                    diff = lhs.get(key, 0) - rhs.get(key, 0)
                    if diff != 0:
                        bad.append(((a, b, c), key, diff))
    return bad


# ---------------------------------------------------------------------------
# States


def zeros(spec: ChainSpec) -> State:
    if spec.exact:
        out = np.empty(spec.dim, dtype=object)
        out[:] = mpq(0)
        return out
    return np.zeros(spec.dim, dtype=np.complex128)


def basis_state(spec: ChainSpec, config: Sequence[int]) -> State:
    """Product state ``|b_1 ... b_L>`` with 1-based colors."""
    if len(config) != spec.L or any(not 1 <= b <= spec.N for b in config):
        raise ValueError(f"bad configuration {config!r}")
    out = zeros(spec)
    out[config_index(spec.N, config)] = spec.one()
    return out


def config_index(N: int, config: Sequence[int]) -> int:
    return sum((b - 1) * N**k for k, b in enumerate(config))


def index_config(N: int, L: int, index: int) -> tuple:
    return tuple((index // N**k) % N + 1 for k in range(L))


def vacuum(spec: ChainSpec) -> State:
    return basis_state(spec, (1,) * spec.L)


def dual_vacuum(spec: ChainSpec) -> CoState:
    return vacuum(spec)


def random_state(spec: ChainSpec, sampler) -> State:
    out = zeros(spec)
    for k in range(spec.dim):
        out[k] = sampler.scalar() if spec.exact else complex(sampler.scalar())
    return out


def pair(c: CoState, s: State) -> Scalar:
    """Bilinear pairing ``<c|s>`` (no complex conjugation)."""
    acc = c[0] * 0
    for a, b in zip(c, s):
        if a and b:
            acc += a * b
    return acc


def is_zero(s: State) -> bool:
    return not any(x != 0 for x in s)


# ---------------------------------------------------------------------------
# Monodromy entries


def _site_coefficients(spec: ChainSpec, z: Scalar) -> tuple:
    K = spec.kernel
    fv, g, gt = [], [], []
    for xk in spec.xi:
        if z == xk:
            raise PoleError(f"monodromy pole: z = xi = {z}")
        fv.append(K.f(z, xk))
        g.append(K.g(z, xk))
        gt.append(K.gt(z, xk))
    return fv, g, gt


@lru_cache(maxsize=4096)
def _cached_coefficients(spec: ChainSpec, z: Scalar) -> tuple:
    return _site_coefficients(spec, z)


def _check_indices(spec: ChainSpec, i: int, j: int) -> None:
    if not (1 <= i <= spec.N and 1 <= j <= spec.N):
        raise ValueError(f"entry indices ({i}, {j}) out of range for N = {spec.N}")


def apply_entry(spec: ChainSpec, i: int, j: int, z: Scalar, s: State) -> State:
    """``T_{i,j}(z) s``, computed site by site without forming the full operator."""
    _check_indices(spec, i, j)
    fv, g, gt = _cached_coefficients(spec, z)
    return kernels.apply_entry(s, spec.N, spec.L, j - 1, i - 1, range(spec.L), fv, g, gt, spec.d[i - 1])


def apply_entry_left(spec: ChainSpec, i: int, j: int, z: Scalar, c: CoState) -> CoState:
    """``c T_{i,j}(z)`` for a co-state ``c``."""
    _check_indices(spec, i, j)
    fv, g, gt = _cached_coefficients(spec, z)
    return kernels.apply_entry(c, spec.N, spec.L, i - 1, j - 1, range(spec.L - 1, -1, -1), fv, gt, g, spec.d[i - 1])


def entry_operator(spec: ChainSpec, i: int, j: int, z: Scalar) -> Callable[[State], State]:
    _check_indices(spec, i, j)
    _cached_coefficients(spec, z)  # fail early on poles
    return lambda s: apply_entry(spec, i, j, z, s)


def eigenvalue_on(op_result: State, s: State) -> Scalar:
    """Scalar ``c`` with ``op_result == c * s``; raises if not proportional."""
    k = next((n for n, x in enumerate(s) if x != 0), None)
    if k is None:
        raise ValueError("cannot read an eigenvalue off the zero vector")
    c = op_result[k] / s[k]
    diff = op_result - c * s
    if is_exact(c):
        ok = is_zero(diff)
    else:
        ok = float(np.max(np.abs(diff.astype(complex)))) <= 1e-9 * max(1.0, float(np.max(np.abs(op_result.astype(complex)))))
    if not ok:
        raise NotAnEigenvector("state is not an eigenvector of the operator")
    return c


@lru_cache(maxsize=8192)
def lambda_eval(spec: ChainSpec, i: int, z: Scalar) -> Scalar:
    """Vacuum eigenvalue ``lambda_i(z)`` read off from ``T_{i,i}(z)|vac>``."""
    vac = vacuum(spec)
    return eigenvalue_on(apply_entry(spec, i, i, z, vac), vac)


def lambda_closed(spec: ChainSpec, i: int, z: Scalar) -> Scalar:
    """Closed form for this chain: ``lambda_1 = d_1 prod_k f(z, xi_k)``, ``lambda_i = d_i``."""
    if i == 1:
        out = spec.d[0]
        for xk in spec.xi:
            out = out * spec.kernel.f(z, xk)
        return out
    return spec.d[i - 1]


def beta_eval(spec: ChainSpec, i: int, z: Scalar) -> Scalar:
    """``beta_i(z) = lambda_{i+1}(z) / lambda_i(z)``."""
    lam = lambda_eval(spec, i, z)
    if lam == 0:
        raise PoleError(f"beta_{i}({z}): lambda_{i} vanishes")
    return lambda_eval(spec, i + 1, z) / lam


def beta_set(spec: ChainSpec, i: int, zs) -> Scalar:
    out = spec.one()
    for z in zs:
        out = out * beta_eval(spec, i, z)
    return out


def lambda_set(spec: ChainSpec, i: int, zs) -> Scalar:
    out = spec.one()
    for z in zs:
        out = out * lambda_eval(spec, i, z)
    return out


def transfer_matrix_apply(spec: ChainSpec, z: Scalar, s: State) -> State:
    out = zeros(spec)
    for i in range(1, spec.N + 1):
        out = out + apply_entry(spec, i, i, z, s)
    return out


# ---------------------------------------------------------------------------
# Zero modes


def _check_zero_limit(spec: ChainSpec) -> None:
    if any(x == 0 for x in spec.xi):
        raise PoleError("zero modes need 0 outside the inhomogeneities")
    _, g, _ = _cached_coefficients(spec, spec.zero())
    if any(x != 0 for x in g):
        raise NormalizationError("z -> 0 limit of the monodromy is not lower triangular")


def zero_mode(spec: ChainSpec, kind: str, i: int) -> Callable[[State], State]:
    """``T^-_{i+1,i}[0]`` (``kind='lower'``) or ``T^-_{i,i}[0]`` (``kind='diagonal'``)."""
    _check_zero_limit(spec)
    z0 = spec.zero()
    if kind == "lower":
        if not 1 <= i < spec.N:
            raise ValueError(f"lower zero mode index {i} out of range")
        return lambda s: apply_entry(spec, i + 1, i, z0, s)
    if kind == "diagonal":
        _check_indices(spec, i, i)
        return lambda s: apply_entry(spec, i, i, z0, s)
    raise ValueError(f"unknown zero-mode kind {kind!r}")


def zero_mode_entry(spec: ChainSpec, i: int, j: int) -> Callable[[State], State]:
    """Any ``T^-_{i,j}[0]``; identically zero for ``i < j``."""
    _check_zero_limit(spec)
    z0 = spec.zero()
    return lambda s: apply_entry(spec, i, j, z0, s)


@lru_cache(maxsize=1024)
def kappa(spec: ChainSpec, i: int) -> Scalar:
    """Vacuum eigenvalue of ``T^-_{i,i}[0]``."""
    vac = vacuum(spec)
    return eigenvalue_on(zero_mode(spec, "diagonal", i)(vac), vac)


# ---------------------------------------------------------------------------
# Operator identities (residuals; exact zero means the identity holds)


def rll_residual(spec: ChainSpec, i: int, j: int, k: int, l: int, u: Scalar, v: Scalar, s: State) -> State:
    """``[T_ij(u), T_kl(v)] - p_lj T_kj(v) T_il(u) + p_ik T_kj(u) T_il(v)`` applied to ``s``."""
    K = spec.kernel
    T = lambda a, b, z, x: apply_entry(spec, a, b, z, x)  # noqa: E731
    lhs = T(i, j, u, T(k, l, v, s)) - T(k, l, v, T(i, j, u, s))
    rhs = K.p(l, j, u, v) * T(k, j, v, T(i, l, u, s)) - K.p(i, k, u, v) * T(k, j, u, T(i, l, v, s))
    return lhs - rhs


def zmc2_residual(spec: ChainSpec, i: int, j: int, z: Scalar, s: State) -> State:
    """Commutation of ``T_ij(z)`` with the lowering zero mode ``T^-_{i+1,i}[0]``."""
    K = spec.kernel
    T = lambda a, b, x: apply_entry(spec, a, b, z, x)  # noqa: E731
    Tm = lambda a, b, x: zero_mode_entry(spec, a, b)(x)  # noqa: E731
    qd = K.q if i == j else spec.one()
    lhs = T(i, j, Tm(i + 1, i, s)) - qd * Tm(i + 1, i, T(i, j, s))
    rhs = -T(i + 1, j, Tm(i, i, s))
    if i == j - 1:
        rhs = rhs + Tm(j, j, T(i, i, s))
    return lhs - K.c * rhs


def zmc3_residual(spec: ChainSpec, i: int, j: int, z: Scalar, s: State) -> State:
    """Commutation of ``T_ij(z)`` with the lowering zero mode ``T^-_{j,j-1}[0]``."""
    K = spec.kernel
    T = lambda a, b, x: apply_entry(spec, a, b, z, x)  # noqa: E731
    Tm = lambda a, b, x: zero_mode_entry(spec, a, b)(x)  # noqa: E731
    qd = K.qi if i == j else spec.one()
    lhs = qd * Tm(j, j - 1, T(i, j, s)) - T(i, j, Tm(j, j - 1, s))
    rhs = -T(i, j - 1, Tm(j, j, s))
    if i == j - 1:
        rhs = rhs + Tm(i, i, T(j, j, s))
    return lhs - K.c * rhs


def zmcd_residual(spec: ChainSpec, i: int, j: int, l: int, z: Scalar, s: State) -> State:
    """``q^{d_il} T_ij(z) T^-_ll[0] - q^{d_lj} T^-_ll[0] T_ij(z)`` applied to ``s``."""
    K = spec.kernel
    one = spec.one()
    left = (K.q if i == l else one) * apply_entry(spec, i, j, z, zero_mode_entry(spec, l, l)(s))
    right = (K.q if l == j else one) * zero_mode_entry(spec, l, l)(apply_entry(spec, i, j, z, s))
    return left - right
