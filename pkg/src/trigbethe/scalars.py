"""Scalar tower, rational kernel functions, set products and Izergin determinants.

Exact mode uses :class:`gmpy2.mpq` rationals throughout; float mode uses Python
``complex``.  Every function here is generic over the two: it only needs
``+ - * /`` and comparison with zero.

The kernel functions depend on the deformation parameter ``q`` and are bundled
in :class:`Kernel`.  Besides ``f, g, g~, h, h~`` the kernel exposes the
*reciprocal* forms ``1/f, 1/h, 1/h~`` which stay finite at coincident
arguments; coefficient formulas route every denominator through them so that
structurally cancelling singularities never materialise.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from gmpy2 import mpq

Scalar = Any  # mpq in exact mode, complex in float mode
ParamSet = tuple

KERNEL_NAMES = ("f", "g", "gt", "h", "ht")


class PoleError(ZeroDivisionError):
    """A kernel, determinant or operator hit a pole (vanishing denominator)."""


def is_exact(x: Scalar) -> bool:
    return not isinstance(x, (complex, float))


def to_scalar(x: Any) -> Scalar:
    """Coerce ``x`` to the scalar tower.

    Integers, :class:`~fractions.Fraction`, ``mpq`` and ``"num/den"`` strings
    become exact rationals; floats and complex numbers become ``complex``.
    A two-element list ``[re, im]`` is read as a complex number.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, Fraction, str)):
        return mpq(x)
    if isinstance(x, (complex, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    if type(x).__name__ == "mpq":
        return x
    if type(x).__name__ == "mpz":
        return mpq(x)
    raise TypeError(f"cannot convert {x!r} to a scalar")


def format_scalar(x: Scalar) -> str | list:
    """Serialise a scalar: exact as ``"num/den"``, complex as ``[re, im]``."""
    if is_exact(x):
        x = mpq(x)
        return f"{x.numerator}/{x.denominator}"
    x = complex(x)
    return [x.real, x.imag]


def parse_scalar(s: str | list | int) -> Scalar:
    return to_scalar(s)


@dataclass(frozen=True)
class Kernel:
    """The rational functions ``f, g, g~, h, h~`` at a fixed deformation ``q``."""

    q: Scalar
    qi: Scalar = field(init=False, repr=False)
    c: Scalar = field(init=False, repr=False)  # q - 1/q

    def __post_init__(self) -> None:
        q = to_scalar(self.q)
        if q == 0 or q == 1 or q == -1:
            raise ValueError(f"deformation parameter q={q} is degenerate (q must avoid 0, 1, -1)")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qi", 1 / q)
        object.__setattr__(self, "c", q - 1 / q)

    def inverted(self) -> "Kernel":
        """The kernel of the algebra with ``q -> 1/q``."""
        return Kernel(self.qi)

    @staticmethod
    def _div(num: Scalar, den: Scalar, name: str, u: Scalar, v: Scalar) -> Scalar:
        if den == 0:
            raise PoleError(f"{name}({u}, {v}) has a pole")
        return num / den

    def f(self, u: Scalar, v: Scalar) -> Scalar:
        return self._div(self.q * u - self.qi * v, u - v, "f", u, v)

    def g(self, u: Scalar, v: Scalar) -> Scalar:
        return self._div(self.c * u, u - v, "g", u, v)

    def gt(self, u: Scalar, v: Scalar) -> Scalar:
        return self._div(self.c * v, u - v, "gt", u, v)

    # h = f/g and h~ = f/g~ in cancelled form, regular at u = v.
    def h(self, u: Scalar, v: Scalar) -> Scalar:
        return self._div(self.q * u - self.qi * v, self.c * u, "h", u, v)

    def ht(self, u: Scalar, v: Scalar) -> Scalar:
        return self._div(self.q * u - self.qi * v, self.c * v, "ht", u, v)

    def finv(self, u: Scalar, v: Scalar) -> Scalar:
        """``1/f(u, v)``; vanishes at ``u = v``."""
        return self._div(u - v, self.q * u - self.qi * v, "1/f", u, v)

    def hinv(self, u: Scalar, v: Scalar) -> Scalar:
        """``1/h(u, v) = g(u, v)/f(u, v)``."""
        return self._div(self.c * u, self.q * u - self.qi * v, "1/h", u, v)

    def htinv(self, u: Scalar, v: Scalar) -> Scalar:
        """``1/h~(u, v) = g~(u, v)/f(u, v)``."""
        return self._div(self.c * v, self.q * u - self.qi * v, "1/h~", u, v)

    def p(self, i: int, j: int, u: Scalar, v: Scalar) -> Scalar:
        """R-matrix coefficient ``p_ij(u, v)`` (1-based colour indices)."""
        if i == j:
            return self.f(u, v) - 1
        return self.g(u, v) if i < j else self.gt(u, v)

    def __call__(self, which: str, u: Scalar, v: Scalar) -> Scalar:
        return kernel_fn(self, which)(u, v)


def kernel_fn(kernel: Kernel, which: str) -> Callable[[Scalar, Scalar], Scalar]:
    aliases = {"g~": "gt", "h~": "ht", "1/f": "finv", "1/h": "hinv", "1/h~": "htinv"}
    name = aliases.get(which, which)
    fn = getattr(kernel, name, None)
    if fn is None or name.startswith("_"):
        raise ValueError(f"unknown kernel function {which!r}")
    return fn


def kernel_eval(which: str, u: Scalar, v: Scalar, q: Scalar) -> Scalar:
    """Evaluate one of ``f, g, gt, h, ht`` at ``(u, v)`` for deformation ``q``."""
    return Kernel(q)(which, to_scalar(u), to_scalar(v))


def set_product(fn: Callable, xs: Iterable[Scalar], ys: Iterable[Scalar] | None = None) -> Scalar:
    """Product of ``fn`` over ``xs`` (one-set form) or over ``xs x ys``.

    Empty sets give 1.  A :class:`PoleError` names the offending pair.
    """
    out = mpq(1)
    if ys is None:
        for x in xs:
            out = out * fn(x)
        return out
    ys = tuple(ys)
    for x in xs:
        for y in ys:
            try:
                out = out * fn(x, y)
            except PoleError as exc:
                raise PoleError(f"pole at pair ({x}, {y}): {exc}") from None
    return out


def determinant(rows: Sequence[Sequence[Scalar]]) -> Scalar:
    """Determinant by Gaussian elimination (exact pivoting on nonzero entries)."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return mpq(1)
    det = mpq(1)
    for col in range(n):
        if is_exact(a[col][col]) and all(is_exact(a[r][col]) for r in range(col, n)):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        else:
            piv = max(range(col, n), key=lambda r: abs(a[r][col]))
            if a[piv][col] == 0:
                piv = None
        if piv is None:
            return a[0][0] * 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        pv = a[col][col]
        det = det * pv
        for r in range(col + 1, n):
            if a[r][col] != 0:
                m = a[r][col] / pv
                row_r, row_c = a[r], a[col]
                for k in range(col + 1, n):
                    row_r[k] = row_r[k] - m * row_c[k]
    return det


def _check_izergin_args(xs: Sequence[Scalar], ys: Sequence[Scalar]) -> None:
    if len(xs) != len(ys):
        raise ValueError(f"Izergin determinant needs equal cardinalities, got {len(xs)} and {len(ys)}")
    if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
        raise PoleError("Izergin determinant needs pairwise distinct parameters within each set")


def izergin(xs: Sequence[Scalar], ys: Sequence[Scalar], kernel: Kernel, variant: str = "K") -> Scalar:
    """The Izergin determinant ``K(x|y)`` or its twin ``K~(x|y)``.

    Evaluated literally: prefactor times an explicit ``n x n`` determinant.
    Requires ``x_i != y_j`` and ``q x_i != y_j / q``; use :func:`izergin_over_f`
    when coincidences are possible.
    """
    xs, ys = tuple(xs), tuple(ys)
    _check_izergin_args(xs, ys)
    n = len(xs)
    q, qi, c = kernel.q, kernel.qi, kernel.c
    num = mpq(1)
    for x in xs:
        num *= x
    rows = []
    for x in xs:
        row = []
        for y in ys:
            a, b = x - y, q * x - qi * y
            if a == 0 or b == 0:
                raise PoleError(f"Izergin determinant pole at x={x}, y={y}")
            num *= b
            row.append(c / (a * b))
        rows.append(row)
    den = mpq(1)
    for i in range(n):
        for j in range(i + 1, n):
            den *= (xs[i] - xs[j]) * (ys[j] - ys[i])
    value = num / den * determinant(rows)
    return _twist_variant(value, xs, ys, variant)


def izergin_over_f(xs: Sequence[Scalar], ys: Sequence[Scalar], kernel: Kernel, variant: str = "K") -> Scalar:
    """``K(x|y) / f(x, y)`` (resp. ``K~/f``) in a form regular at ``x_i = y_j``.

    Multiplying row ``i`` of the Izergin matrix by ``prod_k (x_i - y_k)`` clears
    the simple poles, so the value is finite wherever only ``q x = y/q`` is avoided.
    """
    xs, ys = tuple(xs), tuple(ys)
    _check_izergin_args(xs, ys)
    n = len(xs)
    q, qi, c = kernel.q, kernel.qi, kernel.c
    rows = []
    for x in xs:
        row = []
        for j, y in enumerate(ys):
            b = q * x - qi * y
            if b == 0:
                raise PoleError(f"Izergin determinant pole at q*x = y/q (x={x}, y={y})")
            entry = c / b
            for k, yk in enumerate(ys):
                if k != j:
                    entry *= x - yk
            row.append(entry)
        rows.append(row)
    pre = mpq(1)
    for x in xs:
        pre *= x
    den = mpq(1)
    for i in range(n):
        for j in range(i + 1, n):
            den *= (xs[i] - xs[j]) * (ys[j] - ys[i])
    value = pre / den * determinant(rows)
    return _twist_variant(value, xs, ys, variant)


def _twist_variant(value: Scalar, xs: Sequence[Scalar], ys: Sequence[Scalar], variant: str) -> Scalar:
    if variant == "K":
        return value
    if variant not in ("Kt", "K~"):
        raise ValueError(f"unknown Izergin variant {variant!r}")
    for x, y in zip(xs, ys):
        if x == 0:
            raise PoleError("K~ needs nonzero x parameters")
        value = value * y / x
    return value


class RationalSampler:
    """Seeded source of random nonzero rationals with bounded height."""

    def __init__(self, seed: int, magnitude: int = 9) -> None:
        if magnitude < 2:
            raise ValueError("magnitude must be at least 2")
        self.seed = seed
        self.magnitude = magnitude
        self._rng = random.Random(seed)

    def scalar(self) -> mpq:
        m = self.magnitude
        while True:
            num = self._rng.randint(-m, m)
            if num:
                return mpq(num, self._rng.randint(1, m))

    def distinct(self, n: int, avoid: Iterable[Scalar] = ()) -> list:
        """``n`` pairwise distinct values, also distinct from ``avoid``."""
        seen = set(avoid)
        out = []
        while len(out) < n:
            x = self.scalar()
            if x not in seen:
                seen.add(x)
                out.append(x)
        return out

    def generic(self, n: int, avoid: Iterable[Scalar], q: Scalar) -> list:
        """``n`` distinct values that also avoid ``q^{+-2}`` multiples of ``avoid``
        and of each other, so that no ``f``/``g`` denominator vanishes by accident."""
        bad: set = set()
        for a in avoid:
            bad.update((a, a * q * q, a / (q * q)))
        out: list = []
        while len(out) < n:
            x = self.scalar()
            if x in bad:
                continue
            out.append(x)
            bad.update((x, x * q * q, x / (q * q)))
        return out

    def choice(self, seq: Sequence) -> Any:
        return self._rng.choice(seq)

    def randrange(self, n: int) -> int:
        return self._rng.randrange(n)
