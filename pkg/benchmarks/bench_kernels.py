"""Compare the compiled and numpy monodromy kernels on exact and float states.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from trigbethe import _kernels_py
from trigbethe import repchain as rc
from trigbethe.scalars import RationalSampler

try:
    from trigbethe import _ckernels
except ImportError:
    _ckernels = None


def _case(N: int, L: int, exact: bool, seed: int = 0):
    S = RationalSampler(seed)
    q = S.scalar()
    spec = rc.ChainSpec(N, tuple(S.distinct(L)), tuple(S.distinct(N)), q)
    if not exact:
        spec = spec.to_float()
    s = rc.random_state(spec, S)
    z = S.distinct(1, spec.xi if exact else [])[0]
    z = z if exact else complex(z)
    K = spec.kernel
    fv = [K.f(z, x) for x in spec.xi]
    g = [K.g(z, x) for x in spec.xi]
    gt = [K.gt(z, x) for x in spec.xi]
    return s, spec, fv, g, gt


def bench(N: int, L: int, exact: bool, repeat: int) -> dict:
    s, spec, fv, g, gt = _case(N, L, exact)
    args = (s, N, L, N - 1, 0, range(L), fv, g, gt, spec.d[0])
    out = {}
    backends = {"python": _kernels_py.apply_entry}
    if _ckernels is not None:
        backends["cython"] = _ckernels.apply_entry
    ref = None
    for name, fn in backends.items():
        res = fn(*args)
        if ref is None:
            ref = res
        elif exact:
            assert all(a == b for a, b in zip(res, ref)), "backends disagree"
        else:
            assert np.allclose(res, ref), "backends disagree"
        out[name] = min(timeit.repeat(lambda: fn(*args), number=3, repeat=repeat)) / 3
    return out


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    print(f"{'case':<22}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for N, L in [(2, 4), (2, 8), (3, 4), (3, 6), (4, 4)]:
        for exact in (True, False):
            t = bench(N, L, exact, args.repeat)
            label = f"N={N} L={L} {'exact' if exact else 'float'}"
            py = t["python"] * 1e3
            cy = t.get("cython", float("nan")) * 1e3
            print(f"{label:<22}{py:>14.3f}{cy:>14.3f}{py / cy:>10.2f}")


if __name__ == "__main__":
    main()
