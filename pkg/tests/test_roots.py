import json

import numpy as np
import pytest
from gmpy2 import mpq

from helpers import Q, make_chain
from trigbethe import repchain as rc
from trigbethe import roots as ro
from trigbethe.scalars import PoleError


@pytest.fixture(scope="module")
def l1_chain():
    return rc.ChainSpec(2, (mpq(3, 2),), (mpq(1), mpq(7, 2)), Q)


def test_closed_form_root_is_a_root(l1_chain):
    t = ro.l1_closed_form_root(l1_chain)
    assert abs(ro.bethe_residual([[complex(t)]], l1_chain.to_float())[0]) < 1e-14


def test_solver_finds_closed_form(l1_chain):
    rep = ro.solve(ro.RootProblem(l1_chain, (1,)))
    assert abs(rep.roots[0][0] - complex(ro.l1_closed_form_root(l1_chain))) < 1e-12
    assert rep.residual < 1e-12 and rep.trace[-1] == rep.residual


def test_residual_nonzero_off_shell(l1_chain):
    assert abs(ro.bethe_residual([[0.3 + 0.1j]], l1_chain.to_float())[0]) > 1e-3


def test_residual_permutation_covariant():
    ch = make_chain(2, 4).to_float()
    t = [[0.3 + 0.2j, -1.1 + 0.4j]]
    a = ro.bethe_residual(t, ch)
    b = ro.bethe_residual([t[0][::-1]], ch)
    assert np.allclose(a, b[::-1], rtol=1e-14, atol=0)


def test_singular_guess_is_a_pole_error():
    ch = make_chain(2, 3)
    with pytest.raises(PoleError):
        ro.solve(ro.RootProblem(ch, (1,), guess=[[complex(ch.xi[0])]]))


@pytest.mark.parametrize("N,L,r", [(2, 3, (1,)), (2, 4, (2,)), (3, 3, (1, 1))])
def test_on_shell_eigenvector(N, L, r):
    ch = make_chain(N, L)
    rep = ro.solve(ro.RootProblem(ch, r, seed=1))
    assert rep.residual < 1e-10
    zs = [0.7 + 0.4j, -1.3 + 0.2j, 2.1 - 0.5j, 0.1 + 1.9j, -0.6 - 0.8j]
    assert ro.eigen_check(rep.roots, ch, zs) < 1e-9
    for z in zs[:2]:
        tau = ro.eigenvalue(z, rep.roots, ch.to_float())
        assert abs(ro.rayleigh_quotient(rep.roots, ch, z) - tau) < 1e-9 * max(1, abs(tau))


def test_off_shell_deviation_is_large():
    ch = make_chain(2, 3)
    assert ro.eigen_check([[0.4 + 0.3j]], ch, [0.7 + 0.4j]) > 1e-3


def test_tau_regular_at_roots_only_on_shell():
    ch = make_chain(2, 3)
    rep = ro.solve(ro.RootProblem(ch, (1,), seed=1))
    fl = ch.to_float()
    t = rep.roots[0][0]
    near = [abs(ro.eigenvalue(t + eps, rep.roots, fl)) for eps in (1e-3, 1e-5, 1e-7)]
    assert max(near) < 10 * min(near)
    off = [[t + 0.2]]
    grow = [abs(ro.eigenvalue(off[0][0] + eps, off, fl)) for eps in (1e-3, 1e-5)]
    assert grow[1] > 50 * grow[0]


def test_polynomial_tau_finite_at_inhomogeneities():
    ch = rc.ChainSpec.untwisted(2, (mpq(3, 2), mpq(-2), mpq(5, 7)), Q)
    rep = ro.solve(ro.RootProblem(ch, (1,), seed=1))
    fl = ch.to_float()
    xi = [complex(x) for x in ch.xi]
    poly = lambda z: np.prod([z - x for x in xi]) * ro.eigenvalue(z, rep.roots, fl)  # noqa: E731
    vals = [poly(xi[0] + eps) for eps in (1e-4, 1e-6, 1e-8)]
    assert abs(vals[1] - vals[2]) < 1e-4 * abs(vals[2]) and abs(vals[2]) < 1e6


def test_report_schema():
    ch = make_chain(2, 3)
    rep = ro.solve(ro.RootProblem(ch, (1,), seed=2))
    doc = json.loads(ro.report_json(rep))
    assert doc["schema"] == "trigbethe.roots-report/1"
    assert np.isfinite(doc["condition"])


def test_closed_form_only_for_l1():
    with pytest.raises(ValueError):
        ro.l1_closed_form_root(make_chain(2, 2))
