import itertools
import json

import pytest

from helpers import Q, make_chain, make_sets
from trigbethe import actions as ac
from trigbethe import bethe as bt
from trigbethe import repchain as rc
from trigbethe.scalars import PoleError, RationalSampler


def _case(N, L, r, seed=0, nz=2):
    ch = make_chain(N, L, seed)
    S = RationalSampler(("act", N, L, r, seed).__repr__())
    sets = make_sets(S, r, ch.xi)
    zs = S.generic(nz, [0, *ch.xi, *[x for s in sets for x in s]], Q)
    return ch, sets, zs


@pytest.mark.parametrize("N,L,r", [(2, 2, (1,)), (2, 3, (2,)), (3, 2, (1, 1)), (3, 3, (2, 1)), (3, 3, (0, 1))])
def test_single_action_all_entries(N, L, r):
    ch, sets, zs = _case(N, L, r)
    for i, j in itertools.product(range(1, N + 1), repeat=2):
        assert ac.verify_single_action(i, j, zs[0], sets, ch) == 0.0, (i, j)


def test_single_action_n2_r0_is_vacuum_action():
    # on the vacuum T_11 gives lambda_1, T_12 creates B(z), T_21 annihilates
    ch, _, zs = _case(2, 2, (0,))
    z = zs[0]
    terms = ac.single_action(1, 1, z, [[]], ch)
    assert [(t.coefficient, t.sets) for t in terms] == [(rc.lambda_eval(ch, 1, z), ((),))]
    assert ac.single_action(2, 1, z, [[]], ch) == []
    (t12,) = ac.single_action(1, 2, z, [[]], ch)
    assert t12.sets == ((z,),) and t12.coefficient == rc.lambda_eval(ch, 1, z)


def test_t1n_action():
    for N, L in [(2, 2), (3, 2), (4, 2)]:
        ch, sets, zs = _case(N, L, (1,) * (N - 1))
        assert ac.verify_t1n_action(zs[0], sets, ch) == 0.0


@pytest.mark.parametrize("N,L,r", [(2, 3, (1,)), (3, 2, (1, 1)), (3, 3, (1, 0))])
def test_multi_action(N, L, r):
    ch, sets, zs = _case(N, L, r)
    for i, j in itertools.product(range(1, N + 1), repeat=2):
        assert ac.verify_multi_action(i, j, zs, sets, ch) == 0.0, (i, j)


def test_multi_action_rejects_repeats():
    ch, sets, zs = _case(2, 2, (1,))
    with pytest.raises(ValueError):
        ac.multi_action(1, 1, [zs[0], zs[0]], sets, ch)
    with pytest.raises(ValueError):
        ac.multi_action(1, 1, [], sets, ch)


def test_action_parameter_collision_is_a_pole():
    ch, sets, _ = _case(2, 2, (1,))
    with pytest.raises(PoleError):
        ac.single_action(1, 2, sets[0][0], sets, ch)


@pytest.mark.parametrize("N,L,r", [(2, 3, (2,)), (3, 3, (1, 1)), (3, 3, (2, 1)), (3, 3, (1, 0))])
def test_zero_mode_action_corrected(N, L, r):
    ch, sets, _ = _case(N, L, r)
    for i in range(1, N):
        assert ac.verify_zero_mode_action(i, sets, ch) == 0.0


def test_zero_mode_action_literal_agrees_on_small_sets():
    # the two readings coincide when r_i <= 1 or r_{i+1} = 0
    ch, sets, _ = _case(3, 3, (1, 1))
    assert ac.verify_zero_mode_action(1, sets, ch, literal=True) == 0.0
    ch, sets, _ = _case(3, 3, (2, 0))
    assert ac.verify_zero_mode_action(1, sets, ch, literal=True) == 0.0


def test_zero_mode_action_literal_differs_when_both_colors_populated():
    ch, sets, _ = _case(3, 3, (2, 1))
    assert ac.verify_zero_mode_action(1, sets, ch, literal=True) > 0


def test_zero_mode_weights():
    ch, sets, _ = _case(3, 3, (2, 1))
    B = bt.bethe_state(ch, sets)
    ext = (0, 2, 1, 0)
    for i in range(1, 4):
        w = rc.kappa(ch, i) * Q ** (ext[i] - ext[i - 1])
        assert rc.is_zero(rc.zero_mode(ch, "diagonal", i)(B) - w * B)


def test_perturbed_terms_are_detected():
    ch, sets, zs = _case(3, 2, (1, 1))
    terms = ac.single_action(1, 3, zs[0], sets, ch)
    assert ac.verify_single_action(1, 3, zs[0], sets, ch, ac.perturbed(terms)) > 0
    assert ac.verify_single_action(1, 3, zs[0], sets, ch, terms) == 0


def test_report_is_json_and_deterministic():
    ch, sets, zs = _case(2, 2, (1,))
    terms = ac.single_action(2, 1, zs[0], sets, ch)
    rep = ac.action_report("single", 2, 1, zs[0], sets, ch, terms, 0.0)
    text = ac.report_json(rep)
    assert text == ac.report_json(ac.action_report("single", 2, 1, zs[0], sets, ch, terms, 0.0))
    doc = json.loads(text)
    assert doc["schema"] == "trigbethe.action-report/1" and doc["pass"]
    assert all(set(p) == {"I", "II", "III"} for t in doc["terms"] for p in t["partition"].values())


def test_float_mode_action():
    ch, sets, zs = _case(3, 2, (1, 1))
    fl = ch.to_float()
    fs = [[complex(x) for x in s] for s in sets]
    for i, j in [(1, 1), (2, 1), (3, 1), (2, 3)]:
        assert ac.verify_single_action(i, j, complex(zs[0]), fs, fl) < 1e-9
