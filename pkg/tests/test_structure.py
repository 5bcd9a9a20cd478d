from __future__ import annotations

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import lstar_scan
from rtcable.analysis import numeric_det
from rtcable.cabling import RmMatrix, build_Rm
from rtcable.cyclotomic import CycElem, RootSystem, eval_complex
from rtcable.errors import PreconditionError, StructureError
from rtcable.params import CableParams
from rtcable.skein import SkeinVector
from rtcable.structure import (
    STRUCTURE_CLAUSES,
    Category,
    _eliminate,
    check_schedule,
    classify,
    cofactor_det,
    expansion_schedule,
    find_lprime,
    find_lstar,
    gh_violations,
    pairing_violations,
    sentinel_rows,
    verify_structure,
    zero_rows,
)


@st.composite
def large_coprime(draw, qs=range(1, 9), r_max=161):
    q = draw(st.sampled_from(list(qs)))
    p = draw(st.sampled_from([1, -1, 2, -2, 3, -3, 5]))
    assume(np.gcd(p, q) == 1)
    lo = q + 7 + (q + 8) % 2
    r = draw(st.integers(lo // 2, r_max // 2)) * 2 + 1
    assume(r > q + 6 and np.gcd(r, q) == 1)
    return CableParams.of(p, q, r)


P2313 = CableParams.of(2, 3, 13)


# -- classification -----------------------------------------------------------


@pytest.mark.parametrize(
    "l,want", [(1, (Category.C_e, 0, 4)), (4, (Category.C_o, 1, 0)), (5, (Category.C_o, 1, 3))]
)
def test_classify_examples(l, want):
    assert classify(l, 1, P2313) == want


def test_classify_domain():
    with pytest.raises(ValueError):
        classify(0, 1, P2313)
    with pytest.raises(ValueError):
        classify(1, 0, P2313)


# -- special indices ------------------------------------------------------------


@pytest.mark.parametrize("q,r,want", [(3, 13, 4), (2, 9, 4), (1, 11, 1), (1, 41, 1)])
def test_lstar_examples(q, r, want):
    assert find_lstar(CableParams.of(1, q, r)) == want


@given(st.integers(1, 30), st.integers(1, 300))
def test_lstar_matches_scan(q, k):
    r = 2 * k + 1
    assume(np.gcd(q, r) == 1)
    assert [find_lstar(CableParams.of(1, q, r))] == lstar_scan(q, r)


def test_lstar_needs_coprime_level():
    with pytest.raises(PreconditionError):
        find_lstar(CableParams.of(1, 3, 15))


@pytest.mark.parametrize("q,r,want", [(4, 15, (1, 3)), (6, 13, (2, 4)), (3, 13, (4, 6))])
def test_sentinel_examples(q, r, want):
    assert sentinel_rows(CableParams.of(1, q, r)) == want


def test_lprime_examples():
    l = find_lprime(P2313)
    assert build_Rm(P2313).cols[l].support() == [5, 6]
    find_lprime(CableParams.of(3, 2, 11))
    with pytest.raises(PreconditionError):
        find_lprime(CableParams.of(1, 4, 9))


def test_lprime_missing_for_q1():
    with pytest.raises(StructureError):
        find_lprime(CableParams.of(1, 1, 21))


@pytest.mark.parametrize("q,r,want", [(3, 9, [3]), (5, 15, [5]), (3, 21, [3, 6, 9]), (4, 23, None)])
def test_zero_rows(q, r, want):
    params = CableParams.of(1, q, r)
    if want is None:
        with pytest.raises(PreconditionError):
            zero_rows(params)
    else:
        assert zero_rows(params) == want


def test_zero_rows_coprime_is_error():
    with pytest.raises(PreconditionError):
        zero_rows(CableParams.of(3, 2, 11))


# -- determinant ----------------------------------------------------------------


def test_cofactor_det_example():
    mono, trace = cofactor_det(P2313)
    num = numeric_det(build_Rm(P2313).to_complex())
    assert abs(abs(num) - 1) < 1e-9
    assert abs(eval_complex(mono, P2313.sys) - num) < 1e-9
    assert len(trace) == P2313.m


def test_cofactor_det_q2_completes():
    params = CableParams.of(3, 2, 11)
    mono, trace = cofactor_det(params)
    assert mono and len(trace) == params.m


def test_cofactor_det_singular():
    mono, _ = cofactor_det(CableParams.of(2, 3, 9))
    assert mono.sign == 0


def test_elimination_stall():
    sys = RootSystem(5)
    one = CycElem.from_mapping({0: 1}, sys)
    full = RmMatrix(2, sys, (SkeinVector(((1, one), (2, one))), SkeinVector(((1, one), (2, one)))))
    with pytest.raises(StructureError):
        _eliminate(full)


@settings(max_examples=80, deadline=None)
@given(large_coprime())
def test_cofactor_det_matches_numeric(params):
    mono, _ = cofactor_det(params)
    num = numeric_det(build_Rm(params).to_complex())
    assert abs(eval_complex(mono, params.sys) - num) < 1e-9


@settings(max_examples=80, deadline=None)
@given(large_coprime(qs=range(3, 9)))
def test_hand_schedule_matches_greedy(params):
    chk = check_schedule(params)
    assert chk.applicable and chk.valid and chk.agrees_with_greedy, chk.reason
    if params.q % 4 == 0:
        assert chk.final_is_lstar


def test_schedule_covers_every_row():
    for q in range(3, 9):
        for r in range(q + 7 + (q + 8) % 2, 61, 2):
            params = CableParams.of(1, q, r)
            if params.level_gcd != 1:
                continue
            rows = sorted(x for step in expansion_schedule(params) for x in step)
            assert rows == list(range(1, params.m + 1)), (q, r)


def test_schedule_not_applicable_for_q2():
    chk = check_schedule(CableParams.of(3, 2, 11))
    assert not chk.applicable


# -- verification report ----------------------------------------------------------


def test_verify_example_all_pass():
    rep = verify_structure(P2313)
    assert rep.all_clauses_pass()
    assert rep.l_star == 4
    assert (rep.i_minus, rep.i_plus) == (4, 6)
    assert set(rep.clause_results) == set(STRUCTURE_CLAUSES)
    d = rep.to_dict()
    assert d["clause_results"]["lstar_unique"] == "pass"
    assert d["clause_results"]["sentinel_q4_first_col"] == "n/a"


def test_verify_q2_reports_failures():
    # l* = m: a single nonzero row, 2m - 1 nonzeros, closed-form row 0
    rep = verify_structure(CableParams.of(3, 2, 11))
    assert rep.l_star == rep.m == 5
    assert rep.single_rows_scan == [2]
    assert {"sentinel_rows_in_range", "nonzero_count_2m_minus_2", "lstar_at_most_m_minus_1"} <= set(
        rep.failed_clauses()
    )


def test_verify_singular_case():
    rep = verify_structure(CableParams.of(2, 3, 9))
    assert rep.zero_rows == [3]
    assert rep.det_monomial.sign == 0
    assert rep.clause_results["lstar_unique"] is None


@settings(max_examples=60, deadline=None)
@given(large_coprime(qs=range(3, 9)))
def test_structure_clauses_hold_for_q_at_least_3(params):
    rep = verify_structure(params)
    assert not rep.failed_clauses(), rep.failed_clauses()
    assert rep.single_rows_scan == sorted((rep.i_minus, rep.i_plus))


# -- pairing checks ---------------------------------------------------------------


def test_pairing_counterexample_for_odd_q():
    found = pairing_violations(P2313)
    assert any(
        v["kind"] == "gamma" and v["index"] == 2 and {v["l1"], v["l2"]} == {1, 4} and {v["cat1"], v["cat2"]} == {"C_e", "D_e"}
        for v in found
    )


@settings(max_examples=60, deadline=None)
@given(large_coprime(qs=(2, 4, 6, 8)))
def test_pairing_rule_holds_for_even_q(params):
    assert pairing_violations(params) == []


@settings(max_examples=60, deadline=None)
@given(large_coprime())
def test_no_excluded_gh_coincidences(params):
    assert gh_violations(params) == []
