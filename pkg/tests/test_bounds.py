import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from tlbt import (
    StateSpace,
    balance,
    corollary_bound,
    distinct_groups,
    global_constant,
    gramians_infinite,
    gramians_lyapunov,
    heat_rod,
    hinf_limit_bound,
    random_stable,
    theorem_bound,
    truncate,
)
from tlbt.bounds import _exp_constant, balanced_constant
from tlbt.exceptions import IllConditionedBalancingError, ObservabilityError, ReachabilityError, SingularMatrixError
from tlbt.simulation import Signal, normalize_input, verify_bound

from helpers import SWEEP_RANK_TOL, scalar_gramian


def inv_sqrt(S):
    w, V = np.linalg.eigh(S)
    return V @ np.diag(w ** -0.5) @ V.T


def strict_pair(seed, n, T):
    """A randomly drawn system whose Gramians allow a complete balancing, or None."""
    sys = random_stable(n, 2, 2, seed)
    g = gramians_lyapunov(sys, T)
    try:
        return sys, g, balance(sys, g)
    except (ReachabilityError, ObservabilityError, IllConditionedBalancingError):
        return None


# -- grouping ----------------------------------------------------------------


def test_groups_exact_ties():
    g = distinct_groups([3.0, 3.0, 1.0])
    assert [(x.value, x.multiplicity) for x in g] == [(3.0, 2), (1.0, 1)]


def test_groups_all_distinct():
    g = distinct_groups([5.0, 4.0, 3.0], r=2)
    assert [(x.value, x.multiplicity, x.boundary) for x in g] == [(5, 1, 3), (4, 1, 4), (3, 1, 5)]


def test_groups_near_tie_merges():
    g = distinct_groups([1.0, 1.0 - 1e-12, 0.5], rel_tol=1e-10)
    assert [(x.value, x.multiplicity) for x in g] == [(1.0, 2), (0.5, 1)]


def test_groups_empty():
    assert distinct_groups([]) == []


@pytest.mark.parametrize("v", [[1.0, 2.0], [1.0, -0.5]])
def test_groups_reject_bad_input(v):
    with pytest.raises(ValueError):
        distinct_groups(v)


@given(st.lists(st.integers(1, 6), min_size=0, max_size=25), st.integers(0, 10))
def test_groups_properties(ints, r):
    v = np.sort(np.array(ints, dtype=float))[::-1]
    g = distinct_groups(v, r=r)
    assert sum(x.multiplicity for x in g) == v.size
    vals = [x.value for x in g]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert [x.boundary for x in g] == list(r + np.cumsum([x.multiplicity for x in g]))


# -- constants ----------------------------------------------------------------


def test_global_constant_scalar_closed_form():
    sys = StateSpace([[-1.0]], [[1.0]], [[1.0]])
    g = gramians_lyapunov(sys, 1.0)
    Q = scalar_gramian(-1.0, 1.0, 1.0)
    g_term = math.exp(-2.0) / Q
    c = global_constant(sys, g)
    assert c.g_term == pytest.approx(g_term, rel=1e-12)
    assert c.f_term == pytest.approx(g_term, rel=1e-12)
    assert c.c_T == pytest.approx(math.exp(0.5 * g_term), rel=1e-12)
    assert c.g_term == pytest.approx(0.313035, abs=1e-6)
    assert c.c_T == pytest.approx(1.16944, abs=1e-5)


def test_global_constant_formula_identity():
    sys = random_stable(3, 1, 2, 4)
    c = global_constant(sys, gramians_lyapunov(sys, 1.5))
    assert c.c_T == math.exp(0.5 * max(c.g_term, c.f_term) * 1.5)


def test_global_constant_symmetric_siso():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((4, 4))
    A = -(M @ M.T) - 0.5 * np.eye(4)
    b = rng.standard_normal((4, 1))
    sys = StateSpace(A, b, b.T)
    g = gramians_lyapunov(sys, 1.0)
    np.testing.assert_allclose(g.P, g.Q, rtol=1e-12)
    c = global_constant(sys, g)
    assert c.g_term == pytest.approx(c.f_term, rel=1e-10)


def test_global_constant_infinite_horizon_is_one():
    sys = random_stable(3, 1, 1, 0)
    assert global_constant(sys, gramians_infinite(sys)).c_T == 1.0


def test_global_constant_singular_gramian_raises():
    with pytest.raises(SingularMatrixError):
        sys = heat_rod(20)
        global_constant(sys, gramians_lyapunov(sys, 40.0))


def test_heat_rod_constant_at_long_horizon():
    # original-coordinate Gramians are singular here, so the constant is
    # evaluated from balanced quantities
    sys = heat_rod(20)
    bal = balance(sys, gramians_lyapunov(sys, 40.0), rank_tol=SWEEP_RANK_TOL)
    assert balanced_constant(bal).c_T <= 1 + 1e-6


def test_constant_overflow_is_inf():
    assert _exp_constant(1e6, 0.0, 1e6) == math.inf
    assert _exp_constant(5.0, 7.0, math.inf) == 1.0


# -- bounds -------------------------------------------------------------------


def two_state_oracle(T):
    """Hand evaluation for A = diag(-1, -2), B = [1, 1]^T, C = [1, 1]."""
    lam = np.array([-1.0, -2.0])
    S = lam[:, None] + lam[None, :]
    P = np.expm1(S * T) / S
    Q = P.copy()
    sig = np.sort(np.sqrt(np.linalg.eigvals(P @ Q).real))[::-1]
    E = np.diag(np.exp(lam * T))
    ones = np.ones((1, 2))
    g = np.linalg.norm(ones @ E @ inv_sqrt(Q), 2) ** 2
    f = np.linalg.norm(ones @ E @ inv_sqrt(P), 2) ** 2
    c = math.exp(0.5 * max(g, f) * T)
    return sig, c


def test_theorem_two_state_hand_evaluation():
    T = 1.0
    sys = StateSpace(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 1.0]])
    g = gramians_lyapunov(sys, T)
    bal = balance(sys, g)
    sig, c = two_state_oracle(T)
    np.testing.assert_allclose(bal.sigma, sig, rtol=1e-10)
    br = theorem_bound(bal, 1)
    assert len(br.groups) == 1 and br.groups[0].boundary == 2
    assert br.total == pytest.approx(2 * sig[1] * c, rel=1e-8)
    assert br.certified == br.total
    assert corollary_bound(sys, g, bal.sigma[1:]) >= br.total * (1 - 1e-12)


def test_theorem_nothing_truncated():
    sys = random_stable(4, 1, 1, 0)
    bal = balance(sys, gramians_lyapunov(sys, 2.0))
    br = theorem_bound(bal, 4)
    assert br.groups == [] and br.total == 0.0
    assert corollary_bound(sys, gramians_lyapunov(sys, 2.0), []) == 0.0


@pytest.mark.parametrize("r", [0, 5])
def test_theorem_r_out_of_range(r):
    sys = random_stable(4, 1, 1, 0)
    with pytest.raises(ValueError):
        theorem_bound(balance(sys, gramians_lyapunov(sys, 2.0)), r)


def test_corollary_scalar_plugin():
    sys = StateSpace([[-1.0]], [[1.0]], [[1.0]])
    g = gramians_lyapunov(sys, 1.0)
    c = global_constant(sys, g).c_T
    assert corollary_bound(sys, g, [3.0]) == pytest.approx(2 * c * 3.0, rel=1e-15)


def test_corollary_sums_distinct_values_only():
    sys = StateSpace([[-1.0]], [[1.0]], [[1.0]])
    g = gramians_lyapunov(sys, 1.0)
    c = global_constant(sys, g).c_T
    assert corollary_bound(sys, g, [2.0, 2.0, 1.0]) == pytest.approx(2 * c * 3.0, rel=1e-15)


def test_hinf_limit_examples():
    assert hinf_limit_bound([]) == 0.0
    assert hinf_limit_bound([3.0, 1.0]) == 8.0


@pytest.mark.parametrize("seed", range(10))
def test_limit_consistency(seed):
    sys = random_stable(8, 2, 2, seed)
    bal = balance(sys, gramians_infinite(sys), rank_tol=SWEEP_RANK_TOL)
    for r in range(1, bal.order):
        br = theorem_bound(bal, r)
        assert all(g.constant == 1.0 for g in br.groups)
        ref = hinf_limit_bound(br.values)
        assert abs(br.total - ref) <= 1e-12 * ref


@given(st.integers(0, 10_000), st.integers(2, 8), st.floats(0.2, 12.0))
def test_ordering_theorem_corollary(seed, n, T):
    found = strict_pair(seed, n, T)
    assume(found is not None)
    sys, g, bal = found
    try:
        c_glob = global_constant(sys, g)
    except SingularMatrixError:
        assume(False)
    c_k = balanced_constant(bal)
    for r in range(1, n):
        br = theorem_bound(bal, r)
        consts = br.constants
        assert np.all(consts >= 1.0)
        assert np.all(np.diff(consts) >= 0)
        assert consts[-1] == c_k.c_T
        cor = corollary_bound(sys, g, bal.sigma[r:])
        cor_k = 2 * c_k.c_T * float(np.sum(br.values))
        assert br.total <= cor * (1 + 1e-8)
        assert cor <= cor_k * (1 + 1e-8)


@given(st.integers(0, 10_000), st.integers(1, 8), st.floats(0.2, 12.0))
def test_balanced_constant_matches_original_coordinates(seed, n, T):
    found = strict_pair(seed, n, T)
    assume(found is not None)
    sys, g, bal = found
    try:
        c_glob = global_constant(sys, g)
    except SingularMatrixError:
        assume(False)
    c_bal = balanced_constant(bal)
    assert c_bal.c_T == pytest.approx(c_glob.c_T, rel=1e-8)


def test_convergence_heat_rod():
    sys = heat_rod(20)
    cs = []
    for T in (5.0, 10.0, 20.0, 40.0):
        bal = balance(sys, gramians_lyapunov(sys, T), rank_tol=SWEEP_RANK_TOL)
        br = theorem_bound(bal, 4)
        cs.append(max(br.constants))
    assert all(b <= a for a, b in zip(cs, cs[1:]))
    assert abs(cs[-1] - 1.0) <= 1e-6


def test_rank_truncated_tail_is_certified():
    sys = heat_rod(60)
    bal = balance(sys, gramians_lyapunov(sys, 12.0), rank_tol=SWEEP_RANK_TOL)
    br = theorem_bound(bal, 2)
    assert bal.sigma_discarded.size > 0
    assert br.discarded_tail >= 2 * bal.sigma_discarded.sum()
    assert br.certified == br.total + br.discarded_tail


def test_soundness_random_n10():
    u = Signal(lambda t: np.column_stack([np.sin(2.1 * t) + 0.3 * t, np.cos(0.7 * t)]), "smooth")
    for seed in range(20):
        sys = random_stable(10, 2, 2, seed)
        bal = balance(sys, gramians_lyapunov(sys, 2.0), rank_tol=SWEEP_RANK_TOL)
        rom = truncate(bal, min(5, bal.order))
        br = theorem_bound(bal, rom.r)
        chk = verify_bound(sys, rom.sys_r, normalize_input(u, 2.0, 512), 2.0, 512, br.certified)
        assert chk.holds, (seed, chk)
