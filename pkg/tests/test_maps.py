import math

import numpy as np
import pytest
from scipy.optimize import brentq

from crlab.maps import (ConstructionError, ImmersionMap, alpha_coefficients, alpha_n_closed_form,
                        alpha_n_plus_1_closed_form, arg_condition_residual, branch_index,
                        build_immersion, compute_a, compute_t, divergence_probe, pde_residual,
                        restricted_R_residual, verify_construction)
from crlab.poly import apply_vector_field_L

from conftest import random_c4


def a_oracle(n):
    """Solve Re (1/2 + i a)^(2n+1) = 0 by bracketing: take the root whose
    argument lies in the branch (pi/2 + 2 pi K)/(2n+1) with K = ceil(n/2) - 1."""
    K = math.ceil(n / 2) - 1

    def f(a):
        return (complex(0.5, a) ** (2 * n + 1)).real / abs(complex(0.5, a)) ** (2 * n + 1)

    width = math.pi / (2 * n + 1)
    lo = 0.5 * math.tan((2 * math.pi * K + math.pi / 2) / (2 * n + 1) - width / 2)
    hi = 0.5 * math.tan(min((2 * math.pi * K + math.pi / 2) / (2 * n + 1) + width / 2,
                            math.pi / 2 - 1e-9))
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)


def test_branch_index():
    assert [branch_index(n) for n in range(1, 8)] == [0, 0, 1, 1, 2, 2, 3]
    for n in range(1, 30):
        assert branch_index(n) == math.ceil(n / 2) - 1
    with pytest.raises(ValueError):
        branch_index(0)


@pytest.mark.parametrize("n", range(1, 16))
def test_a_matches_bracketed_root(n):
    a, _ = compute_a(n)
    assert abs(a - a_oracle(n)) <= 1e-12 * max(1, abs(a))
    assert a > 0


def test_first_map_constants():
    a, K = compute_a(1)
    assert K == 0
    assert abs(a - 1 / (2 * math.sqrt(3))) <= 1e-15
    assert abs(compute_t(1) - 2 / math.sqrt(3)) <= 1e-15


def test_t3():
    # the threshold is 1/cos of the branch angle
    assert abs(compute_t(3) - 1 / math.cos((math.pi / 2 + 2 * math.pi) / 7)) <= 1e-14
    assert abs(compute_t(3) - 2.304764870962486) <= 1e-12


@pytest.mark.parametrize("n", range(1, 21))
def test_arg_condition(n):
    assert arg_condition_residual(n) <= 1e-9


def test_P1_coefficients(maps):
    m = maps[1]
    s = math.sqrt(3)
    assert abs(m.alpha[0] - complex(-1 / 6, -1 / (2 * s))) <= 1e-15
    assert abs(m.alpha[1] - complex(1 / 6, -1 / (2 * s))) <= 1e-15
    assert m.P.coefficient((1, 2, 0, 1)) == m.alpha[0]
    assert m.P.coefficient((0, 1, 1, 2)) == m.alpha[1]


@pytest.mark.parametrize("n", range(1, 9))
def test_pde_identity_on_coefficients(maps, n):
    assert pde_residual(maps[n]) <= (1e-14 if n == 1 else 1e-10)


@pytest.mark.parametrize("n", [1, 2, 4, 7])
def test_pde_identity_at_random_points(maps, n):
    m = maps[n]
    W = random_c4(np.random.default_rng(n), 50, 0.6)
    lhs = apply_vector_field_L(m.P).evaluate(W)
    rhs = m.R.evaluate(W)
    scale = np.abs(m.R.to_complex().evaluate(np.abs(W))) + 1
    assert np.max(np.abs(lhs - rhs) / scale) <= 1e-12


@pytest.mark.parametrize("n", range(2, 9))
def test_middle_coefficients_closed_forms(maps, n):
    m = maps[n]
    assert abs(m.alpha[n - 1] - alpha_n_closed_form(n, m.a)) <= 1e-12 * max(1, abs(m.alpha[n - 1]))
    assert abs(m.alpha[n] - alpha_n_plus_1_closed_form(n, m.a)) <= 1e-12 * max(1, abs(m.alpha[n]))


@pytest.mark.parametrize("n", range(1, 9))
def test_shape_of_P(maps, n):
    m = maps[n]
    assert m.P.is_homogeneous() and m.P.total_degree == 4 * n
    assert len(m.P) == 2 * n
    for (e1, e2, e3, e4) in m.P.terms:
        assert e2 == e1 + 1 and e4 == e3 + 1  # every term carries w2 and w4


def test_restricted_R(maps):
    for n in range(1, 9):
        assert restricted_R_residual(maps[n]) <= 1e-10
    m = build_immersion(16, precision=50)
    assert restricted_R_residual(m, precision=50) <= 1e-25


def test_precision_build_agrees_with_binary64(maps):
    m = build_immersion(6, precision=40)
    for x, y in zip(m.alpha, maps[6].alpha):
        assert abs(complex(x) - y) <= 1e-12 * abs(complex(x))
    assert abs(m.a - maps[6].a) <= 1e-15


def test_threshold_divergence():
    first = divergence_probe(10, 40)
    assert first is not None and compute_t(first) > 10
    assert all(compute_t(n) <= 10 for n in range(1, first))
    ts = [compute_t(n) for n in range(1, 22)]
    assert all(np.diff(ts[0::2]) > 0) and all(np.diff(ts[1::2]) > 0)


def test_construction_error_paths():
    with pytest.raises(ValueError):
        build_immersion(0)
    a, _ = compute_a(3)
    # a perturbed a breaks the matching of the two recursions
    with pytest.raises(ConstructionError):
        alpha_coefficients(3, a * 1.01)


def test_json_round_trip(maps):
    m = maps[3]
    back = ImmersionMap.from_json(m.to_json())
    assert back.n == 3 and back.P == m.P and back.R == m.R and back.alpha == m.alpha
    assert back.t_threshold == m.t_threshold


def test_verify_construction_report(maps):
    rep = verify_construction(list(maps.values()), divergence_bound=3.0)
    assert rep.passed
    assert rep.get("pde_residual[n=8]").status == "pass"
    assert rep.get("divergence_probe").witness["first_n"] == min(n for n in maps if
                                                                   maps[n].t_threshold > 3)
