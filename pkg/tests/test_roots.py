import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crlab.roots import companion_matrix, companion_roots, root_multiplicities, taylor_coefficient


def poly_from_roots(roots):
    return np.polynomial.polynomial.polyfromroots(roots)


def test_companion_matrix_eigenvalues_are_roots():
    c = poly_from_roots([1, 2, 3])
    ev = np.sort(np.linalg.eigvals(companion_matrix(c)).real)
    np.testing.assert_allclose(ev, [1, 2, 3], atol=1e-12)


roots_st = st.lists(st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False,
                                       allow_infinity=False), min_size=1, max_size=6)


@settings(max_examples=50, deadline=None)
@given(roots_st)
def test_companion_roots_match_numpy(roots):
    c = poly_from_roots(roots)
    got = np.sort_complex(companion_roots(c))
    ref = np.sort_complex(np.polynomial.polynomial.polyroots(c))
    # both are eigenvalue methods; compare residuals rather than orderings near clusters
    p = np.polynomial.Polynomial(c)
    scale = np.sum(np.abs(c))
    assert np.max(np.abs(p(got))) <= 1e-9 * scale
    assert got.size == ref.size


def test_leading_zero_coefficients_trimmed():
    c = np.array([2, -3, 1, 0, 0], dtype=complex)
    np.testing.assert_allclose(np.sort(companion_roots(c).real), [1, 2], atol=1e-12)


def test_taylor_coefficient():
    c = poly_from_roots([1, 1, 2])  # (x-1)^2 (x-2)
    v0, _ = taylor_coefficient(c, 0, 1.0)
    v1, _ = taylor_coefficient(c, 1, 1.0)
    v2, _ = taylor_coefficient(c, 2, 1.0)
    assert abs(v0) < 1e-14 and abs(v1) < 1e-14
    assert abs(v2 - (-1)) < 1e-14  # (x-1)^2 (x-2) = (x-1)^2 ((x-1) - 1)


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8, 12])
def test_single_high_multiplicity(m):
    r = 0.5 + 0.3j
    prof = root_multiplicities(poly_from_roots([r] * m))
    assert len(prof) == 1
    assert prof[0][1] == m
    assert abs(prof[0][0] - r) < 1e-6


def test_mixed_multiplicities():
    prof = root_multiplicities(poly_from_roots([1, 1, 1, -2, 0.5j, 0.5j]))
    got = sorted((k, round(r.real, 6), round(r.imag, 6)) for r, k in prof)
    assert got == [(1, -2.0, 0.0), (2, 0.0, 0.5), (3, 1.0, 0.0)]


def test_constant_has_no_roots():
    assert root_multiplicities([3.0]) == []
