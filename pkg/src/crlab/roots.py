"""Univariate root finding: companion-matrix eigenvalues and root multiplicities."""
from __future__ import annotations

from math import comb

import numpy as np


def _trim(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex).ravel()
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    return c[: nz[-1] + 1]


def _horner(c: np.ndarray, x):
    """Value and derivative of sum c[k] x^k (coefficients low to high)."""
    p = np.zeros_like(np.asarray(x, dtype=complex)) + c[-1]
    dp = np.zeros_like(p)
    for a in c[-2::-1]:
        dp = dp * x + p
        p = p * x + a
    return p, dp


def companion_matrix(coeffs) -> np.ndarray:
    """Frobenius companion matrix of the monic normalisation, low-to-high coefficients."""
    c = _trim(coeffs)
    n = c.size - 1
    if n < 1:
        raise ValueError("constant polynomial has no roots")
    m = np.zeros((n, n), dtype=complex)
    m[1:, :-1] = np.eye(n - 1)
    m[:, -1] = -c[:-1] / c[-1]
    return m


def companion_roots(coeffs, polish_steps: int = 1) -> np.ndarray:
    """Roots of ``sum coeffs[k] x^k`` from companion eigenvalues plus Newton polishing.

    A Newton step is skipped for a root where the derivative vanishes or
    where the step would increase the residual, so clustered roots are left
    as the eigen-solver produced them.
    """
    c = _trim(coeffs)
    if c.size == 2:
        return np.array([-c[0] / c[1]])
    r = np.linalg.eigvals(companion_matrix(c))
    for _ in range(polish_steps):
        p, dp = _horner(c, r)
        ok = dp != 0
        step = np.where(ok, p / np.where(ok, dp, 1), 0)
        cand = r - step
        better = np.abs(_horner(c, cand)[0]) <= np.abs(p)
        r = np.where(better, cand, r)
    return r


def taylor_coefficient(coeffs, j: int, x: complex) -> tuple[complex, float]:
    """``p^(j)(x)/j!`` and the magnitude scale of the terms summed to obtain it."""
    c = _trim(coeffs)
    val = 0j
    scale = 0.0
    ax = abs(x)
    for k in range(j, c.size):
        t = comb(k, j) * c[k] * x ** (k - j)
        val += t
        scale += comb(k, j) * abs(c[k]) * ax ** (k - j)
    return val, scale


def _deflate(c: np.ndarray, r: complex, m: int) -> np.ndarray:
    for _ in range(m):
        # synthetic division by (x - r), high-to-low
        hi = c[::-1]
        q = np.empty(hi.size - 1, dtype=complex)
        acc = 0j
        for i in range(hi.size - 1):
            acc = acc * r + hi[i]
            q[i] = acc
        c = q[::-1]
    return c


def root_multiplicities(coeffs, rel_tol: float = 1e-7) -> list[tuple[complex, int]]:
    """Distinct roots with multiplicities.

    Eigenvalue clusters of an m-fold root spread like eps**(1/m), so clustering
    raw roots cannot resolve high multiplicities in binary64.  Instead, for m
    from the degree downwards, each root r of p^(m-1) is tested for
    p^(j)(r) ~ 0, j < m - 1, at relative tolerance ``rel_tol``; an accepted
    root is divided out m times and the search restarts on the quotient.
    """
    c = _trim(coeffs)
    out: list[tuple[complex, int]] = []
    while c.size > 1:
        n = c.size - 1
        found = None
        for m in range(n, 0, -1):
            d = np.polynomial.polynomial.polyder(c, m - 1) if m > 1 else c
            for r in companion_roots(d):
                if all(abs(v) <= rel_tol * s for v, s in
                       (taylor_coefficient(c, j, r) for j in range(m - 1))):
                    found = (complex(r), m)
                    break
            if found:
                break
        r, m = found
        out.append((r, m))
        c = _deflate(c, r, m)
    return out
