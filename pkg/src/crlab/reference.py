"""Harmonic-polynomial comparison maps on the sphere and root profiles of degeneracy loci.

A :class:`MixedPoly` is a polynomial in ``w1, conj(w1), w3, conj(w3)``.  On the real
sphere w2 = conj(w1) and w4 = conj(w3), so the natural extension to C^4
just renames the antiholomorphic variables; the exponent tuples are shared
with :class:`~crlab.poly.SparsePoly4` in the order (w1, w2, w3, w4).
"""
from __future__ import annotations

import math
from contextlib import nullcontext

import mpmath
import numpy as np

from .fibers import noninjectivity_pair
from .maps import ImmersionMap
from .poly import DEFAULT_MAX_DEGREE, SparsePoly4, _Sparse4, apply_vector_field_L, to_uv, \
    uv_restrict_to_quadric
from .quadric import QuadricPoint
from .roots import root_multiplicities

SQRT3 = math.sqrt(3.0)


class NotHomogenizable(ValueError):
    """A component differs from the top degree by an odd amount."""


class MixedPoly(_Sparse4):
    """Polynomial in w1, conj(w1), w3, conj(w3); exponents (p1, q1, p3, q3)."""

    __slots__ = ()
    _names = ("w1", "cw1", "w3", "cw3")

    def evaluate_on(self, w1, w3):
        """Value at (w1, w3), with conjugates taken from the arguments."""
        w1 = np.asarray(w1)
        w3 = np.asarray(w3)
        return self.evaluate(np.stack(np.broadcast_arrays(w1, np.conj(w1), w3, np.conj(w3)),
                                      axis=-1))


def ar_operator(g: MixedPoly) -> MixedPoly:
    """conj(w1) d/dw3 - conj(w3) d/dw1 (holomorphic Wirtinger derivatives)."""
    out: dict = {}
    for (p1, q1, p3, q3), c in g.terms.items():
        if p3:
            k = (p1, q1 + 1, p3 - 1, q3)
            out[k] = out.get(k, 0) + p3 * c
        if p1:
            k = (p1 - 1, q1, p3, q3 + 1)
            out[k] = out.get(k, 0) - p1 * c
    return MixedPoly(out, max_degree=g.max_degree)


def wirtinger_laplacian(g: MixedPoly) -> MixedPoly:
    """d^2/dw1 dconj(w1) + d^2/dw3 dconj(w3); a quarter of the flat Laplacian on R^4."""
    out: dict = {}
    for (p1, q1, p3, q3), c in g.terms.items():
        if p1 and q1:
            k = (p1 - 1, q1 - 1, p3, q3)
            out[k] = out.get(k, 0) + p1 * q1 * c
        if p3 and q3:
            k = (p1, q1, p3 - 1, q3 - 1)
            out[k] = out.get(k, 0) + p3 * q3 * c
    return MixedPoly(out, max_degree=g.max_degree)


def is_harmonic(g: MixedPoly, rel_tol: float = 0.0) -> bool:
    lap = wirtinger_laplacian(g)
    return lap.max_abs_coefficient() <= rel_tol * max(1.0, g.max_abs_coefficient())


def sphere_norm_squared(max_degree: int = DEFAULT_MAX_DEGREE) -> MixedPoly:
    """|w1|^2 + |w3|^2, identically 1 on the sphere."""
    return MixedPoly({(1, 1, 0, 0): 1, (0, 0, 1, 1): 1}, max_degree=max_degree)


def homogenize_on_sphere(g: MixedPoly, d_max: int | None = None) -> MixedPoly:
    """Lift every homogeneous component to degree ``d_max`` with powers of |w1|^2 + |w3|^2.

    The smallest power that reaches ``d_max`` is used, so an odd degree gap
    cannot be bridged and raises :class:`NotHomogenizable`.
    """
    if g.is_zero():
        return g
    parts = g.homogeneous_components()
    top = max(parts) if d_max is None else d_max
    if top < max(parts):
        raise ValueError("d_max is below the degree of g")
    norm = sphere_norm_squared(max(g.max_degree, top))
    out = MixedPoly({}, max_degree=max(g.max_degree, top))
    for d, comp in parts.items():
        gap = top - d
        if gap % 2:
            raise NotHomogenizable(f"component of degree {d} is an odd distance from {top}")
        out = out + comp * norm ** (gap // 2)
    return out


def extend_to_quadric_coords(g: MixedPoly) -> SparsePoly4:
    """conj(w1) -> w2, conj(w3) -> w4."""
    return SparsePoly4(dict(g.terms), max_degree=g.max_degree)


def restrict_to_sphere(f: SparsePoly4) -> MixedPoly:
    """w2 -> conj(w1), w4 -> conj(w3); inverse of :func:`extend_to_quadric_coords`."""
    return MixedPoly(dict(f.terms), max_degree=f.max_degree)


# -- worked examples ----------------------------------------------------------

def ar_potential() -> MixedPoly:
    """(|w1|^4 - 4|w1|^2|w3|^2 + |w3|^4)/6 + i(|w3|^2 - |w1|^2)/2."""
    return MixedPoly({(2, 2, 0, 0): 1 / 6, (1, 1, 1, 1): -4 / 6, (0, 0, 2, 2): 1 / 6,
                      (0, 0, 1, 1): 0.5j, (1, 1, 0, 0): -0.5j})


def ar_sphere_polynomial() -> MixedPoly:
    """w3 cw1 cw3^2 - w1 cw1^2 cw3 + i cw1 cw3."""
    return MixedPoly({(0, 1, 1, 2): 1, (1, 2, 0, 1): -1, (0, 1, 0, 1): 1j})


def ar_quadric_polynomial() -> SparsePoly4:
    """(1 + i)(w2 w3 w4^2 + i w1 w2^2 w4)."""
    return SparsePoly4({(0, 1, 1, 2): 1 + 1j, (1, 2, 0, 1): (1 + 1j) * 1j})


def p1_harmonic_source() -> MixedPoly:
    """The sphere polynomial given as the harmonic origin of P_1.

    -(1/6) w3 cw1 cw3^2 + (1/6) w1 cw1^2 cw3 - i/(2 sqrt 3) cw1 cw3.  Its homogenised
    extension equals P_1 with (w1, w2) and (w3, w4) exchanged, not P_1 itself;
    see :func:`p1_harmonic_source_matching`.
    """
    return MixedPoly({(0, 1, 1, 2): -1 / 6, (1, 2, 0, 1): 1 / 6,
                      (0, 1, 0, 1): -1j / (2 * SQRT3)})


def p1_harmonic_source_matching() -> MixedPoly:
    """The harmonic sphere polynomial of the same shape whose homogenised extension is P_1.

    For a source  A w3 cw1 cw3^2 + B w1 cw1^2 cw3 + C cw1 cw3, harmonicity forces
    B = -A, and homogenising gives coefficients A + C on w2 w3 w4^2 and
    B + C on w1 w2^2 w4; matching P_1 fixes A = 1/6, B = -1/6, C = -i/(2 sqrt 3).
    """
    return MixedPoly({(0, 1, 1, 2): 1 / 6, (1, 2, 0, 1): -1 / 6,
                      (0, 1, 0, 1): -1j / (2 * SQRT3)})


def swap_pairs(f: SparsePoly4) -> SparsePoly4:
    """Exchange (w1, w2) with (w3, w4)."""
    return SparsePoly4({(e[2], e[3], e[0], e[1]): c for e, c in f.terms.items()},
                       max_degree=f.max_degree)


def provenance_pipeline(source: MixedPoly) -> SparsePoly4:
    return extend_to_quadric_coords(homogenize_on_sphere(source))


# -- degeneracy profile ---------------------------------------------------------

def degeneracy_polynomial(f: SparsePoly4, precision: int | None = None):
    """L(f) restricted to the quadric, as a polynomial in v = w3 w4.

    For polynomials with mpmath coefficients pass the working ``precision``
    (decimal digits); mpmath otherwise rounds every operation to its global
    default.
    """
    with mpmath.workdps(precision) if precision is not None else nullcontext():
        return uv_restrict_to_quadric(to_uv(apply_vector_field_L(f)))


def degeneracy_root_profile(f: SparsePoly4, rel_tol: float = 1e-7,
                            precision: int | None = None) -> list[tuple[complex, int]]:
    """Roots (in v = w3 w4) of the degeneracy polynomial of f, with multiplicities."""
    poly = degeneracy_polynomial(f, precision)
    return root_multiplicities(np.asarray(poly.coef, dtype=complex), rel_tol)


def noninjectivity_witness(m: ImmersionMap, t: float) -> tuple[QuadricPoint, QuadricPoint]:
    """Two distinct points of the level-t set with equal F_n-images, for t >= sqrt 2.

    Every term of P_n contains both w2 and w4, so P_n vanishes at both
    points and the images agree exactly.
    """
    return noninjectivity_pair(t)
