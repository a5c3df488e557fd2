"""Fibers of F_1 restricted to the quadric, and the b-plane inequality behind its injectivity.

Two quadric points with the same F_1-image share w1 and w3.  When both are
nonzero, the other point is w itself or one of two "siblings" whose w4 is
given in closed form; ``b = w3 w4`` and ``b_hat = w3 w4_hat`` are then related
by a fixed affine map.  If base and sibling both lay on the level set of
level t < sqrt(5)/2, b would sit in the domain D (an intersection of two
ellipses) with phi(b) < t^2 < 5/4, contradicting min_D phi = 5/4.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO

import numpy as np
from numpy.polynomial import Polynomial

from .config import DEFAULT_TOLERANCES, Tolerances
from .maps import ImmersionMap
from .quadric import QuadricPoint, level, quadric_residual, sample_level_array
from .report import VerificationReport
from .roots import companion_roots

SQRT3 = math.sqrt(3.0)
SQRT5_HALF = math.sqrt(5.0) / 2
OMEGA = complex(0.5, SQRT3 / 2)               # (1 + i sqrt 3) / 2
DEGENERATE_B = complex(0.5, 1 / (2 * SQRT3))  # 1/2 + i a_1
P1_COEF = complex(1 / 6, 1 / (2 * SQRT3))     # 1/6 + i/(2 sqrt 3)
SIGMA_RANGE = (-1 / (math.sqrt(15) + 3), 1 / (math.sqrt(15) - 3))
MINIMIZER = complex(5 / 8, SQRT3 / 8)
MIN_PHI = 1.25
# a closed form quoted for the lower bound of h; it equals neither h(1) nor H_RIGHT_ENDPOINT
STATED_H_CONSTANT = 918 * math.sqrt(15) - 3555


class StratumExcluded(ValueError):
    """w1 = 0 or w3 = 0: the fiber through w is the single point w."""


class SingularLocus(ValueError):
    """phi or its restrictions evaluated where a denominator vanishes."""


# -- siblings -----------------------------------------------------------------

def _check_generic(w: QuadricPoint):
    if w.w1 == 0 or w.w3 == 0:
        raise StratumExcluded("fiber is a single point when w1 = 0 or w3 = 0")


def sibling_w4_candidates(w: QuadricPoint) -> tuple[complex, complex]:
    _check_generic(w)
    b = w.w3 * w.w4
    c1 = -(1 + 1j * SQRT3) * (b - 1) / (2 * w.w3)
    c2 = -(1 - 1j * SQRT3) * (b - OMEGA) / (2 * w.w3)
    return c1, c2


def sibling_candidates_array(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w3, w4 = W[..., 2], W[..., 3]
    b = w3 * w4
    return (-(1 + 1j * SQRT3) * (b - 1) / (2 * w3),
            -(1 - 1j * SQRT3) * (b - OMEGA) / (2 * w3))


def fiber_cubic(w: QuadricPoint) -> Polynomial:
    """Cubic in w4_hat whose roots are w4 and the two sibling candidates.

    It is (w4_hat - w4) times the quadratic obtained by substituting
    w2 = (1 - w3 w4)/w1 into P_1(w_hat) = P_1(w); coefficients low to high.
    """
    _check_generic(w)
    w3, w4 = w.w3, w.w4
    k = complex(0.5, 1 / (2 * SQRT3))
    quad = Polynomial([k * w3 * w4 - w3 ** 2 * w4 ** 2 / 3 - P1_COEF,
                       k * w3 - w3 ** 2 * w4 / 3,
                       -w3 ** 2 / 3])
    return Polynomial([-w4, 1]) * quad


def fiber_bracket(w: QuadricPoint, w4_hat: complex) -> complex:
    """The quadratic factor of :func:`fiber_cubic` evaluated at ``w4_hat``."""
    q = fiber_cubic(w) // Polynomial([-w.w4, 1])
    return complex(q(w4_hat))


def cubic_roots(w: QuadricPoint) -> np.ndarray:
    """Roots of the fiber cubic from companion-matrix eigenvalues with a Newton polish."""
    return companion_roots(fiber_cubic(w).coef)


def complete_sibling(w: QuadricPoint, w4_hat: complex) -> QuadricPoint:
    if w.w1 == 0:
        raise StratumExcluded("completing a sibling needs w1 != 0")
    return QuadricPoint(w.w1, (1 - w.w3 * w4_hat) / w.w1, w.w3, complex(w4_hat))


def complete_sibling_array(W: np.ndarray, w4_hat: np.ndarray) -> np.ndarray:
    out = W.copy()
    out[..., 1] = (1 - W[..., 2] * w4_hat) / W[..., 0]
    out[..., 3] = w4_hat
    return out


def sibling_b_map(b: complex, branch: int) -> complex:
    """w3 * w4_hat as a function of b = w3 w4 for the two sibling branches."""
    if branch == 1:
        return -(1 + 1j * SQRT3) * (b - 1) / 2
    if branch == 2:
        return 1 - (1 - 1j * SQRT3) * b / 2
    raise ValueError("branch must be 1 or 2")


@dataclass
class FiberResult:
    base: QuadricPoint
    siblings: list[QuadricPoint] = field(default_factory=list)
    sibling_levels: list[float] = field(default_factory=list)
    distinct: bool = True


def fiber(w: QuadricPoint, *, rel_tol: float = DEFAULT_TOLERANCES.fiber_roots_rel) -> FiberResult:
    """The fiber of F_1 through w: the base point plus up to two siblings."""
    if w.w1 == 0 or w.w3 == 0:
        return FiberResult(w)
    sibs = [complete_sibling(w, c) for c in sibling_w4_candidates(w)]
    w4s = [w.w4] + [s.w4 for s in sibs]
    scale = max(1.0, *(abs(z) for z in w4s))
    distinct = all(abs(w4s[i] - w4s[j]) > rel_tol * scale
                   for i in range(3) for j in range(i + 1, 3))
    return FiberResult(w, sibs, [s.level for s in sibs], distinct)


# -- b-plane domain -------------------------------------------------------------

@dataclass(frozen=True)
class EllipseDomain:
    """D = E1 ∩ E2 with E1 = {|b-1| + |b| < s}, E2 = {|b-1| + |b - omega| < s}."""

    sum_bound: float = SQRT5_HALF
    margin: float = DEFAULT_TOLERANCES.domain_margin
    foci1: tuple[complex, complex] = (0j, 1 + 0j)
    foci2: tuple[complex, complex] = (1 + 0j, OMEGA)

    def focal_sums(self, b):
        b = np.asarray(b, dtype=complex)
        s1 = np.abs(b - self.foci1[0]) + np.abs(b - self.foci1[1])
        s2 = np.abs(b - self.foci2[0]) + np.abs(b - self.foci2[1])
        return s1, s2

    def contains(self, b):
        """Strict membership with margin; points within the margin of the boundary are excluded."""
        s1, s2 = self.focal_sums(b)
        return (s1 < self.sum_bound - self.margin) & (s2 < self.sum_bound - self.margin)

    def classify(self, b) -> str:
        s1, s2 = (float(x) for x in self.focal_sums(b))
        worst = max(s1, s2) - self.sum_bound
        if worst < -self.margin:
            return "inside"
        if worst <= self.margin:
            return "boundary"
        return "outside"

    bounding_box = ((-0.2, 1.2), (-0.1, 1.0))

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        (x0, x1), (y0, y1) = self.bounding_box
        out = np.empty(0, dtype=complex)
        while out.size < count:
            k = 4 * (count - out.size) + 64
            cand = rng.uniform(x0, x1, k) + 1j * rng.uniform(y0, y1, k)
            out = np.concatenate([out, cand[self.contains(cand)]])
        return out[:count]


DOMAIN = EllipseDomain()


# -- phi and its restrictions ---------------------------------------------------

def _phi_parts(b):
    b = np.asarray(b, dtype=complex)
    b1, b2 = b.real, b.imag
    num = b1 - SQRT3 * b2
    den = 2 * b1 - 1
    return b, num, den


def phi_array(b) -> np.ndarray:
    """phi on an array; NaN where a denominator vanishes."""
    b, num, den = _phi_parts(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (num / den + 1) * (np.abs(b - 1) ** 2 * den / num + np.abs(b) ** 2)
    return np.where((num == 0) | (den == 0), np.nan, val)


def phi(b) -> float:
    """phi(b) = ((b1 - sqrt3 b2)/(2 b1 - 1) + 1) * (|b-1|^2 (2 b1 - 1)/(b1 - sqrt3 b2) + |b|^2)."""
    _, num, den = _phi_parts(b)
    if np.any(num == 0) or np.any(den == 0):
        raise SingularLocus("phi is undefined on the lines 2 b1 = 1 and b1 = sqrt3 b2")
    val = phi_array(b)
    return float(val) if np.ndim(val) == 0 else val


def segment_point(sigma):
    """Point of the line b1 + sqrt3 b2 = 1 with parameter sigma."""
    return complex(-3, SQRT3) * np.asarray(sigma) / 8 + 1


def orthogonal_point(sigma0, tau):
    return complex(1, SQRT3) * np.asarray(tau) / 2 + segment_point(sigma0)


def sigma_in_range(sigma) -> bool:
    return bool(SIGMA_RANGE[0] < sigma < SIGMA_RANGE[1])


def phi_hat(sigma):
    """phi along the segment: (3 sigma^2 - 6 sigma + 8) / 4."""
    s = np.asarray(sigma, dtype=float)
    val = (3 * s * s - 6 * s + 8) / 4
    return float(val) if val.ndim == 0 else val


def phi_hat_orth(sigma0, tau):
    """phi along the line through segment_point(sigma0) orthogonal to the segment."""
    s = np.asarray(sigma0, dtype=float)
    t = np.asarray(tau, dtype=float)
    den = 4 * ((4 - 3 * s) ** 2 - 16 * t * t)
    if np.any(den == 0):
        raise SingularLocus("denominator (4 - 3 sigma0)^2 - 16 tau^2 vanishes")
    val = (4 - 3 * s) * ((32 - 48 * s) * t * t - 9 * s ** 3 + 30 * s ** 2 - 48 * s + 32) / den
    return float(val) if val.ndim == 0 else val


def phi_hat_orth_dtau(sigma0, tau):
    """tau-derivative of :func:`phi_hat_orth`, 32 (4 - 3 s) h(s) tau / ((4 - 3 s)^2 - 16 tau^2)^2."""
    s = np.asarray(sigma0, dtype=float)
    t = np.asarray(tau, dtype=float)
    val = 32 * (4 - 3 * s) * h_poly(s) * t / ((4 - 3 * s) ** 2 - 16 * t * t) ** 2
    return float(val) if val.ndim == 0 else val


def h_poly(sigma):
    s = np.asarray(sigma, dtype=float)
    val = -9 * s ** 3 + 30 * s ** 2 - 36 * s + 16
    return float(val) if val.ndim == 0 else val


def h_prime(sigma):
    s = np.asarray(sigma, dtype=float)
    val = -27 * s ** 2 + 60 * s - 36
    return float(val) if val.ndim == 0 else val


H_RIGHT_ENDPOINT = (45 - 11 * math.sqrt(15)) / 4


# -- minimisation over D ----------------------------------------------------------

def _parabolic_step(f, x, h):
    fm, f0, fp = f(x - h), f(x), f(x + h)
    curv = fm - 2 * f0 + fp
    if not np.isfinite(curv) or curv <= 0:
        return x if f0 <= min(fm, fp) else (x - h if fm < fp else x + h)
    step = h * (fm - fp) / (2 * curv)
    return x + max(-h, min(h, step))


def min_phi_over_D(grid: int = 2001, refine_iters: int = 50,
                   domain: EllipseDomain = DOMAIN) -> tuple[float, complex]:
    """Grid search over the bounding box of D followed by coordinate-wise parabolic refinement."""
    if grid < 101:
        raise ValueError("grid must be at least 101")
    (x0, x1), (y0, y1) = domain.bounding_box
    xs = np.linspace(x0, x1, grid)
    ys = np.linspace(y0, y1, grid)
    best, arg = np.inf, 0j
    for y in ys:  # row-wise keeps memory flat for large grids
        row = xs + 1j * y
        inside = domain.contains(row)
        if not inside.any():
            continue
        vals = phi_array(row[inside])
        k = int(np.nanargmin(vals))
        if vals[k] < best:
            best, arg = float(vals[k]), complex(row[inside][k])

    def f_at(b):
        return float(phi_array(b)) if domain.contains(b) else np.inf

    h = max(xs[1] - xs[0], ys[1] - ys[0])
    b = arg
    for _ in range(refine_iters):
        re = _parabolic_step(lambda x: f_at(complex(x, b.imag)), b.real, h)
        b = complex(re, b.imag)
        im = _parabolic_step(lambda y: f_at(complex(b.real, y)), b.imag, h)
        b = complex(b.real, im)
        h = max(h * 0.5, 1e-6)
    val = f_at(b)
    if val <= best:
        best, arg = val, b
    return best, arg


def phi_grid(resolution: int, what: str = "phi", domain: EllipseDomain = DOMAIN):
    """Rows (b_re, b_im, in_D, phi-or-None) over the bounding box, row-major in b_im."""
    if resolution < 101:
        raise ValueError("resolution must be at least 101")
    if what not in ("phi", "D"):
        raise ValueError("what must be 'phi' or 'D'")
    (x0, x1), (y0, y1) = domain.bounding_box
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    for y in ys:
        row = xs + 1j * y
        inside = domain.contains(row)
        vals = phi_array(row) if what == "phi" else None
        for k, b in enumerate(row):
            v = None
            if vals is not None and inside[k] and np.isfinite(vals[k]):
                v = float(vals[k])
            yield float(b.real), float(b.imag), int(inside[k]), v


def write_grid_csv(resolution: int, fh: IO[str], what: str = "phi") -> int:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["b_re", "b_im", "in_D", "phi"])
    count = 0
    for re, im, ind, v in phi_grid(resolution, what):
        writer.writerow([repr(re), repr(im), ind, "" if v is None else repr(v)])
        count += 1
    return count


# -- collisions ------------------------------------------------------------------

def noninjectivity_pair(t: float) -> tuple[QuadricPoint, QuadricPoint]:
    """(u, 1/u, u, 0) and (u, 0, u, 1/u) with 2u^2 + 1/u^2 = 2t, larger u."""
    if t < math.sqrt(2) * (1 - 1e-15):
        raise ValueError("2u^2 + 1/u^2 >= 2 sqrt 2, so t must be at least sqrt 2")
    u2 = (t + math.sqrt(max(t * t - 2, 0.0))) / 2
    u = math.sqrt(u2)
    return (QuadricPoint(complex(u), complex(1 / u), complex(u), 0j),
            QuadricPoint(complex(u), 0j, complex(u), complex(1 / u)))


def injectivity_scan(m: ImmersionMap, t: float, samples: int = 1000, seed: int = 0, *,
                     tolerances: Tolerances = DEFAULT_TOLERANCES) -> VerificationReport:
    """Look for siblings of sampled level-t points that land on the same level.

    For t < sqrt(5)/2 every gap |t_hat - t| must exceed the level-gap
    threshold; for t >= sqrt(2) the explicit collision pair is also checked.
    """
    if m.n != 1:
        raise ValueError("closed-form siblings are available for F_1 only")
    if not t > 1:
        raise ValueError("t must exceed 1")
    rep = VerificationReport(f"injectivity[t={t!r}]",
                             config={"t": t, "samples": samples, "seed": seed,
                                     "tolerances": tolerances.as_dict()})
    W = sample_level_array(t, samples, seed, boundary_prob=0.0, y_root="random")
    c1, c2 = sibling_candidates_array(W)
    gaps = []
    for c in (c1, c2):
        S = complete_sibling_array(W, c)
        gaps.append(np.abs(level(S) - t))
    gaps = np.concatenate(gaps)
    k = int(np.argmin(gaps))
    min_gap = float(gaps[k])
    witness = {"min_gap": min_gap, "base": W[k % samples], "branch": 1 + k // samples}
    if t < SQRT5_HALF:
        rep.add("level_gaps_positive", "F_1 injective on M_t for 1 < t < sqrt(5)/2",
                min_gap > tolerances.level_gap, min_gap - tolerances.level_gap, witness)
    else:
        rep.add("level_gaps_positive", "F_1 injective on M_t for 1 < t < sqrt(5)/2", None,
                min_gap, witness)
    if t >= math.sqrt(2):
        w, w2 = noninjectivity_pair(t)
        a, b = m.image(w.coords), m.image(w2.coords)
        same = all(complex(x) == complex(y) for x, y in zip(a, b))
        lv = max(abs(w.level - t), abs(w2.level - t))
        rep.add("collision_pair", "F_n not injective on M_t for t >= sqrt 2",
                same and lv <= 1e-12 and w != w2, lv,
                {"w": w.coords, "w_prime": w2.coords, "image": a})
    return rep
