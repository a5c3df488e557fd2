"""Points of the quadric w1 w2 + w3 w4 = 1, its level sets, and nondegeneracy tests.

The level of a point is ``(|w1|^2 + |w2|^2 + |w3|^2 + |w4|^2) / 2``; it is at
least 1 on the quadric, with equality exactly on the real sphere
``w2 = conj(w1), w4 = conj(w3)``.  The level sets of level t > 1 are the
hypersurfaces M_t.

Arrays of points use a trailing axis of length 4.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np
from scipy.optimize import minimize_scalar

from .maps import ImmersionMap
from .poly import SparsePoly4, apply_vector_field_L


class Infeasible(ValueError):
    """No quadric point has the requested product, level and |w1|^2."""


class NoWitnessBelowThreshold(ValueError):
    """Below t_n the map F_n has no degenerate point on the level set."""


def quadric_residual(w) -> np.ndarray | float:
    w = np.asarray(w, dtype=complex)
    return np.abs(w[..., 0] * w[..., 1] + w[..., 2] * w[..., 3] - 1)


def level(w) -> np.ndarray | float:
    w = np.asarray(w, dtype=complex)
    return np.sum(np.abs(w) ** 2, axis=-1) / 2


@dataclass(frozen=True)
class QuadricPoint:
    w1: complex
    w2: complex
    w3: complex
    w4: complex

    @classmethod
    def from_array(cls, w) -> "QuadricPoint":
        return cls(*(complex(x) for x in np.asarray(w, dtype=complex).ravel()))

    @property
    def w(self) -> np.ndarray:
        return np.array([self.w1, self.w2, self.w3, self.w4], dtype=complex)

    @property
    def coords(self) -> tuple[complex, complex, complex, complex]:
        return (self.w1, self.w2, self.w3, self.w4)

    @property
    def quadric_residual(self) -> float:
        return abs(self.w1 * self.w2 + self.w3 * self.w4 - 1)

    @property
    def level(self) -> float:
        return (abs(self.w1) ** 2 + abs(self.w2) ** 2 + abs(self.w3) ** 2 + abs(self.w4) ** 2) / 2

    @property
    def v(self) -> complex:
        """The product w3 w4."""
        return self.w3 * self.w4

    def on_quadric(self, tol: float = 1e-10) -> bool:
        return self.quadric_residual <= tol


def z_to_w(z) -> np.ndarray:
    """(z1..z4) with sum z_j^2 = 1  ->  (z1 + i z2, z1 - i z2, z3 + i z4, z3 - i z4)."""
    z = np.asarray(z, dtype=complex)
    return np.stack([z[..., 0] + 1j * z[..., 1], z[..., 0] - 1j * z[..., 1],
                     z[..., 2] + 1j * z[..., 3], z[..., 2] - 1j * z[..., 3]], axis=-1)


def w_to_z(w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    return np.stack([(w[..., 0] + w[..., 1]) / 2, (w[..., 0] - w[..., 1]) / 2j,
                     (w[..., 2] + w[..., 3]) / 2, (w[..., 2] - w[..., 3]) / 2j], axis=-1)


# -- sampling -----------------------------------------------------------------

def g_min(p: float) -> tuple[float, float]:
    """Minimum value and minimiser of x + p/x over x > 0."""
    if not p > 0:
        raise ValueError("p must be positive")
    r = math.sqrt(p)
    return 2 * r, r


def _larger_root(s, q):
    """Larger root of y^2 - s y + q = 0 (q >= 0, s^2 >= 4q up to rounding)."""
    disc = np.sqrt(np.maximum(s * s - 4 * q, 0.0))
    return (s + disc) / 2


def _y_from_x(v, t, x, root):
    s = 2 * t - x - np.abs(1 - v) ** 2 / x
    q = np.abs(v) ** 2
    y_hi = _larger_root(s, q)
    if isinstance(root, str):
        root = np.full(np.shape(y_hi), root == "smaller")
    y_lo = np.where(y_hi > 0, q / np.where(y_hi > 0, y_hi, 1), 0)
    return np.where(root, y_lo, y_hi), s, q


def x_interval(v: complex, t: float) -> tuple[float, float]:
    """Feasible range of |w1|^2 for quadric points with w3 w4 = v on level t."""
    c = 2 * t - 2 * abs(v)
    p = abs(1 - v) ** 2
    disc = c * c - 4 * p
    if c < 0 or disc < -1e-12 * max(1.0, c * c):
        raise Infeasible(f"|1-v| + |v| = {abs(1 - v) + abs(v):.12g} exceeds t = {t:.12g}")
    d = math.sqrt(max(disc, 0.0))
    return (c - d) / 2, (c + d) / 2


def lift_from_v(v: complex, t: float, x: float, phase1: float = 0.0, phase3: float = 0.0,
                *, root: str = "larger", tol: float = 1e-12) -> QuadricPoint:
    """Quadric point with w3 w4 = v, level t and |w1|^2 = x.

    |w3|^2 = y solves y + |v|^2/y = 2t - x - |1-v|^2/x; ``root`` picks the
    larger (default) or smaller solution.
    """
    v = complex(v)
    lo, hi = x_interval(v, t)
    span = max(hi, 1.0)
    if not (lo - tol * span <= x <= hi + tol * span) or x <= 0:
        raise Infeasible(f"|w1|^2 = {x!r} outside feasible interval [{lo!r}, {hi!r}]")
    y, s, q = _y_from_x(v, t, x, root)
    y = float(y)
    if s < 2 * math.sqrt(q) - tol * max(1.0, s) or (y == 0 and v != 0):
        raise Infeasible("no |w3|^2 solves the level equation")
    w1 = math.sqrt(x) * complex(math.cos(phase1), math.sin(phase1))
    w3 = math.sqrt(y) * complex(math.cos(phase3), math.sin(phase3))
    if w3 == 0:
        raise Infeasible("w3 = 0 needs v = 0 and an explicit w4")
    return QuadricPoint(w1, (1 - v) / w1, w3, v / w3)


def _unit_phase(theta):
    return np.cos(theta) + 1j * np.sin(theta)


def sample_sphere_array(count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points of the real sphere S^3, in w-coordinates."""
    z = rng.standard_normal((count, 4))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z_to_w(z)


def sample_v_in_ellipse(t: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples of {|v| + |1-v| <= t} by rejection from the bounding box."""
    A = t / 2
    B = math.sqrt(max(t * t - 1, 0.0)) / 2
    out = np.empty(0, dtype=complex)
    while out.size < count:
        k = max(2 * (count - out.size), 64)
        cand = 0.5 + A * rng.uniform(-1, 1, k) + 1j * B * rng.uniform(-1, 1, k)
        keep = cand[np.abs(cand) + np.abs(1 - cand) <= t]
        out = np.concatenate([out, keep])
    return out[:count]


def _boundary_stratum(t, count, rng, which):
    """Points with w1 = 0 (which=1, forcing w3 w4 = 1) or w3 = 0 (which=3, forcing w1 w2 = 1)."""
    # |w_a|^2 = y with y + 1/y <= 2t; the remaining coordinate takes the slack.
    r = math.sqrt(max(t * t - 1, 0.0))
    lo, hi = t - r, t + r
    y = rng.uniform(lo, hi, count)
    slack = np.sqrt(np.maximum(2 * t - y - 1 / y, 0.0))
    ph = rng.uniform(0, 2 * np.pi, (count, 2))
    a = np.sqrt(y) * _unit_phase(ph[:, 0])
    free = slack * _unit_phase(ph[:, 1])
    zero = np.zeros(count, dtype=complex)
    if which == 1:
        return np.stack([zero, free, a, 1 / a], axis=-1)
    return np.stack([a, 1 / a, zero, free], axis=-1)


def sample_level_array(t: float, count: int, seed: int, *, boundary_prob: float = 0.05,
                       y_root: str = "larger", eps_feas: float = 1e-9) -> np.ndarray:
    """``count`` points of the level set of level t, as a (count, 4) array.

    Generic points: v = w3 w4 uniform in the ellipse {|v| + |1-v| <= t - eps},
    |w1|^2 uniform in its feasible interval, |w3|^2 from the level equation
    (``y_root`` is "larger", "smaller" or "random"), independent uniform
    phases.  With probability ``boundary_prob`` each, a point is drawn from
    the strata w1 = 0 or w3 = 0 instead.  t = 1 samples the real sphere.
    """
    if t < 1:
        raise Infeasible("the level of a quadric point is at least 1")
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    if t == 1:
        return sample_sphere_array(count, rng)
    kind = rng.choice(3, size=count, p=[1 - 2 * boundary_prob, boundary_prob, boundary_prob])
    out = np.empty((count, 4), dtype=complex)
    gen = np.flatnonzero(kind == 0)
    if gen.size:
        out[gen] = _generic_points(t, gen.size, rng, y_root, min(eps_feas, (t - 1) / 2))
    for which, label in ((1, 1), (3, 2)):
        idx = np.flatnonzero(kind == label)
        if idx.size:
            out[idx] = _boundary_stratum(t, idx.size, rng, which)
    return out


def _generic_points(t, count, rng, y_root, eps):
    v = sample_v_in_ellipse(t - eps, count, rng)
    c = 2 * t - 2 * np.abs(v)
    p = np.abs(1 - v) ** 2
    d = np.sqrt(np.maximum(c * c - 4 * p, 0.0))
    lo, hi = (c - d) / 2, (c + d) / 2
    x = lo + (hi - lo) * rng.uniform(0, 1, count)
    x = np.clip(x, np.maximum(lo, 1e-300), hi)
    if y_root == "random":
        pick = rng.uniform(0, 1, count) < 0.5
    else:
        pick = y_root == "smaller"
    y, _, _ = _y_from_x(v, t, x, pick)
    ph = rng.uniform(0, 2 * np.pi, (count, 2))
    w1 = np.sqrt(x) * _unit_phase(ph[:, 0])
    w3 = np.sqrt(y) * _unit_phase(ph[:, 1])
    return np.stack([w1, (1 - v) / w1, w3, v / w3], axis=-1)


def sample_level(t: float, count: int, seed: int, **kw) -> list[QuadricPoint]:
    return [QuadricPoint.from_array(row) for row in sample_level_array(t, count, seed, **kw)]


# -- nondegeneracy ----------------------------------------------------------

def jacobian_criterion(f: SparsePoly4, w):
    """w3 df/dw2 - w1 df/dw4 at w; nonzero iff (w1, w3, f) is nondegenerate on the quadric there."""
    if isinstance(w, QuadricPoint):
        w = w.coords
    return apply_vector_field_L(f).evaluate(w)


def chart_jacobians(f: SparsePoly4, w: QuadricPoint) -> tuple[complex | None, complex | None]:
    """Jacobians of the third component in the charts (w1, w3, w4) and (w1, w2, w3).

    A chart whose dividing coordinate vanishes at w is reported as ``None``.
    """
    f2 = complex(f.partial(2).evaluate(w.coords))
    f4 = complex(f.partial(4).evaluate(w.coords))
    j1 = -(w.w3 / w.w1) * f2 + f4 if w.w1 != 0 else None
    j2 = -f2 + (w.w1 / w.w3) * f4 if w.w3 != 0 else None
    return j1, j2


def degenerate_witness(m: ImmersionMap, t: float, *, rel_tol: float = 1e-12) -> QuadricPoint:
    """A point of the level-t set where F_n degenerates, for t >= t_n.

    Uses |w1|^2 = |w3|^2 = x0, the larger root of x + p/x = t with
    p = 1/4 + a_n^2, and w1 w2 = 1/2 - i a_n, w3 w4 = 1/2 + i a_n.
    """
    p = 0.25 + m.a ** 2
    if t < m.t_threshold * (1 - rel_tol):
        raise NoWitnessBelowThreshold(f"t = {t!r} is below t_n = {m.t_threshold!r}")
    x0 = (t + math.sqrt(max(t * t - 4 * p, 0.0))) / 2
    r = math.sqrt(x0)
    c = m.center
    return QuadricPoint(complex(r), c.conjugate() / r, complex(r), c / r)


def ellipse_distance(c: complex, t: float) -> float:
    """Distance from c to the closed region {|v| + |1-v| <= t} (0 if c lies inside)."""
    if abs(c) + abs(1 - c) <= t:
        return 0.0
    A = t / 2
    B = math.sqrt(max(t * t - 1, 0.0)) / 2

    def dist(th):
        return abs(complex(0.5 + A * math.cos(th), B * math.sin(th)) - c)

    grid = np.linspace(-np.pi, np.pi, 721)
    k = int(np.argmin([dist(g) for g in grid]))
    h = grid[1] - grid[0]
    res = minimize_scalar(dist, bounds=(grid[k] - h, grid[k] + h), method="bounded",
                          options={"xatol": 1e-13})
    return float(min(res.fun, dist(grid[k])))


# -- export -------------------------------------------------------------------

POINT_COLUMNS = ["w1_re", "w1_im", "w2_re", "w2_im", "w3_re", "w3_im", "w4_re", "w4_im",
                 "quadric_residual", "level"]


def write_points_csv(points: Iterable[QuadricPoint] | np.ndarray, fh: IO[str]) -> None:
    arr = points if isinstance(points, np.ndarray) else np.array([p.w for p in points])
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(POINT_COLUMNS)
    for row, res, lev in zip(arr, quadric_residual(arr), level(arr)):
        vals = []
        for z in row:
            vals += [repr(float(z.real)), repr(float(z.imag))]
        writer.writerow(vals + [repr(float(res)), repr(float(lev))])


def read_points_csv(fh: IO[str]) -> np.ndarray:
    rows = list(csv.DictReader(fh))
    return np.array([[complex(float(r[f"w{k}_re"]), float(r[f"w{k}_im"])) for k in range(1, 5)]
                     for r in rows], dtype=complex)
