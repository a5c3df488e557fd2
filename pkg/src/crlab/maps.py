"""The immersion maps F_n = (w1, w3, P_n) and their defining identities.

For each n >= 1 the constant ``a_n`` is chosen so that ``Re (1/2 + i a_n)^(2n+1) = 0``;
then ``P_n`` solves ``w3 dP/dw2 - w1 dP/dw4 = R_n`` on all of C^4 with

    R_n = ((1/2 + i a_n) w1 w2 - (1/2 - i a_n) w3 w4)^(2n),

whose restriction to the quadric is ``(w3 w4 - (1/2 + i a_n))^(2n)``.  It vanishes
on the level set of level t only if ``t >= t_n = 2 sqrt(1/4 + a_n^2)``.
"""
from __future__ import annotations

import json
import math
from contextlib import nullcontext
from dataclasses import dataclass
from math import comb
from typing import Any, Sequence

import mpmath

from .config import DEFAULT_TOLERANCES, Tolerances
from .poly import SparsePoly4, apply_vector_field_L, to_uv, uv_restrict_to_quadric
from .report import VerificationReport


class ConstructionError(RuntimeError):
    """The two recursions for the coefficients of P_n disagree."""


def branch_index(n: int) -> int:
    """Largest integer strictly less than n/2."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return (n + 1) // 2 - 1


def branch_angle(n: int, precision: int | None = None):
    """arg(1/2 + i a_n) = (pi/2 + 2 pi K) / (2n + 1)."""
    K = branch_index(n)
    if precision is None:
        return (math.pi / 2 + 2 * math.pi * K) / (2 * n + 1)
    with mpmath.workdps(precision):
        return (mpmath.pi / 2 + 2 * mpmath.pi * K) / (2 * n + 1)


def compute_a(n: int, precision: int | None = None) -> tuple[Any, int]:
    """Return ``(a_n, K)``; ``precision`` (decimal digits) switches to mpmath."""
    K = branch_index(n)
    theta = branch_angle(n, precision)
    if precision is None:
        return math.tan(theta) / 2, K
    with mpmath.workdps(precision):
        return mpmath.tan(theta) / 2, K


def compute_t(n: int) -> float:
    a, _ = compute_a(n)
    return 2 * math.sqrt(0.25 + a * a)


def _center(a, precision):
    if precision is None:
        return complex(0.5, a)
    return mpmath.mpc(mpmath.mpf(1) / 2, a)


def expansion_coefficients(n: int, c) -> list:
    """Coefficients r_k of u^k v^(2n-k) in R_n, for k = 0..2n (c = 1/2 + i a_n)."""
    cb = c.conjugate()
    return [(-1) ** k * comb(2 * n, k) * c ** k * cb ** (2 * n - k) for k in range(2 * n + 1)]


def alpha_coefficients(n: int, a, *, tol: float = DEFAULT_TOLERANCES.construction_rel,
                       precision: int | None = None) -> list:
    """alpha_1 .. alpha_{2n}, filled from both ends and matched in the middle.

    Comparing coefficients of u^k v^(2n-k) in L(P_n) and R_n gives

        (k+1) alpha_{2n-k} - (2n-k+1) alpha_{2n-k+1} = r_k,   k = 1..2n-1,

    with alpha_{2n} = r_0 and alpha_1 = -r_{2n}.  The k < n equations are
    solved starting from alpha_{2n}, the k > n ones starting from alpha_1, and
    the remaining k = n equation is checked.
    """
    ctx = mpmath.workdps(precision) if precision is not None else nullcontext()
    with ctx:
        c = _center(a, precision)
        r = expansion_coefficients(n, c)
        alpha: list[Any] = [None] * (2 * n + 1)  # 1-based
        alpha[2 * n] = r[0]
        alpha[1] = -r[2 * n]
        for k in range(1, n):
            alpha[2 * n - k] = (r[k] + (2 * n - k + 1) * alpha[2 * n - k + 1]) / (k + 1)
        for m in range(1, n):
            # equation k = 2n - m, solved for alpha_{m+1}
            alpha[m + 1] = ((2 * n - m + 1) * alpha[m] - r[2 * n - m]) / (m + 1)
        mismatch = (n + 1) * (alpha[n] - alpha[n + 1]) - r[n]
        scale = max(abs(x) for x in r)
        if abs(mismatch) > tol * scale:
            raise ConstructionError(
                f"middle coefficient mismatch {float(abs(mismatch) / scale):.3e} for n={n}")
        return alpha[1:]


def alpha_n_plus_1_closed_form(n: int, a) -> complex:
    c = complex(0.5, a)
    cb = c.conjugate()
    s = sum((-1) ** l * c ** l * cb ** (2 * n - l) for l in range(n))
    return comb(2 * n, n - 1) * s / n


def alpha_n_closed_form(n: int, a) -> complex:
    c = complex(0.5, a)
    cb = c.conjugate()
    s = sum((-1) ** l * c ** (2 * n - l) * cb ** l for l in range(n))
    return -comb(2 * n, n + 1) * s / n


def build_R(n: int, a, precision: int | None = None) -> SparsePoly4:
    cap = max(64, 4 * n)
    ctx = mpmath.workdps(precision) if precision is not None else nullcontext()
    with ctx:
        c = _center(a, precision)
        base = SparsePoly4({(1, 1, 0, 0): c, (0, 0, 1, 1): -c.conjugate()}, max_degree=cap)
        return base ** (2 * n)


def build_P(n: int, alpha: Sequence) -> SparsePoly4:
    if len(alpha) != 2 * n:
        raise ValueError("need 2n coefficients")
    terms = {(2 * n - k, 2 * n - k + 1, k - 1, k): alpha[k - 1] for k in range(1, 2 * n + 1)}
    return SparsePoly4(terms, max_degree=max(64, 4 * n))


@dataclass(frozen=True)
class ImmersionMap:
    """F_n = (w1, w3, P_n) together with the data used to build it."""

    n: int
    a: float
    t_threshold: float
    K: int
    alpha: tuple
    P: SparsePoly4
    R: SparsePoly4

    @property
    def center(self) -> complex:
        """The root 1/2 + i a_n of the restricted R_n, as a function of w3 w4."""
        return complex(0.5, self.a)

    def image(self, w):
        """F_n at ``w`` (four scalars, or an array with trailing axis 4)."""
        if isinstance(w, (list, tuple)):
            return (w[0], w[2], self.P.evaluate(w))
        return (w[..., 0], w[..., 2], self.P.evaluate(w))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "a": float(self.a),
            "t_threshold": float(self.t_threshold),
            "K": self.K,
            "alpha": [{"re": complex(x).real, "im": complex(x).imag} for x in self.alpha],
            "P": self.P.to_dict(),
            "R": self.R.to_dict(),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "ImmersionMap":
        cap = max(64, 4 * int(d["n"]))
        return cls(
            n=int(d["n"]), a=float(d["a"]), t_threshold=float(d["t_threshold"]), K=int(d["K"]),
            alpha=tuple(complex(x["re"], x["im"]) for x in d["alpha"]),
            P=SparsePoly4.from_dict(d["P"], max_degree=cap),
            R=SparsePoly4.from_dict(d["R"], max_degree=cap),
        )

    @classmethod
    def from_json(cls, text: str) -> "ImmersionMap":
        return cls.from_dict(json.loads(text))


def build_immersion(n: int, *, precision: int | None = None,
                    tol: float = DEFAULT_TOLERANCES.construction_rel) -> ImmersionMap:
    """Assemble F_n.

    With ``precision`` set, a_n, the alphas, P_n and R_n are computed with
    mpmath at that many decimal digits; ``a`` and ``t_threshold`` are always
    stored as floats.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    a, K = compute_a(n, precision)
    alpha = alpha_coefficients(n, a, tol=tol, precision=precision)
    P = build_P(n, alpha)
    R = build_R(n, a, precision)
    af = float(a)
    return ImmersionMap(n=n, a=af, t_threshold=2 * math.sqrt(0.25 + af * af), K=K,
                        alpha=tuple(alpha), P=P, R=R)


def pde_residual(m: ImmersionMap) -> float:
    """max |coef(L(P_n) - R_n)| / max |coef R_n|."""
    return apply_vector_field_L(m.P).coefficient_residual(m.R)


def arg_condition_residual(n: int, a=None) -> float:
    """|Re c^(2n+1)| / |c|^(2n+1) for c = 1/2 + i a_n."""
    if a is None:
        a, _ = compute_a(n)
    z = complex(0.5, float(a)) ** (2 * n + 1)
    return abs(z.real) / abs(z)


def restricted_R_residual(m: ImmersionMap, precision: int | None = None) -> float:
    """Coefficient distance between L(P_n) on the quadric and (v - c)^(2n).

    Substituting u = 1 - v cancels terms of size ~ binom(2n, k) |c|^(2n), so
    in binary64 this loses roughly n decimal digits' worth of accuracy past
    n ~ 10; maps built with ``precision`` keep their mpmath coefficients and
    the comparison is then carried out at that precision.
    """
    ctx = mpmath.workdps(precision) if precision is not None else nullcontext()
    with ctx:
        got = list(uv_restrict_to_quadric(to_uv(apply_vector_field_L(m.P))).coef)
        c = m.center if precision is None else _center(compute_a(m.n, precision)[0], precision)
        want = [comb(2 * m.n, k) * (-c) ** (2 * m.n - k) for k in range(2 * m.n + 1)]
        scale = max(abs(x) for x in want)
        return float(max(abs(g - w) for g, w in zip(got, want)) / scale)


def divergence_probe(bound: float, n_max: int = 40) -> int | None:
    """Smallest n <= n_max with t_n > bound, or None."""
    for n in range(1, n_max + 1):
        if compute_t(n) > bound:
            return n
    return None


def verify_construction(m: ImmersionMap | Sequence[ImmersionMap], *,
                        tolerances: Tolerances = DEFAULT_TOLERANCES,
                        divergence_bound: float | None = None) -> VerificationReport:
    """Check the defining identities of one map, or of a batch of maps.

    Per map: the coefficient residual of L(P_n) - R_n, the argument
    condition, homogeneity of degree 4n and the threshold formula.  For a
    batch with ``divergence_bound`` set, also records whether some map in it
    has ``t_n > divergence_bound``.
    """
    maps = [m] if isinstance(m, ImmersionMap) else list(m)
    rep = VerificationReport("construction", config={"tolerances": tolerances.as_dict()})
    for mp in maps:
        n = mp.n
        res = pde_residual(mp)
        tol = tolerances.exact_small_case if n == 1 else tolerances.construction_rel
        rep.add(f"pde_residual[n={n}]", "L(P_n) = R_n on C^4", res <= tol, res,
                {"tolerance": tol})
        arg = arg_condition_residual(n, mp.a)
        rep.add(f"arg_condition[n={n}]", "Re (1/2 + i a_n)^(2n+1) = 0",
                arg <= tolerances.arg_condition, arg)
        homog = mp.P.is_homogeneous() and mp.P.total_degree == 4 * n
        rep.add(f"homogeneous[n={n}]", "P_n homogeneous of degree 4n", homog, None,
                {"degree": mp.P.total_degree, "terms": len(mp.P)})
        t_err = abs(mp.t_threshold - 2 * math.sqrt(0.25 + mp.a ** 2)) / mp.t_threshold
        rep.add(f"threshold[n={n}]", "t_n = 2 sqrt(1/4 + a_n^2)", t_err <= 1e-12, t_err)
    if divergence_bound is not None:
        hit = [mp.n for mp in maps if mp.t_threshold > divergence_bound]
        rep.add("divergence_probe", "t_n -> infinity", bool(hit),
                max(mp.t_threshold for mp in maps) - divergence_bound,
                {"bound": divergence_bound, "first_n": min(hit) if hit else None})
    return rep
