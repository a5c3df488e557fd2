"""Sparse polynomials in four complex variables.

Polynomials are stored as a mapping from exponent 4-tuples to complex
coefficients.  Coefficients are Python ``complex`` by default; ``mpmath.mpc``
coefficients are accepted as well and give an extended-precision mode (the
arithmetic below only uses ``+``, ``-``, ``*`` and integer scaling).

The variables are ``w1, w2, w3, w4``, addressed with 1-based indices as in
the coordinates of the quadric ``w1*w2 + w3*w4 = 1``.
"""
from __future__ import annotations

import cmath
import json
from math import comb
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Union

import numpy as np
from numpy.polynomial import Polynomial

Exponent = tuple[int, int, int, int]
Scalar = Union[complex, float, int, Any]

DEFAULT_MAX_DEGREE = 64


class DegreeCapError(ValueError):
    """A product or power exceeded the configured total-degree cap."""


class NotUVExpressible(ValueError):
    """A polynomial is not a polynomial in u = w1*w2 and v = w3*w4."""


def _is_finite(c) -> bool:
    try:
        return cmath.isfinite(complex(c))
    except OverflowError:
        return False


def _is_exact_zero(c) -> bool:
    return c == 0


class _Sparse4:
    """Shared storage and ring arithmetic for 4-index sparse polynomials."""

    __slots__ = ("_terms", "max_degree")

    def __init__(self, terms: Mapping[Exponent, Scalar] | Iterable[tuple[Exponent, Scalar]] = (),
                 *, max_degree: int = DEFAULT_MAX_DEGREE):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, Any] = {}
        for e, c in items:
            e = tuple(int(k) for k in e)
            if len(e) != 4 or min(e) < 0:
                raise ValueError(f"bad exponent {e!r}")
            if sum(e) > max_degree:
                raise DegreeCapError(f"total degree {sum(e)} exceeds cap {max_degree}")
            acc[e] = acc[e] + c if e in acc else c
        for e, c in acc.items():
            if not _is_finite(c):
                raise ValueError(f"non-finite coefficient {c!r} at {e}")
        ordered = {e: acc[e] for e in sorted(acc) if not _is_exact_zero(acc[e])}
        self._terms = MappingProxyType(ordered)
        self.max_degree = max_degree

    # construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, c: Scalar, **kw):
        return cls({(0, 0, 0, 0): c}, **kw)

    @classmethod
    def monomial(cls, e: Exponent, c: Scalar = 1, **kw):
        return cls({tuple(e): c}, **kw)

    @classmethod
    def variable(cls, index: int, **kw):
        if index not in (1, 2, 3, 4):
            raise ValueError("variable index must be 1..4")
        e = [0, 0, 0, 0]
        e[index - 1] = 1
        return cls({tuple(e): 1}, **kw)

    def _new(self, terms, max_degree=None):
        return type(self)(terms, max_degree=self.max_degree if max_degree is None else max_degree)

    # inspection ------------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Any]:
        return self._terms

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def total_degree(self) -> int:
        """Largest total degree of a stored term; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def homogeneous_components(self) -> dict[int, "_Sparse4"]:
        parts: dict[int, dict] = {}
        for e, c in self._terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: self._new(parts[d]) for d in sorted(parts)}

    def max_abs_coefficient(self) -> float:
        return max((abs(complex(c)) for c in self._terms.values()), default=0.0)

    def coefficient(self, e: Exponent):
        return self._terms.get(tuple(e), 0)

    # arithmetic ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, _Sparse4):
            if type(other) is not type(self):
                raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
            return other
        return self.constant(other, max_degree=self.max_degree)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out[e] + c if e in out else c
        return self._new(out, max(self.max_degree, other.max_degree))

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, _Sparse4):
            return self.scale(other)
        other = self._coerce(other)
        cap = max(self.max_degree, other.max_degree)
        out: dict[Exponent, Any] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3])
                if sum(e) > cap:
                    raise DegreeCapError(f"product degree {sum(e)} exceeds cap {cap}")
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return self._new(out, cap)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        if k and self.total_degree * k > self.max_degree:
            raise DegreeCapError(f"power degree {self.total_degree * k} exceeds cap {self.max_degree}")
        result = self.constant(1, max_degree=self.max_degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c: Scalar):
        return self._new({e: c * v for e, v in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, _Sparse4):
            return type(other) is type(self) and dict(self._terms) == dict(other._terms)
        return NotImplemented

    def __hash__(self):
        return hash((type(self).__name__, tuple(self._terms.items())))

    def partial(self, index: int):
        """Term-wise derivative with respect to variable ``index`` (1..4)."""
        i = index - 1
        if i not in range(4):
            raise ValueError("variable index must be 1..4")
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = e[i] * c
        return self._new(out)

    def coefficient_residual(self, other) -> float:
        """max |self - other| over coefficients, relative to max |other|."""
        diff = (self - other).max_abs_coefficient()
        ref = other.max_abs_coefficient()
        return diff / ref if ref else diff

    def to_complex(self):
        """Copy with every coefficient rounded to binary64 ``complex``."""
        return self._new({e: complex(c) for e, c in self._terms.items()})

    # evaluation ------------------------------------------------------------

    def _eval_vars(self, x):
        x = np.asarray(x) if not isinstance(x, (list, tuple)) else x
        if isinstance(x, np.ndarray):
            if x.shape[-1] != 4:
                raise ValueError("points must have a trailing axis of length 4")
            return [x[..., k] for k in range(4)]
        if len(x) != 4:
            raise ValueError("expected four coordinates")
        return list(x)

    def evaluate(self, w):
        """Evaluate at ``w`` (four scalars, or an array with trailing axis 4).

        Terms are summed in lexicographic exponent order, so the result is
        deterministic for a given point.
        """
        xs = self._eval_vars(w)
        total = 0
        for e, c in self._terms.items():
            term = c
            for k in range(4):
                if e[k]:
                    term = term * xs[k] ** e[k]
            total = total + term
        if isinstance(total, int) and total == 0 and isinstance(xs[0], np.ndarray):
            return np.zeros(np.broadcast(*xs).shape, dtype=complex)
        return total

    __call__ = evaluate

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        rows = []
        for e, c in self._terms.items():
            c = complex(c)
            rows.append({"e": list(e), "re": c.real, "im": c.imag})
        return {"terms": rows}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: Mapping, **kw):
        return cls({tuple(r["e"]): complex(r["re"], r["im"]) for r in data["terms"]}, **kw)

    @classmethod
    def from_json(cls, text: str, **kw):
        return cls.from_dict(json.loads(text), **kw)

    # display ---------------------------------------------------------------

    _names = ("w1", "w2", "w3", "w4")

    def __repr__(self):
        if not self._terms:
            return f"{type(self).__name__}(0)"
        parts = []
        for e, c in self._terms.items():
            mono = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(self._names, e) if k)
            parts.append(f"({complex(c):.6g})" + (f"*{mono}" if mono else ""))
        return f"{type(self).__name__}(" + " + ".join(parts) + ")"


class SparsePoly4(_Sparse4):
    """Polynomial in ``w1..w4`` with complex coefficients."""

    __slots__ = ()

    def is_balanced(self) -> bool:
        """True when every monomial is of the form (w1 w2)^j (w3 w4)^k."""
        return all(e[0] == e[1] and e[2] == e[3] for e in self._terms)


def partial_derivative(p: SparsePoly4, var: int) -> SparsePoly4:
    return p.partial(var)


def apply_vector_field_L(f: SparsePoly4) -> SparsePoly4:
    """Apply the vector field ``w3 d/dw2 - w1 d/dw4``.

    This field is tangent to the quadric, and its value on ``f`` decides
    whether ``(w1, w3, f)`` restricted to the quadric is nondegenerate.
    """
    out: dict[Exponent, Any] = {}
    for e, c in f.terms.items():
        if e[1]:
            k = (e[0], e[1] - 1, e[2] + 1, e[3])
            out[k] = out.get(k, 0) + e[1] * c
        if e[3]:
            k = (e[0] + 1, e[1], e[2], e[3] - 1)
            out[k] = out.get(k, 0) - e[3] * c
    return SparsePoly4(out, max_degree=f.max_degree)


class UVPoly:
    """Polynomial in u = w1*w2 and v = w3*w4, stored as {(j, k): c}."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[tuple[int, int], Scalar]):
        self._coeffs = MappingProxyType(
            {jk: coeffs[jk] for jk in sorted(coeffs) if not _is_exact_zero(coeffs[jk])})

    @property
    def coeffs(self) -> Mapping[tuple[int, int], Any]:
        return self._coeffs

    def to_sparse(self, max_degree: int = DEFAULT_MAX_DEGREE) -> SparsePoly4:
        return SparsePoly4({(j, j, k, k): c for (j, k), c in self._coeffs.items()},
                           max_degree=max_degree)

    def restrict_to_quadric(self) -> Polynomial:
        return uv_restrict_to_quadric(self)

    def __eq__(self, other):
        return isinstance(other, UVPoly) and dict(self._coeffs) == dict(other._coeffs)

    def __repr__(self):
        return f"UVPoly({dict(self._coeffs)!r})"


def to_uv(p: SparsePoly4) -> UVPoly:
    bad = [e for e in p.terms if e[0] != e[1] or e[2] != e[3]]
    if bad:
        raise NotUVExpressible(f"monomial with exponents {bad[0]} is not a product of u and v")
    return UVPoly({(e[0], e[2]): c for e, c in p.terms.items()})


def uv_restrict_to_quadric(p: UVPoly) -> Polynomial:
    """Substitute u = 1 - v and return the result as a polynomial in v.

    The expansion uses integer binomials, so it is exact up to the
    floating-point rounding of the coefficient sums themselves.
    """
    deg = max((j + k for j, k in p.coeffs), default=0)
    coeffs: list[Any] = [0] * (deg + 1)
    for (j, k), c in p.coeffs.items():
        for m in range(j + 1):
            coeffs[m + k] = coeffs[m + k] + (-1) ** m * comb(j, m) * c
    if any(not isinstance(c, (int, float, complex)) for c in coeffs):
        arr = np.array(coeffs, dtype=object)
    else:
        arr = np.array(coeffs, dtype=complex)
    return Polynomial(arr)


def evaluate(p: SparsePoly4, w) -> Any:
    return p.evaluate(w)
