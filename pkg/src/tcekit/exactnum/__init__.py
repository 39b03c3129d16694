"""Exact scalar arithmetic for tangram geometry.

The working field is Q(sqrt(2)): every exactly-representable coordinate
is ``p + q*sqrt(2)`` with rational p, q.  A scalar in the rest of the
package is either an :class:`ExactValue` (exact track) or a plain
``float`` (approximate track); arithmetic mixing the two yields a float,
so approximation is contagious and never silent.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from ._select import backend

ExactValue = backend.ExactValue
BACKEND: str = backend.BACKEND

Scalar = ExactValue | float

ZERO = ExactValue(0)
ONE = ExactValue(1)
SQRT2 = ExactValue(0, 1)
HALF_SQRT2 = ExactValue(0, Fraction(1, 2))


def is_exact(x: Scalar) -> bool:
    """True for exact-track scalars (ints count as exact on entry)."""
    return isinstance(x, (ExactValue, int)) and not isinstance(x, bool)


def exact(p=0, q=0) -> ExactValue:
    """Shorthand constructor for ``p + q*sqrt(2)``."""
    return ExactValue(p, q)


def _frac_sqrt(f: Fraction) -> Fraction | None:
    # exact rational square root, None when f is not a perfect square
    if f < 0:
        return None
    n, d = f.numerator, f.denominator
    rn = isqrt(n)
    if rn * rn != n:
        return None
    rd = isqrt(d)
    if rd * rd != d:
        return None
    return Fraction(rn, rd)


def exact_sqrt(a: ExactValue) -> ExactValue | None:
    """Exact nonnegative square root within Q(sqrt(2)), if one exists.

    Solves (u + v*sqrt(2))**2 = p + q*sqrt(2), i.e. u*u + 2*v*v = p and
    2*u*v = q, via the resolvent u**2 = (p +- sqrt(p*p - 2*q*q)) / 2.
    Returns None when the root falls outside the field (most lengths do;
    callers then drop to the approximate track).  Raises ValueError for
    negative input.
    """
    s = a.sign()
    if s < 0:
        raise ValueError("exact_sqrt of a negative value")
    if s == 0:
        return ZERO
    p, q = a.p, a.q
    if q == 0:
        r = _frac_sqrt(p)
        if r is not None:
            return ExactValue(r)
        r = _frac_sqrt(p / 2)
        if r is not None:
            return ExactValue(0, r)
        return None
    disc = _frac_sqrt(p * p - 2 * q * q)
    if disc is None:
        return None
    for u2 in ((p + disc) / 2, (p - disc) / 2):
        if u2 <= 0:
            continue
        u = _frac_sqrt(u2)
        if u is None:
            continue
        v = q / (2 * u)
        root = ExactValue(u, v)
        if root * root == a:
            return root if root.sign() > 0 else -root
    return None


from .latex import (  # noqa: E402  (needs ExactValue bound first)
    LatexParseError,
    format_latex,
    format_scalar,
    parse_latex,
    parse_scalar,
)

__all__ = [
    "BACKEND",
    "ExactValue",
    "HALF_SQRT2",
    "LatexParseError",
    "ONE",
    "SQRT2",
    "Scalar",
    "ZERO",
    "exact",
    "exact_sqrt",
    "format_latex",
    "format_scalar",
    "is_exact",
    "parse_latex",
    "parse_scalar",
]
