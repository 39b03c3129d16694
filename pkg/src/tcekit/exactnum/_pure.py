"""Exact arithmetic over the field Q(sqrt(2)), pure Python implementation.

Every value is represented as ``p + q*sqrt(2)`` with ``p`` and ``q``
arbitrary-precision rationals held as normalized integer pairs.  The
representation is canonical (reduced, positive denominators), so equality
and hashing are structural.  All predicates (``sign``, comparisons) are
decided exactly by integer case analysis; no floating point is consulted.

``tcekit.exactnum._speedups`` is a compiled twin of this module with the
same public surface.  Keep the two in sync.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

BACKEND = "pure"


def _norm(n: int, d: int) -> tuple[int, int]:
    # canonical rational pair: reduced, d > 0, zero is 0/1
    if n == 0:
        return 0, 1
    if d == 1:
        return n, 1
    if d < 0:
        n, d = -n, -d
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


class ExactValue:
    """An element ``p + q*sqrt(2)`` of Q(sqrt(2)).

    Arithmetic with other :class:`ExactValue`, ``int`` or ``Fraction``
    operands stays exact.  Mixing with ``float`` degrades to ``float``
    ("approx contagion"): the exact operand is converted via
    :meth:`to_float` and the result is a plain ``float``.
    """

    __slots__ = ("pn", "pd", "qn", "qd")

    def __init__(self, p: int | Fraction = 0, q: int | Fraction = 0):
        if isinstance(p, ExactValue) and q == 0:
            self.pn, self.pd, self.qn, self.qd = p.pn, p.pd, p.qn, p.qd
            return
        pf = Fraction(p)
        qf = Fraction(q)
        self.pn, self.pd = _norm(pf.numerator, pf.denominator)
        self.qn, self.qd = _norm(qf.numerator, qf.denominator)

    @staticmethod
    def _raw(pn: int, pd: int, qn: int, qd: int) -> "ExactValue":
        # trusted constructor: inputs must already be normalized
        v = ExactValue.__new__(ExactValue)
        v.pn, v.pd, v.qn, v.qd = pn, pd, qn, qd
        return v

    @property
    def p(self) -> Fraction:
        """Rational part."""
        return Fraction(self.pn, self.pd)

    @property
    def q(self) -> Fraction:
        """Coefficient of sqrt(2)."""
        return Fraction(self.qn, self.qd)

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return self.pn == 0 and self.qn == 0

    def is_rational(self) -> bool:
        return self.qn == 0

    def sign(self) -> int:
        """Exact sign in {-1, 0, 1}.

        When the two terms disagree in sign the comparison reduces to
        ``p*p`` versus ``2*q*q`` over the integers, which never loses.
        """
        sp = (self.pn > 0) - (self.pn < 0)
        sq = (self.qn > 0) - (self.qn < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq if sp == 0 else sp
        lhs = (self.pn * self.qd) ** 2
        rhs = 2 * (self.qn * self.pd) ** 2
        # equality would make sqrt(2) rational
        return sp if lhs > rhs else sq

    def __bool__(self) -> bool:
        return self.pn != 0 or self.qn != 0

    # -- ring operations ----------------------------------------------

    def __neg__(self) -> "ExactValue":
        return ExactValue._raw(-self.pn, self.pd, -self.qn, self.qd)

    def __pos__(self) -> "ExactValue":
        return self

    def __abs__(self) -> "ExactValue":
        return -self if self.sign() < 0 else self

    def _add(self, o: "ExactValue") -> "ExactValue":
        pn, pd = _norm(self.pn * o.pd + o.pn * self.pd, self.pd * o.pd)
        qn, qd = _norm(self.qn * o.qd + o.qn * self.qd, self.qd * o.qd)
        return ExactValue._raw(pn, pd, qn, qd)

    def _mul(self, o: "ExactValue") -> "ExactValue":
        # (p1 + q1 r)(p2 + q2 r) = p1 p2 + 2 q1 q2 + (p1 q2 + q1 p2) r
        pn, pd = _norm(
            self.pn * o.pn * self.qd * o.qd + 2 * self.qn * o.qn * self.pd * o.pd,
            self.pd * o.pd * self.qd * o.qd,
        )
        qn, qd = _norm(
            self.pn * o.qn * self.qd * o.pd + self.qn * o.pn * self.pd * o.qd,
            self.pd * o.qd * self.qd * o.pd,
        )
        return ExactValue._raw(pn, pd, qn, qd)

    def conjugate(self) -> "ExactValue":
        """The field conjugate ``p - q*sqrt(2)``."""
        return ExactValue._raw(self.pn, self.pd, -self.qn, self.qd)

    def norm(self) -> Fraction:
        """Field norm ``p*p - 2*q*q``; zero only for the zero element."""
        return Fraction(self.pn, self.pd) ** 2 - 2 * Fraction(self.qn, self.qd) ** 2

    def _inv(self) -> "ExactValue":
        if self.pn == 0 and self.qn == 0:
            raise ZeroDivisionError("division by exact zero")
        n = self.norm()
        conj = self.conjugate()
        pn, pd = _norm(conj.pn * n.denominator, conj.pd * n.numerator)
        qn, qd = _norm(conj.qn * n.denominator, conj.qd * n.numerator)
        return ExactValue._raw(pn, pd, qn, qd)

    @staticmethod
    def _coerce(x) -> "ExactValue | None":
        if isinstance(x, ExactValue):
            return x
        if isinstance(x, int):
            return ExactValue._raw(x, 1, 0, 1)
        if isinstance(x, Fraction):
            n, d = _norm(x.numerator, x.denominator)
            return ExactValue._raw(n, d, 0, 1)
        return None

    def __add__(self, other):
        o = ExactValue._coerce(other)
        if o is not None:
            return self._add(o)
        if isinstance(other, float):
            return self.to_float() + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        o = ExactValue._coerce(other)
        if o is not None:
            return self._add(-o)
        if isinstance(other, float):
            return self.to_float() - other
        return NotImplemented

    def __rsub__(self, other):
        o = ExactValue._coerce(other)
        if o is not None:
            return o._add(-self)
        if isinstance(other, float):
            return other - self.to_float()
        return NotImplemented

    def __mul__(self, other):
        o = ExactValue._coerce(other)
        if o is not None:
            return self._mul(o)
        if isinstance(other, float):
            return self.to_float() * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ExactValue._coerce(other)
        if o is not None:
            return self._mul(o._inv())
        if isinstance(other, float):
            return self.to_float() / other
        return NotImplemented

    def __rtruediv__(self, other):
        o = ExactValue._coerce(other)
        if o is not None:
            return o._mul(self._inv())
        if isinstance(other, float):
            return other / self.to_float()
        return NotImplemented

    # -- comparisons ---------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, ExactValue):
            return (
                self.pn == other.pn
                and self.pd == other.pd
                and self.qn == other.qn
                and self.qd == other.qd
            )
        if isinstance(other, (int, Fraction)):
            return self.qn == 0 and Fraction(self.pn, self.pd) == other
        return NotImplemented

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def _cmp_sign(self, other) -> int | None:
        o = ExactValue._coerce(other)
        if o is None:
            return None
        return self._add(-o).sign()

    def __lt__(self, other):
        s = self._cmp_sign(other)
        if s is not None:
            return s < 0
        if isinstance(other, float):
            return self.to_float() < other
        return NotImplemented

    def __le__(self, other):
        s = self._cmp_sign(other)
        if s is not None:
            return s <= 0
        if isinstance(other, float):
            return self.to_float() <= other
        return NotImplemented

    def __gt__(self, other):
        s = self._cmp_sign(other)
        if s is not None:
            return s > 0
        if isinstance(other, float):
            return self.to_float() > other
        return NotImplemented

    def __ge__(self, other):
        s = self._cmp_sign(other)
        if s is not None:
            return s >= 0
        if isinstance(other, float):
            return self.to_float() >= other
        return NotImplemented

    def __hash__(self):
        # rationals hash like the numbers they equal; irrationals never
        # collide with int/Fraction keys, a structural hash is fine there
        if self.qn == 0:
            return hash(Fraction(self.pn, self.pd))
        return hash((self.pn, self.pd, self.qn, self.qd))

    # -- conversion ----------------------------------------------------

    def to_float(self) -> float:
        """Nearest binary64, within 2 ulp of the true value.

        The numerator ``A + B*sqrt(2)`` is evaluated at increasing fixed
        precision until at least 62 significant bits survive, so terms
        that nearly cancel (e.g. 99 - 70*sqrt(2)) keep full relative
        accuracy before the final correctly-rounded division.
        """
        A = self.pn * self.qd
        B = self.qn * self.pd
        if B == 0:
            return self.pn / self.pd
        D = self.pd * self.qd
        m = 64
        while True:
            s = isqrt((2 * B * B) << (2 * m))
            num = (A << m) + (s if B > 0 else -s)
            if num.bit_length() > 62:
                return float(Fraction(num, D << m))
            m *= 2

    def __float__(self) -> float:
        return self.to_float()

    def __repr__(self) -> str:
        return f"ExactValue({Fraction(self.pn, self.pd)!s}, {Fraction(self.qn, self.qd)!s})"
