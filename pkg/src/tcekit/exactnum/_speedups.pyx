# cython: language_level=3
# cython: binding=True
"""Compiled twin of tcekit.exactnum._pure.

Same canonical representation (p + q*sqrt(2), reduced integer pairs) and
the same public surface; kept in lockstep with the pure module, which is
the reference implementation.  The speedup comes from C-level attribute
slots, cheap allocation through a trusted factory and branchy code paths
compiled out of the interpreter loop.
"""

from fractions import Fraction
from math import gcd, isqrt

BACKEND = "cython"


cdef tuple _norm(n, d):
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


cdef ExactValue _raw(pn, pd, qn, qd):
    cdef ExactValue v = ExactValue.__new__(ExactValue)
    v.pn, v.pd, v.qn, v.qd = pn, pd, qn, qd
    return v


cdef class ExactValue:
    """An element ``p + q*sqrt(2)`` of Q(sqrt(2)).

    Arithmetic with ExactValue, int or Fraction operands stays exact;
    mixing with float degrades to float via :meth:`to_float`.
    """

    cdef readonly object pn
    cdef readonly object pd
    cdef readonly object qn
    cdef readonly object qd

    def __init__(self, p=0, q=0):
        if isinstance(p, ExactValue) and q == 0:
            self.pn, self.pd = (<ExactValue>p).pn, (<ExactValue>p).pd
            self.qn, self.qd = (<ExactValue>p).qn, (<ExactValue>p).qd
            return
        pf = Fraction(p)
        qf = Fraction(q)
        self.pn, self.pd = _norm(pf.numerator, pf.denominator)
        self.qn, self.qd = _norm(qf.numerator, qf.denominator)

    @staticmethod
    def _raw(pn, pd, qn, qd):
        return _raw(pn, pd, qn, qd)

    @property
    def p(self):
        """Rational part."""
        return Fraction(self.pn, self.pd)

    @property
    def q(self):
        """Coefficient of sqrt(2)."""
        return Fraction(self.qn, self.qd)

    def is_zero(self):
        return self.pn == 0 and self.qn == 0

    def is_rational(self):
        return self.qn == 0

    cpdef int sign(self):
        """Exact sign in {-1, 0, 1} by integer case analysis."""
        cdef int sp = (self.pn > 0) - (self.pn < 0)
        cdef int sq = (self.qn > 0) - (self.qn < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq if sp == 0 else sp
        lhs = (self.pn * self.qd) ** 2
        rhs = 2 * (self.qn * self.pd) ** 2
        return sp if lhs > rhs else sq

    def __bool__(self):
        return self.pn != 0 or self.qn != 0

    def __neg__(self):
        return _raw(-self.pn, self.pd, -self.qn, self.qd)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    cdef ExactValue _add(self, ExactValue o):
        pn, pd = _norm(self.pn * o.pd + o.pn * self.pd, self.pd * o.pd)
        qn, qd = _norm(self.qn * o.qd + o.qn * self.qd, self.qd * o.qd)
        return _raw(pn, pd, qn, qd)

    cdef ExactValue _mul(self, ExactValue o):
        pn, pd = _norm(
            self.pn * o.pn * self.qd * o.qd + 2 * self.qn * o.qn * self.pd * o.pd,
            self.pd * o.pd * self.qd * o.qd,
        )
        qn, qd = _norm(
            self.pn * o.qn * self.qd * o.pd + self.qn * o.pn * self.pd * o.qd,
            self.pd * o.qd * self.qd * o.pd,
        )
        return _raw(pn, pd, qn, qd)

    def conjugate(self):
        """The field conjugate ``p - q*sqrt(2)``."""
        return _raw(self.pn, self.pd, -self.qn, self.qd)

    def norm(self):
        """Field norm ``p*p - 2*q*q``; zero only for the zero element."""
        return Fraction(self.pn, self.pd) ** 2 - 2 * Fraction(self.qn, self.qd) ** 2

    cdef ExactValue _inv(self):
        if self.pn == 0 and self.qn == 0:
            raise ZeroDivisionError("division by exact zero")
        n = self.norm()
        pn, pd = _norm(self.pn * n.denominator, self.pd * n.numerator)
        qn, qd = _norm(-self.qn * n.denominator, self.qd * n.numerator)
        return _raw(pn, pd, qn, qd)

    def __add__(self, other):
        o = _coerce(other)
        if o is not None:
            return self._add(<ExactValue>o)
        if isinstance(other, float):
            return self.to_float() + other
        return NotImplemented

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        o = _coerce(other)
        if o is not None:
            return self._add(-(<ExactValue>o))
        if isinstance(other, float):
            return self.to_float() - other
        return NotImplemented

    def __rsub__(self, other):
        o = _coerce(other)
        if o is not None:
            return (<ExactValue>o)._add(-self)
        if isinstance(other, float):
            return other - self.to_float()
        return NotImplemented

    def __mul__(self, other):
        o = _coerce(other)
        if o is not None:
            return self._mul(<ExactValue>o)
        if isinstance(other, float):
            return self.to_float() * other
        return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is not None:
            return self._mul((<ExactValue>o)._inv())
        if isinstance(other, float):
            return self.to_float() / other
        return NotImplemented

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is not None:
            return (<ExactValue>o)._mul(self._inv())
        if isinstance(other, float):
            return other / self.to_float()
        return NotImplemented

    def __eq__(self, other):
        cdef ExactValue o
        if isinstance(other, ExactValue):
            o = <ExactValue>other
            return (
                self.pn == o.pn
                and self.pd == o.pd
                and self.qn == o.qn
                and self.qd == o.qd
            )
        if isinstance(other, (int, Fraction)):
            return self.qn == 0 and Fraction(self.pn, self.pd) == other
        return NotImplemented

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    cdef object _cmp_sign(self, other):
        o = _coerce(other)
        if o is None:
            return None
        return self._add(-(<ExactValue>o)).sign()

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
        if self.qn == 0:
            return hash(Fraction(self.pn, self.pd))
        return hash((self.pn, self.pd, self.qn, self.qd))

    cpdef double to_float(self):
        """Nearest binary64, within 2 ulp; cancellation-safe.

        Evaluates the numerator A + B*sqrt(2) at growing fixed precision
        until 62 significant bits survive, then divides exactly.
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

    def __float__(self):
        return self.to_float()

    def __repr__(self):
        return f"ExactValue({Fraction(self.pn, self.pd)!s}, {Fraction(self.qn, self.qd)!s})"


cdef object _coerce(x):
    if isinstance(x, ExactValue):
        return x
    if isinstance(x, int):
        return _raw(x, 1, 0, 1)
    if isinstance(x, Fraction):
        n, d = _norm(x.numerator, x.denominator)
        return _raw(n, d, 0, 1)
    return None
