"""Parsing and formatting of exact values in LaTeX math notation.

The accepted grammar covers exactly the coordinate language used in TCE
documents (whitespace-insensitive):

    value           := term | term sign term
    term            := signed-rational | signed-radical
    signed-radical  := [sign] [coeff] "\\sqrt{2}"
                     | [sign] "\\frac{" [coeff] "\\sqrt{2}" "}{" uint "}"
    signed-rational := [sign] uint | [sign] "\\frac{" uint "}{" uint "}"
    coeff           := uint | "\\frac{" uint "}{" uint "}"

Nesting is limited to one fraction level.  Formatting is canonical:
zero terms are omitted, a sole zero prints as "0", integer coefficients
are bare, and a fractional radical coefficient folds into the fraction
("\\frac{\\sqrt{2}}{2}", never "\\frac{1}{2}\\sqrt{2}"), so that
``parse_latex(format_latex(v)) == v`` for every value.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from ._select import backend

ExactValue = backend.ExactValue

_SQRT2 = "\\sqrt{2}"
_FRAC = "\\frac{"

_INT_RE = re.compile(r"[+-]?\d+")
_DECIMAL_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


class LatexParseError(ValueError):
    """Raised on malformed input; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class _Scanner:
    """Cursor over the input with whitespace removed up front.

    Error positions map back to the original string via ``pos``.
    """

    __slots__ = ("text", "i", "_map", "_orig_len")

    def __init__(self, text: str):
        chars: list[str] = []
        posmap: list[int] = []
        for idx, ch in enumerate(text):
            if not ch.isspace():
                chars.append(ch)
                posmap.append(idx)
        self.text = "".join(chars)
        self.i = 0
        self._map = posmap
        self._orig_len = len(text)

    def pos(self) -> int:
        return self._map[self.i] if self.i < len(self._map) else self._orig_len

    def at_end(self) -> bool:
        return self.i >= len(self.text)

    def match(self, literal: str) -> bool:
        if self.text.startswith(literal, self.i):
            self.i += len(literal)
            return True
        return False

    def expect(self, literal: str, what: str) -> None:
        if not self.match(literal):
            raise LatexParseError(f"expected {what}", self.pos())

    def match_uint(self) -> int | None:
        j = self.i
        t = self.text
        while j < len(t) and t[j].isdigit():
            j += 1
        if j == self.i:
            return None
        value = int(t[self.i : j])
        self.i = j
        return value

    def require_uint(self, what: str) -> int:
        n = self.match_uint()
        if n is None:
            raise LatexParseError(f"expected {what}", self.pos())
        return n


def _finish_simple_frac(sc: _Scanner) -> Fraction:
    # "\frac{" already consumed; parses the remaining "a}{b}".
    num = sc.require_uint("a numerator")
    sc.expect("}", "'}' closing the numerator")
    sc.expect("{", "'{' opening the denominator")
    den_pos = sc.pos()
    den = sc.require_uint("a denominator")
    if den == 0:
        raise LatexParseError("zero denominator", den_pos)
    sc.expect("}", "'}' closing the denominator")
    return Fraction(num, den)


def _parse_term(sc: _Scanner, allow_sign: bool) -> ExactValue:
    sign = 1
    if allow_sign:
        if sc.match("+"):
            pass
        elif sc.match("-"):
            sign = -1
    if sc.match(_FRAC):
        pos = sc.pos()
        if sc.match(_FRAC):
            # Fractional coefficient inside a fraction numerator:
            # \frac{\frac{a}{b}\sqrt{2}}{c}
            coeff = _finish_simple_frac(sc)
            sc.expect(_SQRT2, "\\sqrt{2} after the coefficient")
            sc.expect("}", "'}' closing the numerator")
            sc.expect("{", "'{' opening the denominator")
            den_pos = sc.pos()
            den = sc.require_uint("a denominator")
            if den == 0:
                raise LatexParseError("zero denominator", den_pos)
            sc.expect("}", "'}' closing the denominator")
            return ExactValue(0, sign * coeff / den)
        num = sc.match_uint()
        had_sqrt = sc.match(_SQRT2)
        if num is None and not had_sqrt:
            raise LatexParseError("expected digits or \\sqrt{2} inside \\frac", pos)
        sc.expect("}", "'}' closing the numerator")
        sc.expect("{", "'{' opening the denominator")
        den_pos = sc.pos()
        den = sc.require_uint("a denominator")
        if den == 0:
            raise LatexParseError("zero denominator", den_pos)
        sc.expect("}", "'}' closing the denominator")
        if had_sqrt:
            coeff = Fraction(1 if num is None else num)
            return ExactValue(0, Fraction(sign) * coeff / den)
        if sc.match(_SQRT2):
            return ExactValue(0, Fraction(sign * num, den))
        return ExactValue(Fraction(sign * num, den))
    if sc.match(_SQRT2):
        return ExactValue(0, sign)
    pos = sc.pos()
    num = sc.match_uint()
    if num is None:
        raise LatexParseError("expected a number", pos)
    if sc.match(_SQRT2):
        return ExactValue(0, sign * num)
    return ExactValue(sign * num)


def parse_latex(text: str) -> ExactValue:
    """Parse a LaTeX coordinate expression into an exact value."""
    sc = _Scanner(text)
    if sc.at_end():
        raise LatexParseError("empty expression", 0)
    value = _parse_term(sc, allow_sign=True)
    if not sc.at_end():
        if sc.match("+"):
            value = value + _parse_term(sc, allow_sign=False)
        elif sc.match("-"):
            value = value - _parse_term(sc, allow_sign=False)
    if not sc.at_end():
        raise LatexParseError("unexpected trailing input", sc.pos())
    return value


def _format_rational(pn: int, pd: int) -> str:
    sign = "-" if pn < 0 else ""
    if pd == 1:
        return f"{sign}{abs(pn)}"
    return f"{sign}\\frac{{{abs(pn)}}}{{{pd}}}"


def _format_radical(qn: int, qd: int) -> str:
    sign = "-" if qn < 0 else ""
    mag = abs(qn)
    if qd == 1:
        core = _SQRT2 if mag == 1 else f"{mag}{_SQRT2}"
        return f"{sign}{core}"
    inner = _SQRT2 if mag == 1 else f"{mag}{_SQRT2}"
    return f"{sign}\\frac{{{inner}}}{{{qd}}}"


def format_latex(value: ExactValue) -> str:
    """Canonical LaTeX form of an exact value."""
    pn, pd, qn, qd = value.pn, value.pd, value.qn, value.qd
    if pn == 0 and qn == 0:
        return "0"
    if qn == 0:
        return _format_rational(pn, pd)
    if pn == 0:
        return _format_radical(qn, qd)
    head = _format_rational(pn, pd)
    tail = _format_radical(qn, qd)
    if not tail.startswith("-"):
        tail = "+" + tail
    return head + tail


def parse_scalar(text: str) -> "ExactValue | float":
    """Parse a coordinate string into an exact or approximate scalar.

    LaTeX expressions and bare integers come back exact; decimal or
    exponent notation comes back as a float.  Non-finite values and
    anything outside the grammar raise :class:`LatexParseError`.
    """
    t = text.strip()
    if not t:
        raise LatexParseError("empty value", 0)
    if "\\" in t:
        return parse_latex(t)
    if _INT_RE.fullmatch(t):
        return ExactValue(int(t))
    if _DECIMAL_RE.fullmatch(t):
        x = float(t)
        if not math.isfinite(x):
            raise LatexParseError("non-finite value", 0)
        return x
    return parse_latex(t)


def format_scalar(value: "ExactValue | float") -> str:
    """Serialize a scalar: canonical LaTeX when exact, repr when float."""
    if isinstance(value, ExactValue):
        return format_latex(value)
    return repr(float(value))
