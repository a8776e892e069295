"""Dual numeric backend: exact rationals or binary64 with a guard band.

Values are plain ``fractions.Fraction`` (exact mode) or ``float``.  A
computation runs exactly when every input is exact; a single float anywhere
demotes it to binary64, where comparisons closer than :data:`GUARD` to the
threshold are reported as :data:`UNCERTAIN` instead of guessed.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from numbers import Rational

GUARD = 1e-10
MERGE_TOL = 1e-12


class _Uncertain:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Uncertain"

    def __bool__(self):
        raise TypeError("an Uncertain verdict has no truth value")

    def __reduce__(self):
        return (_Uncertain, ())


UNCERTAIN = _Uncertain()


def is_exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def parse_number(text, exact: bool = True):
    """Parse a decimal or ``p/q`` literal (str) or pass numbers through.

    With ``exact`` the result is a Fraction, otherwise a float.
    """
    if isinstance(text, str):
        value = Fraction(text.strip())
    elif isinstance(text, bool):
        raise TypeError("booleans are not numbers here")
    elif isinstance(text, Rational):
        value = Fraction(text)
    elif isinstance(text, float):
        return Fraction(text) if exact else text
    else:
        value = Fraction(text)
    return value if exact else float(value)


def format_number(value) -> str:
    """Render as a decimal string when that is exact, else ``p/q`` or repr."""
    if isinstance(value, float):
        return repr(value)
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    scaled = value * 10**places
    return format(Decimal(scaled.numerator).scaleb(-places), "f")


def coerce(values, exact: bool):
    if exact:
        return [Fraction(v) for v in values]
    return [float(v) for v in values]


def less(a, b, guard: float | None = None):
    """Strict ``a < b`` as True/False, or UNCERTAIN within the guard band."""
    if is_exact(a, b):
        return a < b
    g = GUARD if guard is None else guard
    scale = max(1.0, abs(float(a)), abs(float(b)))
    if float(a) < float(b) - g * scale:
        return True
    if float(a) > float(b) + g * scale:
        return False
    return UNCERTAIN


def sign(x) -> int:
    return (x > 0) - (x < 0)
