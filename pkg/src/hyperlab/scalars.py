"""
Exact dyadic scalars, float-mode helpers and basis subspaces.

Every weight that shows up in the worked examples is a signed power of two,
so the default ("exact") mode stores scalars as ``Dyadic`` values
``mantissa * 2**exponent``.  A second mode ("float") uses plain binary64
numbers and compares with an absolute tolerance.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import ConfigurationError, DomainError

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

FLOAT_TOL = 1e-12

_FLOAT_EXP_CAP = 1024


@functools.total_ordering
class Dyadic:
    """Exact number ``mantissa * 2**exponent`` with an odd (or zero) mantissa."""

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa=0, exponent=0):
        mantissa = int(mantissa)
        exponent = int(exponent)
        if mantissa == 0:
            exponent = 0
        else:
            tz = (mantissa & -mantissa).bit_length() - 1
            if tz:
                mantissa >>= tz
                exponent += tz
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_fraction(cls, q):
        q = Fraction(q)
        den = q.denominator
        if den & (den - 1):
            raise DomainError(f"{q} is not a dyadic rational")
        return cls(q.numerator, -(den.bit_length() - 1))

    @classmethod
    def coerce(cls, value):
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            return cls(int(value))
        if isinstance(value, int):
            return cls(value)
        if isinstance(value, (Fraction, Rational)):
            return cls.from_fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise DomainError(f"cannot represent {value} exactly")
            return cls.from_fraction(Fraction(value))
        if isinstance(value, str):
            return parse_dyadic(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    @classmethod
    def pow2(cls, e):
        return cls(1, e)

    # -- arithmetic -------------------------------------------------------

    def _other(self, other):
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Dyadic.coerce(other)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.mantissa == 0:
            return o
        if o.mantissa == 0:
            return self
        e = min(self.exponent, o.exponent)
        m = (self.mantissa << (self.exponent - e)) + (o.mantissa << (o.exponent - e))
        return Dyadic(m, e)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Dyadic(self.mantissa * o.mantissa, self.exponent + o.exponent)

    __rmul__ = __mul__

    def __abs__(self):
        return Dyadic(abs(self.mantissa), self.exponent)

    def scale2(self, e):
        """Multiply by ``2**e``."""
        return Dyadic(self.mantissa, self.exponent + e)

    def is_power_of_two(self):
        return abs(self.mantissa) == 1

    def inv2(self):
        """Inverse of a signed power of two."""
        if not self.is_power_of_two():
            raise DomainError(f"inv2 needs a signed power of two, got {self}")
        return Dyadic(self.mantissa, -self.exponent)

    # -- comparison -------------------------------------------------------

    def to_fraction(self):
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def _cmp_key(self, other):
        if isinstance(other, Dyadic):
            return other.to_fraction()
        if isinstance(other, (int, Fraction)):
            return Fraction(other)
        if isinstance(other, float):
            if math.isnan(other):
                return None
            if math.isinf(other):
                return other
            return Fraction(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        key = self._cmp_key(other)
        if key is NotImplemented:
            return NotImplemented
        if key is None:
            return False
        return self.to_fraction() == key

    def __lt__(self, other):
        key = self._cmp_key(other)
        if key is NotImplemented:
            return NotImplemented
        if key is None:
            return False
        return self.to_fraction() < key

    def __hash__(self):
        return hash(self.to_fraction())

    def __bool__(self):
        return self.mantissa != 0

    def sign(self):
        return (self.mantissa > 0) - (self.mantissa < 0)

    # -- conversion -------------------------------------------------------

    def __float__(self):
        if self.mantissa == 0:
            return 0.0
        top = self.exponent + self.mantissa.bit_length()
        if top > _FLOAT_EXP_CAP or top < -_FLOAT_EXP_CAP:
            raise OverflowError(f"{self} is outside the float conversion range 2^±1024")
        return math.ldexp(float(self.mantissa), self.exponent) if abs(self.mantissa) < 2**53 \
            else float(self.to_fraction())

    def __repr__(self):
        return f"Dyadic({self.mantissa}, {self.exponent})"

    def __str__(self):
        return f"{self.mantissa}*2^{self.exponent}"

    def to_decimal(self):
        """Exact decimal expansion; only defined for exponent >= -64."""
        if self.exponent >= 0:
            return str(self.mantissa << self.exponent)
        if self.exponent < -64:
            raise DomainError("decimal form is only emitted for exponent >= -64")
        k = -self.exponent
        digits = abs(self.mantissa) * 5**k
        s = str(digits).rjust(k + 1, "0")
        body = f"{s[:-k]}.{s[-k:]}".rstrip("0").rstrip(".")
        return ("-" if self.mantissa < 0 else "") + body


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, -1)

_TEXT_FORM = re.compile(r"^\s*([+-]?\d+)\s*\*\s*2\s*\^\s*\(?\s*([+-]?\d+)\s*\)?\s*$")
_POW_FORM = re.compile(r"^\s*([+-]?)\s*2\s*\^\s*\(?\s*([+-]?\d+)\s*\)?\s*$")


def parse_dyadic(text):
    """Parse ``"m*2^e"``, ``"2^e"``, ``"p/q"`` or a plain decimal."""
    m = _TEXT_FORM.match(text)
    if m:
        return Dyadic(int(m.group(1)), int(m.group(2)))
    m = _POW_FORM.match(text)
    if m:
        sign = -1 if m.group(1) == "-" else 1
        return Dyadic(sign, int(m.group(2)))
    try:
        q = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse {text!r} as a dyadic number") from exc
    return Dyadic.from_fraction(q)


# -- mode-tagged scalar helpers --------------------------------------------

def check_mode(mode):
    if mode not in MODES:
        raise ConfigurationError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode


def mode_of(value):
    if isinstance(value, Dyadic):
        return EXACT
    if isinstance(value, float):
        return FLOAT
    raise TypeError(f"{value!r} is not a mode-tagged scalar")


def to_mode(value, mode):
    """Convert ``value`` into the scalar type for ``mode``."""
    check_mode(mode)
    if mode == EXACT:
        return Dyadic.coerce(value)
    if isinstance(value, Dyadic):
        return float(value)
    if isinstance(value, str):
        return parse_float(value)
    return float(value)


def parse_float(text):
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        return float(parse_dyadic(text))


def zero(mode):
    return ZERO if check_mode(mode) == EXACT else 0.0


def one(mode):
    return ONE if check_mode(mode) == EXACT else 1.0


def half(mode):
    return HALF if check_mode(mode) == EXACT else 0.5


def inverse(value):
    """Multiplicative inverse; exact values must be signed powers of two."""
    if isinstance(value, Dyadic):
        if value.mantissa == 0:
            raise DomainError("zero has no inverse")
        return value.inv2()
    if value == 0:
        raise DomainError("zero has no inverse")
    return 1.0 / value


def is_zero(value):
    return value == 0


def less(a, b, tol=FLOAT_TOL):
    """Strict ``a < b``; float operands must clear the tolerance."""
    if isinstance(a, Dyadic) and isinstance(b, Dyadic):
        return a < b
    return float(a) < float(b) - tol


def close(a, b, tol=FLOAT_TOL):
    if isinstance(a, Dyadic) and isinstance(b, Dyadic):
        return a == b
    return abs(float(a) - float(b)) <= tol


def to_float(value):
    return float(value)


def scalar_text(value):
    """Serialisation used in reports: dyadic text form or ``repr`` of a float."""
    if isinstance(value, Dyadic):
        return str(value)
    return repr(float(value))


def scalar_json(value):
    if isinstance(value, Dyadic):
        out = {"dyadic": str(value), "float": float(value)}
        if value.exponent >= -64:
            out["decimal"] = value.to_decimal()
        return out
    return float(value)


# -- subspaces --------------------------------------------------------------

@dataclass(frozen=True)
class SubspaceSpec:
    """Span of finitely many basis vectors, stored as sorted positive indices."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 1 for i in idx):
            raise ConfigurationError("basis indices are positive integers")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ConfigurationError("subspace indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices):
        return cls(tuple(sorted(set(int(i) for i in indices))))

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, j):
        return j in set(self.indices)

    @property
    def dim(self):
        return len(self.indices)

    def as_set(self):
        return frozenset(self.indices)

    def __str__(self):
        if self.indices and self.indices == tuple(range(1, len(self.indices) + 1)):
            return f"L_{len(self.indices)}"
        return "{" + ",".join(map(str, self.indices)) + "}"


def section(m):
    """``L_m = span{e_1, ..., e_m}``."""
    if m < 0:
        raise ConfigurationError("section size must be non-negative")
    return SubspaceSpec(tuple(range(1, m + 1)))


def split_by_parity(s):
    """Split a subspace into its odd-index and even-index parts."""
    odd = tuple(i for i in s.indices if i % 2 == 1)
    even = tuple(i for i in s.indices if i % 2 == 0)
    return SubspaceSpec(odd), SubspaceSpec(even)
