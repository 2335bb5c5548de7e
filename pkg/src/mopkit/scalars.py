"""Scalar arithmetic backends.

Two backends exist and are never mixed inside one computation:

* :class:`RationalBackend` -- exact rationals, stored in lowest terms with a
  positive denominator.  Backed by ``gmpy2.mpq`` when available (several
  times faster on the dense Hankel-type solves), otherwise by
  ``fractions.Fraction``.  Set ``MOPKIT_PURE_RATIONAL=1`` to force the pure
  Python implementation; ``benchmarks/bench_rational_core.py`` compares the
  two.
* :class:`BigFloatBackend` -- complex floats at a configurable decimal
  precision, backed by an independent ``mpmath`` context.  A value counts as
  zero when ``|v| <= 10**-(digits-10) * scale``, i.e. ten guard digits absorb
  accumulated rounding.

Values themselves are plain ``mpq``/``Fraction``/``mpc`` objects; containers
(polynomials, matrices) carry the backend and refuse to combine operands from
different backends.
"""

from __future__ import annotations

import os
from fractions import Fraction

from mpmath.ctx_mp import MPContext

from .errors import BackendMismatch

RATIONAL_IMPL = "fractions"
_mpq = Fraction
if not os.environ.get("MOPKIT_PURE_RATIONAL"):
    try:
        from gmpy2 import mpq as _mpq  # type: ignore[no-redef]

        RATIONAL_IMPL = "gmpy2"
    except ImportError:
        pass


def rational(num, den=1):
    """Exact rational from integers (reduced, positive denominator)."""
    return _mpq(num, den)


def parse_rational(text: str):
    """Parse 'p/q' or an integer string.  Decimal notation is rejected."""
    s = text.strip()
    if any(ch in s for ch in ".eE"):
        raise ValueError(f"not an exact rational: {text!r} (decimal notation rejected)")
    if "/" in s:
        p, q = s.split("/", 1)
        return _mpq(int(p), int(q))
    return _mpq(int(s))


class RationalBackend:
    """Exact rational arithmetic.  Stateless; use the module singleton."""

    is_exact = True
    name = "rational"

    @property
    def zero(self):
        return _mpq(0)

    @property
    def one(self):
        return _mpq(1)

    def scalar(self, value):
        """Coerce an int, rational or 'p/q' string to a backend value."""
        if isinstance(value, str):
            return parse_rational(value)
        if isinstance(value, float):
            raise BackendMismatch("float literal in exact rational backend")
        return _mpq(value)

    def is_zero(self, v, scale=None):
        return v == 0

    def eq(self, a, b, scale=None):
        return a == b

    def abs(self, v):
        return -v if v < 0 else v

    def to_string(self, v) -> str:
        return f"{v.numerator}/{v.denominator}"

    def __repr__(self):
        return f"RationalBackend({RATIONAL_IMPL})"


RATIONAL = RationalBackend()


class BigFloatBackend:
    """Complex arithmetic at a fixed decimal precision.

    Each instance owns an independent mpmath context, so two backends with
    different precisions cannot contaminate each other.
    """

    is_exact = False
    name = "bigfloat"

    def __init__(self, precision_digits: int):
        if precision_digits < 20:
            raise ValueError("precision_digits must be at least 20")
        self.digits = precision_digits
        self.ctx = MPContext()
        self.ctx.dps = precision_digits
        self.tolerance = self.ctx.mpf(10) ** (-(precision_digits - 10))

    @property
    def zero(self):
        return self.ctx.mpc(0)

    @property
    def one(self):
        return self.ctx.mpc(1)

    def scalar(self, value):
        if isinstance(value, str):
            if "/" in value:
                p, q = value.split("/", 1)
                return self.ctx.mpc(p) / self.ctx.mpc(q)
            return self.ctx.mpc(value)
        if isinstance(value, (Fraction,)) or type(value).__name__ == "mpq":
            return self.ctx.mpc(value.numerator) / self.ctx.mpc(value.denominator)
        return self.ctx.mpc(value)

    def is_zero(self, v, scale=None):
        # Exact zero (used for coefficient trimming); tolerance tests go
        # through near_zero/eq with an explicit scale.
        return v == 0

    def near_zero(self, v, scale=1):
        s = scale if scale and scale > 1 else 1
        return abs(v) <= self.tolerance * s

    def eq(self, a, b, scale=1):
        return self.near_zero(a - b, scale)

    def abs(self, v):
        return abs(v)

    def to_string(self, v) -> str:
        v = self.ctx.mpc(v)
        re = self.ctx.nstr(v.real, self.digits)
        if v.imag == 0:
            return re
        return f"{re} + {self.ctx.nstr(v.imag, self.digits)}j"

    def __repr__(self):
        return f"BigFloatBackend({self.digits})"


def same_backend(a, b):
    """Guard: containers refuse to mix backends silently."""
    if a is not b:
        raise BackendMismatch(f"cannot mix {a!r} with {b!r}")
    return a
