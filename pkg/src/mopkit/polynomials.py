"""Dense polynomials, Laurent polynomials and rational functions.

Coefficients live in one scalar backend (see :mod:`mopkit.scalars`); every
binary operation checks that both operands share it.  Polynomials are stored
lowest degree first with trailing exact zeros trimmed; the zero polynomial
has an empty coefficient tuple and degree -1.
"""

from __future__ import annotations

from .errors import MopkitError
from .scalars import same_backend


class Poly:
    """Dense univariate polynomial over a scalar backend."""

    __slots__ = ("backend", "coeffs")

    def __init__(self, backend, coeffs, raw=False):
        if not raw:
            coeffs = [backend.scalar(c) for c in coeffs]
        while coeffs and backend.is_zero(coeffs[-1]):
            coeffs.pop()
        self.backend = backend
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, backend):
        return cls(backend, [], raw=True)

    @classmethod
    def one(cls, backend):
        return cls(backend, [backend.one], raw=True)

    @classmethod
    def x(cls, backend):
        return cls(backend, [backend.zero, backend.one], raw=True)

    @classmethod
    def monomial(cls, backend, power, coeff=1):
        c = backend.scalar(coeff)
        return cls(backend, [backend.zero] * power + [c], raw=True)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        """Leading coefficient (of the zero polynomial: backend zero)."""
        return self.coeffs[-1] if self.coeffs else self.backend.zero

    def coefficient(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.backend.zero

    def __add__(self, other):
        b = same_backend(self.backend, other.backend)
        n = max(len(self.coeffs), len(other.coeffs))
        out = [self.coefficient(i) + other.coefficient(i) for i in range(n)]
        return Poly(b, out, raw=True)

    def __sub__(self, other):
        b = same_backend(self.backend, other.backend)
        n = max(len(self.coeffs), len(other.coeffs))
        out = [self.coefficient(i) - other.coefficient(i) for i in range(n)]
        return Poly(b, out, raw=True)

    def __neg__(self):
        return Poly(self.backend, [-c for c in self.coeffs], raw=True)

    def __mul__(self, other):
        b = same_backend(self.backend, other.backend)
        if self.is_zero or other.is_zero:
            return Poly.zero(b)
        out = [b.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, ci in enumerate(self.coeffs):
            for j, cj in enumerate(other.coeffs):
                out[i + j] = out[i + j] + ci * cj
        return Poly(b, out, raw=True)

    def scale(self, s):
        s = self.backend.scalar(s)
        if self.backend.is_zero(s):
            return Poly.zero(self.backend)
        return Poly(self.backend, [c * s for c in self.coeffs], raw=True)

    def shift(self, k: int):
        """Multiply by x**k, k >= 0."""
        if k < 0:
            raise ValueError("use LaurentPoly for negative shifts")
        if self.is_zero:
            return self
        return Poly(self.backend, [self.backend.zero] * k + list(self.coeffs), raw=True)

    def derivative(self):
        if len(self.coeffs) <= 1:
            return Poly.zero(self.backend)
        out = [self.coeffs[i] * i for i in range(1, len(self.coeffs))]
        return Poly(self.backend, out, raw=True)

    def __call__(self, x):
        acc = self.backend.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.backend is other.backend
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash(self.coeffs)

    def max_abs_coeff(self):
        m = self.backend.zero
        for c in self.coeffs:
            a = self.backend.abs(c)
            if a > m:
                m = a
        return m

    def monic(self):
        if self.is_zero:
            raise MopkitError("zero polynomial cannot be made monic")
        inv = self.backend.one / self.lc
        return self.scale(inv)

    def divmod(self, other):
        """Exact-backend polynomial division with remainder."""
        b = same_backend(self.backend, other.backend)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dlag = other.degree
        if self.degree < dlag:
            return Poly.zero(b), self
        quot = [b.zero] * (self.degree - dlag + 1)
        inv = b.one / other.lc
        for k in range(self.degree - dlag, -1, -1):
            q = rem[k + dlag] * inv
            quot[k] = q
            if not b.is_zero(q):
                for i, c in enumerate(other.coeffs):
                    rem[k + i] = rem[k + i] - q * c
        return Poly(b, quot, raw=True), Poly(b, rem, raw=True)

    def __repr__(self):
        if self.is_zero:
            return "Poly(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not self.backend.is_zero(c):
                parts.append(f"({c})*x^{i}" if i else f"({c})")
        return "Poly(" + " + ".join(parts) + ")"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm (exact backend only)."""
    if not a.backend.is_exact:
        raise MopkitError("polynomial gcd requires the exact backend")
    while not b.is_zero:
        _, r = a.divmod(b)
        a, b = b, r
    if a.is_zero:
        return a
    return a.monic()


def poly_content(polys) -> Poly:
    """Monic gcd of a collection of polynomials (exact backend)."""
    g = None
    for p in polys:
        if p.is_zero:
            continue
        g = p if g is None else poly_gcd(g, p)
        if g.degree == 0:
            break
    if g is None:
        raise MopkitError("content of an all-zero collection")
    return g.monic()


class LaurentPoly:
    """Laurent polynomial: coefficients from ``min_degree`` upward.

    Zero element: empty coefficients, min_degree 0.  First and last stored
    coefficients are nonzero.
    """

    __slots__ = ("backend", "min_degree", "coeffs")

    def __init__(self, backend, min_degree, coeffs, raw=False):
        if not raw:
            coeffs = [backend.scalar(c) for c in coeffs]
        else:
            coeffs = list(coeffs)
        while coeffs and backend.is_zero(coeffs[0]):
            coeffs.pop(0)
            min_degree += 1
        while coeffs and backend.is_zero(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            min_degree = 0
        self.backend = backend
        self.min_degree = min_degree
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, backend):
        return cls(backend, 0, [], raw=True)

    @classmethod
    def constant(cls, backend, c):
        return cls(backend, 0, [backend.scalar(c)])

    @classmethod
    def from_poly(cls, p: Poly):
        return cls(p.backend, 0, list(p.coeffs), raw=True)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def max_degree(self) -> int:
        return self.min_degree + len(self.coeffs) - 1

    def coefficient(self, k: int):
        i = k - self.min_degree
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.backend.zero

    def __add__(self, other):
        b = same_backend(self.backend, other.backend)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.min_degree, other.min_degree)
        hi = max(self.max_degree, other.max_degree)
        out = [self.coefficient(k) + other.coefficient(k) for k in range(lo, hi + 1)]
        return LaurentPoly(b, lo, out, raw=True)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LaurentPoly(self.backend, self.min_degree, [-c for c in self.coeffs], raw=True)

    def __mul__(self, other):
        b = same_backend(self.backend, other.backend)
        if self.is_zero or other.is_zero:
            return LaurentPoly.zero(b)
        out = [b.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, ci in enumerate(self.coeffs):
            for j, cj in enumerate(other.coeffs):
                out[i + j] = out[i + j] + ci * cj
        return LaurentPoly(b, self.min_degree + other.min_degree, out, raw=True)

    def scale(self, s):
        s = self.backend.scalar(s)
        if self.backend.is_zero(s):
            return LaurentPoly.zero(self.backend)
        return LaurentPoly(self.backend, self.min_degree, [c * s for c in self.coeffs], raw=True)

    def shift(self, k: int):
        """Multiply by x**k (any sign)."""
        if self.is_zero:
            return self
        return LaurentPoly(self.backend, self.min_degree + k, list(self.coeffs), raw=True)

    def derivative(self):
        """Entrywise d/dx with the power rule for negative exponents."""
        out = []
        for i, c in enumerate(self.coeffs):
            k = self.min_degree + i
            out.append(c * k)
        return LaurentPoly(self.backend, self.min_degree - 1, out, raw=True)

    def __call__(self, x):
        acc = self.backend.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc * x**self.min_degree

    def as_poly(self) -> Poly:
        if self.is_zero:
            return Poly.zero(self.backend)
        if self.min_degree < 0:
            raise MopkitError("Laurent polynomial has negative powers")
        return Poly(self.backend, [self.backend.zero] * self.min_degree + list(self.coeffs), raw=True)

    def __eq__(self, other):
        return (
            isinstance(other, LaurentPoly)
            and self.backend is other.backend
            and self.min_degree == other.min_degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.min_degree, self.coeffs))

    def max_abs_coeff(self):
        m = self.backend.zero
        for c in self.coeffs:
            a = self.backend.abs(c)
            if a > m:
                m = a
        return m

    def __repr__(self):
        if self.is_zero:
            return "LaurentPoly(0)"
        parts = [f"({c})*x^{self.min_degree + i}" for i, c in enumerate(self.coeffs)
                 if not self.backend.is_zero(c)]
        return "LaurentPoly(" + " + ".join(parts) + ")"


class RationalFn:
    """Quotient of two polynomials.

    Exact backend: stored with common factors removed (gcd) and a monic
    denominator.  Float backend: gcd is ill-posed, so only the monic
    denominator normalization is applied.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly, simplify=True):
        b = same_backend(num.backend, den.backend)
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            den = Poly.one(b)
        elif simplify and b.is_exact:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, _ = num.divmod(g)
                den, _ = den.divmod(g)
        if not den.is_zero and not b.is_zero(den.lc - b.one):
            inv = b.one / den.lc
            num = num.scale(inv)
            den = den.scale(inv)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: Poly):
        return cls(p, Poly.one(p.backend), simplify=False)

    @classmethod
    def from_laurent(cls, p: LaurentPoly):
        if p.min_degree >= 0:
            return cls.from_poly(p.as_poly())
        num = Poly(p.backend, list(p.coeffs), raw=True)
        den = Poly.monomial(p.backend, -p.min_degree)
        return cls(num, den)

    @property
    def backend(self):
        return self.num.backend

    @property
    def is_zero(self):
        return self.num.is_zero

    def __add__(self, other):
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        return RationalFn(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RationalFn(-self.num, self.den, simplify=False)

    def __mul__(self, other):
        return RationalFn(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __eq__(self, other):
        if not isinstance(other, RationalFn):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __repr__(self):
        return f"RationalFn({self.num!r} / {self.den!r})"
