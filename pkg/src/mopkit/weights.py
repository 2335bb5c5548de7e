"""Weight families, normalized moment tables and ladder-kernel expansions.

Every weight is of the form ``x**alpha * exp(-V(x))`` with polynomial ``V``
of degree at most 3.  Moments are stored normalized (mu_0 = 1 for every
family): the polynomials and all recurrence coefficients are invariant under
a positive rescaling of each measure, type I vectors rescale per weight, and
every identity verified downstream is formulated in this scale-free form.

The supported families:

* ``hermite``: weights exp(-x^2 + c_j x) on the real line, c_j pairwise
  distinct.  Exact rational moments.
* ``laguerre2``: weights x^alpha exp(-c_j x) on [0, inf), alpha > 0,
  c_j > 0 pairwise distinct.  Exact rational moments.
* ``laguerre1``: weights x^alpha_j exp(-x) on [0, inf), alpha_j > 0 and
  alpha_i - alpha_j never an integer.  Exact rational moments.
* ``cubic``: weights exp(-x^3/3 - c_j x) on the two-ray contour
  arg x = +-2*pi/3, c_j distinct.  Complex BigFloat arithmetic; the two
  seed values per family come from high-precision contour quadrature and the
  rest of the table follows from the integration-by-parts recurrence
  nu_{k+2} = k nu_{k-1} - c nu_k.
* ``classical_r1``: the single weight exp(-x^2 + c x), used for the r = 1
  reduction checks.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .errors import ConfigError, InvalidMoment, PrecisionExhausted, UnsupportedPotential
from .polynomials import LaurentPoly, Poly
from .scalars import RATIONAL, BigFloatBackend


@dataclass(frozen=True)
class KernelTerm:
    x_power: int
    t_power: int
    coeff: object


@dataclass(frozen=True)
class KernelExpansion:
    """Finite expansion of (v'(t) - v'(x)) / (x - t) as sum c * x^p * t^q."""

    family_index: int
    terms: tuple

    def __call__(self, x, t):
        backend_zero = 0 * x
        acc = backend_zero
        for term in self.terms:
            acc = acc + term.coeff * x**term.x_power * t**term.t_power
        return acc


class WeightDescriptor:
    """One weight x^alpha * exp(-V(x)); subclasses fix the family specifics.

    ``alpha`` is None when there is no x^alpha factor.  ``vprime_poly`` is
    V'(x) in the system backend, so the full potential derivative is
    v'(x) = -alpha/x + V'(x).
    """

    kind = "abstract"

    def __init__(self, backend, alpha, vprime_coeffs):
        self.backend = backend
        self.alpha = backend.scalar(alpha) if alpha is not None else None
        self.vprime_poly = Poly(backend, vprime_coeffs)
        if self.vprime_poly.degree > 2:
            raise UnsupportedPotential("potential degree above 3 is not supported")

    def vprime_laurent(self) -> LaurentPoly:
        p = LaurentPoly.from_poly(self.vprime_poly)
        if self.alpha is not None:
            p = p + LaurentPoly(self.backend, -1, [-self.alpha], raw=True)
        return p

    def kernel_terms(self):
        """Expansion of (v'(t)-v'(x))/(x-t).

        The x^alpha factor contributes the single term -alpha/(x t); a
        monomial b*x^s in V' contributes -b * sum_{u+v=s-1} x^u t^v.
        """
        terms = []
        if self.alpha is not None:
            terms.append(KernelTerm(-1, -1, -self.alpha))
        for s in range(1, self.vprime_poly.degree + 1):
            b = self.vprime_poly.coefficient(s)
            if self.backend.is_zero(b):
                continue
            for u in range(s):
                terms.append(KernelTerm(u, s - 1 - u, -b))
        return tuple(terms)

    def moment_minus_one(self):
        raise InvalidMoment(f"{self.kind}: moment index -1 is not defined")

    def extend(self, mu: dict, k: int):
        """Fill mu[k] given mu[0..k-1] (normalized)."""
        raise NotImplementedError


class HermiteWeight(WeightDescriptor):
    """exp(-x^2 + c x): mu_{k+1} = (c mu_k + k mu_{k-1}) / 2."""

    kind = "hermite"

    def __init__(self, backend, c):
        super().__init__(backend, None, [backend.scalar(c) * backend.scalar(-1), 2])
        self.c = backend.scalar(c)

    def extend(self, mu, k):
        two = self.backend.scalar(2)
        prev2 = mu[k - 2] * (k - 1) if k >= 2 else self.backend.zero
        mu[k] = (self.c * mu[k - 1] + prev2) / two


class LaguerreSecondWeight(WeightDescriptor):
    """x^alpha exp(-c x): mu_k = mu_{k-1} (alpha + k) / c, mu_{-1} = c/alpha."""

    kind = "laguerre2"

    def __init__(self, backend, alpha, c):
        super().__init__(backend, alpha, [c])
        self.c = backend.scalar(c)

    def moment_minus_one(self):
        return self.c / self.alpha

    def extend(self, mu, k):
        mu[k] = mu[k - 1] * (self.alpha + k) / self.c


class LaguerreFirstWeight(WeightDescriptor):
    """x^alpha exp(-x): mu_k = mu_{k-1} (alpha + k), mu_{-1} = 1/alpha."""

    kind = "laguerre1"

    def __init__(self, backend, alpha):
        super().__init__(backend, alpha, [1])
        self.alpha_param = backend.scalar(alpha)

    def moment_minus_one(self):
        return self.backend.one / self.alpha

    def extend(self, mu, k):
        mu[k] = mu[k - 1] * (self.alpha + k)


class CubicWeight(WeightDescriptor):
    """exp(-x^3/3 - c x) on the rays arg x = +-2*pi/3.

    nu_{k+2} = k nu_{k-1} - c nu_k by integration by parts; the same
    recurrence holds for the normalized table.  Seeds mu_1 = nu_1/nu_0 come
    from contour quadrature.
    """

    kind = "cubic"

    def __init__(self, backend, c):
        super().__init__(backend, None, [backend.scalar(c), 0, 1])
        self.c = backend.scalar(c)
        self._mu1 = None

    def seed_mu1(self):
        if self._mu1 is None:
            nu0, nu1 = cubic_seeds(self.c, self.backend)
            self._mu1 = nu1 / nu0
        return self._mu1

    def extend(self, mu, k):
        if k == 1:
            mu[1] = self.seed_mu1()
        elif k == 2:
            # k'=0 case of the recurrence: nu_2 = -c nu_0
            mu[2] = -self.c * mu[0]
        else:
            j = k - 2
            mu[k] = mu[j - 1] * j - self.c * mu[j]


def cubic_seeds(c, backend, validate=True):
    """nu_0 and nu_1 for exp(-x^3/3 - c x) over the two-ray contour.

    Orientation: incoming along arg x = -2*pi/3, outgoing along +2*pi/3.
    Gauss-type quadrature at two working precisions; the values must agree
    to (precision_digits - 10) digits or PrecisionExhausted is raised.
    """
    import math

    ctx = backend.ctx
    digits = backend.digits
    cmod = float(abs(c))

    def compute(working_dps):
        # Truncation: e^{-S^3/3 + |c| S} < 10^-(wp+10); fixed-point iterate.
        target = (working_dps + 10) * math.log(10.0)
        s_max = (3.0 * target) ** (1.0 / 3.0)
        for _ in range(8):
            s_max = (3.0 * (target + cmod * s_max)) ** (1.0 / 3.0)
        # |exp(-c s w)| can grow like exp(|c| s); budget extra digits.
        extra = int(cmod * s_max / math.log(10.0)) + 1
        if working_dps + extra > 40 * digits:
            raise PrecisionExhausted(
                f"|c| = {cmod} needs more than {40 * digits} working digits"
            )
        with ctx.workdps(working_dps + extra):
            w = ctx.expjpi(ctx.mpf(2) / 3)
            wb = ctx.conj(w)
            smax = ctx.mpf(s_max)

            def ray(k, direction):
                f = lambda s: (s * direction) ** k * ctx.exp(
                    -(s**3) / 3 - c * s * direction
                ) * direction
                return ctx.quad(f, [0, 1, smax])

            nu0 = ray(0, w) - ray(0, wb)
            nu1 = ray(1, w) - ray(1, wb)
            return ctx.mpc(nu0), ctx.mpc(nu1)

    lo = compute(digits + 10)
    if not validate:
        return lo
    hi = compute(2 * digits + 10)
    tol = ctx.mpf(10) ** (-(digits - 10))
    for a, b in zip(lo, hi):
        scale = max(abs(b), ctx.mpf(1))
        if abs(a - b) > tol * scale:
            raise PrecisionExhausted(
                f"cubic seed quadrature did not converge to {digits - 10} digits"
            )
    return hi


class MomentTable:
    """Normalized moments mu_k = nu_k / nu_0 for one weight.

    Thread-safe memo: concurrent queries may duplicate work but always agree
    (entries are deterministic and never mutate once computed).
    """

    def __init__(self, descriptor: WeightDescriptor):
        self.descriptor = descriptor
        self.backend = descriptor.backend
        self._mu = {0: self.backend.one}
        self._minus_one = None
        self._lock = threading.Lock()
        self._top = 0

    def get(self, k: int):
        if k == -1:
            if self._minus_one is None:
                self._minus_one = self.descriptor.moment_minus_one()
            return self._minus_one
        if k < -1:
            raise InvalidMoment(f"moment index {k} below -1")
        if k > self._top:
            with self._lock:
                while self._top < k:
                    self.descriptor.extend(self._mu, self._top + 1)
                    self._top += 1
        return self._mu[k]


FAMILY_KINDS = ("hermite", "laguerre2", "laguerre1", "cubic", "classical_r1")


class WeightSystem:
    """r weight descriptors over one backend, plus all downstream caches."""

    def __init__(self, descriptors, backend, label="custom"):
        if not descriptors:
            raise ConfigError("a weight system needs at least one weight")
        self.families = tuple(descriptors)
        self.r = len(self.families)
        self.backend = backend
        self.label = label
        self.moments = tuple(MomentTable(d) for d in self.families)
        self.perturbation = None
        self.self_check = True
        self._cache = {}

    # -- construction ---------------------------------------------------

    @classmethod
    def hermite(cls, cs, backend=RATIONAL):
        cs = [backend.scalar(c) for c in cs]
        _require_distinct(cs, "hermite exponential shifts c_j")
        return cls([HermiteWeight(backend, c) for c in cs], backend, "hermite")

    @classmethod
    def laguerre_second(cls, alpha, cs, backend=RATIONAL):
        alpha = backend.scalar(alpha)
        cs = [backend.scalar(c) for c in cs]
        if backend.is_exact:
            if alpha <= 0:
                raise ConfigError("laguerre2 requires alpha > 0")
            if any(c <= 0 for c in cs):
                raise ConfigError("laguerre2 requires every c_j > 0")
        _require_distinct(cs, "laguerre2 rates c_j")
        return cls(
            [LaguerreSecondWeight(backend, alpha, c) for c in cs], backend, "laguerre2"
        )

    @classmethod
    def laguerre_first(cls, alphas, backend=RATIONAL):
        alphas = [backend.scalar(a) for a in alphas]
        if backend.is_exact:
            if any(a <= 0 for a in alphas):
                raise ConfigError("laguerre1 requires every alpha_j > 0")
            for i in range(len(alphas)):
                for j in range(i + 1, len(alphas)):
                    d = alphas[i] - alphas[j]
                    if d.denominator == 1:
                        raise ConfigError(
                            "laguerre1 requires alpha_i - alpha_j not an integer "
                            f"(got alpha_{i + 1} - alpha_{j + 1} = {d})"
                        )
        return cls([LaguerreFirstWeight(backend, a) for a in alphas], backend, "laguerre1")

    @classmethod
    def cubic(cls, cs, precision_digits):
        backend = BigFloatBackend(precision_digits)
        cs = [backend.scalar(c) for c in cs]
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                if cs[i] == cs[j]:
                    raise ConfigError("cubic requires pairwise distinct c_j")
        return cls([CubicWeight(backend, c) for c in cs], backend, "cubic")

    @classmethod
    def classical(cls, c, backend=RATIONAL):
        return cls([HermiteWeight(backend, c)], backend, "classical_r1")

    # -- moments and kernels ---------------------------------------------

    def moment(self, family: int, k: int):
        """Normalized moment mu_k of family ``family`` (0-based)."""
        return self.moments[family].get(k)

    def kernel_expansion(self, family: int) -> KernelExpansion:
        key = ("kernel", family)
        if key not in self._cache:
            self._cache[key] = KernelExpansion(family, self.families[family].kernel_terms())
        return self._cache[key]

    def vprime(self, family: int) -> LaurentPoly:
        return self.families[family].vprime_laurent()

    # -- scale/tolerance helpers -----------------------------------------

    def near_zero(self, value, scale=1):
        if self.backend.is_exact:
            return value == 0
        return self.backend.near_zero(value, scale)

    def residual_str(self, value):
        if self.backend.is_exact:
            return "0" if value == 0 else self.backend.to_string(value)
        return self.backend.ctx.nstr(abs(value), 8)

    # -- cache -------------------------------------------------------------

    def cached(self, key, builder):
        hit = self._cache.get(key)
        if hit is None:
            hit = builder()
            self._cache[key] = hit
        return hit


def _require_distinct(values, what):
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if values[i] == values[j]:
                raise ConfigError(f"{what} must be pairwise distinct")
