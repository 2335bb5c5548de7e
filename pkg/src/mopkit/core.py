"""Type I and type II polynomial systems built from normalized moments.

All indices here are 0-based: families are ``0..r-1`` and a multi-index is a
tuple of r nonnegative integers.  Type I vectors are normalized against the
normalized measures (mu_0 = 1 per family), which makes every identity
verified downstream scale-free; see :mod:`mopkit.weights`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IdentityViolation, LatticeError, NotNormal, SingularMatrix
from .matrices import ScalarMatrix, solve_linear
from .polynomials import Poly
from .report import FLAG, PASS, CheckSet
from .weights import WeightSystem


@dataclass(frozen=True)
class MultiIndex:
    parts: tuple

    def __post_init__(self):
        if any(p < 0 for p in self.parts):
            raise LatticeError(f"negative entry in multi-index {self.parts}")

    @classmethod
    def of(cls, parts) -> "MultiIndex":
        if isinstance(parts, MultiIndex):
            return parts
        return cls(tuple(int(p) for p in parts))

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def r(self) -> int:
        return len(self.parts)

    def up(self, j: int) -> "MultiIndex":
        p = list(self.parts)
        p[j] += 1
        return MultiIndex(tuple(p))

    def down(self, j: int) -> "MultiIndex":
        if self.parts[j] == 0:
            raise LatticeError(f"cannot lower coordinate {j} of {self.parts}")
        p = list(self.parts)
        p[j] -= 1
        return MultiIndex(tuple(p))

    def has_down(self, j: int) -> bool:
        return self.parts[j] > 0

    def le(self, other: "MultiIndex") -> bool:
        return all(a <= b for a, b in zip(self.parts, other.parts))

    def __getitem__(self, j):
        return self.parts[j]

    def __iter__(self):
        return iter(self.parts)

    def sort_key(self):
        return (self.size, self.parts)

    def __repr__(self):
        return f"MultiIndex{self.parts}"


def lattice(r: int, max_size: int, min_size: int = 0):
    """All multi-indices with min_size <= |n| <= max_size, sorted."""
    out = []

    def rec(prefix, remaining_slots):
        if remaining_slots == 0:
            n = MultiIndex(tuple(prefix))
            if n.size >= min_size:
                out.append(n)
            return
        for v in range(max_size - sum(prefix) + 1):
            rec(prefix + [v], remaining_slots - 1)

    rec([], r)
    out.sort(key=MultiIndex.sort_key)
    return out


# -- moment functional ------------------------------------------------------


def integral(ws: WeightSystem, family: int, p: Poly, shift: int = 0):
    """Integral of p(t) * t**shift against the normalized measure."""
    acc = ws.backend.zero
    for i, c in enumerate(p.coeffs):
        if not ws.backend.is_zero(c):
            acc = acc + c * ws.moment(family, i + shift)
    return acc


def inner(ws: WeightSystem, family: int, p: Poly, q: Poly, shift: int = 0):
    """Integral of p(t) q(t) t**shift against the normalized measure."""
    return integral(ws, family, p * q, shift)


# -- type II -----------------------------------------------------------------


@dataclass(frozen=True)
class TypeTwoPoly:
    """Monic polynomial of degree |n| orthogonal to x^k (k < n_j) per family.

    The normalizing constants gamma of the lower neighbors are available on
    demand through :func:`gamma`.
    """

    index: MultiIndex
    poly: Poly


@dataclass(frozen=True)
class TypeOneVector:
    """Vector (A_0, ..., A_{r-1}) with deg A_j <= n_j - 1.

    Orthogonality holds for powers up to |n|-2 and the power |n|-1 pairs to
    exactly 1 against the normalized measures.  ``kappa[j]`` is the
    coefficient of x**(n_j - 1) in A_j.
    """

    index: MultiIndex
    polys: tuple
    kappa: tuple


def _solve_scale(ws, matrix_entries):
    if ws.backend.is_exact:
        return ws.backend.one
    m = ws.backend.one
    for row in matrix_entries:
        for v in row:
            a = abs(v)
            if a > m:
                m = a
    return m


def type2(ws: WeightSystem, n) -> TypeTwoPoly:
    """The monic type II polynomial at n (memoized)."""
    n = MultiIndex.of(n)

    def build():
        s = n.size
        if s == 0:
            return TypeTwoPoly(n, Poly.one(ws.backend))
        rows, rhs = [], []
        for j, nj in enumerate(n.parts):
            for k in range(nj):
                rows.append([ws.moment(j, k + i) for i in range(s)])
                rhs.append(-ws.moment(j, k + s))
        a = ScalarMatrix(ws.backend, rows, raw=True)
        try:
            low = solve_linear(a, rhs)
        except SingularMatrix as exc:
            raise NotNormal(f"index {n.parts} is not normal: {exc}") from exc
        p = Poly(ws.backend, low + [ws.backend.one], raw=True)
        _recheck_type2(ws, n, p, rows)
        return TypeTwoPoly(n, p)

    return ws.cached(("type2", n.parts), build)


def _recheck_type2(ws, n, p, rows):
    # Hankel-type solves are the most error-prone component; re-verify all
    # defining residuals after each solve (O(|n|^2), cheap insurance).
    scale = _solve_scale(ws, rows) if rows else ws.backend.one
    for j, nj in enumerate(n.parts):
        for k in range(nj):
            res = integral(ws, j, p, shift=k)
            if not ws.near_zero(res, scale):
                raise NotNormal(
                    f"type II solve at {n.parts} failed re-check "
                    f"(family {j}, power {k}: residual {res})"
                )


def type1(ws: WeightSystem, n) -> TypeOneVector:
    """The normalized type I vector at n (memoized); requires |n| >= 1."""
    n = MultiIndex.of(n)
    if n.size < 1:
        raise LatticeError("type I vector needs |n| >= 1")

    def build():
        s = n.size
        cols = [(j, i) for j, nj in enumerate(n.parts) for i in range(nj)]
        rows = [[ws.moment(j, k + i) for (j, i) in cols] for k in range(s)]
        rhs = [ws.backend.zero] * (s - 1) + [ws.backend.one]
        a = ScalarMatrix(ws.backend, rows, raw=True)
        try:
            sol = solve_linear(a, rhs)
        except SingularMatrix as exc:
            raise NotNormal(f"index {n.parts} is not normal: {exc}") from exc
        polys, kappa = [], []
        pos = 0
        for j, nj in enumerate(n.parts):
            coeffs = sol[pos : pos + nj]
            pos += nj
            polys.append(Poly(ws.backend, list(coeffs), raw=True))
            kappa.append(coeffs[nj - 1] if nj else ws.backend.zero)
        _recheck_type1(ws, n, polys, rows)
        return TypeOneVector(n, tuple(polys), tuple(kappa))

    return ws.cached(("type1", n.parts), build)


def _recheck_type1(ws, n, polys, rows):
    scale = _solve_scale(ws, rows)
    s = n.size
    for k in range(s):
        acc = ws.backend.zero
        for j, p in enumerate(polys):
            acc = acc + integral(ws, j, p, shift=k)
        target = ws.backend.one if k == s - 1 else ws.backend.zero
        if not ws.near_zero(acc - target, scale):
            raise NotNormal(
                f"type I solve at {n.parts} failed re-check (power {k}: {acc})"
            )


def gamma(ws: WeightSystem, n, j: int):
    """1/gamma = integral of x^(n_j - 1) P_{n - e_j} against family j."""
    n = MultiIndex.of(n)
    if not n.has_down(j):
        raise LatticeError(f"gamma needs n_{j} >= 1 at {n.parts}")

    def build():
        p = type2(ws, n.down(j)).poly
        val = integral(ws, j, p, shift=n.parts[j] - 1)
        if ws.near_zero(val, ws.backend.one):
            raise NotNormal(
                f"vanishing normalization integral at {n.parts}, family {j}"
            )
        return ws.backend.one / val

    return ws.cached(("gamma", n.parts, j), build)


def coeff_a(ws: WeightSystem, n, j: int):
    """Moment-ratio form of the lower-neighbor recurrence coefficient."""
    n = MultiIndex.of(n)
    if not n.has_down(j):
        return ws.backend.zero
    num = integral(ws, j, type2(ws, n).poly, shift=n.parts[j])
    den = integral(ws, j, type2(ws, n.down(j)).poly, shift=n.parts[j] - 1)
    if ws.near_zero(den, ws.backend.one):
        raise NotNormal(f"vanishing denominator for a at {n.parts}, family {j}")
    return num / den


def is_normal(ws: WeightSystem, n) -> bool:
    """True iff the mixed-moment solve at n succeeds."""
    try:
        type2(ws, n)
        if MultiIndex.of(n).size >= 1:
            type1(ws, n)
        return True
    except NotNormal:
        return False


def biorthogonality(ws: WeightSystem, n, m):
    """Integral of P_n times the type I function of index m (scale-free)."""
    n = MultiIndex.of(n)
    m = MultiIndex.of(m)
    p = type2(ws, n).poly
    avec = type1(ws, m)
    acc = ws.backend.zero
    for k in range(ws.r):
        if not avec.polys[k].is_zero:
            acc = acc + inner(ws, k, p, avec.polys[k])
    return acc


# -- Christoffel-Darboux ------------------------------------------------------


def staircase_path(n, order=None):
    """Lattice path 0 -> n as a list of coordinate steps.

    Default order walks coordinate 0 first, then 1, and so on; pass a
    permutation of range(r) to change the sweep order.
    """
    n = MultiIndex.of(n)
    order = list(order) if order is not None else list(range(n.r))
    path = []
    for j in order:
        path.extend([j] * n.parts[j])
    return path


def path_from_string(text: str):
    """Path notation over '1'..'r' (1-based coordinates)."""
    return [int(ch) - 1 for ch in text.strip()]


def path_indices(n, path):
    n = MultiIndex.of(n)
    if sorted(path) != sorted(staircase_path(n)):
        raise ValueError(f"path {path} does not lead from 0 to {n.parts}")
    seq = [MultiIndex(tuple([0] * n.r))]
    for step in path:
        seq.append(seq[-1].up(step))
    return seq


class _Bivariate:
    """Sparse polynomial in (x, y) used for the two-variable identities."""

    def __init__(self, backend):
        self.backend = backend
        self.terms = {}

    def add_outer(self, p: Poly, q: Poly, factor=None):
        if p.is_zero or q.is_zero:
            return self
        if factor is not None and self.backend.is_zero(factor):
            return self
        for i, ci in enumerate(p.coeffs):
            for j, cj in enumerate(q.coeffs):
                v = ci * cj
                if factor is not None:
                    v = v * factor
                key = (i, j)
                self.terms[key] = self.terms.get(key, self.backend.zero) + v
        return self

    def mul_x_minus_y(self):
        out = _Bivariate(self.backend)
        for (i, j), v in self.terms.items():
            out.terms[(i + 1, j)] = out.terms.get((i + 1, j), self.backend.zero) + v
            out.terms[(i, j + 1)] = out.terms.get((i, j + 1), self.backend.zero) - v
        return out

    def sub(self, other):
        out = _Bivariate(self.backend)
        out.terms = dict(self.terms)
        for k, v in other.terms.items():
            out.terms[k] = out.terms.get(k, self.backend.zero) - v
        return out

    def max_abs(self):
        m = self.backend.zero
        for v in self.terms.values():
            a = self.backend.abs(v)
            if a > m:
                m = a
        return m


def verify_cd(ws: WeightSystem, n, path_a=None, path_b=None) -> CheckSet:
    """Check the Christoffel-Darboux identity along two lattice paths.

    For each family k the component identity

        (x - y) sum_i P_{n_i}(x) A_{n_{i+1},k}(y)
            = P_n(x) A_{n,k}(y) - sum_j a_j P_{n-e_j}(x) A_{n+e_j,k}(y)

    is verified as a bivariate polynomial identity, for both paths, along
    with equality of the two left-hand sides.  Raises IdentityViolation on
    any nonzero residual.
    """
    n = MultiIndex.of(n)
    if path_a is None:
        path_a = staircase_path(n)
    if path_b is None:
        path_b = staircase_path(n, order=range(n.r - 1, -1, -1))
    report = CheckSet("cd", n.parts)
    seq_a = path_indices(n, path_a)
    seq_b = path_indices(n, path_b)
    a_coeffs = [coeff_a(ws, n, j) for j in range(ws.r)]
    p_top = type2(ws, n).poly
    a_top = type1(ws, n)

    def lhs(seq, k):
        acc = _Bivariate(ws.backend)
        for i in range(n.size):
            acc.add_outer(type2(ws, seq[i]).poly, type1(ws, seq[i + 1]).polys[k])
        return acc.mul_x_minus_y()

    worst = None
    for k in range(ws.r):
        rhs = _Bivariate(ws.backend)
        rhs.add_outer(p_top, a_top.polys[k])
        for j in range(ws.r):
            if n.has_down(j):
                rhs.add_outer(
                    type2(ws, n.down(j)).poly,
                    type1(ws, n.up(j)).polys[k],
                    factor=-a_coeffs[j],
                )
        la = lhs(seq_a, k)
        lb = lhs(seq_b, k)
        scale = max(la.max_abs(), rhs.max_abs())
        for label, biv in (("path_a", la), ("path_b", lb)):
            res = biv.sub(rhs).max_abs()
            if worst is None or res > worst:
                worst = res
            report.add_residual(
                f"component_{k}_{label}",
                ws.near_zero(res, scale),
                ws.residual_str(res),
            )
        res_paths = la.sub(lb).max_abs()
        if res_paths > worst:
            worst = res_paths
        report.add_residual(
            f"component_{k}_paths_agree",
            ws.near_zero(res_paths, scale),
            ws.residual_str(res_paths),
        )
    agg = PASS if report.ok else FLAG
    report.add("weighted_sum_aggregate", agg, detail="implied by the components")
    if not report.ok:
        raise IdentityViolation(
            f"Christoffel-Darboux residual {ws.residual_str(worst)} at {n.parts}",
            report,
        )
    return report
