"""Order-(r+1) differential equations by elimination.

From P-vector' = N P-vector one gets P-vector^{(k)} = N_k P-vector with
N_1 = N and N_{k+1} = N_k' + N_k N.  The top rows of N_1..N_r express the
lower neighbors P_{n-e_j} through P, P', ..., P^{(r)}; substituting into the
top row of N_{r+1} yields one linear ODE for P_n.  The same elimination with
-N^T in place of N yields the ODE for the type I polynomials, which is
independent of the component l by construction.

The elimination runs over rational functions: exact gcd-based simplification
in the rational backend, monic-denominator normalization only in the float
backend (float gcd is ill-posed, so those coefficients are reported
unsimplified and only checked degree-wise).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import MultiIndex, type1, type2
from .errors import DegenerateElimination, IdentityViolation
from .ladder import ladder_matrix
from .polynomials import Poly, RationalFn, poly_content
from .report import CheckSet
from .weights import WeightSystem


@dataclass(frozen=True)
class OdeCoeffs:
    """Linear ODE sum coeffs[k] * p^(order-k) = 0.

    ``coeffs[0]`` multiplies the highest derivative.  In the exact backend
    the coefficients carry no common polynomial factor and the leading
    polynomial is monic; ``content`` records the factor that was removed.
    """

    order: int
    coeffs: tuple
    content: Poly

    def coefficient_of_derivative(self, k: int) -> Poly:
        """Coefficient of p^(k)."""
        return self.coeffs[self.order - k]

    def apply(self, p: Poly) -> Poly:
        acc = Poly.zero(p.backend)
        d = p
        for k in range(self.order + 1):
            acc = acc + self.coefficient_of_derivative(k) * d
            d = d.derivative()
        return acc


def matrix_power_rows(ws, nmat, count):
    """Top rows of N_1..N_count where N_{k+1} = N_k' + N_k N."""
    rows = []
    current = nmat
    rows.append(list(current.entries[0]))
    for _ in range(count - 1):
        current = current.derivative() + current * nmat
        rows.append(list(current.entries[0]))
    return rows


def _ratfn_is_zero(ws, fn: RationalFn, scale):
    if fn.num.is_zero:
        return True
    if ws.backend.is_exact:
        return False
    return ws.backend.near_zero(fn.num.max_abs_coeff(), scale)


def _eliminate(ws, rows):
    """Solve the r x r rational-function system for the lower neighbors.

    ``rows[k-1]`` is the top row of N_k as Laurent entries.  Returns, for
    each unknown, its expansion over the symbols [p, p', ..., p^{(r)}].
    """
    r = ws.r
    g = [[RationalFn.from_laurent(rows[k][j + 1]) for j in range(r)] for k in range(r)]
    zero = RationalFn.from_poly(Poly.zero(ws.backend))
    one = RationalFn.from_poly(Poly.one(ws.backend))
    # rhs[k] = p^{(k+1)} - g_{k0} p, as a symbol vector of length r+1
    rhs = []
    for k in range(r):
        vec = [zero] * (r + 1)
        vec[k + 1] = one
        vec[0] = zero - RationalFn.from_laurent(rows[k][0])
        rhs.append(vec)

    scale = ws.backend.one
    if not ws.backend.is_exact:
        mags = [e.num.max_abs_coeff() for row in g for e in row if not e.num.is_zero]
        scale = max([ws.backend.one] + mags)

    # Gaussian elimination over the rational-function field.
    cols = list(range(r))
    for piv in range(r):
        pivot_row = None
        for i in range(piv, r):
            if not _ratfn_is_zero(ws, g[i][piv], scale):
                pivot_row = i
                break
        if pivot_row is None:
            raise DegenerateElimination(
                f"elimination system is singular at pivot {piv}"
            )
        if pivot_row != piv:
            g[piv], g[pivot_row] = g[pivot_row], g[piv]
            rhs[piv], rhs[pivot_row] = rhs[pivot_row], rhs[piv]
        inv = one / g[piv][piv]
        g[piv] = [e * inv for e in g[piv]]
        rhs[piv] = [e * inv for e in rhs[piv]]
        for i in range(r):
            if i == piv or _ratfn_is_zero(ws, g[i][piv], scale):
                continue
            f = g[i][piv]
            g[i] = [a - f * b for a, b in zip(g[i], g[piv])]
            rhs[i] = [a - f * b for a, b in zip(rhs[i], rhs[piv])]
    return [rhs[cols.index(j)] for j in range(r)]


def _derive(ws, nmat) -> OdeCoeffs:
    r = ws.r
    rows = matrix_power_rows(ws, nmat, r + 1)
    solution = _eliminate(ws, rows)
    zero = RationalFn.from_poly(Poly.zero(ws.backend))
    one = RationalFn.from_poly(Poly.one(ws.backend))
    # 0 = p^{(r+1)} - g_{r+1,0} p - sum_j g_{r+1,j} (solution_j . symbols)
    coeffs = [zero] * (r + 2)  # symbol order: p, p', ..., p^{(r+1)}
    coeffs[r + 1] = one
    coeffs[0] = zero - RationalFn.from_laurent(rows[r][0])
    for j in range(r):
        gj = RationalFn.from_laurent(rows[r][j + 1])
        if _ratfn_is_zero(ws, gj, ws.backend.one):
            continue
        for k in range(r + 1):
            coeffs[k] = coeffs[k] - gj * solution[j][k]
    return _clear_and_normalize(ws, coeffs)


def _clear_and_normalize(ws, coeffs) -> OdeCoeffs:
    """Multiply through by a common denominator; remove content (exact)."""
    b = ws.backend
    r_plus_2 = len(coeffs)
    if b.is_exact:
        common = Poly.one(b)
        from .polynomials import poly_gcd

        for fn in coeffs:
            g = poly_gcd(common, fn.den)
            extra, _ = fn.den.divmod(g)
            common = common * extra
        polys = []
        for fn in coeffs:
            mult, rem = common.divmod(fn.den)
            assert rem.is_zero
            polys.append(fn.num * mult)
        content = poly_content(polys)
        if content.degree > 0:
            polys = [p.divmod(content)[0] for p in polys]
        lead = polys[-1]
        if lead.is_zero:
            raise DegenerateElimination("vanishing leading ODE coefficient")
        scale = b.one / lead.lc
        polys = [p.scale(scale) for p in polys]
    else:
        content = Poly.one(b)
        polys = []
        for i, fn in enumerate(coeffs):
            p = fn.num
            for k, other in enumerate(coeffs):
                if k != i:
                    p = p * other.den
            polys.append(p)
        mags = [p.max_abs_coeff() for p in polys if not p.is_zero]
        top = max(mags) if mags else b.one
        if b.near_zero(polys[-1].max_abs_coeff(), top):
            raise DegenerateElimination("vanishing leading ODE coefficient")
        inv = b.one / top
        polys = [p.scale(inv) for p in polys]
    # store descending: coefficient of p^{(order)} first
    return OdeCoeffs(r_plus_2 - 1, tuple(reversed(polys)), content)


def derive_ode_type2(ws: WeightSystem, n) -> OdeCoeffs:
    """The order-(r+1) ODE annihilating the type II polynomial at n."""
    n = MultiIndex.of(n)
    return _derive(ws, ladder_matrix(ws, n))


def derive_ode_type1(ws: WeightSystem, n) -> OdeCoeffs:
    """The order-(r+1) ODE annihilating every type I component at n.

    Uses the transposed, negated ladder matrix; the result does not depend
    on which component is considered.
    """
    n = MultiIndex.of(n)
    return _derive(ws, ladder_matrix(ws, n).transpose().neg())


def annihilation_residual(ws: WeightSystem, ode: OdeCoeffs, p: Poly):
    """(residual, scale): max |coefficient| of sum c_k p^{(k)} and of its terms."""
    b = ws.backend
    acc = Poly.zero(b)
    scale = b.one
    d = p
    for k in range(ode.order + 1):
        term = ode.coefficient_of_derivative(k) * d
        m = term.max_abs_coeff()
        if m > scale:
            scale = m
        acc = acc + term
        d = d.derivative()
    return acc.max_abs_coeff(), scale


def verify_annihilation(ws: WeightSystem, ode: OdeCoeffs, p: Poly, rel_tol=None) -> CheckSet:
    """Check that the ODE annihilates p (exactly, or relative to rel_tol)."""
    res, scale = annihilation_residual(ws, ode, p)
    report = CheckSet("annihilation")
    if rel_tol is not None and not ws.backend.is_exact:
        ok = res <= ws.backend.ctx.mpf(rel_tol) * scale
    else:
        ok = ws.near_zero(res, scale)
    report.add_residual("annihilation", ok, ws.residual_str(res))
    if not report.ok:
        raise IdentityViolation("differential equation does not annihilate", report)
    return report


def effective_degrees(ws: WeightSystem, ode: OdeCoeffs):
    """Degrees of the coefficients, ignoring float roundoff junk."""
    if ws.backend.is_exact:
        return [c.degree for c in ode.coeffs]
    top = ws.backend.one
    for c in ode.coeffs:
        m = c.max_abs_coeff()
        if m > top:
            top = m
    out = []
    for c in ode.coeffs:
        deg = -1
        for k in range(c.degree, -1, -1):
            if not ws.backend.near_zero(c.coefficient(k), top):
                deg = k
                break
        out.append(deg)
    return out


def verify_type1_annihilates_all(ws: WeightSystem, n, rel_tol=None) -> CheckSet:
    """The type I ODE annihilates every component A_{n,l}."""
    n = MultiIndex.of(n)
    ode = derive_ode_type1(ws, n)
    avec = type1(ws, n)
    report = CheckSet("ode1", n.parts)
    for l in range(ws.r):
        if avec.polys[l].is_zero:
            report.add(f"component_{l}", "pass", detail="zero component")
            continue
        sub = verify_annihilation(ws, ode, avec.polys[l], rel_tol)
        report.add(f"component_{l}", "pass", sub.checks[0].residual)
    return report


def verify_type2_annihilated(ws: WeightSystem, n, rel_tol=None) -> CheckSet:
    n = MultiIndex.of(n)
    ode = derive_ode_type2(ws, n)
    report = CheckSet("ode2", n.parts)
    sub = verify_annihilation(ws, ode, type2(ws, n).poly, rel_tol)
    report.add("type2", "pass", sub.checks[0].residual)
    return report
