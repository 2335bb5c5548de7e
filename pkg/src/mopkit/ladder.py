"""Ladder matrix N, its differential identities, and compatibility with W.

The (r+1) x (r+1) matrix N(n; x) acts on the vector
(P_n, P_{n-e_1}, ..., P_{n-e_r}): column 0 pairs each row polynomial with
the type I vector at n through the kernel (v'(t) - v'(x))/(x - t); column
j >= 1 pairs it with the raised type I vector at n + e_j, scaled by -a_j,
plus the diagonal potential term v_i'(x).  Everything reduces to finite
moment sums because the weights are x^alpha exp(-polynomial).

Rows whose lower neighbor does not exist (n_i = 0) keep only the diagonal
potential term; they multiply a zero component in every identity, so any
convention is equivalent and zero is used for determinism.
"""

from __future__ import annotations

from .core import MultiIndex, integral, type1, type2
from .errors import IdentityViolation, LatticeError
from .matrices import LaurentMatrix
from .polynomials import LaurentPoly, Poly
from .report import FLAG, CheckSet
from .recurrence import nn_coeffs, transfer_matrix
from .weights import WeightSystem


def kernel_pairing(ws: WeightSystem, p: Poly, avec) -> LaurentPoly:
    """G(p, A)(x) = sum_k integral of p(t) A_k(t) (v_k'(t)-v_k'(x))/(x-t) w_k.

    Expanded through the finite kernel terms; returns a Laurent polynomial
    in x with min degree >= -1.
    """
    b = ws.backend
    acc = {}
    for k in range(ws.r):
        ak = avec.polys[k]
        if ak.is_zero:
            continue
        prod = p * ak
        for term in ws.kernel_expansion(k).terms:
            val = integral(ws, k, prod, shift=term.t_power) * term.coeff
            if not b.is_zero(val):
                acc[term.x_power] = acc.get(term.x_power, b.zero) + val
    if not acc:
        return LaurentPoly.zero(b)
    lo = min(acc)
    hi = max(acc)
    return LaurentPoly(b, lo, [acc.get(k, b.zero) for k in range(lo, hi + 1)], raw=True)


def ladder_matrix(ws: WeightSystem, n) -> LaurentMatrix:
    """N(n; x) built directly from kernel expansions (memoized)."""
    n = MultiIndex.of(n)

    def build():
        b = ws.backend
        coeffs = nn_coeffs(ws, n)
        avec_n = type1(ws, n) if n.size >= 1 else None
        avec_up = [type1(ws, n.up(j)) for j in range(ws.r)]
        row_polys = [type2(ws, n).poly]
        for i in range(ws.r):
            row_polys.append(type2(ws, n.down(i)).poly if n.has_down(i) else None)
        zero = LaurentPoly.zero(b)
        entries = []
        for i in range(ws.r + 1):
            p_i = row_polys[i]
            row = []
            for j in range(ws.r + 1):
                if p_i is None:
                    e = zero
                elif j == 0:
                    e = kernel_pairing(ws, p_i, avec_n) if avec_n else zero
                elif b.is_zero(coeffs.a[j - 1]):
                    e = zero
                else:
                    e = kernel_pairing(ws, p_i, avec_up[j - 1]).scale(-coeffs.a[j - 1])
                if i == j and i >= 1:
                    e = e + ws.vprime(i - 1)
                row.append(e)
            entries.append(row)
        return LaurentMatrix(b, entries)

    return ws.cached(("ladder", n.parts), build)


def _p_vector_laurent(ws, n):
    n = MultiIndex.of(n)
    out = [LaurentPoly.from_poly(type2(ws, n).poly)]
    exists = [True]
    for j in range(ws.r):
        if n.has_down(j):
            out.append(LaurentPoly.from_poly(type2(ws, n.down(j)).poly))
            exists.append(True)
        else:
            out.append(LaurentPoly.zero(ws.backend))
            exists.append(False)
    return out, exists


def verify_ladder_type2(ws: WeightSystem, n) -> CheckSet:
    """P-vector'(x) = N(x) P-vector(x), row by row.

    Row 0 is the lowering equation, rows i >= 1 the raising equations with
    the diagonal potential term.
    """
    n = MultiIndex.of(n)
    nmat = ladder_matrix(ws, n)
    pvec, exists = _p_vector_laurent(ws, n)
    report = CheckSet("ladder2", n.parts)
    scale = max([ws.backend.one] + [p.max_abs_coeff() for p in pvec])
    if not ws.backend.is_exact:
        scale = scale * max(nmat.max_abs_coeff(), ws.backend.one)
    for i in range(ws.r + 1):
        acc = LaurentPoly.zero(ws.backend)
        for j in range(ws.r + 1):
            acc = acc + nmat[i, j] * pvec[j]
        res = (pvec[i].derivative() - acc).max_abs_coeff()
        label = "lowering" if i == 0 else f"raising_{i - 1}"
        if not exists[i]:
            label += "_vacuous"
        report.add_residual(label, ws.near_zero(res, scale), ws.residual_str(res))
    if not report.ok:
        raise IdentityViolation(f"type II ladder fails at {n.parts}", report)
    return report


def verify_ladder_type1(ws: WeightSystem, n) -> CheckSet:
    """Type I ladder: u' + N^T u = 0 for u = (A_{n,l}, -a_1 A_{n+e_1,l}, ...).

    Checked componentwise for every l; scale-free because each component
    carries the same per-family normalization on both sides.
    """
    n = MultiIndex.of(n)
    if n.size < 1:
        raise LatticeError("type I ladder needs |n| >= 1")
    nmat = ladder_matrix(ws, n)
    coeffs = nn_coeffs(ws, n)
    avec_n = type1(ws, n)
    avec_up = [type1(ws, n.up(j)) for j in range(ws.r)]
    report = CheckSet("ladder1", n.parts)
    for l in range(ws.r):
        u = [LaurentPoly.from_poly(avec_n.polys[l])]
        for j in range(ws.r):
            u.append(
                LaurentPoly.from_poly(avec_up[j].polys[l]).scale(-coeffs.a[j])
            )
        scale = max([ws.backend.one] + [x.max_abs_coeff() for x in u])
        if not ws.backend.is_exact:
            scale = scale * max(nmat.max_abs_coeff(), ws.backend.one)
        for i in range(ws.r + 1):
            acc = u[i].derivative()
            for j in range(ws.r + 1):
                acc = acc + nmat[j, i] * u[j]
            res = acc.max_abs_coeff()
            report.add_residual(
                f"l{l}_component_{i}",
                ws.near_zero(res, scale),
                ws.residual_str(res),
            )
    if not report.ok:
        raise IdentityViolation(f"type I ladder fails at {n.parts}", report)
    return report


def verify_compatibility(ws: WeightSystem, n, directions=None) -> CheckSet:
    """N(n+e_l) W(n+e_l) = W'(n+e_l) + W(n+e_l) N(n), entry by entry.

    At boundary indices the identity is checked on the self-contained block
    of rows and columns whose P-vector components exist (column j of the
    derivation multiplies P_{n-e_j}); entries outside that block are
    reported as flags, never failures.
    """
    n = MultiIndex.of(n)
    report = CheckSet("compat", n.parts)
    active = [0] + [j + 1 for j in range(ws.r) if n.has_down(j)]
    for l in directions if directions is not None else range(ws.r):
        n_up = ladder_matrix(ws, n.up(l))
        w = transfer_matrix(ws, n, l).matrix
        n_here = ladder_matrix(ws, n)
        lhs = n_up * w
        rhs = w.derivative() + w * n_here
        scale = max(lhs.max_abs_coeff(), ws.backend.one)
        diff = lhs - rhs
        for i in range(ws.r + 1):
            for j in range(ws.r + 1):
                label = f"l{l}_entry_{i}{j}"
                if i in active and j in active:
                    res = diff[i, j].max_abs_coeff()
                    report.add_residual(
                        label, ws.near_zero(res, scale), ws.residual_str(res)
                    )
                else:
                    report.add(label, FLAG, detail="outside active block (boundary)")
    if not report.ok:
        raise IdentityViolation(f"compatibility fails at {n.parts}", report)
    return report


def hermite_difference_relations(coeff_fn, n: int, m: int, c1, c2, zero):
    """Residuals of the seven closed-form relations for the two-weight
    exponential-of-quadratic family.

    ``coeff_fn(n, m)`` returns the quadruple (a, b, c, d); relations needing
    m-1 or n-1 are skipped at the boundary.  Returns (label, residual) pairs.
    """
    a, b, c, d = coeff_fn(n, m)
    a_up_n, b_up_n, c_up_n, d_up_n = coeff_fn(n + 1, m)
    a_up_m, b_up_m, c_up_m, d_up_m = coeff_fn(n, m + 1)
    one = zero + 1
    out = [
        ("eq1", 2 * a - 2 * a_up_n + 2 * b - 2 * b_up_n + one),
        ("eq2", 2 * a - 2 * a_up_m + 2 * b - 2 * b_up_m + one),
        ("eq3c", 2 * c - c1),
        ("eq3d", 2 * d - c2),
    ]
    if m >= 1:
        _, _, c_dm, d_dm = coeff_fn(n, m - 1)
        out.append(("eq4", 2 * (d_dm - c_dm) - (c2 - 2 * c)))
        out.append(("eq5", 2 * b_up_n * (d_dm - c_dm) - b * (c2 - 2 * c)))
    if n >= 1:
        _, _, c_dn, d_dn = coeff_fn(n - 1, m)
        out.append(("eq6", 2 * (d_dn - c_dn) + c1 - 2 * d))
        out.append(("eq7", 2 * a_up_m * (d_dn - c_dn) + a * (c1 - 2 * d)))
    return out


def verify_hermite_difference_system(ws: WeightSystem, n) -> CheckSet:
    """The entrywise compatibility system for the two-weight exponential
    family, evaluated on computed coefficients."""
    n = MultiIndex.of(n)
    if ws.label not in ("hermite",) or ws.r != 2:
        raise LatticeError("difference system is specific to the r=2 hermite family")
    c1 = ws.families[0].c
    c2 = ws.families[1].c

    def coeff_fn(i, j):
        return nn_coeffs(ws, (i, j)).abcd()

    report = CheckSet("hermite_system", n.parts)
    for label, res in hermite_difference_relations(
        coeff_fn, n.parts[0], n.parts[1], c1, c2, ws.backend.zero
    ):
        report.add_residual(label, ws.near_zero(res, ws.backend.one), ws.residual_str(res))
    if not report.ok:
        raise IdentityViolation(f"difference system fails at {n.parts}", report)
    return report


# -- classical single-weight reduction ---------------------------------------


def classical_ladder_data(ws: WeightSystem, n: int):
    """A_n, B_n, alpha_n, beta_n, h_n for the single-weight system.

    The ladder functions use the kernel (v'(x) - v'(t))/(x - t), the negative
    of the kernel used by the multi-weight pairing; all quantities are
    normalized by h_n so they are scale-free.
    """
    if ws.r != 1:
        raise LatticeError("classical ladder data needs r = 1")
    fam = ws.families[0]
    if fam.alpha is not None:
        raise LatticeError("classical reduction assumes a polynomial potential")
    b = ws.backend

    def p(k):
        return type2(ws, (k,)).poly if k >= 0 else Poly.zero(b)

    def pairing(pq: Poly) -> Poly:
        acc = {}
        for term in ws.kernel_expansion(0).terms:
            val = integral(ws, 0, pq, shift=term.t_power) * (-term.coeff)
            acc[term.x_power] = acc.get(term.x_power, b.zero) + val
        if not acc:
            return Poly.zero(b)
        hi = max(acc)
        return Poly(b, [acc.get(k, b.zero) for k in range(hi + 1)], raw=True)

    h_n = inner_norm(ws, p(n), p(n))
    a_fn = pairing(p(n) * p(n)).scale(b.one / h_n)
    if n >= 1:
        h_prev = inner_norm(ws, p(n - 1), p(n - 1))
        b_fn = pairing(p(n - 1) * p(n)).scale(b.one / h_prev)
        beta_n = integral(ws, 0, p(n) * p(n - 1), shift=1) / h_prev
    else:
        b_fn = Poly.zero(b)
        beta_n = b.zero
    alpha_n = integral(ws, 0, p(n) * p(n), shift=1) / h_n
    return a_fn, b_fn, alpha_n, beta_n, h_n


def inner_norm(ws, p, q):
    return integral(ws, 0, p * q)


def verify_classical_s1_s2(ws: WeightSystem, n: int) -> CheckSet:
    """The two classical compatibility conditions at degree n (r = 1).

    S1:  B_{n+1} + B_n = (z - alpha_n) A_n - v'(z)
    S2:  1 + (z - alpha_n)(B_{n+1} - B_n) = beta_{n+1} A_{n+1} - beta_n A_{n-1}
    with the convention beta_0 * A_{-1} = 0.
    """
    b = ws.backend
    a_n, b_n, alpha_n, beta_n, _ = classical_ladder_data(ws, n)
    a_next, b_next, _, beta_next, _ = classical_ladder_data(ws, n + 1)
    z_minus_alpha = Poly(b, [-alpha_n, b.one], raw=True)
    vprime = ws.families[0].vprime_poly
    report = CheckSet("s1s2", (n,))
    s1 = (b_next + b_n) - (z_minus_alpha * a_n - vprime)
    res1 = s1.max_abs_coeff()
    report.add_residual("S1", ws.near_zero(res1, b.one), ws.residual_str(res1))
    rhs = a_next.scale(beta_next)
    if n >= 1:
        a_prev = classical_ladder_data(ws, n - 1)[0]
        rhs = rhs - a_prev.scale(beta_n)
    s2 = Poly.one(b) + z_minus_alpha * (b_next - b_n) - rhs
    res2 = s2.max_abs_coeff()
    report.add_residual("S2", ws.near_zero(res2, b.one), ws.residual_str(res2))
    if not report.ok:
        raise IdentityViolation(f"classical conditions fail at n={n}", report)
    return report


def verify_classical_reduction(ws: WeightSystem, n: int) -> CheckSet:
    """r = 1 run of the ladder theorems reduces to the classical equations.

    With A_{n,1} = P_{n-1}/h_{n-1} the 2x2 ladder matrix must satisfy
    N_00 = -B_n, N_01 = beta_n A_n, N_10 = -A_{n-1}, N_11 = B_n + v',
    and the recurrence coefficient a equals beta_n.
    """
    if n < 1:
        raise LatticeError("reduction check needs n >= 1")
    b = ws.backend
    a_n, b_n, _, beta_n, _ = classical_ladder_data(ws, n)
    a_prev = classical_ladder_data(ws, n - 1)[0]
    nmat = ladder_matrix(ws, (n,))
    vprime = LaurentPoly.from_poly(ws.families[0].vprime_poly)
    expected = [
        ("N00_is_minus_B", nmat[0, 0] - LaurentPoly.from_poly(-b_n)),
        ("N01_is_betaA", nmat[0, 1] - LaurentPoly.from_poly(a_n.scale(beta_n))),
        ("N10_is_minus_A_prev", nmat[1, 0] - LaurentPoly.from_poly(-a_prev)),
        ("N11_is_B_plus_vprime", nmat[1, 1] - (LaurentPoly.from_poly(b_n) + vprime)),
    ]
    report = CheckSet("classical_reduction", (n,))
    for label, diff in expected:
        res = diff.max_abs_coeff()
        report.add_residual(label, ws.near_zero(res, b.one), ws.residual_str(res))
    res_a = nn_coeffs(ws, (n,)).a[0] - beta_n
    report.add_residual("a_is_beta", ws.near_zero(res_a, b.one), ws.residual_str(res_a))
    if not report.ok:
        raise IdentityViolation(f"classical reduction fails at n={n}", report)
    return report
