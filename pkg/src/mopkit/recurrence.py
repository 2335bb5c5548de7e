"""Nearest-neighbor recurrence coefficients and the transfer matrix.

The recurrence in direction l reads

    x P_n = P_{n+e_l} + b_l P_n + sum_j a_j P_{n-e_j},

with a_j = 0 whenever n_j = 0.  Each a_j is computed three independent ways
(moment ratio, ratio of type I leading coefficients, and coefficient matching
of the recurrence residual against the lower neighbors); disagreement raises
InconsistentCoefficients and always signals an implementation bug.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import MultiIndex, coeff_a, inner, integral, type1, type2
from .errors import (
    DegenerateRatio,
    IdentityViolation,
    InconsistentCoefficients,
    NotNormal,
    SingularMatrix,
)
from .matrices import LaurentMatrix, ScalarMatrix, solve_overdetermined
from .polynomials import LaurentPoly, Poly
from .report import FLAG, CheckSet
from .weights import WeightSystem


@dataclass(frozen=True)
class NearestNeighborCoeffs:
    """The 2r recurrence coefficients at one multi-index.

    In the two-weight notation of the worked examples: a = a[0], b = a[1],
    c = b[0], d = b[1].
    """

    index: MultiIndex
    a: tuple
    b: tuple

    def abcd(self):
        if len(self.a) != 2:
            raise ValueError("abcd() is the r = 2 notation")
        return self.a[0], self.a[1], self.b[0], self.b[1]


@dataclass(frozen=True)
class TransferMatrix:
    """Degree-1 matrix W with P-vector(n + e_l) = W * P-vector(n)."""

    index: MultiIndex  # the raised index n + e_l
    direction: int
    matrix: LaurentMatrix


def _agree(ws, values, scale):
    first = values[0]
    return all(ws.near_zero(v - first, scale) for v in values[1:])


def nn_coeffs(ws: WeightSystem, n) -> NearestNeighborCoeffs:
    """Recurrence coefficients at n, cross-validated three ways (memoized)."""
    n = MultiIndex.of(n)

    def build():
        p_n = type2(ws, n).poly
        s = n.size
        b_list = []
        for l in range(ws.r):
            p_up = type2(ws, n.up(l)).poly
            # primary: compare the x^|n| coefficient of x P_n - P_{n+e_l}
            b_primary = p_n.coefficient(s - 1) - p_up.coefficient(s)
            # cross-check: integral form against the raised type I function
            avec = type1(ws, n.up(l))
            b_integral = ws.backend.zero
            xp = p_n.shift(1)
            for k in range(ws.r):
                if not avec.polys[k].is_zero:
                    b_integral = b_integral + inner(ws, k, xp, avec.polys[k])
            scale = max(ws.backend.abs(b_primary), ws.backend.one)
            if not _agree(ws, [b_primary, b_integral], scale):
                raise InconsistentCoefficients(
                    f"b_{l} routes disagree at {n.parts}: "
                    f"{b_primary} (coefficient) vs {b_integral} (integral)"
                )
            b_list.append(b_primary)

        a_residual = _a_by_coefficient_matching(ws, n, p_n, b_list[0])
        a_list = []
        for j in range(ws.r):
            if not n.has_down(j):
                a_list.append(ws.backend.zero)
                continue
            a_moment = coeff_a(ws, n, j)
            kap_n = type1(ws, n).kappa[j] if s >= 1 else None
            routes = [a_moment, a_residual[j]]
            labels = ["moment ratio", "recurrence residual"]
            if kap_n is not None:
                kap_up = type1(ws, n.up(j)).kappa[j]
                routes.append(kap_n / kap_up)
                labels.append("kappa ratio")
            scale = max(ws.backend.abs(a_moment), ws.backend.one)
            if not _agree(ws, routes, scale):
                detail = ", ".join(
                    f"{lab}: {val}" for lab, val in zip(labels, routes)
                )
                raise InconsistentCoefficients(
                    f"a_{j} routes disagree at {n.parts}: {detail}"
                )
            a_list.append(a_moment)

        a_list, b_list = _apply_perturbation(ws, n, a_list, b_list)
        return NearestNeighborCoeffs(n, tuple(a_list), tuple(b_list))

    return ws.cached(("nn", n.parts), build)


def _a_by_coefficient_matching(ws, n, p_n, b_0):
    """Expand x P_n - P_{n+e_0} - b_0 P_n in the lower-neighbor basis."""
    s = n.size
    target = p_n.shift(1) - type2(ws, n.up(0)).poly - p_n.scale(b_0)
    down = [j for j in range(ws.r) if n.has_down(j)]
    if not down:
        if not ws.near_zero(target.max_abs_coeff(), ws.backend.one):
            raise InconsistentCoefficients(
                f"nonzero recurrence residual at boundary index {n.parts}"
            )
        return [ws.backend.zero] * ws.r
    cols = [type2(ws, n.down(j)).poly for j in down]
    rows = [[c.coefficient(k) for c in cols] for k in range(s)]
    rhs = [target.coefficient(k) for k in range(s)]
    matrix = ScalarMatrix(ws.backend, rows, raw=True)
    scale = ws.backend.one
    if not ws.backend.is_exact:
        scale = max([ws.backend.one] + [c.max_abs_coeff() for c in cols])
    try:
        sol, worst = solve_overdetermined(matrix, rhs, scale)
    except SingularMatrix as exc:
        raise NotNormal(
            f"lower neighbors of {n.parts} are linearly dependent: {exc}"
        ) from exc
    if not ws.near_zero(worst, scale):
        raise InconsistentCoefficients(
            f"recurrence residual outside the lower-neighbor span at {n.parts}"
        )
    out = [ws.backend.zero] * ws.r
    for pos, j in enumerate(down):
        out[j] = sol[pos]
    return out


def _apply_perturbation(ws, n, a_list, b_list):
    """Test hook: corrupt one published coefficient after validation."""
    if not ws.perturbation:
        return a_list, b_list
    kind, target_index, j, delta = ws.perturbation
    if n.parts != target_index:
        return a_list, b_list
    if kind == "a":
        a_list = list(a_list)
        a_list[j] = a_list[j] + delta
    else:
        b_list = list(b_list)
        b_list[j] = b_list[j] + delta
    return a_list, b_list


def coefficient_sum_check(ws: WeightSystem, n) -> CheckSet:
    """sum_j a_j equals the integral of x P_n against the type I function."""
    n = MultiIndex.of(n)
    coeffs = nn_coeffs(ws, n)
    report = CheckSet("coefficient_sum", n.parts)
    if n.size == 0:
        report.add("sum_a", "pass", detail="no lower neighbors")
        return report
    avec = type1(ws, n)
    xp = type2(ws, n).poly.shift(1)
    total = ws.backend.zero
    for k in range(ws.r):
        if not avec.polys[k].is_zero:
            total = total + inner(ws, k, xp, avec.polys[k])
    res = total - sum(coeffs.a, ws.backend.zero)
    scale = max(ws.backend.abs(total), ws.backend.one)
    report.add_residual("sum_a", ws.near_zero(res, scale), ws.residual_str(res))
    if not report.ok:
        raise IdentityViolation(f"coefficient sum mismatch at {n.parts}", report)
    return report


def verify_nn_recurrence(ws: WeightSystem, n) -> CheckSet:
    """Both recurrence families as polynomial identities.

    Type II, every direction l:
        x P_n - P_{n+e_l} - b_l P_n - sum_j a_j P_{n-e_j} = 0.
    Type I (componentwise in each family k), every l with n_l >= 1:
        x A_{n,k} - A_{n-e_l,k} - b'_l A_{n,k} - sum_j a_j A_{n+e_j,k} = 0,
    where b' is taken at the lowered index (the shifted coefficient).
    """
    n = MultiIndex.of(n)
    coeffs = nn_coeffs(ws, n)
    report = CheckSet("recurrence", n.parts)
    p_n = type2(ws, n).poly
    scale = max(p_n.max_abs_coeff(), ws.backend.one)
    for l in range(ws.r):
        resid = p_n.shift(1) - type2(ws, n.up(l)).poly - p_n.scale(coeffs.b[l])
        for j in range(ws.r):
            if n.has_down(j):
                resid = resid - type2(ws, n.down(j)).poly.scale(coeffs.a[j])
        res = resid.max_abs_coeff()
        report.add_residual(
            f"type2_dir{l}", ws.near_zero(res, scale), ws.residual_str(res)
        )

    if n.size >= 1:
        avec = type1(ws, n)
        ups = [type1(ws, n.up(j)) for j in range(ws.r)]
        for l in range(ws.r):
            if not n.has_down(l):
                continue
            low = n.down(l)
            low_polys = (
                type1(ws, low).polys
                if low.size >= 1
                else tuple(Poly.zero(ws.backend) for _ in range(ws.r))
            )
            b_shift = nn_coeffs(ws, low).b[l]
            for k in range(ws.r):
                resid = (
                    avec.polys[k].shift(1)
                    - low_polys[k]
                    - avec.polys[k].scale(b_shift)
                )
                for j in range(ws.r):
                    resid = resid - ups[j].polys[k].scale(coeffs.a[j])
                res = resid.max_abs_coeff()
                report.add_residual(
                    f"type1_dir{l}_family{k}",
                    ws.near_zero(res, scale),
                    ws.residual_str(res),
                )
    if not report.ok:
        raise IdentityViolation(f"recurrence identity fails at {n.parts}", report)
    return report


def verify_pde(ws: WeightSystem, n) -> CheckSet:
    """Partial difference equations linking neighboring coefficient sets.

    For every ordered pair i != j:
      (1)  b_{n+e_i,j} - b_{n,j} = b_{n+e_j,i} - b_{n,i}
      (2)  sum_k a_{n+e_j,k} - sum_k a_{n+e_i,k}
               = b_{n+e_j,i} b_{n,j} - b_{n,i} b_{n+e_i,j}
      (3)  a_{n,i} / a_{n+e_j,i} = (b_{n-e_i,j} - b_{n-e_i,i})
                                   / (b_{n,j} - b_{n,i})
    Relation (3) is checked in cross-multiplied form; a vanishing denominator
    is flagged (DegenerateRatio), not failed, and it is skipped when n_i = 0.
    """
    n = MultiIndex.of(n)
    report = CheckSet("pde", n.parts)
    if ws.r < 2:
        report.add("pairs", FLAG, detail="r = 1 has no pair relations")
        return report
    here = nn_coeffs(ws, n)
    up = [nn_coeffs(ws, n.up(j)) for j in range(ws.r)]
    scale = ws.backend.one
    if not ws.backend.is_exact:
        mags = [ws.backend.abs(v) for v in here.a + here.b]
        scale = max([ws.backend.one] + mags) ** 2
    for i in range(ws.r):
        for j in range(ws.r):
            if i == j:
                continue
            tag = f"i{i}_j{j}"
            r1 = (up[i].b[j] - here.b[j]) - (up[j].b[i] - here.b[i])
            report.add_residual(
                f"shift_{tag}", ws.near_zero(r1, scale), ws.residual_str(r1)
            )
            suma_j = sum(up[j].a, ws.backend.zero)
            suma_i = sum(up[i].a, ws.backend.zero)
            r2 = (suma_j - suma_i) - (up[j].b[i] * here.b[j] - here.b[i] * up[i].b[j])
            report.add_residual(
                f"det_{tag}", ws.near_zero(r2, scale), ws.residual_str(r2)
            )
            if not n.has_down(i):
                continue
            denom = here.b[j] - here.b[i]
            low = nn_coeffs(ws, n.down(i))
            numer = low.b[j] - low.b[i]
            if ws.near_zero(denom, scale):
                report.add(
                    f"ratio_{tag}",
                    FLAG,
                    detail=str(DegenerateRatio(f"b_{j} - b_{i} vanishes at {n.parts}")),
                )
                continue
            r3 = here.a[i] * denom - up[j].a[i] * numer
            report.add_residual(
                f"ratio_{tag}", ws.near_zero(r3, scale), ws.residual_str(r3)
            )
    if not report.ok:
        raise IdentityViolation(f"difference equations fail at {n.parts}", report)
    return report


def transfer_matrix(ws: WeightSystem, n, l: int, check=None) -> TransferMatrix:
    """W(n + e_l; x) shifting the P-vector one step in direction l.

    Row 0 carries (x - b_l, -a_1, ..., -a_r); row j has 1 in column 0 and
    b_{n-e_j,j} - b_{n-e_j,l} on the diagonal.  Entries that would multiply a
    nonexistent lower neighbor are set to 0 (any value is equivalent there).
    On construction the shift identity is re-verified on all rows whose
    components exist.
    """
    n = MultiIndex.of(n)
    if check is None:
        check = ws.self_check
    coeffs = nn_coeffs(ws, n)
    b = ws.backend
    zero = LaurentPoly.zero(b)
    one = LaurentPoly.constant(b, 1)
    size = ws.r + 1
    rows = [[zero for _ in range(size)] for _ in range(size)]
    rows[0][0] = LaurentPoly(b, 0, [-coeffs.b[l], b.one], raw=True)
    for j in range(ws.r):
        rows[0][j + 1] = LaurentPoly(b, 0, [-coeffs.a[j]], raw=True)
        rows[j + 1][0] = one
        if j != l and n.has_down(j):
            low = nn_coeffs(ws, n.down(j))
            rows[j + 1][j + 1] = LaurentPoly(b, 0, [low.b[j] - low.b[l]], raw=True)
    w = LaurentMatrix(b, rows)
    out = TransferMatrix(n.up(l), l, w)
    if check:
        _check_transfer(ws, n, l, out)
    return out


def _check_transfer(ws, n, l, tm):
    p_up = _p_vector(ws, n.up(l))
    p_here = _p_vector(ws, n)
    scale = max([ws.backend.one] + [p.max_abs_coeff() for p in p_up if p is not None])
    for i in range(ws.r + 1):
        if p_up[i] is None:
            continue
        acc = LaurentPoly.zero(ws.backend)
        for j in range(ws.r + 1):
            if p_here[j] is not None:
                acc = acc + tm.matrix[i, j] * LaurentPoly.from_poly(p_here[j])
        res = (acc - LaurentPoly.from_poly(p_up[i])).max_abs_coeff()
        if not ws.near_zero(res, scale):
            raise IdentityViolation(
                f"transfer matrix at {n.parts} direction {l} fails on row {i} "
                f"(residual {ws.residual_str(res)})"
            )


def _p_vector(ws, n):
    """[P_n, P_{n-e_1}, ..., P_{n-e_r}], None for missing lower neighbors."""
    n = MultiIndex.of(n)
    out = [type2(ws, n).poly]
    for j in range(ws.r):
        out.append(type2(ws, n.down(j)).poly if n.has_down(j) else None)
    return out


def verify_w_commutation(ws: WeightSystem, n, i: int, j: int) -> CheckSet:
    """W(n+e_i+e_j) W(n+e_i) = W(n+e_j+e_i) W(n+e_j) as matrix polynomials."""
    n = MultiIndex.of(n)
    left = transfer_matrix(ws, n.up(i), j).matrix * transfer_matrix(ws, n, i).matrix
    right = transfer_matrix(ws, n.up(j), i).matrix * transfer_matrix(ws, n, j).matrix
    report = CheckSet("w_commutation", n.parts)
    scale = max(left.max_abs_coeff(), ws.backend.one)
    res = (left - right).max_abs_coeff()
    report.add_residual(
        f"pair_{i}_{j}", ws.near_zero(res, scale), ws.residual_str(res)
    )
    if not report.ok:
        raise IdentityViolation(
            f"transfer matrices do not commute at {n.parts} ({i},{j})", report
        )
    return report
