"""Semistability verdicts, spectral divisors, and splitting types.

The verdict rule is: the bundle is semistable iff the twisted section count
equals the rank and the top wedge of a section basis is not identically zero.
Necessity is classical; sufficiency holds because a destabilizing subbundle of
positive degree forces at least k+1 independent sections into a rank-k
subbundle, killing every top wedge - so a nonzero wedge certifies that no
such subbundle exists.

For a semistable system the spectral divisor is the zero divisor of the top
wedge, computed place by place from the maximal minors of the section matrix
(trivialized against the ambient twisted divisors); in the monad case the
modulus block is wedged in and s*(p) subtracted.

The splitting type at a point t of the spectral support is read off the
elementary-divisor exponents of the local evaluation matrix over the
truncated power-series ring: an indecomposable rank-rho factor located at t
contributes exponents {0,...,0,rho}, anything located elsewhere contributes
units, and the exponents are invariant under constant basis changes and local
frames.  The filtration certificate is still verified independently: adapted
chains with unit wedge increments, injectivity of the limit-direction map on
the evaluation kernel, and the osculating complement of the value space.  A
certificate failure raises InternalInconsistency; it guards the shortcut and
is never an input verdict.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import (
    BaseChangeRequired,
    DimensionMismatch,
    IdenticallyZeroWedge,
    InternalInconsistency,
    SectionCountMismatch,
    TopWedgeVanishes,
)
from .bundles import SectionSystem, det_functions, evaluate, sections_direct_sum
from .elliptic import Divisor, Place
from .funcspace import CurveFunction, expand_local, principal_divisor, valuation
from .galois import embedding, matrix_rank, nullspace, solve_linear

SEMISTABLE = "semistable"
NOT_SEMISTABLE = "not_semistable"
REASON_COUNT = "section_count_mismatch"
REASON_WEDGE = "top_wedge_vanishes"


# ---------------------------------------------------------------------------
# report types


@dataclass(frozen=True)
class WedgeProfile:
    """Per-place delta sequence and elementary-divisor exponents."""

    place: object
    multiplicity: int
    delta: tuple
    elementary_exponents: tuple


@dataclass(frozen=True)
class KernelData:
    """Evaluation-kernel data at one place."""

    place: object
    d_t: int
    kernel_basis: tuple
    limit_directions: tuple


@dataclass(frozen=True)
class SplittingFactor:
    point: object
    rank: int


@dataclass(frozen=True)
class SplittingType:
    factors: tuple
    marked_point: object

    def rank_multiset(self):
        return sorted(f.rank for f in self.factors)

    def as_pairs(self):
        return [(f.point, f.rank) for f in self.factors]


@dataclass(frozen=True)
class PlaceAnalysis:
    point: object
    multiplicity: int
    d_t: int
    factor_ranks: tuple
    profile: WedgeProfile
    kernel: KernelData
    section_orders: tuple


@dataclass(frozen=True)
class StabilityReport:
    verdict: str
    reason: object
    rank: int
    section_count: int
    marked_point: object
    twist: object
    spectral_divisor: object = None
    kernel_spectral: object = None
    base_change_degree: int = 1
    splitting: object = None
    fully_split: object = None
    fully_split_failures: tuple = ()
    places: tuple = ()
    slope_violations: tuple = ()

    @property
    def is_semistable(self):
        return self.verdict == SEMISTABLE


# ---------------------------------------------------------------------------
# symbolic wedge machinery


def _symbolic_minors(system, column_vectors):
    """All |I| x k minors of the chosen section columns, keyed by row subset.

    column_vectors is a list of section vectors (length m of CurveFunctions);
    the determinant over every row subset of size k is returned.
    """
    m = system.m
    k = len(column_vectors)
    if k == 0 or k > m:
        return {}
    out = {}
    for rows in itertools.combinations(range(m), k):
        sub = [[vec[a] for vec in column_vectors] for a in rows]
        out[rows] = det_functions(sub)
    return out


def _wedge_multiplicity(system, minors, minor_divisors, place, corrected):
    """min over row subsets of v_P(minor) + sum of ambient multiplicities."""
    twisted = system.twisted_divisors()
    best = None
    for rows, det in minors.items():
        if det.is_zero:
            continue
        v = minor_divisors[rows].coefficient(place)
        v += sum(twisted[a].coefficient(place) for a in rows)
        best = v if best is None else min(best, v)
    if best is None:
        raise IdenticallyZeroWedge("all maximal minors vanish identically")
    if corrected and system.s:
        p_place = Place.from_point(system.mc.p)
        if place == p_place:
            best -= system.s
    return best


def _wedge_divisor(system, columns=None, corrected=True):
    """Zero divisor of the wedge of the chosen section columns.

    columns defaults to all sections; the modulus block is always wedged in
    and, when `corrected`, its contribution s*(p) is subtracted.
    """
    if columns is None:
        columns = list(range(len(system.sections)))
    vectors = (system.modulus_block or []) + [system.sections[i] for i in columns]
    minors = _symbolic_minors(system, vectors)
    nonzero = {rows: det for rows, det in minors.items() if not det.is_zero}
    if not nonzero:
        raise IdenticallyZeroWedge("all maximal minors vanish identically")
    minor_divisors = {rows: principal_divisor(det) for rows, det in nonzero.items()}
    candidates = set()
    for D in system.twisted_divisors():
        candidates.update(D.support())
    for div in minor_divisors.values():
        candidates.update(div.support())
    if corrected and system.s:
        candidates.add(Place.from_point(system.mc.p))
    coeffs = {}
    for place in candidates:
        mult = _wedge_multiplicity(system, nonzero, minor_divisors, place, corrected)
        if mult < 0:
            raise InternalInconsistency(
                f"negative wedge multiplicity {mult} at {place}"
            )
        if mult:
            coeffs[place] = mult
    div = Divisor(system.curve, coeffs)
    expected = len(vectors) * system.twist.degree() - (
        system.s if corrected else 0
    )
    if div.degree() != expected:
        raise InternalInconsistency(
            f"wedge divisor has degree {div.degree()}, expected {expected}"
        )
    return div


def wedge_valuation(system, columns, t):
    """Vanishing order at t of the wedge of the chosen sections.

    In the presence of a modulus block the s modulus columns are wedged in
    first and s is subtracted at the marked point (quotient correction).
    """
    vectors = (system.modulus_block or []) + [system.sections[i] for i in columns]
    if not vectors:
        return 0  # the empty wedge is the unit section
    minors = _symbolic_minors(system, vectors)
    nonzero = {rows: det for rows, det in minors.items() if not det.is_zero}
    if not nonzero:
        raise IdenticallyZeroWedge("chosen sections are dependent as sections")
    twisted = system.twisted_divisors()
    best = None
    for rows, det in nonzero.items():
        v = valuation(det, t) + sum(twisted[a].coefficient(t) for a in rows)
        best = v if best is None else min(best, v)
    if system.s:
        p_place = Place.from_point(system.mc.p)
        if t == p_place:
            best -= system.s
    return best


def incidence_order(system, section, subbundle_columns, t):
    """deg_T s(t) via the frame criterion: wedge growth when s is added."""
    base = wedge_valuation(system, list(subbundle_columns), t)
    extended = wedge_valuation(system, list(subbundle_columns) + [section], t)
    return extended - base


def spectral_divisor(system):
    """The spectral divisor: zero divisor of the top wedge (monad-corrected)."""
    r = system.declared_rank
    if len(system.sections) != r:
        raise SectionCountMismatch(r, len(system.sections))
    try:
        return _wedge_divisor(system, corrected=True)
    except IdenticallyZeroWedge as exc:
        raise TopWedgeVanishes(str(exc)) from exc


def kernel_spectral_divisor(system):
    """The spectral divisor of the ambient kernel bundle (no monad correction)."""
    return _wedge_divisor(system, corrected=False)


# ---------------------------------------------------------------------------
# truncated power-series matrices at a point


def _ser_val(a):
    for i, c in enumerate(a):
        if not c.is_zero():
            return i
    return None


def _ser_add(a, b, field):
    return [x + y for x, y in zip(a, b)]


def _ser_sub(a, b, field):
    return [x - y for x, y in zip(a, b)]


def _ser_mul(a, b, N, field):
    out = [field.zero] * N
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if i + j >= N:
                break
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return out


def _ser_scale(a, c):
    return [x * c for x in a]


def _ser_inv_unit(a, N, field):
    inv0 = a[0].inverse()
    out = [inv0]
    for k in range(1, N):
        acc = field.zero
        for j in range(k):
            if k - j < len(a):
                acc = acc + a[k - j] * out[j]
        out.append(-inv0 * acc)
    return out


def _entry_series(f, place, mult, N):
    """Trivialized coefficients of f at exponents -mult .. -mult+N-1."""
    field = place.curve.field
    if f.is_zero:
        return [field.zero] * N
    v = valuation(f, place)
    if v < -mult:
        raise InternalInconsistency(
            "section component has a deeper pole than its line bundle allows"
        )
    top = -mult + N - 1
    if v > top:
        return [field.zero] * N
    exp = expand_local(f, place, top - v)
    return [exp.coefficient(e) for e in range(-mult, -mult + N)]


def _local_matrices(system, t, N):
    """Series matrices at t: sections (m x r) and bundle map (m x s)."""
    twisted = system.twisted_divisors()
    sec = []
    for a in range(system.m):
        mult = twisted[a].coefficient(t)
        sec.append(
            [_entry_series(vec[a], t, mult, N) for vec in system.sections]
        )
    fmap = None
    if system.f_matrix:
        fmap = []
        for a in range(system.m):
            mult = system.ambient[a].coefficient(t)
            fmap.append(
                [_entry_series(f, t, mult, N) for f in system.f_matrix[a]]
            )
    return sec, fmap


def _quotient_matrix(sec, fmap, N, field):
    """Eliminate the bundle-map columns: local matrix of the cohomology quotient."""
    if not fmap:
        return sec
    m = len(sec)
    s = len(fmap[0])
    rows = [list(fmap[a]) + list(sec[a]) for a in range(m)]
    used = []
    for j in range(s):
        pivot = None
        for i in range(m):
            if i in used:
                continue
            if not rows[i][j][0].is_zero():
                pivot = i
                break
        if pivot is None:
            raise InternalInconsistency("bundle map dropped rank in local frame")
        used.append(pivot)
        inv = _ser_inv_unit(rows[pivot][j], N, field)
        rows[pivot] = [_ser_mul(e, inv, N, field) for e in rows[pivot]]
        for i in range(m):
            if i == pivot:
                continue
            factor = rows[i][j]
            if _ser_val(factor) is None:
                continue
            rows[i] = [
                _ser_sub(e, _ser_mul(factor, pe, N, field), field)
                for e, pe in zip(rows[i], rows[pivot])
            ]
    return [rows[i][s:] for i in range(m) if i not in used]


class _SeriesMinors:
    """Memoized minors of a truncated-series matrix."""

    def __init__(self, matrix, N, field):
        self.matrix = matrix
        self.N = N
        self.field = field
        self.memo = {}

    def det(self, rows, cols):
        key = (rows, cols)
        if key in self.memo:
            return self.memo[key]
        if len(rows) == 1:
            val = self.matrix[rows[0]][cols[0]]
        else:
            val = [self.field.zero] * self.N
            r0 = rows[0]
            rest = rows[1:]
            for idx, c in enumerate(cols):
                entry = self.matrix[r0][c]
                if _ser_val(entry) is None:
                    continue
                sub = self.det(rest, cols[:idx] + cols[idx + 1:])
                term = _ser_mul(entry, sub, self.N, self.field)
                if idx % 2 == 0:
                    val = _ser_add(val, term, self.field)
                else:
                    val = _ser_sub(val, term, self.field)
        self.memo[key] = val
        return val


def smith_exponents(matrix, N, field):
    """Elementary-divisor exponents of a series matrix with full column rank.

    Computed through the gcd-of-minors characterization: d_j is the minimal
    valuation over all j x j minors and e_j = d_j - d_{j-1}.
    """
    m = len(matrix)
    ncols = len(matrix[0]) if matrix else 0
    minors = _SeriesMinors(matrix, N, field)
    exps = []
    d_prev = 0
    for j in range(1, ncols + 1):
        best = None
        for rows in itertools.combinations(range(m), j):
            for cols in itertools.combinations(range(ncols), j):
                v = _ser_val(minors.det(rows, cols))
                if v is not None and (best is None or v < best):
                    best = v
                    if best == d_prev:
                        break
            if best == d_prev:
                break
        if best is None:
            raise InternalInconsistency(
                "rank deficiency beyond working precision in local matrix"
            )
        exps.append(best - d_prev)
        d_prev = best
    if any(b < a for a, b in zip(exps, exps[1:])):
        raise InternalInconsistency("elementary exponents not nondecreasing")
    return exps


# ---------------------------------------------------------------------------
# adapted chains (the filtration certificate)


def _wedge_extend(omega, col, N, field, m):
    new = {}
    for subset, w in omega.items():
        if _ser_val(w) is None:
            continue
        for i in range(m):
            if i in subset:
                continue
            term = _ser_mul(w, col[i], N, field)
            if _ser_val(term) is None:
                continue
            bigger = tuple(sorted(subset + (i,)))
            sign = sum(1 for s in subset if s > i) % 2
            if sign:
                term = [-x for x in term]
            if bigger in new:
                new[bigger] = _ser_add(new[bigger], term, field)
            else:
                new[bigger] = term
    return new


def _wedge_of_columns(cols, N, field, m):
    omega = {(): [field.one] + [field.zero] * (N - 1)}
    for col in cols:
        omega = _wedge_extend(omega, col, N, field, m)
    return omega


def _omega_val(omega):
    best = None
    for w in omega.values():
        v = _ser_val(w)
        if v is not None and (best is None or v < best):
            best = v
    return best


def _apply_matrix(Q, gamma, N, field):
    """The series column Q * gamma for a constant vector gamma."""
    m = len(Q)
    out = []
    for i in range(m):
        acc = [field.zero] * N
        for c, coeff in enumerate(gamma):
            if coeff.is_zero():
                continue
            acc = _ser_add(acc, _ser_scale(Q[i][c], coeff), field)
        out.append(acc)
    return out


def _candidates(basis, field, salt, limit=32):
    """Deterministic candidate vectors from a solution-space basis."""
    for vec in basis:
        yield list(vec)
    if not basis:
        return
    rng = random.Random(f"adapted-chain:{salt}:{field.order}:{len(basis)}")
    n = len(basis[0])
    for _ in range(limit):
        out = [field.zero] * n
        nonzero = False
        for b in basis:
            c = field.element_from_index(rng.randrange(field.order))
            if not c.is_zero():
                nonzero = True
            out = [v + c * x for v, x in zip(out, b)]
        if nonzero:
            yield out


def _extension_space(Q, omega, depth, r, N, field):
    """Solutions gamma of v(omega ^ Q gamma) >= depth + 1.

    depth is the current prefix length; the wedge coefficients at exponents
    0..depth must vanish, each giving linear conditions on gamma.
    """
    m = len(Q)
    rows = []
    # rows indexed by (component subset of size depth+1, exponent <= depth)
    components = {}
    for subset, w in omega.items():
        for i in range(m):
            if i in subset:
                continue
            bigger = tuple(sorted(subset + (i,)))
            sign = (-1) ** (sum(1 for s in subset if s > i) % 2)
            components.setdefault(bigger, []).append((subset, i, sign))
    for bigger, contribs in components.items():
        for e in range(depth + 1):
            row = [field.zero] * r
            for subset, i, sign in contribs:
                w = omega[subset]
                for c in range(r):
                    acc = field.zero
                    col = Q[i][c]
                    for e1 in range(e + 1):
                        wc = w[e1]
                        if wc.is_zero():
                            continue
                        acc = acc + wc * col[e - e1]
                    if sign < 0:
                        acc = -acc
                    row[c] = row[c] + acc
            rows.append(row)
    return nullspace(rows, r, field)


def _independent(rows, vec, field):
    if not rows:
        return any(not c.is_zero() for c in vec)
    return matrix_rank(rows + [vec], field) > matrix_rank(rows, field)


def _find_chains(Q, N, rhos, field, salt):
    """Adapted chains realizing the factor ranks `rhos` (descending).

    Each chain starts with an evaluation-kernel vector of exact order one and
    extends with unit wedge increments and independent values.  Returns the
    list of chains (lists of constant vectors) or None.
    """
    m = len(Q)
    r = len(Q[0]) if Q else 0
    Q0_rows = [[Q[i][c][0] for c in range(r)] for i in range(m)]
    kernel = nullspace(Q0_rows, r, field)
    budget = [4000]

    def chain_step(chains, used, current, omega, tail_values):
        if budget[0] <= 0:
            return None
        budget[0] -= 1
        rho_index = len(chains)
        rho = rhos[rho_index]
        depth = len(current)
        if depth == rho:
            new_chains = chains + [current]
            if len(new_chains) == len(rhos):
                return new_chains
            return chain_start(new_chains, used)
        if depth == 0:
            space = kernel
        else:
            space = _extension_space(Q, omega, depth, r, N, field)
        for gamma in _candidates(space, field, f"{salt}:{rho_index}:{depth}", 32):
            if not _independent(used, gamma, field):
                continue
            col = _apply_matrix(Q, gamma, N, field)
            new_omega = _wedge_extend(omega, col, N, field, m)
            val = _omega_val(new_omega)
            if val != depth + 1:
                continue
            value = [col[i][0] for i in range(m)]
            if depth == 0:
                if any(not v.is_zero() for v in value):
                    continue
                new_tails = tail_values
            else:
                if not _independent(tail_values, value, field):
                    continue
                new_tails = tail_values + [value]
            result = chain_step(
                chains, used + [gamma], current + [gamma], new_omega, new_tails
            )
            if result is not None:
                return result
        return None

    def chain_start(chains, used):
        omega0 = {(): [field.one] + [field.zero] * (N - 1)}
        return chain_step(chains, used, [], omega0, [])

    if not rhos:
        return []
    return chain_start([], [])


def _chain_tau(Q, chain, N, field):
    """The top osculating direction of a chain: solve eta_{rho-1} ^ tau = eta_rho."""
    m = len(Q)
    rho = len(chain)
    cols = [_apply_matrix(Q, g, N, field) for g in chain]
    omega_prev = _wedge_of_columns(cols[:-1], N, field, m)
    omega_full = _wedge_extend(omega_prev, cols[-1], N, field, m)
    eta_prev = {S: w[rho - 1] for S, w in omega_prev.items()}
    eta_full = {S: w[rho] for S, w in omega_full.items()}
    rows = []
    rhs = []
    for bigger in itertools.combinations(range(m), rho):
        row = [field.zero] * m
        for i in bigger:
            rest = tuple(s for s in bigger if s != i)
            coeff = eta_prev.get(rest)
            if coeff is None or coeff.is_zero():
                continue
            sign = (-1) ** (sum(1 for s in rest if s > i) % 2)
            row[i] = row[i] + (coeff if sign > 0 else -coeff)
        rows.append(row)
        rhs.append(eta_full.get(bigger, field.zero))
    tau = solve_linear(rows, rhs, field)
    if tau is None:
        raise InternalInconsistency("no osculating direction completes the chain")
    return tau


# ---------------------------------------------------------------------------
# per-place analysis


def _analyze_place(system, t, mult):
    """Full local analysis at a rational point t of the spectral support."""
    field = system.field
    N = mult + 2
    sec, fmap = _local_matrices(system, t, N)
    Q = _quotient_matrix(sec, fmap, N, field)
    m = len(Q)
    r = len(Q[0]) if Q else 0

    exps = smith_exponents(Q, N, field)
    if sum(exps) != mult:
        raise InternalInconsistency(
            f"elementary exponents sum to {sum(exps)}, wedge multiplicity is {mult}"
        )
    factor_ranks = tuple(sorted(e for e in exps if e > 0))
    d_expected = len(factor_ranks)

    Q0_rows = [[Q[i][c][0] for c in range(r)] for i in range(m)]
    kernel = nullspace(Q0_rows, r, field)
    d_t = len(kernel)
    if d_t != d_expected:
        raise InternalInconsistency(
            f"kernel dimension {d_t} disagrees with {d_expected} nonzero exponents"
        )

    # limit directions: first-order coefficients of kernel sections
    directions = []
    section_orders = []
    violations = []
    for c in range(r):
        col = [Q[i][c] for i in range(m)]
        full_val = min(
            (x for x in (_ser_val(e) for e in col) if x is not None), default=None
        )
        if full_val is None:
            raise InternalInconsistency("section column identically zero locally")
        section_orders.append(full_val)
        if full_val > 1:
            violations.append((str(t), c, full_val))
    for beta in kernel:
        col = _apply_matrix(Q, beta, N, field)
        val = min(
            (x for x in (_ser_val(e) for e in col) if x is not None), default=None
        )
        if val is None or val < 1:
            raise InternalInconsistency("kernel vector fails to vanish at its place")
        if val > 1:
            violations.append((str(t), tuple(str(b) for b in beta), val))
        directions.append([col[i][1] for i in range(m)])
    if matrix_rank(directions, field) != d_t:
        raise InternalInconsistency(
            "limit-direction map on the evaluation kernel is not injective"
        )

    chains = _find_chains(Q, N, list(reversed(factor_ranks)), field, salt=str(t))
    if chains is None:
        raise InternalInconsistency(f"no adapted filtration chains found at {t}")

    taus = [_chain_tau(Q, chain, N, field) for chain in chains]
    value_cols = [[Q0_rows[i][c] for i in range(m)] for c in range(r)]
    if matrix_rank(value_cols + taus, field) != r:
        raise InternalInconsistency(
            "osculating directions do not complement the value space"
        )

    # delta sequence for the adapted ordering: chains, then an echelon complement
    ordering = [g for chain in chains for g in chain]
    for c in range(r):
        probe = [field.one if i == c else field.zero for i in range(r)]
        if _independent(ordering, probe, field):
            ordering.append(probe)
    if len(ordering) != r:
        raise InternalInconsistency("adapted ordering failed to reach a basis")
    delta = []
    omega = {(): [field.one] + [field.zero] * (N - 1)}
    for gamma in ordering:
        omega = _wedge_extend(
            omega, _apply_matrix(Q, gamma, N, field), N, field, m
        )
        v = _omega_val(omega)
        if v is None:
            raise InternalInconsistency("delta wedge vanished to working precision")
        delta.append(v)
    if delta[-1] != mult:
        raise InternalInconsistency(
            f"delta_r = {delta[-1]} differs from multiplicity {mult}"
        )

    profile = WedgeProfile(
        place=t,
        multiplicity=mult,
        delta=tuple(delta),
        elementary_exponents=tuple(sorted(exps)),
    )
    kdata = KernelData(
        place=t,
        d_t=d_t,
        kernel_basis=tuple(tuple(b) for b in kernel),
        limit_directions=tuple(tuple(d) for d in directions),
    )
    return PlaceAnalysis(
        point=t.point,
        multiplicity=mult,
        d_t=d_t,
        factor_ranks=factor_ranks,
        profile=profile,
        kernel=kdata,
        section_orders=tuple(section_orders),
    ), violations


def kernel_dimension(system, t):
    """Kernel of the (quotient-corrected) evaluation at a rational place."""
    if not t.is_rational:
        raise BaseChangeRequired(t.splitting_degree())
    field = system.field
    N = 2
    sec, fmap = _local_matrices(system, t, N)
    Q = _quotient_matrix(sec, fmap, N, field)
    m = len(Q)
    r = len(Q[0]) if Q else 0
    Q0_rows = [[Q[i][c][0] for c in range(r)] for i in range(m)]
    kernel = nullspace(Q0_rows, r, field)
    directions = []
    for beta in kernel:
        col = _apply_matrix(Q, beta, N, field)
        directions.append(tuple(col[i][1] for i in range(m)))
    return KernelData(
        place=t,
        d_t=len(kernel),
        kernel_basis=tuple(tuple(b) for b in kernel),
        limit_directions=tuple(directions),
    )


# ---------------------------------------------------------------------------
# verdict engines


def _not_semistable(system, reason):
    return StabilityReport(
        verdict=NOT_SEMISTABLE,
        reason=reason,
        rank=system.declared_rank,
        section_count=len(system.sections),
        marked_point=system.mc.p,
        twist=system.twist,
    )


def _trivial_report(system):
    return StabilityReport(
        verdict=SEMISTABLE,
        reason=None,
        rank=0,
        section_count=len(system.sections),
        marked_point=system.mc.p,
        twist=system.twist,
        spectral_divisor=Divisor.zero(system.curve),
        splitting=SplittingType(factors=(), marked_point=system.mc.p),
        fully_split=True,
    )


def _require_unit_twist(system):
    if system.twist.degree() != 1:
        raise ValueError(
            "splitting analysis requires a degree-1 twist; use the general-"
            "twist pathway for larger twists"
        )


def _spectral_context(system):
    """Shared preamble: verdict guards, spectral divisor, base change."""
    r = system.declared_rank
    if len(system.sections) != r:
        return None, _not_semistable(system, REASON_COUNT)
    try:
        sigma = _wedge_divisor(system, corrected=True)
    except IdenticallyZeroWedge:
        return None, _not_semistable(system, REASON_WEDGE)
    k = sigma.splitting_degree()
    if k > 1:
        extended = system.base_change(k)
        sigma_ext = sigma.map_field(extended.curve, _embedding_of(system, extended))
    else:
        extended = system
        sigma_ext = sigma
    kernel_sigma = None
    if system.s:
        kernel_sigma = kernel_spectral_divisor(system)
    return (sigma, extended, sigma_ext, k, kernel_sigma), None


def _embedding_of(system, extended):
    src = system.curve.field
    dst = extended.curve.field
    if src == dst:
        return lambda a: a
    return embedding(src, dst)


def splitting_type(system):
    """The full decomposition analysis of a degree-zero bundle system."""
    _require_unit_twist(system)
    if system.declared_rank == 0:
        return _trivial_report(system)
    ctx, verdict = _spectral_context(system)
    if verdict is not None:
        return verdict
    sigma, extended, sigma_ext, k, kernel_sigma = ctx

    analyses = []
    violations = []
    factors = []
    for place, mult in sigma_ext.items():
        if not place.is_rational:
            raise InternalInconsistency(
                "spectral support not rational after base change"
            )
        analysis, viols = _analyze_place(extended, place, mult)
        analyses.append(analysis)
        violations.extend(viols)
        for rank in analysis.factor_ranks:
            factors.append(SplittingFactor(point=analysis.point, rank=rank))

    total = sum(f.rank for f in factors)
    if total != system.declared_rank:
        raise InternalInconsistency(
            f"factor ranks total {total}, expected {system.declared_rank}"
        )
    splitting = SplittingType(factors=tuple(factors), marked_point=extended.mc.p)
    return StabilityReport(
        verdict=SEMISTABLE,
        reason=None,
        rank=system.declared_rank,
        section_count=len(system.sections),
        marked_point=system.mc.p,
        twist=system.twist,
        spectral_divisor=sigma,
        kernel_spectral=kernel_sigma,
        base_change_degree=k,
        splitting=splitting,
        fully_split=all(f.rank == 1 for f in factors),
        places=tuple(analyses),
        slope_violations=tuple(violations),
    )


def fully_split_test(system):
    """The four-step fully-split algorithm.

    Step 1 is the section basis held by the system; step 2 compares the count
    with the rank; step 3 takes the top wedge and its support; step 4 checks,
    at every support point, the relation-space dimensions (a), the wedge
    orders (b), and the stacked relation matrix (c).
    """
    _require_unit_twist(system)
    if system.declared_rank == 0:
        return _trivial_report(system)
    ctx, verdict = _spectral_context(system)
    if verdict is not None:
        return verdict
    sigma, extended, sigma_ext, k, kernel_sigma = ctx
    r = system.declared_rank
    field = extended.field

    failures = []
    d_total = 0
    stacked = []
    per_place = []
    for place, mult in sigma_ext.items():
        kdata = kernel_dimension(extended, place)
        d_total += kdata.d_t
        stacked.extend(list(v) for v in kdata.kernel_basis)
        per_place.append((place, mult, kdata))
        if mult != kdata.d_t:
            failures.append(f"wedge order {mult} != d_t {kdata.d_t} at {place}")
    if d_total != r:
        failures.append(f"sum of d_t is {d_total}, rank is {r}")
    elif matrix_rank(stacked, field) != r:
        failures.append("stacked relation matrix is singular")

    fully = not failures
    splitting = None
    if fully:
        factors = []
        for place, mult, kdata in per_place:
            factors.extend(
                SplittingFactor(point=place.point, rank=1)
                for _ in range(kdata.d_t)
            )
        splitting = SplittingType(factors=tuple(factors), marked_point=extended.mc.p)
    return StabilityReport(
        verdict=SEMISTABLE,
        reason=None,
        rank=r,
        section_count=len(system.sections),
        marked_point=system.mc.p,
        twist=system.twist,
        spectral_divisor=sigma,
        kernel_spectral=kernel_sigma,
        base_change_degree=k,
        splitting=splitting,
        fully_split=fully,
        fully_split_failures=tuple(failures),
    )


# ---------------------------------------------------------------------------
# general twists


def general_twist_spectral(P, points):
    """Spectral divisor from a twist by distinct points p_1, ..., p_h.

    The first point is the base: sections vanishing at p_2 ... p_h form the
    graded subspace G, which must have dimension r; the spectral divisor is
    the wedge divisor of a basis of G minus r * ((p_2) + ... + (p_h)).
    """
    if not points:
        raise ValueError("at least one twist point required")
    if len({str(q) for q in points}) != len(points):
        raise ValueError("twist points must be mutually distinct")
    curve = P.mc.curve
    field = curve.field
    h = len(points)
    twist = Divisor.zero(curve)
    for q in points:
        twist = twist + Divisor.of_point(q)
    system = sections_direct_sum(P, twist)
    r = P.rank
    expected = r * h
    if len(system.sections) != expected:
        raise DimensionMismatch(expected, len(system.sections))
    if h == 1:
        return _wedge_divisor(system, corrected=False)

    rows = []
    nsec = len(system.sections)
    for q in points[1:]:
        ev = evaluate(system, Place.from_point(q))
        for a in range(system.m):
            rows.append([ev.section_values[a][j] for j in range(nsec)])
    combos = nullspace(rows, nsec, field)
    if len(combos) != r:
        raise DimensionMismatch(r, len(combos), "graded subspace G has wrong dimension")

    g_sections = []
    for combo in combos:
        vec = [CurveFunction.zero(curve) for _ in range(system.m)]
        for coeff, section in zip(combo, system.sections):
            if coeff.is_zero():
                continue
            for a in range(system.m):
                if not section[a].is_zero:
                    vec[a] = vec[a] + section[a] * CurveFunction.constant(
                        curve, coeff
                    )
        g_sections.append(vec)
    g_system = SectionSystem(
        P.mc, P.summands, twist, g_sections, declared_rank=r
    )
    sigma_pre = _wedge_divisor(g_system, corrected=False)
    correction = Divisor.zero(curve)
    for q in points[1:]:
        correction = correction + Divisor.of_point(q)
    sigma = sigma_pre - r * correction
    if sigma.degree() != r or not sigma.is_effective():
        raise InternalInconsistency(
            "general-twist spectral divisor is not effective of degree r"
        )
    return sigma
