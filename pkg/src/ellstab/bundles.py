"""Presentations of degree-zero bundles and their twisted section systems.

Three presentations are supported: direct sums of line bundles O(D_j), kernels
of fiberwise-surjective maps g: (+) O(D_a) -> O(D_0), and monads
0 -> O^s -> (+) O(D_a) -> O(D_0) -> 0 whose cohomology is the bundle.

A SectionSystem is a basis of global sections of the twisted bundle, each
section a vector of functions in the ambient coordinates, plus (monad case) a
modulus block spanning the image of the twisted trivial subbundle.  Evaluation
at a place trivializes coordinate a by the local factor t^mult(D_a + twist),
so entries are honest residue-field values.
"""

from __future__ import annotations

import itertools

from .errors import (
    BaseChangeRequired,
    DimensionMismatch,
    FieldMismatch,
    InternalInconsistency,
)
from .elliptic import Divisor, extension_data
from .funcspace import (
    CurveFunction,
    laurent_coefficient,
    principal_divisor,
    rr_basis,
)
from .galois import Poly, matrix_rank, nullspace, solve_linear


def _check_membership(f, allowed):
    """(f) + allowed >= 0 for a nonzero function f."""
    div = principal_divisor(f) + allowed
    return div.is_zero or div.is_effective()


def function_coordinates(funcs, curve):
    """Exact coordinate vectors of functions over a common denominator.

    The returned vectors are linear in the functions, injectively, so rank
    computations and coordinate solves on CurveFunctions reduce to the field.
    """
    field = curve.field
    lcm = Poly.one(field)
    for f in funcs:
        for d in (f.a.den, f.b.den):
            g = lcm.gcd(d)
            lcm = lcm * (d // g)
    polys = []
    for f in funcs:
        pa = f.a.num * (lcm // f.a.den)
        pb = f.b.num * (lcm // f.b.den)
        polys.append((pa, pb))
    deg_a = max((p.degree for p, _ in polys), default=-1)
    deg_b = max((p.degree for _, p in polys), default=-1)
    vectors = []
    for pa, pb in polys:
        vec = [pa.coeff(i) for i in range(deg_a + 1)]
        vec.extend(pb.coeff(i) for i in range(deg_b + 1))
        vectors.append(vec)
    return vectors


def section_coordinates(section_vectors, curve):
    """Coordinate rows for full section vectors (per-component linearization)."""
    if not section_vectors:
        return []
    m = len(section_vectors[0])
    columns = []
    for a in range(m):
        comp = [vec[a] for vec in section_vectors]
        columns.append(function_coordinates(comp, curve))
    rows = []
    for i in range(len(section_vectors)):
        row = []
        for a in range(m):
            row.extend(columns[a][i])
        rows.append(row)
    return rows


def express_in_basis(target, basis, curve):
    """Coordinates of `target` in the span of `basis`, or None."""
    field = curve.field
    coords = function_coordinates(list(basis) + [target], curve)
    matrix = [
        [coords[j][i] for j in range(len(basis))] for i in range(len(coords[0]))
    ]
    rhs = [coords[-1][i] for i in range(len(coords[0]))]
    return solve_linear(matrix, rhs, field)


def det_functions(matrix):
    """Determinant of a square matrix of CurveFunctions (Laplace with memo)."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty determinant")
    curve = None
    for row in matrix:
        for f in row:
            curve = f.curve
            break
        if curve:
            break
    memo = {}

    def minor(rows, cols):
        key = (rows, cols)
        if key in memo:
            return memo[key]
        if len(rows) == 1:
            val = matrix[rows[0]][cols[0]]
        else:
            val = CurveFunction.zero(curve)
            r0 = rows[0]
            rest = rows[1:]
            for idx, c in enumerate(cols):
                entry = matrix[r0][c]
                if entry.is_zero:
                    continue
                sub = minor(rest, cols[:idx] + cols[idx + 1:])
                term = entry * sub
                val = val + term if idx % 2 == 0 else val - term
        memo[key] = val
        return val

    return minor(tuple(range(n)), tuple(range(n)))


class DirectSumPresentation:
    """V = O(D_1) (+) ... (+) O(D_r); the summand degrees must total zero.

    Degree-zero summands give the semistable fixtures; summands of nonzero
    degree are allowed so that unstable bundles can be presented too.
    """

    def __init__(self, mc, summands):
        if not summands:
            raise ValueError("at least one summand required")
        for D in summands:
            if D.curve != mc.curve:
                raise FieldMismatch("summand on a different curve")
        total = sum(D.degree() for D in summands)
        if total != 0:
            raise ValueError(f"summand degrees total {total}, expected 0")
        self.mc = mc
        self.summands = list(summands)

    @property
    def rank(self):
        return len(self.summands)


class KernelPresentation:
    """V = ker(g) for g = (g_1 ... g_m): (+) O(D_a) -> O(D_0), fiberwise onto."""

    def __init__(self, mc, ambient, target, g_row):
        if len(ambient) != len(g_row) or len(ambient) < 2:
            raise ValueError("need one g entry per ambient summand, m >= 2")
        curve = mc.curve
        for D in ambient + [target]:
            if D.curve != curve:
                raise FieldMismatch("divisor on a different curve")
        if sum(D.degree() for D in ambient) != target.degree():
            raise ValueError("sum of ambient degrees must equal the target degree")
        self.mc = mc
        self.ambient = list(ambient)
        self.target = target
        self.g_row = list(g_row)
        self._validate()

    @property
    def rank(self):
        return len(self.ambient) - 1

    def _twist_divisors(self):
        return [self.target - D for D in self.ambient]

    def _validate(self):
        zero_divs = []
        for g, bound in zip(self.g_row, self._twist_divisors()):
            if g.is_zero:
                zero_divs.append(None)
                continue
            z = principal_divisor(g) + bound
            if not (z.is_zero or z.is_effective()):
                raise ValueError(f"g entry {g} is not a section of O(D_0 - D_a)")
            zero_divs.append(z)
        if all(z is None for z in zero_divs):
            raise ValueError("g vanishes identically")
        # fiberwise surjectivity: the trivialized entries have no common zero
        candidates = set()
        for z in zero_divs:
            if z is not None:
                candidates.update(z.support())
        for place in candidates:
            if all(z is None or z.coefficient(place) > 0 for z in zero_divs):
                raise ValueError(
                    f"g drops rank at {place}: not fiberwise surjective"
                )


class MonadPresentation:
    """A monad 0 -> O^s -> (+) O(D_a) -> O(D_0) -> 0 with cohomology V."""

    def __init__(self, kernel, f_matrix):
        if not f_matrix or len(f_matrix) != len(kernel.ambient):
            raise ValueError("f must have one row per ambient summand")
        s = len(f_matrix[0])
        if s < 1 or any(len(row) != s for row in f_matrix):
            raise ValueError("f must be a rectangular m x s matrix, s >= 1")
        self.kernel = kernel
        self.f_matrix = [list(row) for row in f_matrix]
        self.s = s
        self._validate()

    @property
    def rank(self):
        return len(self.kernel.ambient) - self.s - 1

    def _validate(self):
        mc = self.kernel.mc
        curve = mc.curve
        m = len(self.kernel.ambient)
        if self.rank < 1:
            raise ValueError("monad rank m - s - 1 must be >= 1")
        for a in range(m):
            for f in self.f_matrix[a]:
                if not f.is_zero and not _check_membership(
                    f, self.kernel.ambient[a]
                ):
                    raise ValueError("f entry is not a section of O(D_a)")
        for j in range(self.s):
            acc = CurveFunction.zero(curve)
            for a in range(m):
                acc = acc + self.kernel.g_row[a] * self.f_matrix[a][j]
            if not acc.is_zero:
                raise ValueError("g o f != 0: not a monad")
        self._check_injectivity()

    def _check_injectivity(self):
        m = len(self.kernel.ambient)
        s = self.s
        minor_divs = []
        any_nonzero = False
        for rows in itertools.combinations(range(m), s):
            sub = [[self.f_matrix[a][j] for j in range(s)] for a in rows]
            det = det_functions(sub)
            if det.is_zero:
                minor_divs.append(None)
                continue
            any_nonzero = True
            bound = Divisor.zero(self.kernel.mc.curve)
            for a in rows:
                bound = bound + self.kernel.ambient[a]
            minor_divs.append(principal_divisor(det) + bound)
        if not any_nonzero:
            raise ValueError("f has rank < s everywhere")
        candidates = set()
        for z in minor_divs:
            if z is not None:
                candidates.update(z.support())
        for place in candidates:
            if all(z is None or z.coefficient(place) > 0 for z in minor_divs):
                raise ValueError(
                    f"f drops rank at {place}: not fiberwise injective"
                )


class SectionSystem:
    """A section basis of the twisted bundle in ambient coordinates."""

    def __init__(
        self,
        mc,
        ambient,
        twist,
        sections,
        modulus_block=None,
        f_matrix=None,
        declared_rank=None,
    ):
        self.mc = mc
        self.ambient = list(ambient)
        self.twist = twist
        self.sections = [list(s) for s in sections]
        self.modulus_block = (
            [list(s) for s in modulus_block] if modulus_block else None
        )
        self.f_matrix = [list(r) for r in f_matrix] if f_matrix else None
        self.declared_rank = (
            declared_rank if declared_rank is not None else len(self.sections)
        )
        m = len(self.ambient)
        for vec in self.sections + (self.modulus_block or []):
            if len(vec) != m:
                raise ValueError("section vector length differs from ambient size")
        self._check_independence()

    @property
    def curve(self):
        return self.mc.curve

    @property
    def field(self):
        return self.mc.curve.field

    @property
    def m(self):
        return len(self.ambient)

    @property
    def s(self):
        return len(self.modulus_block) if self.modulus_block else 0

    def twisted_divisors(self):
        return [D + self.twist for D in self.ambient]

    def all_columns(self):
        """Modulus block first, then the sections."""
        return (self.modulus_block or []) + self.sections

    def _check_independence(self):
        cols = self.all_columns()
        if not cols:
            return
        rows = section_coordinates(cols, self.curve)
        if matrix_rank(rows, self.field) != len(cols):
            raise InternalInconsistency("section system is linearly dependent")

    def verify_membership(self):
        """Check every section component against L(D_a + twist) (test hook)."""
        for vec in self.all_columns():
            for f, D in zip(vec, self.twisted_divisors()):
                if not f.is_zero and not _check_membership(f, D):
                    raise InternalInconsistency(
                        f"component {f} escapes its line bundle"
                    )
        return True

    def base_change(self, k):
        """The same system re-embedded over the degree-k extension."""
        if k == 1:
            return self
        curve = self.curve
        new_field, phi = extension_data(curve.field, k)
        new_curve = curve.map_field(new_field, phi)

        def map_vec(vec):
            return [f.map_field(new_curve, phi) for f in vec]

        return SectionSystem(
            self.mc.map_field(new_curve, phi),
            [D.map_field(new_curve, phi) for D in self.ambient],
            self.twist.map_field(new_curve, phi),
            [map_vec(v) for v in self.sections],
            [map_vec(v) for v in self.modulus_block] if self.modulus_block else None,
            [map_vec(r) for r in self.f_matrix] if self.f_matrix else None,
            self.declared_rank,
        )


class EvaluationData:
    """Trivialized values at one place: sections, modulus block, bundle map."""

    def __init__(self, place, section_values, modulus_values, map_values):
        self.place = place
        self.section_values = section_values
        self.modulus_values = modulus_values
        self.map_values = map_values

    def matrix(self):
        return self.section_values


def evaluate(system, t):
    """The m x r evaluation matrix (plus modulus and map blocks) at a place."""
    if not t.is_rational:
        raise BaseChangeRequired(t.splitting_degree())
    twisted = system.twisted_divisors()

    def value(f, mult):
        if f.is_zero:
            return system.field.zero
        return laurent_coefficient(f, t, -mult)

    def block(vectors, divisors):
        out = []
        for a in range(system.m):
            mult = divisors[a].coefficient(t)
            out.append([value(vec[a], mult) for vec in vectors])
        return out

    section_values = block(system.sections, twisted)
    modulus_values = (
        block(system.modulus_block, twisted) if system.modulus_block else None
    )
    map_values = None
    if system.f_matrix:
        cols = [
            [system.f_matrix[a][j] for a in range(system.m)]
            for j in range(len(system.f_matrix[0]))
        ]
        map_values = block(cols, system.ambient)
    return EvaluationData(t, section_values, modulus_values, map_values)


def sections_direct_sum(P, twist):
    """Sections of (+) O(D_j + twist), one coordinate per summand."""
    if twist.degree() < 1:
        raise ValueError("twist must have positive degree")
    curve = P.mc.curve
    sections = []
    for j, D in enumerate(P.summands):
        basis = rr_basis(D + twist)
        for f in basis.basis:
            vec = [CurveFunction.zero(curve) for _ in P.summands]
            vec[j] = f
            sections.append(vec)
    return SectionSystem(
        P.mc, P.summands, twist, sections, declared_rank=P.rank
    )


def sections_kernel(P, twist):
    """A basis of ker(g_*) on the twisted ambient sections.

    g_* maps (f_a) to sum g_a f_a inside L(D_0 + twist); the kernel is exactly
    H^0(ker g tensor O(twist)).  Sections come out in reduced echelon order.
    """
    curve = P.mc.curve
    field = curve.field
    ambient_bases = [rr_basis(D + twist).basis for D in P.ambient]
    target_basis = rr_basis(P.target + twist).basis
    dim_target = len(target_basis)

    columns = []  # (ambient index, basis function)
    images = []
    for a, basis in enumerate(ambient_bases):
        for f in basis:
            columns.append((a, f))
            images.append(P.g_row[a] * f)

    rows = [[field.zero] * len(columns) for _ in range(dim_target)]
    for c, img in enumerate(images):
        if img.is_zero:
            continue
        coords = express_in_basis(img, target_basis, curve)
        if coords is None:
            raise InternalInconsistency(
                "g image escapes L(D_0 + twist); membership bookkeeping broken"
            )
        for i in range(dim_target):
            rows[i][c] = coords[i]

    kernel = nullspace(rows, len(columns), field)
    sections = []
    for vec in kernel:
        section = [CurveFunction.zero(curve) for _ in P.ambient]
        for coeff, (a, f) in zip(vec, columns):
            if not coeff.is_zero():
                section[a] = section[a] + f * CurveFunction.constant(curve, coeff)
        sections.append(section)
    for section in sections:
        acc = CurveFunction.zero(curve)
        for g, comp in zip(P.g_row, section):
            acc = acc + g * comp
        if not acc.is_zero:
            raise InternalInconsistency("kernel section fails g * s = 0")
    return SectionSystem(
        P.mc, P.ambient, twist, sections, declared_rank=P.rank
    )


def sections_monad(P, twist):
    """Sections of the cohomology bundle of a monad.

    The modulus block is the image under f_* of a basis of L(twist)^s; the
    cohomology sections are an echelon-deterministic complement inside
    H^0(ker g').
    """
    if twist.degree() != 1:
        raise ValueError("monad section systems require a degree-1 twist")
    kernel_system = sections_kernel(P.kernel, twist)
    curve = P.kernel.mc.curve
    field = curve.field
    w_basis = rr_basis(twist).basis
    modulus = []
    for j in range(P.s):
        for w in w_basis:
            vec = [P.f_matrix[a][j] * w for a in range(len(P.f_matrix))]
            modulus.append(vec)
    if len(modulus) != P.s:
        raise InternalInconsistency("modulus block size differs from s")

    kernel_secs = kernel_system.sections
    if not kernel_secs:
        raise DimensionMismatch(P.s, 0, "kernel has no sections at all")
    rows = section_coordinates(kernel_secs + modulus, curve)
    kernel_rows = rows[: len(kernel_secs)]
    modulus_rows = rows[len(kernel_secs):]

    # coordinates of the modulus block inside the kernel-section basis
    matrix = [
        [kernel_rows[j][i] for j in range(len(kernel_secs))]
        for i in range(len(rows[0]))
    ]
    modulus_coords = []
    for mrow in modulus_rows:
        sol = solve_linear(matrix, list(mrow), field)
        if sol is None:
            raise InternalInconsistency("modulus block escapes H^0(ker g')")
        modulus_coords.append(sol)

    # echelon extension: kernel basis vectors that enlarge the modulus span
    work = [list(r) for r in modulus_coords]
    complement = []
    for idx, sec in enumerate(kernel_secs):
        probe = [field.zero] * len(kernel_secs)
        probe[idx] = field.one
        if matrix_rank(work + [probe], field) > matrix_rank(work, field):
            work.append(probe)
            complement.append(sec)
    return SectionSystem(
        P.kernel.mc,
        P.kernel.ambient,
        twist,
        complement,
        modulus_block=modulus,
        f_matrix=P.f_matrix,
        declared_rank=P.rank,
    )
