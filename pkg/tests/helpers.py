"""Fixture builders shared by the bundle, stability, and acceptance tests."""

import random

from ellstab.elliptic import Curve, Divisor, MarkedCurve
from ellstab.funcspace import CurveFunction, rr_basis
from ellstab.bundles import (
    DirectSumPresentation,
    KernelPresentation,
    MonadPresentation,
    express_in_basis,
)
from ellstab.galois import PrimeField, nullspace

CURVE_TABLE = {
    5: (-1, 0),
    7: (1, 3),
    11: (-1, 1),
    13: (1, 1),
}


def standard_curve(p):
    a, b = CURVE_TABLE[p]
    return Curve(PrimeField(p), a, b)


def line_sum(mc, points):
    """V = (+) O((q_j) - (p)) for the given points."""
    p_div = Divisor.of_point(mc.p)
    return DirectSumPresentation(
        mc, [Divisor.of_point(q) - p_div for q in points]
    )


def random_marked_curve(rng, p):
    curve = standard_curve(p)
    pts = curve.points()
    return MarkedCurve(curve, rng.choice(pts)), pts


def g_row_space(mc, ambient, target, constant_columns=()):
    """Column description and coefficient basis for valid g rows.

    Returns (columns, lambda_basis): columns is a list of (a, fn) pairs from
    the spaces L(D_0 - D_a); lambda_basis spans the coefficient vectors with
    sum_a c_a * g_a = 0 for every constant column c in constant_columns.
    """
    curve = mc.curve
    field = curve.field
    bases = [rr_basis(target - D).basis for D in ambient]
    columns = [(a, f) for a, basis in enumerate(bases) for f in basis]
    if not constant_columns:
        lam = []
        for i in range(len(columns)):
            vec = [field.zero] * len(columns)
            vec[i] = field.one
            lam.append(vec)
        return columns, lam
    target_basis = rr_basis(target).basis
    rows = []
    for c in constant_columns:
        cond = [[field.zero] * len(columns) for _ in range(len(target_basis))]
        for idx, (a, f) in enumerate(columns):
            if c[a].is_zero():
                continue
            img = f * CurveFunction.constant(curve, c[a])
            coords = express_in_basis(img, target_basis, curve)
            for i, v in enumerate(coords):
                cond[i][idx] = v
        rows.extend(cond)
    return columns, nullspace(rows, len(columns), field)


def g_from_coeffs(mc, ambient, coeffs, columns):
    curve = mc.curve
    g = [CurveFunction.zero(curve) for _ in ambient]
    for coeff, (a, f) in zip(coeffs, columns):
        if not coeff.is_zero():
            g[a] = g[a] + f * CurveFunction.constant(curve, coeff)
    return g


def random_combination(rng, field, basis):
    vec = [field.zero] * len(basis[0])
    for b in basis:
        c = field.element_from_index(rng.randrange(field.order))
        vec = [v + c * x for v, x in zip(vec, b)]
    return vec


def random_kernel_presentation(rng, mc, m, max_tries=60):
    """A fiberwise-surjective g on m ambient degree-1 summands."""
    curve = mc.curve
    field = curve.field
    pts = [q for q in curve.points() if not q.is_infinity]
    for _ in range(max_tries):
        chosen = rng.sample(pts, m)
        ambient = [Divisor.of_point(q) for q in chosen]
        target = Divisor.zero(curve)
        for D in ambient:
            target = target + D
        columns, lam = g_row_space(mc, ambient, target)
        coeffs = random_combination(rng, field, lam)
        g = g_from_coeffs(mc, ambient, coeffs, columns)
        try:
            return KernelPresentation(mc, ambient, target, g)
        except ValueError:
            continue
    raise RuntimeError("failed to build a kernel presentation")


def random_monad_presentation(rng, mc, r, s, max_tries=80):
    """A valid monad with constant f columns: m = r + s + 1 summands."""
    curve = mc.curve
    field = curve.field
    m = r + s + 1
    pts = [q for q in curve.points() if not q.is_infinity]
    nonzero = [field.element_from_index(i) for i in range(1, field.order)]
    for _ in range(max_tries):
        chosen = rng.sample(pts, m)
        ambient = [Divisor.of_point(q) for q in chosen]
        target = Divisor.zero(curve)
        for D in ambient:
            target = target + D
        if s == 1:
            f_cols = [[field.one] * m]
        else:
            lams = rng.sample(nonzero, m)
            f_cols = [[field.one] * m, lams]
        columns, lam = g_row_space(mc, ambient, target, f_cols)
        if not lam:
            continue
        coeffs = random_combination(rng, field, lam)
        g = g_from_coeffs(mc, ambient, coeffs, columns)
        try:
            kernel = KernelPresentation(mc, ambient, target, g)
        except ValueError:
            continue
        f_matrix = [
            [CurveFunction.constant(curve, f_cols[j][a]) for j in range(s)]
            for a in range(m)
        ]
        try:
            return MonadPresentation(kernel, f_matrix)
        except ValueError:
            continue
    raise RuntimeError("failed to build a monad presentation")
