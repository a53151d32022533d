import random

import pytest

from ellstab.galois import PrimeField
from ellstab.elliptic import Curve, Divisor, MarkedCurve, Place
from ellstab.funcspace import CurveFunction, rr_basis, valuation
from ellstab.bundles import (
    DirectSumPresentation,
    KernelPresentation,
    MonadPresentation,
    evaluate,
    sections_direct_sum,
    sections_kernel,
    sections_monad,
)

from helpers import (
    g_from_coeffs,
    g_row_space,
    random_kernel_presentation,
    random_monad_presentation,
)

F5 = PrimeField(5)
E5 = Curve(F5, -1, 0)
MC5 = MarkedCurve(E5, E5.infinity())


def pt(x, y):
    return E5.point(x, y)


def dv(*terms):
    D = Divisor.zero(E5)
    for n, point in terms:
        D = D + n * Divisor.of_point(point)
    return D


def twist_p():
    return Divisor.of_point(MC5.p)


def test_direct_sum_counts_and_zero_divisor():
    q = pt(2, 1)
    P = DirectSumPresentation(MC5, [dv((1, q), (-1, MC5.p))])
    system = sections_direct_sum(P, twist_p())
    assert len(system.sections) == 1
    ev_q = evaluate(system, Place.from_point(q))
    assert ev_q.section_values[0][0].is_zero()


def test_direct_sum_lemma_count():
    qs = [pt(2, 1), pt(0, 0), pt(1, 0)]
    summands = [dv((1, q), (-1, MC5.p)) for q in qs]
    P = DirectSumPresentation(MC5, summands)
    system = sections_direct_sum(P, twist_p())
    assert len(system.sections) == P.rank == 3
    system.verify_membership()


def test_direct_sum_general_twist_count():
    q = pt(2, 1)
    P = DirectSumPresentation(
        MC5, [dv((1, q), (-1, MC5.p)), dv((1, pt(0, 0)), (-1, MC5.p))]
    )
    twist = dv((1, MC5.p), (1, pt(1, 0)), (1, pt(4, 0)))
    system = sections_direct_sum(P, twist)
    assert len(system.sections) == 2 * 3


def test_direct_sum_requires_total_degree_zero():
    with pytest.raises(ValueError):
        DirectSumPresentation(MC5, [dv((1, pt(2, 1)))])


def test_evaluate_diagonal_rank():
    q1, q2 = pt(2, 1), pt(0, 0)
    P = DirectSumPresentation(
        MC5, [dv((1, q1), (-1, MC5.p)), dv((1, q2), (-1, MC5.p))]
    )
    system = sections_direct_sum(P, twist_p())
    t = Place.from_point(pt(2, 4))
    ev = evaluate(system, t)
    assert not ev.section_values[0][0].is_zero()
    assert not ev.section_values[1][1].is_zero()
    assert ev.section_values[0][1].is_zero()
    assert ev.section_values[1][0].is_zero()
    ev1 = evaluate(system, Place.from_point(q1))
    assert ev1.section_values[0][0].is_zero()
    assert not ev1.section_values[1][1].is_zero()


def deterministic_kernel():
    q1, q2, q3 = pt(2, 1), pt(0, 0), pt(1, 0)
    ambient = [dv((1, q1)), dv((1, q2)), dv((1, q3))]
    target = dv((1, q1), (1, q2), (1, q3))
    columns, lam = g_row_space(MC5, ambient, target)
    rng = random.Random(4)
    for _ in range(40):
        coeffs = [F5.element(rng.randrange(5)) for _ in columns]
        g = g_from_coeffs(MC5, ambient, coeffs, columns)
        try:
            return KernelPresentation(MC5, ambient, target, g)
        except ValueError:
            continue
    raise RuntimeError("no valid g found")


def test_kernel_membership_validation():
    q1, q2 = pt(2, 1), pt(0, 0)
    ambient = [dv((1, q1)), dv((1, q2))]
    target = dv((1, q1), (1, q2))
    x = CurveFunction.x(E5)
    with pytest.raises(ValueError):
        # x has poles at infinity, which D_0 - D_a does not allow
        KernelPresentation(MC5, ambient, target, [x, x])


def test_kernel_section_count_and_identity():
    P = deterministic_kernel()
    system = sections_kernel(P, twist_p())
    # h^0(ker g') = m - 1 when ker g is semistable
    assert len(system.sections) == 2
    for section in system.sections:
        acc = CurveFunction.zero(E5)
        for g, comp in zip(P.g_row, section):
            acc = acc + g * comp
        assert acc.is_zero
    # expressing g_* needs L(D_0 + p) of dimension d + 1
    assert len(rr_basis(P.target + twist_p()).basis) == P.target.degree() + 1


def test_kernel_needs_at_least_two_summands():
    q = pt(2, 1)
    with pytest.raises(ValueError):
        KernelPresentation(MC5, [dv((1, q))], dv((1, q)), [CurveFunction.one(E5)])


def test_random_kernel_presentations_validate():
    rng = random.Random(12)
    for _ in range(5):
        P = random_kernel_presentation(rng, MC5, 3)
        system = sections_kernel(P, twist_p())
        assert len(system.sections) in (1, 2)


def test_monad_fixture_and_blocks():
    rng = random.Random(21)
    monad = random_monad_presentation(rng, MC5, 1, 1)
    system = sections_monad(monad, twist_p())
    assert system.s == 1
    assert len(system.sections) == monad.rank == 1
    assert len(system.modulus_block) == 1
    system.verify_membership()


def test_evaluate_generic_rank():
    from ellstab.galois import matrix_rank
    rng = random.Random(55)
    for _ in range(10):
        pts_all = [q for q in E5.points()]
        points = [rng.choice(pts_all) for _ in range(rng.randrange(1, 4))]
        P = DirectSumPresentation(
            MC5,
            [Divisor.of_point(q) - Divisor.of_point(MC5.p) for q in points],
        )
        system = sections_direct_sum(P, twist_p())
        generic = [
            q for q in pts_all
            if all(D.coefficient(Place.from_point(q)) == 0
                   for D in system.twisted_divisors())
        ]
        t = rng.choice(generic)
        ev = evaluate(system, Place.from_point(t))
        assert matrix_rank(ev.section_values, F5) == P.rank


def test_monad_with_s_zero_is_just_kernel():
    P = deterministic_kernel()
    system = sections_kernel(P, twist_p())
    assert system.s == 0
    assert system.modulus_block is None


def test_monad_rejects_non_complex():
    q1, q2, q3 = pt(2, 1), pt(2, 4), pt(1, 0)
    ambient = [dv((1, q1)), dv((1, q2)), dv((1, q3))]
    target = dv((1, q1), (1, q2), (1, q3))
    one = CurveFunction.one(E5)
    columns, lam = g_row_space(MC5, ambient, target)
    rng = random.Random(8)
    for _ in range(40):
        coeffs = [F5.element(rng.randrange(5)) for _ in columns]
        g = g_from_coeffs(MC5, ambient, coeffs, columns)
        try:
            kernel = KernelPresentation(MC5, ambient, target, g)
        except ValueError:
            continue
        gf = g[0] + g[1] + g[2]
        if gf.is_zero:
            continue
        with pytest.raises(ValueError):
            MonadPresentation(kernel, [[one], [one], [one]])
        return
    raise RuntimeError("never found a kernel with g.f != 0")


def test_monad_modulus_and_map_blocks():
    rng = random.Random(33)
    monad = random_monad_presentation(rng, MC5, 1, 1)
    system = sections_monad(monad, twist_p())
    away = next(
        q
        for q in E5.points()
        if not q.is_infinity
        and all(D.coefficient(Place.from_point(q)) == 0 for D in system.ambient)
    )
    ev = evaluate(system, Place.from_point(away))
    col = [ev.modulus_values[a][0] for a in range(system.m)]
    assert any(not c.is_zero() for c in col)
    # the bundle-map block keeps rank s everywhere, including at p itself
    ev_p = evaluate(system, Place.from_point(MC5.p))
    map_col = [ev_p.map_values[a][0] for a in range(system.m)]
    assert any(not c.is_zero() for c in map_col)
    # while the modulus sections themselves vanish at p
    mod_col = [ev_p.modulus_values[a][0] for a in range(system.m)]
    assert all(c.is_zero() for c in mod_col)
