import random

import pytest

from ellstab.errors import DivisionByZero, FieldMismatch, ZeroPolynomial
from ellstab.galois import (
    ExtensionField,
    FieldElement,
    Poly,
    PrimeField,
    QuotientRing,
    canonical_field,
    element_sqrt,
    embedding,
    field_arith,
    find_irreducible,
    is_irreducible,
    matrix_rank,
    nullspace,
    poly_factor,
    poly_roots,
    rref,
    solve_linear,
)

F5 = PrimeField(5)
F7 = PrimeField(7)


def test_prime_field_rejects_bad_moduli():
    with pytest.raises(ValueError):
        PrimeField(6)
    with pytest.raises(ValueError):
        PrimeField(3)
    with pytest.raises(ValueError):
        PrimeField(2)


def test_inverse_of_three_mod_five():
    assert field_arith(F5.one, F5.element(3), "div") == F5.element(2)


def test_additive_identity():
    a = F5.element(4)
    assert field_arith(a, F5.zero, "add") == a


def test_four_times_four_mod_five():
    assert field_arith(F5.element(4), F5.element(4), "mul") == F5.one


def test_division_by_zero_raises():
    with pytest.raises(DivisionByZero):
        field_arith(F5.one, F5.zero, "div")


def test_field_mismatch_raises():
    with pytest.raises(FieldMismatch):
        field_arith(F5.one, F7.one, "add")


@pytest.mark.parametrize("field", [F5, F7, canonical_field(5, 2), canonical_field(7, 2)])
def test_inverse_property(field):
    rng = random.Random(11)
    for _ in range(60):
        a = field.element_from_index(rng.randrange(1, field.order))
        assert a * a.inverse() == field.one
        assert a ** (field.order - 1) == field.one


def test_extension_field_arithmetic():
    F25 = canonical_field(5, 2)
    u = F25.generator
    # modulus is u^2 + 2, so u^2 = -2 = 3
    assert u * u == F25.element(3)
    a = u + 1
    assert a * a.inverse() == F25.one


def test_poly_divmod_roundtrip():
    rng = random.Random(5)
    for _ in range(40):
        a = Poly(F7, [rng.randrange(7) for _ in range(rng.randrange(1, 8))])
        b = Poly(F7, [rng.randrange(7) for _ in range(rng.randrange(1, 5))])
        if b.is_zero:
            continue
        q, r = divmod(a, b)
        assert q * b + r == a
        assert r.is_zero or r.degree < b.degree


def test_factor_x_squared_plus_one_over_f5():
    f = Poly(F5, [1, 0, 1])
    factors = poly_factor(f)
    assert factors == [
        (Poly(F5, [2, 1]), 1),
        (Poly(F5, [3, 1]), 1),
    ]


def test_factor_x_over_f5():
    assert poly_factor(Poly.x(F5)) == [(Poly.x(F5), 1)]


def test_factor_x_squared_over_f7():
    assert poly_factor(Poly(F7, [0, 0, 1])) == [(Poly.x(F7), 2)]


def test_factor_zero_polynomial_raises():
    with pytest.raises(ZeroPolynomial):
        poly_factor(Poly.zero(F5))


@pytest.mark.parametrize(
    "field", [F5, F7, PrimeField(11), PrimeField(13), canonical_field(5, 2)]
)
def test_factor_remultiplies(field):
    rng = random.Random(field.order)
    for _ in range(100):
        coeffs = [rng.randrange(field.order) for _ in range(rng.randrange(2, 9))]
        f = Poly(field, [field.element_from_index(c) for c in coeffs])
        if f.is_zero:
            continue
        product = Poly.constant(f.leading)
        for g, mult in poly_factor(f):
            assert g.is_monic
            product = product * g ** mult
        assert product == f


def test_factors_have_no_roots_at_desk_scale():
    # oracle equivalence: irreducible factors of degree >= 2 have no roots,
    # checked exhaustively in fields of size <= 121
    rng = random.Random(99)
    for field in [F5, F7, PrimeField(11), canonical_field(5, 2), canonical_field(11, 2)]:
        for _ in range(20):
            coeffs = [rng.randrange(field.order) for _ in range(rng.randrange(2, 7))]
            f = Poly(field, [field.element_from_index(c) for c in coeffs])
            if f.is_zero:
                continue
            for g, _ in poly_factor(f):
                if g.degree >= 2:
                    for a in field.elements():
                        assert not g.evaluate(a).is_zero()


def test_find_irreducible_degree_one():
    assert find_irreducible(F5, 1) == Poly.x(F5)


def test_find_irreducible_f5_degree_two():
    # exhaustive root search confirms x^2 and x^2+1 both have roots in F_5
    assert find_irreducible(F5, 2) == Poly(F5, [2, 0, 1])


def test_find_irreducible_f7_degree_two():
    got = find_irreducible(F7, 2)
    assert got.is_monic and got.degree == 2
    # verify minimality by enumerating candidates below it
    for n in range(got.coeff(0).rep + 7 * got.coeff(1).rep):
        cand = Poly(F7, [n % 7, n // 7, 1])
        if cand == got:
            break
        assert any(cand.evaluate(a).is_zero() for a in F7.elements())
    for a in F7.elements():
        assert not got.evaluate(a).is_zero()


def test_find_irreducible_is_repeatable():
    assert find_irreducible(F5, 3) == find_irreducible(F5, 3)


def test_embedding_preserves_arithmetic():
    F25 = canonical_field(5, 2)
    F625 = canonical_field(5, 4)
    phi = embedding(F25, F625)
    rng = random.Random(3)
    for _ in range(25):
        a = F25.element_from_index(rng.randrange(25))
        b = F25.element_from_index(rng.randrange(25))
        assert phi(a * b) == phi(a) * phi(b)
        assert phi(a + b) == phi(a) + phi(b)


def test_element_sqrt():
    for field in [F5, F7, canonical_field(5, 2)]:
        squares = 0
        for a in field.elements():
            r = element_sqrt(a)
            if r is not None:
                squares += 1
                assert r * r == a
        assert squares == (field.order - 1) // 2 + 1


def test_quotient_ring_sqrt():
    m = find_irreducible(F5, 2)
    ring = QuotientRing(F5, m)
    rng = random.Random(17)
    for _ in range(20):
        a = ring.element_from_index(rng.randrange(1, 25))
        sq = ring.mul(a, a)
        assert ring.is_square(sq)
        r = ring.sqrt(sq)
        assert ring.mul(r, r) == sq


def test_rref_and_nullspace():
    rows = [
        [F5.element(1), F5.element(2), F5.element(3)],
        [F5.element(2), F5.element(3), F5.element(1)],
    ]
    assert matrix_rank(rows, F5) == 2
    basis = nullspace(rows, 3, F5)
    assert len(basis) == 1
    v = basis[0]
    for row in rows:
        acc = F5.zero
        for a, b in zip(row, v):
            acc = acc + a * b
        assert acc.is_zero()


def test_solve_linear():
    rows = [[F5.element(2), F5.element(1)], [F5.element(1), F5.element(1)]]
    rhs = [F5.element(1), F5.element(2)]
    x = solve_linear(rows, rhs, F5)
    assert x is not None
    assert rows[0][0] * x[0] + rows[0][1] * x[1] == rhs[0]
    assert rows[1][0] * x[0] + rows[1][1] * x[1] == rhs[1]
    inconsistent = solve_linear(
        [[F5.one, F5.one], [F5.element(2), F5.element(2)]],
        [F5.one, F5.one],
        F5,
    )
    assert inconsistent is None


def test_is_irreducible_against_factor():
    rng = random.Random(23)
    for _ in range(40):
        f = Poly(F7, [rng.randrange(7) for _ in range(rng.randrange(2, 7))])
        if f.is_zero or f.degree < 1:
            continue
        f = f.monic()
        assert is_irreducible(f) == (len(poly_factor(f)) == 1 and poly_factor(f)[0][1] == 1 and poly_factor(f)[0][0] == f)


def test_large_prime_modulus():
    # arbitrary-precision moduli: a 61-bit prime works exactly
    big = PrimeField(2305843009213693951)  # 2^61 - 1
    a = big.element(2 ** 60 + 12345)
    assert a * a.inverse() == big.one
    f = Poly(big, [1, 2 ** 50, 1])
    q, r = divmod(f * f, f)
    assert q == f and r.is_zero


def test_poly_roots():
    f = Poly(F5, [0, 4, 0, 1])  # x^3 + 4x = x(x-1)(x-4)... check via evaluation
    roots = poly_roots(f)
    for r in roots:
        assert f.evaluate(r).is_zero()
    assert len(roots) == sum(1 for a in F5.elements() if f.evaluate(a).is_zero())
