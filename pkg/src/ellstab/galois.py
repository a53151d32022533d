"""Exact arithmetic over small finite fields.

Prime fields F_p (p > 3), extensions F_{p^k} = F_p[u]/(m(u)) presented by a
monic irreducible over the prime field, dense univariate polynomials, and
polynomial factorization (squarefree / distinct-degree / equal-degree with
deterministic candidate enumeration, so results are reproducible between
runs).  The exact linear algebra used by every higher module also lives here.

All values are immutable after construction.
"""

from __future__ import annotations

import itertools

from .errors import DivisionByZero, FieldMismatch, ZeroPolynomial

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, valid far beyond 2**64."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field F_p for a prime p > 3."""

    __slots__ = ("p",)

    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p <= 3:
            raise ValueError("characteristic 2 and 3 are not supported")
        object.__setattr__(self, "p", p)

    def __setattr__(self, *args):
        raise AttributeError("PrimeField is immutable")

    @property
    def characteristic(self):
        return self.p

    @property
    def degree(self):
        return 1

    @property
    def order(self):
        return self.p

    def element(self, value):
        return FieldElement(self, self.rep_from(value))

    @property
    def zero(self):
        return FieldElement(self, 0)

    @property
    def one(self):
        return FieldElement(self, 1)

    def element_from_index(self, i):
        if not 0 <= i < self.p:
            raise ValueError("index out of range")
        return FieldElement(self, i)

    def elements(self):
        for i in range(self.p):
            yield FieldElement(self, i)

    # raw-representation arithmetic (reps are ints in [0, p))

    def rep_from(self, value):
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch("element of a different field")
            return value.rep
        if isinstance(value, int):
            return value % self.p
        raise TypeError(f"cannot coerce {value!r} into F_{self.p}")

    def add_rep(self, a, b):
        return (a + b) % self.p

    def sub_rep(self, a, b):
        return (a - b) % self.p

    def neg_rep(self, a):
        return (-a) % self.p

    def mul_rep(self, a, b):
        return a * b % self.p

    def inv_rep(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return pow(a, -1, self.p)

    def pow_rep(self, a, e):
        if e < 0:
            return pow(self.inv_rep(a), -e, self.p)
        return pow(a, e, self.p)

    def rep_is_zero(self, a):
        return a == 0

    def rep_key(self, a):
        return (a,)

    def rep_str(self, a):
        return str(a)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"F_{self.p}"


class ExtensionField:
    """F_{p^k} presented as F_p[u]/(m(u)), m monic irreducible of degree k >= 2."""

    __slots__ = ("base", "p", "k", "modulus", "_red")

    def __init__(self, base, modulus):
        if not isinstance(base, PrimeField):
            raise TypeError("extension base must be a prime field")
        if modulus.field != base or not modulus.is_monic or modulus.degree < 2:
            raise ValueError("modulus must be monic of degree >= 2 over the base")
        if not is_irreducible(modulus):
            raise ValueError("modulus is not irreducible")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "p", base.p)
        object.__setattr__(self, "k", modulus.degree)
        object.__setattr__(self, "modulus", modulus)
        # reductions of u^k .. u^(2k-2) as coefficient tuples
        p, k = base.p, modulus.degree
        mod_list = [c.rep for c in modulus.coeffs]
        red = []
        cur = [(-mod_list[i]) % p for i in range(k)]  # u^k reduced
        red.append(tuple(cur))
        for _ in range(k - 2):
            shifted = [0] + cur  # multiply by u
            overflow = shifted.pop()  # coefficient of u^k
            cur = [(shifted[i] + overflow * red[0][i]) % p for i in range(k)]
            red.append(tuple(cur))
        object.__setattr__(self, "_red", tuple(red))

    def __setattr__(self, *args):
        raise AttributeError("ExtensionField is immutable")

    @property
    def characteristic(self):
        return self.p

    @property
    def degree(self):
        return self.k

    @property
    def order(self):
        return self.p ** self.k

    def element(self, value):
        return FieldElement(self, self.rep_from(value))

    @property
    def zero(self):
        return FieldElement(self, (0,) * self.k)

    @property
    def one(self):
        return FieldElement(self, (1,) + (0,) * (self.k - 1))

    @property
    def generator(self):
        """The class of u."""
        return FieldElement(self, (0, 1) + (0,) * (self.k - 2))

    def element_from_index(self, i):
        if not 0 <= i < self.order:
            raise ValueError("index out of range")
        digits = []
        for _ in range(self.k):
            digits.append(i % self.p)
            i //= self.p
        return FieldElement(self, tuple(digits))

    def elements(self):
        for digits in itertools.product(range(self.p), repeat=self.k):
            yield FieldElement(self, digits[::-1])

    def rep_from(self, value):
        if isinstance(value, FieldElement):
            if value.field == self:
                return value.rep
            if value.field == self.base:
                return (value.rep,) + (0,) * (self.k - 1)
            raise FieldMismatch("element of a different field")
        if isinstance(value, int):
            return (value % self.p,) + (0,) * (self.k - 1)
        if isinstance(value, (tuple, list)):
            v = [int(c) % self.p for c in value]
            if len(v) > self.k:
                raise ValueError("too many coefficients")
            return tuple(v + [0] * (self.k - len(v)))
        raise TypeError(f"cannot coerce {value!r} into {self!r}")

    def add_rep(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub_rep(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg_rep(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def mul_rep(self, a, b):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        out = [c % p for c in prod[:k]]
        for j in range(k, 2 * k - 1):
            c = prod[j] % p
            if c:
                red = self._red[j - k]
                for i in range(k):
                    out[i] = (out[i] + c * red[i]) % p
        return tuple(out)

    def inv_rep(self, a):
        if all(c == 0 for c in a):
            raise DivisionByZero("inverse of zero")
        p = self.p
        # extended Euclid over F_p[u] on coefficient lists
        r0 = [c.rep for c in self.modulus.coeffs]
        r1 = list(a)
        s0, s1 = [0], [1]

        def strip(v):
            while v and v[-1] == 0:
                v.pop()
            return v

        r0, r1 = strip(r0), strip(r1)
        while r1:
            q, r = _int_poly_divmod(r0, r1, p)
            r0, r1 = r1, strip(r)
            s0, s1 = s1, strip(_int_poly_sub(s0, _int_poly_mul(q, s1, p), p))
        lead_inv = pow(r0[-1], -1, p)
        inv = [c * lead_inv % p for c in s0]
        inv = inv[: self.k] + [0] * (self.k - len(inv))
        return tuple(inv)

    def pow_rep(self, a, e):
        if e < 0:
            a = self.inv_rep(a)
            e = -e
        result = self.one.rep
        base = a
        while e:
            if e & 1:
                result = self.mul_rep(result, base)
            base = self.mul_rep(base, base)
            e >>= 1
        return result

    def rep_is_zero(self, a):
        return all(c == 0 for c in a)

    def rep_key(self, a):
        return a

    def rep_str(self, a):
        terms = []
        for i in range(self.k - 1, -1, -1):
            c = a[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                head = "" if c == 1 else f"{c}*"
                var = "u" if i == 1 else f"u^{i}"
                terms.append(head + var)
        return " + ".join(terms) if terms else "0"

    def __eq__(self, other):
        return (
            isinstance(other, ExtensionField)
            and other.p == self.p
            and other.modulus.coeff_reps() == self.modulus.coeff_reps()
        )

    def __hash__(self):
        return hash(("ExtensionField", self.p, self.modulus.coeff_reps()))

    def __repr__(self):
        return f"F_{self.p}^{self.k}"


def _int_poly_divmod(a, b, p):
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv = pow(lb, -1, p)
    q = [0] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return q, a[:db]


def _int_poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _int_poly_sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return [(x - y) % p for x, y in zip(a, b)]


class FieldElement:
    """An element of a PrimeField or ExtensionField."""

    __slots__ = ("field", "rep")

    def __init__(self, field, rep):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rep", rep)

    def __setattr__(self, *args):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch("elements of different fields")
            return other.rep
        if isinstance(other, int):
            return self.field.rep_from(other)
        return NotImplemented

    def __add__(self, other):
        rep = self._coerce(other)
        if rep is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.add_rep(self.rep, rep))

    __radd__ = __add__

    def __sub__(self, other):
        rep = self._coerce(other)
        if rep is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.sub_rep(self.rep, rep))

    def __rsub__(self, other):
        rep = self._coerce(other)
        if rep is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.sub_rep(rep, self.rep))

    def __mul__(self, other):
        rep = self._coerce(other)
        if rep is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.mul_rep(self.rep, rep))

    __rmul__ = __mul__

    def __truediv__(self, other):
        rep = self._coerce(other)
        if rep is NotImplemented:
            return NotImplemented
        return FieldElement(
            self.field, self.field.mul_rep(self.rep, self.field.inv_rep(rep))
        )

    def __rtruediv__(self, other):
        rep = self._coerce(other)
        if rep is NotImplemented:
            return NotImplemented
        return FieldElement(
            self.field, self.field.mul_rep(rep, self.field.inv_rep(self.rep))
        )

    def __neg__(self):
        return FieldElement(self.field, self.field.neg_rep(self.rep))

    def __pow__(self, e):
        return FieldElement(self.field, self.field.pow_rep(self.rep, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv_rep(self.rep))

    def is_zero(self):
        return self.field.rep_is_zero(self.rep)

    def key(self):
        return self.field.rep_key(self.rep)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.rep == self.field.rep_from(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.rep == other.rep

    def __hash__(self):
        return hash((self.field, self.rep))

    def __str__(self):
        return self.field.rep_str(self.rep)

    def __repr__(self):
        return f"<{self} in {self.field!r}>"


def field_arith(a, b, op):
    """Dispatch {add, sub, mul, div} on two elements of one field."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise DivisionByZero("division by zero")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


class Poly:
    """Dense univariate polynomial over a fixed field, canonical form
    (no trailing zero coefficients; the zero polynomial has no coefficients)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        elems = []
        for c in coeffs:
            if isinstance(c, FieldElement):
                if c.field != field:
                    raise FieldMismatch("coefficient from a different field")
                elems.append(c)
            else:
                elems.append(field.element(c))
        while elems and elems[-1].is_zero():
            elems.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(elems))

    def __setattr__(self, *args):
        raise AttributeError("Poly is immutable")

    @classmethod
    def zero(cls, field):
        return cls(field, [])

    @classmethod
    def one(cls, field):
        return cls(field, [1])

    @classmethod
    def x(cls, field):
        return cls(field, [0, 1])

    @classmethod
    def constant(cls, value):
        return cls(value.field, [value])

    @classmethod
    def monomial(cls, field, degree, coeff=1):
        return cls(field, [0] * degree + [coeff])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def leading(self):
        if self.is_zero:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self):
        return not self.is_zero and self.leading == 1

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def coeff_reps(self):
        return tuple(c.rep for c in self.coeffs)

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.field != self.field:
                raise FieldMismatch("polynomials over different fields")
            return other
        if isinstance(other, (int, FieldElement)):
            return Poly(self.field, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(
            self.field, [self.coeff(i) + other.coeff(i) for i in range(n)]
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(
            self.field, [self.coeff(i) - other.coeff(i) for i in range(n)]
        )

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Poly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            c = self.field.element(other) if isinstance(other, int) else other
            return Poly(self.field, [a * c for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Poly.zero(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.field, out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise DivisionByZero("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        inv = other.leading.inverse()
        q = [self.field.zero] * max(len(rem) - db, 0)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i] * inv
            if not c.is_zero():
                q[i - db] = c
                for j in range(db + 1):
                    rem[i - db + j] = rem[i - db + j] - c * other.coeffs[j]
        return Poly(self.field, q), Poly(self.field, rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative polynomial power")
        result = Poly.one(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def pow_mod(self, e, modulus):
        result = Poly.one(self.field)
        base = self % modulus
        while e:
            if e & 1:
                result = result * base % modulus
            base = base * base % modulus
            e >>= 1
        return result

    def monic(self):
        if self.is_zero or self.is_monic:
            return self
        return self * self.leading.inverse()

    def gcd(self, other):
        a, b = self, self._coerce(other)
        while not b.is_zero:
            a, b = b, a % b
        return a.monic() if not a.is_zero else a

    def extended_gcd(self, other):
        """Return (g, s, t) with s*self + t*other = g, g monic (or zero)."""
        a, b = self, self._coerce(other)
        s0, s1 = Poly.one(self.field), Poly.zero(self.field)
        t0, t1 = Poly.zero(self.field), Poly.one(self.field)
        while not b.is_zero:
            q, r = divmod(a, b)
            a, b = b, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if a.is_zero:
            return a, s0, t0
        c = a.leading.inverse()
        return a * c, s0 * c, t0 * c

    def derivative(self):
        return Poly(
            self.field,
            [self.coeffs[i] * i for i in range(1, len(self.coeffs))],
        )

    def evaluate(self, x):
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def multiplicity_of(self, factor):
        """Largest e with factor^e dividing self (self nonzero)."""
        if self.is_zero:
            raise ZeroPolynomial("multiplicity in the zero polynomial")
        if factor.degree < 1:
            raise ValueError("multiplicity requires a nonconstant factor")
        e = 0
        cur = self
        while True:
            q, r = divmod(cur, factor)
            if not r.is_zero:
                return e
            e += 1
            cur = q

    def key(self):
        return (self.degree, tuple(c.key() for c in reversed(self.coeffs)))

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, tuple(c.rep for c in self.coeffs)))

    def to_str(self, var="x"):
        if self.is_zero:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            cs = str(c)
            needs_parens = "+" in cs or "-" in cs or "*" in cs
            if i == 0:
                terms.append(f"({cs})" if needs_parens else cs)
                continue
            var_part = var if i == 1 else f"{var}^{i}"
            if cs == "1":
                terms.append(var_part)
            else:
                head = f"({cs})" if needs_parens else cs
                terms.append(f"{head}*{var_part}")
        return " + ".join(terms)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly({self})"


def poly_from_index(field, n):
    """The n-th polynomial in the canonical enumeration: base-|field| digits,
    constant coefficient least significant."""
    coeffs = []
    q = field.order
    while n:
        coeffs.append(field.element_from_index(n % q))
        n //= q
    return Poly(field, coeffs)


def is_irreducible(f):
    """Rabin irreducibility test for a monic polynomial of degree >= 1."""
    if f.is_zero or f.degree < 1:
        return False
    if f.degree == 1:
        return True
    field = f.field
    q = field.order
    n = f.degree
    x = Poly.x(field)

    def x_q_power(j):
        h = x % f
        for _ in range(j):
            h = h.pow_mod(q, f)
        return h

    if x_q_power(n) != x % f:
        return False
    for ell in _prime_divisors(n):
        h = x_q_power(n // ell)
        if f.gcd(h - x).degree != 0:
            return False
    return True


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def find_irreducible(field, k):
    """Smallest monic irreducible of degree k in the canonical coefficient
    order (lower-degree tails enumerated least-significant first)."""
    if k < 1:
        raise ValueError("degree must be >= 1")
    if k == 1:
        return Poly.x(field)
    q = field.order
    for n in range(q ** k):
        tail = poly_from_index(field, n)
        cand = Poly.monomial(field, k) + tail
        if is_irreducible(cand):
            return cand
    raise RuntimeError("unreachable: irreducibles of every degree exist")


def _p_th_root(f):
    """For f with zero derivative, the g with g(x)^p = f(x)."""
    field = f.field
    p = field.characteristic
    e = field.order // p
    coeffs = [f.coeff(p * i) ** e for i in range(f.degree // p + 1)]
    return Poly(field, coeffs)


def _squarefree_parts(f, scale, acc):
    """Accumulate squarefree factors of monic f into acc: poly -> multiplicity."""
    d = f.derivative()
    if d.is_zero:
        _squarefree_parts(_p_th_root(f), scale * f.field.characteristic, acc)
        return
    c = f.gcd(d)
    w = f // c
    i = 1
    while w.degree > 0:
        y = w.gcd(c)
        z = w // y
        if z.degree > 0:
            acc[z] = acc.get(z, 0) + scale * i
        w = y
        c = c // y
        i += 1
    if c.degree > 0:
        _squarefree_parts(_p_th_root(c), scale * f.field.characteristic, acc)


def _distinct_degree(f):
    """Split monic squarefree f into [(product of irreducibles of degree d, d)]."""
    field = f.field
    q = field.order
    out = []
    x = Poly.x(field)
    v = f
    h = x % f
    d = 0
    while v.degree >= 2 * (d + 1):
        d += 1
        h = h.pow_mod(q, v)
        g = v.gcd(h - x)
        if g.degree > 0:
            out.append((g, d))
            v = v // g
            h = h % v
    if v.degree > 0:
        out.append((v, v.degree))
    return out


def _equal_degree(f, d):
    """Split monic squarefree f (all factors of degree d) into irreducibles.

    Cantor-Zassenhaus with candidates drawn from the canonical enumeration,
    so every run produces the same computation.
    """
    field = f.field
    q = field.order
    e = (q ** d - 1) // 2
    out = []

    def split(g):
        if g.degree == d:
            out.append(g)
            return
        n = q  # first index whose polynomial has degree >= 1
        while True:
            a = poly_from_index(field, n)
            n += 1
            if a.degree < 1 or a.degree >= g.degree + d:
                continue
            b = a.pow_mod(e, g) - 1
            h = g.gcd(b)
            if 0 < h.degree < g.degree:
                split(h)
                split(g // h)
                return

    split(f)
    return out


def poly_factor(f):
    """Factor f into monic irreducibles with multiplicities.

    The product of the factors (to their multiplicities) equals f up to the
    leading coefficient.  Output is sorted by (degree, coefficients).
    """
    if f.is_zero:
        raise ZeroPolynomial("cannot factor the zero polynomial")
    work = f.monic()
    if work.degree == 0:
        return []
    squarefree = {}
    _squarefree_parts(work, 1, squarefree)
    found = {}
    for part, mult in squarefree.items():
        for prod, d in _distinct_degree(part):
            for irr in _equal_degree(prod, d):
                found[irr] = found.get(irr, 0) + mult
    return sorted(found.items(), key=lambda item: item[0].key())


def poly_roots(f):
    """Roots of f in its own field, sorted canonically, without multiplicity."""
    roots = []
    for g, _ in poly_factor(f):
        if g.degree == 1:
            roots.append(-g.coeff(0))
    return sorted(roots, key=lambda r: r.key())


_CANONICAL_FIELDS = {}


def canonical_field(p, k):
    """The canonical field with p^k elements: F_p itself, or F_p[u]/(m) with m
    the first irreducible of degree k in the canonical order."""
    key = (p, k)
    if key not in _CANONICAL_FIELDS:
        base = canonical_field(p, 1) if k > 1 else PrimeField(p)
        if k == 1:
            _CANONICAL_FIELDS[key] = base
        else:
            _CANONICAL_FIELDS[key] = ExtensionField(base, find_irreducible(base, k))
    return _CANONICAL_FIELDS[key]


_EMBEDDING_ROOTS = {}


def embedding(src, dst):
    """A field embedding src -> dst (orders must be compatible); deterministic:
    the modulus of src is sent to its canonically smallest root in dst."""
    if src == dst:
        return lambda a: a
    if isinstance(src, PrimeField):
        if src.p != dst.characteristic:
            raise FieldMismatch("different characteristics")
        return lambda a, _dst=dst: _dst.element(a.rep)
    if dst.degree % src.degree != 0:
        raise FieldMismatch("no embedding between these fields")
    key = (src, dst)
    root = _EMBEDDING_ROOTS.get(key)
    if root is None:
        lifted = Poly(dst, [dst.element(c.rep) for c in src.modulus.coeffs])
        roots = poly_roots(lifted)
        if not roots:
            raise FieldMismatch("source modulus has no root in target field")
        root = roots[0]
        _EMBEDDING_ROOTS[key] = root

    def phi(a, _dst=dst, _root=root):
        acc = _dst.zero
        for c in reversed(a.rep):
            acc = acc * _root + c
        return acc

    return phi


def element_sqrt(a):
    """A square root of a in its field, or None if a is not a square.

    Tonelli-Shanks with a deterministic non-residue search; of the two roots
    the canonically smaller one is returned.
    """
    field = a.field
    if a.is_zero():
        return field.zero
    q = field.order
    if a ** ((q - 1) // 2) != field.one:
        return None
    s, e = q - 1, 0
    while s % 2 == 0:
        s //= 2
        e += 1
    # deterministic non-residue
    z = None
    for i in range(1, q):
        cand = field.element_from_index(i)
        if cand ** ((q - 1) // 2) == -field.one:
            z = cand
            break
    c = z ** s
    x = a ** ((s + 1) // 2)
    t = a ** s
    m = e
    one = field.one
    while t != one:
        i = 0
        t2 = t
        while t2 != one:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (m - i - 1))
        x = x * b
        c = b * b
        t = t * c
        m = i
    return min(x, -x, key=lambda r: r.key())


class QuotientRing:
    """F_q[x]/(m) for monic m; a field when m is irreducible.

    Used for residue-field computations at closed places (square tests and
    square roots of fibre values) without constructing a canonical field.
    """

    def __init__(self, field, modulus):
        if not modulus.is_monic or modulus.degree < 1:
            raise ValueError("modulus must be monic of degree >= 1")
        self.field = field
        self.modulus = modulus
        self.order = field.order ** modulus.degree

    def reduce(self, poly):
        return poly % self.modulus

    def mul(self, a, b):
        return a * b % self.modulus

    def pow(self, a, e):
        return a.pow_mod(e, self.modulus)

    def inv(self, a):
        g, s, _ = a.extended_gcd(self.modulus)
        if g.degree != 0:
            raise DivisionByZero("element not invertible in quotient ring")
        return s * g.coeff(0).inverse() % self.modulus

    def element_from_index(self, i):
        return poly_from_index(self.field, i) % self.modulus

    def is_square(self, a):
        a = self.reduce(a)
        if a.is_zero:
            return True
        return self.pow(a, (self.order - 1) // 2) == Poly.one(self.field)

    def sqrt(self, a):
        """A square root of a (assumed square), canonically smaller of the two."""
        a = self.reduce(a)
        if a.is_zero:
            return a
        one = Poly.one(self.field)
        q = self.order
        s, e = q - 1, 0
        while s % 2 == 0:
            s //= 2
            e += 1
        z = None
        for i in range(1, q):
            cand = self.element_from_index(i)
            if cand.is_zero:
                continue
            if self.pow(cand, (q - 1) // 2) != one:
                z = cand
                break
        c = self.pow(z, s)
        x = self.pow(a, (s + 1) // 2)
        t = self.pow(a, s)
        m = e
        while t != one:
            i = 0
            t2 = t
            while t2 != one:
                t2 = self.mul(t2, t2)
                i += 1
            b = self.pow(c, 1 << (m - i - 1))
            x = self.mul(x, b)
            c = self.mul(b, b)
            t = self.mul(t, c)
            m = i
        return min(x, -x % self.modulus, key=lambda r: r.key())


# ---------------------------------------------------------------------------
# exact linear algebra over a field


def rref(matrix, field):
    """Reduced row echelon form; returns (rows, pivot_columns).

    The input is a list of rows of FieldElements and is not modified.
    """
    rows = [list(r) for r in matrix]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if not rows[i][c].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def matrix_rank(matrix, field):
    return len(rref(matrix, field)[0])


def nullspace(matrix, ncols, field):
    """Canonical basis of the right kernel (RREF back-substitution order)."""
    rows, pivots = rref(matrix, field)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [field.zero] * ncols
        vec[fc] = field.one
        for r, pc in enumerate(pivots):
            vec[pc] = -rows[r][fc]
        basis.append(vec)
    return basis


def solve_linear(matrix, rhs, field):
    """One solution of matrix * x = rhs, or None if inconsistent."""
    if not matrix:
        return [] if all(v.is_zero() for v in rhs) else None
    ncols = len(matrix[0])
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = rref(aug, field)
    for row in rows:
        if all(v.is_zero() for v in row[:ncols]) and not row[ncols].is_zero():
            return None
    x = [field.zero] * ncols
    for r, pc in enumerate(pivots):
        if pc == ncols:
            return None
        x[pc] = rows[r][ncols]
    return x
