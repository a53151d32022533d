"""The function field of an elliptic curve.

Every rational function on y^2 = x^3 + a*x + b has a unique canonical form
a(x) + b(x)*y with a, b reduced fractions of polynomials in x; the curve
relation eliminates higher powers of y and division uses the conjugate trick
(multiply by a - b*y and reduce through the norm).

Valuations are computed exactly, without floating anything:

  * at infinity the parts a(x) and b(x)*y have even resp. odd valuation
    (x has a double pole, y a triple one), so no cancellation can occur;
  * at a ramified place (the y = 0 fibre) the same parity argument applies
    with uniformizer y;
  * at an inert place {1, y} is a free basis of the local ring over the
    x-line, so the valuation is the minimum of the coefficient valuations;
  * at a split place the y-coordinate is Hensel-lifted to sufficient
    m-adic precision and the valuation read off the lifted combination,
    with the norm supplying an a-priori cap that guarantees termination.

Local expansions (truncated Laurent series in a fixed uniformizer per place
kind) power the evaluation matrices downstream.  Riemann-Roch spaces are
realized by clearing finite poles into a polynomial part with a bounded pole
at infinity and imposing the remaining vanishing conditions as exact linear
constraints over the base field; no base change is ever needed for this.
"""

from __future__ import annotations

from .errors import (
    BaseChangeRequired,
    DivisionByZero,
    FieldMismatch,
    InternalInconsistency,
    ZeroFunction,
)
from .elliptic import Divisor, Place, places_above
from .galois import Poly, nullspace, poly_factor

_EXACT = 1 << 60  # precision sentinel for exactly-known series


class RatFn:
    """A reduced fraction of polynomials in x with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = Poly.one(num.field)
        if den.is_zero:
            raise DivisionByZero("zero denominator")
        if num.is_zero:
            num, den = Poly.zero(num.field), Poly.one(num.field)
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
            lead = den.leading
            if lead != 1:
                inv = lead.inverse()
                num, den = num * inv, den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *args):
        raise AttributeError("RatFn is immutable")

    @property
    def field(self):
        return self.num.field

    @property
    def is_zero(self):
        return self.num.is_zero

    @classmethod
    def zero(cls, field):
        return cls(Poly.zero(field))

    @classmethod
    def one(cls, field):
        return cls(Poly.one(field))

    @classmethod
    def constant(cls, value):
        return cls(Poly.constant(value))

    @classmethod
    def x(cls, field):
        return cls(Poly.x(field))

    def _coerce(self, other):
        if isinstance(other, RatFn):
            return other
        if isinstance(other, Poly):
            return RatFn(other)
        if isinstance(other, int):
            return RatFn(Poly(self.field, [other]))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFn(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFn(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return RatFn(-self.num, self.den)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise DivisionByZero("division by the zero function")
        return RatFn(self.num * other.den, self.den * other.num)

    def __pow__(self, e):
        if e < 0:
            if self.is_zero:
                raise DivisionByZero("negative power of zero")
            return RatFn(self.den ** (-e), self.num ** (-e))
        return RatFn(self.num ** e, self.den ** e)

    def valuation_at(self, m):
        """m-adic valuation for monic irreducible m; None for the zero function."""
        if self.is_zero:
            return None
        return self.num.multiplicity_of(m) - self.den.multiplicity_of(m)

    def infinity_valuation_x(self):
        """Valuation at x = infinity of P^1, i.e. deg den - deg num."""
        if self.is_zero:
            return None
        return self.den.degree - self.num.degree

    def scale_power(self, m, e):
        """self * m^e."""
        if e >= 0:
            return RatFn(self.num * m ** e, self.den)
        return RatFn(self.num, self.den * m ** (-e))

    def reduce_mod(self, modulus, m):
        """The polynomial self mod `modulus` (= m^c); requires gcd(den, m) = 1."""
        g, s, _ = self.den.extended_gcd(modulus)
        if g.degree != 0:
            raise InternalInconsistency("denominator not invertible at this place")
        den_inv = s * g.coeff(0).inverse() % modulus
        return self.num * den_inv % modulus

    def evaluate(self, x0):
        d = self.den.evaluate(x0)
        if d.is_zero():
            raise DivisionByZero("pole of rational function")
        return self.num.evaluate(x0) / d

    def key(self):
        return (self.num.key(), self.den.key())

    def __eq__(self, other):
        if not isinstance(other, RatFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def to_str(self, var="x"):
        ns = self.num.to_str(var)
        if self.den.degree == 0:
            return ns
        return f"({ns})/({self.den.to_str(var)})"

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"RatFn({self})"


class CurveFunction:
    """An element of the function field, canonical form a(x) + b(x)*y."""

    __slots__ = ("curve", "a", "b")

    def __init__(self, curve, a, b):
        if a.field != curve.field or b.field != curve.field:
            raise FieldMismatch("coefficients over a different field")
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, *args):
        raise AttributeError("CurveFunction is immutable")

    @classmethod
    def zero(cls, curve):
        z = RatFn.zero(curve.field)
        return cls(curve, z, z)

    @classmethod
    def one(cls, curve):
        return cls(curve, RatFn.one(curve.field), RatFn.zero(curve.field))

    @classmethod
    def constant(cls, curve, value):
        return cls(
            curve,
            RatFn.constant(curve.field.element(value)),
            RatFn.zero(curve.field),
        )

    @classmethod
    def x(cls, curve):
        return cls(curve, RatFn.x(curve.field), RatFn.zero(curve.field))

    @classmethod
    def y(cls, curve):
        return cls(curve, RatFn.zero(curve.field), RatFn.one(curve.field))

    @property
    def is_zero(self):
        return self.a.is_zero and self.b.is_zero

    def _coerce(self, other):
        if isinstance(other, CurveFunction):
            if other.curve != self.curve:
                raise FieldMismatch("functions on different curves")
            return other
        if isinstance(other, int):
            return CurveFunction.constant(self.curve, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CurveFunction(self.curve, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CurveFunction(self.curve, self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return CurveFunction(self.curve, -self.a, -self.b)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        h = RatFn(self.curve.rhs_poly())
        return CurveFunction(
            self.curve,
            self.a * other.a + self.b * other.b * h,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return CurveFunction(self.curve, self.a, -self.b)

    def norm(self):
        """a^2 - b^2 * (x^3 + ax + b), the norm down to the x-line."""
        h = RatFn(self.curve.rhs_poly())
        return self.a * self.a - self.b * self.b * h

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise DivisionByZero("division by the zero function")
        n = other.norm()
        conj = other.conjugate()
        scaled = CurveFunction(self.curve, conj.a / n, conj.b / n)
        return self * scaled

    def __pow__(self, e):
        if e < 0:
            return CurveFunction.one(self.curve) / self ** (-e)
        result = CurveFunction.one(self.curve)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def map_field(self, new_curve, phi):
        def map_rat(r):
            num = Poly(new_curve.field, [phi(c) for c in r.num.coeffs])
            den = Poly(new_curve.field, [phi(c) for c in r.den.coeffs])
            return RatFn(num, den)

        return CurveFunction(new_curve, map_rat(self.a), map_rat(self.b))

    def key(self):
        return (self.a.key(), self.b.key())

    def __eq__(self, other):
        if not isinstance(other, CurveFunction):
            return NotImplemented
        return self.curve == other.curve and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.curve, self.a, self.b))

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        if not self.a.is_zero:
            parts.append(str(self.a))
        if not self.b.is_zero:
            parts.append(f"({self.b})*y")
        return " + ".join(parts)

    def __repr__(self):
        return f"CurveFunction({self})"


def fn_arith(f, g, op):
    """Dispatch {add, sub, mul, div} in the function field."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# valuations


def _y_lift(curve, m, seed, c):
    """Hensel lift of the y-coordinate: Y with Y^2 = x^3+ax+b mod m^c, Y = seed mod m."""
    h = curve.rhs_poly()
    inv2 = curve.field.element(2).inverse()
    prec = 1
    modulus = m
    y = seed % m
    while prec < c:
        prec = min(2 * prec, c)
        modulus = m ** prec
        g, s, _ = y.extended_gcd(modulus)
        if g.degree != 0:
            raise InternalInconsistency("y-lift lost invertibility")
        y_inv = s * g.coeff(0).inverse() % modulus
        y = (y + h % modulus * y_inv) * inv2 % modulus
    return y


def _split_valuation(f, m, seed):
    """Valuation at a split place over m with chosen y-branch `seed`."""
    a, b = f.a, f.b
    vals = [v for v in (a.valuation_at(m), b.valuation_at(m)) if v is not None]
    w = min(vals)
    A = a.scale_power(m, -w)
    B = b.scale_power(m, -w)
    h = RatFn(f.curve.rhs_poly())
    norm = A * A - B * B * h
    cap = norm.valuation_at(m)
    c = cap + 1
    modulus = m ** c
    y_c = _y_lift(f.curve, m, seed, c)
    r = (A.reduce_mod(modulus, m) + B.reduce_mod(modulus, m) * y_c) % modulus
    if r.is_zero:
        raise InternalInconsistency("split-place valuation exceeded its norm cap")
    return w + r.multiplicity_of(m)


def valuation(f, t):
    """Exact order of vanishing of f at the place t (negative for poles)."""
    if f.is_zero:
        raise ZeroFunction("valuation of the zero function")
    if f.curve != t.curve:
        raise FieldMismatch("function and place on different curves")
    a, b = f.a, f.b
    if t.is_infinity:
        candidates = []
        if not a.is_zero:
            candidates.append(2 * a.infinity_valuation_x())
        if not b.is_zero:
            candidates.append(2 * b.infinity_valuation_x() - 3)
        return min(candidates)
    m = t.x_min_poly()
    if t.is_ramified:
        candidates = []
        va = a.valuation_at(m)
        vb = b.valuation_at(m)
        if va is not None:
            candidates.append(2 * va)
        if vb is not None:
            candidates.append(2 * vb + 1)
        return min(candidates)
    if t.kind == "inert":
        vals = [v for v in (a.valuation_at(m), b.valuation_at(m)) if v is not None]
        return min(vals)
    if t.kind == "rational":
        seed = Poly.constant(t.point.y)
    else:
        seed = t.y_rep
    return _split_valuation(f, m, seed)


def principal_divisor(f):
    """The divisor of zeros and poles of a nonzero function; degree 0."""
    if f.is_zero:
        raise ZeroFunction("divisor of the zero function")
    curve = f.curve
    norm = f.norm()
    loci = set()
    for poly in (norm.num, norm.den, f.a.den, f.b.den):
        if poly.degree > 0:
            for g, _ in poly_factor(poly):
                loci.add(g)
    coeffs = {}
    for m in loci:
        for place in places_above(curve, m):
            v = valuation(f, place)
            if v:
                coeffs[place] = v
    v_inf = valuation(f, Place.infinity(curve))
    if v_inf:
        coeffs[Place.infinity(curve)] = v_inf
    div = Divisor(curve, coeffs)
    if div.degree() != 0:
        raise InternalInconsistency(
            f"principal divisor has degree {div.degree()}"
        )
    return div


# ---------------------------------------------------------------------------
# truncated Laurent series


class Series:
    """Laurent series truncated at an absolute precision.

    Coefficients are stored for exponents [shift, shift + len(coeffs));
    exponents below `shift` are exactly zero.  For a finite `prec` the stored
    window ends exactly at `prec` and higher exponents are unknown; series
    with `prec == _EXACT` are exactly zero beyond their window (polynomial
    data such as uniformizers and constants).
    """

    __slots__ = ("field", "shift", "coeffs", "prec")

    def __init__(self, field, shift, coeffs, prec=None):
        coeffs = list(coeffs)
        if prec is None:
            prec = shift + len(coeffs)
        if prec != _EXACT and prec - shift != len(coeffs):
            raise ValueError("inconsistent precision window")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, *args):
        raise AttributeError("Series is immutable")

    @classmethod
    def zero(cls, field, prec=_EXACT):
        if prec == _EXACT:
            return cls(field, 0, [], _EXACT)
        return cls(field, prec, [], prec)

    @classmethod
    def exact(cls, field, shift, coeffs):
        """A series whose coefficients beyond the window are exactly zero."""
        return cls(field, shift, coeffs, _EXACT)

    @classmethod
    def constant(cls, value):
        return cls.exact(value.field, 0, [value])

    @classmethod
    def uniformizer(cls, field):
        return cls.exact(field, 1, [field.one])

    def _end(self):
        return self.shift + len(self.coeffs)

    def valuation_lower(self):
        """Index of the first nonzero known coefficient; `prec` if none
        (so an exactly-zero series reports _EXACT)."""
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return self.shift + i
        return self.prec

    def valuation(self):
        """Exact valuation, or None if zero to the stored precision."""
        v = self.valuation_lower()
        return v if v < self.prec else None

    def coeff(self, e):
        if e < self.shift:
            return self.field.zero
        i = e - self.shift
        if i < len(self.coeffs):
            return self.coeffs[i]
        if self.prec == _EXACT:
            return self.field.zero
        raise ValueError(f"coefficient {e} beyond precision {self.prec}")

    def truncate(self, prec):
        if self.prec != _EXACT and prec >= self.prec:
            return self
        shift = min(self.shift, prec)
        return Series(
            self.field, shift, [self.coeff(e) for e in range(shift, prec)], prec
        )

    def __add__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        prec = min(self.prec, other.prec)
        end = max(self._end(), other._end()) if prec == _EXACT else prec
        shift = min(self.shift, other.shift, end)
        out = [self.coeff(e) + other.coeff(e) for e in range(shift, end)]
        return Series(self.field, shift, out, prec)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Series(self.field, self.shift, [-c for c in self.coeffs], self.prec)

    def scale(self, value):
        return Series(
            self.field, self.shift, [c * value for c in self.coeffs], self.prec
        )

    def shift_by(self, n):
        prec = self.prec if self.prec == _EXACT else self.prec + n
        return Series(self.field, self.shift + n, self.coeffs, prec)

    def __mul__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        if not self.coeffs and self.prec == _EXACT:
            return Series.zero(self.field)
        if not other.coeffs and other.prec == _EXACT:
            return Series.zero(self.field)
        v1, v2 = self.valuation_lower(), other.valuation_lower()

        def cap(p, v):
            return _EXACT if p == _EXACT else p + v

        prec = min(cap(self.prec, v2), cap(other.prec, v1), _EXACT)
        shift = self.shift + other.shift
        end = self._end() + other._end() - 1 if prec == _EXACT else prec
        if end < shift:
            return Series(self.field, end, [], end if prec != _EXACT else _EXACT)
        out = [self.field.zero] * (end - shift)
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            e1 = self.shift + i
            for j, d in enumerate(other.coeffs):
                if d.is_zero():
                    continue
                e = e1 + other.shift + j
                if shift <= e < end:
                    out[e - shift] = out[e - shift] + c * d
        return Series(self.field, shift, out, prec)

    def inverse(self):
        if self.prec == _EXACT:
            raise ValueError("truncate an exact series before inverting it")
        v = self.valuation()
        if v is None:
            raise DivisionByZero("inverse of a series that is zero to precision")
        rel = self.prec - v
        unit = [self.coeff(v + i) for i in range(rel)]
        inv0 = unit[0].inverse()
        out = [inv0]
        for k in range(1, rel):
            acc = self.field.zero
            for j in range(k):
                acc = acc + unit[k - j] * out[j]
            out.append(-inv0 * acc)
        return Series(self.field, -v, out, -v + rel)

    def __repr__(self):
        terms = [
            f"{c}*t^{self.shift + i}"
            for i, c in enumerate(self.coeffs)
            if not c.is_zero()
        ]
        body = " + ".join(terms) if terms else "0"
        tail = "" if self.prec == _EXACT else f" + O(t^{self.prec})"
        return f"Series({body}{tail})"


def poly_on_series(poly, s):
    """Evaluate a polynomial on a series (Horner)."""
    field = s.field
    acc = Series.zero(field)
    for c in reversed(poly.coeffs):
        acc = acc * s + Series.constant(c)
    return acc


def ratfn_on_series(r, s, prec):
    num = poly_on_series(r.num, s)
    den = poly_on_series(r.den, s)
    if den.prec == _EXACT:
        nonzero = [i for i, c in enumerate(den.coeffs) if not c.is_zero()]
        if len(nonzero) == 1:
            # monomial denominators invert exactly
            e = den.shift + nonzero[0]
            c = den.coeffs[nonzero[0]]
            return num * Series.exact(s.field, -e, [c.inverse()])
        den = den.truncate(prec + 2 * abs(den.valuation_lower()) + 2)
    return num * den.inverse()


_XY_CACHE = {}


def xy_series(curve, place, prec):
    """Expansions of the coordinate functions x, y at a rational place.

    Uniformizers: x - x0 at an affine place with y0 != 0; y at a ramified
    affine place (y0 = 0); x/y at infinity.
    """
    key = (curve, place.key(), prec)
    cached = _XY_CACHE.get(key)
    if cached is not None:
        return cached
    field = curve.field
    if place.is_infinity:
        t = Series.uniformizer(field)
        t3 = t * t * t
        a_c, b_c = Series.constant(curve.a), Series.constant(curve.b)
        w = t3.truncate(prec + 7)
        for _ in range(prec + 8):
            new = (t3 + a_c * t * w * w + b_c * w * w * w).truncate(prec + 7)
            if new.coeffs == w.coeffs and new.shift == w.shift:
                break
            w = new
        y = w.inverse()
        x = t * y
    else:
        x0, y0 = place.point.x, place.point.y
        if y0.is_zero():
            # uniformizer y; solve h(X) = t^2 by Newton from X = x0
            t2 = Series.exact(field, 2, [field.one])
            h = curve.rhs_poly()
            hp = h.derivative()
            x = Series.constant(x0).truncate(prec + 4)
            while True:
                fx = (poly_on_series(h, x) - t2).truncate(prec + 4)
                if fx.valuation_lower() >= prec + 2:
                    break
                corr = fx * poly_on_series(hp, x).truncate(prec + 4).inverse()
                x = (x - corr).truncate(prec + 4)
            y = Series.exact(field, 1, [field.one])
        else:
            x = Series.exact(field, 0, [x0, field.one])  # x0 + t, exact
            h = curve.rhs_poly()
            hx = poly_on_series(h, x).truncate(prec + 4)
            inv2 = field.element(2).inverse()
            y = Series.constant(y0).truncate(prec + 4)
            while True:
                err = (y * y - hx).truncate(prec + 4)
                if err.valuation_lower() >= prec + 2:
                    break
                y = ((y + hx * y.inverse()).scale(inv2)).truncate(prec + 4)
    result = (x.truncate(prec), y.truncate(prec))
    if len(_XY_CACHE) > 256:
        _XY_CACHE.clear()
    _XY_CACHE[key] = result
    return result


def uniformizer_tag(place):
    if place.is_infinity:
        return "x_over_y_at_infinity"
    if place.is_ramified:
        return "y_at_ramified"
    return "x_minus_x0"


class LocalExpansion:
    """Truncated expansion of a function in the local uniformizer."""

    __slots__ = ("place", "uniformizer_tag", "leading_valuation", "coefficients", "precision")

    def __init__(self, place, tag, leading_valuation, coefficients, precision):
        object.__setattr__(self, "place", place)
        object.__setattr__(self, "uniformizer_tag", tag)
        object.__setattr__(self, "leading_valuation", leading_valuation)
        object.__setattr__(self, "coefficients", tuple(coefficients))
        object.__setattr__(self, "precision", precision)

    def __setattr__(self, *args):
        raise AttributeError("LocalExpansion is immutable")

    def coefficient(self, e):
        """Coefficient at exponent e, for e in [leading_valuation, leading+precision]."""
        i = e - self.leading_valuation
        if i < 0:
            return self.coefficients[0].field.zero
        return self.coefficients[i]

    def __repr__(self):
        return (
            f"LocalExpansion(v={self.leading_valuation}, "
            f"coeffs={[str(c) for c in self.coefficients]}, tag={self.uniformizer_tag})"
        )


def function_series(f, place, abs_prec):
    """Expansion of f at a rational place to absolute precision abs_prec."""
    if not place.is_rational:
        raise BaseChangeRequired(place.splitting_degree())
    degsum = sum(
        p.degree for p in (f.a.num, f.a.den, f.b.num, f.b.den) if not p.is_zero
    )
    pad = 6
    while True:
        work = max(abs_prec, 1) + pad
        xs, ys = xy_series(f.curve, place, work)
        total = Series.zero(f.curve.field)
        if not f.a.is_zero:
            total = total + ratfn_on_series(f.a, xs, work)
        if not f.b.is_zero:
            total = total + ratfn_on_series(f.b, xs, work) * ys
        if total.prec >= abs_prec:
            return total.truncate(abs_prec)
        if pad > 128 + 4 * abs(abs_prec) + 8 * degsum:
            raise InternalInconsistency("series precision failed to converge")
        pad *= 2


def expand_local(f, t, precision):
    """Expansion of f at t: coefficients from the leading valuation v up to
    v + precision inclusive."""
    if f.is_zero:
        raise ZeroFunction("expansion of the zero function")
    if not t.is_rational:
        raise BaseChangeRequired(t.splitting_degree())
    v = valuation(f, t)
    series = function_series(f, t, v + precision + 1)
    if series.valuation() != v:
        raise InternalInconsistency("series valuation disagrees with exact valuation")
    coeffs = [series.coeff(e) for e in range(v, v + precision + 1)]
    return LocalExpansion(t, uniformizer_tag(t), v, coeffs, precision)


def laurent_coefficient(f, t, e):
    """The coefficient of the uniformizer power e in f's expansion at t."""
    if f.is_zero:
        return t.curve.field.zero
    v = valuation(f, t)
    if v > e:
        return t.curve.field.zero
    return expand_local(f, t, e - v).coefficient(e)


# ---------------------------------------------------------------------------
# Riemann-Roch spaces


class RRBasis:
    """A basis of L(D) = {f : (f) + D >= 0}, in a deterministic order."""

    __slots__ = ("divisor", "basis")

    def __init__(self, divisor, basis):
        object.__setattr__(self, "divisor", divisor)
        object.__setattr__(self, "basis", tuple(basis))

    def __setattr__(self, *args):
        raise AttributeError("RRBasis is immutable")

    @property
    def dimension(self):
        return len(self.basis)

    def verify(self):
        """Check membership of every basis element (test hook)."""
        for f in self.basis:
            D = principal_divisor(f) + self.divisor
            if not (D.is_zero or D.is_effective()):
                raise InternalInconsistency(f"basis element {f} violates (f) + D >= 0")
        return True


def _monomial_list(M):
    """Monomials x^i, x^i*y with pole order at infinity <= M, by pole order."""
    out = []
    for po in range(M + 1):
        if po % 2 == 0:
            out.append((po // 2, False))
        elif po >= 3:
            out.append(((po - 3) // 2, True))
    return out


def rr_basis(D):
    """Compute a basis of the Riemann-Roch space L(D).

    Strategy: clear the finite positive part with a polynomial g(x), so that
    candidates live in L(M * infinity) with M = 2 deg g + n_inf; that space is
    spanned by monomials x^i and x^i y.  The remaining conditions
    v_P(h) >= v_P(g) - n_P at finite places are linear over the base field:
    divisibility for ramified/inert places (parity, resp. freeness of {1, y})
    and congruence against the Hensel-lifted y for split places.
    """
    curve = D.curve
    field = curve.field
    inf_place = Place.infinity(curve)
    n_inf = D.coefficient(inf_place)

    finite_ms = {}
    for pl, n in D.items():
        if pl.is_infinity:
            continue
        finite_ms[pl.x_min_poly()] = None
    ms = sorted(finite_ms, key=lambda m: m.key())

    g_exp = {}
    for m in ms:
        best = 0
        for pl in places_above(curve, m):
            n = D.coefficient(pl)
            e = 2 if pl.is_ramified else 1
            need = -(-n // e)  # ceil
            best = max(best, need)
        if best > 0:
            g_exp[m] = best

    deg_g = sum(c * m.degree for m, c in g_exp.items())
    M = 2 * deg_g + n_inf
    if M < 0:
        result = RRBasis(D, [])
        _check_rr_dimension(D, result)
        return result

    monomials = _monomial_list(M)
    ncols = len(monomials)
    g_poly = Poly.one(field)
    for m, c in g_exp.items():
        g_poly = g_poly * m ** c

    rows = []
    for m in ms:
        c_g = g_exp.get(m, 0)
        for pl in places_above(curve, m):
            e = 2 if pl.is_ramified else 1
            c_req = e * c_g - D.coefficient(pl)
            if c_req <= 0:
                continue
            rows.extend(_place_condition_rows(curve, pl, m, c_req, monomials))
    vectors = nullspace(rows, ncols, field) if rows else [
        [field.one if i == j else field.zero for i in range(ncols)]
        for j in range(ncols)
    ]

    g_rat = RatFn(g_poly)
    basis = []
    for vec in vectors:
        a_poly = Poly.zero(field)
        b_poly = Poly.zero(field)
        for coeff, (i, withy) in zip(vec, monomials):
            if coeff.is_zero():
                continue
            mono = Poly.monomial(field, i, coeff)
            if withy:
                b_poly = b_poly + mono
            else:
                a_poly = a_poly + mono
        basis.append(
            CurveFunction(curve, RatFn(a_poly) / g_rat, RatFn(b_poly) / g_rat)
        )
    result = RRBasis(D, basis)
    _check_rr_dimension(D, result)
    return result


def _place_condition_rows(curve, pl, m, c_req, monomials):
    """Linear conditions v_P(A + B y) >= c_req on the monomial coefficients."""
    field = curve.field

    def divisibility_rows(power, use_y):
        # m^power | (A or B part)
        if power <= 0:
            return []
        modulus = m ** power
        nconds = modulus.degree
        reduced = []
        for (i, withy) in monomials:
            if withy != use_y:
                reduced.append(None)
            else:
                reduced.append(Poly.monomial(field, i) % modulus)
        rows = []
        for pos in range(nconds):
            row = []
            for red in reduced:
                row.append(field.zero if red is None else red.coeff(pos))
            rows.append(row)
        return rows

    if pl.is_ramified:
        ca = -(-c_req // 2)
        cb = -(-(c_req - 1) // 2)
        return divisibility_rows(ca, False) + divisibility_rows(cb, True)
    if pl.kind == "inert":
        return divisibility_rows(c_req, False) + divisibility_rows(c_req, True)
    # split place: congruence A + B*Y == 0 mod m^c_req
    seed = Poly.constant(pl.point.y) if pl.kind == "rational" else pl.y_rep
    y_c = _y_lift(curve, m, seed, c_req)
    modulus = m ** c_req
    nconds = modulus.degree
    reduced = []
    for (i, withy) in monomials:
        mono = Poly.monomial(field, i)
        if withy:
            reduced.append(mono * y_c % modulus)
        else:
            reduced.append(mono % modulus)
    rows = []
    for pos in range(nconds):
        rows.append([red.coeff(pos) for red in reduced])
    return rows


def _check_rr_dimension(D, result):
    deg = D.degree()
    dim = result.dimension
    if deg >= 1 and dim != deg:
        raise InternalInconsistency(
            f"L(D) has dimension {dim}, Riemann-Roch demands {deg}"
        )
    if deg == 0 and dim not in (0, 1):
        raise InternalInconsistency(f"L(D) of degree 0 has dimension {dim}")
    if deg < 0 and dim != 0:
        raise InternalInconsistency("L(D) nonzero for negative degree")
