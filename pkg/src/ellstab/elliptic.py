"""Elliptic curves over finite fields: points, places, divisors, and the
marked-point group law.

A curve is given in short Weierstrass form y^2 = x^3 + a*x + b (valid since
the characteristic exceeds 3).  Chord-tangent addition with identity at the
point at infinity realizes divisor-class reduction; the group (E, +) with an
arbitrary marked zero p is obtained by translation.

Closed points (places) carry the residue-field degree so that divisors can be
written over the base field; base change splits them into rational points of
an extension.  Canonical ordering: infinity first, then by (degree, minimal
polynomial of the x-coordinate, y-component).
"""

from __future__ import annotations

from .errors import (
    BaseChangeRequired,
    FieldMismatch,
    NonZeroDegree,
    PointOffCurve,
)
from .galois import (
    ExtensionField,
    Poly,
    QuotientRing,
    canonical_field,
    element_sqrt,
    embedding,
    poly_factor,
)


class Curve:
    """y^2 = x^3 + a*x + b over a finite field of characteristic > 3."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field, a, b):
        a = field.element(a)
        b = field.element(b)
        disc = 4 * a * a * a + 27 * b * b
        if disc.is_zero():
            raise ValueError("singular curve: 4a^3 + 27b^2 = 0")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, *args):
        raise AttributeError("Curve is immutable")

    def rhs_poly(self):
        """x^3 + a*x + b as a polynomial."""
        return Poly(self.field, [self.b, self.a, self.field.zero, self.field.one])

    def rhs_at(self, x):
        return (x * x + self.a) * x + self.b

    def contains(self, x, y):
        return y * y == self.rhs_at(x)

    def infinity(self):
        return Point(self, None, None)

    def point(self, x, y):
        return Point(self, self.field.element(x), self.field.element(y))

    def points(self):
        """All rational points by naive enumeration (small fields only)."""
        pts = [self.infinity()]
        for x in self.field.elements():
            rhs = self.rhs_at(x)
            root = element_sqrt(rhs)
            if root is None:
                continue
            if root.is_zero():
                pts.append(Point(self, x, root))
            else:
                pts.append(Point(self, x, root))
                pts.append(Point(self, x, -root))
        return pts

    def map_field(self, new_field, phi):
        return Curve(new_field, phi(self.a), phi(self.b))

    def __eq__(self, other):
        if not isinstance(other, Curve):
            return NotImplemented
        return self.field == other.field and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.field, self.a, self.b))

    def __repr__(self):
        return f"Curve(y^2 = x^3 + {self.a}*x + {self.b} over {self.field!r})"


class Point:
    """A rational point of the curve, or the point at infinity (x = y = None)."""

    __slots__ = ("curve", "x", "y")

    def __init__(self, curve, x, y):
        if (x is None) != (y is None):
            raise ValueError("both coordinates or neither")
        if x is not None and not curve.contains(x, y):
            raise PointOffCurve(f"({x}, {y}) is not on {curve!r}")
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, *args):
        raise AttributeError("Point is immutable")

    @property
    def is_infinity(self):
        return self.x is None

    def map_field(self, new_curve, phi):
        if self.is_infinity:
            return new_curve.infinity()
        return Point(new_curve, phi(self.x), phi(self.y))

    def key(self):
        if self.is_infinity:
            return (0,)
        return (1, self.x.key(), self.y.key())

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return (
            self.curve == other.curve and self.x == other.x and self.y == other.y
        )

    def __hash__(self):
        return hash((self.curve, self.x, self.y))

    def __str__(self):
        if self.is_infinity:
            return "inf"
        xs, ys = str(self.x), str(self.y)
        return f"({xs},{ys})"

    def __repr__(self):
        return f"Point({self})"


def _require_same_curve(q1, q2):
    if q1.curve != q2.curve:
        raise FieldMismatch("points on different curves")


def chord_tangent_add(q1, q2):
    """Weierstrass addition with identity at infinity."""
    _require_same_curve(q1, q2)
    if q1.is_infinity:
        return q2
    if q2.is_infinity:
        return q1
    curve = q1.curve
    if q1.x == q2.x:
        if q1.y == -q2.y:
            return curve.infinity()
        # doubling; y != 0 here since y = -y would have matched above
        lam = (3 * q1.x * q1.x + curve.a) / (2 * q1.y)
    else:
        lam = (q2.y - q1.y) / (q2.x - q1.x)
    x3 = lam * lam - q1.x - q2.x
    y3 = lam * (q1.x - x3) - q1.y
    return Point(curve, x3, y3)


def chord_tangent_neg(q):
    if q.is_infinity:
        return q
    return Point(q.curve, q.x, -q.y)


def chord_tangent_mul(n, q):
    if n < 0:
        return chord_tangent_mul(-n, chord_tangent_neg(q))
    acc = q.curve.infinity()
    add = q
    while n:
        if n & 1:
            acc = chord_tangent_add(acc, add)
        add = chord_tangent_add(add, add)
        n >>= 1
    return acc


class MarkedCurve:
    """A curve with a marked point p, the zero of the translated group law."""

    __slots__ = ("curve", "p")

    def __init__(self, curve, p):
        if p.curve != curve:
            raise FieldMismatch("marked point on a different curve")
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "p", p)

    def __setattr__(self, *args):
        raise AttributeError("MarkedCurve is immutable")

    def map_field(self, new_curve, phi):
        return MarkedCurve(new_curve, self.p.map_field(new_curve, phi))

    def __eq__(self, other):
        if not isinstance(other, MarkedCurve):
            return NotImplemented
        return self.curve == other.curve and self.p == other.p

    def __hash__(self):
        return hash((self.curve, self.p))

    def __repr__(self):
        return f"MarkedCurve({self.curve!r}, p={self.p})"


def marked_sum(mc, q1, q2):
    """The unique q with (q1) + (q2) ~ (q) + (p)."""
    _require_same_curve(q1, q2)
    return chord_tangent_add(
        chord_tangent_add(q1, q2), chord_tangent_neg(mc.p)
    )


def marked_neg(mc, q):
    """The inverse of q in (E, p): the point q' with (q) + (q') ~ 2(p)."""
    return chord_tangent_add(
        chord_tangent_add(mc.p, mc.p), chord_tangent_neg(q)
    )


def marked_mul(mc, n, q):
    """n-fold sum of q in the marked group."""
    shifted = chord_tangent_add(q, chord_tangent_neg(mc.p))
    return chord_tangent_add(chord_tangent_mul(n, shifted), mc.p)


def is_r_torsion(mc, q, r):
    """True iff r*q = 0 in (E, p), i.e. r(q) ~ r(p)."""
    if r < 1:
        raise ValueError("torsion order must be >= 1")
    shifted = chord_tangent_add(q, chord_tangent_neg(mc.p))
    return chord_tangent_mul(r, shifted).is_infinity


class Place:
    """A closed point of the curve over the current base field.

    kind is one of:
      'infinity'  the point at infinity (degree 1)
      'rational'  an affine rational point (degree 1)
      'closed'    x-coordinate with minimal polynomial m (deg >= 2),
                  y given by a polynomial of degree < deg m;
                  covers the split and ramified (y = 0) fibres
      'inert'     x-minimal polynomial m, with y generating a quadratic
                  extension of F_q[x]/(m); degree 2*deg(m)
    """

    __slots__ = ("curve", "kind", "point", "min_poly", "y_rep", "degree")

    def __init__(self, curve, kind, point=None, min_poly=None, y_rep=None):
        if kind == "closed" and min_poly.degree == 1:
            # canonicalize to a rational point
            x0 = -min_poly.coeff(0)
            y0 = y_rep.evaluate(x0) if not y_rep.is_zero else curve.field.zero
            kind, point, min_poly, y_rep = "rational", Point(curve, x0, y0), None, None
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "min_poly", min_poly)
        object.__setattr__(self, "y_rep", y_rep)
        if kind in ("infinity", "rational"):
            degree = 1
        elif kind == "closed":
            degree = min_poly.degree
        elif kind == "inert":
            degree = 2 * min_poly.degree
        else:
            raise ValueError(f"unknown place kind {kind!r}")
        object.__setattr__(self, "degree", degree)

    def __setattr__(self, *args):
        raise AttributeError("Place is immutable")

    @classmethod
    def infinity(cls, curve):
        return cls(curve, "infinity", point=curve.infinity())

    @classmethod
    def from_point(cls, pt):
        if pt.is_infinity:
            return cls.infinity(pt.curve)
        return cls(pt.curve, "rational", point=pt)

    @property
    def is_infinity(self):
        return self.kind == "infinity"

    @property
    def is_rational(self):
        return self.kind in ("infinity", "rational")

    @property
    def is_ramified(self):
        """Ramified over the x-line: the y = 0 fibre."""
        if self.kind == "rational":
            return self.point.y.is_zero()
        if self.kind == "closed":
            return self.y_rep.is_zero
        return False

    def x_min_poly(self):
        if self.kind == "rational":
            return Poly(self.curve.field, [-self.point.x, self.curve.field.one])
        return self.min_poly

    def splitting_degree(self):
        """Minimal extension degree of the base making this place rational."""
        if self.is_rational:
            return 1
        return self.degree

    def key(self):
        if self.is_infinity:
            return (0, 1, (), ())
        m = self.x_min_poly()
        mkey = tuple(c.key() for c in reversed(m.coeffs))
        if self.kind == "rational":
            ykey = (self.point.y.key(),)
        elif self.kind == "closed":
            ykey = tuple(c.key() for c in reversed(self.y_rep.coeffs))
        else:
            ykey = ((-1,),)
        return (1, self.degree, mkey, ykey)

    def map_field(self, new_curve, phi):
        """Images of this place over an extension; a list since places split."""
        if self.is_infinity:
            return [Place.infinity(new_curve)]
        if self.kind == "rational":
            return [Place.from_point(self.point.map_field(new_curve, phi))]
        new_field = new_curve.field
        m2 = Poly(new_field, [phi(c) for c in self.min_poly.coeffs])
        out = []
        if self.kind == "closed":
            y2 = Poly(new_field, [phi(c) for c in self.y_rep.coeffs])
            for g, _ in poly_factor(m2):
                out.append(
                    Place(new_curve, "closed", min_poly=g, y_rep=y2 % g)
                )
        else:  # inert: both y-choices above every factor belong to this place
            for g, _ in poly_factor(m2):
                out.extend(places_above(new_curve, g))
        return sorted(out, key=lambda pl: pl.key())

    def __eq__(self, other):
        if not isinstance(other, Place):
            return NotImplemented
        return self.curve == other.curve and self.key() == other.key()

    def __hash__(self):
        return hash((self.curve, self.key()))

    def __str__(self):
        if self.is_infinity:
            return "inf"
        if self.kind == "rational":
            return str(self.point)
        m = self.min_poly.to_str("x")
        if self.kind == "closed":
            return f"place[{m}; y={self.y_rep.to_str('x')}]"
        return f"place2[{m}]"

    def __repr__(self):
        return f"Place({self})"


def places_above(curve, m):
    """The places of the curve over the closed point m(x) of the x-line.

    m must be monic irreducible.  The fibre type is decided by the value of
    x^3 + ax + b in the residue field F_q[x]/(m): zero gives one ramified
    place, a nonzero square gives two places, a non-square one inert place.
    """
    field = curve.field
    h = curve.rhs_poly()
    hbar = h % m
    if hbar.is_zero:
        zero_y = Poly.zero(field)
        return [Place(curve, "closed", min_poly=m, y_rep=zero_y)]
    ring = QuotientRing(field, m)
    if ring.is_square(hbar):
        y = ring.sqrt(hbar)
        pair = [
            Place(curve, "closed", min_poly=m, y_rep=y),
            Place(curve, "closed", min_poly=m, y_rep=(-y) % m),
        ]
        return sorted(pair, key=lambda pl: pl.key())
    return [Place(curve, "inert", min_poly=m)]


class Divisor:
    """A finite formal integer combination of places of one curve."""

    __slots__ = ("curve", "_coeffs")

    def __init__(self, curve, coeffs=None):
        clean = {}
        for place, n in (coeffs or {}).items():
            if place.curve != curve:
                raise FieldMismatch("place on a different curve")
            if n:
                clean[place] = n
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "_coeffs", clean)

    def __setattr__(self, *args):
        raise AttributeError("Divisor is immutable")

    @classmethod
    def zero(cls, curve):
        return cls(curve, {})

    @classmethod
    def of_point(cls, pt, n=1):
        return cls(pt.curve, {Place.from_point(pt): n})

    @classmethod
    def of_place(cls, place, n=1):
        return cls(place.curve, {place: n})

    def coefficient(self, place):
        return self._coeffs.get(place, 0)

    def support(self):
        return sorted(self._coeffs, key=lambda pl: pl.key())

    def items(self):
        return [(pl, self._coeffs[pl]) for pl in self.support()]

    def degree(self):
        return sum(n * pl.degree for pl, n in self._coeffs.items())

    @property
    def is_zero(self):
        return not self._coeffs

    def is_effective(self):
        return all(n > 0 for n in self._coeffs.values())

    def __add__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        if other.curve != self.curve:
            raise FieldMismatch("divisors on different curves")
        out = dict(self._coeffs)
        for pl, n in other._coeffs.items():
            out[pl] = out.get(pl, 0) + n
        return Divisor(self.curve, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Divisor(self.curve, {pl: -n for pl, n in self._coeffs.items()})

    def __mul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return Divisor(self.curve, {pl: n * m for pl, m in self._coeffs.items()})

    __rmul__ = __mul__

    def __ge__(self, other):
        return (self - other).is_effective() or self == other

    def splitting_degree(self):
        out = 1
        for pl in self._coeffs:
            d = pl.splitting_degree()
            out = out * d // _gcd(out, d)
        return out

    def map_field(self, new_curve, phi):
        out = {}
        for pl, n in self._coeffs.items():
            for newpl in pl.map_field(new_curve, phi):
                out[newpl] = out.get(newpl, 0) + n
        return Divisor(new_curve, out)

    def __eq__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        return self.curve == other.curve and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(
            (self.curve, tuple((pl.key(), n) for pl, n in self.items()))
        )

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for pl, n in self.items():
            term = f"{abs(n)}*{pl}"
            if not parts:
                parts.append(term if n > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if n > 0 else f"- {term}")
        return " ".join(parts)

    def __repr__(self):
        return f"Divisor({self})"


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def divisor_class_point(mc, D):
    """The unique point q with D ~ (q) - (p), for a degree-zero divisor D."""
    if D.degree() != 0:
        raise NonZeroDegree(f"divisor has degree {D.degree()}")
    acc = mc.curve.infinity()
    for pl, n in D.items():
        if not pl.is_rational:
            raise BaseChangeRequired(D.splitting_degree())
        acc = chord_tangent_add(acc, chord_tangent_mul(n, pl.point))
    return chord_tangent_add(acc, mc.p)


def linearly_equivalent(D1, D2):
    """True iff D1 ~ D2 (same degree and principal difference)."""
    if D1.curve != D2.curve:
        raise FieldMismatch("divisors on different curves")
    if D1.degree() != D2.degree():
        return False
    diff = D1 - D2
    acc = D1.curve.infinity()
    for pl, n in diff.items():
        if not pl.is_rational:
            raise BaseChangeRequired(diff.splitting_degree())
        acc = chord_tangent_add(acc, chord_tangent_mul(n, pl.point))
    return acc.is_infinity


def field_tower_degree(field):
    return field.degree if isinstance(field, ExtensionField) else 1


def extension_data(field, k):
    """The canonical extension of `field` of relative degree k, with embedding."""
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    p = field.characteristic
    total = field_tower_degree(field) * k
    target = canonical_field(p, total)
    if target == field:
        return field, (lambda a: a)
    return target, embedding(field, target)


def base_change(obj, k):
    """Re-embed an object over the degree-k extension of its current field.

    Works for Curve, Point, Place, MarkedCurve, Divisor, and any object with
    a `map_field(new_curve, phi)` method and a `curve` attribute.  Places may
    split; a Place argument therefore returns a list.
    """
    if isinstance(obj, Curve):
        new_field, phi = extension_data(obj.field, k)
        return obj.map_field(new_field, phi)
    curve = obj.curve
    new_field, phi = extension_data(curve.field, k)
    new_curve = curve.map_field(new_field, phi)
    return obj.map_field(new_curve, phi)
