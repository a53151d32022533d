"""Job files, reports, and the command-line interface.

Job files are line oriented.  Comments run from '#' to end of line.

    curve p=5 a=-1 b=0      # short Weierstrass coefficients
    ext k=2                 # optional: work over F_{p^k}; elements use 'u'
    mark inf                # the marked point p: 'inf' or '(x,y)'
    twist 1*inf             # optional; defaults to 1*(mark)
    summand 1*(0,0) - 1*inf # direct-sum block: one line per summand
    ambient 1*(2,1)         # kernel/monad block: one line per summand
    target 1*(2,1) + 1*(0,0) + 1*(1,0)
    g x + 1, 2*x, x + 4     # the row of g, one function per ambient summand
    f 1, 1, 1               # monad block: one line per ambient row, s entries
    divisor 2*inf           # optional; used by the `rr` command

Functions are expressions in x, y (and u over extensions) with + - * / ^ and
parentheses.  `$name` slots may appear inside g/f entries; they are filled in
by the sweep command.  Exit codes: 0 semistable, 2 not semistable, 1 errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass, field as dataclass_field

from .errors import (
    DimensionMismatch,
    IdenticallyZeroWedge,
    InternalInconsistency,
    ParseError,
)
from .galois import ExtensionField, canonical_field
from .elliptic import Curve, Divisor, MarkedCurve, Point
from .funcspace import CurveFunction, rr_basis
from .bundles import (
    DirectSumPresentation,
    KernelPresentation,
    MonadPresentation,
    sections_direct_sum,
    sections_kernel,
    sections_monad,
)
from .stability import SEMISTABLE, fully_split_test, splitting_type


# ---------------------------------------------------------------------------
# scanning


class _Scanner:
    """Cursor over one line with column-accurate errors."""

    def __init__(self, text, line_no):
        self.text = text
        self.line_no = line_no
        self.pos = 0

    def error(self, message):
        raise ParseError(self.line_no, self.pos + 1, message)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self):
        self.skip_ws()
        if self.pos < len(self.text):
            return self.text[self.pos]
        return ""

    def at_end(self):
        return self.peek() == ""

    def take(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def try_take(self, ch):
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def take_word(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if self.pos == start:
            self.error("expected a word")
        return self.text[start:self.pos]

    def take_int(self):
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or not self.text[start:self.pos].lstrip("+-"):
            self.error("expected an integer")
        return int(self.text[start:self.pos])


def _parse_element(scanner, field):
    """An element expression over the coefficient field (ints and u)."""
    return _parse_expr(scanner, field, None, allow_xy=False)


def _parse_expr(scanner, field, curve, allow_xy=True):
    """Expression parser; returns a CurveFunction (curve needed for x, y)
    or a FieldElement when allow_xy is false."""

    def as_value(kind, payload):
        return (kind, payload)

    def atom():
        ch = scanner.peek()
        if ch == "(":
            scanner.take("(")
            v = expr()
            scanner.take(")")
            return v
        if ch == "-":
            scanner.take("-")
            k, p = atom()
            return as_value(k, -p)
        if ch.isdigit():
            n = scanner.take_int()
            if allow_xy:
                return as_value("fn", CurveFunction.constant(curve, n))
            return as_value("elt", field.element(n))
        if ch.isalpha() or ch == "$":
            if ch == "$":
                scanner.error("unresolved slot (fill it with --slot)")
            word = scanner.take_word()
            if word == "x" and allow_xy:
                return as_value("fn", CurveFunction.x(curve))
            if word == "y" and allow_xy:
                return as_value("fn", CurveFunction.y(curve))
            if word == "u":
                if isinstance(field, ExtensionField):
                    gen = field.generator
                else:
                    scanner.error("'u' needs an extension field (ext k=...)")
                if allow_xy:
                    return as_value("fn", CurveFunction.constant(curve, gen))
                return as_value("elt", gen)
            scanner.error(f"unknown symbol {word!r}")
        scanner.error("expected a value")

    def power():
        base = atom()
        if scanner.try_take("^"):
            e = scanner.take_int()
            if e < 0:
                scanner.error("negative exponents are not supported; use /")
            k, p = base
            return as_value(k, p ** e)
        return base

    def term():
        k, p = power()
        while True:
            ch = scanner.peek()
            if ch == "*":
                scanner.take("*")
                k2, p2 = power()
                p = p * p2
            elif ch == "/":
                scanner.take("/")
                k2, p2 = power()
                p = p / p2
            else:
                return as_value(k, p)

    def expr():
        k, p = term()
        while True:
            ch = scanner.peek()
            if ch == "+":
                scanner.take("+")
                _, p2 = term()
                p = p + p2
            elif ch == "-":
                scanner.take("-")
                _, p2 = term()
                p = p - p2
            else:
                return as_value(k, p)

    kind, payload = expr()
    return payload


def _parse_point(scanner, curve):
    if scanner.peek() == "i":
        word = scanner.take_word()
        if word != "inf":
            scanner.error(f"expected a point, got {word!r}")
        return curve.infinity()
    scanner.take("(")
    x = _parse_element(scanner, curve.field)
    scanner.take(",")
    y = _parse_element(scanner, curve.field)
    scanner.take(")")
    return Point(curve, x, y)


def _parse_divisor(scanner, curve):
    total = Divisor.zero(curve)
    sign = 1
    if scanner.try_take("-"):
        sign = -1
    elif scanner.try_take("+"):
        sign = 1
    while True:
        coeff = 1
        explicit = False
        if scanner.peek().isdigit():
            coeff = scanner.take_int()
            explicit = True
        if explicit and scanner.peek() != "*":
            if coeff != 0:
                scanner.take("*")  # produce the usual error
            # a bare 0 is the zero divisor term
        else:
            if explicit:
                scanner.take("*")
            point = _parse_point(scanner, curve)
            total = total + (sign * coeff) * Divisor.of_point(point)
        ch = scanner.peek()
        if ch == "+":
            scanner.take("+")
            sign = 1
        elif ch == "-":
            scanner.take("-")
            sign = -1
        else:
            return total


def _split_functions(text, line_no, offset):
    """Split a function list on top-level commas, keeping column offsets."""
    parts = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((text[start:i], offset + start))
            start = i + 1
    parts.append((text[start:], offset + start))
    return parts


# ---------------------------------------------------------------------------
# jobs


@dataclass
class JobDescription:
    """A parsed job: curve, marked point, presentation, twist, options."""

    curve: object
    mc: object
    kind: str
    summands: list = dataclass_field(default_factory=list)
    ambient: list = dataclass_field(default_factory=list)
    target: object = None
    g_row: list = dataclass_field(default_factory=list)
    f_matrix: list = dataclass_field(default_factory=list)
    twist: object = None
    rr_divisor: object = None
    slots: tuple = ()
    template: str = ""

    def __eq__(self, other):
        if not isinstance(other, JobDescription):
            return NotImplemented
        return (
            self.curve == other.curve
            and self.mc == other.mc
            and self.kind == other.kind
            and self.summands == other.summands
            and self.ambient == other.ambient
            and self.target == other.target
            and self.g_row == other.g_row
            and self.f_matrix == other.f_matrix
            and self.twist == other.twist
            and self.rr_divisor == other.rr_divisor
        )

    def presentation(self):
        if self.kind == "direct_sum":
            return DirectSumPresentation(self.mc, self.summands)
        kernel = KernelPresentation(self.mc, self.ambient, self.target, self.g_row)
        if self.kind == "kernel":
            return kernel
        return MonadPresentation(kernel, self.f_matrix)

    def section_system(self, twist=None):
        twist = twist if twist is not None else self.twist
        P = self.presentation()
        if self.kind == "direct_sum":
            return sections_direct_sum(P, twist)
        if self.kind == "kernel":
            return sections_kernel(P, twist)
        return sections_monad(P, twist)


def _find_slots(text):
    slots = set()
    i = 0
    while i < len(text):
        if text[i] == "$":
            j = i + 1
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j == i + 1:
                raise ParseError(1, 1, "empty slot name after '$'")
            slots.add(text[i + 1:j])
            i = j
        else:
            i += 1
    return tuple(sorted(slots))


def parse_job(text):
    """Parse a job description; raises ParseError with line/column."""
    slots = _find_slots(text)
    if slots:
        return JobDescription(
            curve=None, mc=None, kind="template", slots=slots, template=text
        )
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            lines.append((no, body))
    if not lines:
        raise ParseError(1, 1, "empty job file")

    records = []
    for no, body in lines:
        scanner = _Scanner(body, no)
        key = scanner.take_word()
        records.append((no, key, scanner))

    # field parameters come first so everything else can be evaluated
    p = ext_k = None
    curve_scanner = None
    for no, key, scanner in records:
        if key == "curve":
            if curve_scanner is not None:
                scanner.error("duplicate curve line")
            curve_scanner = scanner
        elif key == "ext":
            word = scanner.take_word()
            if word != "k":
                scanner.error("expected k=<int>")
            scanner.take("=")
            ext_k = scanner.take_int()
    if curve_scanner is None:
        raise ParseError(lines[0][0], 1, "missing curve line")

    # first pass over the curve line extracts p; the second, with the field
    # in hand, evaluates the coefficient expressions
    probe = _Scanner(curve_scanner.text, curve_scanner.line_no)
    probe.take_word()  # "curve"
    word = probe.take_word()
    if word != "p":
        probe.error("expected p=<prime>")
    probe.take("=")
    p = probe.take_int()
    try:
        field = canonical_field(p, ext_k or 1)
    except ValueError as exc:
        raise ParseError(curve_scanner.line_no, 1, str(exc)) from exc

    sc2 = _Scanner(curve_scanner.text, curve_scanner.line_no)
    sc2.take_word()
    values = {}
    for name in ("p", "a", "b"):
        word = sc2.take_word()
        if word != name:
            sc2.error(f"expected {name}=...")
        sc2.take("=")
        if name == "p":
            values["p"] = sc2.take_int()
        else:
            values[name] = _parse_element(sc2, field)
    if not sc2.at_end():
        sc2.error("trailing input on curve line")
    try:
        curve = Curve(field, values["a"], values["b"])
    except ValueError as exc:
        raise ParseError(curve_scanner.line_no, 1, str(exc)) from exc

    mc = None
    kind = None
    summands, ambient, g_row, f_rows = [], [], [], []
    target = twist = rr_div = None
    for no, key, scanner in records:
        if key in ("curve", "ext"):
            continue
        if key == "mark":
            pt = _parse_point(scanner, curve)
            mc = MarkedCurve(curve, pt)
        elif key == "summand":
            summands.append(_parse_divisor(scanner, curve))
            kind = _set_kind(kind, "direct_sum", scanner)
        elif key == "ambient":
            ambient.append(_parse_divisor(scanner, curve))
            kind = _set_kind(kind, "kernel", scanner)
        elif key == "target":
            target = _parse_divisor(scanner, curve)
            kind = _set_kind(kind, "kernel", scanner)
        elif key == "g":
            rest = scanner.text[scanner.pos:]
            for part, offset in _split_functions(rest, no, scanner.pos):
                sub = _Scanner(part, no)
                g_row.append(_parse_expr(sub, field, curve))
                if not sub.at_end():
                    sub.error("trailing input in function")
            kind = _set_kind(kind, "kernel", scanner)
        elif key == "f":
            rest = scanner.text[scanner.pos:]
            row = []
            for part, offset in _split_functions(rest, no, scanner.pos):
                sub = _Scanner(part, no)
                row.append(_parse_expr(sub, field, curve))
                if not sub.at_end():
                    sub.error("trailing input in function")
            f_rows.append(row)
        elif key == "twist":
            twist = _parse_divisor(scanner, curve)
        elif key == "divisor":
            rr_div = _parse_divisor(scanner, curve)
        else:
            scanner.error(f"unknown directive {key!r}")
        if key not in ("g", "f"):
            if not scanner.at_end():
                scanner.error("trailing input")
    if mc is None:
        raise ParseError(lines[-1][0], 1, "missing mark line")
    if f_rows:
        kind = "monad"
    if kind is None:
        if rr_div is not None:
            kind = "rr_only"
        else:
            raise ParseError(lines[-1][0], 1, "no presentation block found")
    if twist is None:
        twist = Divisor.of_point(mc.p)
    job = JobDescription(
        curve=curve,
        mc=mc,
        kind=kind,
        summands=summands,
        ambient=ambient,
        target=target,
        g_row=g_row,
        f_matrix=f_rows,
        twist=twist,
        rr_divisor=rr_div,
    )
    _validate_shape(job, lines[-1][0])
    return job


def _set_kind(kind, new, scanner):
    if kind == "direct_sum" and new != "direct_sum":
        scanner.error("cannot mix summand with kernel/monad blocks")
    if kind in ("kernel", "monad") and new == "direct_sum":
        scanner.error("cannot mix summand with kernel/monad blocks")
    return new if kind is None or kind == "direct_sum" else kind


def _validate_shape(job, last_line):
    if job.kind in ("kernel", "monad"):
        if job.target is None:
            raise ParseError(last_line, 1, "kernel block needs a target line")
        if len(job.g_row) != len(job.ambient):
            raise ParseError(
                last_line, 1,
                f"g has {len(job.g_row)} entries for {len(job.ambient)} ambient lines",
            )
    if job.kind == "monad":
        if len(job.f_matrix) != len(job.ambient):
            raise ParseError(
                last_line, 1,
                f"f has {len(job.f_matrix)} rows for {len(job.ambient)} ambient lines",
            )
        widths = {len(row) for row in job.f_matrix}
        if len(widths) != 1:
            raise ParseError(last_line, 1, "f rows have unequal lengths")


def print_job(job):
    """Canonical re-serialization of a slot-free job."""
    out = []
    field = job.curve.field
    p = field.characteristic
    out.append(f"curve p={p} a={job.curve.a} b={job.curve.b}")
    if field.degree > 1:
        out.append(f"ext k={field.degree}")
    out.append(f"mark {job.mc.p}")
    for D in job.summands:
        out.append(f"summand {D}")
    for D in job.ambient:
        out.append(f"ambient {D}")
    if job.target is not None:
        out.append(f"target {job.target}")
    if job.g_row:
        out.append("g " + ", ".join(str(g) for g in job.g_row))
    for row in job.f_matrix:
        out.append("f " + ", ".join(str(f) for f in row))
    out.append(f"twist {job.twist}")
    if job.rr_divisor is not None:
        out.append(f"divisor {job.rr_divisor}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    """Serializable analysis report; round-trips through its dict form."""

    p: int
    ext: int
    curve_a: str
    curve_b: str
    marked_point: str
    twist: str
    presentation: str
    rank: int
    section_count: int
    verdict: str
    reason: object
    spectral_divisor: object
    kernel_spectral: object
    base_change_degree: int
    splitting: object
    fully_split: object
    fully_split_failures: tuple
    places: tuple

    def to_dict(self):
        return {
            "p": self.p,
            "ext": self.ext,
            "curve_a": self.curve_a,
            "curve_b": self.curve_b,
            "marked_point": self.marked_point,
            "twist": self.twist,
            "presentation": self.presentation,
            "rank": self.rank,
            "section_count": self.section_count,
            "verdict": self.verdict,
            "reason": self.reason,
            "spectral_divisor": self.spectral_divisor,
            "kernel_spectral": self.kernel_spectral,
            "base_change_degree": self.base_change_degree,
            "splitting": [list(pair) for pair in self.splitting]
            if self.splitting is not None
            else None,
            "fully_split": self.fully_split,
            "fully_split_failures": list(self.fully_split_failures),
            "places": [dict(pl) for pl in self.places],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            p=data["p"],
            ext=data["ext"],
            curve_a=data["curve_a"],
            curve_b=data["curve_b"],
            marked_point=data["marked_point"],
            twist=data["twist"],
            presentation=data["presentation"],
            rank=data["rank"],
            section_count=data["section_count"],
            verdict=data["verdict"],
            reason=data["reason"],
            spectral_divisor=data["spectral_divisor"],
            kernel_spectral=data["kernel_spectral"],
            base_change_degree=data["base_change_degree"],
            splitting=tuple(tuple(pair) for pair in data["splitting"])
            if data["splitting"] is not None
            else None,
            fully_split=data["fully_split"],
            fully_split_failures=tuple(data["fully_split_failures"]),
            places=tuple(
                tuple(sorted(pl.items())) for pl in data["places"]
            ),
        )

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self):
        rows = [
            ("curve", f"y^2 = x^3 + {self.curve_a}*x + {self.curve_b} over "
             f"F_{self.p}" + (f"^{self.ext}" if self.ext > 1 else "")),
            ("marked point", self.marked_point),
            ("twist", self.twist),
            ("presentation", self.presentation),
            ("rank", str(self.rank)),
            ("sections", str(self.section_count)),
            ("verdict", self.verdict
             + (f" ({self.reason})" if self.reason else "")),
        ]
        if self.spectral_divisor is not None:
            rows.append(("spectral divisor", self.spectral_divisor))
        if self.kernel_spectral is not None:
            rows.append(("kernel spectral", self.kernel_spectral))
        if self.base_change_degree > 1:
            rows.append(("base change", f"degree {self.base_change_degree}"))
        if self.splitting is not None:
            parts = [f"{pt} x F_{rk}" for pt, rk in self.splitting]
            rows.append(("splitting", " (+) ".join(parts)))
        if self.fully_split is not None:
            rows.append(("fully split", "yes" if self.fully_split else "no"))
        for failure in self.fully_split_failures:
            rows.append(("  condition", failure))
        for pl in self.places:
            d = dict(pl)
            rows.append(
                (
                    f"at {d['point']}",
                    f"mult {d['multiplicity']}, d_t {d['d_t']}, "
                    f"delta {d['delta']}, exponents {d['exponents']}",
                )
            )
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"


def _stability_to_report(job, result, fst):
    splitting = None
    if result.splitting is not None:
        splitting = tuple(
            (str(f.point), f.rank) for f in result.splitting.factors
        )
    places = []
    for analysis in result.places:
        places.append(
            tuple(
                sorted(
                    {
                        "point": str(analysis.point),
                        "multiplicity": analysis.multiplicity,
                        "d_t": analysis.d_t,
                        "delta": list(analysis.profile.delta),
                        "exponents": list(analysis.profile.elementary_exponents),
                    }.items()
                )
            )
        )
    fully = result.fully_split if fst is None else fst.fully_split
    failures = () if fst is None else fst.fully_split_failures
    field = job.curve.field
    return Report(
        p=field.characteristic,
        ext=field.degree,
        curve_a=str(job.curve.a),
        curve_b=str(job.curve.b),
        marked_point=str(job.mc.p),
        twist=str(job.twist),
        presentation=job.kind,
        rank=result.rank,
        section_count=result.section_count,
        verdict=result.verdict,
        reason=result.reason,
        spectral_divisor=(
            str(result.spectral_divisor)
            if result.spectral_divisor is not None
            else None
        ),
        kernel_spectral=(
            str(result.kernel_spectral)
            if result.kernel_spectral is not None
            else None
        ),
        base_change_degree=result.base_change_degree,
        splitting=splitting,
        fully_split=fully,
        fully_split_failures=tuple(failures),
        places=tuple(places),
    )


def cmd_analyze(job, twist=None):
    """Run both engines and merge their findings; returns (Report, exit code).

    A twist of degree one drives the full analysis.  Larger twists take the
    general-twist pathway (direct sums only): the spectral divisor is read
    off the graded subspace of sections vanishing at the non-base twist
    points, and a dimension mismatch there is reported as evidence against
    the fully-split-semistable hypothesis.
    """
    twist_div = twist if twist is not None else job.twist
    if twist_div.degree() != 1:
        return _analyze_general_twist(job, twist_div)
    system = job.section_system(twist)
    result = splitting_type(system)
    fst = None
    if result.verdict == SEMISTABLE:
        fst = fully_split_test(system)
        engine_fully = result.fully_split
        if fst.fully_split != engine_fully:
            raise InternalInconsistency(
                "fully-split verdicts disagree between the two algorithms"
            )
    report = _stability_to_report(job, result, fst)
    code = 0 if result.verdict == SEMISTABLE else 2
    return report, code


def _analyze_general_twist(job, twist_div):
    from .stability import general_twist_spectral

    if job.kind != "direct_sum":
        raise ValueError(
            "twists of degree > 1 are supported for direct-sum jobs only"
        )
    if not twist_div.is_effective():
        raise ValueError("a general twist must be an effective divisor")
    points = []
    for place, n in twist_div.items():
        if n != 1 or not place.is_rational:
            raise ValueError(
                "a general twist must be a sum of distinct rational points"
            )
        points.append(place.point)
    # the marked point is the base so labels stay comparable to the unit twist
    if job.mc.p not in points:
        raise ValueError("a general twist must contain the marked point")
    ordered = [job.mc.p] + [q for q in points if q != job.mc.p]
    P = job.presentation()
    field = job.curve.field
    base = dict(
        p=field.characteristic,
        ext=field.degree,
        curve_a=str(job.curve.a),
        curve_b=str(job.curve.b),
        marked_point=str(job.mc.p),
        twist=str(twist_div),
        presentation=job.kind,
        rank=P.rank,
        section_count=P.rank * len(ordered),
        kernel_spectral=None,
        base_change_degree=1,
        splitting=None,
        fully_split=None,
        fully_split_failures=(),
        places=(),
    )
    try:
        sigma = general_twist_spectral(P, ordered)
    except DimensionMismatch as exc:
        report = Report(
            verdict="not_semistable",
            reason="dimension_mismatch",
            spectral_divisor=None,
            **{**base, "section_count": exc.actual},
        )
        return report, 2
    except IdenticallyZeroWedge:
        report = Report(
            verdict="not_semistable",
            reason="top_wedge_vanishes",
            spectral_divisor=None,
            **base,
        )
        return report, 2
    report = Report(
        verdict=SEMISTABLE,
        reason=None,
        spectral_divisor=str(sigma),
        **base,
    )
    return report, 0


def cmd_spectral(job, twist=None):
    report, code = cmd_analyze(job, twist)
    return report, code


def cmd_rr(job):
    if job.rr_divisor is None:
        raise ValueError("rr needs a `divisor` line in the job file")
    basis = rr_basis(job.rr_divisor)
    return basis


def _slot_values(spec):
    """Parse a --slot argument name=0..4 or name=0,1,2."""
    if "=" not in spec:
        raise ValueError(f"bad slot spec {spec!r}")
    name, body = spec.split("=", 1)
    if ".." in body:
        low, high = body.split("..", 1)
        values = list(range(int(low), int(high) + 1))
    else:
        values = [int(v) for v in body.split(",") if v != ""]
    if not values:
        raise ValueError(f"empty slot range in {spec!r}")
    return name.strip(), values


def cmd_sweep(template_text, slot_specs):
    """Instantiate the template over slot ranges, one report row each."""
    job = parse_job(template_text)
    if job.kind != "template":
        slots = ()
    else:
        slots = job.slots
    ranges = {}
    for spec in slot_specs:
        name, values = _slot_values(spec)
        ranges[name] = values
    missing = [name for name in slots if name not in ranges]
    if missing:
        raise ValueError(f"no range given for slots: {', '.join(missing)}")
    names = sorted(ranges)
    rows = []
    histogram = {}
    skipped = 0
    for combo in itertools.product(*(ranges[n] for n in names)):
        assignment = dict(zip(names, combo))
        text = template_text
        for name in sorted(assignment, key=len, reverse=True):
            text = text.replace(f"${name}", str(assignment[name]))
        row = {"slots": assignment}
        try:
            inst = parse_job(text)
            report, code = cmd_analyze(inst)
        except (ParseError, ValueError, DimensionMismatch) as exc:
            row["status"] = "invalid"
            row["error"] = str(exc)
            skipped += 1
            rows.append(row)
            continue
        row["status"] = "ok"
        row["verdict"] = report.verdict
        row["reason"] = report.reason
        row["spectral_divisor"] = report.spectral_divisor
        row["splitting"] = (
            [list(pair) for pair in report.splitting]
            if report.splitting is not None
            else None
        )
        key = report.verdict
        if report.splitting is not None:
            ranks = ",".join(str(rk) for _, rk in sorted(report.splitting))
            key = f"{report.verdict}[{ranks}]"
        histogram[key] = histogram.get(key, 0) + 1
        rows.append(row)
    summary = {
        "rows": rows,
        "histogram": dict(sorted(histogram.items())),
        "skipped": skipped,
    }
    return summary


# ---------------------------------------------------------------------------
# entry point


def _read_job_file(path):
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="ellstab",
        description="Semistability and splitting types of degree-zero "
        "bundles on elliptic curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="full semistability analysis")
    p_analyze.add_argument("file")
    p_analyze.add_argument("--json", action="store_true")
    p_analyze.add_argument("--twist", help="override the twist divisor")

    p_spectral = sub.add_parser("spectral", help="print the spectral divisor")
    p_spectral.add_argument("file")
    p_spectral.add_argument("--json", action="store_true")

    p_rr = sub.add_parser("rr", help="print a Riemann-Roch basis L(D)")
    p_rr.add_argument("file")

    p_sweep = sub.add_parser("sweep", help="sweep template slots")
    p_sweep.add_argument("file")
    p_sweep.add_argument("--slot", action="append", default=[])
    p_sweep.add_argument("--json", action="store_true")

    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            job = parse_job(_read_job_file(args.file))
            twist = None
            if args.twist:
                scanner = _Scanner(args.twist, 0)
                twist = _parse_divisor(scanner, job.curve)
            report, code = cmd_analyze(job, twist)
            print(report.to_json() if args.json else report.to_text(), end="")
            return code
        if args.command == "spectral":
            job = parse_job(_read_job_file(args.file))
            report, code = cmd_spectral(job)
            if args.json:
                print(json.dumps({"spectral_divisor": report.spectral_divisor}))
            else:
                print(report.spectral_divisor)
            return code
        if args.command == "rr":
            job = parse_job(_read_job_file(args.file))
            basis = cmd_rr(job)
            print(f"dim L(D) = {basis.dimension}")
            for f in basis.basis:
                print(str(f))
            return 0
        if args.command == "sweep":
            summary = cmd_sweep(_read_job_file(args.file), args.slot)
            if args.json:
                print(json.dumps(summary, indent=2))
            else:
                for i, row in enumerate(summary["rows"]):
                    slots = " ".join(
                        f"{k}={v}" for k, v in sorted(row["slots"].items())
                    )
                    if row["status"] != "ok":
                        print(f"row {i}: {slots}  INVALID ({row['error']})")
                    else:
                        extra = ""
                        if row["splitting"] is not None:
                            extra = "  " + " ".join(
                                f"{pt}:F_{rk}" for pt, rk in row["splitting"]
                            )
                        print(
                            f"row {i}: {slots}  {row['verdict']}"
                            f"{'' if not row['reason'] else ' (' + row['reason'] + ')'}"
                            f"{extra}"
                        )
                print(f"skipped: {summary['skipped']}")
                for key, count in summary["histogram"].items():
                    print(f"{key}: {count}")
            return 0
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # semantic and internal errors
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
