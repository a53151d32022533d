"""Acceptance criteria, one test per criterion, each printing a PASS line.

Fixture pools are deterministic (fixed seeds) and shared across criteria;
degree-law and slope-bound checks run inside every criterion that produces
semistable verdicts and are summarized by their own criteria at the end.
"""

import random
import time

from ellstab.galois import matrix_rank, PrimeField, Poly
from ellstab.elliptic import Divisor, MarkedCurve, Place
from ellstab.funcspace import CurveFunction, RatFn, principal_divisor, rr_basis
from ellstab.bundles import (
    DirectSumPresentation,
    SectionSystem,
    sections_direct_sum,
    sections_kernel,
    sections_monad,
)
from ellstab.stability import (
    fully_split_test,
    general_twist_spectral,
    incidence_order,
    kernel_dimension,
    spectral_divisor,
    splitting_type,
)

from helpers import (
    line_sum,
    random_kernel_presentation,
    random_monad_presentation,
    standard_curve,
)

PRIMES = (5, 7, 11, 13)
SEED = 20260808

_cache = {}


def _passed(number, message):
    print(f"\ncriterion {number}: PASS - {message}")


def _check_degree_law(report):
    assert report.spectral_divisor.degree() == report.rank, (
        f"degree law violated: deg = {report.spectral_divisor.degree()}, "
        f"rank = {report.rank}"
    )
    _cache.setdefault("degree_law_checks", 0)
    _cache["degree_law_checks"] += 1


def _check_slope(report):
    assert report.slope_violations == ()
    for analysis in report.places:
        assert all(v <= 1 for v in analysis.section_orders)
    _cache.setdefault("slope_checks", 0)
    _cache["slope_checks"] += 1


def _direct_sum_pool():
    if "pool" in _cache:
        return _cache["pool"]
    rng = random.Random(SEED)
    pool = []
    for _ in range(100):
        p = rng.choice(PRIMES)
        curve = standard_curve(p)
        pts = curve.points()
        mc = MarkedCurve(curve, rng.choice(pts))
        r = rng.randrange(1, 5)
        points = [rng.choice(pts) for _ in range(r)]
        pool.append((mc, points, line_sum(mc, points)))
    _cache["pool"] = pool
    return pool


def test_criterion_1_section_count_law():
    start = time.time()
    pool = _direct_sum_pool()
    systems = []
    for mc, points, P in pool:
        system = sections_direct_sum(P, Divisor.of_point(mc.p))
        assert len(system.sections) == P.rank, (
            f"h^0(V') = {len(system.sections)}, rank = {P.rank}"
        )
        systems.append(system)
    _cache["systems"] = systems
    elapsed = time.time() - start
    assert elapsed < 10, f"criterion 1 took {elapsed:.1f}s"
    _passed(1, f"h^0(V') = rank on {len(systems)} random direct sums "
               f"({elapsed:.1f}s)")


def test_criterion_2_round_trip_splitting():
    start = time.time()
    pool = _direct_sum_pool()
    systems = _cache["systems"]
    reports = []
    for (mc, points, P), system in zip(pool, systems):
        report = splitting_type(system)
        assert report.verdict == "semistable"
        assert report.base_change_degree == 1
        got = sorted((str(f.point), f.rank) for f in report.splitting.factors)
        want = sorted((str(q), 1) for q in points)
        assert got == want, f"splitting {got} != constructed {want}"
        assert report.fully_split
        fst = fully_split_test(system)
        assert fst.fully_split is True
        got_fst = sorted((str(f.point), f.rank) for f in fst.splitting.factors)
        assert got_fst == want
        _check_degree_law(report)
        _check_slope(report)
        reports.append(report)
    _cache["reports"] = reports
    elapsed = time.time() - start
    assert elapsed < 30, f"criterion 2 took {elapsed:.1f}s"
    _passed(2, f"both engines recover the constructed splitting on "
               f"{len(reports)} fixtures ({elapsed:.1f}s)")


def test_criterion_3_instability_detection():
    start = time.time()
    rng = random.Random(SEED + 3)
    count = 0
    while count < 50:
        p = rng.choice(PRIMES)
        curve = standard_curve(p)
        pts = [q for q in curve.points()]
        mc = MarkedCurve(curve, rng.choice(pts))
        q = rng.choice(pts)
        P = DirectSumPresentation(
            mc, [Divisor.of_point(q), -1 * Divisor.of_point(q)]
        )
        system = sections_direct_sum(P, Divisor.of_point(mc.p))
        report = splitting_type(system)
        assert report.verdict == "not_semistable", (
            f"O(D) + O(-D) must be unstable, got {report.verdict}"
        )
        assert report.reason in ("top_wedge_vanishes", "section_count_mismatch")
        count += 1
    elapsed = time.time() - start
    assert elapsed < 10, f"criterion 3 took {elapsed:.1f}s"
    _passed(3, f"{count} unstable fixtures all rejected ({elapsed:.1f}s)")


def test_criterion_4_basis_invariance():
    start = time.time()
    rng = random.Random(SEED + 4)
    pool = _direct_sum_pool()
    systems = _cache["systems"]
    reports = _cache["reports"]
    checks = 0
    for (mc, points, P), system, report in zip(pool, systems, reports):
        field = mc.curve.field
        r = len(system.sections)
        sigma = report.spectral_divisor
        for _ in range(10):
            while True:
                matrix = [
                    [field.element_from_index(rng.randrange(field.order))
                     for _ in range(r)]
                    for _ in range(r)
                ]
                if matrix_rank(matrix, field) == r:
                    break
            new_sections = []
            for i in range(r):
                vec = [CurveFunction.zero(mc.curve) for _ in range(system.m)]
                for j in range(r):
                    if matrix[i][j].is_zero():
                        continue
                    scale = CurveFunction.constant(mc.curve, matrix[i][j])
                    for a in range(system.m):
                        if not system.sections[j][a].is_zero:
                            vec[a] = vec[a] + system.sections[j][a] * scale
                new_sections.append(vec)
            changed = SectionSystem(
                mc, system.ambient, system.twist, new_sections, declared_rank=r
            )
            assert spectral_divisor(changed) == sigma
            checks += 1
    elapsed = time.time() - start
    assert elapsed < 20, f"criterion 4 took {elapsed:.1f}s"
    _passed(4, f"{checks} random basis changes left the spectral divisor "
               f"fixed ({elapsed:.1f}s)")


def test_criterion_6_monad_shift():
    start = time.time()
    rng = random.Random(SEED + 6)
    count = 0
    attempts = 0
    while count < 25 and attempts < 150:
        attempts += 1
        p = rng.choice([5, 7])
        curve = standard_curve(p)
        mc = MarkedCurve(curve, rng.choice(curve.points()))
        s = rng.choice([1, 2])
        r = 1 if (s == 2 and p == 5) else rng.choice([1, 2])
        try:
            monad = random_monad_presentation(rng, mc, r, s)
        except RuntimeError:
            continue
        twist = Divisor.of_point(mc.p)
        system = sections_monad(monad, twist)
        report = splitting_type(system)
        if report.verdict != "semistable":
            continue
        # independent path: the full kernel system, no modulus distinction
        kernel_system = sections_kernel(monad.kernel, twist)
        sigma_ker = spectral_divisor(kernel_system)
        shift = sigma_ker - report.spectral_divisor
        assert shift == s * Divisor.of_point(mc.p), (
            f"monad shift is {shift}, expected {s}*(p)"
        )
        _check_degree_law(report)
        _check_slope(report)
        count += 1
    assert count >= 25, f"only {count} valid monads found"
    elapsed = time.time() - start
    assert elapsed < 30, f"criterion 6 took {elapsed:.1f}s"
    _passed(6, f"kernel and cohomology spectral divisors differ by s*(p) on "
               f"{count} monads ({elapsed:.1f}s)")


def test_criterion_7_oracle_equivalence():
    start = time.time()
    rng = random.Random(SEED + 7)
    count = 0
    nontrivial = 0
    attempts = 0
    while count < 50 and attempts < 250:
        attempts += 1
        p = rng.choice([5, 7])
        curve = standard_curve(p)
        mc = MarkedCurve(curve, rng.choice(curve.points()))
        m = rng.choice([3, 4])
        try:
            P = random_kernel_presentation(rng, mc, m)
        except RuntimeError:
            continue
        system = sections_kernel(P, Divisor.of_point(mc.p))
        report = splitting_type(system)
        if report.verdict != "semistable":
            continue  # top wedge vanished or count off: outside this criterion
        fst = fully_split_test(system)
        all_ranks_one = all(f.rank == 1 for f in report.splitting.factors)
        assert fst.fully_split == all_ranks_one, (
            "fully-split verdicts disagree between the two algorithms"
        )
        if not all_ranks_one:
            nontrivial += 1
            extended = (
                system.base_change(report.base_change_degree)
                if report.base_change_degree > 1
                else system
            )
            for factor in report.splitting.factors:
                if factor.rank < 2:
                    continue
                t = Place.from_point(factor.point)
                mult = sum(
                    f.rank for f in report.splitting.factors
                    if f.point == factor.point
                )
                kd = kernel_dimension(extended, t)
                assert kd.d_t < mult, (
                    "kernel-dimension oracle fails to confirm the F-type row"
                )
        _check_degree_law(report)
        _check_slope(report)
        count += 1
    assert count >= 50, f"only {count} kernels with nonvanishing wedge"
    assert nontrivial >= 1, "no F-type row appeared in the sample"
    elapsed = time.time() - start
    _passed(7, f"engines agree on {count} kernels; {nontrivial} F-type rows "
               f"confirmed by the kernel-dimension oracle ({elapsed:.1f}s)")


def test_criterion_8_general_twist_consistency():
    start = time.time()
    rng = random.Random(SEED + 8)
    count = 0
    while count < 25:
        p = rng.choice(PRIMES)
        curve = standard_curve(p)
        pts = curve.points()
        mc = MarkedCurve(curve, rng.choice(pts))
        r = rng.randrange(1, 4)
        points = [rng.choice(pts) for _ in range(r)]
        P = line_sum(mc, points)
        others = [q for q in pts if q != mc.p]
        extra = rng.sample(others, 2)
        sigma_general = general_twist_spectral(P, [mc.p] + extra)
        sigma_unit = spectral_divisor(
            sections_direct_sum(P, Divisor.of_point(mc.p))
        )
        assert sigma_general == sigma_unit, (
            f"{sigma_general} != {sigma_unit} across twist pathways"
        )
        count += 1
    elapsed = time.time() - start
    _passed(8, f"3-point-twist spectral divisors match the unit twist on "
               f"{count} fixtures, dim G = r throughout ({elapsed:.1f}s)")


def test_criterion_9_slope_bound():
    # explicit incidence orders on slope-1 frames, plus the violations
    # collected during every semistable analysis above
    rng = random.Random(SEED + 9)
    pool = _direct_sum_pool()
    systems = _cache["systems"]
    reports = _cache["reports"]
    checked = 0
    for (mc, points, P), system, report in list(zip(pool, systems, reports))[:20]:
        r = len(system.sections)
        if r < 2:
            continue
        support = report.spectral_divisor.support()
        for i in range(r):
            frame = [j for j in range(r) if j != i]
            for t in support:
                order = incidence_order(system, i, frame, t)
                assert 0 <= order <= 1, f"incidence order {order} exceeds slope"
                checked += 1
    assert _cache.get("slope_checks", 0) >= 100
    _passed(9, f"{checked} incidence orders <= 1; zero violations across "
               f"{_cache['slope_checks']} analyses")


def test_criterion_5_degree_law():
    # asserted inside every suite above; summarize here
    assert _cache.get("degree_law_checks", 0) >= 150
    _passed(5, f"deg(spectral divisor) = rank held in all "
               f"{_cache['degree_law_checks']} semistable verdicts")


def test_criterion_10_function_field_substrate():
    start = time.time()
    rng = random.Random(SEED + 10)
    # principal divisors have degree zero
    pd_checks = 0
    for p in PRIMES:
        curve = standard_curve(p)
        field = curve.field
        for _ in range(15):
            def rand_poly():
                return Poly(
                    field,
                    [field.element(rng.randrange(p))
                     for _ in range(rng.randrange(1, 4))],
                )

            num_a, den_a = rand_poly(), rand_poly()
            num_b, den_b = rand_poly(), rand_poly()
            if den_a.is_zero or den_b.is_zero:
                continue
            f = CurveFunction(curve, RatFn(num_a, den_a), RatFn(num_b, den_b))
            if f.is_zero:
                continue
            assert principal_divisor(f).degree() == 0
            pd_checks += 1
    # Riemann-Roch dimensions for 100 random divisors of degree 1..6
    rr_checks = 0
    while rr_checks < 100:
        p = rng.choice(PRIMES)
        curve = standard_curve(p)
        pts = curve.points()
        target = rng.randrange(1, 7)
        D = Divisor.zero(curve)
        total = 0
        while total < target:
            n = min(rng.randrange(1, 3), target - total)
            D = D + n * Divisor.of_point(rng.choice(pts))
            total += n
        if rng.random() < 0.5:
            D = D + Divisor.of_point(rng.choice(pts)) - Divisor.of_point(
                rng.choice(pts)
            )
        basis = rr_basis(D)
        assert basis.dimension == D.degree(), (
            f"dim L(D) = {basis.dimension}, deg D = {D.degree()}"
        )
        rr_checks += 1
    elapsed = time.time() - start
    _passed(10, f"{pd_checks} principal divisors of degree 0, {rr_checks} "
                f"Riemann-Roch dimensions exact ({elapsed:.1f}s)")
