"""Randomized corpus generation and identity suites.

Every suite samples rational data deterministically from a seed,
evaluates both sides of an operator identity exactly and reports the
outcome as a ``CheckReport``.  A failure in any suite is an
implementation bug, never numerical noise: the identities are theorems
and the arithmetic is exact.

Increments and scaling constants are drawn with terminating digit
expansions so the truncated backend can divide by them under pure
valuation bookkeeping; polynomial coefficients may be arbitrary
unit-bounded rationals.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random
from typing import Sequence

from .engine import (
    CheckReport,
    PhiPoint,
    UpsilonPoint,
    chain_phi_low,
    compose_then_phi,
    directional_span_rank,
    embed_phi_point,
    leibniz_phi,
    phi,
    phi_poly_closed,
    rank_bound,
    scaling_identity_check,
    transposition_symmetry_check,
    upsilon,
    upsilon_poly_closed_low,
    upsilon_sup_bound_check,
)
from .errors import IndeterminateRank, PrecisionExhausted
from .field import FieldContext, PadicVector
from .functions import (
    BallIndicator,
    FunctionExpr,
    MultiPolynomial,
    Poly,
    Product,
    polynomial_curve,
)

ALL_CHECKS = (
    "leibniz",
    "scaling",
    "symmetry",
    "closed_form",
    "restriction",
    "rank",
    "sup_bound",
    "chain",
)

_COPRIME_DENOMS = {2: (3, 5, 7), 3: (2, 4, 5), 5: (2, 3, 7), 7: (2, 3, 5)}


# -- random data -----------------------------------------------------------------


def random_unit(ctx: FieldContext, rng: Random):
    """Nonzero valuation-0 scalar with a terminating expansion."""
    p = ctx.p
    u = rng.randrange(1, p**3)
    while u % p == 0:
        u = rng.randrange(1, p**3)
    return ctx.scalar(u)


def random_increment(ctx: FieldContext, rng: Random, vmin: int = 0, vmax: int = 3):
    v = rng.randrange(vmin, vmax + 1)
    return random_unit(ctx, rng) * ctx.pi_pow(v)


def _unit_bounded_fraction(p: int, rng: Random, allow_zero: bool) -> Fraction:
    if allow_zero and rng.random() < 0.15:
        return Fraction(0)
    denoms = _COPRIME_DENOMS.get(p, (2, 3))
    num = rng.randrange(-9, 10) or 1
    den = rng.choice((1,) * 3 + denoms)
    extra = rng.randrange(0, 3)
    return Fraction(num, den) * Fraction(p) ** extra


def random_unit_bounded(ctx: FieldContext, rng: Random, allow_zero: bool = True):
    """Rational of norm <= 1; may have a non-terminating expansion."""
    return ctx.scalar(_unit_bounded_fraction(ctx.p, rng, allow_zero))


def random_nonneg_unit_bounded(ctx: FieldContext, rng: Random, allow_zero: bool = True):
    """Nonnegative rational of norm <= 1.

    Used for the increment-displacement slots of nested quotient
    points: with positive increments and nonnegative displacements,
    every evaluation increment of the recursion stays nonzero.
    """
    return ctx.scalar(abs(_unit_bounded_fraction(ctx.p, rng, allow_zero)))


def random_integral_vector(ctx: FieldContext, rng: Random, dim: int) -> PadicVector:
    return PadicVector([random_unit_bounded(ctx, rng, allow_zero=False) for _ in range(dim)])


def random_poly(
    ctx: FieldContext,
    rng: Random,
    degree_max: int = 4,
    m: int = 1,
    l: int = 1,
) -> MultiPolynomial:
    """Random polynomial with unit-bounded rational coefficients."""
    if m == 1:
        deg = rng.randrange(0, degree_max + 1)
        coeffs = [
            PadicVector([random_unit_bounded(ctx, rng) for _ in range(l)])
            for _ in range(deg + 1)
        ]
        if all(c.is_zero() for c in coeffs):
            coeffs[-1] = PadicVector([ctx.one() for _ in range(l)])
        return MultiPolynomial.univariate(coeffs)
    terms = {}
    for _ in range(rng.randrange(2, 6)):
        exps = tuple(rng.randrange(0, degree_max + 1) for _ in range(m))
        if sum(exps) > degree_max:
            continue
        terms[exps] = PadicVector([random_unit_bounded(ctx, rng) for _ in range(l)])
    if not terms:
        terms[(0,) * m] = PadicVector([ctx.one() for _ in range(l)])
    return MultiPolynomial(m, l, terms)


def random_phi_point(
    ctx: FieldContext, rng: Random, m: int, n: int, vmax: int = 2
) -> PhiPoint:
    x = random_integral_vector(ctx, rng, m)
    vs = tuple(random_integral_vector(ctx, rng, m) for _ in range(n))
    ts = tuple(random_increment(ctx, rng, 0, vmax) for _ in range(n))
    return PhiPoint(x, vs, ts)


def random_upsilon_point(
    ctx: FieldContext, rng: Random, m: int, n: int, vmax: int = 2
) -> UpsilonPoint:
    """Random nested point with every recursive increment nonzero.

    Increments are positive and displacement t-slots nonnegative, so
    the shifted increments base.t + disp.t * t met by the recursion
    can never cancel.
    """

    def build(order: int, displacement: bool) -> UpsilonPoint:
        if order == 0:
            return UpsilonPoint.leaf(random_integral_vector(ctx, rng, m))
        t = (
            random_nonneg_unit_bounded(ctx, rng)
            if displacement
            else random_increment(ctx, rng, 0, vmax)
        )
        return UpsilonPoint.node(
            build(order - 1, displacement), build(order - 1, True), t
        )

    return build(n, False)


def standard_corpus(ctx: FieldContext, rng: Random, b: int, size: int = 6):
    """Scalar functions on K**b: polynomials, an indicator, a product."""
    fs: list[FunctionExpr] = []
    for _ in range(size):
        fs.append(Poly(random_poly(ctx, rng, degree_max=3, m=b)))
    fs.append(BallIndicator(ctx.unit_ball(b)))
    fs.append(
        Product(
            Poly(random_poly(ctx, rng, degree_max=2, m=b)),
            Poly(random_poly(ctx, rng, degree_max=2, m=b)),
        )
    )
    return fs


# -- suites ----------------------------------------------------------------------


def leibniz_suite(
    ctx: FieldContext,
    seed: int,
    cases: int = 100,
    orders: Sequence[int] = (1, 2, 3),
    inject_fault: bool = False,
) -> CheckReport:
    rng = Random(seed)
    report = CheckReport("leibniz")
    for case in range(cases):
        f = Poly(random_poly(ctx, rng, degree_max=4))
        g = Poly(random_poly(ctx, rng, degree_max=4))
        for n in orders:
            pt = random_phi_point(ctx, rng, 1, n)
            product = Product(f, g)
            if inject_fault and case == 0:
                product = Product(Poly(f.polynomial.perturbed(ctx.pi())), g)
            try:
                lhs = phi(product, pt)
                rhs = leibniz_phi(f, g, pt)
            except PrecisionExhausted:
                report.record_indeterminate()
                continue
            report.record(pt.to_json(), lhs, rhs)
    return report


def closed_form_suite(
    ctx: FieldContext,
    seed: int,
    phi_cases: int = 200,
    upsilon_cases: int = 100,
) -> CheckReport:
    rng = Random(seed)
    report = CheckReport("closed_form")
    for case in range(phi_cases):
        u = random_poly(ctx, rng, degree_max=4, l=rng.choice((1, 2)))
        n = 1 + case % 3
        pt = random_phi_point(ctx, rng, 1, n)
        try:
            lhs = phi_poly_closed(u, pt)
            rhs = phi(Poly(u), pt)
        except PrecisionExhausted:
            report.record_indeterminate()
            continue
        report.record(pt.to_json(), lhs, rhs)
    for case in range(upsilon_cases):
        u = random_poly(ctx, rng, degree_max=4)
        n = 1 + case % 2
        pt = random_upsilon_point(ctx, rng, 1, n)
        try:
            lhs = upsilon_poly_closed_low(u, pt)
            rhs = upsilon(Poly(u), pt)
        except PrecisionExhausted:
            report.record_indeterminate()
            continue
        report.record(pt.to_json(), lhs, rhs)
    return report


def symmetry_suite(ctx: FieldContext, seed: int, cases: int = 100) -> CheckReport:
    rng = Random(seed)
    report = CheckReport("symmetry")
    for case in range(cases):
        if case % 3 == 0:
            f: FunctionExpr = Product(
                Poly(random_poly(ctx, rng, degree_max=2)),
                Poly(random_poly(ctx, rng, degree_max=2)),
            )
        else:
            f = Poly(random_poly(ctx, rng, degree_max=4))
        n = 2 + case % 2
        pt = random_phi_point(ctx, rng, 1, n)
        try:
            sub = transposition_symmetry_check(f, pt)
        except PrecisionExhausted:
            report.record_indeterminate()
            continue
        report.samples += sub.samples
        report.failures.extend(sub.failures)
        if sub.min_agreement_valuation is not None:
            if (
                report.min_agreement_valuation is None
                or sub.min_agreement_valuation < report.min_agreement_valuation
            ):
                report.min_agreement_valuation = sub.min_agreement_valuation
    return report


def scaling_suite(ctx: FieldContext, seed: int, cases: int = 100) -> CheckReport:
    rng = Random(seed)
    report = CheckReport("scaling")
    for case in range(cases):
        if case % 4 == 0:
            f: FunctionExpr = BallIndicator(ctx.unit_ball(1))
        else:
            f = Poly(random_poly(ctx, rng, degree_max=4))
        pt = random_phi_point(ctx, rng, 1, 1)
        a = random_increment(ctx, rng, 0, 2)
        T = random_increment(ctx, rng, 0, 2)
        try:
            sub = scaling_identity_check(f, pt, a, T)
        except PrecisionExhausted:
            report.record_indeterminate()
            continue
        report.samples += sub.samples
        report.failures.extend(sub.failures)
    return report


def restriction_suite(
    ctx: FieldContext, seed: int, cases: int = 60, max_order: int = 3
) -> CheckReport:
    rng = Random(seed)
    report = CheckReport("restriction")
    corpus = standard_corpus(ctx, rng, 1, size=4)
    for case in range(cases):
        f = corpus[case % len(corpus)]
        n = 1 + case % max_order
        pt = random_phi_point(ctx, rng, 1, n)
        try:
            lhs = upsilon(f, embed_phi_point(pt))
            rhs = phi(f, pt)
        except PrecisionExhausted:
            report.record_indeterminate()
            continue
        report.record(pt.to_json(), lhs, rhs)
    return report


def sup_bound_suite(
    ctx: FieldContext,
    seed: int,
    polynomials: int = 20,
    samples_total: int = 1000,
    max_order: int = 3,
) -> CheckReport:
    rng = Random(seed)
    report = CheckReport("sup_bound")
    per_poly = max(1, samples_total // polynomials)
    for _ in range(polynomials):
        u = random_poly(ctx, rng, degree_max=4)
        points = []
        for i in range(per_poly):
            q = 1 + i % max_order
            points.append(random_upsilon_point(ctx, rng, 1, q))
        try:
            outcome = upsilon_sup_bound_check(u, points)
        except PrecisionExhausted:
            report.record_indeterminate()
            continue
        report.samples += outcome["samples"]
        if not outcome["passed"]:
            report.failures.extend(outcome["failures"])
    return report


def chain_suite(ctx: FieldContext, seed: int, cases: int = 50) -> CheckReport:
    rng = Random(seed)
    report = CheckReport("chain")
    for case in range(cases):
        m = 1 + case % 3
        f = Poly(random_poly(ctx, rng, degree_max=3, m=m))
        u = polynomial_curve(
            [
                random_integral_vector(ctx, rng, m)
                for _ in range(rng.randrange(2, 4))
            ]
        )
        for n in (1, 2):
            pt = random_phi_point(ctx, rng, 1, n)
            try:
                lhs = chain_phi_low(f, u, pt)
                rhs = compose_then_phi(f, u, pt)
            except PrecisionExhausted:
                report.record_indeterminate()
                continue
            report.record(pt.to_json(), lhs, rhs)
    return report


def rank_suite(
    ctx: FieldContext, seed: int, rows: int = 18
) -> CheckReport:
    rng = Random(seed)
    report = CheckReport("rank")
    for b in (1, 2):
        corpus = standard_corpus(ctx, rng, b, size=3)
        for n in (1, 2):
            bound = rank_bound(b, n)
            for f in corpus:
                grid = [
                    (
                        random_integral_vector(ctx, rng, b),
                        tuple(random_increment(ctx, rng, 0, 2) for _ in range(n)),
                    )
                    for _ in range(rows)
                ]
                try:
                    r = directional_span_rank(f, n, b, grid)
                except IndeterminateRank:
                    report.record_indeterminate()
                    continue
                report.samples += 1
                if r > bound:
                    report.failures.append(
                        {"b": b, "n": n, "rank": r, "bound": bound}
                    )
    return report


def rank_of(ctx: FieldContext, f: FunctionExpr, b: int, n: int, seed: int, rows: int = 18):
    rng = Random(seed)
    grid = [
        (
            random_integral_vector(ctx, rng, b),
            tuple(random_increment(ctx, rng, 0, 2) for _ in range(n)),
        )
        for _ in range(rows)
    ]
    return directional_span_rank(f, n, b, grid)


_SUITE_RUNNERS = {
    "leibniz": lambda ctx, seed, sizes, fault: leibniz_suite(
        ctx, seed, cases=sizes.get("leibniz", 40), inject_fault=fault
    ),
    "scaling": lambda ctx, seed, sizes, fault: scaling_suite(
        ctx, seed + 1, cases=sizes.get("scaling", 40)
    ),
    "symmetry": lambda ctx, seed, sizes, fault: symmetry_suite(
        ctx, seed + 2, cases=sizes.get("symmetry", 40)
    ),
    "closed_form": lambda ctx, seed, sizes, fault: closed_form_suite(
        ctx,
        seed + 3,
        phi_cases=sizes.get("closed_form", 80),
        upsilon_cases=sizes.get("closed_form_upsilon", 40),
    ),
    "restriction": lambda ctx, seed, sizes, fault: restriction_suite(
        ctx, seed + 4, cases=sizes.get("restriction", 40)
    ),
    "rank": lambda ctx, seed, sizes, fault: rank_suite(ctx, seed + 5),
    "sup_bound": lambda ctx, seed, sizes, fault: sup_bound_suite(
        ctx, seed + 6, samples_total=sizes.get("sup_bound", 400)
    ),
    "chain": lambda ctx, seed, sizes, fault: chain_suite(
        ctx, seed + 7, cases=sizes.get("chain", 30)
    ),
}


def run_checks(
    ctx: FieldContext,
    seed: int,
    checks: Sequence[str] | None = None,
    sizes: dict | None = None,
    inject_fault: bool = False,
) -> dict:
    """Run the selected identity suites and gather their reports."""
    sizes = sizes or {}
    selected = list(checks) if checks else list(ALL_CHECKS)
    unknown = [c for c in selected if c not in _SUITE_RUNNERS]
    if unknown:
        raise ValueError(f"unknown checks: {unknown}")
    reports = {}
    for name in selected:
        reports[name] = _SUITE_RUNNERS[name](ctx, seed, sizes, inject_fault)
    return reports
