"""Cross-check the quotient towers against symbolic expansion.

An independent oracle: the nested quotients of monomials are computed
symbolically from the raw definition (substitute, subtract, divide by
the increment, cancel) and compared with the engine's evaluators on
random rational points.  Agreement on many more points than the degree
certifies the polynomial identity, so any systematic convention error
in the engine's recursion or closed forms would surface here.
"""

from fractions import Fraction
from random import Random

import pytest

sympy = pytest.importorskip("sympy")

from ultracalc.engine import PhiPoint, UpsilonPoint, phi, phi_poly_closed, upsilon
from ultracalc.field import FieldContext, Prime
from ultracalc.functions import MultiPolynomial, Poly

CTX = FieldContext(Prime(5))


def _symbolic_phi(degree: int, order: int):
    x = sympy.Symbol("x")
    vs = sympy.symbols(f"v1:{order + 1}")
    ts = sympy.symbols(f"t1:{order + 1}")
    expr = x**degree
    for k in range(order):
        shifted = expr.subs(x, x + vs[k] * ts[k])
        expr = sympy.cancel((shifted - expr) / ts[k])
    return x, vs, ts, sympy.expand(expr)


def test_partial_tower_matches_symbolic_definition():
    rng = Random(3)
    for degree in (1, 2, 3, 4):
        mono = MultiPolynomial.univariate(
            [CTX.zero_vector(1)] * degree + [CTX.vector([1])]
        )
        for order in (1, 2, 3):
            x, vs, ts, sym = _symbolic_phi(degree, order)
            for _ in range(4):
                subs = {x: Fraction(rng.randrange(-9, 10))}
                for s in vs:
                    subs[s] = Fraction(rng.randrange(-9, 10))
                for s in ts:
                    subs[s] = Fraction(rng.randrange(1, 12))
                expected = sym.subs(
                    {k: sympy.Rational(v) for k, v in subs.items()}
                )
                pt = PhiPoint(
                    CTX.vector([subs[x]]),
                    tuple(CTX.vector([subs[s]]) for s in vs),
                    tuple(CTX.scalar(subs[s]) for s in ts),
                )
                got = phi(Poly(mono), pt).scalar()
                want = CTX.scalar(Fraction(int(expected.p), int(expected.q)))
                assert got == want, (degree, order, subs)
                assert phi_poly_closed(mono, pt).scalar() == want


def test_full_tower_matches_symbolic_definition_order_two():
    # symbolic second full quotient: the whole argument triple moves
    x, v0, t1 = sympy.symbols("x v0 t1")
    v11, v12, v13, t2 = sympy.symbols("v11 v12 v13 t2")
    rng = Random(5)
    for degree in (2, 3, 4):
        first = sympy.cancel(((x + v0 * t1) ** degree - x**degree) / t1)
        moved = first.subs(
            {x: x + v11 * t2, v0: v0 + v12 * t2, t1: t1 + v13 * t2},
            simultaneous=True,
        )
        second = sympy.expand(sympy.cancel((moved - first) / t2))
        mono = MultiPolynomial.univariate(
            [CTX.zero_vector(1)] * degree + [CTX.vector([1])]
        )
        for _ in range(5):
            vals = {
                x: Fraction(rng.randrange(-9, 10)),
                v0: Fraction(rng.randrange(-9, 10)),
                v11: Fraction(rng.randrange(-9, 10)),
                v12: Fraction(rng.randrange(-9, 10)),
                v13: Fraction(rng.randrange(0, 9)),
                t1: Fraction(rng.randrange(1, 9)),
                t2: Fraction(rng.randrange(1, 9)),
            }
            expected = second.subs(
                {k: sympy.Rational(v) for k, v in vals.items()}
            )
            pt = UpsilonPoint.node(
                UpsilonPoint.node(
                    UpsilonPoint.leaf(CTX.vector([vals[x]])),
                    UpsilonPoint.leaf(CTX.vector([vals[v0]])),
                    CTX.scalar(vals[t1]),
                ),
                UpsilonPoint.node(
                    UpsilonPoint.leaf(CTX.vector([vals[v11]])),
                    UpsilonPoint.leaf(CTX.vector([vals[v12]])),
                    CTX.scalar(vals[v13]),
                ),
                CTX.scalar(vals[t2]),
            )
            got = upsilon(Poly(mono), pt).scalar()
            want = CTX.scalar(Fraction(int(expected.p), int(expected.q)))
            assert got == want, (degree, vals)
