"""Evaluable representations of functions K^m -> K^l and curves K -> K^m.

Functions are closed expression trees rather than opaque closures, so
that polynomial coefficients stay structurally accessible for closed
forms and reports can print what they probed.  Node kinds: exact
multivariate polynomials, clopen-ball indicators (the canonical smooth
bumps of an ultrametric field), pointwise sums and products, value
scaling, argument shifts, affine argument rescaling, composition, and
named gallery constructions registered by other modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import DimensionMismatch, DomainError
from .field import Ball, FieldContext, PadicScalar, PadicVector


def _binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


class MultiPolynomial:
    """Exact polynomial map K^m -> K^l.

    Terms map an exponent multi-index (length m) to a coefficient
    vector (dimension l).  Zero coefficients are dropped on
    construction and evaluation is exact in the rational backend.
    """

    def __init__(self, m: int, l: int, terms: Mapping[tuple, PadicVector]):
        if m < 1 or l < 1:
            raise DimensionMismatch("polynomial dimensions must be >= 1")
        clean = {}
        for exponents, coeff in terms.items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != m:
                raise DimensionMismatch("exponent index length != m")
            if any(e < 0 for e in exponents):
                raise ValueError("negative exponent")
            if coeff.dim != l:
                raise DimensionMismatch("coefficient dimension != l")
            if not coeff.is_zero():
                clean[exponents] = coeff
        self.m = m
        self.l = l
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def univariate(cls, coeffs: Sequence[PadicVector]) -> "MultiPolynomial":
        """Polynomial of one variable; coeffs[i] multiplies x**i."""
        if not coeffs:
            raise ValueError("need at least one coefficient")
        l = coeffs[0].dim
        return cls(1, l, {(i,): c for i, c in enumerate(coeffs)})

    @property
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def coefficient(self, exponents: tuple) -> PadicVector | None:
        return self.terms.get(tuple(exponents))

    def univariate_coeff(self, k: int) -> PadicVector | None:
        if self.m != 1:
            raise DimensionMismatch("not univariate")
        return self.terms.get((k,))

    def max_coeff_norm(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return max(c.norm() for c in self.terms.values())

    def evaluate(self, x: PadicVector) -> PadicVector:
        if x.dim != self.m:
            raise DimensionMismatch(f"expected dim {self.m}, got {x.dim}")
        ctx = x.entries[0].context()
        acc = ctx.zero_vector(self.l)
        for exponents, coeff in self.terms.items():
            mon = ctx.one()
            for xi, e in zip(x.entries, exponents):
                if e:
                    mon = mon * xi**e
            acc = acc + coeff * mon
        return acc

    def evaluate_horner(self, x: PadicVector) -> PadicVector:
        """Independent evaluation order, for cross-checking exactness."""
        if x.dim != self.m:
            raise DimensionMismatch(f"expected dim {self.m}, got {x.dim}")
        ctx = x.entries[0].context()
        return self._horner(x, 0, self.terms, ctx)

    def _horner(self, x, axis, terms, ctx):
        if not terms:
            return ctx.zero_vector(self.l)
        top = max(e[axis] for e in terms)
        acc = ctx.zero_vector(self.l)
        for k in range(top, -1, -1):
            acc = acc * x[axis]
            layer = {e: c for e, c in terms.items() if e[axis] == k}
            if not layer:
                continue
            if axis == self.m - 1:
                for c in layer.values():
                    acc = acc + c
            else:
                acc = acc + self._horner(x, axis + 1, layer, ctx)
        return acc

    def coordinate(self, j: int) -> "MultiPolynomial":
        """The scalar polynomial giving output coordinate j."""
        terms = {}
        for e, c in self.terms.items():
            terms[e] = PadicVector([c[j]])
        return MultiPolynomial(self.m, 1, terms)

    def first_quotient_coord(
        self, z: PadicVector, j: int, tau: PadicScalar
    ) -> PadicVector:
        """Difference quotient in coordinate j, total in the increment.

        Evaluates [f(z + tau*e_j) - f(z)]/tau through the termwise
        expansion, which stays defined at tau = 0 where it returns the
        j-th partial derivative.
        """
        ctx = z.entries[0].context()
        acc = ctx.zero_vector(self.l)
        for exponents, coeff in self.terms.items():
            ej = exponents[j]
            if ej == 0:
                continue
            rest = ctx.one()
            for i, e in enumerate(exponents):
                if i != j and e:
                    rest = rest * z[i]**e
            inner = ctx.zero()
            for k in range(1, ej + 1):
                term = ctx.scalar(_binomial(ej, k)) * z[j] ** (ej - k)
                if k > 1:
                    term = term * tau ** (k - 1)
                inner = inner + term
            acc = acc + coeff * (rest * inner)
        return acc

    def scaled(self, factor: PadicScalar) -> "MultiPolynomial":
        return MultiPolynomial(
            self.m, self.l, {e: c * factor for e, c in self.terms.items()}
        )

    def perturbed(self, delta: PadicScalar) -> "MultiPolynomial":
        """Copy with one coefficient nudged; used for fault injection."""
        terms = dict(self.terms)
        if terms:
            key = sorted(terms)[0]
            bumped = PadicVector(
                [terms[key][0] + delta, *terms[key].entries[1:]]
            )
            terms[key] = bumped
        else:
            ctx = delta.context()
            terms[(0,) * self.m] = PadicVector(
                [delta] + [ctx.zero()] * (self.l - 1)
            )
        return MultiPolynomial(self.m, self.l, terms)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "l": self.l,
            "terms": [
                {"exp": list(e), "coeff": c.to_json()} for e, c in self.terms.items()
            ],
        }

    def __repr__(self) -> str:
        return f"MultiPolynomial(m={self.m}, l={self.l}, terms={len(self.terms)})"


class FunctionExpr:
    """Base node of the expression tree."""

    input_dim: int
    output_dim: int

    def evaluate(self, x: PadicVector) -> PadicVector:
        raise NotImplementedError

    def children(self) -> tuple:
        return ()

    def to_json(self) -> dict:
        raise NotImplementedError

    def _check_input(self, x: PadicVector) -> None:
        if x.dim != self.input_dim:
            raise DimensionMismatch(
                f"{type(self).__name__} expects dim {self.input_dim}, got {x.dim}"
            )

    def __call__(self, x: PadicVector) -> PadicVector:
        return self.evaluate(x)


class Poly(FunctionExpr):
    def __init__(self, polynomial: MultiPolynomial):
        self.polynomial = polynomial
        self.input_dim = polynomial.m
        self.output_dim = polynomial.l

    def evaluate(self, x: PadicVector) -> PadicVector:
        self._check_input(x)
        return self.polynomial.evaluate(x)

    def to_json(self) -> dict:
        return {"kind": "poly", "polynomial": self.polynomial.to_json()}

    def __repr__(self) -> str:
        return f"Poly({self.polynomial!r})"


class BallIndicator(FunctionExpr):
    """1 inside the ball, 0 outside; smooth because the ball is clopen."""

    def __init__(self, ball: Ball):
        self.ball = ball
        self.input_dim = ball.dim
        self.output_dim = 1

    def evaluate(self, x: PadicVector) -> PadicVector:
        self._check_input(x)
        ctx = x.entries[0].context()
        inside = self.ball.contains(x)
        return PadicVector([ctx.one() if inside else ctx.zero()])

    def stability_radius(self, x: PadicVector) -> Fraction:
        """A radius on which the indicator is constant around x."""
        d = (x - self.ball.center).norm()
        if d <= self.ball.radius:
            return self.ball.radius
        return d / self.ball.center.entries[0].prime.p

    def to_json(self) -> dict:
        return {"kind": "ball_indicator", "ball": self.ball.to_json()}

    def __repr__(self) -> str:
        return f"BallIndicator(r_exp={self.ball.radius_exponent})"


class Sum(FunctionExpr):
    def __init__(self, *parts: FunctionExpr):
        if not parts:
            raise ValueError("empty sum")
        dims = {(f.input_dim, f.output_dim) for f in parts}
        if len(dims) != 1:
            raise DimensionMismatch("summands disagree in dimension")
        self.parts = tuple(parts)
        self.input_dim, self.output_dim = dims.pop()

    def evaluate(self, x: PadicVector) -> PadicVector:
        self._check_input(x)
        acc = self.parts[0].evaluate(x)
        for f in self.parts[1:]:
            acc = acc + f.evaluate(x)
        return acc

    def children(self):
        return self.parts

    def to_json(self) -> dict:
        return {"kind": "sum", "parts": [f.to_json() for f in self.parts]}


class Product(FunctionExpr):
    """Pointwise product of scalar-valued functions."""

    def __init__(self, *parts: FunctionExpr):
        if not parts:
            raise ValueError("empty product")
        if any(f.output_dim != 1 for f in parts):
            raise DimensionMismatch("product factors must be scalar valued")
        if len({f.input_dim for f in parts}) != 1:
            raise DimensionMismatch("product factors disagree in input dim")
        self.parts = tuple(parts)
        self.input_dim = parts[0].input_dim
        self.output_dim = 1

    def evaluate(self, x: PadicVector) -> PadicVector:
        self._check_input(x)
        acc = self.parts[0].evaluate(x).scalar()
        for f in self.parts[1:]:
            acc = acc * f.evaluate(x).scalar()
        return PadicVector([acc])

    def children(self):
        return self.parts

    def to_json(self) -> dict:
        return {"kind": "product", "parts": [f.to_json() for f in self.parts]}


class Scale(FunctionExpr):
    """x -> a * f(x)."""

    def __init__(self, factor: PadicScalar, inner: FunctionExpr):
        self.factor = factor
        self.inner = inner
        self.input_dim = inner.input_dim
        self.output_dim = inner.output_dim

    def evaluate(self, x: PadicVector) -> PadicVector:
        return self.inner.evaluate(x) * self.factor

    def children(self):
        return (self.inner,)

    def to_json(self) -> dict:
        return {
            "kind": "scale",
            "factor": self.factor.to_json(),
            "inner": self.inner.to_json(),
        }


class Shift(FunctionExpr):
    """x -> f(x - c)."""

    def __init__(self, offset: PadicVector, inner: FunctionExpr):
        if offset.dim != inner.input_dim:
            raise DimensionMismatch("shift offset dim != input dim")
        self.offset = offset
        self.inner = inner
        self.input_dim = inner.input_dim
        self.output_dim = inner.output_dim

    def evaluate(self, x: PadicVector) -> PadicVector:
        self._check_input(x)
        return self.inner.evaluate(x - self.offset)

    def children(self):
        return (self.inner,)

    def to_json(self) -> dict:
        return {
            "kind": "shift",
            "offset": self.offset.to_json(),
            "inner": self.inner.to_json(),
        }


class AffinePrecompose(FunctionExpr):
    """x -> f((x - c) / T)."""

    def __init__(self, center: PadicVector, scale: PadicScalar, inner: FunctionExpr):
        if center.dim != inner.input_dim:
            raise DimensionMismatch("center dim != input dim")
        if scale.is_zero():
            raise ValueError("affine precompose needs a nonzero scale")
        self.center = center
        self.scale = scale
        self.inner = inner
        self.input_dim = inner.input_dim
        self.output_dim = inner.output_dim

    def evaluate(self, x: PadicVector) -> PadicVector:
        self._check_input(x)
        return self.inner.evaluate((x - self.center) / self.scale)

    def children(self):
        return (self.inner,)

    def to_json(self) -> dict:
        return {
            "kind": "affine_precompose",
            "center": self.center.to_json(),
            "scale": self.scale.to_json(),
            "inner": self.inner.to_json(),
        }


class Compose(FunctionExpr):
    """x -> outer(inner(x))."""

    def __init__(self, outer: FunctionExpr, inner: FunctionExpr):
        if inner.output_dim != outer.input_dim:
            raise DimensionMismatch(
                f"cannot compose: inner gives dim {inner.output_dim}, "
                f"outer takes dim {outer.input_dim}"
            )
        self.outer = outer
        self.inner = inner
        self.input_dim = inner.input_dim
        self.output_dim = outer.output_dim

    def evaluate(self, x: PadicVector) -> PadicVector:
        self._check_input(x)
        return self.outer.evaluate(self.inner.evaluate(x))

    def children(self):
        return (self.outer, self.inner)

    def to_json(self) -> dict:
        return {
            "kind": "compose",
            "outer": self.outer.to_json(),
            "inner": self.inner.to_json(),
        }


class GalleryFn(FunctionExpr):
    """Named construction with an injected evaluator."""

    def __init__(
        self,
        name: str,
        input_dim: int,
        output_dim: int,
        fn: Callable[[PadicVector], PadicVector],
        params: dict | None = None,
    ):
        self.name = name
        self.input_dim = input_dim
        self.output_dim = output_dim
        self.fn = fn
        self.params = dict(params or {})

    def evaluate(self, x: PadicVector) -> PadicVector:
        self._check_input(x)
        return self.fn(x)

    def to_json(self) -> dict:
        return {"kind": "gallery", "name": self.name, "params": self.params}

    def __repr__(self) -> str:
        return f"GalleryFn({self.name!r})"


@dataclass(frozen=True)
class Curve:
    """A function K -> K^m with a declared smoothness tag."""

    expr: FunctionExpr
    tag: str = "polynomial"

    _TAGS = ("polynomial", "locally-analytic", "patchwork", "locally-constant")

    def __post_init__(self) -> None:
        if self.expr.input_dim != 1:
            raise DimensionMismatch("curves take a one-dimensional parameter")
        if self.tag not in self._TAGS:
            raise ValueError(f"unknown curve tag: {self.tag}")
        if self.tag == "patchwork" and not isinstance(self.expr, GalleryFn):
            raise ValueError("patchwork curves only come from the gallery")

    @property
    def output_dim(self) -> int:
        return self.expr.output_dim

    def at(self, t: PadicScalar) -> PadicVector:
        return self.expr.evaluate(PadicVector([t]))

    def to_json(self) -> dict:
        return {"tag": self.tag, "expr": self.expr.to_json()}


def evaluate(f: FunctionExpr, x: PadicVector) -> PadicVector:
    """Evaluate an expression tree at a point."""
    return f.evaluate(x)


def compose(f: FunctionExpr, u) -> FunctionExpr:
    """Compose f with a curve or another expression."""
    inner = u.expr if isinstance(u, Curve) else u
    return Compose(f, inner)


def polynomial_curve(coeffs: Sequence[PadicVector], tag: str = "polynomial") -> Curve:
    """Curve t -> sum(coeffs[i] * t**i); exactly evaluable."""
    return Curve(Poly(MultiPolynomial.univariate(coeffs)), tag)


def affine_curve(a: PadicVector, b: PadicVector) -> Curve:
    """Curve t -> b + t*a."""
    return polynomial_curve([b, a])


def constant(ctx: FieldContext, value: PadicVector, input_dim: int) -> FunctionExpr:
    poly = MultiPolynomial(input_dim, value.dim, {(0,) * input_dim: value})
    return Poly(poly)


def identity(ctx: FieldContext, dim: int) -> FunctionExpr:
    terms = {}
    for j in range(dim):
        e = tuple(1 if i == j else 0 for i in range(dim))
        terms[e] = ctx.basis_vector(dim, j)
    return Poly(MultiPolynomial(dim, dim, terms))


# -- gallery registry --------------------------------------------------------

_GALLERY: dict[str, Callable[..., FunctionExpr]] = {}


def register_gallery(name: str, builder: Callable[..., FunctionExpr]) -> None:
    _GALLERY[name] = builder


def gallery_names() -> list[str]:
    return sorted(_GALLERY)


def build_gallery(name: str, ctx: FieldContext, **params) -> FunctionExpr:
    if name not in _GALLERY:
        raise DomainError(f"unknown gallery item: {name}")
    return _GALLERY[name](ctx, **params)


# -- JSON expression grammar --------------------------------------------------


def expr_from_json(ctx: FieldContext, data: dict) -> FunctionExpr:
    kind = data.get("kind")
    if kind == "poly":
        pd = data["polynomial"]
        terms = {
            tuple(t["exp"]): PadicVector(
                [ctx.scalar_from_json(s) for s in t["coeff"]]
            )
            for t in pd["terms"]
        }
        return Poly(MultiPolynomial(pd["m"], pd["l"], terms))
    if kind == "ball_indicator":
        bd = data["ball"]
        center = PadicVector([ctx.scalar_from_json(s) for s in bd["center"]])
        return BallIndicator(Ball(center, bd["radius_exponent"]))
    if kind == "sum":
        return Sum(*[expr_from_json(ctx, part) for part in data["parts"]])
    if kind == "product":
        return Product(*[expr_from_json(ctx, part) for part in data["parts"]])
    if kind == "scale":
        return Scale(
            ctx.scalar_from_json(data["factor"]), expr_from_json(ctx, data["inner"])
        )
    if kind == "shift":
        offset = PadicVector([ctx.scalar_from_json(s) for s in data["offset"]])
        return Shift(offset, expr_from_json(ctx, data["inner"]))
    if kind == "affine_precompose":
        center = PadicVector([ctx.scalar_from_json(s) for s in data["center"]])
        return AffinePrecompose(
            center,
            ctx.scalar_from_json(data["scale"]),
            expr_from_json(ctx, data["inner"]),
        )
    if kind == "compose":
        return Compose(
            expr_from_json(ctx, data["outer"]), expr_from_json(ctx, data["inner"])
        )
    if kind == "gallery":
        return build_gallery(data["name"], ctx, **data.get("params", {}))
    raise DomainError(f"unknown expression kind: {kind}")
