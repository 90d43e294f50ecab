"""Exact polynomial calculus and quaternion arithmetic.

Polynomials carry exact rational coefficients (``int`` when integral,
``fractions.Fraction`` otherwise) keyed by exponent tuples.  Vector fields
are derivations with polynomial coefficients; differential operators are
linear combinations of compositions of vector fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Rational = Fraction
Number = Union[int, Fraction]


class DimensionError(ValueError):
    """Operands live over different coordinate systems."""


def _norm(c) -> Number:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, float):
        raise TypeError("floats are not exact; pass a Fraction or int")
    return _norm(Fraction(c))


def coordinate_names(dim: int, prefix: str = "x") -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(dim))


def _grlex_key(exp: tuple[int, ...]):
    # graded lex with the first variable largest
    return (sum(exp), exp)


class Poly:
    """Multivariate polynomial with exact rational coefficients."""

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, Number] | None = None):
        self.variables = tuple(variables)
        clean = {}
        if terms:
            n = len(self.variables)
            for exp, c in terms.items():
                if len(exp) != n:
                    raise DimensionError(f"exponent {exp} does not match {n} variables")
                c = _norm(c)
                if c != 0:
                    clean[tuple(exp)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict) -> "Poly":
        p = object.__new__(cls)
        p.variables = variables
        p.terms = terms
        p._hash = None
        return p

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Poly":
        return cls(variables)

    @classmethod
    def constant(cls, variables: Sequence[str], c: Number) -> "Poly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables: Sequence[str], i: int | str, c: Number = 1) -> "Poly":
        variables = tuple(variables)
        if isinstance(i, str):
            i = variables.index(i)
        exp = [0] * len(variables)
        exp[i] = 1
        return cls(variables, {tuple(exp): c})

    @classmethod
    def monomial(cls, variables: Sequence[str], exp: Sequence[int], c: Number = 1) -> "Poly":
        return cls(variables, {tuple(exp): c})

    # basic queries --------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Number:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, 0)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Number]]:
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def _check(self, other: "Poly") -> None:
        if self.variables != other.variables:
            raise DimensionError(f"variable mismatch: {self.variables} vs {other.variables}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(self.variables, _norm(other))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = _norm(s)
            else:
                out.pop(e, None)
        return Poly._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = _norm(other)
            if c == 0:
                return Poly._raw(self.variables, {})
            return Poly._raw(self.variables, {e: _norm(v * c) for e, v in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._raw(self.variables, {e: _norm(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * self.nvars: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    # calculus -------------------------------------------------------------
    def diff(self, i: int | str) -> "Poly":
        if isinstance(i, str):
            i = self.variables.index(i)
        out: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly._raw(self.variables, out)

    def evaluate(self, point: Sequence):
        """Evaluate at a point; exact for rational input, float for float input."""
        if len(point) != self.nvars:
            raise DimensionError("point has wrong length")
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorised float evaluation over an ``(m, nvars)`` array."""
        points = np.asarray(points, dtype=float)
        out = np.zeros(points.shape[0])
        for e, c in self.terms.items():
            term = np.full(points.shape[0], float(c))
            for i, k in enumerate(e):
                if k:
                    term = term * points[:, i] ** k
            out += term
        return out

    def substitute(self, images: Sequence["Poly"]) -> "Poly":
        """Compose: replace variable i by ``images[i]`` (all over a common ring)."""
        if len(images) != self.nvars:
            raise DimensionError("need one image per variable")
        target = images[0].variables
        for im in images:
            if im.variables != target:
                raise DimensionError("images must share variables")
        powers: dict[tuple[int, int], Poly] = {}

        def pw(i: int, k: int) -> Poly:
            if (i, k) not in powers:
                powers[(i, k)] = images[i] ** k
            return powers[(i, k)]

        result = Poly.zero(target)
        for e, c in self.terms.items():
            term = Poly.constant(target, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            result = result + term
        return result

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            if mono:
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{c}*{mono}")
            else:
                parts.append(str(c))
        return " + ".join(parts).replace("+ -", "- ")


def radius_squared(variables: Sequence[str]) -> Poly:
    """r^2 = sum of squares of all ambient coordinates."""
    variables = tuple(variables)
    n = len(variables)
    terms = {}
    for i in range(n):
        e = [0] * n
        e[i] = 2
        terms[tuple(e)] = 1
    return Poly(variables, terms)


@lru_cache(maxsize=64)
def _one_minus_tail_power(variables: tuple[str, ...], k: int) -> Poly:
    # (1 - sum_{i>=1} x_i^2)^k
    n = len(variables)
    tail = Poly.constant(variables, 1)
    for i in range(1, n):
        e = [0] * n
        e[i] = 2
        tail = tail - Poly.monomial(variables, e)
    return tail**k


def reduce_mod_sphere(f: Poly) -> Poly:
    """Normal form of ``f`` modulo the ideal (r^2 - 1).

    Under graded lex with x0 largest, ``r^2 - 1`` is a Groebner basis with
    leading monomial x0^2, so the remainder has x0-degree at most 1.
    """
    n = f.nvars
    if n == 0:
        return f
    out: dict = {}
    for e, c in f.terms.items():
        k, b = divmod(e[0], 2)
        base = (b,) + e[1:]
        if k == 0:
            out[base] = out.get(base, 0) + c
            continue
        for e2, c2 in _one_minus_tail_power(f.variables, k).terms.items():
            ne = (b,) + tuple(a + d for a, d in zip(e[1:], e2[1:]))
            out[ne] = out.get(ne, 0) + c * c2
    return Poly._raw(f.variables, {e: _norm(c) for e, c in out.items() if c})


class PolyVectorField:
    """Derivation sum_i coefficients[i] * d/dx_i with polynomial coefficients."""

    __slots__ = ("variables", "coefficients", "name")

    def __init__(self, coefficients: Sequence[Poly], name: str | None = None):
        coefficients = tuple(coefficients)
        if not coefficients:
            raise DimensionError("a vector field needs at least one coefficient")
        variables = coefficients[0].variables
        for c in coefficients:
            if c.variables != variables:
                raise DimensionError("coefficient variable lists differ")
        if len(coefficients) != len(variables):
            raise DimensionError(
                f"{len(coefficients)} coefficients for {len(variables)} coordinates"
            )
        self.variables = variables
        self.coefficients = coefficients
        self.name = name

    @classmethod
    def from_linear(cls, variables: Sequence[str], rows: Sequence[Mapping[int, Number]],
                    name: str | None = None) -> "PolyVectorField":
        """Build a field whose i-th coefficient is sum_j rows[i][j] * x_j."""
        variables = tuple(variables)
        coeffs = []
        for row in rows:
            p = Poly.zero(variables)
            for j, c in row.items():
                p = p + Poly.var(variables, j, c)
            coeffs.append(p)
        return cls(coeffs, name)

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "PolyVectorField":
        return cls([Poly.zero(variables) for _ in variables])

    @property
    def dim(self) -> int:
        return len(self.coefficients)

    def __call__(self, f: Poly) -> Poly:
        return apply_derivation(self, f)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def _check(self, other: "PolyVectorField") -> None:
        if self.variables != other.variables:
            raise DimensionError("vector fields over different coordinates")

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        self._check(other)
        return PolyVectorField([a + b for a, b in zip(self.coefficients, other.coefficients)])

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        self._check(other)
        return PolyVectorField([a - b for a, b in zip(self.coefficients, other.coefficients)])

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField([-a for a in self.coefficients])

    def scale(self, factor) -> "PolyVectorField":
        """Multiply by a scalar or by a polynomial function."""
        return PolyVectorField([a * factor for a in self.coefficients])

    def __mul__(self, factor) -> "PolyVectorField":
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.variables == other.variables and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def dot(self, other: "PolyVectorField") -> Poly:
        """Pointwise Euclidean inner product as a polynomial."""
        self._check(other)
        total = Poly.zero(self.variables)
        for a, b in zip(self.coefficients, other.coefficients):
            total = total + a * b
        return total

    def pair(self, poly_vector: Sequence[Poly]) -> Poly:
        total = Poly.zero(self.variables)
        for a, b in zip(self.coefficients, poly_vector):
            total = total + a * b
        return total

    def evaluate(self, point: Sequence) -> list:
        return [c.evaluate(point) for c in self.coefficients]

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Float values at many points, shape ``(m, dim)``."""
        return np.stack([c.evaluate_many(points) for c in self.coefficients], axis=1)

    def linear_matrix(self) -> np.ndarray:
        """Coefficient matrix A with X(x) = A x; only for linear fields."""
        n = self.dim
        A = np.zeros((n, n))
        for i, c in enumerate(self.coefficients):
            for e, v in c.terms.items():
                if sum(e) != 1:
                    raise ValueError("field is not linear")
                A[i, e.index(1)] = float(v)
        return A

    def __repr__(self) -> str:
        label = self.name or "PolyVectorField"
        return f"{label}({', '.join(map(repr, self.coefficients))})"


def apply_derivation(X: PolyVectorField, f: Poly) -> Poly:
    """L_X f = sum_i X_i * df/dx_i."""
    if X.variables != f.variables:
        raise DimensionError("field and polynomial use different variables")
    out: dict = {}
    for i, ci in enumerate(X.coefficients):
        if not ci.terms:
            continue
        for e, c in f.terms.items():
            k = e[i]
            if not k:
                continue
            base = e[:i] + (k - 1,) + e[i + 1:]
            ck = c * k
            for e2, c2 in ci.terms.items():
                ne = tuple(a + b for a, b in zip(base, e2))
                out[ne] = out.get(ne, 0) + ck * c2
    return Poly._raw(f.variables, {e: _norm(c) for e, c in out.items() if c})


def lie_bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """[X, Y] with components X(Y_i) - Y(X_i)."""
    if X.variables != Y.variables:
        raise DimensionError("vector fields over different coordinates")
    return PolyVectorField(
        [apply_derivation(X, yi) - apply_derivation(Y, xi)
         for xi, yi in zip(X.coefficients, Y.coefficients)]
    )


@dataclass(frozen=True)
class DiffOperator:
    """Linear combination of compositions of vector fields.

    A term ``(c, (A, B, C))`` acts as ``c * A(B(C(f)))``: factors are listed
    left to right as written, so the rightmost factor hits ``f`` first.
    """

    variables: tuple[str, ...]
    terms: tuple[tuple[Number, tuple[PolyVectorField, ...]], ...] = ()

    @classmethod
    def from_terms(cls, variables: Sequence[str],
                   terms: Iterable[tuple[Number, Sequence[PolyVectorField]]]) -> "DiffOperator":
        variables = tuple(variables)
        clean = []
        for c, factors in terms:
            factors = tuple(factors)
            for F in factors:
                if F.variables != variables:
                    raise DimensionError("operator factor over different coordinates")
            c = _norm(c)
            if c:
                clean.append((c, factors))
        return cls(variables, tuple(clean))

    @classmethod
    def sum_of_squares(cls, fields: Sequence[PolyVectorField]) -> "DiffOperator":
        return cls.from_terms(fields[0].variables, [(1, (F, F)) for F in fields])

    @property
    def order(self) -> int:
        return max((len(f) for _, f in self.terms), default=0)

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        if self.variables != other.variables:
            raise DimensionError("operators over different coordinates")
        return DiffOperator(self.variables, self.terms + other.terms)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator(self.variables, tuple((-c, f) for c, f in self.terms))

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """self o other."""
        if self.variables != other.variables:
            raise DimensionError("operators over different coordinates")
        return DiffOperator(
            self.variables,
            tuple((_norm(c1 * c2), f1 + f2) for c1, f1 in self.terms for c2, f2 in other.terms),
        )

    def __call__(self, f: Poly) -> Poly:
        return operator_apply(self, f)


def operator_apply(D: DiffOperator, f: Poly) -> Poly:
    if D.variables != f.variables:
        raise DimensionError("operator and polynomial use different variables")
    total = Poly.zero(f.variables)
    # share work between terms with a common tail of factors
    cache: dict[tuple[int, ...], Poly] = {}
    for c, factors in D.terms:
        g = f
        key: tuple[int, ...] = ()
        for F in reversed(factors):
            key = key + (id(F),)
            if key in cache:
                g = cache[key]
            else:
                g = apply_derivation(F, g)
                cache[key] = g
        total = total + g * c
    return total


def commutator(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    return A.compose(B) - B.compose(A)


# quaternions ----------------------------------------------------------------

@dataclass(frozen=True)
class Quaternion:
    """w + x i + y j + z k (floating point)."""

    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "Quaternion":
        return cls(*(float(v) for v in a))

    def norm(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return quat_mul(self, other)


def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product."""
    return Quaternion.from_array(quat_mul_array(a.as_array(), b.as_array()))


def quat_mul_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product on arrays of shape (..., 4), broadcasting."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def quat_exp_array(a, b, c) -> np.ndarray:
    """exp(a i + b j + c k) for broadcastable arrays; shape (..., 4)."""
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    s = np.sqrt(a * a + b * b + c * c)
    # sin(s)/s with its limit 1 at s = 0
    sinc = np.sinc(s / np.pi)
    return np.stack([np.cos(s), sinc * a, sinc * b, sinc * c], axis=-1)


def quat_exp(a: float, b: float, c: float) -> Quaternion:
    """cos s + sin s (a i + b j + c k)/s with s = |(a, b, c)|; 1 at s = 0."""
    return Quaternion.from_array(quat_exp_array(a, b, c))
