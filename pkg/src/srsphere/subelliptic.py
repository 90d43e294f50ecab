"""Sub-Laplacians on S^3 and S^7 as exact matrices on polynomials mod (r^2 - 1).

Operators built from the tangent frame fields preserve the sphere ideal, so
they descend to the quotient ring.  Truncating by degree gives a finite
exact matrix; everything here stays in integers/Fractions until the heat
report, which converts to floats only for the matrix exponentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .algebra import (
    DiffOperator,
    Poly,
    PolyVectorField,
    apply_derivation,
    commutator,
    lie_bracket,
    radius_squared,
    reduce_mod_sphere,
)
from .checks import Check, INFO, exact, numeric
from .frames import build_s3_frame, s7_fields

SPACES = ("s3", "s7")
CHART_TOL = 1e-6


# frames and operators -----------------------------------------------------------

def full_frame(space: str) -> tuple[tuple[PolyVectorField, ...], tuple[PolyVectorField, ...]]:
    """(vertical, horizontal) orthonormal frame of the given sphere."""
    if space == "s7":
        fields = s7_fields()
        return fields[:1], fields[1:]
    if space == "s3":
        fr = build_s3_frame()
        return fr.vertical, fr.horizontal
    raise ValueError(f"unknown space {space!r}; expected one of {SPACES}")


def build_sublaplacian(space: str) -> DiffOperator:
    """Sum of squares of the horizontal frame."""
    _, horizontal = full_frame(space)
    return DiffOperator.sum_of_squares(horizontal)


def vertical_square(space: str) -> DiffOperator:
    vertical, _ = full_frame(space)
    return DiffOperator.sum_of_squares(vertical)


def laplace_beltrami(space: str) -> DiffOperator:
    vertical, horizontal = full_frame(space)
    return DiffOperator.sum_of_squares(vertical + horizontal)


def divergence_corrections(space: str) -> list[Poly]:
    """c_r = sum_s <X_s, [X_r, X_s]> mod the sphere, one per horizontal field."""
    vertical, horizontal = full_frame(space)
    frame = vertical + horizontal
    out = []
    for Xr in horizontal:
        c = Poly.zero(Xr.variables)
        for Xs in frame:
            c = c + Xs.dot(lie_bracket(Xr, Xs))
        out.append(reduce_mod_sphere(c))
    return out


def sublaplacian_via_popp(space: str) -> DiffOperator:
    """Sum of squares plus the first-order divergence terms c_r X_r."""
    _, horizontal = full_frame(space)
    D = DiffOperator.sum_of_squares(horizontal)
    first_order = [(1, (Xr.scale(c),)) for Xr, c in zip(horizontal, divergence_corrections(space))
                   if not c.is_zero()]
    return D + DiffOperator.from_terms(D.variables, first_order)


# quotient space --------------------------------------------------------------------

@dataclass(frozen=True)
class QuotientBasis:
    """Monomials of degree <= d with x0-exponent <= 1, grouped by degree."""

    nvars: int
    degree: int
    monomials: tuple[tuple[int, ...], ...] = field(init=False)
    index: dict = field(init=False, repr=False, compare=False)
    degree_slices: tuple[slice, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        mons = []
        slices = []
        for k in range(self.degree + 1):
            start = len(mons)
            block = []
            for b in (0, 1):
                if k - b < 0:
                    continue
                for rest in _compositions(k - b, self.nvars - 1):
                    block.append((b,) + rest)
            block.sort(reverse=True)
            mons += block
            slices.append(slice(start, len(mons)))
        object.__setattr__(self, "monomials", tuple(mons))
        object.__setattr__(self, "index", {m: i for i, m in enumerate(mons)})
        object.__setattr__(self, "degree_slices", tuple(slices))

    def __len__(self) -> int:
        return len(self.monomials)

    def variables(self) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(self.nvars))

    def poly(self, i: int) -> Poly:
        return Poly.monomial(self.variables(), self.monomials[i])

    def coordinates(self, f: Poly) -> dict[int, object]:
        """Sparse coordinates of an already reduced polynomial."""
        out = {}
        for e, c in f.terms.items():
            if e not in self.index:
                raise ValueError(f"monomial {e} outside the quotient basis")
            out[self.index[e]] = c
        return out

    @staticmethod
    def expected_size(nvars: int, degree: int) -> int:
        return sum(math.comb(k + nvars - 2, nvars - 2) + (math.comb(k + nvars - 3, nvars - 2) if k else 0)
                   for k in range(degree + 1))


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


@dataclass
class OperatorMatrix:
    """Exact sparse matrix: ``columns[j]`` maps row index to coefficient."""

    basis: QuotientBasis
    columns: list[dict]

    @property
    def shape(self) -> tuple[int, int]:
        n = len(self.basis)
        return n, n

    def _same(self, other: "OperatorMatrix") -> None:
        if other.basis != self.basis:
            raise ValueError("matrices over different quotient bases")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._same(other)
        cols = []
        for a, b in zip(self.columns, other.columns):
            c = dict(a)
            for i, v in b.items():
                s = c.get(i, 0) + v
                if s:
                    c[i] = s
                else:
                    c.pop(i, None)
            cols.append(c)
        return OperatorMatrix(self.basis, cols)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, [{i: -v for i, v in c.items()} for c in self.columns])

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self + (-other)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._same(other)
        cols = []
        for col in other.columns:
            acc: dict = {}
            for k, bk in col.items():
                for i, a in self.columns[k].items():
                    acc[i] = acc.get(i, 0) + a * bk
            cols.append({i: v for i, v in acc.items() if v})
        return OperatorMatrix(self.basis, cols)

    def __eq__(self, other) -> bool:
        return isinstance(other, OperatorMatrix) and self.basis == other.basis and self.columns == other.columns

    def shift(self, scalar) -> "OperatorMatrix":
        """self + scalar * Id."""
        cols = []
        for j, c in enumerate(self.columns):
            c = dict(c)
            s = c.get(j, 0) + scalar
            if s:
                c[j] = s
            else:
                c.pop(j, None)
            cols.append(c)
        return OperatorMatrix(self.basis, cols)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def frobenius_sq(self) -> Fraction:
        return Fraction(sum(v * v for c in self.columns for v in c.values()))

    def to_array(self, dtype=float) -> np.ndarray:
        n = len(self.basis)
        out = np.zeros((n, n), dtype=dtype)
        for j, c in enumerate(self.columns):
            for i, v in c.items():
                out[i, j] = v if dtype is object else float(v)
        return out

    def block(self, rows: slice, cols: slice) -> list[list]:
        out = []
        for i in range(rows.start, rows.stop):
            out.append([self.columns[j].get(i, 0) for j in range(cols.start, cols.stop)])
        return out

    def is_block_lower_filtered(self) -> bool:
        """No column of degree k has entries in rows of degree > k."""
        for sl in self.basis.degree_slices:
            for j in range(sl.start, sl.stop):
                if any(i >= sl.stop for i in self.columns[j]):
                    return False
        return True


def operator_matrix(D: DiffOperator, d: int) -> OperatorMatrix:
    """Column j is reduce_mod_sphere(D(m_j)) in the quotient basis of degree d."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    return _operator_matrix_cached(D, d)


@lru_cache(maxsize=32)
def _operator_matrix_cached(D: DiffOperator, d: int) -> OperatorMatrix:
    basis = QuotientBasis(len(D.variables), d)
    cols = [basis.coordinates(reduce_mod_sphere(D(basis.poly(j)))) for j in range(len(basis))]
    return OperatorMatrix(basis, cols)


def space_matrices(space: str, d: int) -> dict[str, OperatorMatrix]:
    return {
        "sublaplacian": operator_matrix(build_sublaplacian(space), d),
        "vertical": operator_matrix(vertical_square(space), d),
        "laplace_beltrami": operator_matrix(laplace_beltrami(space), d),
    }


# certificates ------------------------------------------------------------------

def ideal_preservation(space: str) -> bool:
    vertical, horizontal = full_frame(space)
    r2 = radius_squared(vertical[0].variables)
    return all(apply_derivation(F, r2).is_zero() for F in vertical + horizontal)


def random_poly(variables: Sequence[str], degree: int, rng: np.random.Generator, n_terms: int = 6) -> Poly:
    n = len(variables)
    terms = {}
    for _ in range(n_terms):
        k = int(rng.integers(0, degree + 1))
        e = [0] * n
        for _ in range(k):
            e[int(rng.integers(0, n))] += 1
        terms[tuple(e)] = int(rng.integers(-5, 6))
    return Poly(variables, terms)


def representative_independence(D: DiffOperator, n_cosets: int = 20, seed: int = 0, degree: int = 3) -> bool:
    """reduce(D(f)) == reduce(D(f + g (r^2 - 1))) on random cosets."""
    rng = np.random.default_rng(seed)
    variables = D.variables
    ideal = radius_squared(variables) - 1
    for _ in range(n_cosets):
        f = random_poly(variables, degree, rng)
        g = random_poly(variables, 2, rng)
        if reduce_mod_sphere(D(f)) != reduce_mod_sphere(D(f + g * ideal)):
            return False
    return True


@dataclass
class CommutationReport:
    degree: int
    dimension: int
    matrix_commutator_zero: bool
    polynomial_commutator_zero: bool
    control_frobenius_sq: dict[int, Fraction]
    ambient_commutator_zero: bool
    ambient_degree: int

    @property
    def certified(self) -> bool:
        return self.matrix_commutator_zero and self.polynomial_commutator_zero and self.control_nonzero

    @property
    def control_nonzero(self) -> bool:
        return any(v > 0 for v in self.control_frobenius_sq.values())

    def as_dict(self) -> dict:
        return {
            "degree": self.degree,
            "dimension": self.dimension,
            "matrix_commutator_zero": self.matrix_commutator_zero,
            "polynomial_commutator_zero": self.polynomial_commutator_zero,
            "control_commutator_frobenius": {str(k): math.sqrt(v) for k, v in self.control_frobenius_sq.items()},
            "ambient_commutator_zero": self.ambient_commutator_zero,
            "ambient_degree": self.ambient_degree,
        }


def ambient_commutator_vanishes(d: int = 3) -> bool:
    """Whether [sum X_a^2 (a>=2), X1^2] kills every monomial of degree <= d on R^8, no reduction."""
    fields = s7_fields()
    C = commutator(build_sublaplacian("s7"), DiffOperator.sum_of_squares(fields[:1]))
    basis_vars = fields[0].variables
    for k in range(d + 1):
        for e in _compositions(k, 8):
            if not C(Poly.monomial(basis_vars, e)).is_zero():
                return False
    return True


def commutation_certificate(d: int, *, control_degrees: Sequence[int] = (2, 3),
                            ambient_degree: int = 3) -> CommutationReport:
    """Exact commutation of the S^7 sub-Laplacian with X1^2 on the degree-d quotient.

    The X2^2 control vanishes identically on degree <= 2 (the two squared
    rotations commute on quadratic forms) and first bites at degree 3, so it
    is reported for every degree in ``control_degrees``.
    """
    if d < 2:
        raise ValueError("degree must be at least 2")
    fields = s7_fields()
    D = build_sublaplacian("s7")
    V2 = DiffOperator.sum_of_squares(fields[:1])
    MD = operator_matrix(D, d)
    MV = operator_matrix(V2, d)
    matrix_zero = (MD @ MV - MV @ MD).is_zero()

    C = commutator(D, V2)
    basis = MD.basis
    poly_zero = all(reduce_mod_sphere(C(basis.poly(j))).is_zero() for j in range(len(basis)))

    X2sq = DiffOperator.sum_of_squares(fields[1:2])
    control = {}
    for k in control_degrees:
        MDc = operator_matrix(D, k)
        MX = operator_matrix(X2sq, k)
        control[k] = (MDc @ MX - MX @ MDc).frobenius_sq()

    return CommutationReport(d, len(basis), matrix_zero, poly_zero, control,
                             ambient_commutator_vanishes(ambient_degree), ambient_degree)


# spectra -----------------------------------------------------------------------

def _exact_integer_spectrum(block: list[list], candidates: list[int]) -> bool:
    """True when prod (B - lam I) over the candidate set is exactly zero."""
    n = len(block)
    if n == 0:
        return True
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    for lam in candidates:
        S = [[block[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
        P = [[sum(P[i][k] * S[k][j] for k in range(n) if P[i][k]) for j in range(n)] for i in range(n)]
    return all(v == 0 for row in P for v in row)


def degree_block_spectrum(M: OperatorMatrix) -> list[dict]:
    """Eigenvalues of each diagonal degree block (the whole spectrum when M is filtered)."""
    out = []
    for k, sl in enumerate(M.basis.degree_slices):
        block = M.block(sl, sl)
        vals = np.linalg.eigvals(np.array(block, dtype=float)) if block else np.array([])
        vals = np.sort(vals.real)
        rounded = sorted({int(round(v)) for v in vals})
        integral = bool(vals.size) and bool(np.all(np.abs(vals - np.round(vals)) < 1e-8))
        certified = integral and _exact_integer_spectrum(block, rounded)
        mult = {str(r): int(np.sum(np.abs(vals - r) < 1e-6)) for r in rounded} if integral else {}
        out.append({
            "degree": k,
            "size": sl.stop - sl.start,
            "eigenvalues": vals.tolist(),
            "distinct": rounded if integral else [],
            "multiplicities": mult,
            "exact": certified,
        })
    return out


def laplace_beltrami_certificate(d: int, space: str = "s7") -> dict:
    """Check that the assembled Laplace-Beltrami matrix has eigenvalue -k(k+m-1) on degree k."""
    dim = 7 if space == "s7" else 3
    M = operator_matrix(laplace_beltrami(space), d)
    filtered = M.is_block_lower_filtered()
    scalar_blocks = True
    for k, sl in enumerate(M.basis.degree_slices):
        target = -k * (k + dim - 1)
        block = M.block(sl, sl)
        n = sl.stop - sl.start
        if any(block[i][j] != (target if i == j else 0) for i in range(n) for j in range(n)):
            scalar_blocks = False
    P = None
    for k in range(d + 1):
        S = M.shift(k * (k + dim - 1))
        P = S if P is None else P @ S
    return {
        "degree": d,
        "filtered": filtered,
        "scalar_diagonal_blocks": scalar_blocks,
        "annihilating_product_zero": P.is_zero(),
        "eigenvalues": {k: -k * (k + dim - 1) for k in range(d + 1)},
    }


# Hopf chart on S^7 -----------------------------------------------------------------

class ChartBoundaryError(ValueError):
    pass


ANGLE_NAMES = ("xi1", "xi2", "xi3", "xi4", "eta1", "eta2", "psi")


def _check_interior(eta1: float, eta2: float, psi: float, tol: float = CHART_TOL) -> None:
    factors = [math.sin(a) for a in (eta1, eta2, psi)] + [math.cos(a) for a in (eta1, eta2, psi)]
    if min(abs(f) for f in factors) < tol:
        raise ChartBoundaryError("point lies within the chart boundary tolerance")


def hopf_to_ambient(angles: Sequence[float]) -> np.ndarray:
    xi1, xi2, xi3, xi4, eta1, eta2, psi = angles
    radii = (
        math.cos(eta1) * math.cos(psi),
        math.sin(eta1) * math.cos(psi),
        math.cos(eta2) * math.sin(psi),
        math.sin(eta2) * math.sin(psi),
    )
    out = np.empty(8)
    for k, (xi, r) in enumerate(zip((xi1, xi2, xi3, xi4), radii)):
        out[2 * k] = r * math.cos(xi)
        out[2 * k + 1] = r * math.sin(xi)
    return out


def ambient_to_hopf(p: Sequence[float], tol: float = CHART_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    mods = np.hypot(p[0::2], p[1::2])
    xis = np.arctan2(p[1::2], p[0::2])
    eta1 = math.atan2(mods[1], mods[0])
    eta2 = math.atan2(mods[3], mods[2])
    psi = math.atan2(math.hypot(mods[2], mods[3]), math.hypot(mods[0], mods[1]))
    _check_interior(eta1, eta2, psi, tol)
    return np.concatenate([xis, [eta1, eta2, psi]])


def hopf_jacobian(angles: Sequence[float]) -> np.ndarray:
    """d(ambient)/d(angles), shape (8, 7)."""
    xi = angles[:4]
    eta1, eta2, psi = angles[4:]
    c1, s1, c2, s2 = math.cos(eta1), math.sin(eta1), math.cos(eta2), math.sin(eta2)
    cp, sp = math.cos(psi), math.sin(psi)
    r = (c1 * cp, s1 * cp, c2 * sp, s2 * sp)
    dr = np.array([
        # d/deta1, d/deta2, d/dpsi
        [-s1 * cp, 0.0, -c1 * sp],
        [c1 * cp, 0.0, -s1 * sp],
        [0.0, -s2 * sp, c2 * cp],
        [0.0, c2 * sp, s2 * cp],
    ])
    J = np.zeros((8, 7))
    for k in range(4):
        ck, sk = math.cos(xi[k]), math.sin(xi[k])
        J[2 * k, k] = -r[k] * sk
        J[2 * k + 1, k] = r[k] * ck
        J[2 * k, 4:] = dr[k] * ck
        J[2 * k + 1, 4:] = dr[k] * sk
    return J


def pushforward(F: PolyVectorField, angles: Sequence[float]) -> np.ndarray:
    """Angle-coordinate components of a tangent field at the chart point."""
    p = hopf_to_ambient(angles)
    J = hopf_jacobian(angles)
    return np.linalg.lstsq(J, F.linear_matrix() @ p, rcond=None)[0]


def symbol_matrix(angles: Sequence[float], space_fields: Sequence[PolyVectorField] | None = None) -> np.ndarray:
    """Principal symbol of the horizontal sum of squares in angle coordinates."""
    fields = space_fields if space_fields is not None else s7_fields()[1:]
    cols = np.stack([pushforward(F, angles) for F in fields], axis=1)
    return cols @ cols.T


def _sec2(a: float) -> float:
    return 1.0 / math.cos(a) ** 2


def _csc2(a: float) -> float:
    return 1.0 / math.sin(a) ** 2


def h1(eta1: float, psi: float) -> float:
    return -_sec2(eta1) * _sec2(psi) / 8 * (
        -6 + 2 * math.cos(2 * eta1) + math.cos(2 * (eta1 - psi)) + 2 * math.cos(2 * psi) + math.cos(2 * (eta1 + psi)))


def h2(eta1: float, psi: float) -> float:
    return _csc2(eta1) * _sec2(psi) / 8 * (
        6 + 2 * math.cos(2 * eta1) + math.cos(2 * (eta1 - psi)) - 2 * math.cos(2 * psi) + math.cos(2 * (eta1 + psi)))


def h3(eta2: float, psi: float) -> float:
    return _sec2(eta2) * _csc2(psi) / 8 * (
        6 - 2 * math.cos(2 * eta2) + math.cos(2 * (eta2 - psi)) + 2 * math.cos(2 * psi) + math.cos(2 * (eta2 + psi)))


def h4(eta2: float, psi: float) -> float:
    return -_csc2(eta2) * _csc2(psi) / 8 * (
        -6 - 2 * math.cos(2 * eta2) + math.cos(2 * (eta2 - psi)) - 2 * math.cos(2 * psi) + math.cos(2 * (eta2 + psi)))


def expected_symbol(angles: Sequence[float]) -> np.ndarray:
    eta1, eta2, psi = angles[4:]
    S = np.zeros((7, 7))
    S[:4, :4] = -1.0
    S[0, 0] = h1(eta1, psi)
    S[1, 1] = h2(eta1, psi)
    S[2, 2] = h3(eta2, psi)
    S[3, 3] = h4(eta2, psi)
    S[4, 4] = _sec2(psi)
    S[5, 5] = _csc2(psi)
    S[6, 6] = 1.0
    return S


def random_interior_angles(rng: np.random.Generator, margin: float = 0.05) -> np.ndarray:
    xis = rng.uniform(-math.pi, math.pi, size=4)
    inner = rng.uniform(margin, math.pi / 2 - margin, size=3)
    return np.concatenate([xis, inner])


@dataclass
class ChartReport:
    n_points: int
    roundtrip: float
    x1_pushforward: float
    symbol_diagonal: float
    symbol_xi_offdiagonal: float
    symbol_lower_block: float
    symbol_full: float
    min_symbol_eigenvalue: float
    symbol_rank: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def hopf_chart_ops(n_points: int = 100, seed: int = 0) -> ChartReport:
    rng = np.random.default_rng(seed)
    fields = s7_fields()
    target = np.array([1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    rt = x1 = diag = off = lower = full = 0.0
    min_eig = math.inf
    ranks = set()
    for _ in range(n_points):
        th = random_interior_angles(rng)
        p = hopf_to_ambient(th)
        back = hopf_to_ambient(ambient_to_hopf(p))
        rt = max(rt, float(np.abs(back - p).max()))
        x1 = max(x1, float(np.abs(pushforward(fields[0], th) - target).max()))
        S = symbol_matrix(th, fields[1:])
        E = expected_symbol(th)
        diff = np.abs(S - E)
        diag = max(diag, float(diff[np.arange(4), np.arange(4)].max()))
        off = max(off, float((diff[:4, :4] - np.diag(np.diag(diff[:4, :4]))).max()))
        lower = max(lower, float(diff[4:, 4:].max()))
        full = max(full, float(diff.max()))
        w = np.linalg.eigvalsh(S)
        min_eig = min(min_eig, float(w.min()))
        ranks.add(int(np.sum(w > 1e-9 * max(1.0, w.max()))))
    return ChartReport(n_points, rt, x1, diag, off, lower, full, min_eig, max(ranks) if len(ranks) == 1 else -1)


# heat operators -------------------------------------------------------------------

@dataclass
class HeatReport:
    t: float
    degree: int
    dimension: int
    split_discrepancy: float
    laplace_beltrami_discrepancy: float
    decomposition_exact: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def heat_factorization(t: float, d: int) -> HeatReport:
    """Frobenius gaps between the full and the split heat operators on the degree-d quotient.

    With A = -M(sublaplacian) and B = -M(X1^2) (both positive semidefinite on
    the quotient), compares exp(-t(A+B)) and exp(-t(-M(Laplace-Beltrami)))
    against exp(-tA) exp(-tB).
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if d < 1:
        raise ValueError("degree must be at least 1")
    mats = space_matrices("s7", d)
    MD, MV, ML = mats["sublaplacian"], mats["vertical"], mats["laplace_beltrami"]
    A = -MD.to_array()
    B = -MV.to_array()
    L = ML.to_array()
    split = expm(-t * A) @ expm(-t * B)
    d1 = float(np.linalg.norm(expm(-t * (A + B)) - split))
    d2 = float(np.linalg.norm(expm(t * L) - split))
    return HeatReport(t, d, len(MD.basis), d1, d2, ML == MD + MV)


# checks --------------------------------------------------------------------------

def subelliptic_checks(d_commute: int = 4, d_heat: int = 3) -> list[Check]:
    out: list[Check] = []
    for space, expected in (("s7", -6), ("s3", -2)):
        D = build_sublaplacian(space)
        x0 = Poly.var(D.variables, 0)
        out.append(exact(f"sublaplacian(x0) = {expected} x0 on {space.upper()}", "sum-of-squares sub-Laplacian",
                         D(x0) == x0 * expected))
        out.append(exact(f"sublaplacian(1) = 0 on {space.upper()}", "sum-of-squares sub-Laplacian",
                         D(Poly.constant(D.variables, 1)).is_zero()))
        out.append(exact(f"frame fields preserve the ideal (r^2 - 1) on {space.upper()}",
                         "quotient representation", ideal_preservation(space)))
        out.append(exact(f"divergence corrections vanish on {space.upper()}", "divergence formula for the sub-Laplacian",
                         all(c.is_zero() for c in divergence_corrections(space))))
        P = sublaplacian_via_popp(space) - D
        basis = QuotientBasis(len(D.variables), 3)
        out.append(exact(f"divergence form = sum of squares on degree <= 3 ({space.upper()})",
                         "divergence formula for the sub-Laplacian",
                         all(reduce_mod_sphere(P(basis.poly(j))).is_zero() for j in range(len(basis)))))
    out.append(exact("matrix independent of the ideal representative (20 cosets)", "quotient representation",
                     representative_independence(build_sublaplacian("s7"))))

    mats = space_matrices("s7", 1)
    blk = mats["sublaplacian"].basis.degree_slices[1]
    for name, val in (("sublaplacian", -6), ("vertical", -1), ("laplace_beltrami", -7)):
        b = mats[name].block(blk, blk)
        ok = all(b[i][j] == (val if i == j else 0) for i in range(8) for j in range(8))
        out.append(exact(f"{name} degree-1 block = {val} Id", "quotient representation", ok))

    rep = commutation_certificate(d_commute)
    src = "commutation of sub-Laplacian and X1^2"
    out.append(exact(f"M(sublaplacian) M(X1^2) = M(X1^2) M(sublaplacian), degree <= {d_commute}", src,
                     rep.matrix_commutator_zero, dimension=rep.dimension))
    out.append(exact(f"reduce([sublaplacian, X1^2] m) = 0 for every basis monomial, degree <= {d_commute}", src,
                     rep.polynomial_commutator_zero))
    out.append(exact("control: [sublaplacian, X2^2] is nonzero on the quotient", src, rep.control_nonzero,
                     frobenius={str(k): math.sqrt(v) for k, v in rep.control_frobenius_sq.items()}))
    out.append(Check("ambient commutator [sublaplacian, X1^2] on R^8 (recorded only)", src, INFO,
                     {"vanishes_on_degree_le": rep.ambient_degree, "zero": rep.ambient_commutator_zero}))

    ch = hopf_chart_ops()
    src = "Hopf angle coordinates"
    out.append(numeric("chart round trip", src, ch.roundtrip, 1e-12))
    out.append(numeric("X1 pushforward = d/dxi1 + ... + d/dxi4", src, ch.x1_pushforward, 1e-9))
    out.append(numeric("symbol diagonal = h1..h4", src, ch.symbol_diagonal, 1e-9))
    out.append(numeric("symbol xi-block off-diagonal = -1", src, ch.symbol_xi_offdiagonal, 1e-9))
    out.append(numeric("symbol lower block = diag(sec^2 psi, csc^2 psi, 1)", src, ch.symbol_lower_block, 1e-9))
    out.append(numeric("symbol positive semidefinite", src, max(0.0, -ch.min_symbol_eigenvalue), 1e-9))
    out.append(exact("symbol rank 6", src, ch.symbol_rank == 6))

    heat = heat_factorization(0.5, d_heat)
    src = "heat operator factorization"
    out.append(exact(f"M(Laplace-Beltrami) = M(sublaplacian) + M(X1^2), degree {d_heat}", src,
                     heat.decomposition_exact))
    out.append(numeric(f"||exp(-t(A+B)) - exp(-tA)exp(-tB)||_F, t=0.5, degree {d_heat}", src,
                       heat.split_discrepancy, 1e-8))
    out.append(numeric(f"||exp(t M(Laplace-Beltrami)) - exp(-tA)exp(-tB)||_F, t=0.5, degree {d_heat}", src,
                       heat.laplace_beltrami_discrepancy, 1e-8))
    cert = laplace_beltrami_certificate(d_heat)
    out.append(exact(f"Laplace-Beltrami eigenvalue -k(k+6) on degree k <= {d_heat}", "Laplace-Beltrami spectrum",
                     cert["filtered"] and cert["scalar_diagonal_blocks"] and cert["annihilating_product_zero"]))
    return out


__all__ = [
    "SPACES",
    "full_frame",
    "build_sublaplacian",
    "vertical_square",
    "laplace_beltrami",
    "divergence_corrections",
    "sublaplacian_via_popp",
    "QuotientBasis",
    "OperatorMatrix",
    "operator_matrix",
    "space_matrices",
    "ideal_preservation",
    "representative_independence",
    "CommutationReport",
    "commutation_certificate",
    "ambient_commutator_vanishes",
    "degree_block_spectrum",
    "laplace_beltrami_certificate",
    "ChartBoundaryError",
    "ANGLE_NAMES",
    "hopf_to_ambient",
    "ambient_to_hopf",
    "hopf_jacobian",
    "pushforward",
    "symbol_matrix",
    "expected_symbol",
    "h1",
    "h2",
    "h3",
    "h4",
    "hopf_chart_ops",
    "HeatReport",
    "heat_factorization",
    "subelliptic_checks",
]
