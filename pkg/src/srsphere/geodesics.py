"""Closed-form sub-Riemannian geodesics on S^{2n+1} and S^{4n+3}.

A normal geodesic is the great circle with the same initial data, twisted
by the structure group: componentwise ``exp(-i t c)`` for the contact
spheres, right multiplication by ``exp(-t A(v))`` for the quaternionic ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .algebra import quat_exp_array, quat_mul_array
from .frames import SPHERE_TOL

CONTACT = "contact"
QUATERNIONIC = "quaternionic"

FD_STEP = 1e-4


class SpecError(ValueError):
    """Initial data violate the geodesic preconditions."""


def reeb(p: np.ndarray) -> np.ndarray:
    """i.p for interleaved complex coordinates; works on (..., 2m) arrays."""
    p = np.asarray(p, dtype=float)
    out = np.empty_like(p)
    out[..., 0::2] = -p[..., 1::2]
    out[..., 1::2] = p[..., 0::2]
    return out


_UNITS = np.eye(4)[1:]  # i, j, k


def quaternionic_verticals(p: np.ndarray) -> np.ndarray:
    """p.i, p.j, p.k as an array of shape (..., 3, 4m)."""
    p = np.asarray(p, dtype=float)
    q = p.reshape(p.shape[:-1] + (-1, 4))
    rows = [quat_mul_array(q, u).reshape(p.shape) for u in _UNITS]
    return np.stack(rows, axis=-2)


def vertical_fields(kind: str, p: np.ndarray) -> np.ndarray:
    """Vertical directions at p (or at each row of p), shape (..., k, d)."""
    if kind == CONTACT:
        return reeb(p)[..., None, :]
    return quaternionic_verticals(p)


@dataclass(frozen=True)
class GeodesicSpec:
    """Initial point, great-circle velocity and the derived vertical moments."""

    p: np.ndarray
    v: np.ndarray
    kind: str = CONTACT
    moments: np.ndarray = field(init=False, repr=False)
    exact_p: tuple | None = field(default=None, compare=False, repr=False)
    exact_v: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        v = np.array(self.v, dtype=float)
        if p.ndim != 1 or v.shape != p.shape:
            raise SpecError("p and v must be vectors of equal length")
        if self.kind == CONTACT and p.size % 2:
            raise SpecError("contact spheres live in even ambient dimension")
        if self.kind == QUATERNIONIC and p.size % 4:
            raise SpecError("quaternionic spheres need ambient dimension divisible by 4")
        if self.kind not in (CONTACT, QUATERNIONIC):
            raise SpecError(f"unknown space kind {self.kind!r}")
        if abs(np.linalg.norm(p) - 1.0) > SPHERE_TOL:
            raise SpecError("p is not on the unit sphere")
        if abs(p @ v) > SPHERE_TOL:
            raise SpecError("v is not tangent at p")
        p.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "v", v)
        moments = vertical_fields(self.kind, p) @ v
        moments.setflags(write=False)
        object.__setattr__(self, "moments", moments)

    @classmethod
    def from_exact(cls, p: Sequence, v: Sequence, kind: str = CONTACT) -> "GeodesicSpec":
        """Build from rational data, keeping it for exact closedness tests."""
        ep = tuple(Fraction(x) for x in p)
        ev = tuple(Fraction(x) for x in v)
        return cls(np.array([float(x) for x in ep]), np.array([float(x) for x in ev]), kind,
                   exact_p=ep, exact_v=ev)

    @property
    def dim(self) -> int:
        return self.p.size

    @property
    def speed_sq(self) -> float:
        """|v|^2 - sum c_alpha^2, the constant squared sub-Riemannian speed."""
        return float(self.v @ self.v - self.moments @ self.moments)

    @property
    def sr_speed(self) -> float:
        return math.sqrt(max(self.speed_sq, 0.0))

    def length(self, a: float, b: float) -> float:
        return (b - a) * self.sr_speed

    def exact_moments(self) -> tuple[Fraction, ...]:
        if self.exact_p is None:
            raise ValueError("spec was not built from exact data")
        p, v = np.array(self.exact_p, dtype=object), np.array(self.exact_v, dtype=object)
        if self.kind == CONTACT:
            return (sum(a * b for a, b in zip(v, _reeb_exact(p))),)
        out = []
        for a in range(3):
            w = _quat_vertical_exact(p, a)
            out.append(sum(x * y for x, y in zip(v, w)))
        return tuple(out)

    def exact_norm_sq(self) -> Fraction:
        if self.exact_v is None:
            raise ValueError("spec was not built from exact data")
        return sum(x * x for x in self.exact_v)


def _reeb_exact(p):
    out = [None] * len(p)
    out[0::2] = [-x for x in p[1::2]]
    out[1::2] = list(p[0::2])
    return out


def _quat_vertical_exact(p, a: int):
    out = []
    for k in range(0, len(p), 4):
        x, y, z, w = p[k:k + 4]
        out += ([-y, x, w, -z], [-z, -w, x, y], [-w, z, -y, x])[a]
    return out


# closed forms ---------------------------------------------------------------

def great_circle(p, v, t):
    """p cos(|v| t) + v/|v| sin(|v| t); t may be an array (adds a leading axis)."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    speed = np.linalg.norm(v)
    if speed == 0.0:
        raise SpecError("great circle needs a non-zero velocity")
    if abs(p @ v) > SPHERE_TOL * max(1.0, speed):
        raise SpecError("v is not tangent at p")
    t = np.asarray(t, dtype=float)
    arg = speed * t[..., None]
    return p * np.cos(arg) + (v / speed) * np.sin(arg)


def _great_circle_or_rest(spec: GeodesicSpec, t):
    if not np.any(spec.v):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(spec.p, t.shape + spec.p.shape).copy()
    return great_circle(spec.p, spec.v, t)


def geodesic_contact(spec: GeodesicSpec, t):
    """Great circle multiplied componentwise by exp(-i t c)."""
    if spec.kind != CONTACT:
        raise SpecError("geodesic_contact needs a contact spec")
    t = np.asarray(t, dtype=float)
    g = _great_circle_or_rest(spec, t)
    z = g[..., 0::2] + 1j * g[..., 1::2]
    z = z * np.exp(-1j * t * spec.moments[0])[..., None]
    out = np.empty_like(g)
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def geodesic_quaternionic(spec: GeodesicSpec, t):
    """Great circle right-multiplied by exp(-t A(v)) in each quaternion slot."""
    if spec.kind != QUATERNIONIC:
        raise SpecError("geodesic_quaternionic needs a quaternionic spec")
    t = np.asarray(t, dtype=float)
    g = _great_circle_or_rest(spec, t)
    c1, c2, c3 = spec.moments
    rot = quat_exp_array(-t * c1, -t * c2, -t * c3)
    q = g.reshape(g.shape[:-1] + (-1, 4))
    return quat_mul_array(q, rot[..., None, :]).reshape(g.shape)


def geodesic(spec: GeodesicSpec, t):
    if spec.kind == CONTACT:
        return geodesic_contact(spec, t)
    return geodesic_quaternionic(spec, t)


def geodesic_velocity(spec: GeodesicSpec, t):
    """Analytic derivative of the closed form."""
    t = np.asarray(t, dtype=float)
    speed = np.linalg.norm(spec.v)
    if speed == 0.0:
        return np.zeros(t.shape + spec.p.shape)
    arg = speed * t[..., None]
    g = spec.p * np.cos(arg) + (spec.v / speed) * np.sin(arg)
    gdot = -speed * spec.p * np.sin(arg) + spec.v * np.cos(arg)
    if spec.kind == CONTACT:
        c = spec.moments[0]
        z = g[..., 0::2] + 1j * g[..., 1::2]
        zd = gdot[..., 0::2] + 1j * gdot[..., 1::2]
        phase = np.exp(-1j * t * c)[..., None]
        w = (zd - 1j * c * z) * phase
        out = np.empty_like(g)
        out[..., 0::2] = w.real
        out[..., 1::2] = w.imag
        return out
    c1, c2, c3 = spec.moments
    rot = quat_exp_array(-t * c1, -t * c2, -t * c3)[..., None, :]
    A = np.array([0.0, c1, c2, c3])
    q = g.reshape(g.shape[:-1] + (-1, 4))
    qd = gdot.reshape(q.shape)
    # d/dt [q e^{-tA}] = (qdot - q A) e^{-tA}
    w = quat_mul_array(qd - quat_mul_array(q, A), rot)
    return w.reshape(g.shape)


def fd_derivative(curve, t, h: float = FD_STEP):
    """Fourth-order central difference of a vectorised curve."""
    t = np.asarray(t, dtype=float)
    return (
        -curve(t + 2 * h) + 8 * curve(t + h) - 8 * curve(t - h) + curve(t - 2 * h)
    ) / (12 * h)


# diagnostics ----------------------------------------------------------------

@dataclass(frozen=True)
class Trace:
    times: np.ndarray
    points: np.ndarray
    speed: np.ndarray
    horizontality: np.ndarray  # shape (samples, k)
    spec: GeodesicSpec

    def max_horizontality(self) -> float:
        return float(np.abs(self.horizontality).max())

    def pythagoras_residual(self) -> np.ndarray:
        """|gamma'|^2 + sum c^2 - |v|^2 per sample."""
        return self.speed**2 + self.spec.moments @ self.spec.moments - self.spec.v @ self.spec.v

    def max_radius_error(self) -> float:
        return float(np.abs(np.linalg.norm(self.points, axis=1) - 1.0).max())


def trace(spec: GeodesicSpec, times, h: float = FD_STEP) -> Trace:
    """Sample the closed form with finite-difference speed/horizontality diagnostics."""
    times = np.asarray(times, dtype=float)

    def curve(t):
        return geodesic(spec, t)

    pts = curve(times)
    vel = fd_derivative(curve, times, h)
    vert = vertical_fields(spec.kind, pts)
    horiz = np.einsum("skd,sd->sk", vert, vel)
    speed = np.linalg.norm(vel, axis=1)
    return Trace(times, pts, speed, horiz, spec)


def hermitian_velocity_product(spec: GeodesicSpec, t) -> np.ndarray:
    """<gamma_R'(t), gamma_R(t)>_H for the underlying great circle (contact)."""
    t = np.asarray(t, dtype=float)
    speed = np.linalg.norm(spec.v)
    arg = speed * t[..., None]
    g = spec.p * np.cos(arg) + (spec.v / speed) * np.sin(arg)
    gd = -speed * spec.p * np.sin(arg) + spec.v * np.cos(arg)
    z = g[..., 0::2] + 1j * g[..., 1::2]
    zd = gd[..., 0::2] + 1j * gd[..., 1::2]
    return np.sum(zd * np.conj(z), axis=-1)


# S^3 curvature ----------------------------------------------------------------

def _s3_frame_at(x: np.ndarray):
    """Values of the left-invariant X, Y at rows of x (S^3 only)."""
    x0, x1, x2, x3 = np.moveaxis(x, -1, 0)
    X = np.stack([-x2, x3, x0, -x1], axis=-1)
    Y = np.stack([-x3, -x2, x1, x0], axis=-1)
    return X, Y


def curvature_s3(spec: GeodesicSpec, tol: float = 1e-9) -> float:
    """Curvature of an arc-length S^3 geodesic: lambda = <v, V_2>."""
    if spec.kind != CONTACT or spec.dim != 4:
        raise SpecError("curvature_s3 needs a contact spec on S^3")
    c = float(spec.moments[0])
    if abs(spec.v @ spec.v - (1.0 + c * c)) > tol:
        raise SpecError("spec is not arc-length normalised: need |v|^2 = 1 + c^2")
    return c


def curvature_ode_residual(spec: GeodesicSpec, samples, h: float = 1e-4) -> float:
    """max |nabla_{gamma'} gamma' + 2 lambda J(gamma')| over the samples.

    Both derivatives are second-order central differences with step ``h``;
    the covariant acceleration is the tangential part of gamma''.
    """
    lam = curvature_s3(spec)
    t = np.asarray(samples, dtype=float)

    def curve(s):
        return geodesic_contact(spec, s)

    g = curve(t)
    gp, gm = curve(t + h), curve(t - h)
    vel = (gp - gm) / (2 * h)
    acc = (gp - 2 * g + gm) / (h * h)
    acc_tan = acc - np.sum(acc * g, axis=1, keepdims=True) * g
    X, Y = _s3_frame_at(g)
    fX = np.sum(vel * X, axis=1, keepdims=True)
    fY = np.sum(vel * Y, axis=1, keepdims=True)
    J = -fY * X + fX * Y
    res = acc_tan + 2 * lam * J
    return float(np.linalg.norm(res, axis=1).max())


# closedness -----------------------------------------------------------------

def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def is_closed_contact(lam) -> tuple[bool, float | None]:
    """Exact closedness test for an arc-length contact geodesic of curvature lam.

    Closed iff lam / sqrt(1 + lam^2) is rational.  The minimal period is
    k pi / |v| with k the least positive integer making
    k (1 - lam/|v|) an even integer.
    """
    if isinstance(lam, float):
        raise TypeError("closedness is only decidable for exact (rational) lambda")
    lam = Fraction(lam)
    speed = _rational_sqrt(1 + lam * lam)
    if speed is None:
        return False, None
    rho = lam / speed
    a, b = rho.numerator, rho.denominator
    k = b if (b - a) % 2 == 0 else 2 * b
    return True, k * math.pi / float(speed)


def orbit_return_distances(spec: GeodesicSpec, k_max: int) -> np.ndarray:
    """|gamma(k pi/|v|) - p| for k = 1..k_max."""
    ks = np.arange(1, k_max + 1)
    ts = ks * math.pi / np.linalg.norm(spec.v)
    return np.linalg.norm(geodesic(spec, ts) - spec.p, axis=1)


def first_return(spec: GeodesicSpec, k_max: int = 40, tol: float = 1e-9):
    """Least k <= k_max with gamma(k pi/|v|) = p within tol, or None."""
    d = orbit_return_distances(spec, k_max)
    hits = np.nonzero(d <= tol)[0]
    if hits.size == 0:
        return None
    k = int(hits[0]) + 1
    return k, k * math.pi / float(np.linalg.norm(spec.v))


def search_return_time(spec: GeodesicSpec, t_max: float = 200.0, tol: float = 1e-8,
                       samples_per_period: int = 64):
    """Numerically look for T in (0, t_max] with |gamma(T) - gamma(0)| <= tol.

    Scans the squared distance on a grid fine relative to the fastest
    frequency in the closed form, then polishes each local minimum.
    """
    freq = np.linalg.norm(spec.v) + np.linalg.norm(spec.moments)
    if freq == 0.0:
        return 0.0, 0.0
    step = 2 * math.pi / (freq * samples_per_period)
    grid = np.arange(step, t_max + step, step)

    def dist_sq(t):
        d = geodesic(spec, t) - spec.p
        return np.sum(d * d, axis=-1)

    vals = dist_sq(grid)
    best = (math.inf, None)
    idx = np.nonzero((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:]))[0] + 1
    # coarse filter: a true return has tiny squared distance at grid scale
    cutoff = (freq * step) ** 2 * 4
    for i in idx:
        if vals[i] > cutoff:
            continue
        res = minimize_scalar(lambda s: float(dist_sq(np.array(s))), bounds=(grid[i - 1], grid[i + 1]),
                              method="bounded", options={"xatol": 1e-14})
        d = math.sqrt(max(res.fun, 0.0))
        if d < best[0]:
            best = (d, float(res.x))
        if d <= tol:
            return float(res.x), d
    return None, best[0]


def is_closed_quaternionic(spec: GeodesicSpec, *, moment_squares=None, norm_sq=None,
                           t_max: float = 200.0, tol: float = 1e-8) -> dict:
    """Closedness report for a quaternionic geodesic.

    ``criterion_as_stated`` tests c_alpha / |v|^2 in Q for each moment;
    ``orbit_criterion`` tests |A(v)| / |v| in Q, which is what a return
    after a half-turn of the great circle requires when v has a non-zero
    horizontal part.  Both need exact data: either a spec built with
    ``GeodesicSpec.from_exact`` or explicit rational ``moment_squares``
    (signed squares c_alpha |c_alpha|) and ``norm_sq``.  With float data the
    exact verdicts are ``None``.  The numeric orbit search is always run.
    """
    if spec.kind != QUATERNIONIC:
        raise SpecError("needs a quaternionic spec")
    squares = None
    nsq = None
    if moment_squares is not None and norm_sq is not None:
        squares = [Fraction(s) for s in moment_squares]
        nsq = Fraction(norm_sq)
    elif spec.exact_p is not None:
        squares = [c * abs(c) for c in spec.exact_moments()]
        nsq = spec.exact_norm_sq()

    stated = orbit = None
    if squares is not None:
        if nsq == 0:
            stated = orbit = True
        else:
            stated = all(_rational_sqrt(abs(s)) is not None for s in squares)
            orbit = _rational_sqrt(sum(abs(s) for s in squares) / nsq) is not None

    horizontal = float(np.linalg.norm(spec.v - spec.moments @ vertical_fields(QUATERNIONIC, spec.p)))
    T, dist = search_return_time(spec, t_max=t_max, tol=tol)
    return {
        "moments": spec.moments.tolist(),
        "norm_sq": float(spec.v @ spec.v),
        "horizontal_norm": horizontal,
        "criterion_as_stated": stated,
        "orbit_criterion": orbit,
        "numeric_closed": T is not None,
        "numeric_return_time": T,
        "numeric_best_distance": dist,
        "t_max": t_max,
        "agree": None if stated is None else stated == (T is not None),
    }
