"""Verification suites per module, as lists of :class:`Check` records."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .algebra import (
    DiffOperator,
    Poly,
    PolyVectorField,
    Quaternion,
    apply_derivation,
    quat_exp,
    quat_mul,
    radius_squared,
    reduce_mod_sphere,
)
from .checks import INFO, Check, exact, numeric
from .frames import (
    build_contact_frame,
    build_quaternionic_frame,
    build_s3_frame,
    frame_identity_checks,
    jacobi_residual,
    s7_fields,
)
from .geodesics import (
    CONTACT,
    QUATERNIONIC,
    GeodesicSpec,
    curvature_ode_residual,
    first_return,
    geodesic,
    hermitian_velocity_product,
    is_closed_contact,
    is_closed_quaternionic,
    orbit_return_distances,
    trace,
)
from .shooting import ShootingConfig, ShootingProblem, solve

MODULES = ("algebra", "frames", "geodesics", "shooting", "htype", "subelliptic")


def random_tangent_spec(rng: np.random.Generator, dim: int, kind: str) -> GeodesicSpec:
    p = rng.normal(size=dim)
    p /= np.linalg.norm(p)
    v = rng.normal(size=dim)
    v -= (v @ p) * p
    return GeodesicSpec(p, v, kind)


def _random_poly(variables, rng, degree=3, n_terms=5) -> Poly:
    terms = {}
    n = len(variables)
    for _ in range(n_terms):
        k = int(rng.integers(0, degree + 1))
        e = [0] * n
        for _ in range(k):
            e[int(rng.integers(0, n))] += 1
        terms[tuple(e)] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
    return Poly(variables, terms)


def algebra_checks(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    s7 = s7_fields()
    names = s7[0].variables
    x = [Poly.var(names, i) for i in range(8)]
    src = "derivations and brackets"
    out.append(exact("X1(x0) = -x1 on R^8", src, apply_derivation(s7[0], x[0]) == -x[1]))
    V2 = build_contact_frame(1).vertical[0]
    y = [Poly.var(V2.variables, i) for i in range(4)]
    out.append(exact("V2(x0) = -y0 on R^4", src, apply_derivation(V2, y[0]) == -y[1]))
    f = _random_poly(names, rng)
    out.append(exact("zero field kills polynomials", src,
                     apply_derivation(PolyVectorField.zero(names), f).is_zero()))

    triples = []
    pools = [s7, build_quaternionic_frame(1).vertical, build_s3_frame().fields]
    for _ in range(20):
        pool = pools[int(rng.integers(0, len(pools)))]
        triples.append([pool[int(rng.integers(0, len(pool)))] for _ in range(3)])
    out.append(exact("Jacobi identity on 20 random frame triples", src,
                     all(jacobi_residual(*t).is_zero() for t in triples)))

    src = "sphere ideal reduction"
    r2 = radius_squared(names)
    tail = sum((x[i] * x[i] for i in range(1, 8)), Poly.zero(names))
    out.append(exact("x0^2 -> 1 - sum_{i>=1} x_i^2", src, reduce_mod_sphere(x[0] ** 2) == 1 - tail))
    out.append(exact("r^2 - 1 -> 0", src, reduce_mod_sphere(r2 - 1).is_zero()))
    out.append(exact("x0^3 -> x0 - x0 sum_{i>=1} x_i^2", src, reduce_mod_sphere(x[0] ** 3) == x[0] - x[0] * tail))
    out.append(exact("reduce(f (r^2 - 1)) = 0 for 50 random f", src,
                     all(reduce_mod_sphere(_random_poly(names, rng) * (r2 - 1)).is_zero() for _ in range(50))))

    src = "operators"
    D = DiffOperator.sum_of_squares(s7[1:])
    nested = sum((apply_derivation(F, apply_derivation(F, x[0])) for F in s7[1:]), Poly.zero(names))
    out.append(exact("sum_{a>=2} X_a^2 (x0) = -6 x0 = nested derivations", src, D(x[0]) == nested == x[0] * -6))
    out.append(exact("X1^2 (x0) = -x0", src, DiffOperator.sum_of_squares(s7[:1])(x[0]) == -x[0]))
    out.append(exact("empty operator is zero", src, DiffOperator(names)(f).is_zero()))

    src = "quaternionic exponential"
    i, j, k = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)
    out.append(exact("i j = k", src, quat_mul(i, j) == k))
    out.append(exact("exp(0) = 1", src, quat_exp(0, 0, 0) == Quaternion(1, 0, 0, 0)))
    e = quat_exp(math.pi / 2, 0, 0).as_array()
    out.append(numeric("exp(pi/2 i) = i", src, float(np.abs(e - i.as_array()).max()), 1e-15))
    norms = [quat_exp(*rng.normal(scale=3, size=3)).norm() for _ in range(100)]
    out.append(numeric("|exp(a i + b j + c k)| = 1 (100 draws)", src, max(abs(n - 1) for n in norms), 1e-12))
    return out


def geodesic_invariants(rng: np.random.Generator, n_specs: int = 200, n_samples: int = 1000):
    """Worst horizontality and speed-identity residuals per space."""
    spaces = [("S^3", 4, CONTACT), ("S^5", 6, CONTACT), ("S^7", 8, CONTACT),
              ("S^7", 8, QUATERNIONIC), ("S^11", 12, QUATERNIONIC)]
    out = {}
    for label, dim, kind in spaces:
        h = p = 0.0
        for _ in range(n_specs):
            spec = random_tangent_spec(rng, dim, kind)
            tr = trace(spec, np.linspace(0.0, 10.0, n_samples))
            h = max(h, tr.max_horizontality())
            p = max(p, float(np.abs(tr.pythagoras_residual()).max()))
        out[f"{label} {kind}"] = (h, p)
    return out


def curvature_sweep(spec: GeodesicSpec, steps=(3e-1, 3e-2, 3e-3, 3e-4)) -> tuple[list[float], float]:
    samples = np.linspace(0.0, 10.0, 200)
    res = [curvature_ode_residual(spec, samples, h) for h in steps]
    slope = float(np.polyfit(np.log(steps), np.log(res), 1)[0])
    return res, slope


def geodesic_checks(seed: int = 0, n_specs: int = 200) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    spec = GeodesicSpec([1, 0, 0, 0], [0, 1, 1, 0])
    tr = trace(spec, np.linspace(0.0, 10.0, 1000))
    src = "horizontality of the closed-form geodesic"
    out.append(numeric("p=(1,0,0,0), v=(0,1,1,0): horizontality", src, tr.max_horizontality(), 1e-10))
    out.append(numeric("p=(1,0,0,0), v=(0,1,1,0): unit speed", src, float(np.abs(tr.speed - 1).max()), 1e-9))
    herm = hermitian_velocity_product(spec, tr.times)
    out.append(numeric("<gamma_R', gamma_R>_H = i <v, V>", src, float(np.abs(herm - 1j * spec.moments[0]).max()), 1e-10))

    for label, (h, p) in geodesic_invariants(rng, n_specs).items():
        out.append(numeric(f"{label}: horizontality, {n_specs} specs x 1000 samples", src, h, 1e-9))
        out.append(numeric(f"{label}: |gamma'|^2 + sum c^2 - |v|^2", "constant speed identity", p, 1e-9))

    src = "closedness of contact geodesics"
    out.append(exact("lambda = 0 closed with period 2 pi", src, is_closed_contact(0) == (True, 2 * math.pi)))
    closed, T = is_closed_contact(Fraction(3, 4))
    out.append(exact("lambda = 3/4 closed with period 4 pi", src, closed and math.isclose(T, 4 * math.pi)))
    out.append(exact("lambda = 1 not closed", src, is_closed_contact(1) == (False, None)))
    spec34 = GeodesicSpec([1, 0, 0, 0], [0, 0.75, 1, 0])
    ret = float(np.linalg.norm(geodesic(spec34, 4 * math.pi) - spec34.p))
    out.append(numeric("lambda = 3/4 orbit returns at T = 4 pi", src, ret, 1e-9))
    fr = first_return(spec34, 40)
    out.append(exact("lambda = 3/4 minimal return k = 5 (T = 4 pi)", src, fr is not None and fr[0] == 5))
    spec1 = GeodesicSpec([1, 0, 0, 0], [0, 1, 1, 0])
    dmin = float(orbit_return_distances(spec1, 100).min())
    out.append(Check("lambda = 1: min_k<=100 |gamma(k pi/|v|) - p| (recorded)", src, INFO, {"value": dmin}))
    out.append(exact("lambda = 1 orbit never returns within 1e-9 for k <= 100", src, dmin > 1e-9))

    src = "curvature equation on S^3"
    out.append(numeric("v=(0,1,1,0): curvature residual at h=1e-4", src,
                       curvature_ode_residual(spec1, np.linspace(0, 10, 200), 1e-4), 1e-6))
    flat = GeodesicSpec([1, 0, 0, 0], [0, 0, 1, 0])
    out.append(numeric("lambda = 0: curvature residual at h=1e-4", src,
                       curvature_ode_residual(flat, np.linspace(0, 10, 200), 1e-4), 1e-6))
    res, slope = curvature_sweep(spec1)
    out.append(numeric("finite-difference order of the curvature residual", src, abs(slope - 2), 0.2,
                       slope=slope, residuals=res))

    src = "closedness of quaternionic geodesics"
    rep = is_closed_quaternionic(GeodesicSpec([1, 0, 0, 0, 0, 0, 0, 0], [0, 1, 0, 0, 1, 0, 0, 0], QUATERNIONIC),
                                 moment_squares=[1, 0, 0], norm_sq=2)
    out.append(Check("c=(1,0,0), |v|^2=2: printed criterion vs numeric orbit (recorded)", src, INFO,
                     {k: rep[k] for k in ("criterion_as_stated", "orbit_criterion", "numeric_closed",
                                          "numeric_best_distance", "agree")}))
    hor = is_closed_quaternionic(GeodesicSpec([1, 0, 0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0, 0, 0], QUATERNIONIC))
    out.append(exact("horizontal v: quaternionic geodesic is closed", src, hor["numeric_closed"]))
    return out


def shooting_checks(seed: int = 0) -> list[Check]:
    out = []
    src = "geodesic shooting"
    p = np.array([1.0, 0, 0, 0])
    q = np.array([0.0, 0, 1, 0])
    sols = solve(ShootingProblem(p, q, 1.0), ShootingConfig(seed=seed))
    best = min((s.residual for s in sols), default=math.inf)
    great = [s for s in sols if abs(s.spec.moments[0]) < 1e-8]
    out.append(numeric("great-circle target recovered", src, best ** 2, 1e-10, found=len(sols)))
    out.append(exact("a horizontal (great-circle) solution is among them", src, bool(great)))
    out.append(exact("lengths dominate the Riemannian distance", src,
                     all(s.length >= math.acos(float(p @ q)) - 1e-8 for s in sols)))

    q2 = np.array([0.0, 1, 0, 0])  # i p
    sols2 = solve(ShootingProblem(p, q2, 1.0), ShootingConfig(seed=seed))
    res2 = min((s.residual for s in sols2), default=math.inf)
    out.append(numeric("same-fiber target i p, T=1", src, res2, 1e-8, solutions=len(sols2)))

    cfg = ShootingConfig(seed=seed, n_starts=8, initial_guesses=[[0.0, 0.74, 1.01, 0.0]])
    sols3 = solve(ShootingProblem(p, p, 4 * math.pi), cfg)
    hit = any(abs(abs(s.spec.moments[0]) - 0.75) < 1e-6 and abs(s.spec.speed_sq - 1) < 1e-6 for s in sols3)
    out.append(exact("q = p, T = 4 pi: lambda = 3/4 closed geodesic found from a nearby start", src, hit))

    again = solve(ShootingProblem(p, q2, 1.0), ShootingConfig(seed=seed))
    out.append(exact("fixed seed reproduces the solution list", src,
                     [s.as_dict() for s in again] == [s.as_dict() for s in sols2]))
    return out


def run_module(name: str) -> list[Check]:
    if name == "algebra":
        return algebra_checks()
    if name == "frames":
        return frame_identity_checks()
    if name == "geodesics":
        return geodesic_checks()
    if name == "shooting":
        return shooting_checks()
    if name == "htype":
        from .htype import htype_checks
        return htype_checks()
    if name == "subelliptic":
        from .subelliptic import subelliptic_checks
        return subelliptic_checks()
    raise ValueError(f"unknown module {name!r}")
