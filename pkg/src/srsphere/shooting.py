"""Two-point boundary problems for the closed-form geodesics.

Given p, q on the sphere and a horizon T, look for initial great-circle
velocities v with gamma_{p,v}(T) = q.  The velocity is written in a fixed
orthonormal basis of T_p S^d and the endpoint mismatch is driven to zero
with a damped Gauss-Newton iteration from many seeded starts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geodesics import CONTACT, QUATERNIONIC, GeodesicSpec, geodesic
from .frames import SPHERE_TOL


def max_threads() -> int:
    """Parallelism cap from SRSPHERE_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("SRSPHERE_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ShootingProblem:
    p: np.ndarray
    q: np.ndarray
    T: float
    kind: str = CONTACT

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        q = np.array(self.q, dtype=float)
        if p.shape != q.shape or p.ndim != 1:
            raise ValueError("p and q must be vectors of equal length")
        for name, x in (("p", p), ("q", q)):
            if abs(np.linalg.norm(x) - 1.0) > SPHERE_TOL:
                raise ValueError(f"{name} is not on the unit sphere")
        if not self.T > 0:
            raise ValueError("horizon T must be positive")
        if self.kind not in (CONTACT, QUATERNIONIC):
            raise ValueError(f"unknown space kind {self.kind!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


@dataclass
class ShootingConfig:
    max_iters: int = 100
    tol: float = 1e-10  # accepted when residual^2 <= tol
    n_starts: int = 64
    seed: int = 0
    fd_step: float = 1e-6
    merge_tol: float = 1e-6
    initial_guesses: list = field(default_factory=list)  # extra tangent vectors, tried first


@dataclass(frozen=True)
class ShootingSolution:
    spec: GeodesicSpec
    residual: float
    length: float
    start_index: int

    def as_dict(self) -> dict:
        return {
            "v": self.spec.v.tolist(),
            "moments": self.spec.moments.tolist(),
            "residual": self.residual,
            "length": self.length,
        }


def tangent_basis(p: np.ndarray) -> np.ndarray:
    """Orthonormal basis of T_p S^d (rows), Gram-Schmidt over the coordinate axes."""
    p = np.asarray(p, dtype=float)
    basis = [p / np.linalg.norm(p)]
    out = []
    for e in np.eye(p.size):
        w = e.copy()
        for _ in range(2):
            for b in basis + out:
                w -= (w @ b) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            out.append(w / nrm)
        if len(out) == p.size - 1:
            break
    return np.array(out)


def endpoint_map(spec: GeodesicSpec, T: float) -> np.ndarray:
    return geodesic(spec, np.float64(T))


class _Shooter:
    def __init__(self, problem: ShootingProblem, config: ShootingConfig):
        self.problem = problem
        self.config = config
        self.basis = tangent_basis(problem.p)

    def velocity(self, w: np.ndarray) -> np.ndarray:
        v = w @ self.basis
        # keep v exactly tangent despite rounding in the basis
        return v - (v @ self.problem.p) * self.problem.p

    def residual(self, w: np.ndarray) -> np.ndarray:
        spec = GeodesicSpec(self.problem.p, self.velocity(w), self.problem.kind)
        return endpoint_map(spec, self.problem.T) - self.problem.q

    def jacobian(self, w: np.ndarray) -> np.ndarray:
        h = self.config.fd_step
        cols = []
        for i in range(w.size):
            e = np.zeros_like(w)
            e[i] = h
            cols.append((self.residual(w + e) - self.residual(w - e)) / (2 * h))
        return np.stack(cols, axis=1)

    def run(self, w0: np.ndarray) -> tuple[np.ndarray, float]:
        """Levenberg-damped Gauss-Newton; returns the final w and |r|."""
        w = np.array(w0, dtype=float)
        r = self.residual(w)
        cost = r @ r
        mu = 1e-3
        for _ in range(self.config.max_iters):
            if cost < 1e-30:
                break
            J = self.jacobian(w)
            g = J.T @ r
            H = J.T @ J
            improved = False
            for _ in range(30):
                step = np.linalg.solve(H + mu * np.eye(w.size), -g)
                w_new = w + step
                r_new = self.residual(w_new)
                cost_new = r_new @ r_new
                if cost_new < cost:
                    w, r, cost = w_new, r_new, cost_new
                    mu = max(mu / 10, 1e-15)
                    improved = True
                    break
                mu *= 10
            if not improved or np.linalg.norm(step) < 1e-15 * (1 + np.linalg.norm(w)):
                break
        return w, math.sqrt(cost)


def _starts(shooter: _Shooter, config: ShootingConfig) -> list[np.ndarray]:
    starts = []
    for v in config.initial_guesses:
        v = np.asarray(v, dtype=float)
        starts.append(shooter.basis @ v)
    rng = np.random.default_rng(config.seed)
    scale = math.pi / shooter.problem.T
    d = shooter.basis.shape[0]
    starts += list(rng.normal(scale=scale, size=(config.n_starts, d)))
    return starts


def solve(problem: ShootingProblem, config: ShootingConfig | None = None) -> list[ShootingSolution]:
    """Multistart shooting; returns distinct accepted solutions sorted by length.

    An empty list means the starts found nothing, not that no geodesic exists.
    """
    config = config or ShootingConfig()
    shooter = _Shooter(problem, config)
    starts = _starts(shooter, config)

    threads = min(max_threads(), len(starts))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(shooter.run, starts))
    else:
        results = [shooter.run(w) for w in starts]

    accepted: list[ShootingSolution] = []
    for idx, (w, res) in enumerate(results):
        if res * res > config.tol:
            continue
        spec = GeodesicSpec(problem.p, shooter.velocity(w), problem.kind)
        if any(np.linalg.norm(spec.v - s.spec.v) <= config.merge_tol for s in accepted):
            continue
        accepted.append(ShootingSolution(spec, res, spec.length(0.0, problem.T), idx))
    accepted.sort(key=lambda s: (s.length, s.start_index))
    return accepted
