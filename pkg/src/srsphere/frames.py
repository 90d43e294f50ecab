"""Vector fields, contact and connection forms on odd-dimensional spheres.

Ambient coordinates are always ``x0, ..., x{d-1}``.  Complex points
``(x0 + i y0, ...)`` and quaternionic points ``(x0 + y0 i + z0 j + w0 k, ...)``
are stored interleaved, so the groupings are index maps only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Poly, PolyVectorField, coordinate_names, lie_bracket, radius_squared
from .checks import Check, exact, numeric

SPHERE_TOL = 1e-10

# Tangent frame of S^7 induced by octonion multiplication; entry "-x3" in
# slot i means the i-th coefficient is -x3.
_S7_TABLE = (
    "-x1 x0 -x3 x2 -x5 x4 -x7 x6",
    "-x2 x3 x0 -x1 -x6 x7 x4 -x5",
    "-x3 -x2 x1 x0 x7 x6 -x5 -x4",
    "-x4 x5 x6 -x7 x0 -x1 -x2 x3",
    "-x5 -x4 -x7 -x6 x1 x0 x3 x2",
    "-x6 x7 -x4 x5 x2 -x3 x0 -x1",
    "-x7 -x6 x5 x4 -x3 -x2 x1 x0",
)


def _field_from_entries(dim: int, entries, name: str) -> PolyVectorField:
    names = coordinate_names(dim)
    rows = []
    for entry in entries:
        sign = -1 if entry.startswith("-") else 1
        rows.append({int(entry.lstrip("-x")): sign})
    return PolyVectorField.from_linear(names, rows, name=name)


class OffSphereError(ValueError):
    pass


@dataclass(frozen=True)
class SphereFrame:
    ambient_dim: int
    vertical: tuple[PolyVectorField, ...]
    horizontal: tuple[PolyVectorField, ...] | None = None
    kind: str = "contact"
    label: str = ""
    _gram: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.vertical[0].variables

    @property
    def fields(self) -> tuple[PolyVectorField, ...]:
        return self.vertical + (self.horizontal or ())

    def vertical_at(self, p) -> np.ndarray:
        """Rows are the vertical fields evaluated at ``p`` (float)."""
        p = np.asarray(p, dtype=float)
        return np.stack([F.linear_matrix() @ p for F in self.vertical])

    def gram_polynomials(self) -> dict[tuple[int, int], Poly]:
        """Exact <F_a, F_b> over all fields of the frame (vertical first)."""
        if not self._gram:
            fields = self.fields
            for a in range(len(fields)):
                for b in range(a, len(fields)):
                    self._gram[(a, b)] = fields[a].dot(fields[b])
        return self._gram


def build_contact_frame(n: int) -> SphereFrame:
    """Reeb-type field V_{n+1}(p) = i p on S^{2n+1} in R^{2n+2}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    dim = 2 * n + 2
    entries = []
    for k in range(n + 1):
        entries += [f"-x{2 * k + 1}", f"x{2 * k}"]
    V = _field_from_entries(dim, entries, f"V{n + 1}")
    horizontal = None
    if n == 1:
        horizontal = s3_horizontal_fields()
    elif n == 3:
        horizontal = build_s7_frame().horizontal
    return SphereFrame(dim, (V,), horizontal, "contact", f"S^{2 * n + 1} contact")


def s3_horizontal_fields() -> tuple[PolyVectorField, PolyVectorField]:
    """The left-invariant pair X, Y spanning the contact plane of S^3."""
    X = _field_from_entries(4, ["-x2", "x3", "x0", "-x1"], "X")
    Y = _field_from_entries(4, ["-x3", "-x2", "x1", "x0"], "Y")
    return X, Y


def build_s3_frame() -> SphereFrame:
    return build_contact_frame(1)


def build_quaternionic_frame(n: int) -> SphereFrame:
    """Fields p.i, p.j, p.k on S^{4n+3} in R^{4n+4} (right Sp(1) action)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    dim = 4 * n + 4
    e1, e2, e3 = [], [], []
    for k in range(n + 1):
        x, y, z, w = (f"x{4 * k + m}" for m in range(4))
        e1 += [f"-{y}", x, w, f"-{z}"]
        e2 += [f"-{z}", f"-{w}", x, y]
        e3 += [f"-{w}", z, f"-{y}", x]
    fields = tuple(_field_from_entries(dim, e, f"V^{a}") for a, e in zip((1, 2, 3), (e1, e2, e3)))
    return SphereFrame(dim, fields, None, "quaternionic", f"S^{4 * n + 3} quaternionic")


def build_s7_frame() -> SphereFrame:
    """Octonionic frame X1..X7; X1 is vertical, X2..X7 span the contact plane."""
    fields = tuple(
        _field_from_entries(8, row.split(), f"X{a}") for a, row in enumerate(_S7_TABLE, start=1)
    )
    return SphereFrame(8, fields[:1], fields[1:], "contact", "S^7 octonionic")


def s7_fields() -> tuple[PolyVectorField, ...]:
    return build_s7_frame().fields


def _check_on_sphere(p: np.ndarray) -> None:
    if abs(np.linalg.norm(p) - 1.0) > SPHERE_TOL:
        raise OffSphereError(f"|p| = {np.linalg.norm(p)!r} is not 1")


def contact_form_eval(frame: SphereFrame, p, v) -> np.ndarray:
    """Moments <v, V^alpha(p)> for each vertical field."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if p.shape != (frame.ambient_dim,) or v.shape != p.shape:
        raise ValueError("point/vector dimension does not match frame")
    _check_on_sphere(p)
    return frame.vertical_at(p) @ v


def horizontal_basis(frame: SphereFrame, p) -> np.ndarray:
    """Orthonormal basis of the horizontal space at p (rows).

    Gram-Schmidt of the coordinate axes against p and the vertical
    directions, in axis order.
    """
    p = np.asarray(p, dtype=float)
    _check_on_sphere(p)
    basis = [p / np.linalg.norm(p)]
    for w in frame.vertical_at(p):
        basis.append(w / np.linalg.norm(w))
    horizontal = []
    for e in np.eye(frame.ambient_dim):
        w = e.copy()
        for b in basis + horizontal:
            w -= (w @ b) * b
        # second pass for stability
        for b in basis + horizontal:
            w -= (w @ b) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            horizontal.append(w / nrm)
    expected = frame.ambient_dim - 1 - len(frame.vertical)
    return np.array(horizontal[:expected])


def verify_inertia_constancy(frame: SphereFrame, sample_points) -> dict:
    """Evaluate the moment-of-inertia matrix at each sample and compare to Id."""
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    for p in pts:
        _check_on_sphere(p)
    m = len(frame.vertical)
    gram = np.zeros((len(pts), m, m))
    for a in range(m):
        for b in range(a, m):
            poly = frame.vertical[a].dot(frame.vertical[b])
            vals = poly.evaluate_many(pts)
            gram[:, a, b] = vals
            gram[:, b, a] = vals
    deviation = np.abs(gram - np.eye(m)).max(axis=(1, 2))
    return {
        "frame": frame.label,
        "n_points": len(pts),
        "inertia_at_first_point": gram[0].tolist(),
        "max_deviation": float(deviation.max()),
    }


def is_tangent(F: PolyVectorField) -> bool:
    return F(radius_squared(F.variables)).is_zero()


def frame_identity_checks() -> list[Check]:
    """Exact identities satisfied by every frame in the toolkit."""
    out: list[Check] = []

    for n in (1, 2, 3):
        fr = build_contact_frame(n)
        V = fr.vertical[0]
        r2 = radius_squared(V.variables)
        out.append(exact(f"V{n + 1} tangent to S^{2 * n + 1}", "contact Reeb field", is_tangent(V)))
        out.append(exact(f"<V{n + 1}, V{n + 1}> = r^2", "contact Reeb field", V.dot(V) == r2))

    for n in (0, 1, 2):
        V1, V2, V3 = build_quaternionic_frame(n).vertical
        src = "quaternionic Hopf frame commutators"
        dim = 4 * n + 4
        out.append(exact(f"[V1,V2] = 2V3 (R^{dim})", src, lie_bracket(V1, V2) == V3.scale(2)))
        out.append(exact(f"[V2,V3] = 2V1 (R^{dim})", src, lie_bracket(V2, V3) == V1.scale(2)))
        out.append(exact(f"[V1,V3] = -2V2 (R^{dim})", src, lie_bracket(V1, V3) == V2.scale(-2)))
        r2 = radius_squared(V1.variables)
        vs = (V1, V2, V3)
        ortho = all(
            vs[a].dot(vs[b]) == (r2 if a == b else Poly.zero(r2.variables))
            for a in range(3) for b in range(3)
        )
        out.append(exact(f"quaternionic frame tangent and orthonormal (R^{dim})", "quaternionic Hopf frame",
                         all(map(is_tangent, (V1, V2, V3))) and ortho))

    fr3 = build_s3_frame()
    V = fr3.vertical[0]
    X, Y = fr3.horizontal
    # with [A,B]_i = A(B_i) - B(A_i) this frame gives [X,Y] = -2V
    out.append(exact("[Y,X] = 2V on S^3", "S^3 sub-Laplacian example", lie_bracket(Y, X) == V.scale(2)))
    r2 = radius_squared(V.variables)
    gram_ok = all(
        A.dot(B) == (r2 if i == j else Poly.zero(r2.variables))
        for i, A in enumerate((V, X, Y)) for j, B in enumerate((V, X, Y))
    )
    out.append(exact("S^3 frame {V,X,Y} orthonormal (Gram = r^2 Id)", "unit quaternion frame of S^3", gram_ok))

    fields = s7_fields()
    r2 = radius_squared(fields[0].variables)
    zero = Poly.zero(r2.variables)
    gram_ok = all(
        fields[a].dot(fields[b]) == (r2 if a == b else zero) for a in range(7) for b in range(a, 7)
    )
    out.append(exact("S^7 frame Gram = r^2 Id (28 entries)", "octonionic frame of S^7", gram_ok))
    out.append(exact("S^7 frame tangent", "octonionic frame of S^7", all(map(is_tangent, fields))))
    position = [Poly.var(r2.variables, i) for i in range(8)]
    out.append(exact("<X_a(p), p> = 0", "octonionic frame of S^7",
                     all(F.pair(position).is_zero() for F in fields)))
    out.append(exact("X1 = V4", "octonionic frame vs contact Reeb field",
                     fields[0] == build_contact_frame(3).vertical[0]))
    ok = all(
        fields[b].dot(lie_bracket(fields[a], fields[b])).is_zero()
        for a in range(1, 7) for b in range(7)
    )
    out.append(exact("<X_b,[X_a,X_b]> = 0, a=2..7, b=1..7", "S^7 sum-of-squares theorem", ok))

    rng = np.random.default_rng(0)
    for fr in (build_s3_frame(), build_quaternionic_frame(1)):
        pts = rng.normal(size=(100, fr.ambient_dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        rep = verify_inertia_constancy(fr, pts)
        out.append(numeric(f"inertia tensor = Id on {fr.label}", "constant bi-invariant metric",
                           rep["max_deviation"], 1e-12))
    return out


def jacobi_residual(X: PolyVectorField, Y: PolyVectorField, Z: PolyVectorField) -> PolyVectorField:
    return (
        lie_bracket(X, lie_bracket(Y, Z))
        + lie_bracket(Y, lie_bracket(Z, X))
        + lie_bracket(Z, lie_bracket(X, Y))
    )


__all__ = [
    "SphereFrame",
    "OffSphereError",
    "build_contact_frame",
    "build_quaternionic_frame",
    "build_s3_frame",
    "build_s7_frame",
    "s3_horizontal_fields",
    "s7_fields",
    "contact_form_eval",
    "horizontal_basis",
    "verify_inertia_constancy",
    "frame_identity_checks",
    "jacobi_residual",
]
