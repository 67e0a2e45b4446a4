"""Closed-form electromagnetic field kernels.

Two fields are needed:

* the instantaneous magnetic field of a point charge q moving
  nonrelativistically with velocity v0 along +y,

      B(r) = (v0 q mu0 / 4 pi) * ((z - z_e) x_hat - (x - x_e) z_hat)
             / ((x - x_e)^2 + (y - y_e)^2 + (z - z_e)^2)^(3/2)

  whose y component vanishes identically;

* the vector potential of an ideal (infinite, leak-free) solenoid,
  azimuthal about the axis with

      A_phi = Phi * rho / (2 pi R^2)   inside the bore (rho <= R)
      A_phi = Phi / (2 pi rho)         outside,

  continuous at rho = R, curl giving the uniform interior field and zero
  outside.  The line integral of A around any closed contour equals the
  enclosed flux, which is what the phase machinery consumes.

Line integrals use composite Gauss-Legendre per smooth piece with
adaptive panel doubling until successive refinements agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CODATA2018, PhysicalConstants, SolenoidSpec, flux
from .errors import ConvergenceError, GeometryError, SingularityError, ValidationError

ORIENTATION_CCW = "ccw"
ORIENTATION_CW = "cw"

# Reject field points closer to a source than this to avoid overflow.
SINGULARITY_GUARD = 1e-12  # m

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True)
class FieldSample:
    """Magnetic field vector attached to the point it was evaluated at."""

    position: np.ndarray  # (3,) m
    b_field: np.ndarray   # (3,) T


def moving_charge_b_field(
    field_point,
    electron_position,
    speed: float,
    constants: PhysicalConstants = CODATA2018,
) -> np.ndarray:
    """Magnetic field of the moving electron at one or many field points.

    Accepts a single (3,) point or an (n, 3) array of points and returns the
    matching shape.  The charge magnitude from `constants` is used; velocity
    is speed * y_hat.
    """
    pts = np.asarray(field_point, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    re = np.asarray(electron_position, dtype=float)
    delta = pts - re
    dist = np.linalg.norm(delta, axis=-1)
    if np.any(dist < SINGULARITY_GUARD):
        raise SingularityError(
            f"field point within {SINGULARITY_GUARD} m of the electron"
        )
    prefactor = speed * constants.electron_charge_magnitude * constants.vacuum_permeability / (4.0 * math.pi)
    inv_r3 = dist**-3
    b = np.zeros_like(pts)
    b[..., 0] = prefactor * delta[..., 2] * inv_r3
    b[..., 2] = -prefactor * delta[..., 0] * inv_r3
    # y component identically zero: velocity is along y_hat.
    return b[0] if single else b


def sample_moving_charge_field(
    field_points,
    electron_position,
    speed: float,
    constants: PhysicalConstants = CODATA2018,
) -> list[FieldSample]:
    pts = np.atleast_2d(np.asarray(field_points, dtype=float))
    b = moving_charge_b_field(pts, electron_position, speed, constants)
    return [FieldSample(position=p.copy(), b_field=f.copy()) for p, f in zip(pts, b)]


def ideal_solenoid_vector_potential(
    field_point,
    spec: SolenoidSpec,
    constants: PhysicalConstants = CODATA2018,
) -> np.ndarray:
    """Azimuthal vector potential of the ideal infinite solenoid.

    Works for a single (3,) point or an (n, 3) array.  On the axis the
    potential is exactly zero (interior branch at rho = 0).
    """
    pts = np.asarray(field_point, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)

    center = spec.center_array()
    axis = spec.axis_array()
    rel = pts - center
    axial = rel @ axis
    rho_vec = rel - np.outer(axial, axis)
    rho = np.linalg.norm(rho_vec, axis=-1)

    phi_total = flux(spec, constants).flux
    a_mag = np.empty_like(rho)
    inside = rho <= spec.bore_radius
    # A_phi = Phi rho / (2 pi R^2) inside, Phi / (2 pi rho) outside.
    a_mag[inside] = phi_total * rho[inside] / (2.0 * math.pi * spec.bore_radius**2)
    outside = ~inside
    a_mag[outside] = phi_total / (2.0 * math.pi * rho[outside])

    result = np.zeros_like(pts)
    ok = rho > 0.0
    phi_hat = np.cross(np.broadcast_to(axis, pts.shape)[ok], rho_vec[ok] / rho[ok, None])
    result[ok] = a_mag[ok, None] * phi_hat
    return result[0] if single else result


@dataclass(frozen=True)
class Contour:
    """Closed integration path: a polygon or a parametric circle.

    Polygons are given as an ordered (n, 3) vertex array, traversed in
    order with closure implied (last vertex connects back to the first).
    Circles are kept parametric so their quadrature does not inherit a
    polygonal discretization error.

    `orientation` records the traversal sense about the reference axis the
    contour was built for; the factory constructors emit vertices (or the
    circle parametrization) in the requested sense.
    """

    vertices: np.ndarray | None = None                 # (n, 3) for polygons
    circle: tuple | None = None                        # (center(3,), radius, normal(3,))
    orientation: str = ORIENTATION_CCW

    def __post_init__(self):
        if (self.vertices is None) == (self.circle is None):
            raise ValidationError("contour needs exactly one of vertices or circle")
        if self.orientation not in (ORIENTATION_CCW, ORIENTATION_CW):
            raise ValidationError("orientation must be 'ccw' or 'cw'")
        if self.vertices is not None:
            verts = np.asarray(self.vertices, dtype=float)
            if verts.ndim != 2 or verts.shape[1] != 3 or verts.shape[0] < 3:
                raise ValidationError("polygon contour needs at least 3 vertices of dim 3")
            nxt = np.roll(verts, -1, axis=0)
            if np.any(np.linalg.norm(nxt - verts, axis=1) == 0.0):
                raise ValidationError("consecutive contour vertices must be distinct")
            object.__setattr__(self, "vertices", verts)
        else:
            center, radius, normal = self.circle
            center = np.asarray(center, dtype=float)
            normal = np.asarray(normal, dtype=float)
            if not radius > 0.0:
                raise ValidationError("circle radius must be > 0")
            nrm = np.linalg.norm(normal)
            if nrm == 0.0:
                raise ValidationError("circle normal must be nonzero")
            object.__setattr__(self, "circle", (center, float(radius), normal / nrm))

    @classmethod
    def make_circle(cls, center, radius: float, normal=(0.0, 0.0, 1.0),
                    orientation: str = ORIENTATION_CCW) -> "Contour":
        """Circle of given radius about `center`, ccw or cw about +normal."""
        return cls(circle=(center, radius, normal), orientation=orientation)

    @classmethod
    def polygon(cls, vertices, orientation: str = ORIENTATION_CCW) -> "Contour":
        """Polygon traversed in the given vertex order."""
        return cls(vertices=vertices, orientation=orientation)

    @classmethod
    def regular_polygon(cls, center, radius: float, sides: int,
                        normal=(0.0, 0.0, 1.0),
                        orientation: str = ORIENTATION_CCW,
                        phase: float = 0.0) -> "Contour":
        center = np.asarray(center, dtype=float)
        normal = np.asarray(normal, dtype=float)
        normal = normal / np.linalg.norm(normal)
        u, v = _plane_basis(normal)
        ang = phase + 2.0 * math.pi * np.arange(sides) / sides
        if orientation == ORIENTATION_CW:
            ang = ang[::-1]
        verts = center + radius * (np.outer(np.cos(ang), u) + np.outer(np.sin(ang), v))
        return cls(vertices=verts, orientation=orientation)


def _plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right-handed orthonormal pair (u, v) with u x v = normal."""
    helper = np.array([1.0, 0.0, 0.0])
    if abs(normal @ helper) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    u = np.cross(helper, normal)
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    return u, v


def _segment_min_axis_distance(p0: np.ndarray, p1: np.ndarray,
                               center: np.ndarray, axis: np.ndarray) -> float:
    """Minimum transverse distance from segment p0->p1 to the solenoid axis.

    The transverse distance squared along the segment is a quadratic in the
    segment parameter, so the minimum is analytic.
    """
    def perp(p):
        rel = p - center
        return rel - (rel @ axis) * axis

    a = perp(p0)
    d = perp(p1) - a
    dd = d @ d
    if dd == 0.0:
        return float(np.linalg.norm(a))
    t = float(np.clip(-(a @ d) / dd, 0.0, 1.0))
    return float(np.linalg.norm(a + t * d))


def _check_contour_clear(contour: Contour, spec: SolenoidSpec) -> None:
    center = spec.center_array()
    axis = spec.axis_array()
    if contour.vertices is not None:
        verts = contour.vertices
        nxt = np.roll(verts, -1, axis=0)
        for p0, p1 in zip(verts, nxt):
            if _segment_min_axis_distance(p0, p1, center, axis) < spec.bore_radius:
                raise GeometryError("contour intersects the solenoid envelope")
    else:
        ccenter, radius, normal = contour.circle
        theta = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        u, v = _plane_basis(normal)
        pts = ccenter + radius * (np.outer(np.cos(theta), u) + np.outer(np.sin(theta), v))
        rel = pts - center
        axial = rel @ axis
        rho = np.linalg.norm(rel - np.outer(axial, axis), axis=1)
        if np.min(rho) < spec.bore_radius:
            raise GeometryError("contour intersects the solenoid envelope")


def _adaptive_line_integral(evaluate_piece, n_pieces: int, tolerance: float,
                            scale: float, max_panels: int = 4096) -> float:
    """Sum of piecewise integrals, refining all pieces until stable.

    evaluate_piece(piece_index, t_nodes) must return the integrand
    A(x(t)) . x'(t) sampled at parameter values t in [0, 1].
    """
    panels = 1
    previous = None
    while panels <= max_panels:
        total = 0.0
        for piece in range(n_pieces):
            edges = np.linspace(0.0, 1.0, panels + 1)
            mid = 0.5 * (edges[:-1] + edges[1:])
            half = 0.5 * (edges[1] - edges[0])
            t_nodes = (mid[:, None] + half * _GL_NODES[None, :]).ravel()
            values = evaluate_piece(piece, t_nodes).reshape(panels, -1)
            total += half * float(np.sum(values * _GL_WEIGHTS[None, :]))
        if previous is not None:
            if abs(total - previous) <= tolerance * max(abs(total), abs(scale)):
                return total
        previous = total
        panels *= 2
    raise ConvergenceError(
        f"contour integral did not converge within {max_panels} panels"
    )


def contour_integral_A(
    contour: Contour,
    spec: SolenoidSpec,
    constants: PhysicalConstants = CODATA2018,
    tolerance: float = 1e-12,
) -> float:
    """Line integral of the solenoid vector potential around the contour.

    Equals the enclosed flux (orientation-signed) for contours enclosing
    the solenoid axis and zero otherwise, by construction of the ideal
    potential.  Raises GeometryError if the contour cuts the bore.
    """
    _check_contour_clear(contour, spec)
    phi_scale = flux(spec, constants).flux
    if phi_scale == 0.0:
        return 0.0

    if contour.vertices is not None:
        verts = contour.vertices
        nxt = np.roll(verts, -1, axis=0)
        deltas = nxt - verts

        def piece(i, t):
            pts = verts[i] + np.outer(t, deltas[i])
            a = ideal_solenoid_vector_potential(pts, spec, constants)
            return a @ deltas[i]

        return _adaptive_line_integral(piece, len(verts), tolerance, phi_scale)

    center, radius, normal = contour.circle
    u, v = _plane_basis(normal)
    sense = 1.0 if contour.orientation == ORIENTATION_CCW else -1.0

    def piece(_, t):
        theta = sense * 2.0 * math.pi * t
        pts = center + radius * (np.outer(np.cos(theta), u) + np.outer(np.sin(theta), v))
        tangent = sense * 2.0 * math.pi * radius * (
            -np.sin(theta)[:, None] * u + np.cos(theta)[:, None] * v
        )
        a = ideal_solenoid_vector_potential(pts, spec, constants)
        return np.sum(a * tangent, axis=1)

    return _adaptive_line_integral(piece, 1, tolerance, phi_scale)
