"""Constant-curvature arc model of the flexible backbone.

The backbone is a circular arc parameterized by curvature, bending-plane
angle and twist; the bending angle is curvature times length.  Positions and
frames follow the usual arc geometry; the elastic restoring moment is the
Euler-Bernoulli bending/torsion law rotated into the base frame.

Scalar helpers (suffix ``_t``) operate on plain floats/tuples; the public
functions wrap them in numpy arrays.  The equilibrium solver calls the scalar
forms in its inner loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# kappa * s below this switches the arc formulas to their series limit
STRAIGHT_THRESHOLD = 1e-7

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BackboneGeometry:
    """Length (m), bending stiffnesses about the local x/y axes (N m^2) and
    torsional stiffness (N m^2) of the backbone."""

    length: float
    bending_stiffness_x: float
    bending_stiffness_y: float
    torsional_stiffness: float

    def __post_init__(self):
        for name in (
            "length",
            "bending_stiffness_x",
            "bending_stiffness_y",
            "torsional_stiffness",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ArcPose:
    """Arc configuration (curvature 1/m, bending-plane angle rad, twist rad).

    Negative curvature is normalized to positive curvature with the bending
    plane rotated by pi, and the plane angle is wrapped to [0, 2*pi), so the
    chart stays single-valued.
    """

    curvature: float
    bending_plane_angle: float = 0.0
    twist: float = 0.0

    def __post_init__(self):
        kappa = self.curvature
        phi = self.bending_plane_angle
        if not (math.isfinite(kappa) and math.isfinite(phi) and math.isfinite(self.twist)):
            raise ValueError("pose components must be finite")
        if kappa < 0.0:
            kappa = -kappa
            phi = phi + math.pi
        phi = phi % _TWO_PI
        object.__setattr__(self, "curvature", kappa)
        object.__setattr__(self, "bending_plane_angle", phi)

    def bending_angle(self, geometry: BackboneGeometry) -> float:
        """Total bending angle over the backbone (rad)."""
        return self.curvature * geometry.length


def _position_t(kappa: float, phi: float, s: float) -> tuple[float, float, float]:
    ks = kappa * s
    if ks < STRAIGHT_THRESHOLD:
        # 4th-order series keeps the solver residual smooth through zero
        radial = 0.5 * kappa * s * s * (1.0 - ks * ks / 12.0)
        axial = s * (1.0 - ks * ks / 6.0)
    else:
        radial = (1.0 - math.cos(ks)) / kappa
        axial = math.sin(ks) / kappa
    return math.cos(phi) * radial, math.sin(phi) * radial, axial


def _rotation_t(
    phi: float, theta: float, twist: float
) -> tuple[float, float, float, float, float, float, float, float, float]:
    """Row-major 3x3 rotation Rz(phi) . Ry(theta) . Rz(twist - phi)."""
    ca, sa = math.cos(phi), math.sin(phi)
    cb, sb = math.cos(theta), math.sin(theta)
    psi = twist - phi
    cc, sc = math.cos(psi), math.sin(psi)
    # Rz(phi) . Ry(theta)
    r00, r01, r02 = ca * cb, -sa, ca * sb
    r10, r11, r12 = sa * cb, ca, sa * sb
    r20, r21, r22 = -sb, 0.0, cb
    # . Rz(psi)
    return (
        r00 * cc + r01 * sc, -r00 * sc + r01 * cc, r02,
        r10 * cc + r11 * sc, -r10 * sc + r11 * cc, r12,
        r20 * cc + r21 * sc, -r20 * sc + r21 * cc, r22,
    )


def _rotate_t(rot, v):
    x, y, z = v
    return (
        rot[0] * x + rot[1] * y + rot[2] * z,
        rot[3] * x + rot[4] * y + rot[5] * z,
        rot[6] * x + rot[7] * y + rot[8] * z,
    )


def _elastic_moment_t(
    kappa: float, phi: float, twist: float, geometry: BackboneGeometry
) -> tuple[float, float, float]:
    # diag(EIxx, EIyy, GJ/l) . [0, kappa, twist] has no x component, so the
    # EIxx entry never contributes under the constant-curvature assumption.
    local_y = geometry.bending_stiffness_y * kappa
    local_z = geometry.torsional_stiffness * twist / geometry.length
    theta = kappa * geometry.length
    cb, sb = math.cos(theta), math.sin(theta)
    # Rz(phi) . Ry(theta) . (0, local_y, local_z)
    x1, y1, z1 = sb * local_z, local_y, cb * local_z
    ca, sa = math.cos(phi), math.sin(phi)
    return ca * x1 - sa * y1, sa * x1 + ca * y1, z1


def _check_arc_coordinate(s: float, length: float) -> None:
    if not 0.0 <= s <= length * (1.0 + 1e-12):
        raise ValueError(f"arc coordinate {s} outside [0, {length}]")


def arc_position(pose: ArcPose, geometry: BackboneGeometry, s: float) -> np.ndarray:
    """Position (m) of the backbone point at arc length ``s`` from the base."""
    _check_arc_coordinate(s, geometry.length)
    return np.array(_position_t(pose.curvature, pose.bending_plane_angle, s))


def arc_frame(pose: ArcPose, geometry: BackboneGeometry, s: float) -> np.ndarray:
    """Homogeneous transform (4x4) of the arc cross-section at ``s``."""
    _check_arc_coordinate(s, geometry.length)
    rot = _rotation_t(pose.bending_plane_angle, pose.curvature * s, pose.twist)
    px, py, pz = _position_t(pose.curvature, pose.bending_plane_angle, s)
    return np.array(
        [
            [rot[0], rot[1], rot[2], px],
            [rot[3], rot[4], rot[5], py],
            [rot[6], rot[7], rot[8], pz],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def elastic_moment(pose: ArcPose, geometry: BackboneGeometry) -> np.ndarray:
    """Restoring moment (N m, base frame) stored in the bent, twisted backbone."""
    return np.array(
        _elastic_moment_t(
            pose.curvature, pose.bending_plane_angle, pose.twist, geometry
        )
    )
