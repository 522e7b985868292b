"""Geometry and mechanics of one two-spring pennate muscle unit.

A unit runs from a base-plate anchor to an attachment on the head mount; its
two SMA springs meet the tendon line at the pennation angle.  Spring force
maps to tendon force through the pennation cosine; the unit's moment on the
head mount is the lever from the backbone tip to the attachment crossed with
the tendon force along the chord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backbone import ArcPose, BackboneGeometry, _position_t, _rotate_t, _rotation_t
from .sma import SpringState

_Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class PennateUnit:
    """One muscle unit: anchor points, pennation angle (rad), tendon stiffness
    (N/m) and the dynamic states of its springs.

    ``head_attachment_local`` is expressed in the head-mount (tip) frame;
    ``base_attachment`` in the base frame.
    """

    index: int
    azimuth: float
    base_attachment: _Vec3
    head_attachment_local: _Vec3
    pennation_angle: float
    tendon_stiffness: float
    springs: tuple[SpringState, ...]

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("unit index starts at 1")
        if not 0.0 <= self.pennation_angle < 0.5 * math.pi:
            raise ValueError("pennation_angle must lie in [0, pi/2)")
        if self.tendon_stiffness <= 0.0:
            raise ValueError("tendon_stiffness must be positive")
        if len(self.springs) < 1:
            raise ValueError("a pennate unit needs at least one spring")
        object.__setattr__(self, "base_attachment", tuple(map(float, self.base_attachment)))
        object.__setattr__(
            self, "head_attachment_local", tuple(map(float, self.head_attachment_local))
        )

    @property
    def fiber_count(self) -> int:
        return len(self.springs)


def pennate_force(unit: PennateUnit, spring_force: float) -> float:
    """Tendon force (N) produced by the unit's springs each pulling
    ``spring_force`` at the pennation angle."""
    if spring_force < 0.0:
        raise ValueError("spring_force must be non-negative")
    return unit.fiber_count * spring_force * math.cos(unit.pennation_angle)


def tendon_force_from_stretch(unit: PennateUnit, contraction: float) -> float:
    """Stiffness-model tendon force (N) for a unit contracted by
    ``contraction`` metres; zero when slack (contraction <= 0)."""
    if contraction <= 0.0:
        return 0.0
    return unit.tendon_stiffness * contraction


def rest_chord_length(unit: PennateUnit, geometry: BackboneGeometry) -> float:
    """Anchor-to-attachment distance with the backbone straight and untwisted."""
    hx, hy, hz = unit.head_attachment_local
    bx, by, bz = unit.base_attachment
    dx, dy, dz = hx - bx, hy - by, hz + geometry.length - bz
    chord = math.sqrt(dx * dx + dy * dy + dz * dz)
    if chord < 1e-9:
        raise ValueError(
            f"unit {unit.index}: head and base attachments coincide at rest"
        )
    return chord


def _line_of_action_t(
    head_local: _Vec3,
    base: _Vec3,
    rest_chord: float,
    tip: _Vec3,
    rot,
) -> tuple[_Vec3, _Vec3, float]:
    """(attachment point, unit pull direction, chord contraction) for a pose
    given the tip position and rotation of the head mount."""
    ax, ay, az = _rotate_t(rot, head_local)
    px, py, pz = tip[0] + ax, tip[1] + ay, tip[2] + az
    cx, cy, cz = base[0] - px, base[1] - py, base[2] - pz
    chord = math.sqrt(cx * cx + cy * cy + cz * cz)
    if chord < 1e-12:
        raise ValueError("degenerate muscle geometry: attachment reached the anchor")
    inv = 1.0 / chord
    return (px, py, pz), (cx * inv, cy * inv, cz * inv), rest_chord - chord


def unit_line_of_action(
    unit: PennateUnit, pose: ArcPose, geometry: BackboneGeometry
) -> tuple[np.ndarray, np.ndarray, float]:
    """Attachment point (m), unit direction of pull (toward the base anchor)
    and chord contraction relative to rest (m, positive = shortened)."""
    rot = _rotation_t(
        pose.bending_plane_angle, pose.curvature * geometry.length, pose.twist
    )
    tip = _position_t(pose.curvature, pose.bending_plane_angle, geometry.length)
    point, direction, contraction = _line_of_action_t(
        unit.head_attachment_local,
        unit.base_attachment,
        rest_chord_length(unit, geometry),
        tip,
        rot,
    )
    return np.array(point), np.array(direction), contraction


def unit_moment(
    unit: PennateUnit, pose: ArcPose, geometry: BackboneGeometry, tendon_force: float
) -> np.ndarray:
    """Moment (N m, base frame) the unit applies about the backbone tip when
    pulling with ``tendon_force`` along its chord."""
    if tendon_force < 0.0:
        raise ValueError("tendon_force must be non-negative")
    point, direction, _ = unit_line_of_action(unit, pose, geometry)
    tip = np.array(_position_t(pose.curvature, pose.bending_plane_angle, geometry.length))
    lever = point - tip
    return np.cross(lever, tendon_force * direction)
