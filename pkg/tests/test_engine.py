import math
import random
from dataclasses import replace

import numpy as np
import pytest

from sma_neck import (
    ArcPose,
    CurrentProfile,
    NoConvergence,
    PoseOutOfRange,
    Segment,
    SimConfig,
    elastic_moment,
    residual,
    simulate,
    solve_pose,
    sweep,
    unit_moment,
)
from conftest import make_system


def quick_config(**kw):
    defaults = dict(dt=1e-3, duration=1.0)
    defaults.update(kw)
    return SimConfig(**defaults)


def arc_frame_tip(pose, backbone):
    from sma_neck import arc_position

    return arc_position(pose, backbone, backbone.length)


class TestResidual:
    def test_rest_is_equilibrium(self, system, straight_pose):
        r = residual(system, straight_pose, (0.0, 0.0, 0.0))
        assert np.linalg.norm(r) < 1e-15

    def test_unloaded_bend_leaves_elastic_moment(self, system):
        pose = ArcPose(2.0, 0.4, 0.0)
        r = residual(system, pose, (0.0, 0.0, 0.0))
        assert r == pytest.approx(-elastic_moment(pose, system.backbone))

    def test_single_unit_superposition(self, system, straight_pose):
        r = residual(system, straight_pose, (5.0, 0.0, 0.0))
        m = unit_moment(system.units[0], straight_pose, system.backbone, 5.0)
        assert r == pytest.approx(m)

    def test_rejects_negative_force(self, system, straight_pose):
        with pytest.raises(ValueError):
            residual(system, straight_pose, (-1.0, 0.0, 0.0))

    def test_gravity_moment_when_enabled(self, system):
        heavy = replace(system, gravity_enabled=True)
        pose = ArcPose(2.0, 0.0, 0.0)
        with_gravity = residual(heavy, pose, (0.0, 0.0, 0.0))
        without = residual(system, pose, (0.0, 0.0, 0.0))
        tip = arc_frame_tip(pose, system.backbone)
        expected = np.cross(tip, [0.0, 0.0, -system.head_mass * 9.80665])
        assert with_gravity - without == pytest.approx(expected, rel=1e-12)

    def test_gravity_vanishes_on_straight_backbone(self, system, straight_pose):
        heavy = replace(system, gravity_enabled=True)
        r = residual(heavy, straight_pose, (0.0, 0.0, 0.0))
        assert np.linalg.norm(r) < 1e-15


class TestSolvePose:
    def test_unloaded_equilibrium_is_straight(self, system, straight_pose):
        pose = solve_pose(system, (0.0, 0.0, 0.0), straight_pose, quick_config())
        assert pose.curvature == pytest.approx(0.0, abs=1e-12)
        assert pose.twist == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("unit_index,azimuth_deg", [(0, 60.0), (1, 180.0), (2, 300.0)])
    def test_single_unit_sets_bending_plane(self, system, straight_pose, unit_index, azimuth_deg):
        forces = [0.0, 0.0, 0.0]
        forces[unit_index] = 6.0
        pose = solve_pose(system, forces, straight_pose, quick_config())
        assert pose.curvature > 0.0
        delta = (pose.bending_plane_angle - math.radians(azimuth_deg) + math.pi) % (
            2 * math.pi
        ) - math.pi
        assert abs(delta) < 1e-6

    def test_linearized_beam_oracle(self, material, geometry, env, backbone):
        # small tip force at radius r: theta ~ r*F*l/EI
        rng = random.Random(42)
        for _ in range(25):
            ei = rng.uniform(0.05, 2.0)
            length = rng.uniform(0.05, 0.2)
            radius = rng.uniform(0.02, 0.06)
            bb = replace(
                backbone,
                length=length,
                bending_stiffness_x=ei,
                bending_stiffness_y=ei,
                torsional_stiffness=ei,
            )
            system = make_system(material, geometry, env, bb, radius=radius)
            theta_target = rng.uniform(math.radians(0.3), math.radians(2.8))
            force = theta_target * ei / (radius * length)
            pose = solve_pose(system, (force, 0.0, 0.0), ArcPose(0.0), quick_config())
            theta = pose.curvature * length
            assert theta == pytest.approx(theta_target, rel=0.05)

    def test_warm_start_independence(self, system):
        cfg = quick_config()
        forces = (8.0, 1.0, 2.0)
        reference = solve_pose(system, forces, ArcPose(0.0), cfg)
        rng = random.Random(3)
        for _ in range(5):
            guess = ArcPose(
                rng.uniform(0.0, 3.0), rng.uniform(0.0, 2 * math.pi), rng.uniform(-0.1, 0.1)
            )
            pose = solve_pose(system, forces, guess, cfg)
            assert pose.curvature == pytest.approx(reference.curvature, abs=1e-6)
            delta = (pose.bending_plane_angle - reference.bending_plane_angle + math.pi) % (
                2 * math.pi
            ) - math.pi
            assert abs(delta) < 1e-6

    def test_chart_consistency(self, system):
        cfg = quick_config()
        forces = (6.0, 0.0, 1.0)
        polar = solve_pose(system, forces, ArcPose(1.0, 1.0), cfg, chart="polar")
        cartesian = solve_pose(system, forces, ArcPose(1.0, 1.0), cfg, chart="cartesian")
        assert polar.curvature == pytest.approx(cartesian.curvature, abs=1e-8)
        delta = (polar.bending_plane_angle - cartesian.bending_plane_angle + math.pi) % (
            2 * math.pi
        ) - math.pi
        assert abs(delta) < 1e-8

    def test_no_convergence_reports_best(self, system, straight_pose):
        cfg = quick_config(solver_tolerance=1e-30, max_newton_iterations=2)
        with pytest.raises(NoConvergence) as err:
            solve_pose(system, (5.0, 0.0, 0.0), straight_pose, cfg)
        assert err.value.best_residual > 0.0
        assert err.value.best_pose.curvature >= 0.0

    def test_pose_out_of_range(self, system, straight_pose):
        with pytest.raises(PoseOutOfRange):
            solve_pose(system, (5000.0, 0.0, 0.0), straight_pose, quick_config())


class TestSimulate:
    def test_zero_current_stays_straight(self, system):
        cfg = quick_config(duration=0.5)
        trace = simulate(system, cfg)
        assert len(trace) == 500
        assert max(trace.theta) == pytest.approx(0.0, abs=1e-10)
        assert all(not flag for flag in trace.phi_defined)

    def test_deterministic_repeat(self, system):
        cfg = quick_config(
            duration=0.8,
            current_profile=CurrentProfile.constant(1, 6.0, 0.8),
        )
        a = simulate(system, cfg)
        b = simulate(system, cfg)
        assert a.t == b.t
        assert a.kappa == b.kappa
        assert a.spring_temperatures == b.spring_temperatures
        assert a.unit_forces == b.unit_forces

    def test_residual_below_tolerance_every_row(self, system):
        cfg = quick_config(
            duration=0.5, current_profile=CurrentProfile.constant(1, 7.0, 0.5)
        )
        trace = simulate(system, cfg)
        assert all(r < cfg.solver_tolerance for r in trace.residual_norm)

    def test_units_never_push(self, system):
        # unilateral tendons: every reachable state carries non-negative
        # unit forces, including the stretched far units
        cfg = quick_config(
            duration=1.5, current_profile=CurrentProfile.constant(1, 8.0, 1.5)
        )
        trace = simulate(system, cfg)
        assert all(f >= 0.0 for row in trace.unit_forces for f in row)

    def test_elastic_recovery_after_power_off(self, system):
        # currents off from a deformed state: the backbone must relax back
        # monotonically (elastic moment always opposes deformation)
        cfg = quick_config(
            duration=4.0, current_profile=CurrentProfile.constant(1, 7.0, 2.0)
        )
        trace = simulate(system, cfg)
        i_off = int(2.0 / cfg.dt)
        peak = max(trace.theta)
        assert trace.theta[i_off] > math.radians(1.0)
        cooling = trace.theta[i_off + 5 :]
        assert all(b <= a + 1e-12 for a, b in zip(cooling, cooling[1:]))
        assert cooling[-1] < 0.9 * peak

    def test_profile_segments_gate_current(self, system):
        profile = CurrentProfile((Segment(1, 0.2, 0.4, 6.0),))
        cfg = quick_config(duration=0.3, current_profile=profile)
        trace = simulate(system, cfg)
        i_before = int(0.15 / cfg.dt)
        temp_before = trace.spring_temperatures[i_before][0]
        assert temp_before == pytest.approx(system.env.ambient_temperature, abs=1e-6)
        assert trace.spring_temperatures[-1][0] > temp_before

    def test_phi_defined_flags(self, system):
        # straight rows carry the last well-defined plane angle and a flag
        profile = CurrentProfile((Segment(2, 0.1, 0.5, 7.0),))
        cfg = quick_config(duration=0.5, current_profile=profile)
        trace = simulate(system, cfg)
        i_on = int(0.1 / cfg.dt)
        assert not any(trace.phi_defined[: i_on - 1])
        assert trace.phi_defined[-1]


class TestSweep:
    def test_single_current_matches_simulate(self, system):
        cfg = quick_config(duration=1.0)
        rows = sweep(system, [6.0], 1.0, cfg)
        direct = simulate(
            system,
            replace(cfg, current_profile=CurrentProfile.constant(1, 6.0, 1.0)),
        )
        assert rows[0].max_bending_angle == direct.max_bending_angle()

    def test_duplicate_currents_identical(self, system):
        cfg = quick_config(duration=0.6)
        rows = sweep(system, [5.0, 5.0], 0.6, cfg)
        assert rows[0].max_bending_angle == rows[1].max_bending_angle

    def test_monotone_in_current(self, system):
        cfg = quick_config(duration=1.2)
        rows = sweep(system, [4.0, 6.0, 8.0], 1.2, cfg)
        angles = [row.max_bending_angle for row in rows]
        assert angles[0] < angles[1] < angles[2]

    def test_row_failures_do_not_stop_the_sweep(self, system):
        cfg = quick_config(duration=0.4, max_temperature_step=1e-6)
        rows = sweep(system, [0.0, 8.0], 0.4, cfg)
        assert rows[0].error is None
        assert rows[1].error is not None and rows[1].max_bending_angle is None

    def test_rejects_empty_currents(self, system):
        with pytest.raises(ValueError):
            sweep(system, [], 1.0, quick_config())


class TestSystemValidation:
    def test_azimuth_spacing_enforced(self, material, geometry, env, backbone, system):
        bad_units = (
            system.units[0],
            replace(system.units[1], azimuth=math.radians(150.0)),
            system.units[2],
        )
        with pytest.raises(ValueError):
            replace(system, units=bad_units)

    def test_head_mass_non_negative(self, system):
        with pytest.raises(ValueError):
            replace(system, head_mass=-0.1)
