"""Derivative-free calibration of scenario parameters against a current ->
peak-bending-angle target table.

The loss (sum of squared relative angle errors over the table) has kinks
where a current first reaches the transformation band, so the search is
coordinate descent with a golden-section line search per parameter instead of
anything gradient-based.  Every evaluation is a full sweep; the routine is
deterministic for a given scenario and spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .engine import SimConfig, sweep
from .scenario import CalibrationSpec, Scenario

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_FAILED_RUN_LOSS = 1e12


class NonImprovement(RuntimeError):
    """The search could not reduce a non-trivial starting loss."""

    def __init__(self, start_loss: float, best_loss: float, evaluations: int):
        super().__init__(
            f"calibration did not improve: start loss {start_loss:.6g}, "
            f"best loss {best_loss:.6g} after {evaluations} sweep evaluations"
        )
        self.start_loss = start_loss
        self.best_loss = best_loss
        self.evaluations = evaluations


@dataclass(frozen=True)
class CalibrationResult:
    parameters: dict[str, float]
    loss: float
    start_loss: float
    achieved: tuple[tuple[float, float], ...]  # (current A, max bending deg)
    evaluations: int


def apply_parameters(scenario: Scenario, parameters: dict[str, float]) -> Scenario:
    """Return a scenario with the calibratable parameters replaced."""
    out = scenario
    for name, value in parameters.items():
        if name == "convection_coefficient":
            out = replace(
                out, environment=replace(out.environment, convection_coefficient=value)
            )
        elif name == "phase_transform_tensor":
            out = replace(
                out, material=replace(out.material, phase_transform_tensor=value)
            )
        elif name == "tendon_stiffness":
            out = replace(out, tendon_stiffness=value)
        elif name == "pennation_angle":
            out = replace(out, pennation_angle=value)
        else:
            raise ValueError(f"unknown calibration parameter {name!r}")
    return out


def current_parameters(scenario: Scenario, names) -> dict[str, float]:
    values = {}
    for name in names:
        if name == "convection_coefficient":
            values[name] = scenario.environment.convection_coefficient
        elif name == "phase_transform_tensor":
            values[name] = scenario.material.phase_transform_tensor
        elif name == "tendon_stiffness":
            values[name] = scenario.tendon_stiffness
        elif name == "pennation_angle":
            values[name] = scenario.pennation_angle
        else:
            raise ValueError(f"unknown calibration parameter {name!r}")
    return values


def evaluate_targets(
    scenario: Scenario, spec: CalibrationSpec, parameters: dict[str, float]
) -> tuple[float, tuple[tuple[float, float], ...]]:
    """(loss, achieved table) of one parameter candidate."""
    candidate = apply_parameters(scenario, parameters)
    system = candidate.build_system()
    config = SimConfig(
        dt=spec.dt if spec.dt is not None else candidate.dt,
        duration=spec.hold,
        solver_tolerance=candidate.solver_tolerance,
        max_newton_iterations=candidate.max_newton_iterations,
        max_temperature_step=candidate.max_temperature_step,
    )
    rows = sweep(
        system,
        [amps for amps, _ in spec.targets],
        spec.hold,
        config,
        unit_index=spec.unit_index,
    )
    loss = 0.0
    achieved = []
    for row, (_, target_deg) in zip(rows, spec.targets):
        if row.max_bending_angle is None:
            achieved.append((row.current, math.nan))
            loss += _FAILED_RUN_LOSS
            continue
        got_deg = math.degrees(row.max_bending_angle)
        achieved.append((row.current, got_deg))
        loss += ((got_deg - target_deg) / target_deg) ** 2
    return loss, tuple(achieved)


def calibrate(scenario: Scenario, spec: CalibrationSpec) -> CalibrationResult:
    """Fit the free parameters to the target table.

    Coordinate descent: each pass runs a golden-section search per free
    parameter inside its bounds (the search interval shrinks around the
    incumbent on later passes).  Returns the best parameters seen; raises
    NonImprovement when a non-trivial starting loss could not be reduced.
    """
    evaluations = 0
    cache: dict[tuple[float, ...], float] = {}
    names = list(spec.free)

    def loss_of(params: dict[str, float]) -> float:
        nonlocal evaluations
        key = tuple(params[n] for n in names)
        if key in cache:
            return cache[key]
        evaluations += 1
        value, _ = evaluate_targets(scenario, spec, params)
        cache[key] = value
        return value

    best = current_parameters(scenario, names)
    for name in names:
        lo, hi = spec.bounds[name]
        best[name] = min(max(best[name], lo), hi)
    start_loss = loss_of(best)
    best_loss = start_loss

    for pass_index in range(spec.passes):
        for name in names:
            lo_full, hi_full = spec.bounds[name]
            if pass_index == 0:
                lo, hi = lo_full, hi_full
            else:
                # narrow around the incumbent on later passes
                width = (hi_full - lo_full) * 0.3 ** pass_index
                lo = max(lo_full, best[name] - 0.5 * width)
                hi = min(hi_full, best[name] + 0.5 * width)
            a, b = lo, hi
            x1 = b - _GOLDEN * (b - a)
            x2 = a + _GOLDEN * (b - a)
            f1 = loss_of({**best, name: x1})
            f2 = loss_of({**best, name: x2})
            for _ in range(spec.golden_iterations):
                if f1 <= f2:
                    b, x2, f2 = x2, x1, f1
                    x1 = b - _GOLDEN * (b - a)
                    f1 = loss_of({**best, name: x1})
                else:
                    a, x1, f1 = x1, x2, f2
                    x2 = a + _GOLDEN * (b - a)
                    f2 = loss_of({**best, name: x2})
            for candidate_value, candidate_loss in (
                (x1, f1),
                (x2, f2),
            ):
                if candidate_loss < best_loss:
                    best_loss = candidate_loss
                    best = {**best, name: candidate_value}

    trivial = start_loss <= 1e-9
    if best_loss >= start_loss and not trivial:
        raise NonImprovement(start_loss, best_loss, evaluations)

    final_loss, achieved = evaluate_targets(scenario, spec, best)
    return CalibrationResult(
        parameters=best,
        loss=final_loss,
        start_loss=start_loss,
        achieved=achieved,
        evaluations=evaluations,
    )
