"""Electro-thermo-mechanical model of a shape-memory-alloy spring.

One spring couples three rates: Joule heating drives temperature, temperature
drives the martensite fraction through cosine transformation kinetics with
stress-shifted band edges, and both feed a rate-form force law whose stiffness
coefficient depends on the phase mix.  ``step_spring`` advances all three
states over one explicit time step; everything here is a pure function of its
inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

_SQRT3 = math.sqrt(3.0)


class Branch(Enum):
    """Which transformation the spring is currently riding."""

    IDLE = "idle"
    REVERSE = "reverse"  # martensite -> austenite while heating
    FORWARD = "forward"  # austenite -> martensite while cooling


class StepTooLarge(RuntimeError):
    """Per-step temperature change exceeded the stability bound; reduce dt."""

    def __init__(self, delta: float, bound: float):
        super().__init__(
            f"temperature moved {delta:.3g} K in one step "
            f"(bound {bound:.3g} K); reduce dt"
        )
        self.delta = delta
        self.bound = bound


@dataclass(frozen=True)
class SmaMaterial:
    """Alloy constants: phase moduli, transformation band, kinetic and
    thermal coefficients.

    All temperatures in K, moduli and stress-influence coefficients in Pa and
    Pa/K, resistances in ohm, specific heat in J/(kg K), latent heat in J/kg.
    ``phase_transform_tensor`` is negative by convention so that the reverse
    transformation (fraction falling) raises spring force.
    """

    young_martensite: float
    young_austenite: float
    poisson: float
    phase_transform_tensor: float
    thermal_expansion_factor: float
    austenite_start: float
    austenite_finish: float
    martensite_start: float
    martensite_finish: float
    stress_influence_reverse: float
    stress_influence_forward: float
    resistance_martensite: float
    resistance_austenite: float
    specific_heat: float
    latent_heat: float

    def __post_init__(self):
        if not (
            self.martensite_finish
            < self.martensite_start
            <= self.austenite_start
            < self.austenite_finish
        ):
            raise ValueError(
                "transformation temperatures must satisfy "
                "martensite_finish < martensite_start <= austenite_start "
                "< austenite_finish"
            )
        if not (self.young_austenite > self.young_martensite > 0.0):
            raise ValueError("moduli must satisfy young_austenite > young_martensite > 0")
        if self.stress_influence_reverse <= 0.0 or self.stress_influence_forward <= 0.0:
            raise ValueError("stress influence coefficients must be positive")
        if self.specific_heat <= 0.0:
            raise ValueError("specific_heat must be positive")
        if self.resistance_martensite <= 0.0 or self.resistance_austenite <= 0.0:
            raise ValueError("resistances must be positive")
        if self.latent_heat < 0.0:
            raise ValueError("latent_heat must be non-negative")


@dataclass(frozen=True)
class SpringGeometry:
    """Helical spring dimensions: wire diameter, mean coil diameter, active
    coil count, plus the mass and convective surface area used by the heat
    balance.  All SI."""

    wire_diameter: float
    coil_diameter: float
    active_coils: float
    spring_mass: float
    surface_area: float
    rest_length: float

    def __post_init__(self):
        if self.wire_diameter <= 0.0:
            raise ValueError("wire_diameter must be positive")
        if self.coil_diameter <= self.wire_diameter:
            raise ValueError("coil_diameter must exceed wire_diameter")
        if self.active_coils < 1.0:
            raise ValueError("active_coils must be at least 1")
        if self.spring_mass <= 0.0 or self.surface_area <= 0.0:
            raise ValueError("spring_mass and surface_area must be positive")
        if self.rest_length <= 0.0:
            raise ValueError("rest_length must be positive")


@dataclass(frozen=True)
class ThermalEnvironment:
    """Ambient temperature (K) and convective film coefficient (W/(m^2 K))."""

    ambient_temperature: float
    convection_coefficient: float

    def __post_init__(self):
        if self.ambient_temperature <= 0.0:
            raise ValueError("ambient_temperature must be positive (kelvin)")
        if self.convection_coefficient <= 0.0:
            raise ValueError("convection_coefficient must be positive")


@dataclass(frozen=True)
class SpringState:
    """Dynamic state of one spring.

    ``deflection`` is the mechanical stretch of the spring from free length;
    its rate is what the force law integrates.  ``fraction_at_reverse_start``
    and ``fraction_at_forward_start`` are latched when the state enters the
    heating or cooling transformation band and anchor the cosine arcs.
    """

    temperature: float
    martensite_fraction: float
    force: float
    deflection: float
    fraction_at_reverse_start: float = 1.0
    fraction_at_forward_start: float = 0.0
    branch: Branch = Branch.IDLE

    def __post_init__(self):
        if self.temperature <= 0.0:
            raise ValueError("temperature must be positive (kelvin)")
        for name in (
            "martensite_fraction",
            "fraction_at_reverse_start",
            "fraction_at_forward_start",
        ):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.force < 0.0:
            raise ValueError("force must be non-negative (tendon cannot push)")


def effective_modulus(material: SmaMaterial, fraction: float) -> tuple[float, float]:
    """Phase-mixture Young's and shear moduli at martensite fraction ``fraction``."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"martensite fraction must lie in [0, 1], got {fraction}")
    young = material.young_martensite * fraction + material.young_austenite * (
        1.0 - fraction
    )
    shear = young / (2.0 * (1.0 + material.poisson))
    return young, shear


def shear_stress(geometry: SpringGeometry, force: float) -> float:
    """Nominal shear stress in the wire for a coil carrying ``force`` (N)."""
    if force < 0.0:
        raise ValueError("force must be non-negative")
    d = geometry.wire_diameter
    return 8.0 * force * geometry.coil_diameter / (math.pi * d * d * d)


def reverse_fraction(
    material: SmaMaterial, temperature: float, stress: float, fraction_at_start: float
) -> float:
    """Martensite fraction while heating through the austenite band.

    Below the stress-shifted band the latched starting fraction is returned,
    above it the spring is fully austenite.  Continuous at both edges and
    non-increasing in temperature.
    """
    if not 0.0 <= fraction_at_start <= 1.0:
        raise ValueError("fraction_at_start must lie in [0, 1]")
    if stress < 0.0:
        raise ValueError("stress must be non-negative")
    shift = stress / material.stress_influence_reverse
    start = material.austenite_start + shift
    finish = material.austenite_finish + shift
    if temperature <= start:
        return fraction_at_start
    if temperature >= finish:
        return 0.0
    slope = math.pi / (material.austenite_finish - material.austenite_start)
    arg = slope * (temperature - material.austenite_start) - (
        slope / material.stress_influence_reverse
    ) * stress
    value = 0.5 * fraction_at_start * (math.cos(arg) + 1.0)
    return min(max(value, 0.0), fraction_at_start)


def forward_fraction(
    material: SmaMaterial, temperature: float, stress: float, fraction_at_start: float
) -> float:
    """Martensite fraction while cooling through the martensite band.

    Above the stress-shifted band the latched starting fraction is returned,
    below it the spring is fully martensite.
    """
    if not 0.0 <= fraction_at_start <= 1.0:
        raise ValueError("fraction_at_start must lie in [0, 1]")
    if stress < 0.0:
        raise ValueError("stress must be non-negative")
    shift = stress / material.stress_influence_forward
    start = material.martensite_start + shift
    finish = material.martensite_finish + shift
    if temperature >= start:
        return fraction_at_start
    if temperature <= finish:
        return 1.0
    slope = math.pi / (material.martensite_start - material.martensite_finish)
    arg = slope * (temperature - material.martensite_finish) - (
        slope / material.stress_influence_forward
    ) * stress
    value = 0.5 * (1.0 - fraction_at_start) * math.cos(arg) + 0.5 * (
        1.0 + fraction_at_start
    )
    return min(max(value, fraction_at_start), 1.0)


def phase_resistance(material: SmaMaterial, fraction: float) -> float:
    """Electrical resistance of the spring at the given phase mix (ohm)."""
    return material.resistance_martensite * fraction + material.resistance_austenite * (
        1.0 - fraction
    )


def heating_rate(
    material: SmaMaterial,
    geometry: SpringGeometry,
    env: ThermalEnvironment,
    state: SpringState,
    current: float,
    fraction_rate: float = 0.0,
) -> float:
    """Temperature rate (K/s) from the energy balance: Joule input, convective
    loss and latent heat of the active transformation (zero when idle)."""
    if current < 0.0:
        raise ValueError("current must be non-negative")
    resistance = phase_resistance(material, state.martensite_fraction)
    power = current * current * resistance
    loss = geometry.surface_area * env.convection_coefficient * (
        state.temperature - env.ambient_temperature
    )
    latent = geometry.spring_mass * material.latent_heat * fraction_rate
    return (power - loss + latent) / (geometry.spring_mass * material.specific_heat)


def force_coefficients(
    material: SmaMaterial, geometry: SpringGeometry, fraction: float
) -> tuple[float, float, float]:
    """Coefficients of the rate-form force law.

    Returns (stiffness N/m, transformation coefficient N, thermal coefficient
    N/K): force rate = stiffness * stretch rate + transformation * fraction
    rate + thermal * temperature rate.
    """
    d = geometry.wire_diameter
    big_d = geometry.coil_diameter
    _, shear = effective_modulus(material, fraction)
    d3 = d * d * d
    stiffness = d3 * d * shear / (8.0 * geometry.active_coils * big_d**3)
    transform = math.pi * d3 * material.phase_transform_tensor / (8.0 * _SQRT3 * big_d)
    thermal = math.pi * d3 * material.thermal_expansion_factor / (8.0 * _SQRT3 * big_d)
    return stiffness, transform, thermal


def force_rate(
    material: SmaMaterial,
    geometry: SpringGeometry,
    state: SpringState,
    stretch_rate: float,
    fraction_rate: float,
    temperature_rate: float,
) -> float:
    """Force rate (N/s) of the spring; the caller floors the integrated force
    at zero when the tendon goes slack."""
    stiffness, transform, thermal = force_coefficients(
        material, geometry, state.martensite_fraction
    )
    return (
        stiffness * stretch_rate
        + transform * fraction_rate
        + thermal * temperature_rate
    )


def _fraction_on_branch(
    material: SmaMaterial,
    branch: Branch,
    temperature: float,
    stress: float,
    reverse_latch: float,
    forward_latch: float,
    idle_fraction: float,
) -> float:
    if branch is Branch.REVERSE:
        return reverse_fraction(material, temperature, stress, reverse_latch)
    if branch is Branch.FORWARD:
        return forward_fraction(material, temperature, stress, forward_latch)
    return idle_fraction


def _reverse_entry_latch(
    material: SmaMaterial, temperature: float, stress: float, fraction: float
) -> float:
    """Anchor fraction for a reverse arc entered at the given state.

    Entering at the band edge this is just the current fraction; re-entering
    mid-band (heating resumed after an interruption) the anchor is chosen so
    the cosine arc passes through the current (T, fraction) point, keeping
    the fraction continuous.
    """
    shift = stress / material.stress_influence_reverse
    if temperature <= material.austenite_start + shift or fraction <= 0.0:
        return fraction
    if temperature >= material.austenite_finish + shift:
        return fraction
    slope = math.pi / (material.austenite_finish - material.austenite_start)
    arg = slope * (temperature - material.austenite_start) - (
        slope / material.stress_influence_reverse
    ) * stress
    denom = 1.0 + math.cos(arg)
    if denom < 1e-12:
        return 1.0
    return min(max(2.0 * fraction / denom, fraction), 1.0)


def _forward_entry_latch(
    material: SmaMaterial, temperature: float, stress: float, fraction: float
) -> float:
    """Anchor fraction for a forward arc entered at the given state; the
    mid-band form keeps the fraction continuous on re-entry."""
    shift = stress / material.stress_influence_forward
    if temperature >= material.martensite_start + shift or fraction >= 1.0:
        return fraction
    if temperature <= material.martensite_finish + shift:
        return fraction
    slope = math.pi / (material.martensite_start - material.martensite_finish)
    arg = slope * (temperature - material.martensite_finish) - (
        slope / material.stress_influence_forward
    ) * stress
    c = math.cos(arg)
    if 1.0 - c < 1e-12:
        return min(fraction, 1.0)
    value = (2.0 * fraction - c - 1.0) / (1.0 - c)
    return min(max(value, 0.0), fraction)


def _integrate_temperature(
    material: SmaMaterial,
    geometry: SpringGeometry,
    env: ThermalEnvironment,
    branch: Branch,
    temperature: float,
    stress: float,
    reverse_latch: float,
    forward_latch: float,
    idle_fraction: float,
    current: float,
    dt: float,
) -> float:
    """Classic RK4 on the heat balance with the phase fraction (and hence the
    resistance) evaluated algebraically at every stage.  Latent heat is not in
    the stage function; it is applied by the coupled correction afterwards."""
    mass_cp = geometry.spring_mass * material.specific_heat
    area_h = geometry.surface_area * env.convection_coefficient
    power = current * current
    ambient = env.ambient_temperature

    def rate(t: float) -> float:
        xi = _fraction_on_branch(
            material, branch, t, stress, reverse_latch, forward_latch, idle_fraction
        )
        return (power * phase_resistance(material, xi) - area_h * (t - ambient)) / mass_cp

    k1 = rate(temperature)
    k2 = rate(temperature + 0.5 * dt * k1)
    k3 = rate(temperature + 0.5 * dt * k2)
    k4 = rate(temperature + dt * k3)
    return temperature + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def step_spring(
    material: SmaMaterial,
    geometry: SpringGeometry,
    env: ThermalEnvironment,
    state: SpringState,
    current: float,
    stretch_rate: float,
    dt: float,
    max_temperature_step: float = 1.0,
) -> SpringState:
    """Advance one spring by ``dt`` seconds and return the new state.

    The temperature advances by RK4 on the heat balance; the branch is then
    chosen (reverse while heating through the austenite band, forward while
    cooling through the martensite band, idle otherwise) with the starting
    fraction latched on entry.  On an active branch the fraction change, the
    latent-heat temperature correction and the stress feedback on the band
    edges are solved together as one monotone scalar root so that the update
    is stable for physically large latent heats.  The force then advances by
    the rate law using the realized discrete rates, floored at zero.

    Raises StepTooLarge when the temperature moves more than
    ``max_temperature_step`` in a single step.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if current < 0.0:
        raise ValueError("current must be non-negative")

    t0 = state.temperature
    xi0 = state.martensite_fraction
    f0 = state.force
    stress0 = shear_stress(geometry, f0)
    reverse_latch = state.fraction_at_reverse_start
    forward_latch = state.fraction_at_forward_start

    branch = state.branch
    t_star = _integrate_temperature(
        material, geometry, env, branch, t0, stress0,
        reverse_latch, forward_latch, xi0, current, dt,
    )
    heating = t_star > t0

    # Branch exits: direction reversed or the transformation has completed.
    if branch is Branch.REVERSE and (not heating or xi0 <= 0.0):
        branch = Branch.IDLE
    elif branch is Branch.FORWARD and (heating or xi0 >= 1.0):
        branch = Branch.IDLE

    # Branch entries latch the current fraction as the cosine-arc anchor.
    if branch is Branch.IDLE:
        shift_rev = stress0 / material.stress_influence_reverse
        shift_fwd = stress0 / material.stress_influence_forward
        if heating and xi0 > 0.0 and t_star > material.austenite_start + shift_rev:
            branch = Branch.REVERSE
            reverse_latch = _reverse_entry_latch(material, t0, stress0, xi0)
        elif (
            not heating
            and xi0 < 1.0
            and t_star < material.martensite_start + shift_fwd
        ):
            branch = Branch.FORWARD
            forward_latch = _forward_entry_latch(material, t0, stress0, xi0)
        if branch is not state.branch:
            t_star = _integrate_temperature(
                material, geometry, env, branch, t0, stress0,
                reverse_latch, forward_latch, xi0, current, dt,
            )

    stiffness, transform, thermal = force_coefficients(material, geometry, xi0)
    stress_per_force = 8.0 * geometry.coil_diameter / (
        math.pi * geometry.wire_diameter**3
    )
    latent_gain = material.latent_heat / material.specific_heat

    if branch is Branch.IDLE:
        t_new = t_star
        xi_new = xi0
        d_xi = 0.0
    else:
        # Joint per-step closure: the fraction change feeds back on the
        # temperature (latent heat) and on the band edges (stress shift).
        # Both couplings are affine in d_xi, so the residual below is strictly
        # decreasing and bisection always converges.
        elastic_force = f0 + stiffness * stretch_rate * dt

        def residual(d_xi: float) -> float:
            t_cand = t_star + latent_gain * d_xi
            force_cand = elastic_force + transform * d_xi + thermal * (t_cand - t0)
            stress_cand = stress_per_force * max(force_cand, 0.0)
            xi_cand = _fraction_on_branch(
                material, branch, t_cand, stress_cand,
                reverse_latch, forward_latch, xi0,
            )
            return xi_cand - xi0 - d_xi

        if branch is Branch.REVERSE:
            lo, hi = -xi0, 0.0
        else:
            lo, hi = 0.0, 1.0 - xi0
        r_lo = residual(lo)
        r_hi = residual(hi)
        if branch is Branch.REVERSE:
            # residual(0) >= 0 means the band edge outran the temperature.
            d_xi = 0.0 if r_hi >= 0.0 else _bisect(residual, lo, hi, r_lo, r_hi)
        else:
            d_xi = 0.0 if r_lo <= 0.0 else _bisect(residual, lo, hi, r_lo, r_hi)
        t_new = t_star + latent_gain * d_xi
        xi_new = min(max(xi0 + d_xi, 0.0), 1.0)
        d_xi = xi_new - xi0

    delta_t = t_new - t0
    if abs(delta_t) > max_temperature_step:
        raise StepTooLarge(delta_t, max_temperature_step)

    force_new = f0 + stiffness * stretch_rate * dt + transform * d_xi + thermal * delta_t
    force_new = max(force_new, 0.0)

    # Transformation completed: park the branch until conditions re-enter it.
    if branch is Branch.REVERSE and xi_new <= 0.0:
        xi_new = 0.0
        branch = Branch.IDLE
    elif branch is Branch.FORWARD and xi_new >= 1.0:
        xi_new = 1.0
        branch = Branch.IDLE

    return replace(
        state,
        temperature=t_new,
        martensite_fraction=xi_new,
        force=force_new,
        deflection=state.deflection + stretch_rate * dt,
        fraction_at_reverse_start=reverse_latch,
        fraction_at_forward_start=forward_latch,
        branch=branch,
    )


def _bisect(fn, lo: float, hi: float, f_lo: float, f_hi: float) -> float:
    """Root of a monotone decreasing scalar on [lo, hi] by bisection."""
    if f_lo <= 0.0:
        return lo
    if f_hi >= 0.0:
        return hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-14:
            return mid
        f_mid = fn(mid)
        if f_mid > 0.0:
            lo = mid
        elif f_mid < 0.0:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)
