"""SMA-spring actuated continuum neck simulator.

Per-spring electro-thermo-mechanical dynamics, pennate force aggregation and
a quasi-static constant-curvature pose solve, plus scenario IO, plotting and
calibration.
"""

from .backbone import (
    ArcPose,
    BackboneGeometry,
    arc_frame,
    arc_position,
    elastic_moment,
)
from .calibrate import CalibrationResult, NonImprovement, calibrate
from .engine import (
    CurrentProfile,
    NeckSystem,
    NoConvergence,
    PoseOutOfRange,
    Segment,
    SimConfig,
    SimTrace,
    SweepRow,
    residual,
    simulate,
    solve_pose,
    sweep,
)
from .pennate import (
    PennateUnit,
    pennate_force,
    tendon_force_from_stretch,
    unit_line_of_action,
    unit_moment,
)
from .plots import emit_plots
from .scenario import (
    CalibrationSpec,
    ParseError,
    Scenario,
    ValidationError,
    dump_scenario,
    load_default_scenario,
    load_scenario,
    load_scenario_file,
    load_with_overrides,
)
from .sma import (
    Branch,
    SmaMaterial,
    SpringGeometry,
    SpringState,
    StepTooLarge,
    ThermalEnvironment,
    effective_modulus,
    force_rate,
    forward_fraction,
    heating_rate,
    reverse_fraction,
    shear_stress,
    step_spring,
)
from .traceio import read_trace, write_trace
from .units import UnitsError

__version__ = "0.1.0"

__all__ = [
    "ArcPose",
    "BackboneGeometry",
    "Branch",
    "CalibrationResult",
    "CalibrationSpec",
    "CurrentProfile",
    "NeckSystem",
    "NoConvergence",
    "NonImprovement",
    "ParseError",
    "PennateUnit",
    "PoseOutOfRange",
    "Scenario",
    "Segment",
    "SimConfig",
    "SimTrace",
    "SmaMaterial",
    "SpringGeometry",
    "SpringState",
    "StepTooLarge",
    "SweepRow",
    "ThermalEnvironment",
    "UnitsError",
    "ValidationError",
    "arc_frame",
    "arc_position",
    "calibrate",
    "dump_scenario",
    "effective_modulus",
    "elastic_moment",
    "emit_plots",
    "force_rate",
    "forward_fraction",
    "heating_rate",
    "load_default_scenario",
    "load_scenario",
    "load_scenario_file",
    "load_with_overrides",
    "pennate_force",
    "read_trace",
    "residual",
    "reverse_fraction",
    "shear_stress",
    "simulate",
    "solve_pose",
    "step_spring",
    "sweep",
    "tendon_force_from_stretch",
    "unit_line_of_action",
    "unit_moment",
    "write_trace",
]
