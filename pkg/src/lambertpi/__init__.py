"""Lambert W tuning of PI controllers for first-order plants with dead time."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    InvalidBranchError,
    LambertPIError,
    NotSettledError,
    UnreachableTargetError,
    UnstableResponseError,
)
from .lambertw import Branch, lambert_w, lambert_w_residual
from .metrics import ResponseMetrics, compute_metrics, peak_overshoot, settling_time
from .model import (
    Damping,
    FotdPlant,
    GammaSpec,
    PiGains,
    PolePair,
    classify_damping,
    closed_loop_poles,
    gains_from_gamma,
    gamma_from_gains,
)
from .simulator import (
    LoopForm,
    SimConfig,
    StepResponse,
    method_of_steps_reference,
    simulate,
    simulate_general,
    simulate_reduced,
)
from .tuner import (
    ComparisonTable,
    SweepRow,
    TuningReport,
    chr_compare,
    sweep,
    tune_no_overshoot,
    tune_target_overshoot,
)
