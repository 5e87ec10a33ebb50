"""spinsense: entanglement-based magnetic-field sensing at desk scale.

Simulates spin cat and spin squeezed probes under independent
non-Markovian dephasing and reproduces the sub-SQL estimation-uncertainty
scalings, by exact Dicke-basis numerics plus analytic moment propagation.
"""

__version__ = "0.1.0"

from .dicke import DickeState, build_collective_ops, inner, rotation_unitary, unitary_exp
from .dephasing import CollectiveMoments, DephasingModel, collective_moments
from .metrology import (
    SensingConfig,
    UncertaintyRecord,
    cat_readout_probability,
    cat_uncertainty,
    f_bound,
    qfi_exact,
    schedule_exposure,
    squeezing_parameter,
    uncertainty_moment_propagation,
)
from .states import StateSpec, ghz_state, oat_state, spin_cat, spin_coherent, tat_state
from .sweep import SweepSpec, emit_csv, emit_plot, fit_exponent, run_sweep

__all__ = [
    "__version__",
    "DickeState",
    "CollectiveMoments",
    "DephasingModel",
    "SensingConfig",
    "UncertaintyRecord",
    "StateSpec",
    "SweepSpec",
    "build_collective_ops",
    "rotation_unitary",
    "unitary_exp",
    "inner",
    "collective_moments",
    "spin_coherent",
    "oat_state",
    "tat_state",
    "spin_cat",
    "ghz_state",
    "squeezing_parameter",
    "uncertainty_moment_propagation",
    "f_bound",
    "schedule_exposure",
    "cat_readout_probability",
    "cat_uncertainty",
    "qfi_exact",
    "run_sweep",
    "fit_exponent",
    "emit_csv",
    "emit_plot",
]
