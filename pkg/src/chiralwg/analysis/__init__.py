"""Physics verdicts on assembled models: decoherence-free interaction, dark
states, populating rates and splitting invariance."""
from .conditions import ConditionReport, multi_atom_dark_conditions
from .dark import (
    DRIVEN_DS,
    DRIVEN_DT,
    OTHER,
    SINGLET,
    TRIPLET,
    TRIVIAL,
    DarkStateReport,
    dark_span,
    find_dark_states,
    nontrivial,
    singlet,
    span_fidelity,
    triplet,
)
from .dfi import DfiReport, bright_decay_rates, check_dfi, xi_coupling
from .driven import NoDrivenDarkState, analytic_dark_state, bright_partner, driven_dark_state
from .rates import RateSweepReport, numeric_populating_rate, populating_rate, rate_comparison_sweep
from .splitting import SplitSpec, splitting_fidelity, verify_splitting_invariance

__all__ = [
    "ConditionReport",
    "DRIVEN_DS",
    "DRIVEN_DT",
    "DarkStateReport",
    "DfiReport",
    "NoDrivenDarkState",
    "OTHER",
    "RateSweepReport",
    "SINGLET",
    "SplitSpec",
    "TRIPLET",
    "TRIVIAL",
    "analytic_dark_state",
    "bright_decay_rates",
    "bright_partner",
    "check_dfi",
    "dark_span",
    "driven_dark_state",
    "find_dark_states",
    "multi_atom_dark_conditions",
    "nontrivial",
    "numeric_populating_rate",
    "populating_rate",
    "rate_comparison_sweep",
    "singlet",
    "span_fidelity",
    "splitting_fidelity",
    "triplet",
    "verify_splitting_invariance",
    "xi_coupling",
]
