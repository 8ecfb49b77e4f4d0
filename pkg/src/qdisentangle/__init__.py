"""Qubit decoherence and entanglement-breaking channel analysis."""

from .channels import (
    JumpOperator,
    LindbladGenerator,
    QubitChannel,
    apply_channel,
    bloch_from_density,
    bloch_generator_from_lindblad,
    channel_from_generator,
    compose,
    density_from_bloch,
    dephasing_channel,
    dephasing_channel_literal,
    depolarizing_channel,
)
from .entanglement import (
    EBVerdict,
    HolevoForm,
    WernerState,
    choi_of_channel,
    disentanglement_time,
    evolve_singlet,
    holevo_form_depolarizing,
    is_entanglement_breaking,
    ppt_verdict,
    verify_holevo_form,
)
from .stochastic import EnsembleResult, SSEConfig, compare_to_analytic, run_ensemble, run_trajectory

__version__ = "0.1.0"
