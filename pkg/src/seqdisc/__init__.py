"""Sequential conclusive discrimination of quantum states by chains of receivers."""

from .channels import Channel, apply_channel, depolarizing, identity_channel
from .discrimination import (
    DiscriminationResult,
    Protocol,
    check_range_condition,
    helstrom_bound,
    helstrom_projectors,
    indirect_realization_for_optimal,
    multi_state_upper_bound,
    optimal_two_state_protocol,
    range_condition_protocol,
    success_chain,
    success_direct,
    success_product,
)
from .instruments import (
    POVM,
    Instrument,
    StatisticalRealization,
    compose_sequential,
    instrument_from_realization,
    kraus_from_dilation,
    luders_from_projectors,
    outcome_probability,
    posterior,
    povm_of,
)
from .noisy_opt import (
    NoisyOptimum,
    noisy_success,
    noisy_two_seq_upper_bound,
    noisy_upper_bound,
    one_receiver_depolarizing_optimum,
    two_seq_depolarizing_closed,
    two_seq_depolarizing_numeric,
)
from .states import (
    DensityOperator,
    Ensemble,
    bloch_from_qubit,
    mixture,
    qubit_from_bloch,
)

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "DensityOperator",
    "DiscriminationResult",
    "Ensemble",
    "Instrument",
    "NoisyOptimum",
    "POVM",
    "Protocol",
    "StatisticalRealization",
    "apply_channel",
    "bloch_from_qubit",
    "check_range_condition",
    "compose_sequential",
    "depolarizing",
    "helstrom_bound",
    "helstrom_projectors",
    "identity_channel",
    "indirect_realization_for_optimal",
    "instrument_from_realization",
    "kraus_from_dilation",
    "luders_from_projectors",
    "mixture",
    "multi_state_upper_bound",
    "noisy_success",
    "noisy_two_seq_upper_bound",
    "noisy_upper_bound",
    "one_receiver_depolarizing_optimum",
    "optimal_two_state_protocol",
    "outcome_probability",
    "posterior",
    "povm_of",
    "qubit_from_bloch",
    "range_condition_protocol",
    "success_chain",
    "success_direct",
    "success_product",
    "two_seq_depolarizing_closed",
    "two_seq_depolarizing_numeric",
]
