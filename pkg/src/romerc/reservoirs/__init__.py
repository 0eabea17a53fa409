from .base import (ConfigError, NumericalBlowupError, Reservoir,
                   STREAM_ENCODER, STREAM_INIT, STREAM_INPUT, STREAM_NOISE,
                   STREAM_STRUCTURE, make_rng)
from .linear import (EsnParams, EsnReservoir, LinearReservoir,
                     LinearReservoirParams, esn_step, linear_step,
                     make_random_internal_matrix)
from .snn import LifSnnParams, LifSnnReservoir
from .spinwave import SpinWaveParams, SpinWaveReservoir

__all__ = [
    "ConfigError", "NumericalBlowupError", "Reservoir", "make_rng",
    "STREAM_STRUCTURE", "STREAM_INIT", "STREAM_NOISE", "STREAM_INPUT",
    "STREAM_ENCODER",
    "LinearReservoirParams", "LinearReservoir", "EsnParams", "EsnReservoir",
    "linear_step", "esn_step", "make_random_internal_matrix",
    "SpinWaveParams", "SpinWaveReservoir",
    "LifSnnParams", "LifSnnReservoir",
]
