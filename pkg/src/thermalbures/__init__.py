"""Bures geometry of displaced thermal states of a harmonic oscillator."""

from .dynamics import (DampedOscillatorParams, TrajectorySample, bures_path_length, evolve,
                       speed, thermal_speed_component, trajectory)
from .errors import AccuracyWarning, ConvergenceError, DomainError, ModelMismatchError, StabilityError
from .geometry import (BuresMetric, line_element, metric_at, scalar_curvature,
                       scalar_curvature_numeric, volume_element)
from .states import (DisplacedThermalState, FGPair, bures_distance, fg_pair, partition_function,
                     transition_probability)

__version__ = "0.1.0"
