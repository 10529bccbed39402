"""
Cross-checking against truncated Fock space
===========================================

Everything closed-form can be rebuilt from density matrices in an
``N``-level truncation. This is slower but independent.
"""

import math

from thermalbures import DampedOscillatorParams, DisplacedThermalState, evolve, transition_probability
from thermalbures.oracle import (
    displaced_thermal_matrix,
    extract_params,
    lindblad_integrate,
    thermal_density_matrix,
    uhlmann_fidelity,
)

ln2 = math.log(2.0)
fock = uhlmann_fidelity(thermal_density_matrix(ln2, 80),
                        displaced_thermal_matrix(ln2, math.sqrt(3), math.sqrt(3), 80))
exact = transition_probability(DisplacedThermalState(ln2),
                               DisplacedThermalState(ln2, math.sqrt(3), math.sqrt(3)))
print(f"Fock {fock:.12f}  closed form {exact:.12f}")

# Integrate the master equation and read the state back from its moments.
params = DampedOscillatorParams(1.0, 0.75, 0.25)
rho = lindblad_integrate(displaced_thermal_matrix(2.0, 1.0, 1.0, 60), params, 0.5, dt=1e-3)
print("Lindblad:   ", extract_params(rho))
print("closed form:", evolve(DisplacedThermalState(2.0, 1.0, 1.0), params, 0.5))
