"""
Relaxation of an oscillator in a thermal bath
=============================================

Under amplitude damping the state stays displaced-thermal. The displacement
spirals into the origin while the temperature relaxes to the bath value.
"""

import numpy as np

from thermalbures import DampedOscillatorParams, DisplacedThermalState
from thermalbures.dynamics import bures_path_length, evolve, trajectory
from thermalbures.states import bures_distance

params = DampedOscillatorParams(omega=1.0, gamma_down=0.75, gamma_up=0.25)
start = DisplacedThermalState(2.0, 1.0, 1.0)
print(f"bath beta = {params.beta_inf:.6f}")

for s in trajectory(start, params, np.linspace(0, 4, 9)):
    print(f"t = {s.t:3.1f}  p = {s.p:+.5f}  q = {s.q:+.5f}  beta = {s.beta:.5f}  "
          f"speed = {s.speed:.5f}")

# The path is never shorter than the straight-line Bures distance.
end = evolve(start, params, 5.0)
length = bures_path_length(start, params, 0.0, 5.0)
direct = bures_distance(start, end)
print(f"path length {length:.6f} >= distance {direct:.6f}")

# A pure start has infinite initial speed but a finite path length.
print(f"pure start: {bures_path_length(DisplacedThermalState.coherent(1.0, 0.0), params, 0.0, 1.0):.6f}")
