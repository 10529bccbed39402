"""
Fidelity between displaced thermal states
=========================================

Two oscillator states at temperatures ``1/beta1`` and ``1/beta2``, offset in
phase space by ``(dp, dq)``, have a closed-form transition probability.
"""

import math

import numpy as np

from thermalbures import DisplacedThermalState, bures_distance, transition_probability

# Equal temperatures, offset by (sqrt 3, sqrt 3): P is exactly exp(-1).
ln2 = math.log(2.0)
a = DisplacedThermalState(ln2)
b = DisplacedThermalState(ln2, math.sqrt(3), math.sqrt(3))
print(f"P   = {transition_probability(a, b):.6f}")
print(f"D_B = {bures_distance(a, b):.6f}")

# A coherent state is the beta -> inf limit; it has its own flag.
vacuum = DisplacedThermalState.coherent()
print(f"P(thermal ln2, vacuum) = {transition_probability(a, vacuum):.6f}")

# Distance grows with separation and saturates below sqrt(2).
for r in np.linspace(0, 6, 7):
    d = bures_distance(DisplacedThermalState(1.0), DisplacedThermalState(2.0, r))
    print(f"dp = {r:3.1f}  D_B = {d:.6f}")
