"""Published propagator snapshots at two-decimal print precision.

``G3`` is step 1500 of model 3 (t = 2.25 / Gamma) and ``G4`` is step 1500 of
model 4 (t = 6.75 / Gamma).  Both were printed with a stated normalization
factor of 1.376.
"""

from __future__ import annotations

import numpy as np

PRINT_PRECISION = 0.005
REPORTED_NC = 1.376

G3 = np.array(
    [
        [0.38 - 3.76e-10j, 0.04 + 2.90e-02j, 0.04 - 2.90e-02j, 0.06 - 1.88e-10j],
        [-0.13 + 7.04e-02j, 0.28 - 2.63e-02j, 0.02 + 2.37e-02j, -0.15 - 3.06e-02j],
        [-0.13 - 7.04e-02j, 0.02 - 2.37e-02j, 0.28 + 2.63e-02j, -0.15 + 3.06e-02j],
        [0.62 + 3.77e-10j, -0.04 - 2.90e-02j, -0.04 + 2.90e-02j, 0.94 + 1.87e-10j],
    ]
)

G4 = np.array(
    [
        [0.54 + 4.7e-11j, -1.7e-06 + 5.7e-02j, -1.6e-06 - 5.6e-02j, 0.46 + 7.1e-11j],
        [-0.46 + 5.7e-02j, 3.6e-02 + 6.1e-05j, -1.6e-02 - 5.7e-05j, -0.46 - 5.7e-02j],
        [-0.46 - 5.7e-02j, -1.6e-02 + 5.7e-05j, 3.7e-02 - 6.1e-05j, -0.46 + 5.7e-02j],
        [0.54 - 4.7e-11j, 1.6e-06 - 5.6e-02j, 1.6e-06 + 5.6e-02j, 0.54 - 7.1e-11j],
    ]
)

# gate counts reported for the transpiled 8x8 dilations of G3 and G4
REPORTED_GATE_COUNTS = {"RZ": 153, "SX": 98, "CX": 41}
