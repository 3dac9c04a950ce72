"""Full braid, first noiseless against the exact propagator, then with idle noise.

    python demos/02_braid_and_delays.py
"""

import numpy as np

from mbsim.experiments import braid_bias, braid_probabilities, exact_braid_probabilities, load_config, run
from mbsim.models import TriJunctionParams
from mbsim.noise import NoiseModel

p = TriJunctionParams()
print("exact evolution     bias", round(braid_bias(exact_braid_probabilities(p), 1), 3))
for flavor in ("basis", "scaled"):
    probs = braid_probabilities(p, flavor, 1, NoiseModel.ideal())
    print(f"noiseless {flavor:9} bias {braid_bias(probs, 1):.3f}  P+ + P- = {probs[1] + probs[-1]:.3f}")

# Idle time after every two-qubit gate washes the braid signal out.
rec = run(load_config({"experiment": "braid", "shots": 0, "sweep": {"values": list(np.arange(0, 301, 50))}}))
for r in rec.rows:
    if r["sign"] == "+":
        print(f"delay {r['delay_ns']:5.0f} ns  bias {r['bias']:+.3f}")
