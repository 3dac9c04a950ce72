"""Ten-qubit chain model: initializers, ground energy and the braid outcome.

At zero chemical potential every site operator along the arms commutes with
the Hamiltonian, so the protocol only rotates the auxiliary qubit. The
printed overlaps show the state coming back to itself.

    python demos/04_chain_ground_states.py
"""

import numpy as np

from mbsim.circuits import chain_init
from mbsim.experiments import chain_braid_overlaps
from mbsim.models import ChainModelParams, build_chain_hamiltonian
from mbsim.simcore import QuantumState, pauli_to_dense

c = ChainModelParams()
h = pauli_to_dense(build_chain_hamiltonian(c), c.n_qubits)
print("qubits", c.n_qubits, "ground energy", np.linalg.eigvalsh(h)[0])
for s in (1, -1):
    psi = chain_init(s, c).apply(QuantumState.zero(c.n_qubits)).data
    print(f"sign {s:+d}: <H> = {np.real(np.vdot(psi, h @ psi)):.6f}")
print("after the protocol:", chain_braid_overlaps(c, tau=20.0))
