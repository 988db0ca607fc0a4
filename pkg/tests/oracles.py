"""Independent oracles used to freeze expected values.

Everything here is written directly against numpy, with no imports from
the package under test, so these stay valid cross-checks rather than
mirrors of the implementation.
"""
import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

KET_Z = (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))
KET_X = (np.array([1, 1], dtype=complex) / np.sqrt(2), np.array([1, -1], dtype=complex) / np.sqrt(2))

# Bell vectors ordered by the two-bit outcome: 00, 01, 10, 11.
BELL = (
    np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2),
    np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2),
)
CORRECTIONS = (I2, X, Z, X @ Z)


def dyad(v):
    return np.outer(v, v.conj())


def apply_kraus(kraus, rho):
    """Direct channel application: sum of K rho K†."""
    return sum(k @ rho @ k.conj().T for k in kraus)


def choi(kraus):
    """Normalized Choi matrix (trace 1); the identity channel gives a Bell dyad."""
    j = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[a, b] = 1.0
            j += np.kron(e, apply_kraus(kraus, e))
    return j / 2.0


def trace_distance(rho, sigma):
    w = np.linalg.eigvalsh(rho - sigma)
    return 0.5 * float(np.sum(np.abs(w)))


def teleport_statevector(psi):
    """Exact 3-qubit teleportation: Bell measurement, then Pauli correction.

    Qubit 0 carries the input, qubits 1-2 share a Bell pair, Bob holds
    qubit 2. Returns (outcome_probs, bob_states): the four Bell-outcome
    probabilities and Bob's post-correction density matrix per outcome.
    """
    psi = np.asarray(psi, dtype=complex)
    state = np.kron(psi, BELL[0])
    probs = []
    bob_states = []
    for k in range(4):
        proj = np.kron(dyad(BELL[k]), I2)
        branch = proj @ state
        p = float(np.vdot(branch, branch).real)
        probs.append(p)
        if p < 1e-15:
            bob_states.append(np.zeros((2, 2), dtype=complex))
            continue
        branch = (np.kron(np.eye(4, dtype=complex), CORRECTIONS[k]) @ branch) / np.sqrt(p)
        rho = np.outer(branch, branch.conj()).reshape(4, 2, 4, 2)
        bob_states.append(np.trace(rho, axis1=0, axis2=2))
    return np.array(probs), bob_states


def bloch_grid(n):
    """n kets spread over the Bloch sphere by a Fibonacci lattice."""
    golden = (1 + np.sqrt(5)) / 2
    kets = []
    for i in range(n):
        cos_theta = 1 - 2 * (i + 0.5) / n
        theta = np.arccos(cos_theta)
        phi = 2 * np.pi * i / golden
        kets.append(
            np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=complex)
        )
    return kets
