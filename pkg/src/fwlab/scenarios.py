"""Executable one-qubit scenarios: noisy channels and teleportation.

Channel certification operationalizes the two-basis test: a channel is
certified perfect when both the S_z and S_x eigenstates come through with
flip probability and trace-distance perturbation within tol_cert. Checking
those two mutually unbiased bases pins the whole channel down; the
empirical soundness of that claim (Choi distance of every certified
channel) is exercised by the test suite over seeded random channels.

Teleportation is analyzed as a history family in one of two incompatible
frameworks: the intermediate-time sample space is the Bell-outcome PDI on
Alice's two qubits refined with Bob's S_z (or S_x) PDI, preceded by the
input qubit's own S_z (or S_x) PDI and followed by Bob's PDI after the
conditional Pauli correction. Each family is consistent, and within it
Bob's final spin component tracks Alice's input exactly. Asking for the
combined Z-and-X description raises MeaninglessCombination.

All probabilities are computed exactly by linear algebra; sample_outcomes
is a seeded Monte Carlo mode for demonstration only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidChannel, MeaninglessCombination, ValidationError
from .frameworks import DensityOperator, Distribution, are_compatible, common_refinement
from .histories import ConsistencyReport, HistoryFamily, TimeGrid, consistency_check, history_distribution
from .numerics import DEFAULT_TOL, Tolerances, as_ket, dagger, frobenius_norm, identity, kron
from .projective import Pdi, Projector, projector_from_ket

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

KET_Z = (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))
KET_X = (np.array([1, 1], dtype=complex) / np.sqrt(2), np.array([1, -1], dtype=complex) / np.sqrt(2))

# Bell vectors ordered by the two classical bits 00, 01, 10, 11 with the
# conventional corrections I, X, Z, XZ on Bob's qubit.
BELL_KETS = (
    np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2),
    np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2),
)
BELL_CORRECTIONS = (PAULI_I, PAULI_X, PAULI_Z, PAULI_X @ PAULI_Z)

_BASIS_KETS = {"Z": KET_Z, "X": KET_X}


def basis_kets(basis) -> tuple[np.ndarray, np.ndarray]:
    """Eigenkets (+, -) of S_z, S_x, or an arbitrary Bloch direction w."""
    if isinstance(basis, str):
        key = basis.upper()
        if key in _BASIS_KETS:
            return _BASIS_KETS[key]
        raise ValueError(f"unknown basis {basis!r}; use 'Z', 'X', or a Bloch 3-vector")
    w = np.asarray(basis, dtype=float).reshape(-1)
    if w.shape != (3,) or np.linalg.norm(w) == 0:
        raise ValueError("a Bloch direction must be a nonzero 3-vector")
    w = w / np.linalg.norm(w)
    obs = w[0] * PAULI_X + w[1] * PAULI_Y + w[2] * PAULI_Z
    vals, vecs = np.linalg.eigh(obs)
    return vecs[:, 1].copy(), vecs[:, 0].copy()  # eigh sorts ascending; + first


def basis_label(basis) -> str:
    if isinstance(basis, str):
        return basis.upper()
    w = np.asarray(basis, dtype=float).reshape(-1)
    w = w / np.linalg.norm(w)
    return "w(" + ",".join(f"{c:.6g}" for c in w) + ")"


@dataclass(frozen=True, eq=False)
class QubitChannel:
    """A one-qubit CPTP map given by Kraus operators."""

    kraus: tuple[np.ndarray, ...]

    @classmethod
    def from_kraus(cls, kraus, tol: Tolerances = DEFAULT_TOL) -> "QubitChannel":
        ks = tuple(np.asarray(k, dtype=complex) for k in kraus)
        if not ks:
            raise InvalidChannel("a channel needs at least one Kraus operator")
        for k in ks:
            if k.shape != (2, 2):
                raise InvalidChannel(f"Kraus operators must be 2x2, got {k.shape}")
        total = sum(dagger(k) @ k for k in ks)
        err = frobenius_norm(total - identity(2))
        if err > tol.algebraic:
            raise InvalidChannel(f"channel is not trace preserving: ||ΣK†K - I|| = {err:.3e}")
        return cls(kraus=ks)


def identity_channel() -> QubitChannel:
    return QubitChannel(kraus=(PAULI_I.copy(),))


def phase_flip_channel(p: float) -> QubitChannel:
    return QubitChannel.from_kraus((np.sqrt(1 - p) * PAULI_I, np.sqrt(p) * PAULI_Z))


def bit_flip_channel(p: float) -> QubitChannel:
    return QubitChannel.from_kraus((np.sqrt(1 - p) * PAULI_I, np.sqrt(p) * PAULI_X))


def apply_channel(ch: QubitChannel, rho, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """Apply the Kraus map to a density operator (or raw 2x2 matrix)."""
    m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    out = sum(k @ m @ dagger(k) for k in ch.kraus)
    return DensityOperator.from_matrix(out, tol)


def choi_matrix(ch: QubitChannel) -> np.ndarray:
    """Normalized Choi matrix (trace 1); identity channel gives a Bell dyad."""
    j = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[a, b] = 1.0
            j += np.kron(e, sum(k @ e @ dagger(k) for k in ch.kraus))
    return j / 2.0


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    w = np.linalg.eigvalsh(np.asarray(rho) - np.asarray(sigma))
    return 0.5 * float(np.sum(np.abs(w)))


@dataclass(frozen=True)
class FlipReport:
    """Exact flip probabilities of a channel in one measurement basis."""

    basis: str
    p_plus_to_minus: float
    p_minus_to_plus: float


def flip_probabilities(ch: QubitChannel, basis, tol: Tolerances = DEFAULT_TOL) -> FlipReport:
    """tr(P∓ · ch(P±)) for the requested basis; computed exactly, no sampling."""
    plus, minus = basis_kets(basis)
    p_plus = np.outer(plus, plus.conj())
    p_minus = np.outer(minus, minus.conj())
    out_plus = apply_channel(ch, p_plus, tol).matrix
    out_minus = apply_channel(ch, p_minus, tol).matrix
    ptm = float(np.trace(p_minus @ out_plus).real)
    mtp = float(np.trace(p_plus @ out_minus).real)
    for v in (ptm, mtp):
        if v < -tol.probability or v > 1 + tol.probability:
            raise ValidationError(f"flip probability {v!r} outside [0,1]")
    clamp = lambda v: min(max(v, 0.0), 1.0)
    return FlipReport(basis=basis_label(basis), p_plus_to_minus=clamp(ptm), p_minus_to_plus=clamp(mtp))


@dataclass(frozen=True)
class BasisCheck:
    """Per-basis certification evidence: flips plus fixed-point drift."""

    flips: FlipReport
    max_fixed_point_distance: float
    ok: bool


@dataclass(frozen=True)
class CertificationVerdict:
    passed: bool
    checks: tuple[BasisCheck, ...]

    @property
    def failures(self) -> tuple[BasisCheck, ...]:
        return tuple(c for c in self.checks if not c.ok)


def certify_perfect_channel(
    ch: QubitChannel, tol_cert: float, tol: Tolerances = DEFAULT_TOL
) -> CertificationVerdict:
    """Pass iff both S_z and S_x eigenstates survive the channel.

    For each of the two bases the flip probabilities must stay within
    tol_cert and each eigenstate must be a fixed point within tol_cert in
    trace distance. The trace-distance clause matters: a small coherent
    rotation perturbs flip probabilities only quadratically but moves the
    eigenstates linearly, so without it near-unitary errors would slip
    through.
    """
    checks = []
    for basis in ("Z", "X"):
        flips = flip_probabilities(ch, basis, tol)
        plus, minus = basis_kets(basis)
        dist = 0.0
        for ket in (plus, minus):
            p = np.outer(ket, ket.conj())
            dist = max(dist, trace_distance(apply_channel(ch, p, tol).matrix, p))
        ok = (
            flips.p_plus_to_minus <= tol_cert
            and flips.p_minus_to_plus <= tol_cert
            and dist <= tol_cert
        )
        checks.append(BasisCheck(flips=flips, max_fixed_point_distance=dist, ok=ok))
    return CertificationVerdict(passed=all(c.ok for c in checks), checks=tuple(checks))


def random_channel(seed: int, noise_scale: float, tol: Tolerances = DEFAULT_TOL) -> QubitChannel:
    """Seeded CPTP channel interpolating the identity and a random map.

    noise_scale 0 gives exactly the identity channel. Otherwise the output
    mixes the identity with a Haar-ish random CPTP map at weight
    noise_scale and tilts it by a coherent rotation of the same order, so
    sweeps probe both incoherent and coherent error directions.
    """
    if not 0 <= noise_scale <= 1:
        raise ValueError(f"noise_scale must lie in [0,1], got {noise_scale}")
    if noise_scale == 0:
        return identity_channel()
    rng = np.random.default_rng(seed)
    # Random CPTP map from a Stinespring isometry: QR of a Gaussian 8x2 block.
    g = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
    q, _ = np.linalg.qr(g)
    noise_kraus = [q[2 * i : 2 * i + 2, :] for i in range(4)]
    # Coherent tilt: exp(-i * noise_scale * G) for a random Hermitian G, |G| ~ 1.
    h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    h = (h + dagger(h)) / 2.0
    h = h / max(frobenius_norm(h), 1e-12)
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * noise_scale * w)) @ dagger(v)
    s = noise_scale
    kraus = [np.sqrt(1 - s) * u] + [np.sqrt(s) * (k @ u) for k in noise_kraus]
    return QubitChannel.from_kraus(kraus, tol)


def sample_outcomes(dist: Distribution, shots: int, seed: int) -> dict[int, int]:
    """Seeded Monte Carlo draw from a distribution; demonstration only."""
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(len(dist.probs), size=shots, p=np.array(dist.probs) / sum(dist.probs))
    values, counts = np.unique(outcomes, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


@dataclass(frozen=True)
class TeleportReport:
    """Teleportation statistics in one framework (Z or X).

    outcome_probs: the four Bell-outcome probabilities (input independent).
    conditional_match: per outcome, the probability that Bob's corrected
    spin component equals the value Alice's input qubit had before the
    Bell measurement.
    """

    framework: str
    outcome_probs: tuple[float, float, float, float]
    conditional_match: tuple[float, float, float, float]
    consistency: ConsistencyReport


def _one_qubit_basis_pdi(basis: str) -> Pdi:
    plus, minus = basis_kets(basis)
    return Pdi.from_blocks(
        (projector_from_ket(plus), projector_from_ket(minus)),
        labels=(f"{basis.lower()}+", f"{basis.lower()}-"),
    )


def _lifted_pdi(pdi: Pdi, left_dim: int, right_dim: int, labels=None) -> Pdi:
    blocks = []
    for b in pdi.blocks:
        m = kron(identity(left_dim), b.matrix, identity(right_dim))
        blocks.append(Projector(matrix=m, rank=b.rank * left_dim * right_dim))
    return Pdi.from_blocks(blocks, labels=labels if labels is not None else pdi.labels)


def teleport_family(input_ket, framework: str, tol: Tolerances = DEFAULT_TOL) -> HistoryFamily:
    """The three-time teleportation history family in the Z or X framework.

    Qubit order: Alice's input, Alice's Bell half, Bob. Times: the input
    qubit's own basis PDI, then the Bell-outcome PDI refined with Bob's
    basis PDI, then Bob's basis PDI again after the correction unitary.
    """
    basis = framework.upper()
    psi = as_ket(input_ket, tol)
    if psi.shape[0] != 2:
        raise ValueError("teleportation takes a one-qubit input ket")
    initial = kron(psi.reshape(2, 1), BELL_KETS[0].reshape(4, 1)).reshape(-1)

    single = _one_qubit_basis_pdi(basis)
    alice_pdi = _lifted_pdi(single, 1, 4)
    bob_pdi = _lifted_pdi(single, 4, 1)
    bell_pdi = Pdi.from_blocks(
        tuple(
            Projector(matrix=kron(np.outer(b, b.conj()), identity(2)), rank=2)
            for b in BELL_KETS
        ),
        labels=("00", "01", "10", "11"),
    )
    intermediate = common_refinement(bell_pdi, bob_pdi, tol)
    if intermediate.size != 8:  # every Bell x Bob product is nonzero
        raise ValidationError("unexpected refinement size in teleport family")

    correction = sum(
        kron(np.outer(b, b.conj()), c) for b, c in zip(BELL_KETS, BELL_CORRECTIONS)
    )
    eye8 = identity(8)
    grid = TimeGrid.build((0.0, 1.0, 2.0, 3.0), (eye8, eye8, correction), tol)
    return HistoryFamily.build(initial, grid, (alice_pdi, intermediate, bob_pdi), tol)


def teleport_analysis(
    input_ket,
    framework: str,
    tol_consistency: float = 1e-10,
    tol: Tolerances = DEFAULT_TOL,
) -> TeleportReport:
    """Analyze the teleportation protocol in a single framework.

    framework is "Z" or "X"; asking for both at once ("ZX") is refused, the
    two intermediate descriptions have no common refinement.
    """
    choice = framework.upper()
    if choice in ("ZX", "XZ", "Z+X", "X+Z", "BOTH"):
        # The two candidate intermediate sample spaces genuinely fail to commute.
        assert not are_compatible(_one_qubit_basis_pdi("Z"), _one_qubit_basis_pdi("X"), tol)
        raise MeaninglessCombination(
            "the combined Z-and-X intermediate description is meaningless "
            "(single framework rule): the S_z and S_x sample spaces are incompatible "
            "and cannot be combined, only compared across separate analyses"
        )
    if choice not in ("Z", "X"):
        raise ValueError(f"framework must be 'Z' or 'X', got {framework!r}")

    fam = teleport_family(input_ket, choice, tol)
    report = consistency_check(fam, tol_consistency)
    probs = history_distribution(fam, tol_consistency, tol=tol)

    outcome_probs = [0.0] * 4
    matched = [0.0] * 4
    for (a, i, b2), p in probs.items():
        k = i // 2  # intermediate block index is (bell outcome, bob value)
        outcome_probs[k] += p
        if b2 == a:
            matched[k] += p
    conditional = tuple(
        m / o if o > tol.probability else 0.0 for m, o in zip(matched, outcome_probs)
    )
    return TeleportReport(
        framework=choice,
        outcome_probs=tuple(outcome_probs),
        conditional_match=conditional,
        consistency=report,
    )
