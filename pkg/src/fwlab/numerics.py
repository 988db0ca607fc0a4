"""Dense complex linear algebra kernel for desk-scale dimensions (d <= 64).

Operators are plain 2-D complex128 numpy arrays, kets are 1-D complex128
arrays; `as_operator` / `as_ket` are the validating entry points. Closeness
checks use the Frobenius norm for cheap identity tests (Hermiticity,
unitarity sums) and the spectral norm where "operator closeness" semantics
matter; each public function documents which it uses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotNormalized, ValidationError


@dataclass(frozen=True)
class Tolerances:
    """Numerical policy knobs.

    algebraic: threshold for operator identities (Hermiticity, idempotency, ...).
    degeneracy: gap below which eigenvalues are merged into one spectral block.
    probability: threshold for normalization / nonnegativity of probabilities.
    """

    algebraic: float = 1e-10
    degeneracy: float = 1e-8
    probability: float = 1e-12

    def __post_init__(self) -> None:
        for name in ("algebraic", "degeneracy", "probability"):
            if getattr(self, name) < 0:
                raise ValidationError(f"tolerance {name} must be >= 0")
        if self.degeneracy <= self.algebraic:
            raise ValidationError("degeneracy tolerance must exceed algebraic tolerance")


DEFAULT_TOL = Tolerances()


def as_operator(m) -> np.ndarray:
    """Coerce to a square, finite, complex128 matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValidationError("matrix entries must be finite")
    return a


def as_ket(v, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Coerce to a 1-D complex128 unit vector; raises NotNormalized otherwise."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    if a.size == 0:
        raise ValidationError("ket must have positive dimension")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValidationError("ket amplitudes must be finite")
    norm = np.linalg.norm(a)
    if abs(norm - 1.0) > max(tol.probability, 1e-12):
        raise NotNormalized(f"ket norm is {norm!r}, expected 1")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def kron(*ms: np.ndarray) -> np.ndarray:
    """Tensor product of one or more operators, left factor most significant."""
    out = np.asarray(ms[0], dtype=complex)
    for m in ms[1:]:
        out = np.kron(out, m)
    return out


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value (spectral norm)."""
    a = as_operator(m)
    if a.shape[0] == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def is_hermitian(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Frobenius-norm Hermiticity test."""
    a = as_operator(m)
    return frobenius_norm(a - dagger(a)) <= tol.algebraic


def is_unitary(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ||m†m - I|| <= tol.algebraic in spectral norm."""
    a = as_operator(m)
    return operator_norm(dagger(a) @ a - identity(a.shape[0])) <= tol.algebraic


def hermitian_eigendecomposition(
    m: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending, real) and orthonormal eigenvector columns.

    Deterministic for a fixed input: the solver path contains no RNG.
    Raises NotHermitian if ||m - m†||_F exceeds tol.algebraic, NoConvergence
    if the underlying solver gives up.
    """
    a = as_operator(m)
    if not is_hermitian(a, tol):
        raise NotHermitian(
            f"matrix is not Hermitian: ||m - m†||_F = {frobenius_norm(a - dagger(a)):.3e}"
        )
    try:
        w, v = np.linalg.eigh((a + dagger(a)) / 2.0)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails at d<=64
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(w)[::-1]
    return w[order].astype(float), v[:, order].astype(complex)


def check_same_dim(a: np.ndarray, b: np.ndarray) -> int:
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a.shape[0]
