"""Families of histories, chain operators, and consistency conditions.

A history picks one block from each time's PDI; its chain operator is the
time-ordered product of those projectors interleaved with the interval
unitaries. The history sample space is never materialized as a tensor
product: chain operators are built by sequential multiplication, which
gives identical numbers exponentially cheaper.

The decoherence functional is D(α,β) = tr(C_α ρ C_β†); its diagonal gives
the extended-Born weight of each history. A family only qualifies as a
framework when the off-diagonal terms vanish: by default the strong
condition |D(α,β)| = 0 for α ≠ β, with a "weak" switch that checks the
real part only. history_distribution refuses to assign probabilities to
an inconsistent family.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InconsistentFamily,
    TooManyHistories,
    ValidationError,
)
from .frameworks import DensityOperator
from .numerics import DEFAULT_TOL, Tolerances, as_ket, dagger, is_unitary
from .projective import Pdi

HISTORY_CAP = 4096
DEFAULT_CONSISTENCY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing time labels plus one unitary per interval."""

    times: tuple[float, ...]
    unitaries: tuple[np.ndarray, ...]

    @classmethod
    def build(cls, times, unitaries, tol: Tolerances = DEFAULT_TOL) -> "TimeGrid":
        times = tuple(float(t) for t in times)
        unitaries = tuple(np.asarray(u, dtype=complex) for u in unitaries)
        if len(times) < 2:
            raise ValidationError("a time grid needs at least two times")
        if any(t1 >= t2 for t1, t2 in zip(times, times[1:])):
            raise ValidationError("times must be strictly increasing")
        if len(unitaries) != len(times) - 1:
            raise ValidationError("need exactly one unitary per time interval")
        for i, u in enumerate(unitaries):
            if not is_unitary(u, tol):
                raise ValidationError(f"interval operator {i} is not unitary")
        return cls(times=times, unitaries=unitaries)

    @classmethod
    def trivial(cls, dim: int, steps: int) -> "TimeGrid":
        eye = np.eye(dim, dtype=complex)
        return cls(times=tuple(float(t) for t in range(steps + 1)), unitaries=(eye,) * steps)


@dataclass(frozen=True, eq=False)
class HistoryFamily:
    """Initial state, dynamics, and one event PDI per time t_1..t_f."""

    initial: np.ndarray | DensityOperator
    grid: TimeGrid
    event_pdis: tuple[Pdi, ...]

    @classmethod
    def build(cls, initial, grid: TimeGrid, event_pdis, tol: Tolerances = DEFAULT_TOL) -> "HistoryFamily":
        event_pdis = tuple(event_pdis)
        if isinstance(initial, DensityOperator):
            dim = initial.dim
        else:
            initial = as_ket(initial, tol)
            dim = initial.shape[0]
        if len(event_pdis) != len(grid.times) - 1:
            raise ValidationError("need exactly one PDI per time after t_0")
        for u in grid.unitaries:
            if u.shape[0] != dim:
                raise DimensionMismatch(f"unitary dim {u.shape[0]} vs state dim {dim}")
        for f in event_pdis:
            if f.dim != dim:
                raise DimensionMismatch(f"PDI dim {f.dim} vs state dim {dim}")
        return cls(initial=initial, grid=grid, event_pdis=event_pdis)

    @property
    def dim(self) -> int:
        return self.initial.dim if isinstance(self.initial, DensityOperator) else self.initial.shape[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.event_pdis)

    @property
    def history_count(self) -> int:
        n = 1
        for s in self.shape:
            n *= s
        return n

    def histories(self):
        """All history index tuples, lexicographic."""
        return itertools.product(*(range(s) for s in self.shape))

    def initial_factor(self) -> np.ndarray:
        """L with ρ = L L†: the ket as a column for pure states, V√λ otherwise."""
        if isinstance(self.initial, DensityOperator):
            w, v = np.linalg.eigh(self.initial.matrix)
            keep = w > 1e-15
            return v[:, keep] * np.sqrt(w[keep])
        return self.initial.reshape(-1, 1)


@dataclass(frozen=True)
class ConsistencyReport:
    """Outcome of the all-pairs off-diagonal scan of a family."""

    max_offdiag: float
    offending_pairs: tuple[tuple[tuple[int, ...], tuple[int, ...], complex], ...]
    consistent: bool
    tolerance: float
    condition: str  # "strong" (|D|) or "weak" (|Re D|)
    history_count: int


def _check_alpha(fam: HistoryFamily, alpha) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    shape = fam.shape
    if len(alpha) != len(shape):
        raise IndexError(f"history needs {len(shape)} indices, got {len(alpha)}")
    for a, s in zip(alpha, shape):
        if a < 0 or a >= s:
            raise IndexError(f"history index {a} out of range for PDI of size {s}")
    return alpha


def chain_operator(fam: HistoryFamily, alpha) -> np.ndarray:
    """C_α: last projector · last unitary · ... · first projector · first unitary."""
    alpha = _check_alpha(fam, alpha)
    c = np.eye(fam.dim, dtype=complex)
    for u, f, a in zip(fam.grid.unitaries, fam.event_pdis, alpha):
        c = f.blocks[a].matrix @ (u @ c)
    return c


def decoherence_functional(fam: HistoryFamily, alpha, beta) -> complex:
    """D(α,β) = tr(C_α ρ C_β†); the diagonal D(α,α) is real and nonnegative."""
    c_a = chain_operator(fam, alpha)
    c_b = chain_operator(fam, beta)
    ell = fam.initial_factor()
    wa = c_a @ ell
    wb = c_b @ ell
    return complex(np.sum(wa * wb.conj()))


def _branch_matrix(fam: HistoryFamily) -> tuple[list[tuple[int, ...]], np.ndarray]:
    # Rows are flattened C_α L; the Gram matrix W W† is the decoherence functional.
    ell = fam.initial_factor()
    alphas = list(fam.histories())
    if len(alphas) > HISTORY_CAP:
        raise TooManyHistories(f"{len(alphas)} histories exceeds the cap of {HISTORY_CAP}")
    rows = np.empty((len(alphas), ell.size), dtype=complex)
    for i, alpha in enumerate(alphas):
        rows[i] = (chain_operator(fam, alpha) @ ell).reshape(-1)
    return alphas, rows


def consistency_check(
    fam: HistoryFamily,
    tol_consistency: float = DEFAULT_CONSISTENCY_TOL,
    condition: str = "strong",
) -> ConsistencyReport:
    """Scan |D(α,β)| over all α ≠ β; consistent iff the max is within tolerance.

    The scan is a pure function of the family: results do not depend on
    evaluation order. Offending pairs are reported worst first.
    """
    if condition not in ("strong", "weak"):
        raise ValueError(f"condition must be 'strong' or 'weak', got {condition!r}")
    alphas, rows = _branch_matrix(fam)
    gram = rows @ rows.conj().T  # gram[a, b] = D(alpha_a, alpha_b)
    offdiag = gram.copy()
    np.fill_diagonal(offdiag, 0.0)
    magnitudes = np.abs(offdiag) if condition == "strong" else np.abs(offdiag.real)
    max_offdiag = float(magnitudes.max()) if len(alphas) > 1 else 0.0
    offenders = []
    if max_offdiag > tol_consistency:
        bad = np.argwhere(magnitudes > tol_consistency)
        bad = sorted(map(tuple, bad), key=lambda ij: (-magnitudes[ij], ij))
        offenders = [(alphas[i], alphas[j], complex(gram[i, j])) for i, j in bad[:64]]
    return ConsistencyReport(
        max_offdiag=max_offdiag,
        offending_pairs=tuple(offenders),
        consistent=max_offdiag <= tol_consistency,
        tolerance=tol_consistency,
        condition=condition,
        history_count=len(alphas),
    )


def history_distribution(
    fam: HistoryFamily,
    tol_consistency: float = DEFAULT_CONSISTENCY_TOL,
    condition: str = "strong",
    tol: Tolerances = DEFAULT_TOL,
) -> dict[tuple[int, ...], float]:
    """Extended-Born probabilities Pr(α) = D(α,α) for a consistent family.

    Histories with vanishing chain operator are retained at probability 0 so
    the index bookkeeping matches the full product sample space. Raises
    InconsistentFamily when the family is not an acceptable framework.
    """
    report = consistency_check(fam, tol_consistency, condition)
    if not report.consistent:
        raise InconsistentFamily(
            f"family fails the {report.condition} consistency condition "
            f"(max off-diagonal {report.max_offdiag:.3e} > {tol_consistency:.3e}); "
            "the extended Born rule does not apply"
        )
    alphas, rows = _branch_matrix(fam)
    weights = np.einsum("ij,ij->i", rows, rows.conj()).real
    total = float(weights.sum())
    if abs(total - 1.0) > max(tol.probability, 1e-12) * max(1, len(alphas)):
        raise ValidationError(f"history weights sum to {total!r}, expected 1")
    return {alpha: max(float(w), 0.0) for alpha, w in zip(alphas, weights)}
