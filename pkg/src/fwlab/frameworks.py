"""PDIs as sample spaces: Born probabilities, event algebras, refinement.

An event algebra is represented lazily as index sets over a PDI; nothing
ever materializes the 2^n projector lattice. Probabilities are carried by
Distribution, which accepts any nonnegative normalized vector (Born is the
canonical but not the only source). The single framework rule shows up
twice: event_probability refuses events from a different framework, and
combine_events refuses to merge events whose frameworks have no common
refinement.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    FrameworkMismatch,
    IncompatibleFrameworks,
    InvalidDistribution,
    MeaninglessCombination,
    NotHermitian,
    NotInAlgebra,
    ValidationError,
)
from .numerics import (
    DEFAULT_TOL,
    Tolerances,
    as_ket,
    as_operator,
    dagger,
    frobenius_norm,
    hermitian_eigendecomposition,
    operator_norm,
)
from .projective import Pdi, Projector, commutes


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semidefinite, unit-trace Hermitian operator."""

    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, m, tol: Tolerances = DEFAULT_TOL) -> "DensityOperator":
        a = as_operator(m)
        herm_err = frobenius_norm(a - dagger(a))
        if herm_err > tol.algebraic:
            raise NotHermitian(f"density operator is not Hermitian: residual {herm_err:.3e}")
        a = (a + dagger(a)) / 2.0
        w, _ = hermitian_eigendecomposition(a, tol)
        if w[-1] < -tol.algebraic:
            raise ValidationError(f"density operator has negative eigenvalue {w[-1]:.3e}")
        tr = float(np.trace(a).real)
        if abs(tr - 1.0) > tol.probability:
            raise ValidationError(f"density operator trace is {tr!r}, expected 1")
        return cls(matrix=a)

    @classmethod
    def pure(cls, ket, tol: Tolerances = DEFAULT_TOL) -> "DensityOperator":
        v = as_ket(ket, tol)
        return cls(matrix=np.outer(v, v.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Event:
    """A subset of a PDI's blocks together with its summed projector."""

    framework_id: str
    indices: tuple[int, ...]
    projector: Projector

    @classmethod
    def of(cls, f: Pdi, indices) -> "Event":
        idx = tuple(sorted(set(int(j) for j in indices)))
        return cls(framework_id=f.framework_id, indices=idx, projector=f.projector_for(idx))


@dataclass(frozen=True)
class Distribution:
    """A probability vector over the blocks of one framework."""

    framework_id: str
    probs: tuple[float, ...]

    @classmethod
    def from_probs(cls, framework_id: str, probs, tol: Tolerances = DEFAULT_TOL) -> "Distribution":
        p = [float(x) for x in probs]
        low = min(p)
        if low < -tol.probability:
            raise InvalidDistribution(f"negative probability {low:.3e} beyond tolerance")
        total = sum(p)
        if abs(total - 1.0) > tol.probability:
            raise InvalidDistribution(f"probabilities sum to {total!r}, expected 1")
        return cls(framework_id=framework_id, probs=tuple(max(x, 0.0) for x in p))


def born_distribution(state, f: Pdi, tol: Tolerances = DEFAULT_TOL) -> Distribution:
    """Born-rule probabilities of a ket or density operator over a PDI."""
    if isinstance(state, DensityOperator):
        if state.dim != f.dim:
            raise DimensionMismatch(f"state dim {state.dim} vs PDI dim {f.dim}")
        probs = [float(np.trace(state.matrix @ b.matrix).real) for b in f.blocks]
    else:
        psi = as_ket(state, tol)
        if psi.shape[0] != f.dim:
            raise DimensionMismatch(f"state dim {psi.shape[0]} vs PDI dim {f.dim}")
        probs = [float(np.vdot(psi, b.matrix @ psi).real) for b in f.blocks]
    return Distribution.from_probs(f.framework_id, probs, tol)


def event_probability(d: Distribution, e: Event, tol: Tolerances = DEFAULT_TOL) -> float:
    """Additive probability of an event: the sum over its block indices."""
    if d.framework_id != e.framework_id:
        raise FrameworkMismatch(
            "event and distribution belong to different frameworks "
            f"({e.framework_id} vs {d.framework_id}); probabilities from incompatible "
            "sample spaces cannot be combined (single framework rule)"
        )
    if any(j >= len(d.probs) for j in e.indices):
        raise IndexError("event index out of range for this distribution")
    return float(sum(d.probs[j] for j in e.indices))


def are_compatible(f: Pdi, g: Pdi, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff every block of f commutes with every block of g."""
    if f.dim != g.dim:
        raise DimensionMismatch(f"PDI dims differ: {f.dim} vs {g.dim}")
    return all(commutes(p, q, tol) for p in f.blocks for q in g.blocks)


def common_refinement(f: Pdi, g: Pdi, tol: Tolerances = DEFAULT_TOL) -> Pdi:
    """The PDI of all nonzero products P_j Q_k of two compatible PDIs.

    Blocks are ordered by (j, k) and labeled "(j,k)". Every event of f and
    of g lies in the refinement's event algebra. Incompatible inputs raise
    IncompatibleFrameworks: there is no sample space refining both.
    """
    if not are_compatible(f, g, tol):
        raise IncompatibleFrameworks(
            "PDIs are incompatible (some blocks do not commute); no common refinement "
            "exists and the single framework rule prohibits combining them"
        )
    blocks = []
    labels = []
    for j, p in enumerate(f.blocks):
        for k, q in enumerate(g.blocks):
            prod = p.matrix @ q.matrix
            prod = (prod + dagger(prod)) / 2.0
            if operator_norm(prod) <= tol.algebraic:
                continue
            blocks.append(Projector.from_matrix(prod, tol))
            labels.append(f"({j},{k})")
    return Pdi.from_blocks(blocks, labels=labels, tol=tol)


def event_in_algebra(p: Projector, f: Pdi, tol: Tolerances = DEFAULT_TOL) -> Event:
    """Express p as a sum of blocks of f, or raise NotInAlgebra.

    Per-block test: P_j p P_j ≈ P_j puts j in the index set, P_j p P_j ≈ 0
    leaves it out, anything else means p straddles block j.
    """
    if p.dim != f.dim:
        raise DimensionMismatch(f"projector dim {p.dim} vs PDI dim {f.dim}")
    indices = []
    for j, b in enumerate(f.blocks):
        comp = b.matrix @ p.matrix @ b.matrix
        if operator_norm(comp - b.matrix) <= tol.algebraic:
            indices.append(j)
        elif operator_norm(comp) <= tol.algebraic:
            continue
        else:
            raise NotInAlgebra(f"projector overlaps block {j} only partially")
    total = f.projector_for(indices)
    resid = operator_norm(total.matrix - p.matrix)
    if resid > tol.algebraic:
        raise NotInAlgebra(f"projector is not a sum of blocks: residual {resid:.3e}")
    return Event(framework_id=f.framework_id, indices=tuple(indices), projector=total)


class FrameworkRegistry:
    """Append-only map from framework_id to Pdi; safe for concurrent readers."""

    def __init__(self) -> None:
        self._pdis: dict[str, Pdi] = {}
        self._lock = threading.Lock()

    def register(self, f: Pdi) -> str:
        fid = f.framework_id
        with self._lock:
            self._pdis.setdefault(fid, f)
        return fid

    def get(self, framework_id: str) -> Pdi:
        try:
            return self._pdis[framework_id]
        except KeyError:
            raise KeyError(f"framework {framework_id} is not registered") from None

    def __contains__(self, framework_id: str) -> bool:
        return framework_id in self._pdis

    def __len__(self) -> int:
        return len(self._pdis)


def combine_events(
    e1: Event,
    e2: Event,
    registry: FrameworkRegistry,
    connective: str = "and",
    tol: Tolerances = DEFAULT_TOL,
) -> Event:
    """AND/OR of two events, inside one Boolean algebra.

    Same framework: plain index-set intersection/union. Different but
    compatible frameworks: both events are lifted into the common refinement
    (which gets registered) and combined there. Incompatible frameworks
    raise MeaninglessCombination.
    """
    if connective not in ("and", "or"):
        raise ValueError(f"connective must be 'and' or 'or', got {connective!r}")
    if e1.framework_id == e2.framework_id:
        f = registry.get(e1.framework_id)
        s1, s2 = set(e1.indices), set(e2.indices)
        combined = s1 & s2 if connective == "and" else s1 | s2
        return Event.of(f, combined)
    f, g = registry.get(e1.framework_id), registry.get(e2.framework_id)
    if f.dim != g.dim or not are_compatible(f, g, tol):
        raise MeaninglessCombination(
            "events belong to incompatible frameworks; the single framework rule "
            "prohibits combining them (the combination is meaningless, not false)"
        )
    refinement = common_refinement(f, g, tol)
    registry.register(refinement)
    lifted1 = event_in_algebra(e1.projector, refinement, tol)
    lifted2 = event_in_algebra(e2.projector, refinement, tol)
    s1, s2 = set(lifted1.indices), set(lifted2.indices)
    combined = s1 & s2 if connective == "and" else s1 | s2
    return Event.of(refinement, combined)
