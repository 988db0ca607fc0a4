"""Projectors and projective decompositions of the identity (PDIs).

A PDI is the quantum sample space: an ordered set of mutually orthogonal
Hermitian projectors summing to the identity. Spectral construction groups
eigenvalues that fall within the degeneracy tolerance into a single block,
so a degenerate observable yields large-rank blocks (the toy model of a
coarse-grained, quasiclassical alternative).

Conjunction follows the commuting-only rule: the product of commuting
projectors is a value (possibly the zero projector, the property that is
always false), while the product of noncommuting projectors is not a
projector at all and raising IncompatibleProjectors marks the conjunction
as meaningless rather than false.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompatibleProjectors, NotHermitian, ValidationError
from .numerics import (
    DEFAULT_TOL,
    Tolerances,
    as_ket,
    as_operator,
    check_same_dim,
    dagger,
    frobenius_norm,
    hermitian_eigendecomposition,
    identity,
    operator_norm,
)

# Matrix entries are quantized to this grid before hashing so that two PDIs
# built through different floating-point routes get the same framework id.
_HASH_DECIMALS = 9


@dataclass(frozen=True, eq=False)
class Projector:
    """A validated Hermitian idempotent matrix. rank == round(trace)."""

    matrix: np.ndarray
    rank: int

    @classmethod
    def from_matrix(cls, m, tol: Tolerances = DEFAULT_TOL) -> "Projector":
        a = as_operator(m)
        herm_err = frobenius_norm(a - dagger(a))
        if herm_err > tol.algebraic:
            raise NotHermitian(f"projector is not Hermitian: residual {herm_err:.3e}")
        a = (a + dagger(a)) / 2.0
        idem_err = frobenius_norm(a @ a - a)
        if idem_err > tol.algebraic:
            raise ValidationError(f"matrix is not idempotent: ||P² - P||_F = {idem_err:.3e}")
        tr = float(np.trace(a).real)
        rank = round(tr)
        if abs(tr - rank) > tol.algebraic:
            raise ValidationError(f"projector trace {tr!r} is not an integer within tolerance")
        return cls(matrix=a, rank=rank)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_zero(self) -> bool:
        return self.rank == 0

    def __repr__(self) -> str:
        return f"Projector(dim={self.dim}, rank={self.rank})"


def projector_from_ket(phi, tol: Tolerances = DEFAULT_TOL) -> Projector:
    """Rank-one projector |φ⟩⟨φ| from a normalized ket."""
    v = as_ket(phi, tol)
    return Projector(matrix=np.outer(v, v.conj()), rank=1)


def negation(p: Projector) -> Projector:
    """NOT p, the projector I - P. Involutive."""
    return Projector(matrix=identity(p.dim) - p.matrix, rank=p.dim - p.rank)


def commutator_norm(p: Projector, q: Projector) -> float:
    """Spectral norm of PQ - QP."""
    check_same_dim(p.matrix, q.matrix)
    return operator_norm(p.matrix @ q.matrix - q.matrix @ p.matrix)


def commutes(p: Projector, q: Projector, tol: Tolerances = DEFAULT_TOL) -> bool:
    return commutator_norm(p, q) <= tol.algebraic


def conjunction(p: Projector, q: Projector, tol: Tolerances = DEFAULT_TOL) -> Projector:
    """p AND q for commuting projectors: the product PQ, possibly zero.

    The zero result is a legitimate value (the always-false property).
    Noncommuting inputs raise IncompatibleProjectors: that conjunction is
    meaningless, which is a different thing from being always false.
    """
    cnorm = commutator_norm(p, q)
    if cnorm > tol.algebraic:
        raise IncompatibleProjectors(
            "conjunction is meaningless (single framework rule): projectors do not "
            f"commute (commutator norm {cnorm:.3g}); this is not the zero projector"
        )
    prod = p.matrix @ q.matrix
    prod = (prod + dagger(prod)) / 2.0
    if frobenius_norm(prod) <= tol.algebraic:
        d = p.dim
        return Projector(matrix=np.zeros((d, d), dtype=complex), rank=0)
    return Projector.from_matrix(prod, tol)


def _quantized_bytes(m: np.ndarray) -> bytes:
    re = np.round(m.real, _HASH_DECIMALS) + 0.0
    im = np.round(m.imag, _HASH_DECIMALS) + 0.0
    return re.tobytes() + im.tobytes()


@dataclass(frozen=True, eq=False)
class Pdi:
    """Projective decomposition of the identity: the quantum sample space.

    blocks are mutually orthogonal projectors summing to I; labels (optional)
    carry eigenvalues or user names, one per block. framework_id is a
    structural hash of the block set, so two separately constructed equal
    PDIs are the same framework.
    """

    dim: int
    blocks: tuple[Projector, ...]
    labels: tuple | None = None
    _fid: list = field(default_factory=list, repr=False, compare=False)

    @classmethod
    def from_blocks(
        cls, blocks, labels=None, tol: Tolerances = DEFAULT_TOL
    ) -> "Pdi":
        blocks = tuple(blocks)
        if not blocks:
            raise ValidationError("a PDI needs at least one block")
        dim = blocks[0].dim
        for b in blocks:
            check_same_dim(b.matrix, blocks[0].matrix)
            if b.rank < 1:
                raise ValidationError("a PDI may not contain a zero block")
        total = sum(b.matrix for b in blocks)
        sum_err = frobenius_norm(total - identity(dim))
        if sum_err > tol.algebraic:
            raise ValidationError(f"blocks do not sum to identity: residual {sum_err:.3e}")
        for j in range(len(blocks)):
            for k in range(j + 1, len(blocks)):
                ortho = operator_norm(blocks[j].matrix @ blocks[k].matrix)
                if ortho > tol.algebraic:
                    raise ValidationError(
                        f"blocks {j} and {k} are not orthogonal: ||PjPk|| = {ortho:.3e}"
                    )
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != len(blocks):
                raise ValidationError("need exactly one label per block")
        return cls(dim=dim, blocks=blocks, labels=labels)

    @classmethod
    def trivial(cls, dim: int) -> "Pdi":
        """The one-block PDI {I}: the sample space with a single alternative."""
        return cls(dim=dim, blocks=(Projector(matrix=identity(dim), rank=dim),))

    @property
    def size(self) -> int:
        return len(self.blocks)

    @property
    def framework_id(self) -> str:
        if not self._fid:
            h = hashlib.sha256()
            h.update(f"pdi:{self.dim}:".encode())
            for chunk in sorted(_quantized_bytes(b.matrix) for b in self.blocks):
                h.update(chunk)
            self._fid.append(h.hexdigest()[:16])
        return self._fid[0]

    def projector_for(self, indices) -> Projector:
        """Sum of the indexed blocks; the empty set gives the zero projector."""
        idx = sorted(set(indices))
        if any(j < 0 or j >= self.size for j in idx):
            raise IndexError(f"block index out of range for PDI of size {self.size}")
        m = np.zeros((self.dim, self.dim), dtype=complex)
        rank = 0
        for j in idx:
            m += self.blocks[j].matrix
            rank += self.blocks[j].rank
        return Projector(matrix=m, rank=rank)

    def label_of(self, j: int):
        return self.labels[j] if self.labels is not None else j

    def __repr__(self) -> str:
        return f"Pdi(dim={self.dim}, blocks={self.size}, labels={self.labels})"


@dataclass(frozen=True, eq=False)
class Observable:
    """A Hermitian operator, validated at construction."""

    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, m, tol: Tolerances = DEFAULT_TOL) -> "Observable":
        a = as_operator(m)
        err = frobenius_norm(a - dagger(a))
        if err > tol.algebraic:
            raise NotHermitian(f"observable is not Hermitian: residual {err:.3e}")
        return cls(matrix=a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _group_descending(eigenvalues: np.ndarray, gap: float) -> list[list[int]]:
    # Single-linkage on the real line: split wherever a consecutive gap exceeds `gap`.
    groups: list[list[int]] = [[0]]
    for i in range(1, len(eigenvalues)):
        if eigenvalues[i - 1] - eigenvalues[i] > gap:
            groups.append([i])
        else:
            groups[-1].append(i)
    return groups


def spectral_pdi(a, tol: Tolerances = DEFAULT_TOL) -> Pdi:
    """PDI of a Hermitian observable, one block per distinct eigenvalue.

    Eigenvalues within tol.degeneracy of each other (single linkage) merge
    into one block labeled by their mean; blocks come out sorted by
    descending label. Near-degenerate but genuinely distinct eigenvalues
    that fall inside the degeneracy gap are merged by policy, which trades
    reconstruction accuracy for block stability.
    """
    matrix = a.matrix if isinstance(a, Observable) else as_operator(a)
    w, v = hermitian_eigendecomposition(matrix, tol)
    blocks = []
    labels = []
    for group in _group_descending(w, tol.degeneracy):
        vecs = v[:, group]
        p = vecs @ dagger(vecs)
        p = (p + dagger(p)) / 2.0
        if frobenius_norm(p @ p - p) > tol.algebraic:  # pragma: no cover - eigh output is clean
            pw, pv = hermitian_eigendecomposition(p, tol)
            keep = pv[:, pw > 0.5]
            p = keep @ dagger(keep)
        blocks.append(Projector(matrix=p, rank=len(group)))
        labels.append(float(np.mean(w[group])))
    return Pdi.from_blocks(blocks, labels=labels, tol=tol)
