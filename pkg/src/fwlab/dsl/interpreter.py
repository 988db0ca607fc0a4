"""Executes a parsed scenario against the core modules.

Declarations are materialized in order; any invariant violation there is a
source-level failure (kind "physics" or "dimension") bound to the
declaring line, and so is a dimension mismatch inside a query. Guard
errors raised while answering a query (meaningless conjunction,
incompatible refinement, inconsistent family, ...) are not failures: they
are the answer, recorded on the query's report row.
"""
from __future__ import annotations

import numpy as np

from .. import frameworks as fw
from .. import histories as hi
from .. import scenarios as sc
from ..errors import (
    DimensionMismatch,
    FwlabError,
    SingleFrameworkRuleError,
    ValidationError,
)
from ..numerics import Tolerances, is_unitary
from ..projective import Pdi, Projector, commutator_norm, conjunction, spectral_pdi
from .ast import (
    ChannelCheckQuery,
    ChannelDecl,
    CompatQuery,
    ConjQuery,
    ConsistentQuery,
    EventProbQuery,
    FamilyDecl,
    HistProbQuery,
    OpDecl,
    PdiBlocksDecl,
    PdiFromDecl,
    ProbQuery,
    RefineQuery,
    ScenarioAst,
    ScenarioRunError,
    SourceError,
    SpaceDecl,
    StateDecl,
    TeleportQuery,
)
from .report import REPORT_VERSION, QueryRecord, Report

CONSTANT_MATRICES = {
    "I2": sc.PAULI_I,
    "X": sc.PAULI_X,
    "Y": sc.PAULI_Y,
    "Z": sc.PAULI_Z,
    "H": sc.HADAMARD,
}

DEFAULT_CONSISTENCY = 1e-10
DEFAULT_CERT = 1e-9


def _complex_pair(c: complex) -> list[float]:
    return [float(c.real), float(c.imag)]


def _matrix_pairs(m: np.ndarray) -> list:
    return [[_complex_pair(complex(v)) for v in row] for row in np.asarray(m)]


class _Env:
    def __init__(self, tol: Tolerances):
        self.tol = tol
        self.values: dict[str, object] = {}
        self.registry = fw.FrameworkRegistry()

    def op(self, name: str) -> np.ndarray:
        return self.values[name]

    def state(self, name: str) -> np.ndarray:
        return self.values[name]

    def pdi(self, name: str) -> Pdi:
        return self.values[name]

    def family(self, name: str) -> hi.HistoryFamily:
        return self.values[name]

    def channel(self, name: str) -> sc.QubitChannel:
        return self.values[name]


def _source_error(line: int, exc: Exception) -> ScenarioRunError:
    kind = "dimension" if isinstance(exc, DimensionMismatch) else "physics"
    return ScenarioRunError(SourceError(line=line, column=1, message=str(exc), kind=kind))


def _declare(env: _Env, node) -> None:
    tol = env.tol
    if isinstance(node, SpaceDecl):
        env.values[node.name] = node.dim
    elif isinstance(node, OpDecl):
        if node.const is not None:
            m = CONSTANT_MATRICES[node.const].copy()
        else:
            m = np.array(node.matrix, dtype=complex)
            if m.shape[0] != m.shape[1]:
                raise DimensionMismatch(
                    f"operator '{node.name}' must be square, got {m.shape[0]}x{m.shape[1]}"
                )
        env.values[node.name] = m
    elif isinstance(node, StateDecl):
        v = np.array(node.amplitudes, dtype=complex)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise ValidationError(f"state '{node.name}' is the zero vector")
        env.values[node.name] = v / norm
    elif isinstance(node, PdiFromDecl):
        env.values[node.name] = spectral_pdi(env.op(node.op), tol)
        env.registry.register(env.values[node.name])
    elif isinstance(node, PdiBlocksDecl):
        blocks = tuple(Projector.from_matrix(env.op(w), tol) for w in node.ops)
        env.values[node.name] = Pdi.from_blocks(blocks, labels=node.ops, tol=tol)
        env.registry.register(env.values[node.name])
    elif isinstance(node, FamilyDecl):
        unitaries = []
        pdis = []
        for u_name, f_name in node.steps:
            u = env.op(u_name)
            if not is_unitary(u, tol):
                raise ValidationError(f"operator '{u_name}' is not unitary")
            unitaries.append(u)
            pdis.append(env.pdi(f_name))
        grid = hi.TimeGrid.build(range(len(node.steps) + 1), unitaries, tol)
        env.values[node.name] = hi.HistoryFamily.build(env.state(node.init), grid, pdis, tol)
    elif isinstance(node, ChannelDecl):
        for w in node.ops:
            if env.op(w).shape != (2, 2):
                raise DimensionMismatch(f"Kraus operator '{w}' must be 2x2")
        env.values[node.name] = sc.QubitChannel.from_kraus([env.op(w) for w in node.ops], tol)
    else:  # pragma: no cover
        raise TypeError(f"unknown declaration {type(node).__name__}")


def _error_payload(exc: Exception) -> dict:
    label = (
        "meaningless (single framework rule)"
        if isinstance(exc, SingleFrameworkRuleError)
        else "error"
    )
    return {"type": type(exc).__name__, "message": str(exc), "label": label}


def _run_query(env: _Env, node, tol_consistency: float, tol_cert: float) -> QueryRecord:
    tol = env.tol
    if isinstance(node, ProbQuery):
        kind, inputs = "prob", {"state": node.state, "pdi": node.pdi}
        def compute():
            d = fw.born_distribution(env.state(node.state), env.pdi(node.pdi), tol)
            return {"probs": list(d.probs)}
    elif isinstance(node, EventProbQuery):
        kind = "eventprob"
        inputs = {"state": node.state, "pdi": node.pdi, "indices": list(node.indices)}
        def compute():
            f = env.pdi(node.pdi)
            d = fw.born_distribution(env.state(node.state), f, tol)
            e = fw.Event.of(f, node.indices)
            return {"indices": list(e.indices), "probability": fw.event_probability(d, e, tol)}
    elif isinstance(node, CompatQuery):
        kind, inputs = "compat", {"left": node.left, "right": node.right}
        def compute():
            f, g = env.pdi(node.left), env.pdi(node.right)
            if f.dim != g.dim:
                raise DimensionMismatch(f"PDI dims differ: {f.dim} vs {g.dim}")
            worst = max(commutator_norm(p, q) for p in f.blocks for q in g.blocks)
            return {
                "compatible": bool(worst <= tol.algebraic),
                "max_commutator_norm": float(worst),
            }
    elif isinstance(node, RefineQuery):
        kind, inputs = "refine", {"left": node.left, "right": node.right}
        def compute():
            ref = fw.common_refinement(env.pdi(node.left), env.pdi(node.right), tol)
            env.registry.register(ref)
            return {
                "blocks": ref.size,
                "labels": list(ref.labels),
                "ranks": [b.rank for b in ref.blocks],
            }
    elif isinstance(node, ConjQuery):
        kind, inputs = "conj", {"left": node.left, "right": node.right}
        def compute():
            p = Projector.from_matrix(env.op(node.left), tol)
            q = Projector.from_matrix(env.op(node.right), tol)
            r = conjunction(p, q, tol)
            return {"zero": r.is_zero(), "rank": r.rank, "matrix": _matrix_pairs(r.matrix)}
    elif isinstance(node, ConsistentQuery):
        kind, inputs = "consistent", {"family": node.family}
        def compute():
            rep = hi.consistency_check(env.family(node.family), tol_consistency)
            return {
                "consistent": rep.consistent,
                "max_offdiag": rep.max_offdiag,
                "histories": rep.history_count,
                "condition": rep.condition,
                "offending_pairs": [
                    [list(a), list(b), _complex_pair(v)] for a, b, v in rep.offending_pairs[:8]
                ],
            }
    elif isinstance(node, HistProbQuery):
        kind, inputs = "histprob", {"family": node.family}
        def compute():
            dist = hi.history_distribution(env.family(node.family), tol_consistency, tol=tol)
            return {
                "probabilities": [
                    {"history": list(alpha), "p": p} for alpha, p in sorted(dist.items())
                ]
            }
    elif isinstance(node, ChannelCheckQuery):
        kind, inputs = "channelcheck", {"channel": node.channel}
        def compute():
            verdict = sc.certify_perfect_channel(env.channel(node.channel), tol_cert, tol)
            return {
                "passed": verdict.passed,
                "tol_cert": tol_cert,
                "checks": [
                    {
                        "basis": c.flips.basis,
                        "p_plus_to_minus": c.flips.p_plus_to_minus,
                        "p_minus_to_plus": c.flips.p_minus_to_plus,
                        "max_fixed_point_distance": c.max_fixed_point_distance,
                        "ok": c.ok,
                    }
                    for c in verdict.checks
                ],
            }
    elif isinstance(node, TeleportQuery):
        kind, inputs = "teleport", {"state": node.state, "framework": node.framework}
        def compute():
            psi = env.state(node.state)
            if psi.shape[0] != 2:
                raise DimensionMismatch("teleportation takes a one-qubit state")
            rep = sc.teleport_analysis(psi, node.framework, tol_consistency, tol)
            return {
                "framework": rep.framework,
                "outcome_probs": list(rep.outcome_probs),
                "conditional_match": list(rep.conditional_match),
                "consistent": rep.consistency.consistent,
                "max_offdiag": rep.consistency.max_offdiag,
            }
    else:  # pragma: no cover
        raise TypeError(f"unknown query {type(node).__name__}")

    try:
        result = compute()
    except DimensionMismatch as exc:
        raise _source_error(node.line, exc) from exc
    except _QUERY_ANSWER_ERRORS as exc:
        return QueryRecord(kind=kind, inputs=inputs, status="error", result=None,
                           error=_error_payload(exc))
    except (IndexError, KeyError, FwlabError) as exc:
        return QueryRecord(kind=kind, inputs=inputs, status="error", result=None,
                           error=_error_payload(exc))
    return QueryRecord(kind=kind, inputs=inputs, status="ok", result=result, error=None)


def run_scenario(
    ast: ScenarioAst,
    tol: Tolerances = Tolerances(),
    seed: int = 0,
    tol_consistency: float = DEFAULT_CONSISTENCY,
    tol_cert: float = DEFAULT_CERT,
) -> Report:
    """Execute a scenario AST and return the ordered report.

    Raises ScenarioRunError (with a positioned SourceError) when a
    declaration is invalid or a query hits a dimension mismatch.
    """
    env = _Env(tol)
    for node in ast.declarations:
        try:
            _declare(env, node)
        except (FwlabError, np.linalg.LinAlgError) as exc:
            raise _source_error(node.line, exc) from exc
    records = tuple(_run_query(env, q, tol_consistency, tol_cert) for q in ast.queries)
    return Report(
        version=REPORT_VERSION,
        tolerances={
            "algebraic": tol.algebraic,
            "degeneracy": tol.degeneracy,
            "probability": tol.probability,
            "consistency": tol_consistency,
            "cert": tol_cert,
        },
        seed=seed,
        queries=records,
    )
