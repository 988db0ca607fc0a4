"""Canonical text form of a scenario AST.

format then parse is the identity on ASTs (modulo source positions):
numbers are printed with 17 significant digits, which round-trips IEEE
doubles exactly. Declarations come first in their original order, then
queries in theirs.
"""
from __future__ import annotations

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
    SpaceDecl,
    StateDecl,
    TeleportQuery,
)


def format_float(x: float) -> str:
    if x == 0:  # normalize -0.0
        return "0"
    return format(x, ".17g")


def format_complex(c: complex) -> str:
    re, im = c.real, c.imag
    if im == 0:
        return format_float(re)
    if re == 0:
        return format_float(im) + "i"
    sign = "+" if im > 0 else "-"
    return f"{format_float(re)}{sign}{format_float(abs(im))}i"


def _vector(v) -> str:
    return "[" + ", ".join(format_complex(c) for c in v) + "]"


def _matrix(m) -> str:
    return "[" + ", ".join(_vector(row) for row in m) + "]"


def _statement(node) -> str:
    if isinstance(node, SpaceDecl):
        return f"space {node.name} {node.dim}"
    if isinstance(node, OpDecl):
        rhs = node.const if node.const is not None else _matrix(node.matrix)
        return f"op {node.name} = {rhs}"
    if isinstance(node, StateDecl):
        return f"state {node.name} = {_vector(node.amplitudes)}"
    if isinstance(node, PdiFromDecl):
        return f"pdi {node.name} from {node.op}"
    if isinstance(node, PdiBlocksDecl):
        return f"pdi {node.name} = {{ {', '.join(node.ops)} }}"
    if isinstance(node, FamilyDecl):
        steps = " ".join(f"{u} {f}" for u, f in node.steps)
        return f"family {node.name} init {node.init} steps {steps}"
    if isinstance(node, ChannelDecl):
        return f"channel {node.name} kraus {{ {', '.join(node.ops)} }}"
    if isinstance(node, ProbQuery):
        return f"prob {node.state} {node.pdi}"
    if isinstance(node, EventProbQuery):
        inner = ", ".join(str(j) for j in node.indices)
        return f"eventprob {node.state} {node.pdi} {{{inner}}}"
    if isinstance(node, CompatQuery):
        return f"compat {node.left} {node.right}"
    if isinstance(node, RefineQuery):
        return f"refine {node.left} {node.right}"
    if isinstance(node, ConjQuery):
        return f"conj {node.left} {node.right}"
    if isinstance(node, ConsistentQuery):
        return f"consistent {node.family}"
    if isinstance(node, HistProbQuery):
        return f"histprob {node.family}"
    if isinstance(node, ChannelCheckQuery):
        return f"channelcheck {node.channel}"
    if isinstance(node, TeleportQuery):
        return f"teleport {node.state} {node.framework}"
    raise TypeError(f"unknown AST node {type(node).__name__}")


def format_scenario(ast: ScenarioAst) -> str:
    """Render an AST back to canonical scenario text."""
    lines = [_statement(n) for n in ast.declarations]
    lines += [_statement(n) for n in ast.queries]
    return "\n".join(lines) + ("\n" if lines else "")
