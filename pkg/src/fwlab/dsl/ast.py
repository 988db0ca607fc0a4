"""AST node types for the scenario language, plus source-level errors.

Nodes carry their 1-based source line for runtime error binding, but the
line is excluded from equality so that format/parse round-trips compare
structurally.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import FwlabError

ERROR_KINDS = ("lex", "parse", "name", "dimension", "physics")


@dataclass(frozen=True)
class SourceError:
    """A diagnostic anchored to a position in the scenario text."""

    line: int
    column: int
    message: str
    kind: str  # one of ERROR_KINDS

    def render(self) -> str:
        return f"{self.line}:{self.column}: {self.kind}: {self.message}"


class ScenarioParseError(FwlabError):
    """Raised by parse_scenario; carries up to 20 SourceErrors."""

    def __init__(self, errors: tuple[SourceError, ...]):
        self.errors = tuple(errors)
        super().__init__("; ".join(e.render() for e in self.errors))


class ScenarioRunError(FwlabError):
    """Raised by run_scenario when a declaration or query cannot execute."""

    def __init__(self, error: SourceError):
        self.errors = (error,)
        super().__init__(error.render())


@dataclass(frozen=True)
class SpaceDecl:
    name: str
    dim: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class OpDecl:
    name: str
    matrix: tuple[tuple[complex, ...], ...] | None
    const: str | None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class StateDecl:
    name: str
    amplitudes: tuple[complex, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class PdiFromDecl:
    name: str
    op: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class PdiBlocksDecl:
    name: str
    ops: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class FamilyDecl:
    name: str
    init: str
    steps: tuple[tuple[str, str], ...]  # (unitary op, pdi) per time step
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ChannelDecl:
    name: str
    ops: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ProbQuery:
    state: str
    pdi: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class EventProbQuery:
    state: str
    pdi: str
    indices: tuple[int, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CompatQuery:
    left: str
    right: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RefineQuery:
    left: str
    right: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ConjQuery:
    left: str
    right: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ConsistentQuery:
    family: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class HistProbQuery:
    family: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ChannelCheckQuery:
    channel: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class TeleportQuery:
    state: str
    framework: str  # Z, X, or ZX (the combined request, refused at run time)
    line: int = field(default=0, compare=False)


Declaration = SpaceDecl | OpDecl | StateDecl | PdiFromDecl | PdiBlocksDecl | FamilyDecl | ChannelDecl
Query = (
    ProbQuery
    | EventProbQuery
    | CompatQuery
    | RefineQuery
    | ConjQuery
    | ConsistentQuery
    | HistProbQuery
    | ChannelCheckQuery
    | TeleportQuery
)


@dataclass(frozen=True)
class ScenarioAst:
    declarations: tuple[Declaration, ...]
    queries: tuple[Query, ...]
