"""Line-oriented parser for the scenario language.

One statement per line; `#` starts a comment. Complex literals use the
`a+bi` / `a-bi` / `bi` / `a` forms and bracketed literals are whitespace
insensitive. Names are resolved in a single pass (declaration before use,
no duplicates, kinds checked), so every reference error lands on the
offending token. The parser recovers per line and collects up to 20
errors before giving up.

Grammar, one statement per line:

    space <name> <dim>
    op <name> = [[a+bi, ...], ...]        or  op <name> = I2|X|Y|Z|H
    state <name> = [a+bi, ...]
    pdi <name> from <op>                  or  pdi <name> = { <op>, ... }
    family <name> init <state> steps (<unitary> <pdi>)+
    channel <name> kraus { <op>, ... }
    prob <state> <pdi>
    eventprob <state> <pdi> {j, k, ...}
    compat <pdi> <pdi>
    refine <pdi> <pdi>
    conj <op> <op>
    consistent <family>
    histprob <family>
    channelcheck <channel>
    teleport <state> <Z|X|ZX>
"""
from __future__ import annotations

import re

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
    ScenarioParseError,
    SourceError,
    SpaceDecl,
    StateDecl,
    TeleportQuery,
)

MAX_ERRORS = 20
CONSTANT_NAMES = ("I2", "X", "Y", "Z", "H")

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_+\-]*")
_INT_RE = re.compile(r"\d+")
_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"\s*([+-]?)(?:({_NUM})(i?)|(i))(?:\s*([+-])\s*(?:({_NUM})i|(i)))?\s*$"
)

_KEYWORDS = frozenset(
    "space op state pdi family channel prob eventprob compat refine conj "
    "consistent histprob channelcheck teleport from init steps kraus".split()
)

_DECL_KINDS = {"space", "op", "state", "pdi", "family", "channel"}


class _Fail(Exception):
    def __init__(self, err: SourceError):
        self.err = err


def parse_complex_literal(text: str) -> complex:
    """Parse one `a+bi`-style literal; raises ValueError on malformed input."""
    m = _COMPLEX_RE.fullmatch(text)
    if m is None:
        raise ValueError(f"malformed complex literal {text.strip()!r}")
    sign1, num1, i1, lone_i1, sign2, num2, lone_i2 = m.groups()
    s1 = -1.0 if sign1 == "-" else 1.0
    if lone_i1:
        first = complex(0.0, s1)
    elif i1:
        first = complex(0.0, s1 * float(num1))
    else:
        first = complex(s1 * float(num1), 0.0)
    value = first
    if sign2 is not None:
        if first.imag != 0 or lone_i1 or i1:
            raise ValueError("complex literal has two imaginary parts")
        s2 = -1.0 if sign2 == "-" else 1.0
        value = complex(first.real, s2 * (1.0 if lone_i2 else float(num2)))
    if not (abs(value.real) < float("inf") and abs(value.imag) < float("inf")):
        raise ValueError("number out of range")
    return value


class _Scanner:
    """Character scanner over one comment-stripped source line."""

    def __init__(self, text: str, line: int):
        self.text = text
        self.line = line
        self.pos = 0

    def _col(self, pos: int | None = None) -> int:
        p = self.pos if pos is None else pos
        return min(p, max(len(self.text) - 1, 0)) + 1

    def fail(self, message: str, kind: str = "parse", pos: int | None = None):
        raise _Fail(SourceError(line=self.line, column=self._col(pos), message=message, kind=kind))

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect_end(self) -> None:
        if not self.at_end():
            self.fail("unexpected trailing input")

    def take_char(self, ch: str) -> None:
        if self.peek() != ch:
            self.fail(f"expected '{ch}'")
        self.pos += 1

    def take_word(self, what: str) -> tuple[str, int]:
        self.skip_ws()
        m = _IDENT_RE.match(self.text, self.pos)
        if m is None:
            self.fail(f"expected {what}")
        self.pos = m.end()
        return m.group(), m.start() + 1

    def take_int(self, what: str) -> tuple[int, int]:
        self.skip_ws()
        m = _INT_RE.match(self.text, self.pos)
        if m is None:
            self.fail(f"expected {what}")
        self.pos = m.end()
        return int(m.group()), m.start() + 1

    def take_complex(self) -> complex:
        # Element text runs to the next ',' or ']' on the line.
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in ",]":
            if self.text[self.pos] == "[":
                self.fail("unexpected '[' inside an element")
            self.pos += 1
        chunk = self.text[start : self.pos]
        if not chunk.strip():
            self.fail("expected a complex number", pos=start)
        try:
            return parse_complex_literal(chunk)
        except ValueError as exc:
            self.fail(str(exc), pos=start + (len(chunk) - len(chunk.lstrip())))

    def take_vector(self) -> tuple[complex, ...]:
        self.take_char("[")
        if self.peek() == "]":
            self.fail("empty vector literal")
        items = [self.take_complex()]
        while True:
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                items.append(self.take_complex())
            elif ch == "]":
                self.pos += 1
                return tuple(items)
            else:
                self.fail("expected ',' or ']'")

    def take_matrix(self) -> tuple[tuple[complex, ...], ...]:
        self.take_char("[")
        rows = []
        row_starts = []
        while True:
            self.skip_ws()
            row_starts.append(self.pos)
            rows.append(self.take_vector())
            ch = self.peek()
            if ch == ",":
                self.pos += 1
            elif ch == "]":
                self.pos += 1
                break
            else:
                self.fail("expected ',' or ']'")
        width = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != width:
                self.fail(
                    f"row {i + 1} has {len(row)} entries, expected {width}",
                    pos=row_starts[i],
                )
        return tuple(rows)

    def take_name_list(self, what: str) -> tuple[tuple[str, int], ...]:
        self.take_char("{")
        names = [self.take_word(what)]
        while True:
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                names.append(self.take_word(what))
            elif ch == "}":
                self.pos += 1
                return tuple(names)
            else:
                self.fail("expected ',' or '}'")

    def take_index_set(self) -> tuple[int, ...]:
        self.take_char("{")
        if self.peek() == "}":
            self.pos += 1
            return ()
        items = [self.take_int("a block index")[0]]
        while True:
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                items.append(self.take_int("a block index")[0])
            elif ch == "}":
                self.pos += 1
                return tuple(items)
            else:
                self.fail("expected ',' or '}'")


class _Parser:
    def __init__(self) -> None:
        self.table: dict[str, tuple[str, int]] = {}
        self.declarations = []
        self.queries = []
        self.errors: list[SourceError] = []

    def declare(self, scan: _Scanner, name: str, col: int, kind: str) -> None:
        if name in _KEYWORDS:
            scan.fail(f"'{name}' is a reserved word", kind="name", pos=col - 1)
        if name in self.table:
            prev_kind, prev_line = self.table[name]
            scan.fail(
                f"duplicate name '{name}' (already declared as {prev_kind} on line {prev_line})",
                kind="name",
                pos=col - 1,
            )
        self.table[name] = (kind, scan.line)

    def resolve(self, scan: _Scanner, name: str, col: int, kind: str) -> str:
        if name not in self.table:
            scan.fail(f"'{name}' is not declared", kind="name", pos=col - 1)
        found = self.table[name][0]
        if found != kind:
            scan.fail(f"'{name}' is a {found}, expected a {kind}", kind="name", pos=col - 1)
        return name

    def parse(self, text: str) -> ScenarioAst:
        for line_no, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0]
            if not body.strip():
                continue
            scan = _Scanner(body, line_no)
            try:
                self._statement(scan)
            except _Fail as f:
                self.errors.append(f.err)
                if len(self.errors) >= MAX_ERRORS:
                    break
        if self.errors:
            raise ScenarioParseError(tuple(self.errors[:MAX_ERRORS]))
        return ScenarioAst(tuple(self.declarations), tuple(self.queries))

    def _statement(self, scan: _Scanner) -> None:
        head, head_col = scan.take_word("a statement keyword")
        handler = getattr(self, f"_stmt_{head}", None)
        if head not in _KEYWORDS or handler is None:
            scan.fail(f"unknown statement '{head}'", pos=head_col - 1)
        handler(scan)
        scan.expect_end()

    # declarations -------------------------------------------------------

    def _stmt_space(self, scan: _Scanner) -> None:
        name, col = scan.take_word("a space name")
        dim, dim_col = scan.take_int("a positive dimension")
        if dim < 1:
            scan.fail("dimension must be a positive integer", pos=dim_col - 1)
        self.declare(scan, name, col, "space")
        self.declarations.append(SpaceDecl(name=name, dim=dim, line=scan.line))

    def _stmt_op(self, scan: _Scanner) -> None:
        name, col = scan.take_word("an operator name")
        scan.take_char("=")
        if scan.peek() == "[":
            matrix, const = scan.take_matrix(), None
        else:
            word, wcol = scan.take_word("a matrix literal or constant")
            if word not in CONSTANT_NAMES:
                scan.fail(
                    f"'{word}' is not a constant (expected one of {', '.join(CONSTANT_NAMES)})",
                    kind="name",
                    pos=wcol - 1,
                )
            matrix, const = None, word
        self.declare(scan, name, col, "op")
        self.declarations.append(OpDecl(name=name, matrix=matrix, const=const, line=scan.line))

    def _stmt_state(self, scan: _Scanner) -> None:
        name, col = scan.take_word("a state name")
        scan.take_char("=")
        vec = scan.take_vector()
        self.declare(scan, name, col, "state")
        self.declarations.append(StateDecl(name=name, amplitudes=vec, line=scan.line))

    def _stmt_pdi(self, scan: _Scanner) -> None:
        name, col = scan.take_word("a pdi name")
        ch = scan.peek()
        if ch == "=":
            scan.take_char("=")
            ops = scan.take_name_list("an operator name")
            resolved = tuple(self.resolve(scan, w, c, "op") for w, c in ops)
            self.declare(scan, name, col, "pdi")
            self.declarations.append(PdiBlocksDecl(name=name, ops=resolved, line=scan.line))
            return
        word, wcol = scan.take_word("'from' or '='")
        if word != "from":
            scan.fail("expected 'from' or '='", pos=wcol - 1)
        op, op_col = scan.take_word("an operator name")
        self.resolve(scan, op, op_col, "op")
        self.declare(scan, name, col, "pdi")
        self.declarations.append(PdiFromDecl(name=name, op=op, line=scan.line))

    def _stmt_family(self, scan: _Scanner) -> None:
        name, col = scan.take_word("a family name")
        kw, kcol = scan.take_word("'init'")
        if kw != "init":
            scan.fail("expected 'init'", pos=kcol - 1)
        init, icol = scan.take_word("a state name")
        self.resolve(scan, init, icol, "state")
        kw, kcol = scan.take_word("'steps'")
        if kw != "steps":
            scan.fail("expected 'steps'", pos=kcol - 1)
        steps = []
        while not scan.at_end():
            u, ucol = scan.take_word("a unitary operator name")
            self.resolve(scan, u, ucol, "op")
            if scan.at_end():
                scan.fail("steps come in unitary/pdi pairs; missing a pdi", pos=ucol - 1)
            f, fcol = scan.take_word("a pdi name")
            self.resolve(scan, f, fcol, "pdi")
            steps.append((u, f))
        if not steps:
            scan.fail("a family needs at least one step")
        self.declare(scan, name, col, "family")
        self.declarations.append(FamilyDecl(name=name, init=init, steps=tuple(steps), line=scan.line))

    def _stmt_channel(self, scan: _Scanner) -> None:
        name, col = scan.take_word("a channel name")
        kw, kcol = scan.take_word("'kraus'")
        if kw != "kraus":
            scan.fail("expected 'kraus'", pos=kcol - 1)
        ops = scan.take_name_list("an operator name")
        resolved = tuple(self.resolve(scan, w, c, "op") for w, c in ops)
        self.declare(scan, name, col, "channel")
        self.declarations.append(ChannelDecl(name=name, ops=resolved, line=scan.line))

    # queries ------------------------------------------------------------

    def _two_names(self, scan: _Scanner, kind1: str, kind2: str) -> tuple[str, str]:
        a, acol = scan.take_word(f"a {kind1} name")
        self.resolve(scan, a, acol, kind1)
        b, bcol = scan.take_word(f"a {kind2} name")
        self.resolve(scan, b, bcol, kind2)
        return a, b

    def _stmt_prob(self, scan: _Scanner) -> None:
        s, f = self._two_names(scan, "state", "pdi")
        self.queries.append(ProbQuery(state=s, pdi=f, line=scan.line))

    def _stmt_eventprob(self, scan: _Scanner) -> None:
        s, f = self._two_names(scan, "state", "pdi")
        indices = scan.take_index_set()
        self.queries.append(EventProbQuery(state=s, pdi=f, indices=indices, line=scan.line))

    def _stmt_compat(self, scan: _Scanner) -> None:
        a, b = self._two_names(scan, "pdi", "pdi")
        self.queries.append(CompatQuery(left=a, right=b, line=scan.line))

    def _stmt_refine(self, scan: _Scanner) -> None:
        a, b = self._two_names(scan, "pdi", "pdi")
        self.queries.append(RefineQuery(left=a, right=b, line=scan.line))

    def _stmt_conj(self, scan: _Scanner) -> None:
        a, b = self._two_names(scan, "op", "op")
        self.queries.append(ConjQuery(left=a, right=b, line=scan.line))

    def _stmt_consistent(self, scan: _Scanner) -> None:
        f, col = scan.take_word("a family name")
        self.resolve(scan, f, col, "family")
        self.queries.append(ConsistentQuery(family=f, line=scan.line))

    def _stmt_histprob(self, scan: _Scanner) -> None:
        f, col = scan.take_word("a family name")
        self.resolve(scan, f, col, "family")
        self.queries.append(HistProbQuery(family=f, line=scan.line))

    def _stmt_channelcheck(self, scan: _Scanner) -> None:
        c, col = scan.take_word("a channel name")
        self.resolve(scan, c, col, "channel")
        self.queries.append(ChannelCheckQuery(channel=c, line=scan.line))

    def _stmt_teleport(self, scan: _Scanner) -> None:
        s, scol = scan.take_word("a state name")
        self.resolve(scan, s, scol, "state")
        basis, bcol = scan.take_word("a framework (Z, X, or ZX)")
        if basis.upper() not in ("Z", "X", "ZX"):
            scan.fail("expected framework Z, X, or ZX", pos=bcol - 1)
        self.queries.append(TeleportQuery(state=s, framework=basis.upper(), line=scan.line))


def parse_scenario(text: str) -> ScenarioAst:
    """Parse scenario text into an AST or raise ScenarioParseError."""
    return _Parser().parse(text)
