"""Report carrier plus canonical serializations.

The machine-readable document is rendered by a small JSON emitter of our
own so that float formatting is pinned: every float is written with 17
significant digits, keys stay in insertion order, and the same report
object always produces the same bytes on a given platform.
"""
from __future__ import annotations

from dataclasses import dataclass

REPORT_VERSION = "1"


def _json_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("cannot serialize non-finite float")
    if x == 0:
        return "0"
    return format(x, ".17g")


def _json_string(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20 or ord(ch) > 0x7E:
            code = ord(ch)
            if code > 0xFFFF:
                code -= 0x10000
                out.append(f"\\u{0xD800 + (code >> 10):04x}\\u{0xDC00 + (code & 0x3FF):04x}")
            else:
                out.append(f"\\u{code:04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def canonical_json(value) -> str:
    """Deterministic JSON: 17-significant-digit floats, insertion-order keys."""
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _json_float(value)
    if isinstance(value, str):
        return _json_string(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ",".join(f"{_json_string(str(k))}:{canonical_json(v)}" for k, v in value.items()) + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


@dataclass(frozen=True)
class QueryRecord:
    kind: str
    inputs: dict
    status: str  # "ok" or "error"
    result: dict | None
    error: dict | None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "inputs": self.inputs,
            "status": self.status,
            "result": self.result,
            "error": self.error,
        }


@dataclass(frozen=True)
class Report:
    version: str
    tolerances: dict
    seed: int
    queries: tuple[QueryRecord, ...]

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "tolerances": self.tolerances,
            "seed": self.seed,
            "queries": [q.to_dict() for q in self.queries],
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict()) + "\n"

    def to_json_bytes(self) -> bytes:
        return self.to_json().encode("utf-8")

    def to_text(self) -> str:
        f = _text_float
        lines = [f"fwlab report (schema v{self.version}, seed {self.seed})"]
        tols = ", ".join(f"{k}={f(v)}" for k, v in self.tolerances.items())
        lines.append(f"tolerances: {tols}")
        for i, q in enumerate(self.queries, start=1):
            args = " ".join(str(v) for v in q.inputs.values())
            if q.status == "ok":
                lines.append(f"[{i}] {q.kind} {args}: {_render_ok(q)}")
            else:
                label = q.error.get("label", "error")
                lines.append(f"[{i}] {q.kind} {args}: {label}")
                lines.append(f"    {q.error['type']}: {q.error['message']}")
        return "\n".join(lines) + "\n"


def _text_float(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _probs(values) -> str:
    return "[" + ", ".join(_text_float(v) for v in values) + "]"


def _render_ok(q: QueryRecord) -> str:
    r = q.result
    if q.kind == "prob":
        return f"probs = {_probs(r['probs'])}"
    if q.kind == "eventprob":
        return f"probability = {_text_float(r['probability'])}"
    if q.kind == "compat":
        word = "compatible" if r["compatible"] else "incompatible"
        return f"{word} (max commutator norm {_text_float(r['max_commutator_norm'])})"
    if q.kind == "refine":
        return f"refinement with {r['blocks']} blocks, ranks {r['ranks']}"
    if q.kind == "conj":
        if r["zero"]:
            return "zero projector (always false; rank 0)"
        return f"projector of rank {r['rank']}"
    if q.kind == "consistent":
        word = "consistent" if r["consistent"] else "inconsistent"
        return f"{word} (max off-diagonal {_text_float(r['max_offdiag'])}, {r['histories']} histories)"
    if q.kind == "histprob":
        entries = ", ".join(
            "(" + ",".join(str(i) for i in e["history"]) + f"): {_text_float(e['p'])}"
            for e in r["probabilities"]
        )
        return "{" + entries + "}"
    if q.kind == "channelcheck":
        if r["passed"]:
            return "pass"
        fails = "; ".join(
            f"{c['basis']}: flips ({_text_float(c['p_plus_to_minus'])}, "
            f"{_text_float(c['p_minus_to_plus'])}), drift {_text_float(c['max_fixed_point_distance'])}"
            for c in r["checks"]
            if not c["ok"]
        )
        return f"fail ({fails})"
    if q.kind == "teleport":
        return (
            f"outcomes {_probs(r['outcome_probs'])}, match {_probs(r['conditional_match'])}, "
            f"max off-diagonal {_text_float(r['max_offdiag'])}"
        )
    return str(r)
