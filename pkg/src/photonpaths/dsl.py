"""Line-oriented circuit description format (``.pic``).

One statement per line; ``#`` starts a comment; statement order does not
matter::

    source single <id> out(<m>)
    source pair <id> top(<m>,<m>) bottom(<m>,<m>) [pass(<m>,<m>)]
    vacuum <m>
    bs <id> in(<m>,<m>) out(<m>,<m>) [refl(<expr>)] [split(<real>)]
    mirror <id> in(<m>) out(<m>) [refl(<expr>)]
    phase <id> in(<m>) out(<m>) value(<expr>)
    segment <m> phase(<expr>)
    segment <m> length(<real>) lambda(<real>)
    detector <id> mode(<m>)

For ``bs``, ``out(t, r)`` lists first the transmit partner of the first
input.  ``vacuum`` declares an open input port.  Phase expressions follow::

    expr := ['-'] term (('+' | '-') term)*
    term := NUMBER | NUMBER '*' 'pi' ['/' NUMBER] | 'pi' ['/' NUMBER]
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

from .circuit import (
    HALF_PI,
    INV_SQRT2,
    BeamSplitter,
    Circuit,
    Detector,
    Mirror,
    PairSource,
    PhaseShifter,
    Segment,
    SinglePhoton,
    validate,
)

HEADER = "# photonpaths circuit v1"

# ---------------------------------------------------------------------------
# Phase expressions
# ---------------------------------------------------------------------------

_EXPR_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<pi>pi)|(?P<op>[-+*/]))")


class PhaseExprError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


def _tokenize_expr(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _EXPR_TOKEN.match(text, pos)
        if m is None:
            offset = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PhaseExprError(f"unexpected character {text[offset]!r}", offset)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


def evaluate_phase(text: str) -> float:
    """Evaluate a phase expression such as ``pi/2`` or ``0.5*pi - 1``, in radians."""
    tokens = _tokenize_expr(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", "", len(text))

    def expect(kind, value=None):
        nonlocal pos
        tok = peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or {"num": "a number", "pi": "pi"}.get(kind, kind)
            got = tok[1] or "end of expression"
            raise PhaseExprError(f"expected {want}, got {got!r}", tok[2])
        pos += 1
        return tok

    def number():
        tok = expect("num")
        return float(tok[1]), tok[2]

    def divisor():
        nonlocal pos
        if peek()[1] == "/":
            pos += 1
            value, offset = number()
            if value == 0.0:
                raise PhaseExprError("division by zero", offset)
            return value
        return 1.0

    def term():
        nonlocal pos
        kind, value, offset = peek()
        if kind == "pi":
            pos += 1
            return math.pi / divisor()
        if kind == "num":
            pos += 1
            if peek()[1] == "*":
                pos += 1
                expect("pi")
                return float(value) * math.pi / divisor()
            return float(value)
        raise PhaseExprError(f"expected a number or pi, got {value or 'end of expression'!r}", offset)

    if not tokens:
        raise PhaseExprError("empty expression", 0)
    sign = 1.0
    if peek()[1] == "-":
        pos += 1
        sign = -1.0
    total = sign * term()
    while peek()[0] == "op" and peek()[1] in "+-":
        op = peek()[1]
        pos += 1
        total = total + term() if op == "+" else total - term()
    if pos != len(tokens):
        raise PhaseExprError(f"unexpected {peek()[1]!r}", peek()[2])
    return total


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class SourceSpan:
    line: int
    column: int

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError(f"span positions are 1-based, got {self.line}:{self.column}")


class ErrorKind(enum.Enum):
    SYNTAX_ERROR = "SyntaxError"
    UNKNOWN_KEYWORD = "UnknownKeyword"
    UNKNOWN_MODE = "UnknownMode"
    DUPLICATE_ID = "DuplicateId"
    BAD_PHASE_EXPR = "BadPhaseExpr"
    INVALID_CIRCUIT = "InvalidCircuit"


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    kind: ErrorKind
    message: str

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.kind.value}: {self.message}"


class DSLError(ValueError):
    """Raised by ``parse`` with every error found in the text."""

    def __init__(self, errors: list[ParseError]):
        self.errors = sorted(errors, key=lambda e: (e.span, e.kind.value))
        super().__init__("\n".join(str(e) for e in self.errors))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_NAME_RE = re.compile(_NAME + r"$")
_WORD = re.compile(r"\S+")
_GROUP = re.compile(r"\s*([A-Za-z_]+)\s*\(([^()]*)\)")

# statement -> {group: (arity, argument type)}, required groups
_SHAPES = {
    "bs": ({"in": (2, "mode"), "out": (2, "mode"), "refl": (1, "expr"), "split": (1, "real")}, {"in", "out"}),
    "mirror": ({"in": (1, "mode"), "out": (1, "mode"), "refl": (1, "expr")}, {"in", "out"}),
    "phase": ({"in": (1, "mode"), "out": (1, "mode"), "value": (1, "expr")}, {"in", "out", "value"}),
    "detector": ({"mode": (1, "mode")}, {"mode"}),
    "source single": ({"out": (1, "mode")}, {"out"}),
    "source pair": ({"top": (2, "mode"), "bottom": (2, "mode"), "pass": (2, "mode")}, {"top", "bottom"}),
    "segment": ({"phase": (1, "expr"), "length": (1, "real"), "lambda": (1, "real")}, set()),
    "vacuum": ({}, set()),
}


@dataclass
class _Arg:
    text: str
    span: SourceSpan
    value: object = None


@dataclass
class _Statement:
    kind: str
    name: str
    name_span: SourceSpan
    groups: dict[str, list[_Arg]] = field(default_factory=dict)


@dataclass
class ParseResult:
    circuit: Circuit
    locations: dict[str, list[SourceSpan]]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.errors: list[ParseError] = []
        self.statements: list[_Statement] = []

    def error(self, line: int, col: int, kind: ErrorKind, message: str) -> None:
        self.errors.append(ParseError(SourceSpan(line, max(col, 1)), kind, message))

    def run(self) -> None:
        for lineno, raw in enumerate(self.text.splitlines(), start=1):
            line = raw.split("#", 1)[0].rstrip()
            if line.strip():
                self.statement(lineno, line)

    def statement(self, lineno: int, line: str) -> None:
        words = list(_WORD.finditer(line))
        kw = words[0]
        kind = kw.group()
        rest_index = 1
        if kind == "source":
            if len(words) < 2 or words[1].group() not in ("single", "pair"):
                col = words[1].start() + 1 if len(words) > 1 else kw.end() + 1
                self.error(lineno, col, ErrorKind.SYNTAX_ERROR, "expected 'single' or 'pair' after 'source'")
                return
            kind = f"source {words[1].group()}"
            rest_index = 2
        if kind not in _SHAPES:
            self.error(lineno, kw.start() + 1, ErrorKind.UNKNOWN_KEYWORD, f"unknown statement {kind!r}")
            return
        if len(words) <= rest_index:
            self.error(lineno, len(line) + 1, ErrorKind.SYNTAX_ERROR, f"{kind} needs a name")
            return
        name_match = re.match(_NAME, line[words[rest_index].start() :])
        name_col = words[rest_index].start()
        if name_match is None:
            self.error(lineno, name_col + 1, ErrorKind.SYNTAX_ERROR, f"invalid name {words[rest_index].group()!r}")
            return
        stmt = _Statement(kind, name_match.group(), SourceSpan(lineno, name_col + 1))
        pos = name_col + name_match.end()
        shape, required = _SHAPES[kind]
        ok = True
        while pos < len(line):
            if not line[pos:].strip():
                break
            m = _GROUP.match(line, pos)
            if m is None:
                col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
                self.error(lineno, col, ErrorKind.SYNTAX_ERROR, f"expected 'name(...)' in {kind} statement")
                return
            gname = m.group(1)
            gcol = m.start(1) + 1
            if gname not in shape:
                self.error(lineno, gcol, ErrorKind.SYNTAX_ERROR, f"{kind} does not take {gname}(...)")
                ok = False
            elif gname in stmt.groups:
                self.error(lineno, gcol, ErrorKind.SYNTAX_ERROR, f"{gname}(...) given twice")
                ok = False
            else:
                args = self.arguments(lineno, m, shape[gname])
                if args is None:
                    ok = False
                else:
                    stmt.groups[gname] = args
            pos = m.end()
        if not ok:
            return
        missing = sorted(required - set(stmt.groups))
        if kind == "segment":
            given = set(stmt.groups)
            if given not in ({"phase"}, {"length", "lambda"}):
                self.error(
                    lineno, kw.start() + 1, ErrorKind.SYNTAX_ERROR,
                    "segment needs phase(<expr>) or length(<real>) lambda(<real>)",
                )
                return
        if missing:
            self.error(lineno, kw.start() + 1, ErrorKind.SYNTAX_ERROR, f"{kind} is missing {', '.join(missing)}(...)")
            return
        self.statements.append(stmt)

    def arguments(self, lineno: int, m: re.Match, shape: tuple[int, str]) -> list[_Arg] | None:
        arity, argtype = shape
        body = m.group(2)
        body_col = m.start(2)
        parts = body.split(",")
        if len(parts) != arity:
            self.error(lineno, m.start(1) + 1, ErrorKind.SYNTAX_ERROR,
                       f"{m.group(1)}(...) takes {arity} argument(s), got {len(parts)}")
            return None
        args = []
        offset = 0
        for part in parts:
            lead = len(part) - len(part.lstrip())
            span = SourceSpan(lineno, body_col + offset + lead + 1)
            text = part.strip()
            offset += len(part) + 1
            arg = _Arg(text, span)
            if argtype == "mode":
                if not _NAME_RE.match(text):
                    self.error(lineno, span.column, ErrorKind.SYNTAX_ERROR, f"invalid mode name {text!r}")
                    return None
                arg.value = text
            elif argtype == "expr":
                try:
                    arg.value = evaluate_phase(text)
                except PhaseExprError as exc:
                    self.error(lineno, span.column + exc.offset, ErrorKind.BAD_PHASE_EXPR, f"{text!r}: {exc}")
                    return None
            else:
                try:
                    arg.value = float(text)
                except ValueError:
                    self.error(lineno, span.column, ErrorKind.SYNTAX_ERROR, f"expected a number, got {text!r}")
                    return None
                if not math.isfinite(arg.value):
                    self.error(lineno, span.column, ErrorKind.SYNTAX_ERROR, f"expected a finite number, got {text!r}")
                    return None
            args.append(arg)
        return args

    # -- second pass -------------------------------------------------------

    def build(self) -> ParseResult:
        produced: set[str] = set()
        for st in self.statements:
            if st.kind == "vacuum":
                produced.add(st.name)
            for g in ("out", "top", "bottom"):
                produced.update(a.value for a in st.groups.get(g, ()))

        locations: dict[str, list[SourceSpan]] = {}
        ids: dict[str, SourceSpan] = {}
        for st in self.statements:
            if st.kind not in ("segment", "vacuum"):
                if st.name in ids:
                    self.error(st.name_span.line, st.name_span.column, ErrorKind.DUPLICATE_ID,
                               f"id {st.name!r} already defined on line {ids[st.name].line}")
                else:
                    ids[st.name] = st.name_span
            locations.setdefault(st.name, []).append(st.name_span)
            consumed = list(st.groups.get("in", ())) + list(st.groups.get("mode", ()))
            if "pass" in st.groups:
                consumed.append(st.groups["pass"][0])
            if st.kind == "segment":
                consumed.append(_Arg(st.name, st.name_span, st.name))
            for arg in consumed:
                if arg.value not in produced:
                    self.error(arg.span.line, arg.span.column, ErrorKind.UNKNOWN_MODE,
                               f"mode {arg.value!r} is not produced by any statement")
            for args in st.groups.values():
                for arg in args:
                    if isinstance(arg.value, str):
                        locations.setdefault(arg.value, []).append(arg.span)

        elements, segments, sources, detectors, vacuum = [], [], [], [], []
        for st in self.statements:
            g = {k: [a.value for a in v] for k, v in st.groups.items()}
            try:
                if st.kind == "bs":
                    kw = {}
                    if "refl" in g:
                        kw["reflection_phase"] = g["refl"][0]
                    if "split" in g:
                        kw["amplitude_split"] = g["split"][0]
                    elements.append(BeamSplitter(st.name, tuple(g["in"]), tuple(g["out"]), **kw))
                elif st.kind == "mirror":
                    kw = {"reflection_phase": g["refl"][0]} if "refl" in g else {}
                    elements.append(Mirror(st.name, g["in"][0], g["out"][0], **kw))
                elif st.kind == "phase":
                    elements.append(PhaseShifter(st.name, g["in"][0], g["out"][0], g["value"][0]))
                elif st.kind == "detector":
                    detectors.append(Detector(st.name, g["mode"][0]))
                elif st.kind == "source single":
                    sources.append(SinglePhoton(st.name, g["out"][0]))
                elif st.kind == "source pair":
                    passthrough = tuple(g["pass"]) if "pass" in g else None
                    sources.append(PairSource(st.name, tuple(g["top"]), tuple(g["bottom"]), passthrough))
                elif st.kind == "segment":
                    if "phase" in g:
                        segments.append(Segment(st.name, g["phase"][0]))
                    else:
                        segments.append(Segment(st.name, length_nm=g["length"][0], wavelength_nm=g["lambda"][0]))
                elif st.kind == "vacuum":
                    vacuum.append(st.name)
            except ValueError as exc:
                self.error(st.name_span.line, st.name_span.column, ErrorKind.SYNTAX_ERROR, str(exc))
        circuit = Circuit(tuple(elements), tuple(segments), tuple(sources), tuple(detectors), tuple(vacuum))
        return ParseResult(circuit, locations)


def parse_with_locations(text: str, check: bool = True) -> ParseResult:
    """Parse ``text``; also return where each id and mode is mentioned."""
    parser = _Parser(text)
    parser.run()
    result = parser.build()
    if not parser.errors and check:
        for v in validate(result.circuit):
            spans = result.locations.get(v.subject) or [SourceSpan(1, 1)]
            span = spans[-1]
            parser.error(span.line, span.column, ErrorKind.INVALID_CIRCUIT, f"{v.rule.value}: {v.message}")
    if parser.errors:
        raise DSLError(parser.errors)
    return result


def parse(text: str, check: bool = True) -> Circuit:
    """Parse circuit text, raising ``DSLError`` listing every problem found.

    With ``check`` the parsed circuit must also pass ``validate``;
    violations are reported at the last line mentioning the offending
    mode or id.
    """
    return parse_with_locations(text, check).circuit


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _num(x: float) -> str:
    return repr(float(x))


def serialize(circuit: Circuit) -> str:
    """Canonical text for a valid circuit; ``parse(serialize(c)) == c``."""
    problems = validate(circuit)
    if problems:
        raise ValueError("cannot serialize an invalid circuit: " + "; ".join(map(str, problems)))
    lines = [HEADER]
    for s in circuit.sources:
        if isinstance(s, SinglePhoton):
            lines.append(f"source single {s.id} out({s.output})")
        else:
            text = f"source pair {s.id} top({s.top[0]},{s.top[1]}) bottom({s.bottom[0]},{s.bottom[1]})"
            if s.passthrough is not None:
                text += f" pass({s.passthrough[0]},{s.passthrough[1]})"
            lines.append(text)
    for m in circuit.vacuum:
        lines.append(f"vacuum {m}")
    for e in circuit.elements:
        if isinstance(e, BeamSplitter):
            text = f"bs {e.id} in({e.inputs[0]},{e.inputs[1]}) out({e.outputs[0]},{e.outputs[1]})"
            if e.reflection_phase != HALF_PI:
                text += f" refl({_num(e.reflection_phase)})"
            if e.amplitude_split != INV_SQRT2:
                text += f" split({_num(e.amplitude_split)})"
        elif isinstance(e, Mirror):
            text = f"mirror {e.id} in({e.input}) out({e.output})"
            if e.reflection_phase != HALF_PI:
                text += f" refl({_num(e.reflection_phase)})"
        else:
            text = f"phase {e.id} in({e.input}) out({e.output}) value({_num(e.value)})"
        lines.append(text)
    for seg in circuit.segments:
        if seg.length_nm is not None:
            lines.append(f"segment {seg.mode} length({_num(seg.length_nm)}) lambda({_num(seg.wavelength_nm)})")
        else:
            lines.append(f"segment {seg.mode} phase({_num(seg.propagation_phase)})")
    for d in circuit.detectors:
        lines.append(f"detector {d.id} mode({d.mode})")
    return "\n".join(lines) + "\n"
