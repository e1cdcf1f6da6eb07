import math
import re
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from photonpaths.circuit import Circuit, PhaseShifter
from photonpaths.corpus import random_pair_circuit, random_single_photon_circuit
from photonpaths.dsl import (
    HEADER,
    DSLError,
    ErrorKind,
    PhaseExprError,
    evaluate_phase,
    parse,
    parse_with_locations,
    serialize,
)
from photonpaths.scenarios import build_jaeger, build_lemos, build_mzi

MALFORMED = sorted((Path(__file__).parent / "data" / "malformed").glob("*.pic"))

MZI_TEXT = """\
source single S out(E1)
vacuum E0
bs BS1 in(E1, E0) out(E2, E3)
mirror Ma in(E2) out(E4)
mirror Mb in(E3) out(E5)
phase PHI in(E5) out(E5s) value(0)
bs BS2 in(E5s, E4) out(E6, E7)
detector D6 mode(E6)
detector D7 mode(E7)
"""


def expectation(path: Path) -> tuple[int, str]:
    m = re.match(r"# expect: (\d+) (\w+)", path.read_text().splitlines()[0])
    return int(m.group(1)), m.group(2)


class TestParse:
    def test_minimal_mzi(self):
        c = parse(MZI_TEXT)
        assert len(c.elements) == 5 and len(c.detectors) == 2
        assert c == build_mzi(0.0)

    def test_phase_value(self):
        c = parse("source single S out(c)\nphase F1 in(c) out(e) value(pi/2)\ndetector D mode(e)\n")
        assert c.element("F1") == PhaseShifter("F1", "c", "e", math.pi / 2)

    def test_statement_order_irrelevant(self):
        lines = MZI_TEXT.splitlines()
        assert parse("\n".join(reversed(lines))) == parse(MZI_TEXT)

    def test_comments_and_blank_lines(self):
        text = "# header\n\n" + MZI_TEXT.replace("vacuum E0", "vacuum E0   # open port")
        assert parse(text) == build_mzi(0.0)

    def test_unknown_mode_position(self):
        text = "source single S out(a)\nvacuum b\nbs BS1 in(a, zz) out(c, d)\ndetector Dc mode(c)\ndetector Dd mode(d)\n"
        with pytest.raises(DSLError) as info:
            parse(text)
        (err,) = info.value.errors
        assert err.kind is ErrorKind.UNKNOWN_MODE
        assert (err.span.line, err.span.column) == (3, 14)

    def test_reports_every_error(self):
        text = "bs X in(a,b) out(c)\nfoo bar\ndetector D mode(zz)\n"
        with pytest.raises(DSLError) as info:
            parse(text)
        assert [(e.span.line, e.kind) for e in info.value.errors] == [
            (1, ErrorKind.SYNTAX_ERROR),
            (2, ErrorKind.UNKNOWN_KEYWORD),
            (3, ErrorKind.UNKNOWN_MODE),
        ]

    def test_check_false_skips_validation(self):
        text = "source single S out(a)\nvacuum v\ndetector D mode(a)\ndetector W mode(v)\n"
        with pytest.raises(DSLError):
            parse(text)
        assert len(parse(text, check=False).detectors) == 2

    def test_locations(self):
        result = parse_with_locations(MZI_TEXT)
        assert result.locations["PHI"][0].line == 6
        assert [s.line for s in result.locations["E5s"]] == [6, 7]


class TestNegativeCorpus:
    def test_corpus_size(self):
        assert len(MALFORMED) >= 10

    @pytest.mark.parametrize("path", MALFORMED, ids=lambda p: p.stem)
    def test_positioned_error(self, path):
        line, kind = expectation(path)
        with pytest.raises(DSLError) as info:
            parse(path.read_text())
        errors = info.value.errors
        assert errors
        assert any(e.span.line == line and e.kind.value == kind for e in errors), [str(e) for e in errors]
        for e in errors:
            assert e.span.line >= 1 and e.span.column >= 1


# reference evaluator over a generated term list, independent of the parser
terms = st.one_of(
    st.tuples(st.just("num"), st.integers(0, 1000), st.just(1)),
    st.tuples(st.just("pi"), st.just(1), st.integers(1, 16)),
    st.tuples(st.just("kpi"), st.integers(0, 8), st.integers(1, 16)),
)


def render(term) -> tuple[str, float]:
    kind, a, b = term
    if kind == "num":
        return str(a / 8), a / 8
    if kind == "pi":
        return ("pi" if b == 1 else f"pi/{b}"), math.pi / b
    return f"{a}*pi/{b}", a * math.pi / b


class TestPhaseExpressions:
    @pytest.mark.parametrize(
        "text, value",
        [
            ("0", 0.0),
            ("pi", math.pi),
            ("pi/2", math.pi / 2),
            ("-pi/2", -math.pi / 2),
            ("0.5*pi - 1", 0.5 * math.pi - 1),
            ("2*pi/3", 2 * math.pi / 3),
            ("1e-3 + pi/4", 1e-3 + math.pi / 4),
            ("  pi  +  pi  ", 2 * math.pi),
        ],
    )
    def test_examples(self, text, value):
        assert evaluate_phase(text) == pytest.approx(value, abs=1e-15)

    @pytest.mark.parametrize("text", ["", "pi/", "pi/0", "2*", "2*3", "pi pi", "tau", "--pi", "(pi)", "pi*2"])
    def test_rejected(self, text):
        with pytest.raises(PhaseExprError):
            evaluate_phase(text)

    @given(st.booleans(), st.lists(st.tuples(st.sampled_from("+-"), terms), max_size=5), terms)
    def test_against_reference(self, negate, rest, first):
        text, expected = render(first)
        if negate:
            text, expected = "-" + text, -expected
        for op, term in rest:
            t, v = render(term)
            text += f" {op} {t}"
            expected = expected + v if op == "+" else expected - v
        assert evaluate_phase(text) == pytest.approx(expected, rel=1e-12, abs=1e-12)


class TestSerialize:
    @pytest.mark.parametrize(
        "circuit",
        [build_mzi(0.0), build_mzi(1.3), build_jaeger(0.2, -0.7), build_lemos(2.0), build_lemos(0.5, True)],
        ids=["mzi0", "mzi", "jaeger", "lemos", "lemos-dist"],
    )
    def test_round_trip_scenarios(self, circuit):
        text = serialize(circuit)
        assert parse(text) == circuit
        assert serialize(parse(text)) == text

    def test_jaeger_keeps_branch_syntax(self):
        text = serialize(build_jaeger())
        assert "source pair S top(a1,a2) bottom(b1,b2)" in text

    def test_empty_circuit(self):
        text = serialize(Circuit())
        assert text.strip() == HEADER
        assert parse(text) == Circuit()

    def test_invalid_circuit_rejected(self):
        c = build_mzi(0)
        broken = Circuit(c.elements[1:], c.segments, c.sources, c.detectors, c.vacuum)
        with pytest.raises(ValueError):
            serialize(broken)

    @given(st.integers(0, 2**32 - 1))
    def test_round_trip_random(self, seed):
        import random

        rng = random.Random(seed)
        for c in (random_single_photon_circuit(rng), random_pair_circuit(rng)):
            assert parse(serialize(c)) == c
