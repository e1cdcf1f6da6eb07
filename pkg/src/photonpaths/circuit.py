"""Immutable optical circuit description and structural validation.

A circuit is a directed graph whose edges are *modes* (named wires) and whose
nodes are sources, optical elements and detectors.  Every mode is produced by
exactly one source port, element output port or vacuum declaration, and
consumed by exactly one element input port or detector.
"""

from __future__ import annotations

import enum
import graphlib
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Union

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi
INV_SQRT2 = 1.0 / math.sqrt(2.0)


def reduce_phase(phase: float) -> float:
    """Reduce ``phase`` into ``[0, 2*pi)``; raises ``ValueError`` if not finite."""
    phase = float(phase)
    if not math.isfinite(phase):
        raise ValueError(f"phase must be finite, got {phase!r}")
    r = phase % TWO_PI
    # tiny negative inputs round up to exactly 2*pi
    return 0.0 if r >= TWO_PI else r


def phase_distance(a: float, b: float) -> float:
    """Circular distance between two phases, in ``[0, pi]``."""
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def propagation_phase(length_nm: float, wavelength_nm: float) -> float:
    """Free-propagation phase ``2*pi*L/lambda`` reduced into ``[0, 2*pi)``.

    >>> propagation_phase(405, 810) == math.pi
    True
    """
    if not wavelength_nm > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm!r}")
    if not length_nm >= 0:
        raise ValueError(f"length must be non-negative, got {length_nm!r}")
    # fmod is exact, so the fractional cycle survives lengths far beyond 2**53 wavelengths
    cycles = math.fmod(length_nm, wavelength_nm) / wavelength_nm
    return reduce_phase(TWO_PI * cycles)


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BeamSplitter:
    """Lossless two-port splitter.

    Port convention: ``outputs = (t, r)`` where ``t`` is the transmit partner
    of ``inputs[0]``.  So ``inputs[0] -> outputs[0]`` and
    ``inputs[1] -> outputs[1]`` transmit, the crossed pairs reflect.
    """

    id: str
    inputs: tuple[str, str]
    outputs: tuple[str, str]
    reflection_phase: float = HALF_PI
    amplitude_split: float = INV_SQRT2

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "reflection_phase", reduce_phase(self.reflection_phase))
        object.__setattr__(self, "amplitude_split", float(self.amplitude_split))

    def transfer(self, in_port: str, out_port: str) -> complex:
        try:
            i = self.inputs.index(in_port)
            o = self.outputs.index(out_port)
        except ValueError:
            raise ValueError(
                f"({in_port!r}, {out_port!r}) is not a port pair of beam splitter {self.id!r}"
            ) from None
        if i == o:
            return complex(self.amplitude_split, 0.0)
        return self.amplitude_split * _unit(self.reflection_phase)


@dataclass(frozen=True)
class Mirror:
    id: str
    input: str
    output: str
    reflection_phase: float = HALF_PI

    def __post_init__(self):
        object.__setattr__(self, "reflection_phase", reduce_phase(self.reflection_phase))

    @property
    def inputs(self) -> tuple[str]:
        return (self.input,)

    @property
    def outputs(self) -> tuple[str]:
        return (self.output,)

    def transfer(self, in_port: str, out_port: str) -> complex:
        if (in_port, out_port) != (self.input, self.output):
            raise ValueError(f"({in_port!r}, {out_port!r}) is not a port pair of mirror {self.id!r}")
        return _unit(self.reflection_phase)


@dataclass(frozen=True)
class PhaseShifter:
    id: str
    input: str
    output: str
    value: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "value", reduce_phase(self.value))

    @property
    def inputs(self) -> tuple[str]:
        return (self.input,)

    @property
    def outputs(self) -> tuple[str]:
        return (self.output,)

    def transfer(self, in_port: str, out_port: str) -> complex:
        if (in_port, out_port) != (self.input, self.output):
            raise ValueError(
                f"({in_port!r}, {out_port!r}) is not a port pair of phase shifter {self.id!r}"
            )
        return _unit(self.value)


Element = Union[BeamSplitter, Mirror, PhaseShifter]


def _unit(phase: float) -> complex:
    return complex(math.cos(phase), math.sin(phase))


def element_transfer(element: Element, in_port: str, out_port: str) -> complex:
    """Complex amplitude for a photon entering ``in_port`` and leaving ``out_port``."""
    return element.transfer(in_port, out_port)


# ---------------------------------------------------------------------------
# Segments, sources, detectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """Free propagation along one mode.

    Either give ``propagation_phase`` directly or ``length_nm`` together with
    ``wavelength_nm``; in the latter case the phase is derived.
    """

    mode: str
    propagation_phase: float = 0.0
    length_nm: float | None = None
    wavelength_nm: float | None = None

    def __post_init__(self):
        if (self.length_nm is None) != (self.wavelength_nm is None):
            raise ValueError("length_nm and wavelength_nm must be given together")
        if self.length_nm is not None:
            object.__setattr__(self, "length_nm", float(self.length_nm))
            object.__setattr__(self, "wavelength_nm", float(self.wavelength_nm))
            phase = propagation_phase(self.length_nm, self.wavelength_nm)
        else:
            phase = self.propagation_phase
        object.__setattr__(self, "propagation_phase", reduce_phase(phase))

    @property
    def factor(self) -> complex:
        return _unit(self.propagation_phase)


class Branch(enum.Enum):
    TOP = "top"
    BOTTOM = "bottom"


@dataclass(frozen=True)
class SinglePhoton:
    id: str
    output: str

    @property
    def outputs(self) -> tuple[str]:
        return (self.output,)


@dataclass(frozen=True)
class PairSource:
    """Source of photon pairs in an equal superposition of two emission branches.

    ``top`` and ``bottom`` each hold ``(photon-1 mode, photon-2 mode)``.
    ``passthrough`` optionally names ``(in_mode, out_mode)``: light entering
    the source on ``in_mode`` leaves, with unit amplitude, on the branch mode
    ``out_mode``.  This aligns an externally routed mode with one of the
    emission modes (induced coherence between two crystals).
    """

    id: str
    top: tuple[str, str]
    bottom: tuple[str, str]
    passthrough: tuple[str, str] | None = None
    branch_amplitude: float = INV_SQRT2

    def __post_init__(self):
        object.__setattr__(self, "top", tuple(self.top))
        object.__setattr__(self, "bottom", tuple(self.bottom))
        if self.passthrough is not None:
            object.__setattr__(self, "passthrough", tuple(self.passthrough))

    @property
    def outputs(self) -> tuple[str, ...]:
        return self.top + self.bottom

    def branch_modes(self, branch: Branch) -> tuple[str, str]:
        return self.top if branch is Branch.TOP else self.bottom

    def photon_modes(self, photon: int) -> dict[Branch, str]:
        """Emission mode of photon 1 or 2 in each branch."""
        if photon not in (1, 2):
            raise ValueError(f"photon must be 1 or 2, got {photon!r}")
        return {b: self.branch_modes(b)[photon - 1] for b in Branch}


Source = Union[SinglePhoton, PairSource]


@dataclass(frozen=True)
class Detector:
    id: str
    mode: str


# ---------------------------------------------------------------------------
# Circuit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Connection:
    """A directed mode-to-mode edge through one node (element or passthrough)."""

    ref: str
    in_mode: str
    out_mode: str


@dataclass(frozen=True)
class Circuit:
    """Static description of an experiment.

    Collections are stored sorted by id (segments by mode) so that two
    circuits built in a different statement order compare equal.
    ``vacuum`` lists open input modes that carry no photon.
    """

    elements: tuple[Element, ...] = ()
    segments: tuple[Segment, ...] = ()
    sources: tuple[Source, ...] = ()
    detectors: tuple[Detector, ...] = ()
    vacuum: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(self.elements, key=lambda e: e.id)))
        object.__setattr__(self, "segments", tuple(sorted(self.segments, key=lambda s: s.mode)))
        object.__setattr__(self, "sources", tuple(sorted(self.sources, key=lambda s: s.id)))
        object.__setattr__(self, "detectors", tuple(sorted(self.detectors, key=lambda d: d.id)))
        object.__setattr__(self, "vacuum", tuple(sorted(self.vacuum)))

    # -- lookups -----------------------------------------------------------

    @cached_property
    def _by_id(self) -> dict:
        table = {}
        for item in (*self.elements, *self.sources, *self.detectors):
            table.setdefault(item.id, item)
        return table

    def element(self, element_id: str) -> Element:
        item = self._by_id.get(element_id)
        if not isinstance(item, (BeamSplitter, Mirror, PhaseShifter)):
            raise KeyError(f"no element {element_id!r}")
        return item

    def source(self, source_id: str) -> Source:
        item = self._by_id.get(source_id)
        if not isinstance(item, (SinglePhoton, PairSource)):
            raise KeyError(f"no source {source_id!r}")
        return item

    def detector(self, detector_id: str) -> Detector:
        item = self._by_id.get(detector_id)
        if not isinstance(item, Detector):
            raise KeyError(f"no detector {detector_id!r}")
        return item

    def segment(self, mode: str) -> Segment | None:
        return self._segments.get(mode)

    @cached_property
    def _segments(self) -> dict[str, Segment]:
        return {s.mode: s for s in self.segments}

    @property
    def pair_sources(self) -> list[PairSource]:
        return [s for s in self.sources if isinstance(s, PairSource)]

    @property
    def single_sources(self) -> list[SinglePhoton]:
        return [s for s in self.sources if isinstance(s, SinglePhoton)]

    @cached_property
    def connections(self) -> tuple[Connection, ...]:
        """Every mode-to-mode edge, including pair-source passthroughs."""
        edges = []
        for e in self.elements:
            for i in e.inputs:
                for o in e.outputs:
                    edges.append(Connection(e.id, i, o))
        for s in self.pair_sources:
            if s.passthrough is not None:
                edges.append(Connection(s.id, *s.passthrough))
        return tuple(edges)

    @cached_property
    def outgoing(self) -> dict[str, tuple[Connection, ...]]:
        table: dict[str, list[Connection]] = {}
        for c in self.connections:
            table.setdefault(c.in_mode, []).append(c)
        return {m: tuple(sorted(cs, key=lambda c: (c.ref, c.out_mode))) for m, cs in table.items()}

    @cached_property
    def detector_by_mode(self) -> dict[str, Detector]:
        return {d.mode: d for d in self.detectors}

    @cached_property
    def producers(self) -> dict[str, list[str]]:
        """Mode -> ids of everything that emits into it (vacuum as ``"vacuum"``)."""
        table: dict[str, list[str]] = {}
        for s in self.sources:
            for m in s.outputs:
                table.setdefault(m, []).append(s.id)
        for e in self.elements:
            for m in e.outputs:
                table.setdefault(m, []).append(e.id)
        for m in self.vacuum:
            table.setdefault(m, []).append("vacuum")
        return table

    @cached_property
    def consumers(self) -> dict[str, list[str]]:
        table: dict[str, list[str]] = {}
        for e in self.elements:
            for m in e.inputs:
                table.setdefault(m, []).append(e.id)
        for s in self.pair_sources:
            if s.passthrough is not None:
                table.setdefault(s.passthrough[0], []).append(s.id)
        for d in self.detectors:
            table.setdefault(d.mode, []).append(d.id)
        return table

    @property
    def modes(self) -> list[str]:
        return sorted(set(self.producers) | set(self.consumers))

    def reachable_modes(self, start: Iterable[str]) -> set[str]:
        seen: set[str] = set()
        stack = list(start)
        while stack:
            m = stack.pop()
            if m in seen:
                continue
            seen.add(m)
            stack.extend(c.out_mode for c in self.outgoing.get(m, ()))
        return seen

    def reachable_detectors(self, start: Iterable[str]) -> list[str]:
        modes = self.reachable_modes(start)
        return [d.id for d in self.detectors if d.mode in modes]

    # -- derived circuits --------------------------------------------------

    def with_phase(self, shifter_id: str, value: float) -> Circuit:
        """Copy of the circuit with one phase shifter's value replaced."""
        element = self.element(shifter_id)
        if not isinstance(element, PhaseShifter):
            raise KeyError(f"{shifter_id!r} is not a phase shifter")
        elements = [replace(e, value=value) if e.id == shifter_id else e for e in self.elements]
        return replace(self, elements=tuple(elements))

    def with_segment(self, mode: str, phase: float) -> Circuit:
        """Copy of the circuit with the segment on ``mode`` set to ``phase``."""
        segments = [s for s in self.segments if s.mode != mode]
        segments.append(Segment(mode, phase))
        return replace(self, segments=tuple(segments))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


class Rule(enum.Enum):
    DUPLICATE_ID = "DuplicateId"
    DUPLICATE_PRODUCER = "DuplicateProducer"
    DUPLICATE_CONSUMER = "DuplicateConsumer"
    DANGLING_MODE = "DanglingMode"
    CYCLE = "Cycle"
    UNREACHABLE_DETECTOR = "UnreachableDetector"
    BAD_SPLIT = "BadSplit"
    OVERLAPPING_BRANCHES = "OverlappingBranches"
    BAD_BRANCH_AMPLITUDE = "BadBranchAmplitude"
    BAD_PASSTHROUGH = "BadPassthrough"
    DUPLICATE_SEGMENT = "DuplicateSegment"
    UNKNOWN_SEGMENT_MODE = "UnknownSegmentMode"


@dataclass(frozen=True)
class Violation:
    rule: Rule
    subject: str
    message: str = field(default="", compare=False)

    def __str__(self) -> str:
        return f"{self.rule.value}({self.subject!r}): {self.message}"


def validate(circuit: Circuit) -> list[Violation]:
    """Return every broken structural rule; an empty list means the circuit is valid."""
    return list(_violations(circuit))


def _violations(c: Circuit) -> Iterator[Violation]:
    seen_ids: set[str] = set()
    for item in (*c.elements, *c.sources, *c.detectors):
        if item.id in seen_ids:
            yield Violation(Rule.DUPLICATE_ID, item.id, f"id {item.id!r} is used more than once")
        seen_ids.add(item.id)

    for e in c.elements:
        if isinstance(e, BeamSplitter) and not math.isclose(
            2.0 * e.amplitude_split**2, 1.0, rel_tol=0.0, abs_tol=1e-12
        ):
            yield Violation(Rule.BAD_SPLIT, e.id, f"amplitude_split {e.amplitude_split} is not 1/sqrt(2)")

    for s in c.pair_sources:
        if len(set(s.top + s.bottom)) != 4:
            yield Violation(Rule.OVERLAPPING_BRANCHES, s.id, "top and bottom modes must be four distinct modes")
        if not math.isclose(s.branch_amplitude, INV_SQRT2, rel_tol=0.0, abs_tol=1e-12):
            yield Violation(Rule.BAD_BRANCH_AMPLITUDE, s.id, "branch amplitude must be 1/sqrt(2)")
        if s.passthrough is not None and s.passthrough[1] not in s.outputs:
            yield Violation(
                Rule.BAD_PASSTHROUGH, s.id, f"passthrough target {s.passthrough[1]!r} is not a branch mode"
            )

    for mode in c.modes:
        producers = c.producers.get(mode, [])
        consumers = c.consumers.get(mode, [])
        if len(producers) > 1:
            yield Violation(Rule.DUPLICATE_PRODUCER, mode, f"mode {mode!r} is produced by {', '.join(producers)}")
        if len(consumers) > 1:
            yield Violation(Rule.DUPLICATE_CONSUMER, mode, f"mode {mode!r} is consumed by {', '.join(consumers)}")
        if not producers:
            yield Violation(Rule.DANGLING_MODE, mode, f"mode {mode!r} has no producer")
        if not consumers:
            yield Violation(Rule.DANGLING_MODE, mode, f"mode {mode!r} is never consumed")

    all_modes = set(c.modes)
    seg_seen: set[str] = set()
    for seg in c.segments:
        if seg.mode in seg_seen:
            yield Violation(Rule.DUPLICATE_SEGMENT, seg.mode, f"mode {seg.mode!r} has more than one segment")
        seg_seen.add(seg.mode)
        if seg.mode not in all_modes:
            yield Violation(Rule.UNKNOWN_SEGMENT_MODE, seg.mode, f"segment on unknown mode {seg.mode!r}")

    sorter = graphlib.TopologicalSorter({m: () for m in all_modes})
    for conn in c.connections:
        sorter.add(conn.out_mode, conn.in_mode)
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        yield Violation(Rule.CYCLE, cycle[0], "mode graph contains a cycle: " + " -> ".join(cycle))

    emitted = [m for s in c.sources for m in s.outputs]
    reachable = c.reachable_modes(emitted)
    for d in c.detectors:
        # a producer-less detector mode is already reported as dangling
        if d.mode not in reachable and d.mode in c.producers:
            yield Violation(Rule.UNREACHABLE_DETECTOR, d.id, f"detector {d.id!r} cannot be reached from any source")


def topological_modes(circuit: Circuit) -> list[str]:
    """Modes in an order compatible with propagation (raises on cycles)."""
    sorter = graphlib.TopologicalSorter({m: () for m in circuit.modes})
    for conn in circuit.connections:
        sorter.add(conn.out_mode, conn.in_mode)
    return list(sorter.static_order())
