"""Reference amplitudes by mode-vector propagation.

Nothing here walks paths: a state vector over all modes is pushed through
per-element matrices in topological order.  Agreement with the path engine
is therefore an independent check, not a restatement.
"""

from __future__ import annotations

import graphlib
import random
from dataclasses import dataclass

import numpy as np

from .circuit import BeamSplitter, Circuit, Mirror, PairSource, PhaseShifter, SinglePhoton


@dataclass(frozen=True)
class _Node:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    matrix: np.ndarray  # matrix[out, in]


def _node_for(element) -> _Node:
    if isinstance(element, BeamSplitter):
        t = element.amplitude_split
        r = t * np.exp(1j * element.reflection_phase)
        return _Node(element.inputs, element.outputs, np.array([[t, r], [r, t]], dtype=complex))
    if isinstance(element, Mirror):
        return _Node((element.input,), (element.output,), np.array([[np.exp(1j * element.reflection_phase)]]))
    if isinstance(element, PhaseShifter):
        return _Node((element.input,), (element.output,), np.array([[np.exp(1j * element.value)]]))
    raise TypeError(f"unknown element {element!r}")


def _nodes(circuit: Circuit) -> list[_Node]:
    nodes = [_node_for(e) for e in circuit.elements]
    for s in circuit.sources:
        if isinstance(s, PairSource) and s.passthrough is not None:
            nodes.append(_Node((s.passthrough[0],), (s.passthrough[1],), np.ones((1, 1), dtype=complex)))
    return nodes


def node_order(circuit: Circuit, rng: random.Random | None = None) -> list[_Node]:
    """Nodes in a topological order; ``rng`` picks randomly among ready nodes."""
    nodes = _nodes(circuit)
    producer = {m: i for i, n in enumerate(nodes) for m in n.outputs}
    sorter = graphlib.TopologicalSorter()
    for i, n in enumerate(nodes):
        sorter.add(i, *(producer[m] for m in n.inputs if m in producer))
    sorter.prepare()
    order = []
    while sorter.is_active():
        ready = sorted(sorter.get_ready())
        if rng is not None:
            rng.shuffle(ready)
        for i in ready:
            order.append(nodes[i])
            sorter.done(i)
    return order


class _Propagator:
    def __init__(self, circuit: Circuit, rng: random.Random | None = None):
        self.circuit = circuit
        self.modes = circuit.modes
        self.index = {m: i for i, m in enumerate(self.modes)}
        self.order = node_order(circuit, rng)
        self.phase = np.ones(len(self.modes), dtype=complex)
        for seg in circuit.segments:
            if seg.mode in self.index:
                self.phase[self.index[seg.mode]] = np.exp(1j * seg.propagation_phase)

    def run(self, initial: np.ndarray) -> np.ndarray:
        state = initial * self.phase
        for node in self.order:
            ins = [self.index[m] for m in node.inputs]
            outs = [self.index[m] for m in node.outputs]
            vin = state[ins].copy()
            state[ins] = 0
            state[outs] += (node.matrix @ vin) * self.phase[outs]
        return state

    def unit(self, mode: str) -> np.ndarray:
        v = np.zeros(len(self.modes), dtype=complex)
        v[self.index[mode]] = 1.0
        return self.run(v)


def single_photon_oracle(
    circuit: Circuit, source: str, detector: str, rng: random.Random | None = None
) -> complex:
    """Amplitude at ``detector`` for one photon emitted by ``source``."""
    src = circuit.source(source)
    if not isinstance(src, SinglePhoton):
        raise ValueError(f"{source!r} is not a single-photon source")
    prop = _Propagator(circuit, rng)
    state = prop.unit(src.output)
    return complex(state[prop.index[circuit.detector(detector).mode]])


@dataclass(frozen=True)
class TransferMatrix:
    """Input-mode to detector amplitudes; ``matrix[detector, input]``."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    matrix: np.ndarray

    def is_unitary(self, atol: float = 1e-10) -> bool:
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            return False
        return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0.0, atol=atol))


def transfer_matrix(circuit: Circuit, rng: random.Random | None = None) -> TransferMatrix:
    """Assemble the full single-photon transfer matrix from every input mode."""
    prop = _Propagator(circuit, rng)
    inputs = sorted({m for s in circuit.sources for m in s.outputs} | set(circuit.vacuum))
    outputs = tuple(d.id for d in circuit.detectors)
    rows = [prop.index[d.mode] for d in circuit.detectors]
    cols = [prop.unit(m)[rows] for m in inputs]
    matrix = np.array(cols, dtype=complex).T if cols else np.zeros((len(rows), 0), dtype=complex)
    return TransferMatrix(tuple(inputs), outputs, matrix)


def two_photon_state(circuit: Circuit, pair: str, rng: random.Random | None = None) -> np.ndarray:
    """Joint amplitude array ``psi[mode_1, mode_2]`` after the pair crosses the circuit.

    The state is the branch-weighted sum of tensor products of the two
    photons' propagated mode vectors.
    """
    src = circuit.source(pair)
    if not isinstance(src, PairSource):
        raise ValueError(f"{pair!r} is not a pair source")
    prop = _Propagator(circuit, rng)
    psi = np.zeros((len(prop.modes), len(prop.modes)), dtype=complex)
    for m1, m2 in (src.top, src.bottom):
        psi += src.branch_amplitude * np.outer(prop.unit(m1), prop.unit(m2))
    return psi


def two_photon_oracle(
    circuit: Circuit, pair: str, outcome: tuple[str, str], rng: random.Random | None = None
) -> float:
    """Probability that photon 1 fires ``outcome[0]`` and photon 2 fires ``outcome[1]``."""
    psi = two_photon_state(circuit, pair, rng)
    index = {m: i for i, m in enumerate(circuit.modes)}
    i = index[circuit.detector(outcome[0]).mode]
    j = index[circuit.detector(outcome[1]).mode]
    return float(abs(psi[i, j]) ** 2)
