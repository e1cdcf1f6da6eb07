"""First-order (single-photon) amplitudes and detection probabilities."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .circuit import Circuit, SinglePhoton
from .paths import PathProgram, compile_terms, enumerate_paths, path_kernel


def _single_source(circuit: Circuit, source: str | SinglePhoton | None) -> SinglePhoton:
    if isinstance(source, SinglePhoton):
        return source
    if source is None:
        singles = circuit.single_sources
        if len(singles) != 1:
            raise ValueError(f"circuit has {len(singles)} single-photon sources; name one")
        return singles[0]
    found = circuit.source(source)
    if not isinstance(found, SinglePhoton):
        raise ValueError(f"{source!r} is a pair source; use the entanglement engine")
    return found


def first_order_amplitude(circuit: Circuit, source: str | SinglePhoton | None, detector: str) -> complex:
    """Sum of path kernels from a single-photon source to ``detector``.

    No route means amplitude zero.
    """
    src = _single_source(circuit, source)
    total = 0j
    for path in enumerate_paths(circuit, src.id, detector):
        total += path_kernel(circuit, path).amplitude
    return total


def detection_probability(amplitude: complex) -> float:
    return abs(amplitude) ** 2


def detector_probabilities(circuit: Circuit, source: str | SinglePhoton | None = None) -> dict[str, float]:
    """Detection probability at every detector for one single-photon source."""
    src = _single_source(circuit, source)
    return {
        d.id: detection_probability(first_order_amplitude(circuit, src, d.id)) for d in circuit.detectors
    }


def amplitude_program(
    circuit: Circuit, detector: str, params: Sequence[str], source: str | SinglePhoton | None = None
) -> PathProgram:
    """Compile the first-order amplitude at ``detector`` with ``params`` left symbolic."""
    src = _single_source(circuit, source)
    paths = enumerate_paths(circuit, src.id, detector)
    return compile_terms(circuit, [(1.0, [p]) for p in paths], params)


def fringe_sweep(
    circuit: Circuit,
    shifter_id: str,
    values: Sequence[float],
    detector: str,
    source: str | SinglePhoton | None = None,
) -> list[tuple[float, float]]:
    """Detection probability at ``detector`` for each override of one phase shifter."""
    program = amplitude_program(circuit, detector, [shifter_id], source)
    values = [float(v) for v in values]
    if not values:
        return []
    amps = program.evaluate(np.asarray(values).reshape(-1, 1))
    return [(v, float(abs(a) ** 2)) for v, a in zip(values, amps)]
