"""Builders for the canonical interferometer setups.

Port geometry is fixed so that:

* ``build_mzi``: detector ``D6`` is the bright port at zero phase and
  ``P(D6) = (1 + cos phi) / 2``.
* ``build_jaeger``: ``U1``/``U2`` are the transmit ports of the top-branch
  photons at ``H1``/``H2``, giving ``P(U1, U2) = (1 - cos(phi1 + phi2)) / 4``.
* ``build_lemos``: signal port ``g`` is fully bright at zero object phase.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path as FilePath

import numpy as np

from .circuit import (
    BeamSplitter,
    Circuit,
    Detector,
    Mirror,
    PairSource,
    PhaseShifter,
    Segment,
    SinglePhoton,
)
from .entanglement import joint_distribution, outcome_program

MZI_BRIGHT = "D6"
MZI_DARK = "D7"
JAEGER_ARMS = (("U1", "L1"), ("U2", "L2"))
LEMOS_OBJECT = "O"


def build_mzi(phase_value: float = 0.0) -> Circuit:
    """Mach-Zehnder interferometer with the phase shifter ``PHI`` in the lower arm.

    Modes: ``E1`` input, ``E0`` vacuum port, ``E2``/``E3`` after BS1,
    ``E4``/``E5`` after the mirrors, ``E5s`` after the shifter,
    ``E6``/``E7`` outputs.
    """
    return Circuit(
        sources=(SinglePhoton("S", "E1"),),
        vacuum=("E0",),
        elements=(
            BeamSplitter("BS1", ("E1", "E0"), ("E2", "E3")),
            Mirror("Ma", "E2", "E4"),
            Mirror("Mb", "E3", "E5"),
            PhaseShifter("PHI", "E5", "E5s", phase_value),
            BeamSplitter("BS2", ("E5s", "E4"), ("E6", "E7")),
        ),
        detectors=(Detector(MZI_BRIGHT, "E6"), Detector(MZI_DARK, "E7")),
    )


def build_jaeger(phi1: float = 0.0, phi2: float = 0.0) -> Circuit:
    """Entangled pair feeding two beam splitters, one per photon.

    The source emits either ``(a1, a2)`` (top) or ``(b1, b2)`` (bottom).
    ``PHI1``/``PHI2`` sit on the top-branch legs before ``H1``/``H2``.
    """
    return Circuit(
        sources=(PairSource("S", top=("a1", "a2"), bottom=("b1", "b2")),),
        elements=(
            PhaseShifter("PHI1", "a1", "a1s", phi1),
            PhaseShifter("PHI2", "a2", "a2s", phi2),
            BeamSplitter("H1", ("a1s", "b1"), ("u1", "l1")),
            BeamSplitter("H2", ("a2s", "b2"), ("u2", "l2")),
        ),
        detectors=(
            Detector("U1", "u1"),
            Detector("L1", "l1"),
            Detector("U2", "u2"),
            Detector("L2", "l2"),
        ),
    )


def build_lemos(object_phase: float = 0.0, distinguishable: bool = False) -> Circuit:
    """Imaging with undetected photons, at the level of branch bookkeeping.

    Branch top is emission in crystal NL1 (signal ``s1``, idler ``i1``),
    branch bottom is emission in NL2 (signal ``s2``, idler ``ic``).  The NL1
    idler crosses the object ``O`` and is fed back through NL2 so that it
    leaves on ``ic``, the same mode as the NL2 idler.  The signals meet at
    ``BS2`` with outputs ``g`` and ``h``; the idler is never resolved.

    With ``distinguishable=True`` the NL1 idler goes to its own dump
    detector instead, which makes the two branches distinguishable.
    """
    elements = [
        PhaseShifter(LEMOS_OBJECT, "i1", "io", object_phase),
        BeamSplitter("BS2", ("s1", "s2"), ("g", "h")),
    ]
    detectors = [Detector("g", "g"), Detector("h", "h"), Detector("Di", "ic")]
    if distinguishable:
        source = PairSource("NL", top=("s1", "i1"), bottom=("s2", "ic"))
        detectors.append(Detector("Di1", "io"))
    else:
        source = PairSource("NL", top=("s1", "i1"), bottom=("s2", "ic"), passthrough=("io", "ic"))
    # offsets the reflection phase at BS2 so g is bright at zero object phase
    calibration = Segment("s2", 1.5 * math.pi)
    return Circuit(elements=tuple(elements), sources=(source,), detectors=tuple(detectors), segments=(calibration,))


def lemos_signal_probabilities(circuit: Circuit) -> tuple[float, float]:
    """``(P(g), P(h))`` summed over every idler outcome."""
    table = joint_distribution(circuit)
    return table.marginals["g"], table.marginals["h"]


@dataclass(frozen=True)
class PhaseImage:
    phases: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.phases, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("phase image must be a non-empty 2-D grid")
        if not np.all(np.isfinite(arr)):
            raise ValueError("phase image contains non-finite values")
        object.__setattr__(self, "phases", arr)

    @property
    def height(self) -> int:
        return self.phases.shape[0]

    @property
    def width(self) -> int:
        return self.phases.shape[1]


@dataclass(frozen=True)
class IntensityImagePair:
    g: np.ndarray
    h: np.ndarray


def lemos_image(image: PhaseImage, distinguishable: bool = False) -> IntensityImagePair:
    """Signal intensities at ``g`` and ``h`` with each pixel's phase on the object.

    The circuit is compiled once with the object phase symbolic, then every
    pixel is evaluated through the path-sum kernel.
    """
    circuit = build_lemos(0.0, distinguishable)
    table = joint_distribution(circuit)
    theta = image.phases.reshape(-1, 1)
    out = {}
    for signal in ("g", "h"):
        total = np.zeros(theta.shape[0])
        for idler in table.arm2:
            amps = outcome_program(circuit, None, (signal, idler), [LEMOS_OBJECT]).evaluate(theta)
            total += np.abs(amps) ** 2
        out[signal] = total.reshape(image.phases.shape)
    return IntensityImagePair(out["g"], out["h"])


# ---------------------------------------------------------------------------
# CSV grids
# ---------------------------------------------------------------------------


def read_phase_image(path: str | FilePath) -> PhaseImage:
    """Read a comma-separated grid of radians; cells accept phase expressions like ``pi``."""
    from .dsl import evaluate_phase

    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            cells = [c.strip() for c in row]
            if not any(cells):
                continue
            rows.append([evaluate_phase(c) for c in cells])
    if len({len(r) for r in rows}) > 1:
        raise ValueError(f"{path}: rows have different lengths")
    return PhaseImage(np.array(rows, dtype=np.float64))


def format_grid(grid: np.ndarray) -> str:
    buf = io.StringIO()
    for row in np.asarray(grid):
        buf.write(",".join(format(float(v), ".12g") for v in row))
        buf.write("\n")
    return buf.getvalue()
