"""Random valid circuits for property tests, oracle runs and benchmarks.

Circuits are built rail by rail: each rail is a line of modes, and every
element consumes the current mode of one or two rails and hands each rail a
fresh mode.  ``max_modes`` bounds the number of rails, which is the size of
the single-photon transfer matrix.
"""

from __future__ import annotations

import math
import random

from .circuit import BeamSplitter, Circuit, Detector, Mirror, PairSource, PhaseShifter, Segment, SinglePhoton


class _Rails:
    def __init__(self, rng: random.Random, prefix: str = "m"):
        self.rng = rng
        self.prefix = prefix
        self.count = 0
        self.elements = []
        self.segments = []

    def fresh(self) -> str:
        self.count += 1
        mode = f"{self.prefix}{self.count}"
        if self.rng.random() < 0.3:
            self.segments.append(Segment(mode, self.rng.uniform(0, 2 * math.pi)))
        return mode

    def splitter(self, rails: list[str], i: int, j: int) -> None:
        out_i, out_j = self.fresh(), self.fresh()
        refl = self.rng.choice([0.5 * math.pi, 1.5 * math.pi])
        name = f"{self.prefix}BS{len(self.elements) + 1}"
        self.elements.append(BeamSplitter(name, (rails[i], rails[j]), (out_i, out_j), refl))
        rails[i], rails[j] = out_i, out_j

    def mix(self, rails: list[str], depth: int, live: set[int]) -> list[str]:
        """Apply ``depth`` random elements, then tie every dark rail to a live one.

        ``live`` holds the rails that carry light initially; the final
        splitters keep every detector reachable.
        """
        rng = self.rng
        live = set(live)
        for _ in range(depth):
            n = len(self.elements) + 1
            choice = rng.random()
            if len(rails) >= 2 and choice < 0.5:
                i, j = rng.sample(range(len(rails)), 2)
                self.splitter(rails, i, j)
                if i in live or j in live:
                    live |= {i, j}
            else:
                i = rng.randrange(len(rails))
                out = self.fresh()
                if choice < 0.75:
                    self.elements.append(
                        PhaseShifter(f"{self.prefix}PS{n}", rails[i], out, rng.uniform(0, 2 * math.pi))
                    )
                else:
                    self.elements.append(Mirror(f"{self.prefix}M{n}", rails[i], out, rng.uniform(0, 2 * math.pi)))
                rails[i] = out
        for j in range(len(rails)):
            if j not in live:
                i = rng.choice(sorted(live))
                self.splitter(rails, *rng.sample([i, j], 2))
                live.add(j)
        return rails


def random_single_photon_circuit(rng: random.Random, max_modes: int = 8, max_depth: int = 12) -> Circuit:
    """One single-photon source on rail 0; the other rails are vacuum inputs."""
    width = rng.randint(1, max_modes)
    rails = _Rails(rng)
    inputs = [rails.fresh() for _ in range(width)]
    outputs = rails.mix(list(inputs), rng.randint(0, max_depth), {0})
    return Circuit(
        elements=tuple(rails.elements),
        segments=tuple(rails.segments),
        sources=(SinglePhoton("S", inputs[0]),),
        vacuum=tuple(inputs[1:]),
        detectors=tuple(Detector(f"D{k}", m) for k, m in enumerate(outputs)),
    )


def random_pair_circuit(rng: random.Random, max_modes: int = 8, max_depth: int = 8) -> Circuit:
    """A pair source whose photons enter two separate networks.

    Each arm starts with the two branch modes of its photon plus optional
    vacuum rails; the arms never mix.
    """
    width1 = rng.randint(2, max_modes - 2)
    width2 = rng.randint(2, max_modes - width1)
    arms = []
    for k, width in ((1, width1), (2, width2)):
        rails = _Rails(rng, prefix=f"a{k}_")
        inputs = [rails.fresh() for _ in range(width)]
        outputs = rails.mix(list(inputs), rng.randint(0, max_depth), {0, 1})
        arms.append((rails, inputs, outputs))
    (r1, in1, out1), (r2, in2, out2) = arms
    if rng.random() < 0.5:
        top, bottom = (in1[0], in2[0]), (in1[1], in2[1])
    else:
        top, bottom = (in1[1], in2[0]), (in1[0], in2[1])
    detectors = [Detector(f"A{k}", m) for k, m in enumerate(out1)] + [Detector(f"B{k}", m) for k, m in enumerate(out2)]
    return Circuit(
        elements=tuple(r1.elements + r2.elements),
        segments=tuple(r1.segments + r2.segments),
        sources=(PairSource("S", top, bottom),),
        vacuum=tuple(in1[2:] + in2[2:]),
        detectors=tuple(detectors),
    )
