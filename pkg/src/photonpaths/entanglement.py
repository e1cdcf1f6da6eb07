"""Second-order (entangled-pair) amplitudes and joint probability tables.

Within one emission branch the two partners' kernels multiply, with no
regard to which photon is detected first; the two branches then add.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .circuit import Branch, Circuit, PairSource
from .paths import PathProgram, compile_terms, enumerate_paths, path_kernel


class JointOutcome(NamedTuple):
    detector_1: str
    detector_2: str


@dataclass(frozen=True)
class ProbabilityTable:
    """Joint outcome probabilities for two detector arms and their marginals."""

    arm1: tuple[str, ...]
    arm2: tuple[str, ...]
    joint: dict[JointOutcome, float]
    marginals: dict[str, float]

    @classmethod
    def from_joint(cls, arm1: Sequence[str], arm2: Sequence[str], joint: dict) -> ProbabilityTable:
        joint = {JointOutcome(*k): float(v) for k, v in joint.items()}
        marginals = {}
        for d in arm1:
            marginals[d] = sum(joint[JointOutcome(d, e)] for e in arm2)
        for e in arm2:
            marginals[e] = sum(joint[JointOutcome(d, e)] for d in arm1)
        return cls(tuple(arm1), tuple(arm2), joint, marginals)

    @property
    def outcomes(self) -> list[JointOutcome]:
        return [JointOutcome(d, e) for d, e in itertools.product(self.arm1, self.arm2)]

    def total(self) -> float:
        return sum(self.joint.values())


def _pair_source(circuit: Circuit, pair: str | PairSource | None) -> PairSource:
    if isinstance(pair, PairSource):
        return pair
    if pair is None:
        pairs = circuit.pair_sources
        if len(pairs) != 1:
            raise ValueError(f"circuit has {len(pairs)} pair sources; name one")
        return pairs[0]
    found = circuit.source(pair)
    if not isinstance(found, PairSource):
        raise ValueError(f"{pair!r} is not a pair source")
    return found


def arm_detectors(circuit: Circuit, pair: str | PairSource | None = None) -> tuple[list[str], list[str]]:
    """Detectors reachable by photon 1 and by photon 2; the two sets must be disjoint."""
    src = _pair_source(circuit, pair)
    arm1 = circuit.reachable_detectors(src.photon_modes(1).values())
    arm2 = circuit.reachable_detectors(src.photon_modes(2).values())
    shared = set(arm1) & set(arm2)
    if shared:
        raise ValueError(f"detectors {sorted(shared)} are reachable by both photons")
    return arm1, arm2


def _branch_sum(circuit: Circuit, src: PairSource, branch: Branch, photon: int, detector: str) -> complex:
    start = src.photon_modes(photon)[branch]
    total = 0j
    for path in enumerate_paths(circuit, start, detector):
        total += path_kernel(circuit, path).amplitude
    return total


def joint_amplitude(
    circuit: Circuit,
    pair: str | PairSource | None,
    outcome: tuple[str, str],
    partner_order: str = "forward",
) -> complex:
    """Amplitude that photon 1 fires ``outcome[0]`` and photon 2 fires ``outcome[1]``.

    ``partner_order="reverse"`` multiplies the photon-2 factor first; the
    result is identical, which is the point of the option.
    """
    src = _pair_source(circuit, pair)
    d1, d2 = outcome
    total = 0j
    for branch in Branch:
        k1 = _branch_sum(circuit, src, branch, 1, d1)
        k2 = _branch_sum(circuit, src, branch, 2, d2)
        if partner_order == "forward":
            total += k1 * k2
        elif partner_order == "reverse":
            total += k2 * k1
        else:
            raise ValueError(f"partner_order must be 'forward' or 'reverse', got {partner_order!r}")
    return src.branch_amplitude * total


def joint_distribution(circuit: Circuit, pair: str | PairSource | None = None) -> ProbabilityTable:
    """Joint table over every arm-1 x arm-2 detector combination."""
    src = _pair_source(circuit, pair)
    arm1, arm2 = arm_detectors(circuit, src)
    joint = {
        (d1, d2): abs(joint_amplitude(circuit, src, (d1, d2))) ** 2 for d1, d2 in itertools.product(arm1, arm2)
    }
    return ProbabilityTable.from_joint(arm1, arm2, joint)


def _check_arms(circuit: Circuit, src: PairSource, arm1: Sequence[str], arm2: Sequence[str]) -> None:
    reach1, reach2 = arm_detectors(circuit, src)
    for d in (*arm1, *arm2):
        circuit.detector(d)
    if len(arm1) != 2 or len(arm2) != 2 or len(set(arm1) | set(arm2)) != 4:
        raise ValueError("need two distinct detectors per arm")
    if not (set(arm1) <= set(reach1) and set(arm2) <= set(reach2)):
        raise ValueError(
            f"detectors {list(arm1)} / {list(arm2)} are not partitioned into the photon-1 and photon-2 arms"
        )


def joint_probability_table(
    circuit: Circuit,
    pair: str | PairSource | None,
    arm1: Sequence[str],
    arm2: Sequence[str],
) -> ProbabilityTable:
    """The 2 x 2 joint table ``|joint_amplitude|**2`` with row and column marginals."""
    src = _pair_source(circuit, pair)
    _check_arms(circuit, src, arm1, arm2)
    joint = {(d1, d2): abs(joint_amplitude(circuit, src, (d1, d2))) ** 2 for d1 in arm1 for d2 in arm2}
    return ProbabilityTable.from_joint(arm1, arm2, joint)


def marginal_probability(table: ProbabilityTable, detector: str) -> float:
    """Single-detector probability, summed over the partner's outcomes."""
    if detector in table.arm1:
        return sum(table.joint[JointOutcome(detector, e)] for e in table.arm2)
    if detector in table.arm2:
        return sum(table.joint[JointOutcome(d, detector)] for d in table.arm1)
    raise KeyError(f"detector {detector!r} is not in the table")


def outcome_program(
    circuit: Circuit, pair: str | PairSource | None, outcome: tuple[str, str], params: Sequence[str]
) -> PathProgram:
    """Compile ``joint_amplitude`` with ``params`` left symbolic.

    Each term is one (branch, photon-1 path, photon-2 path) triple.
    """
    src = _pair_source(circuit, pair)
    d1, d2 = outcome
    terms = []
    for branch in Branch:
        paths1 = enumerate_paths(circuit, src.photon_modes(1)[branch], d1)
        paths2 = enumerate_paths(circuit, src.photon_modes(2)[branch], d2)
        for p1, p2 in itertools.product(paths1, paths2):
            terms.append((src.branch_amplitude, [p1, p2]))
    return compile_terms(circuit, terms, params)


def table_sweep(
    circuit: Circuit,
    pair: str | PairSource | None,
    arm1: Sequence[str],
    arm2: Sequence[str],
    params: Sequence[str],
    theta,
) -> list[ProbabilityTable]:
    """Joint tables for every row of ``theta`` (one column per shifter in ``params``)."""
    src = _pair_source(circuit, pair)
    _check_arms(circuit, src, arm1, arm2)
    theta = np.atleast_2d(np.asarray(theta, dtype=np.float64))
    probs = {}
    for d1 in arm1:
        for d2 in arm2:
            amps = outcome_program(circuit, src, (d1, d2), params).evaluate(theta)
            probs[(d1, d2)] = np.abs(amps) ** 2
    return [
        ProbabilityTable.from_joint(arm1, arm2, {k: v[s] for k, v in probs.items()}) for s in range(theta.shape[0])
    ]
