"""Sampled detection events and the coincidence protocol.

Each trial draws one joint outcome from a probability table and records one
event per arm.  Pairing events by trial id recovers the joint statistics;
counting each detector on its own gives the flat singles.

Sampling uses ``numpy.random.default_rng(seed)`` (PCG64): one uniform draw
per trial, mapped through the cumulative joint distribution in table order.
"""

from __future__ import annotations

import csv
import enum
import io
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from . import _kernels
from .entanglement import JointOutcome, ProbabilityTable

EVENT_HEADER = ("trial_id", "arm", "detector")


class Arm(enum.IntEnum):
    ARM1 = 1
    ARM2 = 2


@dataclass(frozen=True)
class EventRecord:
    trial_id: int
    arm: Arm
    detector: str


class UnpairedTrialError(ValueError):
    def __init__(self, trial_id: int):
        super().__init__(f"trial {trial_id} does not have exactly one event per arm")
        self.trial_id = trial_id


class EventLog(Sequence):
    """Array-backed, read-only sequence of ``EventRecord``.

    ``detectors`` maps the integer codes to detector ids.  When ``n_arm1``
    is given, codes below it belong to arm 1 and the rest to arm 2, so
    detectors that never fired still appear in the counts.
    """

    def __init__(self, trial_ids, arms, codes, detectors: Sequence[str], n_arm1: int | None = None):
        self.trial_ids = np.asarray(trial_ids, dtype=np.int64)
        self.arms = np.asarray(arms, dtype=np.int64)
        self.codes = np.asarray(codes, dtype=np.int64)
        self.detectors = tuple(detectors)
        self.n_arm1 = n_arm1

    def arm_codes(self) -> tuple[list[int], list[int]]:
        if self.n_arm1 is not None:
            return list(range(self.n_arm1)), list(range(self.n_arm1, len(self.detectors)))
        return (
            sorted(set(self.codes[self.arms == 1].tolist())),
            sorted(set(self.codes[self.arms == 2].tolist())),
        )

    def __len__(self) -> int:
        return int(self.trial_ids.shape[0])

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return EventRecord(int(self.trial_ids[i]), Arm(int(self.arms[i])), self.detectors[self.codes[i]])

    def __eq__(self, other) -> bool:
        if isinstance(other, EventLog):
            return (
                np.array_equal(self.trial_ids, other.trial_ids)
                and np.array_equal(self.arms, other.arms)
                and [self.detectors[c] for c in self.codes] == [other.detectors[c] for c in other.codes]
            )
        if isinstance(other, Sequence):
            return list(self) == list(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"EventLog({len(self)} events, detectors={self.detectors})"


Events = Union[EventLog, Iterable[EventRecord]]


@dataclass(frozen=True)
class CountTable:
    """Counts per key; ``total`` is their sum."""

    counts: dict
    total: int

    def __getitem__(self, key) -> int:
        return self.counts[key]

    def frequency(self, key) -> float:
        return self.counts[key] / self.total if self.total else 0.0


def sample_events(table: ProbabilityTable, n: int, seed: int) -> EventLog:
    """Draw ``n`` trials from the joint distribution; ``2 n`` records."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    outcomes = table.outcomes
    detectors = tuple(table.arm1) + tuple(table.arm2)
    probs = np.array([table.joint[o] for o in outcomes], dtype=np.float64)
    if np.any(probs < 0) or probs.sum() <= 0:
        raise ValueError("table has no valid joint distribution")
    cdf = np.cumsum(probs / probs.sum())
    cdf[-1] = 1.0
    rng = np.random.default_rng(seed)
    picks = _kernels.sample_outcomes(cdf, rng.random(n))
    n2 = len(table.arm2)
    code1 = picks // n2
    code2 = len(table.arm1) + picks % n2
    trial_ids = np.repeat(np.arange(n, dtype=np.int64), 2)
    arms = np.tile(np.array([1, 2], dtype=np.int64), n)
    codes = np.empty(2 * n, dtype=np.int64)
    codes[0::2] = code1
    codes[1::2] = code2
    return EventLog(trial_ids, arms, codes, detectors, n_arm1=len(table.arm1))


def _as_log(events: Events) -> EventLog:
    if isinstance(events, EventLog):
        return events
    records = list(events)
    names: dict[str, int] = {}
    codes = [names.setdefault(r.detector, len(names)) for r in records]
    return EventLog(
        [r.trial_id for r in records],
        [int(r.arm) for r in records],
        codes,
        list(names),
    )


def _tally(events: Events):
    log = _as_log(events)
    trials, arms, codes = log.trial_ids, log.arms, log.codes
    if len(trials) > 1 and np.any(np.diff(trials) < 0):
        order = np.argsort(trials, kind="stable")
        trials, arms, codes = trials[order], arms[order], codes[order]
    joint, singles, bad_trial, bad = _kernels.tally_pairs(trials, arms - 1, codes, len(log.detectors))
    if bad:
        raise UnpairedTrialError(bad_trial)
    return log, joint, singles


def coincidence_counts(events: Events) -> CountTable:
    """Joint counts keyed by ``JointOutcome``, matching records on trial id."""
    log, joint, _ = _tally(events)
    if len(log) == 0:
        return CountTable({}, 0)
    arm1, arm2 = log.arm_codes()
    counts = {JointOutcome(log.detectors[i], log.detectors[j]): int(joint[i, j]) for i in arm1 for j in arm2}
    return CountTable(counts, len(log) // 2)


def singles_counts(events: Events) -> CountTable:
    """Per-detector counts ignoring partners; ``total`` is the number of records."""
    log, _, singles = _tally(events)
    if len(log) == 0:
        return CountTable({}, 0)
    arm1, arm2 = log.arm_codes()
    counts = {log.detectors[i]: int(singles[i]) for i in (*arm1, *arm2)}
    return CountTable(counts, len(log))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def events_to_csv(events: Events) -> str:
    """CSV text with header ``trial_id,arm,detector`` and LF line endings."""
    log = _as_log(events)
    buf = io.StringIO()
    buf.write(",".join(EVENT_HEADER) + "\n")
    names = log.detectors
    for t, a, c in zip(log.trial_ids.tolist(), log.arms.tolist(), log.codes.tolist()):
        buf.write(f"{t},{a},{names[c]}\n")
    return buf.getvalue()


def events_from_csv(text: str) -> list[EventRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != EVENT_HEADER:
        raise ValueError(f"expected header {','.join(EVENT_HEADER)!r}")
    return [EventRecord(int(t), Arm(int(a)), d.strip()) for t, a, d in reader]
