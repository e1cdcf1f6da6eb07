"""Acceptance criteria 1-9.

Run under pytest (one PASS/FAIL line per criterion appears in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import functools
import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from photonpaths.circuit import propagation_phase, validate
from photonpaths.corpus import random_pair_circuit, random_single_photon_circuit
from photonpaths.dsl import DSLError, parse, serialize
from photonpaths.entanglement import JointOutcome, joint_amplitude, joint_distribution, joint_probability_table
from photonpaths.interference import detector_probabilities, first_order_amplitude
from photonpaths.montecarlo import coincidence_counts, sample_events, singles_counts
from photonpaths.oracle import single_photon_oracle, two_photon_oracle
from photonpaths.scenarios import (
    JAEGER_ARMS,
    MZI_BRIGHT,
    PhaseImage,
    build_jaeger,
    build_lemos,
    build_mzi,
    lemos_image,
    lemos_signal_probabilities,
)

TOL = 1e-12
GRID = [2 * math.pi * k / 16 for k in range(16)]
SIGNS = {("U1", "U2"): -1, ("U1", "L2"): +1, ("L1", "U2"): +1, ("L1", "L2"): -1}
MALFORMED = Path(__file__).parent / "data" / "malformed"


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def jaeger_grid():
    return {
        (a, b): joint_probability_table(build_jaeger(a, b), None, *JAEGER_ARMS) for a in GRID for b in GRID
    }


@functools.lru_cache(maxsize=None)
def corpora():
    rng = random.Random(7)
    singles = [random_single_photon_circuit(rng, max_modes=8) for _ in range(100)]
    pairs = [random_pair_circuit(rng, max_modes=8) for _ in range(100)]
    return singles, pairs


def criterion_1():
    phis = np.linspace(0, 2 * math.pi, 64, endpoint=False)

    def run():
        return max(abs(detector_probabilities(build_mzi(p))[MZI_BRIGHT] - 0.5 * (1 + math.cos(p))) for p in phis)

    err, dt = timed(run)
    return err <= TOL and dt < 1.0, f"max error {err:.2e} over 64 phases, {dt:.3f} s (< 1 s)"


def criterion_2():
    def run():
        worst = 0.0
        for (a, b), t in jaeger_grid().items():
            for (d1, d2), sign in SIGNS.items():
                expected = 0.25 * (1 + sign * math.cos(a + b))
                worst = max(worst, abs(t.joint[JointOutcome(d1, d2)] - expected))
        return worst

    jaeger_grid.cache_clear()
    err, dt = timed(run)
    return err <= TOL and dt < 5.0, f"max error {err:.2e} on 16x16 grid, {dt:.3f} s (< 5 s)"


def criterion_3():
    err = max(abs(v - 0.5) for t in jaeger_grid().values() for v in t.marginals.values())
    return err <= TOL, f"max marginal deviation {err:.2e} over {len(jaeger_grid())} tables"


def criterion_4():
    singles, pairs = corpora()
    assert all(validate(c) == [] for c in singles + pairs)
    e1 = max(abs(sum(detector_probabilities(c).values()) - 1) for c in singles)
    e2 = max(abs(joint_distribution(c).total() - 1) for c in pairs)
    ok = e1 <= TOL and e2 <= TOL
    return ok, f"single-source sum error {e1:.2e} ({len(singles)} circuits), joint sum error {e2:.2e} ({len(pairs)})"


def criterion_5():
    singles, pairs = corpora()
    e1 = max(
        abs(first_order_amplitude(c, "S", d.id) - single_photon_oracle(c, "S", d.id))
        for c in singles
        for d in c.detectors
    )
    e2 = 0.0
    for c in pairs:
        t = joint_distribution(c)
        e2 = max(e2, max(abs(t.joint[o] - two_photon_oracle(c, "S", o)) for o in t.outcomes))
    return e1 <= TOL and e2 <= TOL, f"amplitude diff {e1:.2e}, joint table diff {e2:.2e}"


def criterion_6():
    identical = True
    moved = True
    worst = 0.0
    extra = propagation_phase(9.4607e24, 810.0)  # one light year at 810 nm
    for a in GRID[::2]:
        for b in GRID[::2]:
            c = build_jaeger(a, b)
            for d1 in JAEGER_ARMS[0]:
                for d2 in JAEGER_ARMS[1]:
                    fwd = joint_amplitude(c, None, (d1, d2), "forward")
                    rev = joint_amplitude(c, None, (d1, d2), "reverse")
                    identical &= fwd == rev
            far = c.with_segment("a2", extra).with_segment("b2", extra)
            moved &= max(abs(joint_amplitude(far, None, o) - joint_amplitude(c, None, o)) for o in SIGNS) > 1e-3
            t1 = joint_probability_table(c, None, *JAEGER_ARMS)
            t2 = joint_probability_table(far, None, *JAEGER_ARMS)
            worst = max(worst, max(abs(t1.joint[o] - t2.joint[o]) for o in t1.outcomes))
    ok = identical and moved and worst <= TOL
    return ok, f"partner order bit-identical: {identical}, light-year shift {extra:.3f} rad moves tables {worst:.2e}"


def criterion_7():
    g0, h0 = lemos_signal_probabilities(build_lemos(0.0))
    g1, h1 = lemos_signal_probabilities(build_lemos(math.pi))
    flip = max(abs(g0 - 1), abs(h0), abs(g1), abs(h1 - 1))
    yy, xx = np.mgrid[0:24, 0:24]
    mask = (xx - 11.5) ** 2 + (yy - 12.5) ** 2 < 64
    image = PhaseImage(np.where(mask, math.pi, 0.0))
    pair = lemos_image(image)
    complement = max(
        float(np.max(np.abs(pair.g + pair.h - 1))),
        float(np.max(np.abs(pair.g - (~mask)))),
        float(np.max(np.abs(pair.h - mask))),
    )
    flat = lemos_image(image, distinguishable=True)
    flat_err = max(float(np.max(np.abs(flat.g - 0.5))), float(np.max(np.abs(flat.h - 0.5))))
    ok = flip <= TOL and complement <= TOL and flat_err <= TOL
    return ok, f"flip error {flip:.2e}, 24x24 complement error {complement:.2e}, distinguishable {flat_err:.2e}"


def criterion_8():
    n, seeds = 100_000, 100
    phases = [2 * math.pi * k / 8 for k in range(8)]
    tables = [joint_probability_table(build_jaeger(p, 0.0), None, *JAEGER_ARMS) for p in phases]

    def seed_passes(seed):
        for k, table in enumerate(tables):
            events = sample_events(table, n, seed * 8 + k)
            joint, singles = coincidence_counts(events), singles_counts(events)
            for o in table.outcomes:
                p = table.joint[o]
                if abs(joint[o] / n - p) > 5 * math.sqrt(p * (1 - p) / n) + 1e-12:
                    return False
            for d in (*table.arm1, *table.arm2):
                if abs(singles[d] / n - 0.5) > 5 * math.sqrt(0.25 / n):
                    return False
        return True

    passed, dt = timed(lambda: sum(seed_passes(s) for s in range(seeds)))
    return passed >= 99 and dt < 30.0, f"{passed}/{seeds} seeds pass, n={n}, 8-phase sweep, {dt:.2f} s (< 30 s)"


def criterion_9():
    scenarios = [build_mzi(0.0), build_mzi(1.0), build_jaeger(0.3, 0.4), build_lemos(0.0), build_lemos(2.0, True)]
    round_trip = all(parse(serialize(c)) == c for c in scenarios)
    files = sorted(MALFORMED.glob("*.pic"))
    positioned = 0
    for f in files:
        try:
            parse(f.read_text())
        except DSLError as exc:
            positioned += bool(exc.errors) and all(e.span.line >= 1 and e.span.column >= 1 for e in exc.errors)
    ok = round_trip and len(files) >= 10 and positioned == len(files)
    return ok, f"round trip on {len(scenarios)} scenario circuits: {round_trip}; {positioned}/{len(files)} malformed files"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 10)}


def run_criterion(k: int) -> tuple[bool, str]:
    ok, detail = CRITERIA[k]()
    return ok, f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    from conftest import ACCEPTANCE_LINES

    ok, line = run_criterion(k)
    ACCEPTANCE_LINES[k] = line
    print(line)
    assert ok, line


if __name__ == "__main__":
    failures = 0
    for k in sorted(CRITERIA):
        ok, line = run_criterion(k)
        print(line, flush=True)
        failures += not ok
    sys.exit(1 if failures else 0)
