"""Path enumeration and kernel composition.

A path is an ordered walk from an emission mode to a detector.  Its kernel is
the product of every hop's transfer amplitude and every traversed segment's
propagation factor; kernels of paths joined end to end multiply.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .circuit import (
    Branch,
    Circuit,
    PairSource,
    PhaseShifter,
    SinglePhoton,
    reduce_phase,
)


@dataclass(frozen=True)
class Hop:
    ref: str
    in_port: str
    out_port: str


@dataclass(frozen=True)
class Path:
    """A mode-following route.

    ``terminal`` is the detector id for complete paths.  A path with no
    terminal is open-ended: it stops at the entrance of its last mode, so that
    mode's segment is not part of its kernel.  This makes ``split`` exact.
    """

    start: str
    hops: tuple[Hop, ...] = ()
    terminal: str | None = None
    branch: Branch | None = None

    @property
    def modes(self) -> tuple[str, ...]:
        return (self.start,) + tuple(h.out_port for h in self.hops)

    def split(self, k: int) -> tuple[Path, Path]:
        """Cut the path at the entrance of its ``k``-th mode."""
        if not 0 <= k <= len(self.hops):
            raise IndexError(f"split point {k} outside 0..{len(self.hops)}")
        head = Path(self.start, self.hops[:k], None, self.branch)
        tail = Path(self.modes[k], self.hops[k:], self.terminal, None)
        return head, tail


@dataclass(frozen=True)
class Kernel:
    amplitude: complex = 1 + 0j

    @property
    def magnitude(self) -> float:
        return abs(self.amplitude)

    @property
    def phase(self) -> float:
        return reduce_phase(cmath.phase(self.amplitude))

    def __mul__(self, other: Kernel) -> Kernel:
        return compose(self, other)


def compose(k1: Kernel, k2: Kernel) -> Kernel:
    """Kernel of two paths traversed in succession: amplitudes multiply."""
    return Kernel(k1.amplitude * k2.amplitude)


def _resolve_origin(circuit: Circuit, origin: str, photon: int | None) -> list[tuple[str, Branch | None]]:
    try:
        source = circuit.source(origin)
    except KeyError:
        source = None
    if isinstance(source, SinglePhoton):
        return [(source.output, None)]
    if isinstance(source, PairSource):
        if photon is None:
            raise ValueError(f"pair source {origin!r} needs photon=1 or photon=2")
        return [(mode, branch) for branch, mode in source.photon_modes(photon).items()]
    if origin not in circuit.producers and origin not in circuit.consumers:
        raise KeyError(f"{origin!r} is neither a source nor a mode")
    for pair in circuit.pair_sources:
        for branch in Branch:
            if origin in pair.branch_modes(branch):
                return [(origin, branch)]
    return [(origin, None)]


def enumerate_paths(circuit: Circuit, origin: str, detector: str, photon: int | None = None) -> list[Path]:
    """Every route from ``origin`` to ``detector``, sorted by hop sequence.

    ``origin`` is a source id or a mode id.  A pair source yields the routes
    of the chosen ``photon`` from both emission branches.
    """
    target = circuit.detector(detector).mode
    found: list[Path] = []
    for start, branch in _resolve_origin(circuit, origin, photon):
        stack: list[tuple[str, tuple[Hop, ...], frozenset[str]]] = [(start, (), frozenset([start]))]
        while stack:
            mode, hops, visited = stack.pop()
            if mode == target:
                found.append(Path(start, hops, detector, branch))
                continue
            for conn in circuit.outgoing.get(mode, ()):
                if conn.out_mode in visited:
                    continue
                hop = Hop(conn.ref, conn.in_mode, conn.out_mode)
                stack.append((conn.out_mode, hops + (hop,), visited | {conn.out_mode}))
    found.sort(key=lambda p: ([(h.ref, h.in_port, h.out_port) for h in p.hops], p.branch is Branch.BOTTOM))
    return found


def _hop_transfer(circuit: Circuit, hop: Hop) -> complex:
    try:
        node = circuit.element(hop.ref)
    except KeyError:
        node = circuit.source(hop.ref)
        if not isinstance(node, PairSource) or node.passthrough != (hop.in_port, hop.out_port):
            raise ValueError(f"{hop} is not a passthrough of {hop.ref!r}") from None
        return 1 + 0j
    return node.transfer(hop.in_port, hop.out_port)


def _segment_factor(circuit: Circuit, mode: str) -> complex:
    seg = circuit.segment(mode)
    return 1 + 0j if seg is None else seg.factor


def path_factors(circuit: Circuit, path: Path) -> list[complex]:
    """Ordered factor list ``[seg(m0), t(h1), seg(m1), ..., seg(mN)]`` of a path."""
    factors = [_segment_factor(circuit, path.start)]
    current = path.start
    for hop in path.hops:
        if hop.in_port != current:
            raise ValueError(f"disconnected path: hop {hop} does not start at {current!r}")
        factors.append(_hop_transfer(circuit, hop))
        factors.append(_segment_factor(circuit, hop.out_port))
        current = hop.out_port
    if path.terminal is None:
        factors.pop()
    elif circuit.detector(path.terminal).mode != current:
        raise ValueError(f"path ends on {current!r}, not on detector {path.terminal!r}")
    return factors


def path_kernel(circuit: Circuit, path: Path) -> Kernel:
    """Product of all hop and segment factors along ``path``.

    A pair source's branch amplitude is not included.
    """
    amplitude = 1 + 0j
    for f in path_factors(circuit, path):
        amplitude *= f
    return Kernel(amplitude)


# ---------------------------------------------------------------------------
# Compiled path sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathProgram:
    """A sum of path terms with some phase shifters left symbolic.

    Each term is ``coeffs[t] * exp(i * sum of its parameter phases)``.
    Evaluating the program for many parameter settings runs in the kernel
    backend instead of re-walking the circuit.
    """

    params: tuple[str, ...]
    coeffs: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray

    def evaluate(self, theta) -> np.ndarray:
        """Amplitude for each row of ``theta`` (shape ``(settings, len(params))``)."""
        theta = np.atleast_2d(np.asarray(theta, dtype=np.float64))
        if theta.shape[1] != len(self.params):
            raise ValueError(f"expected {len(self.params)} parameter columns, got {theta.shape[1]}")
        if len(self.coeffs) == 0:
            return np.zeros(theta.shape[0], dtype=np.complex128)
        return _kernels.path_sum(self.coeffs, self.indptr, self.indices, theta)


def _symbolic_factors(circuit: Circuit, path: Path, params: Sequence[str]) -> tuple[complex, list[int]]:
    """Constant part of a path kernel plus indices of its symbolic shifters."""
    if path.terminal is None:
        raise ValueError("only complete paths can be compiled")
    coeff = _segment_factor(circuit, path.start)
    slots: list[int] = []
    for hop in path.hops:
        if hop.ref in params and isinstance(circuit.element(hop.ref), PhaseShifter):
            slots.append(params.index(hop.ref))
        else:
            coeff *= _hop_transfer(circuit, hop)
        coeff *= _segment_factor(circuit, hop.out_port)
    return coeff, slots


def compile_terms(
    circuit: Circuit, terms: Iterable[tuple[complex, Sequence[Path]]], params: Sequence[str]
) -> PathProgram:
    """Build a program from terms ``(weight, paths)``; each term is weight x product of kernels."""
    params = tuple(params)
    for p in params:
        if not isinstance(circuit.element(p), PhaseShifter):
            raise KeyError(f"{p!r} is not a phase shifter")
    coeffs: list[complex] = []
    indptr = [0]
    indices: list[int] = []
    for weight, paths in terms:
        coeff = complex(weight)
        for path in paths:
            c, slots = _symbolic_factors(circuit, path, params)
            coeff *= c
            indices.extend(slots)
        coeffs.append(coeff)
        indptr.append(len(indices))
    return PathProgram(
        params,
        np.asarray(coeffs, dtype=np.complex128),
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
    )
