"""Command-line front end.

Exit codes: 0 success, 1 invalid circuit, 2 I/O failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import Circuit, PhaseShifter
from .dsl import DSLError, PhaseExprError, evaluate_phase, parse, serialize
from .entanglement import (
    JointOutcome,
    ProbabilityTable,
    arm_detectors,
    joint_distribution,
    joint_probability_table,
    table_sweep,
)
from .interference import detector_probabilities, fringe_sweep
from .montecarlo import coincidence_counts, events_to_csv, sample_events, singles_counts
from .scenarios import (
    JAEGER_ARMS,
    PhaseImage,
    build_jaeger,
    build_lemos,
    build_mzi,
    format_grid,
    lemos_image,
    lemos_signal_probabilities,
    read_phase_image,
)

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_USAGE = 0, 1, 2, 64
JOINT_HEADER = "phi1,phi2,p_u1u2,p_u1l2,p_l1u2,p_l1l2,p_u1,p_l1,p_u2,p_l2"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunReport:
    circuit_digest: str
    computation: str
    results: dict
    tool_version: str = __version__
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {
            "schema": 1,
            "tool": "photonpaths",
            "tool_version": self.tool_version,
            "circuit_digest": self.circuit_digest,
            "computation": self.computation,
            **self.extra,
            "results": self.results,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def circuit_digest(circuit: Circuit) -> str:
    return "sha256:" + hashlib.sha256(serialize(circuit).encode("utf-8")).hexdigest()


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def phase_arg(text: str) -> float:
    try:
        return evaluate_phase(text)
    except PhaseExprError as exc:
        raise argparse.ArgumentTypeError(f"bad phase expression {text!r}: {exc}") from None


def parse_phase_setting(text: str) -> tuple[str, float | list[float]]:
    """``NAME=EXPR`` (fixed) or ``NAME=START:END:STEPS`` (range, END excluded)."""
    name, sep, spec = text.partition("=")
    if not sep or not name:
        raise UsageError(f"--phase expects NAME=VALUE or NAME=START:END:STEPS, got {text!r}")
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return name, evaluate_phase(parts[0])
        if len(parts) != 3:
            raise UsageError(f"range must be START:END:STEPS, got {spec!r}")
        start, end = evaluate_phase(parts[0]), evaluate_phase(parts[1])
        steps = int(parts[2])
    except (PhaseExprError, ValueError) as exc:
        raise UsageError(f"bad --phase {text!r}: {exc}") from None
    if steps < 1:
        raise UsageError(f"STEPS must be at least 1, got {steps}")
    return name, [start + k * (end - start) / steps for k in range(steps)]


def load_circuit(path: str) -> Circuit:
    """Read and parse; I/O errors propagate as ``OSError``, bad text as ``DSLError``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse(text)


def report_dsl_error(path: str, exc: DSLError) -> None:
    for e in exc.errors:
        print(f"{path}:{e.span.line}:{e.span.column}: {e.kind.value}: {e.message}", file=sys.stderr)


def shifter_arm(circuit: Circuit, shifter: str) -> int:
    pair = circuit.pair_sources[0]
    element = circuit.element(shifter)
    reach1 = circuit.reachable_modes(pair.photon_modes(1).values())
    return 1 if element.input in reach1 else 2


def resolve_arms(circuit: Circuit, joint: str | None) -> tuple[list[str], list[str]]:
    """Arm detector lists from ``--joint`` (``D1,D2`` or ``U1,L1,U2,L2``)."""
    if not circuit.pair_sources:
        raise UsageError("--joint needs a circuit with a pair source")
    reach1, reach2 = arm_detectors(circuit)
    if joint is None:
        return reach1, reach2
    names = [n.strip() for n in joint.split(",")]
    if len(names) == 4:
        return names[:2], names[2:]
    if len(names) != 2:
        raise UsageError("--joint takes D1,D2 or U1,L1,U2,L2")
    d1, d2 = names
    if d1 not in reach1 or d2 not in reach2 or len(reach1) != 2 or len(reach2) != 2:
        raise UsageError(f"cannot complete arms from --joint {joint}: arm 1 {reach1}, arm 2 {reach2}")
    return [d1] + [d for d in reach1 if d != d1], [d2] + [d for d in reach2 if d != d2]


def check_shifters(circuit: Circuit, names) -> None:
    for name in names:
        try:
            element = circuit.element(name)
        except KeyError:
            element = None
        if not isinstance(element, PhaseShifter):
            raise UsageError(f"no phase shifter named {name!r}")


def table_row(table: ProbabilityTable) -> list[float]:
    (u1, l1), (u2, l2) = table.arm1, table.arm2
    j = table.joint
    return [
        j[JointOutcome(u1, u2)], j[JointOutcome(u1, l2)], j[JointOutcome(l1, u2)], j[JointOutcome(l1, l2)],
        table.marginals[u1], table.marginals[l1], table.marginals[u2], table.marginals[l2],
    ]


def table_json(table: ProbabilityTable) -> dict:
    return {
        "joint": {f"{o.detector_1},{o.detector_2}": table.joint[o] for o in table.outcomes},
        "marginals": dict(table.marginals),
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        load_circuit(args.file)
    except DSLError as exc:
        report_dsl_error(args.file, exc)
        return EXIT_INVALID
    print("OK")
    return EXIT_OK


def cmd_sweep(args) -> int:
    circuit = load_circuit(args.file)
    settings = [parse_phase_setting(p) for p in args.phase]
    ranges = [(n, v) for n, v in settings if isinstance(v, list)]
    if len(ranges) != 1:
        raise UsageError("sweep needs exactly one --phase NAME=START:END:STEPS range")
    check_shifters(circuit, [n for n, _ in settings])
    for name, value in settings:
        if not isinstance(value, list):
            circuit = circuit.with_phase(name, value)
    sweep_name, values = ranges[0]

    if args.detector is not None:
        if args.detector not in {d.id for d in circuit.detectors}:
            raise UsageError(f"no detector named {args.detector!r}")
        if not circuit.single_sources:
            raise UsageError("--detector sweeps need a single-photon source")
        rows = fringe_sweep(circuit, sweep_name, values, args.detector)
        lines = ["phi,p"] + [f"{fmt(phi)},{fmt(p)}" for phi, p in rows]
    else:
        arm1, arm2 = resolve_arms(circuit, args.joint)
        if len(arm1) != 2 or len(arm2) != 2:
            raise UsageError("joint sweeps need two detectors per arm")
        by_arm: dict[int, str] = {}
        for name, _ in settings:
            by_arm.setdefault(shifter_arm(circuit, name), name)
        for arm in (1, 2):
            if arm not in by_arm:
                candidates = [
                    e.id for e in circuit.elements
                    if isinstance(e, PhaseShifter) and shifter_arm(circuit, e.id) == arm
                ]
                if len(candidates) == 1:
                    by_arm[arm] = candidates[0]
        params = sorted(set(by_arm.values()) | {sweep_name})
        theta = np.array([[circuit.element(p).value for p in params] for _ in values], dtype=np.float64)
        theta[:, params.index(sweep_name)] = values
        try:
            tables = table_sweep(circuit, None, arm1, arm2, params, theta)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        lines = [JOINT_HEADER]
        for row, table in zip(theta, tables):
            phis = [row[params.index(by_arm[a])] if a in by_arm else 0.0 for a in (1, 2)]
            lines.append(",".join(fmt(x) for x in phis + table_row(table)))
    write_atomic(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_sample(args) -> int:
    circuit = load_circuit(args.file)
    if not circuit.pair_sources:
        raise UsageError("sample needs a circuit with a pair source")
    if args.n < 0:
        raise UsageError("-n must be non-negative")
    settings = [parse_phase_setting(p) for p in args.phase]
    check_shifters(circuit, [n for n, _ in settings])
    for name, value in settings:
        if isinstance(value, list):
            raise UsageError("sample takes fixed phases only (NAME=VALUE)")
        circuit = circuit.with_phase(name, value)
    arm1, arm2 = resolve_arms(circuit, args.joint)
    try:
        if len(arm1) == 2 and len(arm2) == 2:
            table = joint_probability_table(circuit, None, arm1, arm2)
        else:
            table = joint_distribution(circuit)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    events = sample_events(table, args.n, args.seed)
    coinc = coincidence_counts(events)
    singles = singles_counts(events)
    n = args.n

    def entry(count: int, target: float) -> dict:
        freq = count / n if n else 0.0
        sigma = (target * (1 - target) / n) ** 0.5 if n else 0.0
        return {"count": count, "frequency": freq, "target": target, "sigma": sigma}

    results = {
        "joint": {
            f"{o.detector_1},{o.detector_2}": entry(coinc.counts.get(o, 0), table.joint[o]) for o in table.outcomes
        },
        "singles": {d: entry(singles.counts.get(d, 0), table.marginals[d]) for d in (*table.arm1, *table.arm2)},
        "totals": {"trials": coinc.total, "records": singles.total},
    }
    report = RunReport(
        circuit_digest(circuit),
        "sample",
        results,
        extra={"n": n, "seed": args.seed, "phases": {k: v for k, v in settings}},
    )
    write_atomic(args.out, events_to_csv(events))
    summary = args.summary or str(Path(args.out).with_suffix(".json"))
    write_atomic(summary, report.to_json())
    return EXIT_OK


def cmd_scenario(args) -> int:
    out = Path(args.out)
    name = args.name
    extra_files: dict[str, str] = {}
    if name == "mzi":
        circuit = build_mzi(args.phi)
        results = {"phi": args.phi, "probabilities": detector_probabilities(circuit)}
    elif name == "jaeger":
        circuit = build_jaeger(args.phi1, args.phi2)
        table = joint_probability_table(circuit, None, *JAEGER_ARMS)
        results = {"phi1": args.phi1, "phi2": args.phi2, **table_json(table)}
    else:
        circuit = build_lemos(args.object_phase, args.distinguishable)
        g, h = lemos_signal_probabilities(circuit)
        results = {
            "object_phase": args.object_phase,
            "distinguishable": args.distinguishable,
            "signal": {"g": g, "h": h},
        }
        if args.image:
            image = read_phase_image(args.image)
            pair = lemos_image(image, args.distinguishable)
            extra_files["lemos_g.csv"] = format_grid(pair.g)
            extra_files["lemos_h.csv"] = format_grid(pair.h)
            results["image"] = {"width": image.width, "height": image.height}
    report = RunReport(circuit_digest(circuit), f"scenario:{name}", results)
    write_atomic(out / f"{name}.pic", serialize(circuit))
    write_atomic(out / f"{name}.json", report.to_json())
    for fname, text in extra_files.items():
        write_atomic(out / fname, text)
    sys.stdout.write(report.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photonpaths", description="Path-sum interferometer simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a .pic circuit file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="tabulate probabilities over a phase range")
    p.add_argument("file")
    p.add_argument("--phase", action="append", default=[], metavar="NAME=START:END:STEPS|NAME=VALUE")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--detector", metavar="D")
    target.add_argument("--joint", metavar="D1,D2")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sample", help="sample detection events from a pair circuit")
    p.add_argument("file")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phase", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--joint", metavar="D1,D2")
    p.add_argument("--out", required=True, help="event CSV path")
    p.add_argument("--summary", help="summary JSON path (default: --out with .json suffix)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("scenario", help="emit a built-in scenario circuit and its results")
    p.add_argument("name", choices=["mzi", "jaeger", "lemos"])
    p.add_argument("--phi", type=phase_arg, default=0.0)
    p.add_argument("--phi1", type=phase_arg, default=0.0)
    p.add_argument("--phi2", type=phase_arg, default=0.0)
    p.add_argument("--object-phase", type=phase_arg, default=0.0)
    p.add_argument("--distinguishable", action="store_true")
    p.add_argument("--image", help="CSV grid of object phases (lemos only)")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "image", None) and args.name != "lemos":
        parser.error("--image is only valid for the lemos scenario")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"photonpaths: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DSLError as exc:
        report_dsl_error(args.file, exc)
        return EXIT_INVALID
    except OSError as exc:
        print(f"photonpaths: {exc}", file=sys.stderr)
        return EXIT_IO
