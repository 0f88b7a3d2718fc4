"""Command-line front end: build circuits, verify them, run cost estimates,
and inspect circuit files.

Exit codes are uniform across subcommands: 0 success, 1 verification or
parse failure, 2 usage errors (bad flags, missing files, invalid builder
parameters, malformed JSON).  Every machine-readable output is canonical
JSON (sorted keys, two-space indent, trailing newline); CSV is used only
for plottable curves.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import builders, costmodel
from .circuit import (
    Circuit,
    CircuitError,
    ParseError,
    parse,
    serialize,
    static_resources,
)
from .curve import CURVE_REGISTRY_ENV, CurvePoint, INFINITY, named_curve, registry_names
from .harness import (
    HarnessError,
    VerificationSpec,
    verify,
    verify_exhaustive,
)

_USAGE_ERROR = 2
_FAILURE = 1


class _UsageError(Exception):
    pass


def _write_json(path: str | None, data: dict) -> None:
    text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_file(path: str, what: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _UsageError(f"cannot read {what} {path!r}: {exc.strerror}") from exc


def _read_json(path: str, what: str) -> dict:
    raw = _read_file(path, what)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{what} {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise _UsageError(f"{what} {path!r} must hold a JSON object")
    return data


def _parse_point(curve_name: str, text: str) -> CurvePoint:
    curve = named_curve(curve_name)
    if text == "G":
        return curve.generator
    if text == "inf":
        return INFINITY
    try:
        xs, ys = text.split(",")
        return CurvePoint(int(xs), int(ys))
    except ValueError:
        raise _UsageError(
            f"point must be 'G', 'inf', or 'x,y' integers, got {text!r}"
        ) from None


# ---------------------------------------------------------------------------
# build


def _cmd_build(args: argparse.Namespace) -> int:
    try:
        if args.builder == "temp-and":
            report = builders.build_temp_and()
        elif args.builder == "adder":
            _require(args, "width")
            report = builders.build_adder(args.width)
        elif args.builder == "mod-add":
            _require(args, "width", "constant", "modulus")
            report = builders.build_mod_add_const(args.width, args.constant, args.modulus)
        elif args.builder == "lookup":
            _require(args, "table")
            table = _parse_table(args.table)
            report = builders.build_lookup(table, entry_bits=args.entry_bits)
        elif args.builder == "pointadd":
            _require(args, "curve", "point")
            curve = named_curve(args.curve)
            base = _parse_point(args.curve, args.point)
            report = builders.build_pointadd_permutation(curve, base)
        elif args.builder == "windowed-pointadd":
            _require(args, "curve", "point", "window")
            curve = named_curve(args.curve)
            base = _parse_point(args.curve, args.point)
            report = builders.build_windowed_pointadd(curve, base, args.window)
        else:  # argparse choices make this unreachable
            raise _UsageError(f"unknown builder {args.builder!r}")
    except (CircuitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR

    out = Path(args.output)
    out.write_bytes(serialize(report.circuit))
    _write_json(str(out) + ".json", report.sidecar_dict())
    for line, value in report.predicted.as_dict().items():
        print(f"{_LABELS[line]}: {value}")
    return 0


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise _UsageError(f"builder {args.builder!r} requires {flags}")


def _parse_table(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise _UsageError(f"table must be comma-separated integers, got {text!r}") from None


_LABELS = {
    "qubit_count": "qubits",
    "total_gate_count": "gates",
    "non_clifford_gate_count": "non-Clifford",
    "measurement_count": "measurements",
}


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args: argparse.Namespace) -> int:
    circuit_bytes = _read_file(args.circuit, "circuit file")
    spec_data = _read_json(args.spec, "spec file")
    try:
        spec = VerificationSpec.from_dict(spec_data)
    except (HarnessError, TypeError) as exc:
        raise _UsageError(f"bad spec: {exc}") from exc

    try:
        if args.exhaustive:
            report = verify_exhaustive(circuit_bytes, spec)
        else:
            report = verify(
                circuit_bytes, spec, jobs=args.jobs, fail_fast=args.fail_fast
            )
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _FAILURE
    except HarnessError as exc:
        raise _UsageError(str(exc)) from exc

    if args.output is None:
        sys.stdout.write(report.to_json_bytes().decode("utf-8"))
    else:
        Path(args.output).write_bytes(report.to_json_bytes())
        print(f"verdict: {report.verdict}  (report {args.output})")
    if not report.passed:
        failures = report.data["failures"]
        violations = report.data["bound_violations"]
        detail = []
        if failures:
            shown = report.data["failure_indices"][:5]
            detail.append(f"{failures} failing test(s), first indices {shown}")
        detail.extend(violations)
        print("verification failed: " + "; ".join(detail), file=sys.stderr)
        return _FAILURE
    return 0


# ---------------------------------------------------------------------------
# estimate


_MACHINE_FIELDS = {
    "reaction_time",
    "round_time",
    "toffoli_overhead_fraction",
    "t_state_cost",
    "cultivation_qubits",
    "toffoli_to_t_factor",
}
_SCENARIO_SECTIONS = {
    "ecdlp",
    "machine",
    "attack",
    "wallets",
    "t_rate",
    "success_sweep",
}


def _scenario_machine(data: dict) -> costmodel.MachineProfile:
    unknown = sorted(set(data) - _MACHINE_FIELDS)
    if unknown:
        raise _UsageError(f"unknown machine field(s): {', '.join(unknown)}")
    if "reaction_time" not in data or "round_time" not in data:
        raise _UsageError("machine section needs reaction_time and round_time")
    try:
        return costmodel.MachineProfile(**data)
    except (TypeError, ValueError) as exc:
        raise _UsageError(f"bad machine section: {exc}") from exc


def _cmd_estimate(args: argparse.Namespace) -> int:
    scenario = _read_json(args.scenario, "scenario file")
    unknown = sorted(set(scenario) - _SCENARIO_SECTIONS)
    if unknown:
        raise _UsageError(f"unknown scenario section(s): {', '.join(unknown)}")

    results: dict = {}
    toffoli = None
    machine = None

    if "ecdlp" in scenario:
        section = dict(scenario["ecdlp"])
        optimize = section.pop("optimize_window", False)
        try:
            cost = costmodel.PointAddCost(**section)
        except (TypeError, ValueError) as exc:
            raise _UsageError(f"bad ecdlp section: {exc}") from exc
        if optimize:
            best = costmodel.optimal_window(cost.pa_toffoli, cost.n)
            results["optimal_window"] = best
            cost = costmodel.PointAddCost(cost.pa_toffoli, cost.pa_qubits, cost.n, best)
        toffoli = costmodel.ecdlp_toffoli(cost)
        results["toffoli"] = toffoli
        results["qubits"] = costmodel.ecdlp_qubits(cost)
        results["windowed_additions"] = costmodel.windowed_addition_count(cost.n, cost.w)

    if "machine" in scenario:
        machine = _scenario_machine(scenario["machine"])
        results["t_production_rate"] = costmodel.t_production_rate(machine)
        if toffoli is not None:
            full = costmodel.runtime(toffoli, machine)
            results["runtime_seconds"] = full
            results["primed_seconds"] = costmodel.primed_attack_time(full)
            results["magic_limited_key_seconds"] = costmodel.magic_limited_key_time(
                toffoli, machine
            )

    if "t_rate" in scenario:
        if machine is None:
            raise _UsageError("t_rate needs a machine section for its timing")
        results["t_factory_qubits"] = costmodel.t_factory_qubits(
            scenario["t_rate"], machine
        )

    attack = None
    if "attack" in scenario:
        section = dict(scenario["attack"])
        if "attack_time" not in section:
            if "primed_seconds" not in results:
                raise _UsageError(
                    "attack section needs attack_time (or ecdlp+machine sections "
                    "to derive the primed time)"
                )
            section["attack_time"] = results["primed_seconds"]
        try:
            attack = costmodel.AttackScenario(**section)
        except (TypeError, ValueError) as exc:
            raise _UsageError(f"bad attack section: {exc}") from exc
        results["onspend_success"] = costmodel.onspend_success(attack)
        if attack.machines > 1 and toffoli is not None:
            results["multi_machine_speedup"] = costmodel.multi_machine_speedup(
                attack.machines, results["windowed_additions"]
            )

    salvage_curve = None
    if "wallets" in scenario:
        if attack is None:
            raise _UsageError("wallets need an attack section for the per-key time")
        try:
            wallets = [costmodel.WalletRecord(**w) for w in scenario["wallets"]]
        except (TypeError, ValueError) as exc:
            raise _UsageError(f"bad wallet entry: {exc}") from exc
        salvage_curve = costmodel.salvage_timeline(wallets, attack.attack_time)
        results["salvage"] = {
            "wallets": len(wallets),
            "total_seconds": salvage_curve[-1][0] if salvage_curve else 0.0,
            "total_balance": salvage_curve[-1][1] if salvage_curve else 0.0,
        }

    _write_json(args.output, results)

    if args.salvage_csv is not None:
        if salvage_curve is None:
            raise _UsageError("--salvage-csv needs a wallets section")
        _write_csv(
            args.salvage_csv,
            "time_seconds,cumulative_balance",
            salvage_curve,
        )
    if args.success_csv is not None:
        if attack is None:
            raise _UsageError("--success-csv needs an attack section")
        sweep = scenario.get("success_sweep", {})
        points = _success_sweep(attack, sweep)
        _write_csv(
            args.success_csv,
            "attack_time_seconds,success_probability",
            points,
        )
    return 0


def _success_sweep(attack: costmodel.AttackScenario, sweep: dict) -> list[tuple]:
    unknown = sorted(set(sweep) - {"from", "to", "steps"})
    if unknown:
        raise _UsageError(f"unknown success_sweep field(s): {', '.join(unknown)}")
    lo = float(sweep.get("from", attack.attack_time / 10))
    hi = float(sweep.get("to", attack.mean_block_interval * 3))
    steps = int(sweep.get("steps", 100))
    if not (0 < lo <= hi) or steps < 1:
        raise _UsageError("success_sweep needs 0 < from <= to and steps >= 1")
    points = []
    for i in range(steps + 1):
        t = lo + (hi - lo) * i / steps
        scenario = costmodel.AttackScenario(
            attack_time=t,
            mean_block_interval=attack.mean_block_interval,
            signatures_required=attack.signatures_required,
            machines=attack.machines,
        )
        points.append((t, costmodel.onspend_success(scenario)))
    return points


def _write_csv(path: str, header: str, rows) -> None:
    lines = [header]
    lines.extend(f"{a},{b}" for a, b in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# inspect


def _cmd_inspect(args: argparse.Namespace) -> int:
    raw = _read_file(args.circuit, "circuit file")
    try:
        circuit = parse(raw)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _FAILURE
    resources = static_resources(circuit)
    if args.json:
        data = {
            "resources": resources.as_dict(),
            "classical_bits": circuit.classical_bit_count,
            "inputs": {r.name: [r.lo, r.hi] for r in circuit.inputs},
            "outputs": {r.name: [r.lo, r.hi] for r in circuit.outputs},
            "metadata": dict(circuit.metadata),
        }
        if args.histogram:
            data["histogram"] = _histogram(circuit)
        _write_json(None, data)
        return 0
    for key, value in resources.as_dict().items():
        print(f"{_LABELS[key]}: {value}")
    print(f"classical bits: {circuit.classical_bit_count}")
    for side, regs in (("inputs", circuit.inputs), ("outputs", circuit.outputs)):
        desc = " ".join(f"{r.name}[{r.lo}..{r.hi}]" for r in regs) or "(none)"
        print(f"{side}: {desc}")
    for key in sorted(circuit.metadata):
        print(f"meta {key}: {circuit.metadata[key]}")
    if args.histogram:
        for kind, count in _histogram(circuit).items():
            print(f"{kind}: {count}")
    return 0


def _histogram(circuit: Circuit) -> dict[str, int]:
    counts: dict[str, int] = {}
    for gate in circuit.gates:
        counts[gate.kind] = counts.get(gate.kind, 0) + 1
    return dict(sorted(counts.items()))


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kickmix",
        description="Build, verify, inspect, and cost out measurement-assisted "
        "reversible circuits.",
        epilog=f"Extra named curves can be registered via the {CURVE_REGISTRY_ENV} "
        "environment variable (path to a JSON file).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser(
        "build",
        help="emit a circuit file plus a JSON sidecar with predicted resources",
    )
    p_build.add_argument(
        "builder",
        choices=[
            "temp-and",
            "adder",
            "mod-add",
            "lookup",
            "pointadd",
            "windowed-pointadd",
        ],
    )
    p_build.add_argument("-o", "--output", required=True, help="circuit file to write")
    p_build.add_argument("--width", type=int, help="register width in bits")
    p_build.add_argument("--constant", type=int, help="added constant (mod-add)")
    p_build.add_argument("--modulus", type=int, help="modulus (mod-add)")
    p_build.add_argument("--table", help="comma-separated lookup entries")
    p_build.add_argument("--entry-bits", type=int, help="output bits per lookup entry")
    p_build.add_argument(
        "--curve", help=f"named curve ({', '.join(registry_names())}, ...)"
    )
    p_build.add_argument("--point", help="base point: G, inf, or x,y")
    p_build.add_argument("--window", type=int, help="window width in bits")
    p_build.set_defaults(func=_cmd_build)

    p_verify = sub.add_parser(
        "verify", help="run the self-seeded test protocol against the curve oracle"
    )
    p_verify.add_argument("circuit", help="circuit file to verify")
    p_verify.add_argument("--spec", required=True, help="verification spec JSON")
    p_verify.add_argument("-o", "--output", help="write the report here")
    p_verify.add_argument("--jobs", type=int, default=1, help="parallel test workers")
    p_verify.add_argument(
        "--exhaustive",
        action="store_true",
        help="check the whole enumerable domain and branch space",
    )
    p_verify.add_argument(
        "--fail-fast", action="store_true", help="stop at the first failing test"
    )
    p_verify.set_defaults(func=_cmd_verify)

    p_estimate = sub.add_parser(
        "estimate", help="evaluate the cost model on a scenario JSON"
    )
    p_estimate.add_argument("scenario", help="scenario JSON file")
    p_estimate.add_argument("-o", "--output", help="results JSON (default stdout)")
    p_estimate.add_argument("--salvage-csv", help="write the salvage curve as CSV")
    p_estimate.add_argument("--success-csv", help="write a success-vs-time sweep CSV")
    p_estimate.set_defaults(func=_cmd_estimate)

    p_inspect = sub.add_parser("inspect", help="print a circuit file's vitals")
    p_inspect.add_argument("circuit", help="circuit file to inspect")
    p_inspect.add_argument("--json", action="store_true", help="machine-readable output")
    p_inspect.add_argument(
        "--histogram", action="store_true", help="include a per-gate-kind count"
    )
    p_inspect.set_defaults(func=_cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
