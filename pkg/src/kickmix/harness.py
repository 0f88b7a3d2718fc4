"""Self-seeded verification of curve-arithmetic circuits.

The harness checks a circuit file against the classical curve oracle on
pseudo-random inputs that the circuit file itself determines, so a verifier
needs nothing but the file to reproduce the exact test set:

* commitment = SHA-256 of the raw file bytes;
* test scalars come from a SHAKE256 stream seeded with those same bytes:
  k_1..k_N are drawn first, sequentially, each as ceil(order_bits / 8)
  bytes, big-endian, reduced modulo the curve group order (then window
  values w_1..w_N for windowed circuits, then addend scalars for two-point
  adders, in that order, with the analogous width rules);
* measurement randomness for test i comes from its own stream,
  SHAKE256(commitment_bytes || i as 8-byte big-endian), consumed one byte
  at a time, bits taken most-significant first — so tests can run in any
  order or in parallel without changing a single outcome.

Test i drives the circuit with the point k_i * G and compares the simulated
output registers with the oracle sum; the verdict also requires the run to
end with phase +1 and the declared resource bounds to hold.  Inputs the
circuit's metadata declares undefined-by-contract (identity / inverse /
doubling cases) are skipped and counted, never silently passed.

A circuit wrong on at least a fraction eps of its domain slips past N
random tests with probability at most (1 - eps)^N;
:func:`required_test_count` returns the smallest N pushing that below
2^-security_bits (computed exactly, no floating point at the boundary).

Reports serialize to canonical JSON — sorted keys, two-space indent, fixed
decimal formatting for averages, trailing newline — and carry a SHA-256
digest over everything but the digest field itself, so two runs agree iff
their report bytes agree.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from .circuit import Circuit, parse, static_resources
from .curve import CurveParams, CurvePoint, INFINITY, named_curve, point_add, point_neg, scalar_mul
from .builders import decode_point, encode_point
from .sim import check_phase_all_branches, run

__all__ = [
    "HarnessError",
    "VerificationSpec",
    "TestCase",
    "Transcript",
    "VerificationReport",
    "commit",
    "derive_tests",
    "verify",
    "verify_exhaustive",
    "required_test_count",
    "achieved_security_bits",
    "spec_for_circuit",
    "ROLES",
]

ROLES = ("accumulator_x", "accumulator_y", "window", "addend_x", "addend_y")

# Self-description embedded in every report so a reader can re-derive the
# transcript without consulting anything else.  Measurement bits come from
# per-test streams (not interleaved into the scalar stream) so tests can run
# in any order or in parallel with identical results.
_PROTOCOL_HEADER = {
    "commitment": "sha256(circuit_bytes)",
    "scalar_stream": "shake256(circuit_bytes): scalars, then window values, "
    "then addend scalars; big-endian, reduced mod order / 2^window_bits",
    "measurement_stream": "shake256(sha256(circuit_bytes) || test_index_u64be), "
    "bits most-significant-first per byte",
}


class HarnessError(ValueError):
    """Verification could not be set up (bad mapping, metadata, or spec)."""


def commit(data: bytes) -> str:
    """Hex SHA-256 commitment to exact bytes."""
    return hashlib.sha256(data).hexdigest()


class _XofStream:
    """Incremental reads from a SHAKE256 output stream (prefix-stable)."""

    def __init__(self, seed: bytes):
        self._hash = hashlib.shake_256(seed)
        self._pos = 0

    def read(self, count: int) -> bytes:
        out = self._hash.digest(self._pos + count)[self._pos :]
        self._pos += count
        return out


def _bit_stream(seed: bytes) -> Iterator[int]:
    """Endless bits from SHAKE256(seed): bytes in stream order, bits MSB first."""
    stream = _XofStream(seed)
    while True:
        for byte in stream.read(64):
            for shift in range(7, -1, -1):
                yield (byte >> shift) & 1


def required_test_count(tolerated_fraction, security_bits: int) -> int:
    """Smallest N with (1 - eps)^N <= 2^-security_bits, exactly.

    eps is taken at decimal face value (0.01 means exactly 1/100).  eps = 0
    is refused: no finite number of random tests covers it — enumerate the
    domain instead (see verify_exhaustive)."""
    eps = tolerated_fraction if isinstance(tolerated_fraction, Fraction) else Fraction(
        str(tolerated_fraction)
    )
    if not 0 < eps < 1:
        raise ValueError(
            "tolerated fraction must be in (0, 1); for 0, enumerate the domain "
            "exhaustively instead of sampling"
        )
    lam = int(security_bits)
    if lam != security_bits or lam < 1:
        raise ValueError(f"security_bits must be a positive integer, got {security_bits}")
    survive = 1 - eps
    bound = Fraction(1, 1 << lam)
    n = max(1, math.ceil(lam / -math.log2(float(survive))))
    while survive**n > bound:
        n += 1
    while n > 1 and survive ** (n - 1) <= bound:
        n -= 1
    return n


def achieved_security_bits(tolerated_fraction, test_count: int) -> float:
    """-test_count * log2(1 - eps): the exponent actually reached."""
    eps = float(Fraction(str(tolerated_fraction)))
    if not 0 < eps < 1:
        raise ValueError("tolerated fraction must be in (0, 1)")
    return -test_count * math.log2(1 - eps)


@dataclass(frozen=True)
class VerificationSpec:
    """What to verify and under which budgets.

    registers maps roles (accumulator_x, accumulator_y, optional window,
    optional addend_x/addend_y) to the circuit's register names.
    base_source selects where the fixed addend comes from: the circuit's
    'base' metadata, or the curve generator.  max_avg_non_clifford bounds
    the *average executed* CCX+CCZ count per test; max_qubits and
    max_total_ops bound the static circuit width and gate count."""

    curve: str
    test_count: int
    registers: dict[str, str] = field(
        default_factory=lambda: {"accumulator_x": "qx", "accumulator_y": "qy"}
    )
    base_source: str = "metadata"
    tolerated_failure_fraction: float = 0.01
    security_bits: int = 128
    max_avg_non_clifford: float | None = None
    max_qubits: int | None = None
    max_total_ops: int | None = None
    allow_failures: bool = False

    def __post_init__(self) -> None:
        if self.test_count < 0:
            raise HarnessError(f"test_count must be >= 0, got {self.test_count}")
        if self.base_source not in ("metadata", "generator"):
            raise HarnessError(
                f"base_source must be 'metadata' or 'generator', got {self.base_source!r}"
            )
        unknown = sorted(set(self.registers) - set(ROLES))
        if unknown:
            raise HarnessError(f"unknown register role(s): {', '.join(unknown)}")
        for role in ("accumulator_x", "accumulator_y"):
            if role not in self.registers:
                raise HarnessError(f"register mapping must include {role}")
        if ("addend_x" in self.registers) != ("addend_y" in self.registers):
            raise HarnessError("addend_x and addend_y must be mapped together")
        if not 0 <= self.tolerated_failure_fraction < 1:
            raise HarnessError("tolerated_failure_fraction must be in [0, 1)")

    def to_dict(self) -> dict:
        return {
            "curve": self.curve,
            "test_count": self.test_count,
            "registers": dict(self.registers),
            "base_source": self.base_source,
            "tolerated_failure_fraction": self.tolerated_failure_fraction,
            "security_bits": self.security_bits,
            "max_avg_non_clifford": self.max_avg_non_clifford,
            "max_qubits": self.max_qubits,
            "max_total_ops": self.max_total_ops,
            "allow_failures": self.allow_failures,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "VerificationSpec":
        allowed = {
            "curve",
            "test_count",
            "registers",
            "base_source",
            "tolerated_failure_fraction",
            "security_bits",
            "max_avg_non_clifford",
            "max_qubits",
            "max_total_ops",
            "allow_failures",
        }
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise HarnessError(f"unknown spec field(s): {', '.join(unknown)}")
        if "curve" not in data or "test_count" not in data:
            raise HarnessError("spec requires at least curve and test_count")
        return cls(**{k: v for k, v in data.items()})


def spec_for_circuit(circuit: Circuit, **overrides) -> VerificationSpec:
    """Best-effort spec from circuit metadata and registers.

    Defaults to the lighter 40-bit regime with a matching test count so the
    resulting spec is consistent (no sufficiency warning) and still cheap
    enough for toy curves."""
    curve_name = overrides.pop("curve", circuit.metadata.get("curve"))
    if curve_name is None:
        raise HarnessError("circuit metadata names no curve; pass one explicitly")
    registers = {"accumulator_x": "qx", "accumulator_y": "qy"}
    if any(reg.name == "k" for reg in circuit.inputs):
        registers["window"] = "k"
    overrides.setdefault("registers", registers)
    overrides.setdefault("security_bits", 40)
    if "test_count" not in overrides:
        eps = overrides.get("tolerated_failure_fraction", 0.01)
        overrides["test_count"] = (
            required_test_count(eps, overrides["security_bits"]) if eps > 0 else 0
        )
    return VerificationSpec(curve=curve_name, **overrides)


@dataclass(frozen=True)
class TestCase:
    index: int
    scalar: int
    window: int | None = None
    addend_scalar: int | None = None


@dataclass(frozen=True)
class Transcript:
    """Commitment plus the derived test inputs; see the module docstring for
    the byte-exact derivation rules."""

    commitment: str
    curve_name: str
    tests: tuple[TestCase, ...]

    def measurement_bits(self, index: int) -> Iterator[int]:
        seed = bytes.fromhex(self.commitment) + index.to_bytes(8, "big")
        return _bit_stream(seed)


def derive_tests(circuit_bytes: bytes, spec: VerificationSpec) -> Transcript:
    """Derive the deterministic test set for a circuit file under a spec.

    Parses the circuit to learn the window width and whether a second input
    point is needed, then applies the byte-exact draw rules from the module
    docstring."""
    plan = _resolve(parse(circuit_bytes), spec)
    return _derive(
        circuit_bytes,
        plan.curve,
        spec.test_count,
        window_bits=plan.window_bits,
        with_addend=plan.addend_x is not None,
    )


def _derive(
    circuit_bytes: bytes,
    curve: CurveParams,
    test_count: int,
    window_bits: int | None = None,
    with_addend: bool = False,
) -> Transcript:
    if test_count < 0:
        raise ValueError("test_count must be >= 0")
    commitment = commit(circuit_bytes)
    master = _XofStream(circuit_bytes)
    scalar_bytes = (curve.order.bit_length() + 7) // 8
    scalars = [
        int.from_bytes(master.read(scalar_bytes), "big") % curve.order
        for _ in range(test_count)
    ]
    windows: list[int | None] = [None] * test_count
    if window_bits is not None:
        wbytes = (window_bits + 7) // 8
        windows = [
            int.from_bytes(master.read(wbytes), "big") % (1 << window_bits)
            for _ in range(test_count)
        ]
    addends: list[int | None] = [None] * test_count
    if with_addend:
        addends = [
            int.from_bytes(master.read(scalar_bytes), "big") % curve.order
            for _ in range(test_count)
        ]
    tests = tuple(
        TestCase(index=i, scalar=scalars[i], window=windows[i], addend_scalar=addends[i])
        for i in range(test_count)
    )
    return Transcript(commitment=commitment, curve_name=curve.name, tests=tests)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class _Plan:
    """Resolved circuit/spec pairing shared by every test."""

    circuit: Circuit
    curve: CurveParams
    coordinate_bits: int
    acc_x: str
    acc_y: str
    window_reg: str | None
    window_bits: int | None
    addend_x: str | None
    addend_y: str | None
    base: CurvePoint | None
    policy: str


def _resolve(circuit: Circuit, spec: VerificationSpec) -> _Plan:
    curve = named_curve(spec.curve)
    in_names = {r.name: r for r in circuit.inputs}
    out_names = {r.name: r for r in circuit.outputs}

    def reg_for(role: str, required: bool) -> str | None:
        name = spec.registers.get(role)
        if name is None:
            if required:
                raise HarnessError(f"register mapping lacks role {role!r}")
            return None
        if name not in in_names or name not in out_names:
            raise HarnessError(
                f"register mapping mismatch: {role} -> {name!r} is not an "
                "input+output register of the circuit"
            )
        return name

    acc_x = reg_for("accumulator_x", required=True)
    acc_y = reg_for("accumulator_y", required=True)
    nb = curve.coordinate_bits
    for name in (acc_x, acc_y):
        if in_names[name].width != nb:
            raise HarnessError(
                f"register mapping mismatch: {name!r} is {in_names[name].width} "
                f"bit(s) but curve {curve.name} coordinates need {nb}"
            )
    window_reg = reg_for("window", required=False)
    window_bits = in_names[window_reg].width if window_reg else None
    addend_x = reg_for("addend_x", required=False)
    addend_y = reg_for("addend_y", required=False)

    base: CurvePoint | None = None
    if addend_x is None:
        if spec.base_source == "generator":
            base = curve.generator
        else:
            raw = circuit.metadata.get("base")
            if raw is None:
                raise HarnessError(
                    "base_source is metadata but the circuit metadata has no 'base'"
                )
            if raw == "inf":
                base = INFINITY
            else:
                try:
                    xs, ys = raw.split(",")
                    base = CurvePoint(int(xs), int(ys))
                except Exception:
                    raise HarnessError(f"unparseable base metadata {raw!r}") from None

    policy = circuit.metadata.get("exceptional", "correct")
    return _Plan(
        circuit=circuit,
        curve=curve,
        coordinate_bits=nb,
        acc_x=acc_x,
        acc_y=acc_y,
        window_reg=window_reg,
        window_bits=window_bits,
        addend_x=addend_x,
        addend_y=addend_y,
        base=base,
        policy=policy,
    )


def _addend_for(plan: _Plan, case: TestCase) -> CurvePoint:
    if plan.addend_x is not None:
        return scalar_mul(case.addend_scalar, plan.curve.generator, plan.curve)
    if plan.window_reg is not None:
        return scalar_mul(case.window, plan.base, plan.curve)
    return plan.base


def _is_exceptional(plan: _Plan, accumulator: CurvePoint, addend: CurvePoint) -> bool:
    """Inputs where the generic chord rule does not apply."""
    if accumulator.is_infinity or addend.is_infinity:
        return True
    if accumulator == addend:
        return True
    return accumulator == point_neg(addend, plan.curve)


def _split_point(point: CurvePoint, nb: int) -> tuple[int, int]:
    packed = encode_point(point, nb)
    ones = (1 << nb) - 1
    return packed & ones, (packed >> nb) & ones


def _case_inputs(plan: _Plan, accumulator: CurvePoint, case: TestCase,
                 addend: CurvePoint) -> dict[str, int]:
    x_val, y_val = _split_point(accumulator, plan.coordinate_bits)
    inputs = {plan.acc_x: x_val, plan.acc_y: y_val}
    if plan.window_reg is not None:
        inputs[plan.window_reg] = case.window
    if plan.addend_x is not None:
        ax, ay = _split_point(addend, plan.coordinate_bits)
        inputs[plan.addend_x] = ax
        inputs[plan.addend_y] = ay
    return inputs


def _expected_outputs(plan: _Plan, inputs: dict[str, int],
                      expected_sum: CurvePoint) -> dict[str, int]:
    """Every mapped role register must come back with its expected value;
    the accumulator carries the sum, everything else is preserved."""
    expected = dict(inputs)
    ex, ey = _split_point(expected_sum, plan.coordinate_bits)
    expected[plan.acc_x] = ex
    expected[plan.acc_y] = ey
    out_names = {r.name for r in plan.circuit.outputs}
    return {name: value for name, value in expected.items() if name in out_names}


@dataclass(frozen=True)
class VerificationReport:
    """Everything verify() decided, as a canonically serializable record."""

    data: dict

    @property
    def verdict(self) -> str:
        return self.data["verdict"]

    @property
    def passed(self) -> bool:
        return self.data["verdict"] == "pass"

    @property
    def digest(self) -> str:
        return self.data["report_digest"]

    def to_json_bytes(self) -> bytes:
        return _canonical_json(self.data)


def _canonical_json(data: dict) -> bytes:
    return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _round_fraction(value: Fraction, places: int = 6) -> str:
    scaled = value.numerator * 10**places
    q, r = divmod(scaled, value.denominator)
    if 2 * r >= value.denominator:
        q += 1
    whole, frac = divmod(q, 10**places)
    return f"{whole}.{frac:0{places}d}"


def _finish_report(data: dict) -> VerificationReport:
    body = dict(data)
    body.pop("report_digest", None)
    digest = hashlib.sha256(_canonical_json(body)).hexdigest()
    body["report_digest"] = digest
    return VerificationReport(data=body)


def _aggregate(
    data: dict,
    spec: VerificationSpec,
    entries: list[dict],
    resources,
) -> VerificationReport:
    executed = [e for e in entries if not e["skipped"]]
    failures = [e["index"] for e in executed if not (e["output_ok"] and e["phase_ok"])]
    nc_sum = sum(e["executed_non_clifford"] for e in executed)
    avg_nc = Fraction(nc_sum, len(executed)) if executed else Fraction(0)

    violations: list[str] = []
    if spec.max_avg_non_clifford is not None and avg_nc > Fraction(
        str(spec.max_avg_non_clifford)
    ):
        violations.append(
            f"average executed non-Clifford {float(avg_nc):.3f} exceeds "
            f"{spec.max_avg_non_clifford}"
        )
    if spec.max_qubits is not None and resources.qubit_count > spec.max_qubits:
        violations.append(
            f"qubit count {resources.qubit_count} exceeds {spec.max_qubits}"
        )
    if spec.max_total_ops is not None and resources.total_gate_count > spec.max_total_ops:
        violations.append(
            f"total gate count {resources.total_gate_count} exceeds {spec.max_total_ops}"
        )

    warnings = list(data.get("warnings", ()))
    if not executed and entries:
        warnings.append("every test hit the exceptional-input policy; nothing ran")

    tolerated = 0
    if spec.allow_failures:
        tolerated = math.floor(
            Fraction(str(spec.tolerated_failure_fraction)) * len(entries)
        )
    verdict = "pass" if len(failures) <= tolerated and not violations else "fail"

    data.update(
        {
            "spec": spec.to_dict(),
            "test_count": len(entries),
            "executed_tests": len(executed),
            "skipped_exceptional": len(entries) - len(executed),
            "failures": len(failures),
            "failure_indices": failures,
            "tolerated_failures": tolerated,
            "tests": entries,
            "avg_executed_non_clifford": {
                "numerator": avg_nc.numerator,
                "denominator": avg_nc.denominator,
                "rounded": _round_fraction(avg_nc),
            },
            "static_resources": resources.as_dict(),
            "peak_qubits": resources.qubit_count,
            "bound_violations": violations,
            "warnings": warnings,
            "verdict": verdict,
        }
    )
    return _finish_report(data)


def verify(
    circuit_bytes: bytes,
    spec: VerificationSpec,
    jobs: int = 1,
    fail_fast: bool = False,
) -> VerificationReport:
    """Run the transcript-derived test set against the curve oracle.

    jobs > 1 runs tests in a thread pool; reports are byte-identical for any
    job count because every test's inputs and randomness are derived
    independently.  fail_fast stops at the first failing test (sequential)
    and is meant for mutation screening, not for final reports.

    tolerated_failure_fraction = 0 means random sampling cannot reach the
    target, so the whole enumerable domain is checked instead (equivalent to
    verify_exhaustive; test_count is ignored)."""
    if spec.tolerated_failure_fraction == 0:
        return verify_exhaustive(circuit_bytes, spec)
    circuit = parse(circuit_bytes)
    plan = _resolve(circuit, spec)
    transcript = _derive(
        circuit_bytes,
        plan.curve,
        spec.test_count,
        window_bits=plan.window_bits,
        with_addend=plan.addend_x is not None,
    )
    resources = static_resources(circuit)

    warnings: list[str] = []
    needed = required_test_count(spec.tolerated_failure_fraction, spec.security_bits)
    if spec.test_count < needed:
        warnings.append(
            f"test_count {spec.test_count} is below the {needed} needed for "
            f"2^-{spec.security_bits} at tolerated fraction "
            f"{spec.tolerated_failure_fraction}"
        )

    def run_case(case: TestCase) -> dict:
        accumulator = scalar_mul(case.scalar, plan.curve.generator, plan.curve)
        addend = _addend_for(plan, case)
        entry: dict = {"index": case.index, "scalar": case.scalar}
        if case.window is not None:
            entry["window"] = case.window
        if case.addend_scalar is not None:
            entry["addend_scalar"] = case.addend_scalar
        if plan.policy == "undefined" and _is_exceptional(plan, accumulator, addend):
            entry.update(
                {
                    "skipped": True,
                    "output_ok": None,
                    "phase_ok": None,
                    "executed_total": 0,
                    "executed_non_clifford": 0,
                }
            )
            return entry
        inputs = _case_inputs(plan, accumulator, case, addend)
        expected = _expected_outputs(
            plan, inputs, point_add(accumulator, addend, plan.curve)
        )
        result = run(circuit, inputs, transcript.measurement_bits(case.index))
        output_ok = all(result.outputs[name] == expected[name] for name in expected)
        entry.update(
            {
                "skipped": False,
                "output_ok": output_ok,
                "phase_ok": result.phase == 1,
                "executed_total": result.executed_total,
                "executed_non_clifford": result.executed_non_clifford,
            }
        )
        return entry

    entries: list[dict]
    if fail_fast:
        entries = []
        for case in transcript.tests:
            entry = run_case(case)
            entries.append(entry)
            if not entry["skipped"] and not (entry["output_ok"] and entry["phase_ok"]):
                break
    elif jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(run_case, transcript.tests))
    else:
        entries = [run_case(case) for case in transcript.tests]

    data = {
        "circuit_commitment": transcript.commitment,
        "curve": plan.curve.name,
        "mode": "transcript",
        "fail_fast": fail_fast,
        "protocol": _PROTOCOL_HEADER,
        "warnings": warnings,
    }
    return _aggregate(data, spec, entries, resources)


def verify_exhaustive(circuit_bytes: bytes, spec: VerificationSpec) -> VerificationReport:
    """Check the whole enumerable domain and the whole measurement-branch
    space: every on-curve accumulator (times every window value), with the
    closed-form all-branch phase verdict from the simulator.

    Executed-gate counts per test are taken from the all-zero-outcomes
    branch.  spec.test_count is ignored; eps-style sampling does not apply."""
    from .curve import enumerate_points

    circuit = parse(circuit_bytes)
    plan = _resolve(circuit, spec)
    if plan.addend_x is not None:
        raise HarnessError(
            "exhaustive mode supports fixed-base and windowed circuits only"
        )
    resources = static_resources(circuit)
    points = enumerate_points(plan.curve)
    window_values = range(1 << plan.window_bits) if plan.window_reg else (None,)

    entries: list[dict] = []
    index = 0
    for window in window_values:
        case = TestCase(index=index, scalar=0, window=window)
        addend = _addend_for(plan, case)
        for accumulator in points:
            entry: dict = {
                "index": index,
                "accumulator": "inf"
                if accumulator.is_infinity
                else [accumulator.x, accumulator.y],
            }
            if window is not None:
                entry["window"] = window
            case = TestCase(index=index, scalar=0, window=window)
            index += 1
            if plan.policy == "undefined" and _is_exceptional(plan, accumulator, addend):
                entry.update(
                    {
                        "skipped": True,
                        "output_ok": None,
                        "phase_ok": None,
                        "executed_total": 0,
                        "executed_non_clifford": 0,
                    }
                )
                entries.append(entry)
                continue
            inputs = _case_inputs(plan, accumulator, case, addend)
            expected = _expected_outputs(
                plan, inputs, point_add(accumulator, addend, plan.curve)
            )
            summary = check_phase_all_branches(circuit, inputs)
            zero_branch = run(circuit, inputs, itertools.repeat(0))
            output_ok = all(
                summary.outputs[name] == expected[name] for name in expected
            )
            entry.update(
                {
                    "skipped": False,
                    "output_ok": output_ok,
                    "phase_ok": summary.phase_always_plus_one,
                    "branches_covered": f"2^{summary.measurement_count}",
                    "executed_total": zero_branch.executed_total,
                    "executed_non_clifford": zero_branch.executed_non_clifford,
                }
            )
            entries.append(entry)

    data = {
        "circuit_commitment": commit(circuit_bytes),
        "curve": plan.curve.name,
        "mode": "exhaustive",
        "fail_fast": False,
        "protocol": _PROTOCOL_HEADER,
        "warnings": [],
    }
    return _aggregate(data, spec, entries, resources)
