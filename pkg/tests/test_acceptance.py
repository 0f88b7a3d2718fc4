"""Acceptance gate: one test per release criterion.

Each criterion is a single test with pinned tolerances — exact integer
equality where the arithmetic is exact, explicit numeric bounds everywhere
else.  The terminal summary hook in conftest prints one PASS/FAIL line per
criterion after the run.
"""

from __future__ import annotations

import json
import time
from fractions import Fraction

from kickmix import (
    AttackScenario,
    CurvePoint,
    MachineProfile,
    PointAddCost,
    build_adder,
    build_lookup,
    check_phase_all_branches,
    ecdlp_qubits,
    ecdlp_toffoli,
    enumerate_points,
    mutate,
    onspend_success,
    point_add,
    required_test_count,
    runtime,
    scalar_mul,
    serialize,
    spec_for_circuit,
    t_factory_qubits,
    verify,
    verify_exhaustive,
    windowed_addition_count,
)
from kickmix.cli import main


def test_criterion_1() -> None:
    """Closed-form 256-bit gate and qubit totals land on frozen values under budget."""
    started = time.perf_counter()
    lean = PointAddCost(pa_toffoli=2_100_000, pa_qubits=1175, n=256, w=16)
    wide = PointAddCost(pa_toffoli=2_700_000, pa_qubits=1425, n=256, w=16)
    assert windowed_addition_count(256, 16) == 28
    assert ecdlp_toffoli(lean) == 64_305_024
    assert ecdlp_toffoli(lean) <= 70_000_000
    assert ecdlp_toffoli(wide) == 81_105_024
    assert ecdlp_toffoli(wide) <= 90_000_000
    assert ecdlp_qubits(lean) == 1191
    assert ecdlp_qubits(lean) <= 1200
    assert ecdlp_qubits(wide) == 1441
    assert ecdlp_qubits(wide) <= 1450
    assert time.perf_counter() - started < 1.0


def test_criterion_2() -> None:
    """Reaction-limited runtimes and T-factory sizes are exact integers."""
    machine = MachineProfile(reaction_time=1e-5, round_time=1e-6)
    assert runtime(70_000_000, machine) == 1050
    assert runtime(90_000_000, machine) == 1350
    assert isinstance(runtime(70_000_000, machine), int)
    assert t_factory_qubits(5e5, machine) == 25_000
    slow_rounds = MachineProfile(reaction_time=1e-5, round_time=100e-6)
    assert t_factory_qubits(5e5, slow_rounds) == 2_500_000
    assert isinstance(t_factory_qubits(5e5, machine), int)


def test_criterion_3() -> None:
    """On-spend success probabilities satisfy all four pinned inequalities."""
    block = 600
    nine_tenths = onspend_success(AttackScenario(attack_time=540, mean_block_interval=block))
    assert abs(nine_tenths - 0.40657) < 1e-4
    assert nine_tenths < 0.41
    assert onspend_success(AttackScenario(2160, block)) < 0.03
    assert onspend_success(AttackScenario(4320, block)) < 1 / 1300
    assert onspend_success(AttackScenario(5400, block)) < 1 / 8000


def test_criterion_4() -> None:
    """A 9024-test plan at 1% tolerance reaches 2^-130 escape probability."""
    assert required_test_count(0.01, 128) <= 9024
    assert Fraction(99, 100) ** 9024 <= Fraction(1, 2**130)


def test_criterion_5(
    pointadd11, pointadd11_bytes, pointadd61, pointadd61_bytes
) -> None:
    """Point-addition circuits match the curve oracle on every input and branch."""
    started = time.perf_counter()
    for report_build, raw, points in (
        (pointadd11, pointadd11_bytes, 12),
        (pointadd61, pointadd61_bytes, 61),
    ):
        spec = spec_for_circuit(
            report_build.circuit, test_count=0, tolerated_failure_fraction=0
        )
        outcome = verify_exhaustive(raw, spec)
        assert outcome.passed
        assert outcome.data["failures"] == 0
        assert outcome.data["test_count"] == points  # every accumulator point
        measurements = report_build.predicted.measurement_count
        for entry in outcome.data["tests"]:
            assert entry["branches_covered"] == f"2^{measurements}"
    assert time.perf_counter() - started < 60.0


def _coords(point: CurvePoint, bits: int) -> tuple[int, int]:
    if point.is_infinity:
        return (1 << bits) - 1, (1 << bits) - 1
    return point.x, point.y


def _exact_broken_fraction(circuit, curve, window) -> Fraction:
    """Share of the enumerable domain a mutant breaks, branches weighted.

    A wrong output fails on every measurement branch; a phase defect flips
    the sign on exactly half of them; a bad zero-branch sign with no defects
    fails everywhere.  The sum over all domain elements divided by the
    domain size is the chance a uniformly drawn test fails."""
    bits = curve.coordinate_bits
    generator = curve.generator
    if window is None:
        cases = [(q, None) for q in enumerate_points(curve)]
    else:
        cases = [
            (q, k) for q in enumerate_points(curve) for k in range(1 << window)
        ]
    broken = Fraction(0)
    for accumulator, k in cases:
        qx, qy = _coords(accumulator, bits)
        inputs = {"qx": qx, "qy": qy}
        addend = generator if k is None else scalar_mul(k, generator, curve)
        if k is not None:
            inputs["k"] = k
        ex, ey = _coords(point_add(accumulator, addend, curve), bits)
        expected = {"qx": ex, "qy": ey}
        if k is not None:
            expected["k"] = k
        summary = check_phase_all_branches(circuit, inputs)
        if summary.outputs != expected:
            broken += 1
        elif summary.phase_defects:
            broken += Fraction(1, 2)
        elif not summary.phase_always_plus_one:
            broken += 1
    return broken / len(cases)


def test_criterion_6(toy11, toy61, pointadd11, pointadd61, windowed11_w2) -> None:
    """Every seeded mutation breaking >=1% of the domain is caught at the 40-bit plan."""
    corpus = (
        [(pointadd11.circuit, toy11, None, seed) for seed in range(30)]
        + [(windowed11_w2.circuit, toy11, 2, seed) for seed in range(100, 110)]
        + [(pointadd61.circuit, toy61, None, seed) for seed in range(200, 210)]
    )
    assert len(corpus) >= 50
    plan = required_test_count(0.01, 40)
    detected_count = 0
    detection_probabilities = []
    for circuit, curve, window, seed in corpus:
        mutant = mutate(circuit, seed)
        fraction = _exact_broken_fraction(mutant, curve, window)
        spec = spec_for_circuit(mutant, test_count=plan)
        detected = not verify(serialize(mutant), spec, fail_fast=True).passed
        if fraction >= Fraction(1, 100):
            assert detected, (
                f"seed {seed} on {curve.name}: breaks {float(fraction):.1%} "
                "of the domain but went undetected"
            )
        detected_count += detected
        detection_probabilities.append(1.0 - (1.0 - float(fraction)) ** plan)

    # 99%-confidence lower bound on total detections for independent
    # per-mutant detection probabilities (Poisson-binomial quantile)
    distribution = [1.0]
    for p in detection_probabilities:
        widened = [0.0] * (len(distribution) + 1)
        for hits, mass in enumerate(distribution):
            widened[hits] += mass * (1.0 - p)
            widened[hits + 1] += mass * p
        distribution = widened
    cumulative = 0.0
    lower_bound = 0
    for hits, mass in enumerate(distribution):
        cumulative += mass
        if cumulative > 0.01:
            lower_bound = hits
            break
    assert detected_count >= lower_bound


def test_criterion_7(pointadd11, pointadd11_bytes, tmp_path) -> None:
    """Verification reports are byte-identical across worker counts."""
    circuit_path = tmp_path / "pa.kmx"
    circuit_path.write_bytes(pointadd11_bytes)
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({"curve": "toy-p11-b7", "test_count": 300}))
    reports = []
    for jobs in ("1", "8"):
        out = tmp_path / f"report{jobs}.json"
        code = main([
            "verify", str(circuit_path), "--spec", str(spec_path),
            "-o", str(out), "--jobs", jobs,
        ])
        assert code == 0
        reports.append(out.read_bytes())
    assert reports[0] == reports[1]
    digests = [json.loads(raw)["report_digest"] for raw in reports]
    assert digests[0] == digests[1]


def test_criterion_8() -> None:
    """The 4-bit adder and small table lookups match integer arithmetic everywhere."""
    adder = build_adder(4).circuit
    for a in range(16):
        for b in range(16):
            summary = check_phase_all_branches(adder, {"a": a, "b": b})
            assert summary.outputs == {"a": a, "b": (a + b) % 16}
            assert summary.phase_always_plus_one
    tables = {
        1: [1, 0],
        2: [2, 0, 3, 1],
        3: [5, 0, 7, 3, 1, 6, 2, 4],
        4: list(reversed(range(16))),
    }
    for width, table in tables.items():
        lookup = build_lookup(table).circuit
        for address in range(1 << width):
            summary = check_phase_all_branches(lookup, {"k": address})
            assert summary.outputs == {"k": address, "v": table[address]}
            assert summary.phase_always_plus_one
