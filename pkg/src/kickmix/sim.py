"""Classical simulation of kickmix circuits on basis states.

Every gate in the set maps computational basis states to basis states, so a
run tracks a bit vector plus a global sign:

* X / CX / CCX flip the target when all controls are 1;
* Z / CZ / CCZ flip the sign exactly when every operand bit is 1;
* MX draws an outcome bit r from caller-supplied randomness.  On r = 1 the
  sign picks up (-1)^bit for the measured qubit (the phase kickback left by
  measuring out a temporary product); the outcome is stored in the
  destination classical bit and the measured qubit resets to 0.

Conditioned gates execute only when their classical bit matches; skipped
gates contribute nothing to the executed-gate counters.

Measurement randomness is injected as an iterable of 0/1 bits, which makes
runs reproducible and lets callers enumerate outcome branches exhaustively.
For circuits whose conditioned gates are all diagonal, the branch space
factorizes per measurement, and :func:`check_phase_all_branches` delivers an
exact all-branch verdict from a single instrumented pass — no enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping

from .circuit import Circuit, static_resources

__all__ = [
    "RngExhausted",
    "RunResult",
    "BranchInvariant",
    "run",
    "run_all_measurement_branches",
    "check_phase_all_branches",
    "DEFAULT_BRANCH_LIMIT",
]

DEFAULT_BRANCH_LIMIT = 20


class RngExhausted(RuntimeError):
    """The injected randomness ran out before the last measurement."""


@dataclass(frozen=True)
class RunResult:
    """Outcome of one simulated run.

    outputs maps each output register name to its integer value;
    measurements holds one entry per classical bit (None if never written);
    final_bits is the raw qubit vector for diagnostics.
    """

    outputs: dict[str, int]
    phase: int
    measurements: tuple[int | None, ...]
    executed_total: int
    executed_non_clifford: int
    final_bits: tuple[int, ...]


@dataclass(frozen=True)
class BranchInvariant:
    """Exact summary over all 2^m measurement branches of one input.

    Output bits are measurement-independent whenever every conditioned gate
    is diagonal, so `outputs` applies to every branch.  The sign on a branch
    with outcomes r is a product of one factor per measurement plus a fixed
    contribution, so phase_always_plus_one is decided by comparing the two
    halves of the branch space per measurement — checked in one pass.
    phase_defects lists classical bits whose r=0 / r=1 halves disagree.
    """

    outputs: dict[str, int]
    phase_always_plus_one: bool
    measurement_count: int
    phase_defects: tuple[int, ...]
    final_bits: tuple[int, ...]


def _initial_bits(circuit: Circuit, inputs: Mapping[str, int]) -> list[int]:
    declared = {reg.name for reg in circuit.inputs}
    unknown = sorted(set(inputs) - declared)
    if unknown:
        raise ValueError(f"no such input register(s): {', '.join(unknown)}")
    missing = sorted(declared - set(inputs))
    if missing:
        raise ValueError(f"missing input register(s): {', '.join(missing)}")
    bits = [0] * circuit.qubit_count
    for reg in circuit.inputs:
        value = inputs[reg.name]
        if not 0 <= value < (1 << reg.width):
            raise ValueError(
                f"value {value} does not fit input register "
                f"{reg.name!r} ({reg.width} bit(s))"
            )
        for offset in range(reg.width):
            bits[reg.lo + offset] = (value >> offset) & 1
    return bits


def _read_register(bits: list[int], lo: int, hi: int) -> int:
    value = 0
    for q in range(hi, lo - 1, -1):
        value = (value << 1) | bits[q]
    return value


def run(
    circuit: Circuit,
    inputs: Mapping[str, int],
    rng: Iterable[int],
    trace: Callable[[str], None] | None = None,
) -> RunResult:
    """Execute the circuit on a basis-state input.

    inputs assigns an integer to every declared input register; all other
    qubits start at 0.  rng supplies one bit per executed measurement and
    raising :class:`RngExhausted` if it runs dry.  An optional trace callback
    receives one line per executed gate.
    """
    bits = _initial_bits(circuit, inputs)
    cbits: list[int | None] = [None] * circuit.classical_bit_count
    phase = 1
    executed_total = 0
    executed_non_clifford = 0
    rng_iter: Iterator[int] = iter(rng)

    for index, gate in enumerate(circuit.gates):
        if gate.condition is not None:
            cb, wanted = gate.condition
            if cbits[cb] != wanted:
                continue
        kind = gate.kind
        qs = gate.qubits
        if kind == "MX":
            try:
                outcome = next(rng_iter)
            except StopIteration:
                raise RngExhausted(
                    f"measurement randomness exhausted at gate {index}"
                ) from None
            if outcome not in (0, 1):
                raise ValueError(f"measurement randomness must be bits, got {outcome!r}")
            if outcome and bits[qs[0]]:
                phase = -phase
            cbits[gate.cbit] = outcome
            bits[qs[0]] = 0
        elif kind in ("X", "CX", "CCX"):
            if all(bits[q] for q in qs[:-1]):
                bits[qs[-1]] ^= 1
            if kind == "CCX":
                executed_non_clifford += 1
        else:  # Z / CZ / CCZ
            if all(bits[q] for q in qs):
                phase = -phase
            if kind == "CCZ":
                executed_non_clifford += 1
        executed_total += 1
        if trace is not None:
            trace(f"{index:5d} {kind} {' '.join(map(str, qs))} phase={phase:+d}")

    outputs = {
        reg.name: _read_register(bits, reg.lo, reg.hi) for reg in circuit.outputs
    }
    return RunResult(
        outputs=outputs,
        phase=phase,
        measurements=tuple(cbits),
        executed_total=executed_total,
        executed_non_clifford=executed_non_clifford,
        final_bits=tuple(bits),
    )


def run_all_measurement_branches(
    circuit: Circuit,
    inputs: Mapping[str, int],
    branch_limit: int = DEFAULT_BRANCH_LIMIT,
) -> list[RunResult]:
    """Run every measurement-outcome branch, in lexicographic outcome order.

    The outcome tuple feeds measurements in execution order.  Refuses
    circuits with more than branch_limit measurements (2^m branches); sample
    with :func:`run` or use :func:`check_phase_all_branches` instead.
    """
    m = static_resources(circuit).measurement_count
    if m > branch_limit:
        raise ValueError(
            f"{m} measurements give 2^{m} branches, beyond the limit of "
            f"2^{branch_limit}; sample with run() or use "
            "check_phase_all_branches() for a closed-form verdict"
        )
    return [
        run(circuit, inputs, outcomes)
        for outcomes in itertools.product((0, 1), repeat=m)
    ]


def check_phase_all_branches(
    circuit: Circuit, inputs: Mapping[str, int]
) -> BranchInvariant:
    """Exact all-branch phase/output verdict from one instrumented pass.

    Requires every conditioned gate to be diagonal (Z/CZ/CCZ).  Then the data
    bits never depend on measurement outcomes, and the total sign over a
    branch splits into independent per-measurement factors:

        sign(r) = (-1)^base * prod_i (-1)^[r_i*v_i + corr_i(r_i)]

    where v_i is the measured bit and corr_i(r_i) the parity contributed by
    diagonal gates conditioned on classical bit i.  The sign is +1 on every
    one of the 2^m branches iff each measurement's two halves agree
    (corr_i(0) == v_i + corr_i(1) mod 2) and the all-zeros branch is +1.

    Cross-validated against brute-force branch enumeration in the test
    suite; raises ValueError when a conditioned permutation gate makes the
    factorization inapplicable.
    """
    bits = _initial_bits(circuit, inputs)
    base_parity = 0
    measured_value: dict[int, int] = {}
    corr_when_0: dict[int, int] = {}
    corr_when_1: dict[int, int] = {}

    for index, gate in enumerate(circuit.gates):
        kind = gate.kind
        qs = gate.qubits
        if kind in ("X", "CX", "CCX"):
            if gate.condition is not None:
                raise ValueError(
                    f"gate {index} is a conditioned {kind}: branch space does not "
                    "factorize; use run_all_measurement_branches instead"
                )
            if all(bits[q] for q in qs[:-1]):
                bits[qs[-1]] ^= 1
        elif kind == "MX":
            measured_value[gate.cbit] = bits[qs[0]]
            bits[qs[0]] = 0
        else:  # diagonal
            parity = 1 if all(bits[q] for q in qs) else 0
            if gate.condition is None:
                base_parity ^= parity
            else:
                cb, wanted = gate.condition
                table = corr_when_1 if wanted == 1 else corr_when_0
                table[cb] = table.get(cb, 0) ^ parity

    defects = tuple(
        cb
        for cb in sorted(measured_value)
        if corr_when_0.get(cb, 0) != (measured_value[cb] ^ corr_when_1.get(cb, 0))
    )
    zero_branch_parity = base_parity
    for cb in measured_value:
        zero_branch_parity ^= corr_when_0.get(cb, 0)
    ok = not defects and zero_branch_parity == 0

    outputs = {
        reg.name: _read_register(bits, reg.lo, reg.hi) for reg in circuit.outputs
    }
    return BranchInvariant(
        outputs=outputs,
        phase_always_plus_one=ok,
        measurement_count=len(measured_value),
        phase_defects=defects,
        final_bits=tuple(bits),
    )
