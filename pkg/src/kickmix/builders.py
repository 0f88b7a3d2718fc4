"""Circuit builders: arithmetic gadgets assembled from the kickmix gate set.

Every builder returns a :class:`BuildReport` pairing the circuit with the
resource counts the builder itself predicted; construction fails if the
prediction disagrees with a recount of the emitted gates.

The builders share one idiom: a temporary product bit is computed with a
CCX into a clean ancilla and later *measured away* instead of uncomputed
with a second CCX.  An X-basis readout of the ancilla resets it to 0 and, on
outcome 1, leaves a sign (-1)^product behind; a CZ on the two factors,
conditioned on that outcome, cancels the sign.  The uncompute side therefore
costs zero non-Clifford gates, and correctness of the conditioned correction
is visible to the simulator as "phase +1 on every measurement branch".

Permutations of basis states (fixed-point addition, modular constant
addition) are synthesized as chains of basis-state transpositions.  A
transposition of u and v first aligns all differing bits onto one pivot with
CX gates, flips a multi-controlled X whose control pattern matches the pair,
then undoes the alignment; the net effect touches only u and v, so sparse
permutations stay cheap.  Multi-controlled X gates decompose into a ladder
of the temporary products above.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .circuit import (
    Circuit,
    CircuitError,
    Gate,
    Register,
    StaticResources,
    static_resources,
)
from .curve import (
    INFINITY,
    CurvePoint,
    CurveParams,
    enumerate_points,
    is_on_curve,
    point_add,
    scalar_mul,
)

__all__ = [
    "BuildReport",
    "build_temp_and",
    "build_adder",
    "build_mod_add_const",
    "build_lookup",
    "build_pointadd_permutation",
    "build_windowed_pointadd",
    "mutate",
    "encode_point",
    "decode_point",
    "MAX_ADDER_WIDTH",
    "MAX_LOOKUP_WINDOW",
    "MAX_MOD_ADD_WIDTH",
    "MAX_POINT_WINDOW",
]

MAX_ADDER_WIDTH = 16
MAX_LOOKUP_WINDOW = 8
MAX_MOD_ADD_WIDTH = 12
MAX_POINT_WINDOW = 4


@dataclass(frozen=True)
class BuildReport:
    """A built circuit plus the builder's own resource prediction.

    The prediction must match a recount exactly.  For windowed point
    addition the non-Clifford cost of the address-decoding tree is surfaced
    separately in lookup_overhead_non_clifford, mirroring how per-window
    lookup overhead enters the whole-derivation cost formulas.
    """

    circuit: Circuit
    predicted: StaticResources
    construction: str
    lookup_overhead_non_clifford: int | None = None

    def __post_init__(self) -> None:
        actual = static_resources(self.circuit)
        if actual != self.predicted:
            raise CircuitError(
                f"builder {self.construction!r} predicted {self.predicted}, "
                f"emitted {actual}"
            )

    def sidecar_dict(self) -> dict:
        data: dict = {
            "construction": self.construction,
            "predicted": self.predicted.as_dict(),
        }
        if self.lookup_overhead_non_clifford is not None:
            data["lookup_overhead_non_clifford"] = self.lookup_overhead_non_clifford
        return data


class _Emitter:
    """Accumulates gates; allocates ancilla qubits (LIFO reuse) and classical
    bits.  qubit watermark == peak circuit width."""

    def __init__(self, fixed_qubits: int):
        self.gates: list[Gate] = []
        self.cbits = 0
        self.watermark = fixed_qubits
        self._free: list[int] = []

    def alloc(self) -> int:
        if self._free:
            return self._free.pop()
        q = self.watermark
        self.watermark += 1
        return q

    def release(self, q: int) -> None:
        self._free.append(q)

    def emit(self, kind: str, *qubits: int, cond: tuple[int, int] | None = None) -> None:
        self.gates.append(Gate(kind, tuple(qubits), condition=cond))

    def measure(self, qubit: int) -> int:
        cb = self.cbits
        self.cbits += 1
        self.gates.append(Gate("MX", (qubit,), cbit=cb))
        return cb

    def temp_and(self, a: int, b: int) -> int:
        """Fresh ancilla holding a AND b (one CCX)."""
        t = self.alloc()
        self.emit("CCX", a, b, t)
        return t

    def drop_temp_and(self, t: int, a: int, b: int) -> None:
        """Measure the product away; conditioned CZ cancels the kickback."""
        cb = self.measure(t)
        self.emit("CZ", a, b, cond=(cb, 1))
        self.release(t)

    def mcx(self, controls: Sequence[int], target: int) -> None:
        """Multi-controlled X via a ladder of measured-away temporary products."""
        cs = list(controls)
        if len(cs) == 0:
            self.emit("X", target)
        elif len(cs) == 1:
            self.emit("CX", cs[0], target)
        elif len(cs) == 2:
            self.emit("CCX", cs[0], cs[1], target)
        else:
            ladder: list[tuple[int, int, int]] = []
            head = cs[0]
            for c in cs[1:]:
                t = self.temp_and(head, c)
                ladder.append((t, head, c))
                head = t
            self.emit("CX", head, target)
            for t, a, b in reversed(ladder):
                self.drop_temp_and(t, a, b)

    def transpose(
        self,
        u: int,
        v: int,
        data: Sequence[int],
        extra_control: int | None = None,
    ) -> None:
        """Swap basis states u and v of the data qubits; fix everything else.

        With an extra control, the swap happens only when that qubit is 1
        (the alignment conjugation cancels itself on the 0 branch)."""
        if u == v:
            return
        width = len(data)
        diff = u ^ v
        pivot = (diff & -diff).bit_length() - 1
        if (u >> pivot) & 1:
            u, v = v, u
        align = [i for i in range(width) if (diff >> i) & 1 and i != pivot]
        for i in align:
            self.emit("CX", data[pivot], data[i])
        flips = [i for i in range(width) if i != pivot and not (u >> i) & 1]
        for i in flips:
            self.emit("X", data[i])
        controls = [data[i] for i in range(width) if i != pivot]
        if extra_control is not None:
            controls.append(extra_control)
        self.mcx(controls, data[pivot])
        for i in reversed(flips):
            self.emit("X", data[i])
        for i in reversed(align):
            self.emit("CX", data[pivot], data[i])

    def synth_permutation(
        self,
        perm: Mapping[int, int],
        data: Sequence[int],
        extra_control: int | None = None,
    ) -> None:
        """Realize a sparse permutation of basis states of the data qubits.

        perm maps moved states to their images; any state absent from the
        mapping is a fixed point.  Each cycle becomes a chain of
        transpositions applied last-to-first."""
        size = 1 << len(data)
        moved = {k: v for k, v in perm.items() if k != v}
        for k, v in moved.items():
            if not (0 <= k < size and 0 <= v < size):
                raise CircuitError(f"permutation entry {k}->{v} outside {len(data)} bits")
        if sorted(moved) != sorted(moved.values()):
            raise CircuitError("mapping is not a permutation (moved set not closed)")
        seen: set[int] = set()
        for start in sorted(moved):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = moved[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = moved[nxt]
            for i in range(len(cycle) - 2, -1, -1):
                self.transpose(cycle[i], cycle[i + 1], data, extra_control)


# ---------------------------------------------------------------------------
# point encoding shared by the curve builders and the harness


def encode_point(point: CurvePoint, coordinate_bits: int) -> int:
    """Pack a point into 2*coordinate_bits little-endian bits, x low.

    The identity is the all-ones pair, which is never a field element as
    long as p < 2^coordinate_bits - 1."""
    ones = (1 << coordinate_bits) - 1
    if point.is_infinity:
        return ones | (ones << coordinate_bits)
    return point.x | (point.y << coordinate_bits)


def decode_point(value: int, coordinate_bits: int) -> CurvePoint:
    ones = (1 << coordinate_bits) - 1
    x = value & ones
    y = (value >> coordinate_bits) & ones
    if x == ones and y == ones:
        return INFINITY
    return CurvePoint(x, y)


def _check_identity_encoding(curve: CurveParams) -> None:
    if curve.p == (1 << curve.coordinate_bits) - 1:
        raise CircuitError(
            f"p={curve.p} fills its bit width; no spare encoding remains "
            "for the identity point"
        )


# ---------------------------------------------------------------------------
# builders


def build_temp_and() -> BuildReport:
    """The three-gate temporary-product gadget on qubits (a, b, t).

    Computes t = a AND b, then measures it away; the conditioned CZ leaves
    both inputs and the phase untouched on every branch."""
    em = _Emitter(3)
    em.emit("CCX", 0, 1, 2)
    em.drop_temp_and(2, 0, 1)
    regs = (Register("a", 0, 0), Register("b", 1, 1))
    circuit = Circuit(
        qubit_count=3,
        classical_bit_count=em.cbits,
        inputs=regs,
        outputs=regs,
        gates=tuple(em.gates),
        metadata={"construction": "temp_and", "exceptional": "correct"},
    )
    return BuildReport(
        circuit=circuit,
        predicted=StaticResources(3, 3, 1, 1),
        construction="temp_and",
    )


def build_adder(width: int) -> BuildReport:
    """In-place adder: |a, b> -> |a, (a + b) mod 2^width>.

    Ripple-carry where each carry is a temporary product (one CCX on the
    compute path, measured away on the return path), so the non-Clifford
    count is width - 1.  Overflow wraps.  width = 1 degenerates to one CX
    and no measurements."""
    if not 1 <= width <= MAX_ADDER_WIDTH:
        raise ValueError(f"adder width must be in 1..{MAX_ADDER_WIDTH}, got {width}")
    m = width
    a = list(range(m))
    b = list(range(m, 2 * m))
    em = _Emitter(2 * m)
    if m == 1:
        em.emit("CX", a[0], b[0])
        predicted = StaticResources(2, 1, 0, 0)
    else:
        carry = [em.alloc() for _ in range(m - 1)]
        em.emit("CCX", a[0], b[0], carry[0])
        for i in range(1, m - 1):
            em.emit("CX", carry[i - 1], a[i])
            em.emit("CX", carry[i - 1], b[i])
            em.emit("CCX", a[i], b[i], carry[i])
            em.emit("CX", carry[i - 1], carry[i])
        em.emit("CX", carry[m - 2], b[m - 1])
        em.emit("CX", a[m - 1], b[m - 1])
        for i in range(m - 2, 0, -1):
            em.emit("CX", carry[i - 1], carry[i])
            cb = em.measure(carry[i])
            em.emit("CZ", a[i], b[i], cond=(cb, 1))
            em.emit("CX", carry[i - 1], a[i])
            em.emit("CX", a[i], b[i])
        cb = em.measure(carry[0])
        em.emit("CZ", a[0], b[0], cond=(cb, 1))
        em.emit("CX", a[0], b[0])
        predicted = StaticResources(3 * m - 1, 9 * m - 12, m - 1, m - 1)
    regs = (Register("a", 0, m - 1), Register("b", m, 2 * m - 1))
    circuit = Circuit(
        qubit_count=em.watermark,
        classical_bit_count=em.cbits,
        inputs=regs,
        outputs=regs,
        gates=tuple(em.gates),
        metadata={
            "construction": "adder",
            "width": str(m),
            "exceptional": "wraps",
        },
    )
    return BuildReport(circuit=circuit, predicted=predicted, construction="adder")


def build_mod_add_const(width: int, constant: int, modulus: int) -> BuildReport:
    """|x> -> |(x + constant) mod modulus> for x < modulus, x unchanged above.

    Synthesized directly as a sparse permutation of the width-bit space;
    states x >= modulus are fixed points, recorded as exceptional inputs
    with undefined-by-contract behavior."""
    if not 1 <= width <= MAX_MOD_ADD_WIDTH:
        raise ValueError(
            f"mod-add width must be in 1..{MAX_MOD_ADD_WIDTH}, got {width}"
        )
    if not 1 <= modulus < (1 << width):
        raise ValueError(f"modulus must be in 1..2^width-1, got {modulus}")
    if not 0 <= constant < modulus:
        raise ValueError(f"constant must be in 0..modulus-1, got {constant}")
    data = list(range(width))
    em = _Emitter(width)
    perm = {x: (x + constant) % modulus for x in range(modulus)}
    em.synth_permutation(perm, data)
    regs = (Register("x", 0, width - 1),)
    circuit = Circuit(
        qubit_count=em.watermark,
        classical_bit_count=em.cbits,
        inputs=regs,
        outputs=regs,
        gates=tuple(em.gates),
        metadata={
            "construction": "mod_add_const",
            "width": str(width),
            "modulus": str(modulus),
            "constant": str(constant),
            "exceptional": "undefined",
        },
    )
    return BuildReport(
        circuit=circuit,
        predicted=static_resources(circuit),
        construction="mod_add_const",
    )


def _iterate_addresses(em: _Emitter, address: Sequence[int], apply_leaf) -> None:
    """Walk all values of the address register MSB-first.

    apply_leaf(control_qubit, index) is invoked once per address value with a
    qubit asserting "address == index".  Internal tree nodes compute their
    child indicator as a temporary product and measure it away afterwards;
    the root level reuses the top address bit itself (X-conjugated for the 0
    branch), which is why the tree costs 2^w - 2 CCX gates, not 2^w - 1."""
    w = len(address)

    def node(ctrl: int, depth: int, prefix: int) -> None:
        if depth == w:
            apply_leaf(ctrl, prefix)
            return
        bit = address[w - 1 - depth]
        t = em.alloc()
        em.emit("X", bit)
        em.emit("CCX", ctrl, bit, t)
        em.emit("X", bit)
        node(t, depth + 1, prefix << 1)
        em.emit("CX", ctrl, t)
        node(t, depth + 1, (prefix << 1) | 1)
        em.drop_temp_and(t, ctrl, bit)

    msb = address[w - 1]
    em.emit("X", msb)
    if w == 1:
        apply_leaf(msb, 0)
        em.emit("X", msb)
        apply_leaf(msb, 1)
    else:
        node(msb, 1, 0)
        em.emit("X", msb)
        node(msb, 1, 1)


def build_lookup(
    table: Sequence[int], window: int | None = None, entry_bits: int | None = None
) -> BuildReport:
    """Table read: |k>|0> -> |k>|table[k]>.

    Walks the address space with the iteration tree above and copies each
    entry's bits into the value register under the leaf indicator.  Costs
    exactly 2^w - 2 CCX; a 1-bit window is a single (conjugated) controlled
    copy with no CCX at all."""
    if window is None:
        window = (len(table) - 1).bit_length() if len(table) > 1 else 1
    if not 1 <= window <= MAX_LOOKUP_WINDOW:
        raise ValueError(f"window must be in 1..{MAX_LOOKUP_WINDOW}, got {window}")
    if len(table) != 1 << window:
        raise ValueError(
            f"table length {len(table)} does not match window {window} "
            f"(need {1 << window})"
        )
    if any(v < 0 for v in table):
        raise ValueError("table entries must be non-negative")
    if entry_bits is None:
        entry_bits = max(1, max(table).bit_length())
    if max(table).bit_length() > entry_bits:
        raise ValueError(f"table entries do not fit in {entry_bits} bit(s)")
    address = list(range(window))
    value = list(range(window, window + entry_bits))
    em = _Emitter(window + entry_bits)

    def leaf(ctrl: int, index: int) -> None:
        for j in range(entry_bits):
            if (table[index] >> j) & 1:
                em.emit("CX", ctrl, value[j])

    _iterate_addresses(em, address, leaf)
    expected_nc = (1 << window) - 2 if window >= 2 else 0
    circuit = Circuit(
        qubit_count=em.watermark,
        classical_bit_count=em.cbits,
        inputs=(Register("k", 0, window - 1),),
        outputs=(
            Register("k", 0, window - 1),
            Register("v", window, window + entry_bits - 1),
        ),
        gates=tuple(em.gates),
        metadata={
            "construction": "lookup",
            "window": str(window),
            "entry_bits": str(entry_bits),
            "exceptional": "correct",
        },
    )
    predicted = static_resources(circuit)
    if predicted.non_clifford_gate_count != expected_nc:
        raise CircuitError(
            f"lookup tree emitted {predicted.non_clifford_gate_count} CCX, "
            f"expected {expected_nc}"
        )
    return BuildReport(circuit=circuit, predicted=predicted, construction="lookup")


def _pointadd_mapping(curve: CurveParams, base: CurvePoint) -> dict[int, int]:
    nb = curve.coordinate_bits
    mapping: dict[int, int] = {}
    for q in enumerate_points(curve):
        mapping[encode_point(q, nb)] = encode_point(point_add(q, base, curve), nb)
    return mapping


def build_pointadd_permutation(curve: CurveParams, base: CurvePoint) -> BuildReport:
    """Fixed-point curve addition |Q> -> |Q + base> as a basis permutation.

    The table covers every on-curve Q including the identity (all-ones
    encoding), so identity, inverse and doubling inputs are all handled;
    off-curve encodings are fixed points.  Adding the identity yields an
    empty circuit.  Requires an enumerable curve."""
    if not is_on_curve(base, curve):
        raise ValueError(f"base point {base} is not on curve {curve.name}")
    _check_identity_encoding(curve)
    nb = curve.coordinate_bits
    data = list(range(2 * nb))
    em = _Emitter(2 * nb)
    em.synth_permutation(_pointadd_mapping(curve, base), data)
    regs = (Register("qx", 0, nb - 1), Register("qy", nb, 2 * nb - 1))
    metadata = {
        "construction": "permutation_pointadd",
        "curve": curve.name,
        "coordinate_bits": str(nb),
        "base": "inf" if base.is_infinity else f"{base.x},{base.y}",
        "encoding": "xy-allones-identity",
        "exceptional": "correct",
    }
    circuit = Circuit(
        qubit_count=max(em.watermark, 2 * nb),
        classical_bit_count=em.cbits,
        inputs=regs,
        outputs=regs,
        gates=tuple(em.gates),
        metadata=metadata,
    )
    return BuildReport(
        circuit=circuit,
        predicted=static_resources(circuit),
        construction="permutation_pointadd",
    )


def build_windowed_pointadd(
    curve: CurveParams, base: CurvePoint, window: int
) -> BuildReport:
    """Windowed curve addition |k>|Q> -> |k>|Q + k*base>.

    Composes the address-iteration tree with one fixed-point addition
    permutation per window value: leaf k applies the |Q> -> |Q + k*base>
    chain under the leaf indicator.  Window value 0 has table entry identity
    and contributes no gates.  The tree's 2^w - 2 CCX cost is surfaced as
    lookup overhead in the report."""
    if not 1 <= window <= MAX_POINT_WINDOW:
        raise ValueError(f"window must be in 1..{MAX_POINT_WINDOW}, got {window}")
    if not is_on_curve(base, curve):
        raise ValueError(f"base point {base} is not on curve {curve.name}")
    _check_identity_encoding(curve)
    nb = curve.coordinate_bits
    address = list(range(window))
    data = list(range(window, window + 2 * nb))
    em = _Emitter(window + 2 * nb)
    tables = {
        k: _pointadd_mapping(curve, scalar_mul(k, base, curve))
        for k in range(1 << window)
    }

    def leaf(ctrl: int, index: int) -> None:
        em.synth_permutation(tables[index], data, extra_control=ctrl)

    _iterate_addresses(em, address, leaf)
    overhead = (1 << window) - 2 if window >= 2 else 0
    regs = (
        Register("k", 0, window - 1),
        Register("qx", window, window + nb - 1),
        Register("qy", window + nb, window + 2 * nb - 1),
    )
    metadata = {
        "construction": "windowed_pointadd",
        "curve": curve.name,
        "coordinate_bits": str(nb),
        "window": str(window),
        "base": "inf" if base.is_infinity else f"{base.x},{base.y}",
        "encoding": "xy-allones-identity",
        "exceptional": "correct",
    }
    circuit = Circuit(
        qubit_count=max(em.watermark, window + 2 * nb),
        classical_bit_count=em.cbits,
        inputs=regs,
        outputs=regs,
        gates=tuple(em.gates),
        metadata=metadata,
    )
    return BuildReport(
        circuit=circuit,
        predicted=static_resources(circuit),
        construction="windowed_pointadd",
        lookup_overhead_non_clifford=overhead,
    )


# ---------------------------------------------------------------------------
# mutation


def mutate(circuit: Circuit, seed: int) -> Circuit:
    """One deterministic structural edit, chosen by seed.

    Picks among: retargeting one operand of a gate to a different qubit,
    dropping a gate (never a measurement some condition depends on), or
    flipping the required value of a conditioned gate.  The result is always
    structurally valid; it is *intended* to be functionally wrong, which the
    verification harness should then catch."""
    rng = random.Random(seed)
    gates = list(circuit.gates)
    if not gates:
        raise ValueError("circuit has no gates to mutate")
    depended_cbits = {g.condition[0] for g in gates if g.condition is not None}

    retarget_sites = [
        i for i, g in enumerate(gates) if circuit.qubit_count > len(g.qubits)
    ]
    drop_sites = [
        i
        for i, g in enumerate(gates)
        if g.kind != "MX" or g.cbit not in depended_cbits
    ]
    toggle_sites = [i for i, g in enumerate(gates) if g.condition is not None]

    choices = []
    if retarget_sites:
        choices.append("retarget")
    if drop_sites:
        choices.append("drop")
    if toggle_sites:
        choices.append("toggle")
    if not choices:
        raise ValueError("circuit has no mutable structure")
    kind = choices[rng.randrange(len(choices))]

    if kind == "retarget":
        i = retarget_sites[rng.randrange(len(retarget_sites))]
        gate = gates[i]
        pos = rng.randrange(len(gate.qubits))
        candidates = [
            q for q in range(circuit.qubit_count) if q not in gate.qubits
        ]
        new_q = candidates[rng.randrange(len(candidates))]
        qubits = list(gate.qubits)
        qubits[pos] = new_q
        gates[i] = Gate(gate.kind, tuple(qubits), cbit=gate.cbit, condition=gate.condition)
    elif kind == "drop":
        i = drop_sites[rng.randrange(len(drop_sites))]
        del gates[i]
    else:
        i = toggle_sites[rng.randrange(len(toggle_sites))]
        gate = gates[i]
        cb, val = gate.condition
        gates[i] = Gate(gate.kind, gate.qubits, cbit=gate.cbit, condition=(cb, 1 - val))
    return replace(circuit, gates=tuple(gates))
