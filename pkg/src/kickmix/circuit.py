"""Circuit representation and the `.kmx` text format.

A circuit is a straight-line sequence over the gate set

* permutation gates  X, CX, CCX   (controls first, target last),
* diagonal gates     Z, CZ, CCZ   (phase flip when every operand bit is 1),
* measurement        MX           (X-basis readout into a classical bit),

where any unitary gate may be conditioned on a classical bit previously
written by a measurement.  Measurements themselves can never be conditioned.

Text format
-----------

Header lines, then one gate per line::

    qubits 3
    cbits 1
    meta construction temp_and
    in a 0..0
    in b 1..1
    out a 0..0
    out b 1..1
    CCX 0 1 2
    MX 2 -> c0
    IF c0 CZ 0 1

* ``qubits N`` must come first; ``cbits M`` is optional and defaults to 0.
* ``meta key value`` attaches free-form metadata (value runs to end of line).
* ``in``/``out`` declare named registers covering the inclusive qubit range
  ``lo..hi``; the qubit at ``lo`` is the least significant bit.
* A gate line is ``[IF c<k>[=0|=1] ] OPCODE q ...``; a bare ``IF c<k>`` means
  ``=1``.  MX lines end with ``-> c<k>`` naming the destination bit.
* Blank lines and full-line ``#`` comments are accepted by the parser.

The canonical form produced by :func:`serialize` is byte-exact: header order
``qubits``, ``cbits``, ``meta`` (sorted by key), ``in`` then ``out`` lines in
declaration order, gates one per line, single spaces, ``IF c<k>`` spelled
without ``=1``, no comments or blank lines, and a trailing newline.
``parse(serialize(c))`` reproduces ``c`` exactly.

Structural rules enforced on every circuit:

* gate operands are distinct, in-range qubit indices;
* each classical bit is written by at most one MX;
* a condition may only reference a classical bit that an earlier MX wrote;
* register ranges are in bounds and disjoint within the input spec and
  within the output spec (an input register may also be an output);
* the ``exceptional`` metadata key, when present, is one of ``undefined``,
  ``correct`` or ``wraps`` (how the circuit treats exceptional inputs such
  as the identity or a doubling for point arithmetic).

MX resets the measured qubit to 0, so circuits may reuse the qubit index
afterwards; ``qubit_count`` is the peak width.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

__all__ = [
    "GATE_KINDS",
    "PERMUTATION_KINDS",
    "DIAGONAL_KINDS",
    "NON_CLIFFORD_KINDS",
    "EXCEPTIONAL_POLICIES",
    "CircuitError",
    "ParseError",
    "Gate",
    "Register",
    "Circuit",
    "StaticResources",
    "parse",
    "serialize",
    "static_resources",
]

PERMUTATION_KINDS = ("X", "CX", "CCX")
DIAGONAL_KINDS = ("Z", "CZ", "CCZ")
GATE_KINDS = PERMUTATION_KINDS + DIAGONAL_KINDS + ("MX",)
NON_CLIFFORD_KINDS = ("CCX", "CCZ")
EXCEPTIONAL_POLICIES = ("undefined", "correct", "wraps")

_ARITY = {"X": 1, "CX": 2, "CCX": 3, "Z": 1, "CZ": 2, "CCZ": 3, "MX": 1}


class CircuitError(ValueError):
    """A structurally invalid circuit."""


class ParseError(CircuitError):
    """Parse or validation failure in `.kmx` text, with 1-based position."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Gate:
    """One gate: kind, qubit operands (controls first, target last for the
    permutation kinds), MX destination bit, and an optional classical
    condition (cbit index, required value)."""

    kind: str
    qubits: tuple[int, ...]
    cbit: int | None = None
    condition: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != _ARITY[self.kind]:
            raise CircuitError(
                f"{self.kind} takes {_ARITY[self.kind]} qubit operand(s), "
                f"got {len(self.qubits)}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"duplicate operand in {self.kind} {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError("negative qubit index")
        if self.kind == "MX":
            if self.cbit is None:
                raise CircuitError("MX requires a destination classical bit")
            if self.condition is not None:
                raise CircuitError("measurements cannot be conditioned")
        elif self.cbit is not None:
            raise CircuitError(f"{self.kind} does not write a classical bit")
        if self.condition is not None:
            cb, val = self.condition
            if cb < 0 or val not in (0, 1):
                raise CircuitError(f"bad condition {self.condition}")

    @property
    def is_diagonal(self) -> bool:
        return self.kind in DIAGONAL_KINDS

    @property
    def is_non_clifford(self) -> bool:
        return self.kind in NON_CLIFFORD_KINDS


@dataclass(frozen=True)
class Register:
    """A named inclusive qubit range lo..hi; lo is the least significant bit."""

    name: str
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not self.name or not self.name.replace("_", "").isalnum():
            raise CircuitError(f"bad register name {self.name!r}")
        if self.lo < 0 or self.hi < self.lo:
            raise CircuitError(f"bad register range {self.lo}..{self.hi}")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    @property
    def qubits(self) -> range:
        return range(self.lo, self.hi + 1)


@dataclass(frozen=True)
class StaticResources:
    """Whole-circuit static counts.  non_clifford counts CCX and CCZ gates."""

    qubit_count: int
    total_gate_count: int
    non_clifford_gate_count: int
    measurement_count: int

    def as_dict(self) -> dict[str, int]:
        return {
            "qubit_count": self.qubit_count,
            "total_gate_count": self.total_gate_count,
            "non_clifford_gate_count": self.non_clifford_gate_count,
            "measurement_count": self.measurement_count,
        }


@dataclass
class Circuit:
    """A validated kickmix circuit.  Treat instances as immutable; derive
    modified copies with ``dataclasses.replace`` (which re-validates)."""

    qubit_count: int
    classical_bit_count: int = 0
    inputs: tuple[Register, ...] = ()
    outputs: tuple[Register, ...] = ()
    gates: tuple[Gate, ...] = ()
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.inputs = tuple(self.inputs)
        self.outputs = tuple(self.outputs)
        self.gates = tuple(self.gates)
        self.validate()

    def validate(self) -> None:
        if self.qubit_count < 0 or self.classical_bit_count < 0:
            raise CircuitError("negative qubit or classical bit count")
        for spec_name, regs in (("in", self.inputs), ("out", self.outputs)):
            seen_names: set[str] = set()
            used: set[int] = set()
            for reg in regs:
                if reg.name in seen_names:
                    raise CircuitError(f"duplicate {spec_name} register {reg.name!r}")
                seen_names.add(reg.name)
                if reg.hi >= self.qubit_count:
                    raise CircuitError(
                        f"{spec_name} register {reg.name!r} range {reg.lo}..{reg.hi} "
                        f"exceeds qubit count {self.qubit_count}"
                    )
                overlap = used.intersection(reg.qubits)
                if overlap:
                    raise CircuitError(
                        f"{spec_name} register {reg.name!r} overlaps qubit "
                        f"{min(overlap)} already covered by another {spec_name} register"
                    )
                used.update(reg.qubits)
        written: set[int] = set()
        for i, gate in enumerate(self.gates):
            for q in gate.qubits:
                if q >= self.qubit_count:
                    raise CircuitError(
                        f"gate {i} ({gate.kind}) uses qubit {q} "
                        f"but the circuit has {self.qubit_count}"
                    )
            if gate.condition is not None:
                cb, _ = gate.condition
                if cb >= self.classical_bit_count:
                    raise CircuitError(
                        f"gate {i} conditions on c{cb} but the circuit has "
                        f"{self.classical_bit_count} classical bit(s)"
                    )
                if cb not in written:
                    raise CircuitError(
                        f"gate {i} conditions on c{cb} before any measurement writes it"
                    )
            if gate.kind == "MX":
                if gate.cbit >= self.classical_bit_count:
                    raise CircuitError(
                        f"gate {i} writes c{gate.cbit} but the circuit has "
                        f"{self.classical_bit_count} classical bit(s)"
                    )
                if gate.cbit in written:
                    raise CircuitError(f"classical bit c{gate.cbit} written twice")
                written.add(gate.cbit)
        for key, value in self.metadata.items():
            if not key or any(ch.isspace() for ch in key):
                raise CircuitError(f"bad metadata key {key!r}")
            if value != value.strip() or "\n" in value or value == "":
                raise CircuitError(f"bad metadata value for {key!r}: {value!r}")
        policy = self.metadata.get("exceptional")
        if policy is not None and policy not in EXCEPTIONAL_POLICIES:
            raise CircuitError(
                f"exceptional policy {policy!r} not in {EXCEPTIONAL_POLICIES}"
            )

    def input_register(self, name: str) -> Register:
        for reg in self.inputs:
            if reg.name == name:
                return reg
        raise KeyError(f"no input register {name!r}")

    def output_register(self, name: str) -> Register:
        for reg in self.outputs:
            if reg.name == name:
                return reg
        raise KeyError(f"no output register {name!r}")


def static_resources(circuit: Circuit) -> StaticResources:
    """Count peak qubits, gates, non-Clifford gates (CCX + CCZ) and measurements."""
    non_clifford = sum(1 for g in circuit.gates if g.is_non_clifford)
    measurements = sum(1 for g in circuit.gates if g.kind == "MX")
    return StaticResources(
        qubit_count=circuit.qubit_count,
        total_gate_count=len(circuit.gates),
        non_clifford_gate_count=non_clifford,
        measurement_count=measurements,
    )


# ---------------------------------------------------------------------------
# parsing


def _tokens(line: str) -> list[tuple[str, int]]:
    """Split on whitespace, keeping 1-based starting columns."""
    out = []
    col = 0
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        start = i
        while i < len(line) and not line[i].isspace():
            i += 1
        out.append((line[start:i], start + 1))
    return out


def _parse_int(tok: str, what: str, line: int, col: int) -> int:
    try:
        value = int(tok)
    except ValueError:
        raise ParseError(f"expected {what}, got {tok!r}", line, col) from None
    if value < 0:
        raise ParseError(f"{what} must be non-negative, got {tok}", line, col)
    return value


def _parse_cref(tok: str, line: int, col: int) -> int:
    if not tok.startswith("c") or not tok[1:].isdigit():
        raise ParseError(f"expected classical bit like c0, got {tok!r}", line, col)
    return int(tok[1:])


def parse(text: str | bytes) -> Circuit:
    """Parse `.kmx` text into a validated Circuit.

    Raises :class:`ParseError` carrying 1-based line/column on any syntax or
    structural problem.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    qubit_count: int | None = None
    classical_bit_count = 0
    saw_cbits = False
    inputs: list[Register] = []
    outputs: list[Register] = []
    gates: list[Gate] = []
    metadata: dict[str, str] = {}
    written: set[int] = set()
    in_body = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = _tokens(raw)
        head, head_col = toks[0]

        if head in ("qubits", "cbits", "meta", "in", "out"):
            if in_body:
                raise ParseError(f"header line {head!r} after gates", lineno, head_col)
            if head == "qubits":
                if qubit_count is not None:
                    raise ParseError("duplicate qubits line", lineno, head_col)
                if len(toks) != 2:
                    raise ParseError("usage: qubits N", lineno, head_col)
                qubit_count = _parse_int(toks[1][0], "qubit count", lineno, toks[1][1])
                continue
            if qubit_count is None:
                raise ParseError(
                    f"{head!r} before the qubits line", lineno, head_col
                )
            if head == "cbits":
                if saw_cbits:
                    raise ParseError("duplicate cbits line", lineno, head_col)
                if len(toks) != 2:
                    raise ParseError("usage: cbits M", lineno, head_col)
                classical_bit_count = _parse_int(
                    toks[1][0], "classical bit count", lineno, toks[1][1]
                )
                saw_cbits = True
            elif head == "meta":
                if len(toks) < 3:
                    raise ParseError("usage: meta key value", lineno, head_col)
                key = toks[1][0]
                value = raw[toks[2][1] - 1 :].strip()
                if key in metadata:
                    raise ParseError(f"duplicate metadata key {key!r}", lineno, toks[1][1])
                metadata[key] = value
            else:  # in / out
                if len(toks) != 3:
                    raise ParseError(f"usage: {head} name lo..hi", lineno, head_col)
                name, name_col = toks[1]
                rng, rng_col = toks[2]
                if ".." not in rng:
                    raise ParseError(f"expected lo..hi, got {rng!r}", lineno, rng_col)
                lo_s, hi_s = rng.split("..", 1)
                lo = _parse_int(lo_s, "register lo", lineno, rng_col)
                hi = _parse_int(hi_s, "register hi", lineno, rng_col)
                try:
                    reg = Register(name, lo, hi)
                except CircuitError as exc:
                    raise ParseError(str(exc), lineno, name_col) from None
                (inputs if head == "in" else outputs).append(reg)
            continue

        # gate line
        in_body = True
        if qubit_count is None:
            raise ParseError("gate before the qubits line", lineno, head_col)
        condition = None
        idx = 0
        if head == "IF":
            if len(toks) < 2:
                raise ParseError("IF needs a classical bit", lineno, head_col)
            ctok, ccol = toks[1]
            if "=" in ctok:
                cpart, vpart = ctok.split("=", 1)
                cb = _parse_cref(cpart, lineno, ccol)
                if vpart not in ("0", "1"):
                    raise ParseError(
                        f"condition value must be 0 or 1, got {vpart!r}", lineno, ccol
                    )
                condition = (cb, int(vpart))
            else:
                condition = (_parse_cref(ctok, lineno, ccol), 1)
            idx = 2
            if idx >= len(toks):
                raise ParseError("IF prefix without a gate", lineno, ccol)
        opcode, op_col = toks[idx]
        if opcode not in GATE_KINDS:
            raise ParseError(f"unknown opcode {opcode!r}", lineno, op_col)
        if opcode == "MX" and condition is not None:
            raise ParseError("measurements cannot be conditioned", lineno, head_col)
        rest = toks[idx + 1 :]
        dest: int | None = None
        if opcode == "MX":
            if len(rest) < 3 or rest[-2][0] != "->":
                raise ParseError("usage: MX q -> c<k>", lineno, op_col)
            dest = _parse_cref(rest[-1][0], lineno, rest[-1][1])
            rest = rest[:-2]
        elif any(tok == "->" for tok, _ in rest):
            raise ParseError(f"{opcode} does not write a classical bit", lineno, op_col)
        qubits = []
        for tok, col in rest:
            qubits.append(_parse_int(tok, "qubit index", lineno, col))
        try:
            gate = Gate(opcode, tuple(qubits), cbit=dest, condition=condition)
        except CircuitError as exc:
            raise ParseError(str(exc), lineno, op_col) from None
        # positioned structural checks (duplicated by Circuit.validate, but
        # here we can still point at the line)
        for q in gate.qubits:
            if q >= qubit_count:
                raise ParseError(
                    f"qubit {q} out of range (qubits {qubit_count})", lineno, op_col
                )
        if gate.condition is not None:
            cb = gate.condition[0]
            if cb >= classical_bit_count:
                raise ParseError(
                    f"classical bit c{cb} out of range (cbits {classical_bit_count})",
                    lineno,
                    head_col,
                )
            if cb not in written:
                raise ParseError(
                    f"condition on c{cb} before any measurement writes it",
                    lineno,
                    head_col,
                )
        if gate.kind == "MX":
            if gate.cbit >= classical_bit_count:
                raise ParseError(
                    f"classical bit c{gate.cbit} out of range "
                    f"(cbits {classical_bit_count})",
                    lineno,
                    op_col,
                )
            if gate.cbit in written:
                raise ParseError(
                    f"classical bit c{gate.cbit} written twice", lineno, op_col
                )
            written.add(gate.cbit)
        gates.append(gate)

    if qubit_count is None:
        raise ParseError("missing qubits line", 1, 1)
    try:
        return Circuit(
            qubit_count=qubit_count,
            classical_bit_count=classical_bit_count,
            inputs=tuple(inputs),
            outputs=tuple(outputs),
            gates=tuple(gates),
            metadata=metadata,
        )
    except CircuitError as exc:
        raise ParseError(str(exc), 1, 1) from None


# ---------------------------------------------------------------------------
# serialization


def _gate_line(gate: Gate) -> str:
    parts = []
    if gate.condition is not None:
        cb, val = gate.condition
        parts.append(f"IF c{cb}" if val == 1 else f"IF c{cb}=0")
    parts.append(gate.kind)
    parts.extend(str(q) for q in gate.qubits)
    if gate.kind == "MX":
        parts.append(f"-> c{gate.cbit}")
    return " ".join(parts)


def serialize(circuit: Circuit) -> bytes:
    """Canonical byte-exact `.kmx` form; see the module docstring for rules."""
    lines = [f"qubits {circuit.qubit_count}", f"cbits {circuit.classical_bit_count}"]
    for key in sorted(circuit.metadata):
        lines.append(f"meta {key} {circuit.metadata[key]}")
    for reg in circuit.inputs:
        lines.append(f"in {reg.name} {reg.lo}..{reg.hi}")
    for reg in circuit.outputs:
        lines.append(f"out {reg.name} {reg.lo}..{reg.hi}")
    for gate in circuit.gates:
        lines.append(_gate_line(gate))
    return ("\n".join(lines) + "\n").encode("utf-8")


def replace_gates(circuit: Circuit, gates: Iterable[Gate]) -> Circuit:
    """Copy of the circuit with a new gate list (re-validated)."""
    return replace(circuit, gates=tuple(gates))
