"""Measurement-assisted reversible circuits, end to end: finite-field curve
arithmetic, a text circuit format, a phase-tracking simulator, circuit
builders with predicted resource counts, a hash-seeded verification
harness, and attack-cost calculators.
"""

from .circuit import (
    Circuit,
    CircuitError,
    Gate,
    ParseError,
    Register,
    StaticResources,
    parse,
    serialize,
    static_resources,
)
from .curve import (
    CurveParams,
    CurvePoint,
    FieldElement,
    INFINITY,
    enumerate_points,
    is_on_curve,
    named_curve,
    point_add,
    point_neg,
    registry_names,
    scalar_mul,
)
from .sim import (
    BranchInvariant,
    RngExhausted,
    RunResult,
    check_phase_all_branches,
    run,
    run_all_measurement_branches,
)
from .builders import (
    BuildReport,
    build_adder,
    build_lookup,
    build_mod_add_const,
    build_pointadd_permutation,
    build_temp_and,
    build_windowed_pointadd,
    decode_point,
    encode_point,
    mutate,
)
from .harness import (
    HarnessError,
    Transcript,
    VerificationReport,
    VerificationSpec,
    achieved_security_bits,
    commit,
    derive_tests,
    required_test_count,
    spec_for_circuit,
    verify,
    verify_exhaustive,
)
from .costmodel import (
    AttackScenario,
    MachineProfile,
    PointAddCost,
    WalletRecord,
    ecdlp_qubits,
    ecdlp_toffoli,
    magic_limited_key_time,
    multi_machine_speedup,
    onspend_success,
    optimal_window,
    primed_attack_time,
    runtime,
    salvage_timeline,
    t_factory_qubits,
    t_production_rate,
    windowed_addition_count,
)

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CircuitError",
    "Gate",
    "ParseError",
    "Register",
    "StaticResources",
    "parse",
    "serialize",
    "static_resources",
    "CurveParams",
    "CurvePoint",
    "FieldElement",
    "INFINITY",
    "enumerate_points",
    "is_on_curve",
    "named_curve",
    "point_add",
    "point_neg",
    "registry_names",
    "scalar_mul",
    "BranchInvariant",
    "RngExhausted",
    "RunResult",
    "check_phase_all_branches",
    "run",
    "run_all_measurement_branches",
    "BuildReport",
    "build_adder",
    "build_lookup",
    "build_mod_add_const",
    "build_pointadd_permutation",
    "build_temp_and",
    "build_windowed_pointadd",
    "decode_point",
    "encode_point",
    "mutate",
    "HarnessError",
    "Transcript",
    "VerificationReport",
    "VerificationSpec",
    "achieved_security_bits",
    "commit",
    "derive_tests",
    "required_test_count",
    "spec_for_circuit",
    "verify",
    "verify_exhaustive",
    "AttackScenario",
    "MachineProfile",
    "PointAddCost",
    "WalletRecord",
    "ecdlp_qubits",
    "ecdlp_toffoli",
    "magic_limited_key_time",
    "multi_machine_speedup",
    "onspend_success",
    "optimal_window",
    "primed_attack_time",
    "runtime",
    "salvage_timeline",
    "t_factory_qubits",
    "t_production_rate",
    "windowed_addition_count",
    "__version__",
]
