"""Gate IR, transpiler and statevector emulator."""

from .emulator import (
    Populations,
    ShotHistogram,
    exact_populations,
    read_histogram,
    retrieve_populations,
    run_statevector,
    sample_shots,
    write_histogram,
)
from .gates import (
    CX,
    RZ,
    SX,
    SX_MATRIX,
    Gate,
    GateSequence,
    cx_matrix,
    equal_up_to_phase,
    format_circuit,
    parse_circuit,
    read_circuit,
    reconstruct,
    rz_matrix,
    write_circuit,
)
from .transpile import transpile, two_level_decompose

__all__ = [
    "CX",
    "RZ",
    "SX",
    "SX_MATRIX",
    "Gate",
    "GateSequence",
    "Populations",
    "ShotHistogram",
    "cx_matrix",
    "equal_up_to_phase",
    "exact_populations",
    "format_circuit",
    "parse_circuit",
    "read_circuit",
    "read_histogram",
    "reconstruct",
    "retrieve_populations",
    "run_statevector",
    "rz_matrix",
    "sample_shots",
    "transpile",
    "two_level_decompose",
    "write_circuit",
    "write_histogram",
]
