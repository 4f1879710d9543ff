"""Deterministic propagation of a Pauli error to the classical bits it flips.

A Pauli fault is pushed forward through the rest of the circuit: Clifford
gates conjugate it exactly; Pauli-rotation gates (rz/rx/ry/rzz/rxx/ryy at
generic angles, t/tdg) leave it unchanged, which is exact whenever the
rotation generator cannot itself flip any downstream measurement parity (the
case for Iceberg-encoded circuits, where every logical generator commutes
with both stabilizers and touches syndrome ancillas an even number of times).
A Z-basis measurement flips its clbit iff the propagated error has an X
component on the measured qubit; reset discards the error on that qubit.
"""
from __future__ import annotations

from .circuit import Circuit, Instruction
from .clifford import _conj_named, clifford_gate_sequence, is_clifford
from .pauli import PauliString

_ROTATION_LIKE = frozenset(("rz", "rx", "ry", "rzz", "rxx", "ryy", "t", "tdg"))


def propagate_flips(
    instructions: list[Instruction],
    start: int,
    error: PauliString,
) -> set[int]:
    """Clbits whose recorded outcome flips when `error` strikes just before
    instruction index `start`."""
    p = error
    flips: set[int] = set()
    for inst in instructions[start:]:
        name = inst.name
        if name == "barrier":
            continue
        if name == "measure":
            q = inst.qubits[0]
            if (p.x >> q) & 1:
                flips.symmetric_difference_update(inst.clbits)
            continue
        if name == "reset":
            q = inst.qubits[0]
            mask = ~(1 << q)
            p = PauliString(p.n, p.x & mask, p.z & mask, p.phase)
            continue
        if is_clifford(inst):
            for gname, qubits in clifford_gate_sequence(inst):
                p = _conj_named(p, gname, qubits)
            continue
        if name in _ROTATION_LIKE:
            continue
        raise ValueError(f"cannot propagate an error through gate {name!r}")
    return flips
