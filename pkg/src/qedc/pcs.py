"""Pauli check sandwiching: synthesize left/right check pairs for a Clifford
payload and rewrite the circuit into the sandwiched form.

For a payload unitary U and a left check L, the right check is R = U L U†
with its ±1 sign split out, so that R·U·L = sign·U and a noiseless X-basis
ancilla measures the expected bit (0 for +1, 1 for -1).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import Region
from .circuit import Circuit, Instruction, Register
from .clifford import CliffordTableau, conjugate, is_clifford, tableau_from_circuit
from .pauli import PauliString, single_qubit_pauli

ANCILLA_QREG = "anc_q"
ANCILLA_CREG = "anc"


class PcsError(Exception):
    pass


@dataclass
class CheckPair:
    left: PauliString   # over payload-local qubits, phase +1
    right: PauliString  # over payload-local qubits, phase +1
    sign: int           # ±1, split out of the conjugated right check
    ancilla: int = -1   # global qubit index, assigned at insertion

    @property
    def expected_bit(self) -> int:
        return 0 if self.sign == 1 else 1

    def to_dict(self) -> dict:
        return {
            "left": self.left.to_label(),
            "right": self.right.to_label(),
            "sign": self.sign,
            "ancilla": self.ancilla,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckPair":
        return cls(
            PauliString.from_label(d["left"]),
            PauliString.from_label(d["right"]),
            int(d["sign"]),
            int(d["ancilla"]),
        )


@dataclass
class PcsMeta:
    ancilla_register: str
    check_pairs: list[CheckPair]
    expected_ancilla_bits: str  # counts-key format: leftmost = highest check index
    payload_region: tuple[int, int]       # region in the input circuit
    payload_qubits: tuple[int, ...]       # global indices, ascending; local i = payload_qubits[i]
    payload_span: tuple[int, int] = (0, 0)  # payload position in the output circuit

    @property
    def num_checks(self) -> int:
        return len(self.check_pairs)

    def to_dict(self) -> dict:
        return {
            "code": "pcs",
            "ancilla_register": self.ancilla_register,
            "checks": [c.to_dict() for c in self.check_pairs],
            "expected_ancilla_bits": self.expected_ancilla_bits,
            "payload": list(self.payload_region),
            "payload_qubits": list(self.payload_qubits),
            "payload_span": list(self.payload_span),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PcsMeta":
        return cls(
            d["ancilla_register"],
            [CheckPair.from_dict(c) for c in d["checks"]],
            d["expected_ancilla_bits"],
            tuple(d["payload"]),
            tuple(d["payload_qubits"]),
            tuple(d.get("payload_span", (0, 0))),
        )


# -- synthesis ----------------------------------------------------------------

def _localize(instructions: list[Instruction], payload_qubits: tuple[int, ...]):
    remap = {g: i for i, g in enumerate(payload_qubits)}
    return [
        Instruction(inst.gate, tuple(remap[q] for q in inst.qubits), inst.clbits)
        for inst in instructions
        if inst.name != "barrier"
    ]


def _candidate_lefts(k: int) -> list[PauliString]:
    """All weight-1 and weight-2 Paulis over k qubits, lexicographic by label."""
    cands = []
    for q in range(k):
        for kind in "XYZ":
            cands.append(single_qubit_pauli(k, q, kind))
    for a in range(k):
        for b in range(a + 1, k):
            for ka in "XYZ":
                for kb in "XYZ":
                    pa = single_qubit_pauli(k, a, ka)
                    pb = single_qubit_pauli(k, b, kb)
                    cands.append(PauliString(k, pa.x | pb.x, pa.z | pb.z, 0))
    return sorted(cands, key=lambda p: p.to_label())


def _split_sign(r: PauliString) -> tuple[PauliString, int]:
    return r.bare(), r.sign


def synthesize_checks(
    payload: list[Instruction],
    payload_qubits,
    num_checks: int,
    strategy: str = "greedy-coverage",
    seed: int = 0,
) -> list[CheckPair]:
    """Pick `num_checks` check pairs for a Clifford payload.

    greedy-coverage scores a candidate left by how many (fault location,
    single-qubit Pauli) pairs inside the payload propagate to an error that
    anticommutes with the corresponding right check; pairs are chosen by
    marginal coverage with lexicographic tie-breaks on the left's label.
    """
    payload_qubits = tuple(sorted(payload_qubits))
    k = len(payload_qubits)
    if k == 0:
        raise PcsError("payload touches no qubits")
    if num_checks < 1:
        raise PcsError("num_checks must be >= 1")
    local = _localize(list(payload), payload_qubits)
    for inst in local:
        if inst.name in ("measure", "reset"):
            raise PcsError("payload may not contain measurements or resets")
        if not is_clifford(inst):
            raise PcsError(f"payload instruction {inst.name!r} is not Clifford")
    tab = tableau_from_circuit(local, k)

    if strategy == "random-z":
        rng = np.random.default_rng(seed)
        chosen: list[CheckPair] = []
        seen: set[int] = set()
        limit = (1 << k) - 1
        if num_checks > limit:
            raise PcsError(f"num_checks={num_checks} exceeds {limit} distinct Z-type checks")
        while len(chosen) < num_checks:
            z = int(rng.integers(1, 1 << k))
            if z in seen:
                continue
            seen.add(z)
            left = PauliString(k, 0, z, 0)
            right, sign = _split_sign(conjugate(tab, left))
            chosen.append(CheckPair(left, right, sign))
        return chosen

    if strategy != "greedy-coverage":
        raise PcsError(f"unknown synthesis strategy {strategy!r}")

    candidates = _candidate_lefts(k)
    if num_checks > len(candidates):
        raise PcsError(f"num_checks={num_checks} exceeds {len(candidates)} candidates")

    # suffix tableau after each fault location f (error after instruction f)
    g = len(local)
    suffix_tabs: list[CliffordTableau] = [CliffordTableau.identity(k)]
    for inst in reversed(local):
        prev = tableau_from_circuit([inst], k)
        suffix_tabs.append(prev.compose(suffix_tabs[-1]))
    suffix_tabs.reverse()  # suffix_tabs[f] = tableau of instructions f+1..g for f in 0..g-1

    faults: list[tuple[int, PauliString]] = []
    for f in range(g):
        for q in range(k):
            for kind in "XYZ":
                faults.append((f, conjugate(suffix_tabs[f + 1], single_qubit_pauli(k, q, kind))))

    scored = []
    for left in candidates:
        right, sign = _split_sign(conjugate(tab, left))
        covered = frozenset(
            i for i, (_, propagated) in enumerate(faults)
            if not propagated.commutes_with(right)
        )
        scored.append((left, right, sign, covered))

    chosen = []
    used_lefts: set[tuple[int, int]] = set()
    covered_total: set[int] = set()
    for _ in range(num_checks):
        best = None
        for left, right, sign, covered in scored:
            if (left.x, left.z) in used_lefts:
                continue
            marginal = len(covered - covered_total)
            key = (-marginal, left.to_label())
            if best is None or key < best[0]:
                best = (key, left, right, sign, covered)
        _, left, right, sign, covered = best
        used_lefts.add((left.x, left.z))
        covered_total |= covered
        chosen.append(CheckPair(left, right, sign))
    return chosen


# -- insertion ----------------------------------------------------------------

def _controlled_pauli(ancilla: int, p: PauliString, payload_qubits) -> list[tuple[str, tuple[int, ...]]]:
    """Controlled-P as one controlled factor per non-identity tensor position.

    Z factors render as cz, X as cx, Y as cx conjugated into the Y basis on
    the target.
    """
    ops: list[tuple[str, tuple[int, ...]]] = []
    for q in range(p.n):
        code = p.code_at(q)
        gq = payload_qubits[q]
        if code == 0:
            continue
        if code == 1:  # X
            ops.append(("cx", (ancilla, gq)))
        elif code == 2:  # Z
            ops.append(("cz", (ancilla, gq)))
        else:  # Y
            ops.append(("sdg", (gq,)))
            ops.append(("cx", (ancilla, gq)))
            ops.append(("s", (gq,)))
    return ops


def insert_pcs(circ: Circuit, region: Region, checks: list[CheckPair]) -> tuple[Circuit, PcsMeta]:
    """Rewrite into the sandwich L_m..L_1 U R_1..R_m with measured ancillas."""
    m = len(checks)
    if m == 0:
        raise PcsError("no checks to insert")
    for inst in circ.instructions[region.start:region.end]:
        if inst.name in ("measure", "reset"):
            raise PcsError("payload region overlaps measurements")
    payload_qubits = tuple(sorted(region.qubits))
    for c in checks:
        if c.left.n != len(payload_qubits):
            raise PcsError("check width does not match payload qubit count")

    out = Circuit(list(circ.qregs), list(circ.cregs), [])
    anc_qreg = out.add_qreg(ANCILLA_QREG, m)
    anc_creg = out.add_creg(ANCILLA_CREG, m)
    ancillas = tuple(anc_qreg.start + i for i in range(m))
    placed = [CheckPair(c.left, c.right, c.sign, ancillas[i]) for i, c in enumerate(checks)]

    body = out.instructions
    body.extend(circ.instructions[: region.start])
    for i in range(m):
        body.append(Instruction(_gate("h"), (ancillas[i],)))
    for i in range(m - 1, -1, -1):  # nesting order L_m .. L_1
        for name, qubits in _controlled_pauli(ancillas[i], placed[i].left, payload_qubits):
            body.append(Instruction(_gate(name), qubits))
    payload_start = len(body)
    body.extend(circ.instructions[region.start:region.end])
    payload_end = len(body)
    for i in range(m):  # R_1 .. R_m
        for name, qubits in _controlled_pauli(ancillas[i], placed[i].right, payload_qubits):
            body.append(Instruction(_gate(name), qubits))
    for i in range(m):
        body.append(Instruction(_gate("h"), (ancillas[i],)))
    body.extend(circ.instructions[region.end:])
    for i in range(m):
        body.append(Instruction(_gate("measure"), (ancillas[i],), (anc_creg.start + i,)))

    expected = "".join(str(placed[i].expected_bit) for i in range(m - 1, -1, -1))
    meta = PcsMeta(
        ancilla_register=ANCILLA_CREG,
        check_pairs=placed,
        expected_ancilla_bits=expected,
        payload_region=(region.start, region.end),
        payload_qubits=payload_qubits,
        payload_span=(payload_start, payload_end),
    )
    return out, meta


def _gate(name: str):
    from .circuit import Gate

    return Gate(name)
