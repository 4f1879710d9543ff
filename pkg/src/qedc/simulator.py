"""Desk-scale execution backend: dense statevector simulation with
Monte-Carlo depolarizing noise and shot sampling.

Basis convention: bit q of a computational-basis index is qubit q
(little-endian), so amplitude index 0b01 on two qubits means qubit 0 in |1>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Instruction, Register, counts_key

MAX_STATEVECTOR_QUBITS = 14

_SQ2 = 1 / math.sqrt(2)

_PAULI_1Q = ("x", "y", "z")
# fixed enumeration of the 15 non-identity two-qubit Paulis: (first, second)
_PAULI_2Q = [
    (a, b)
    for a in ("i", "x", "y", "z")
    for b in ("i", "x", "y", "z")
    if (a, b) != ("i", "i")
]

DEFAULT_GATES_1Q = ("x", "y", "z", "h", "s", "sdg", "t", "tdg", "rz", "rx", "ry")
DEFAULT_GATES_2Q = ("cx", "cz", "swap", "rzz", "rxx", "ryy")


@dataclass
class NoiseModel:
    """Depolarizing noise attached after each listed gate."""

    p1: float = 0.0
    p2: float = 0.0
    gates1: tuple[str, ...] = DEFAULT_GATES_1Q
    gates2: tuple[str, ...] = DEFAULT_GATES_2Q

    def __post_init__(self):
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError("depolarizing probabilities must lie in [0, 1]")

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0

    def gate_error(self, inst) -> float:
        if len(inst.qubits) == 1 and inst.name in self.gates1:
            return self.p1
        if len(inst.qubits) == 2 and inst.name in self.gates2:
            return self.p2
        return 0.0

    def to_dict(self) -> dict:
        return {"p1": self.p1, "gates1": list(self.gates1),
                "p2": self.p2, "gates2": list(self.gates2)}

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseModel":
        return cls(
            p1=float(d.get("p1", 0.0)),
            p2=float(d.get("p2", 0.0)),
            gates1=tuple(d.get("gates1", DEFAULT_GATES_1Q)),
            gates2=tuple(d.get("gates2", DEFAULT_GATES_2Q)),
        )


def gate_matrix(name: str, params: tuple[float, ...] = ()) -> np.ndarray:
    """Unitary of a gate; for two-qubit gates the first listed qubit is the
    most significant bit of the 4x4 basis."""
    if name == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if name == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if name == "z":
        return np.diag([1, -1]).astype(complex)
    if name == "h":
        return np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
    if name == "s":
        return np.diag([1, 1j]).astype(complex)
    if name == "sdg":
        return np.diag([1, -1j]).astype(complex)
    if name == "t":
        return np.diag([1, np.exp(1j * math.pi / 4)]).astype(complex)
    if name == "tdg":
        return np.diag([1, np.exp(-1j * math.pi / 4)]).astype(complex)
    if name in ("rz", "rx", "ry"):
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        if name == "rz":
            return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]).astype(complex)
        if name == "rx":
            return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "cx":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if name == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if name == "swap":
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
    if name in ("rzz", "rxx", "ryy"):
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        if name == "rzz":
            e0, e1 = np.exp(-0.5j * theta), np.exp(0.5j * theta)
            return np.diag([e0, e1, e1, e0]).astype(complex)
        pp = gate_matrix("x") if name == "rxx" else gate_matrix("y")
        return (c * np.eye(4) - 1j * s * np.kron(pp, pp)).astype(complex)
    raise ValueError(f"no unitary for gate {name!r}")


class SimulationError(Exception):
    pass


def _apply_unitary(psi: np.ndarray, mat: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Apply `mat` on `qubits` of an n-qubit state tensor of shape (2,)*n.

    Tensor axis k holds qubit n-1-k; the first listed qubit is the most
    significant bit of the matrix basis.
    """
    k = len(qubits)
    axes = [n - 1 - q for q in qubits]
    tensor = mat.reshape((2,) * (2 * k))
    psi = np.tensordot(tensor, psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(psi, list(range(k)), axes)


def _compact(circ: Circuit) -> tuple[Circuit, dict[int, int]]:
    """Restrict a circuit to the qubits its instructions actually touch."""
    used = sorted({q for inst in circ.instructions for q in inst.qubits})
    remap = {q: i for i, q in enumerate(used)}
    out = Circuit([Register("q", len(used), 0)], list(circ.cregs), [])
    for inst in circ.instructions:
        out.instructions.append(
            Instruction(inst.gate, tuple(remap[q] for q in inst.qubits), inst.clbits)
        )
    return out, remap


def statevector(circ: Circuit) -> np.ndarray:
    """Noiseless final state; trailing measurements/barriers are ignored."""
    body: list[Instruction] = []
    seen_measure = False
    for inst in circ.instructions:
        if inst.name in ("measure", "reset"):
            seen_measure = True
            continue
        if inst.name == "barrier":
            continue
        if seen_measure:
            raise SimulationError("mid-circuit measurement is not supported by statevector()")
        body.append(inst)

    n = circ.num_qubits
    if n > MAX_STATEVECTOR_QUBITS:
        raise SimulationError(f"{n} qubits exceeds the statevector limit of {MAX_STATEVECTOR_QUBITS}")
    psi = np.zeros((2,) * n if n else (1,), dtype=complex)
    psi.flat[0] = 1.0
    for inst in body:
        psi = _apply_unitary(psi, gate_matrix(inst.name, inst.params), inst.qubits, n)
    return psi.reshape(-1)


def probabilities(circ: Circuit) -> np.ndarray:
    amps = statevector(circ)
    return np.abs(amps) ** 2


def ideal_distribution(circ: Circuit) -> dict[str, float]:
    """Exact outcome distribution over the circuit's counts keys.

    Measurements map qubits to clbits; unmeasured clbits read 0.
    """
    measures = [(inst.qubits[0], inst.clbits[0]) for inst in circ.instructions
                if inst.name == "measure"]
    probs = probabilities(circ)
    dist: dict[str, float] = {}
    nc = circ.num_clbits
    for idx, p in enumerate(probs):
        if p < 1e-300:
            continue
        clbits = [0] * nc
        for q, c in measures:
            clbits[c] = (idx >> q) & 1
        key = counts_key(clbits, circ.cregs)
        dist[key] = dist.get(key, 0.0) + float(p)
    return dist


def deterministic_distribution(circ: Circuit, tol: float = 1e-9) -> dict[str, float]:
    """Exact outcome distribution for circuits whose mid-circuit measurements
    are all deterministic (as in noiseless verification/syndrome cycles).

    Raises SimulationError if a mid-circuit measurement has a genuinely random
    outcome.  Trailing measurements are enumerated exactly.
    """
    compacted, _ = _compact(circ)
    n = compacted.num_qubits
    if n > MAX_STATEVECTOR_QUBITS:
        raise SimulationError(f"{n} active qubits exceeds the statevector limit of {MAX_STATEVECTOR_QUBITS}")

    insts = compacted.instructions
    tail = len(insts)
    while tail > 0 and insts[tail - 1].name in ("measure", "barrier"):
        tail -= 1

    psi = np.zeros((2,) * n if n else (1,), dtype=complex)
    psi.flat[0] = 1.0
    clbits = [0] * compacted.num_clbits
    for inst in insts[:tail]:
        name = inst.name
        if name == "barrier":
            continue
        if name in ("measure", "reset"):
            q = inst.qubits[0]
            axis = n - 1 - q
            moved = np.moveaxis(psi, axis, 0)
            p1 = float(np.sum(np.abs(moved[1]) ** 2))
            if p1 > tol and p1 < 1.0 - tol:
                raise SimulationError(
                    f"mid-circuit measurement on qubit {q} is not deterministic (p1={p1:.3g})"
                )
            outcome = 1 if p1 >= 0.5 else 0
            projected = np.zeros_like(moved)
            projected[outcome] = moved[outcome] / math.sqrt(max(p1 if outcome else 1 - p1, 1e-300))
            psi = np.moveaxis(projected, 0, axis)
            if name == "measure":
                clbits[inst.clbits[0]] = outcome
            elif outcome:
                psi = _apply_unitary(psi, gate_matrix("x"), inst.qubits, n)
            continue
        psi = _apply_unitary(psi, gate_matrix(name, inst.params), inst.qubits, n)

    measures = [(i.qubits[0], i.clbits[0]) for i in insts[tail:] if i.name == "measure"]
    probs = np.abs(psi.reshape(-1)) ** 2
    dist: dict[str, float] = {}
    for idx, p in enumerate(probs):
        if p < 1e-18:
            continue
        vals = list(clbits)
        for q, c in measures:
            vals[c] = (idx >> q) & 1
        key = counts_key(vals, compacted.cregs)
        dist[key] = dist.get(key, 0.0) + float(p)
    return dist


def _measure_qubit(psi: np.ndarray, q: int, n: int, rng) -> tuple[np.ndarray, int]:
    axis = n - 1 - q
    moved = np.moveaxis(psi, axis, 0)
    p1 = float(np.sum(np.abs(moved[1]) ** 2))
    outcome = 1 if rng.random() < p1 else 0
    prob = p1 if outcome else 1.0 - p1
    projected = np.zeros_like(moved)
    projected[outcome] = moved[outcome] / math.sqrt(max(prob, 1e-300))
    return np.moveaxis(projected, 0, axis), outcome


def _shot_rng(seed: int, shot: int):
    return np.random.default_rng((int(seed), int(shot)))


def _inject_noise(psi, inst: Instruction, noise: NoiseModel, rng, n: int):
    if len(inst.qubits) == 1 and inst.name in noise.gates1:
        if noise.p1 > 0 and rng.random() < noise.p1:
            k = int(rng.integers(3))
            psi = _apply_unitary(psi, gate_matrix(_PAULI_1Q[k]), inst.qubits, n)
    elif len(inst.qubits) == 2 and inst.name in noise.gates2:
        if noise.p2 > 0 and rng.random() < noise.p2:
            a, b = _PAULI_2Q[int(rng.integers(15))]
            if a != "i":
                psi = _apply_unitary(psi, gate_matrix(a), (inst.qubits[0],), n)
            if b != "i":
                psi = _apply_unitary(psi, gate_matrix(b), (inst.qubits[1],), n)
    return psi


def sample(circ: Circuit, noise: NoiseModel | None = None, shots: int = 1024,
           seed: int = 0) -> dict[str, int]:
    """Monte-Carlo shot sampling; deterministic for a fixed seed.

    Each shot draws from an independent RNG stream derived from
    (seed, shot_index), so results do not depend on execution order.
    """
    if noise is None:
        noise = NoiseModel()
    compacted, _ = _compact(circ)
    n = compacted.num_qubits
    has_midcircuit = _has_midcircuit(compacted)
    noisy = not noise.is_noiseless and any(
        (len(i.qubits) == 1 and i.name in noise.gates1 and noise.p1 > 0)
        or (len(i.qubits) == 2 and i.name in noise.gates2 and noise.p2 > 0)
        for i in compacted.instructions
    )

    # stabilizer-frame sampling is exact for Clifford circuits and much
    # cheaper than per-shot statevector trajectories
    if (
        n <= MAX_STABILIZER_QUBITS
        and (noisy or n > MAX_STATEVECTOR_QUBITS)
        and _is_clifford_circuit(compacted)
    ):
        counts: dict[str, int] = {}
        if has_midcircuit:
            for shot in range(shots):
                rng = _shot_rng(seed, shot)
                key = _run_stabilizer_trajectory(compacted, noise, rng, n)
                counts[key] = counts.get(key, 0) + 1
        else:
            sampler = _CliffordSampler(compacted, noise, n)
            for shot in range(shots):
                key = sampler.run_shot(_shot_rng(seed, shot))
                counts[key] = counts.get(key, 0) + 1
        return counts

    if n > MAX_STATEVECTOR_QUBITS:
        raise SimulationError(
            f"{n} active qubits exceeds the statevector limit of {MAX_STATEVECTOR_QUBITS}"
        )

    counts: dict[str, int] = {}
    if not noisy and not has_midcircuit:
        # single deterministic evolution; only the readout is sampled per shot
        measures = [(inst.qubits[0], inst.clbits[0]) for inst in compacted.instructions
                    if inst.name == "measure"]
        probs = np.abs(statevector(compacted)) ** 2
        cumulative = np.cumsum(probs)
        nc = compacted.num_clbits
        for shot in range(shots):
            rng = _shot_rng(seed, shot)
            idx = int(np.searchsorted(cumulative, rng.random(), side="right"))
            idx = min(idx, len(probs) - 1)
            clbits = [0] * nc
            for q, c in measures:
                clbits[c] = (idx >> q) & 1
            key = counts_key(clbits, compacted.cregs)
            counts[key] = counts.get(key, 0) + 1
        return counts

    for shot in range(shots):
        rng = _shot_rng(seed, shot)
        key = _run_trajectory(compacted, noise, rng, n)
        counts[key] = counts.get(key, 0) + 1
    return counts


def _has_midcircuit(circ: Circuit) -> bool:
    seen = False
    for inst in circ.instructions:
        if inst.name in ("measure", "reset"):
            seen = True
        elif inst.name != "barrier" and seen:
            return True
    return False


def _run_trajectory(circ: Circuit, noise: NoiseModel, rng, n: int) -> str:
    psi = np.zeros((2,) * n if n else (1,), dtype=complex)
    psi.flat[0] = 1.0
    clbits = [0] * circ.num_clbits
    for inst in circ.instructions:
        name = inst.name
        if name == "barrier":
            continue
        if name == "measure":
            psi, outcome = _measure_qubit(psi, inst.qubits[0], n, rng)
            clbits[inst.clbits[0]] = outcome
            continue
        if name == "reset":
            psi, outcome = _measure_qubit(psi, inst.qubits[0], n, rng)
            if outcome:
                psi = _apply_unitary(psi, gate_matrix("x"), inst.qubits, n)
            continue
        psi = _apply_unitary(psi, gate_matrix(name, inst.params), inst.qubits, n)
        psi = _inject_noise(psi, inst, noise, rng, n)
    return counts_key(clbits, circ.cregs)


MAX_STABILIZER_QUBITS = 64


def _is_clifford_circuit(circ: Circuit) -> bool:
    from .clifford import is_clifford

    return all(
        inst.name in ("measure", "reset", "barrier") or is_clifford(inst)
        for inst in circ.instructions
    )


def _char_pauli(n: int, q: int, ch: str):
    from .pauli import single_qubit_pauli

    return single_qubit_pauli(n, q, ch.upper())


def _run_stabilizer_trajectory(circ: Circuit, noise: NoiseModel, rng, n: int) -> str:
    """One shot on the stabilizer backend: Clifford gates exactly, noise as
    sampled Pauli insertions, measurements as tableau collapses."""
    from .stabilizer import StabilizerState

    state = StabilizerState(n)
    clbits = [0] * circ.num_clbits
    for inst in circ.instructions:
        name = inst.name
        if name == "barrier":
            continue
        if name == "measure":
            outcome, _ = state.measure_z(inst.qubits[0], rng)
            clbits[inst.clbits[0]] = outcome
            continue
        if name == "reset":
            state.reset(inst.qubits[0], rng)
            continue
        state.apply_instruction(inst)
        if len(inst.qubits) == 1 and name in noise.gates1:
            if noise.p1 > 0 and rng.random() < noise.p1:
                k = int(rng.integers(3))
                state.apply_pauli(_char_pauli(n, inst.qubits[0], _PAULI_1Q[k]))
        elif len(inst.qubits) == 2 and name in noise.gates2:
            if noise.p2 > 0 and rng.random() < noise.p2:
                a, b = _PAULI_2Q[int(rng.integers(15))]
                if a != "i":
                    state.apply_pauli(_char_pauli(n, inst.qubits[0], a))
                if b != "i":
                    state.apply_pauli(_char_pauli(n, inst.qubits[1], b))
    return counts_key(clbits, circ.cregs)


class _CliffordSampler:
    """Shot sampler for Clifford circuits with terminal measurements only.

    The noiseless gate prefix is simulated once; each shot reuses that state
    (generator rows are immutable, so a shallow copy suffices).  Sampled
    Pauli noise events, which are rare, are conjugated through the remaining
    gates and applied to the copy before the measurements run.
    """

    def __init__(self, circ: Circuit, noise: NoiseModel, n: int):
        from .clifford import clifford_gate_sequence
        from .stabilizer import StabilizerState

        self.n = n
        self.cregs = circ.cregs
        self.num_clbits = circ.num_clbits
        self.gates = [i for i in circ.instructions
                      if i.name not in ("measure", "reset", "barrier")]
        self.measures = [(i.qubits[0], i.clbits[0]) for i in circ.instructions
                         if i.name == "measure"]
        base = StabilizerState(n)
        for inst in self.gates:
            base.apply_instruction(inst)
        self.base = base
        self.noisy = []  # (gate index, probability, qubits)
        for gi, inst in enumerate(self.gates):
            p = noise.gate_error(inst)
            if p > 0:
                self.noisy.append((gi, p, inst.qubits))
        self.probs = np.array([p for _, p, _ in self.noisy])
        # named-gate suffixes for conjugating an error to the end
        self.named = [list(clifford_gate_sequence(inst)) for inst in self.gates]

    def _propagate(self, pauli, gate_index: int):
        from .clifford import _conj_named

        for seq in self.named[gate_index + 1:]:
            for name, qubits in seq:
                pauli = _conj_named(pauli, name, qubits)
        return pauli

    def run_shot(self, rng) -> str:
        from .stabilizer import StabilizerState

        errors = []
        if len(self.noisy):
            hits = np.nonzero(rng.random(len(self.noisy)) < self.probs)[0]
            for h in hits:
                gi, _, qubits = self.noisy[int(h)]
                if len(qubits) == 1:
                    pauli = _char_pauli(self.n, qubits[0], _PAULI_1Q[int(rng.integers(3))])
                else:
                    a, b = _PAULI_2Q[int(rng.integers(15))]
                    pauli = None
                    if a != "i":
                        pauli = _char_pauli(self.n, qubits[0], a)
                    if b != "i":
                        pb = _char_pauli(self.n, qubits[1], b)
                        pauli = pb if pauli is None else \
                            pauli.__class__(self.n, pauli.x | pb.x, pauli.z | pb.z, 0)
                errors.append(self._propagate(pauli, gi))
        state = StabilizerState.__new__(StabilizerState)
        state.n = self.n
        state.destab = list(self.base.destab)
        state.stab = list(self.base.stab)
        for pauli in errors:
            state.apply_pauli(pauli)
        clbits = [0] * self.num_clbits
        for q, c in self.measures:
            outcome, _ = state.measure_z(q, rng)
            clbits[c] = outcome
        return counts_key(clbits, self.cregs)
