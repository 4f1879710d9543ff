"""Independent dense-matrix oracles used to cross-check the fast engines.

Everything here is built from first principles with numpy kron products so
the package's own Pauli/Clifford/statevector code is never trusted to verify
itself.
"""
import math

import numpy as np

I2 = np.eye(2, dtype=complex)
PAULI_MATS = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}

GATE_MATS = {
    "x": PAULI_MATS["X"],
    "y": PAULI_MATS["Y"],
    "z": PAULI_MATS["Z"],
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "s": np.diag([1, 1j]).astype(complex),
    "sdg": np.diag([1, -1j]).astype(complex),
    "t": np.diag([1, np.exp(1j * math.pi / 4)]).astype(complex),
    "tdg": np.diag([1, np.exp(-1j * math.pi / 4)]).astype(complex),
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def rot(name: str, theta: float) -> np.ndarray:
    if name == "rz":
        return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]).astype(complex)
    if name == "rx":
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if name == "ry":
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name in ("rzz", "rxx", "ryy"):
        p = PAULI_MATS[name[1].upper()]
        pp = np.kron(p, p)
        return (math.cos(theta / 2) * np.eye(4) - 1j * math.sin(theta / 2) * pp).astype(complex)
    raise KeyError(name)


def gate_mat(name: str, params=()) -> np.ndarray:
    if name in GATE_MATS:
        return GATE_MATS[name]
    return rot(name, params[0])


def pauli_matrix(label: str) -> np.ndarray:
    """Dense matrix of a Pauli label; leftmost character = highest qubit."""
    sign = 1
    body = label
    if body and body[0] in "+-":
        sign = -1 if body[0] == "-" else 1
        body = body[1:]
    mat = np.eye(1, dtype=complex)
    for ch in body:  # leftmost = highest qubit = leftmost kron factor
        mat = np.kron(mat, PAULI_MATS[ch])
    return sign * mat


def embed(mat: np.ndarray, qubits, n: int) -> np.ndarray:
    """Expand a k-qubit gate matrix (first listed qubit = most significant)
    onto n qubits with index bit q = qubit q."""
    k = len(qubits)
    full = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for col in range(2 ** n):
        sub_in = 0
        for pos, q in enumerate(qubits):  # first listed = msb of sub index
            sub_in |= ((col >> q) & 1) << (k - 1 - pos)
        rest = col
        for q in qubits:
            rest &= ~(1 << q)
        for sub_out in range(2 ** k):
            amp = mat[sub_out, sub_in]
            if amp == 0:
                continue
            row = rest
            for pos, q in enumerate(qubits):
                if (sub_out >> (k - 1 - pos)) & 1:
                    row |= 1 << q
            full[row, col] += amp
    return full


def circuit_unitary(instructions, n: int) -> np.ndarray:
    """Dense unitary of a gate list (no measurements)."""
    u = np.eye(2 ** n, dtype=complex)
    for inst in instructions:
        if inst.name == "barrier":
            continue
        u = embed(gate_mat(inst.name, inst.params), inst.qubits, n) @ u
    return u


def same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    norm = np.linalg.norm(a) * np.linalg.norm(b)
    return abs(abs(np.vdot(a.reshape(-1), b.reshape(-1))) - norm) < tol * max(norm, 1.0)
