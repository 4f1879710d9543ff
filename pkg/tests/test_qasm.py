import math

import pytest
from hypothesis import given, settings, strategies as st

from qedc.circuit import Circuit, GATE_SPECS
from qedc.qasm import QasmError, emit_qasm, parse_qasm

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_parse_bell():
    c = parse_qasm(HEADER + "qreg q[2];\ncreg c[2];\nh q[0];\ncx q[0],q[1];\nmeasure q -> c;\n")
    names = [i.name for i in c.instructions]
    assert names == ["h", "cx", "measure", "measure"]
    assert c.num_qubits == 2 and c.num_clbits == 2


def test_parameter_expressions():
    c = parse_qasm(HEADER + "qreg q[1];\nrz(pi/2) q[0];\nrx(-pi) q[0];\nry(2*pi/3) q[0];\nrz(0.25) q[0];\n")
    params = [i.params[0] for i in c.instructions]
    assert params == pytest.approx([math.pi / 2, -math.pi, 2 * math.pi / 3, 0.25])


def test_register_broadcast():
    c = parse_qasm(HEADER + "qreg q[3];\nh q;\n")
    assert [i.qubits for i in c.instructions] == [(0,), (1,), (2,)]


def test_u_sugar_expands():
    c = parse_qasm(HEADER + "qreg q[1];\nu3(0.1,0.2,0.3) q[0];\nu1(0.5) q[0];\n")
    assert all(i.name in ("rz", "rx") for i in c.instructions)


def test_error_codes_and_locations():
    cases = [
        ("qreg q[2];\nbad q[0];\n", "unknown-gate"),
        ("qreg q[2];\nh q[5];\n", "out-of-bounds"),
        ("qreg q[2];\nqreg q[1];\n", "duplicate-register"),
        ("h q[0];\n", "unknown-register"),
        ("qreg q[2];\nrz q[0];\n", "bad-params"),
        ("qreg q[2];\ncx q[0];\n", "bad-arity"),
        ("qreg q[2];\ncx q[0],q[0];\n", "duplicate-qubit"),
        ("qreg q[", "syntax"),
    ]
    for body, code in cases:
        with pytest.raises(QasmError) as exc:
            parse_qasm(HEADER + body)
        assert exc.value.code == code, body
        assert exc.value.line >= 1


def test_emit_contains_header_and_measure_arrow():
    c = Circuit()
    c.add_qreg("q", 2)
    c.add_creg("c", 2)
    c.append("rz", (0,), (0.1,))
    c.append("measure", (1,), clbits=(0,))
    text = emit_qasm(c)
    assert text.startswith("OPENQASM 2.0;")
    assert 'include "qelib1.inc";' in text
    assert "measure q[1] -> c[0];" in text


def test_roundtrip_preserves_circuit():
    src = HEADER + (
        "qreg q[3];\ncreg c[3];\nh q[0];\ncx q[0],q[1];\nrzz(0.7) q[1],q[2];\n"
        "barrier q[0],q[1],q[2];\nreset q[2];\nmeasure q[0] -> c[0];\n"
    )
    c1 = parse_qasm(src)
    c2 = parse_qasm(emit_qasm(c1))
    assert c1 == c2


GATE_NAMES = [n for n in GATE_SPECS if n not in ("barrier",)]


@st.composite
def circuits(draw):
    nq = draw(st.integers(1, 4))
    nc = draw(st.integers(1, 4))
    c = Circuit()
    c.add_qreg("q", nq)
    c.add_creg("c", nc)
    for _ in range(draw(st.integers(0, 12))):
        name = draw(st.sampled_from(GATE_NAMES))
        arity, nparams, nclb = GATE_SPECS[name]
        if arity == 2 and nq < 2:
            continue
        qubits = tuple(draw(st.permutations(range(nq)))[:arity])
        params = tuple(
            draw(st.floats(-10, 10, allow_nan=False, allow_infinity=False))
            for _ in range(nparams)
        )
        clbits = (draw(st.integers(0, nc - 1)),) if nclb else ()
        c.append(name, qubits, params, clbits)
    return c


@settings(max_examples=60, deadline=None)
@given(circuits())
def test_roundtrip_random_circuits(c):
    assert parse_qasm(emit_qasm(c)) == c
