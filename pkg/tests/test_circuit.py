import pytest

from qedc.circuit import (
    Circuit,
    Gate,
    Instruction,
    Register,
    counts_key,
    key_group_index,
    validate,
)


def bell():
    c = Circuit()
    c.add_qreg("q", 2)
    c.add_creg("c", 2)
    c.append("h", (0,))
    c.append("cx", (0, 1))
    c.append("measure", (0,), clbits=(0,))
    c.append("measure", (1,), clbits=(1,))
    return c


def test_register_indexing_is_global():
    c = Circuit()
    a = c.add_qreg("a", 2)
    b = c.add_qreg("b", 3)
    assert (a.start, b.start) == (0, 2)
    assert c.num_qubits == 5
    assert c.qubit_name(3) == "b[1]"


def test_gate_param_arity_enforced():
    with pytest.raises(ValueError):
        Gate("rz")  # missing angle
    with pytest.raises(ValueError):
        Gate("h", (0.5,))
    with pytest.raises(ValueError):
        Gate("nonsense")


def test_validate_clean_circuit():
    assert validate(bell()) == []


def test_validate_flags_violations():
    c = bell()
    c.instructions.append(Instruction(Gate("cx"), (0, 0)))          # duplicate qubit
    c.instructions.append(Instruction(Gate("x"), (9,)))             # out of bounds
    c.instructions.append(Instruction(Gate("cx"), (0,)))            # bad arity
    codes = sorted(d.code for d in validate(c))
    assert codes == ["arity", "duplicate-qubit", "out-of-bounds"]


def test_validate_register_layout():
    c = Circuit(qregs=[Register("a", 2, 0), Register("b", 2, 5)])
    assert any(d.code == "register-layout" for d in validate(c))


def test_counts_key_convention():
    # groups in reverse declaration order; leftmost char = highest bit index
    cregs = [Register("c", 3, 0), Register("anc", 2, 3)]
    # c = [1,0,0] -> "001"; anc = [0,1] -> "10"; anc declared last = first group
    assert counts_key([1, 0, 0, 0, 1], cregs) == "10 001"
    assert key_group_index(cregs, "anc") == 0
    assert key_group_index(cregs, "c") == 1
    with pytest.raises(KeyError):
        key_group_index(cregs, "missing")


def test_copy_is_independent():
    c = bell()
    d = c.copy()
    d.append("x", (0,))
    assert len(c.instructions) == 4
    assert len(d.instructions) == 5
    e = c.copy_empty()
    assert e.qregs == c.qregs and e.instructions == []


def test_duplicate_register_names_rejected():
    c = Circuit()
    c.add_qreg("q", 2)
    with pytest.raises(ValueError):
        c.add_qreg("q", 1)
