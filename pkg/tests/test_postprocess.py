import math
import random

import numpy as np
import pytest

from qedc.analysis import Region
from qedc.circuit import Circuit, Register
from qedc.iceberg import build_iceberg_circuit
from qedc.pcs import CheckPair, PcsMeta, insert_pcs
from qedc.pauli import PauliString
from qedc.pipeline import CompilationMeta
from qedc.postprocess import (
    PostprocessError,
    counts_tvd,
    estimate_overhead,
    expectation_z,
    extrapolate_checks,
    marginalize_group,
    normalize_counts,
    postselect_counts,
    postselect_counts_iceberg,
    tvd,
)
from qedc.simulator import NoiseModel, sample


def simple_meta(expected="00"):
    checks = [CheckPair(PauliString.from_label("ZZ"), PauliString.from_label("ZZ"), 1, 2),
              CheckPair(PauliString.from_label("XX"), PauliString.from_label("XX"), 1, 3)]
    return PcsMeta("anc", checks, expected, (0, 1), (0, 1))


def test_postselect_spec_example():
    counts = {"00 11": 60, "01 11": 40}
    report = postselect_counts(counts, simple_meta("00"))
    assert report.counts == {"11": 60}
    assert report.keep_rate == pytest.approx(0.6)
    assert report.kept_shots + report.discarded_shots == report.total_shots == 100


def test_postselect_all_pass_shortens_keys():
    report = postselect_counts({"00 01": 7, "00 10": 3}, simple_meta("00"))
    assert report.keep_rate == 1.0
    assert set(report.counts) == {"01", "10"}


def test_postselect_rejects_wrong_width():
    with pytest.raises(PostprocessError):
        postselect_counts({"000 11": 5}, simple_meta("00"))


def test_postselect_iceberg_rules():
    cregs = [Register("verify", 1, 0), Register("synd", 2, 1), Register("meas", 4, 3)]
    from qedc.iceberg import IcebergMeta
    meta = IcebergMeta.from_dict({
        "code": "iceberg", "k": 2, "data_qubits": [0, 1, 2, 3],
        "ancillas": [4, 5], "cycles": 1,
    })
    counts = {
        "0000 00 0": 50,   # accept -> logical 00
        "1111 00 0": 10,   # accept via X stabilizer -> logical 00
        "0001 00 0": 5,    # odd parity -> drop
        "0000 01 0": 4,    # cycle bit set -> drop
        "0000 00 1": 3,    # verification failed -> drop
        "0110 00 0": 8,    # accept -> logical 11
    }
    report = postselect_counts_iceberg(counts, meta, cregs)
    assert report.total_shots == 80
    assert report.kept_shots == 68
    assert report.counts == {"00": 60, "11": 8}


def test_tvd_and_normalize():
    assert tvd({"0": 1.0}, {"0": 1.0}) == 0.0
    assert tvd({"0": 1.0}, {"1": 1.0}) == 1.0
    assert counts_tvd({"0": 50, "1": 50}, {"0": 25, "1": 25}) == 0.0
    with pytest.raises(PostprocessError):
        normalize_counts({})


def test_marginalize_group():
    assert marginalize_group({"00 1": 5, "01 1": 3}, 0) == {"1": 8}


def test_expectation_z():
    assert expectation_z({"0": 75, "1": 25}) == pytest.approx(0.5)


def test_overhead_zero_noise_is_one():
    c = Circuit()
    c.add_qreg("q", 2)
    c.add_creg("c", 2)
    c.append("rx", (0,), (0.5,))
    c.append("rzz", (0, 1), (0.5,))
    for q in range(2):
        c.append("measure", (q,), clbits=(q,))
    enc, meta = build_iceberg_circuit(c, cycles=1)
    est = estimate_overhead(enc, meta, NoiseModel())
    assert est.keep_rate == 1.0


def test_overhead_single_cx_one_check():
    # one cx payload with check X(x)X: 8 of the 15 two-qubit Paulis
    # anticommute with the right check, so keep ~= 1 - p2 * 8/15
    c = Circuit()
    c.add_qreg("q", 2)
    c.add_creg("c", 2)
    c.append("cx", (0, 1))
    for q in range(2):
        c.append("measure", (q,), clbits=(q,))
    region = Region(0, 1, frozenset({0, 1}), 1, True)
    from qedc.clifford import conjugate, tableau_from_circuit
    xx = PauliString.from_label("XX")
    tab = tableau_from_circuit([c.instructions[0]], 2)
    r = conjugate(tab, xx)
    checks = [CheckPair(xx, r.bare(), r.sign)]
    sand, meta = insert_pcs(c, region, checks)
    p2 = 0.002
    est = estimate_overhead(sand, meta, NoiseModel(p2=p2))
    # count anticommuting two-qubit Paulis directly
    anti = 0
    for a in "IXYZ":
        for b in "IXYZ":
            if (a, b) == ("I", "I"):
                continue
            if not PauliString.from_label(a + b).commutes_with(r.bare()):
                anti += 1
    assert anti == 8
    assert est.keep_rate == pytest.approx(1 - p2 * anti / 15)


def test_overhead_monotone_in_p2():
    c = Circuit()
    c.add_qreg("q", 2)
    c.add_creg("c", 2)
    c.append("rzz", (0, 1), (0.7,))
    c.append("rx", (0,), (0.5,))
    for q in range(2):
        c.append("measure", (q,), clbits=(q,))
    enc, meta = build_iceberg_circuit(c, cycles=2)
    rates = [estimate_overhead(enc, meta, NoiseModel(p2=p)).keep_rate
             for p in (0.0, 0.001, 0.005, 0.02)]
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    assert rates[0] == 1.0


def test_overhead_accepts_compilation_meta():
    c = Circuit()
    c.add_qreg("q", 2)
    c.add_creg("c", 2)
    c.append("rx", (0,), (0.5,))
    for q in range(2):
        c.append("measure", (q,), clbits=(q,))
    enc, imeta = build_iceberg_circuit(c, cycles=0)
    wrapped = CompilationMeta("iceberg", imeta, None, 0, 0)
    noise = NoiseModel(p1=1e-4, p2=0.002)
    assert estimate_overhead(enc, wrapped, noise).keep_rate == \
        estimate_overhead(enc, imeta, noise).keep_rate


def test_iceberg_prediction_matches_simulation():
    rng = random.Random(5)
    c = Circuit()
    c.add_qreg("q", 2)
    c.add_creg("c", 2)
    for _ in range(6):
        g = rng.choice(["rz", "rx", "rzz"])
        if g == "rzz":
            c.append(g, (0, 1), (rng.uniform(0, 3),))
        else:
            c.append(g, (rng.randrange(2),), (rng.uniform(0, 3),))
    for q in range(2):
        c.append("measure", (q,), clbits=(q,))
    enc, meta = build_iceberg_circuit(c, cycles=1)
    noise = NoiseModel(p1=3e-5, p2=0.002)
    shots = 30000
    counts = sample(enc, shots=shots, noise=noise, seed=2)
    report = postselect_counts_iceberg(counts, meta, enc.cregs)
    est = estimate_overhead(enc, meta, noise)
    sigma = math.sqrt(est.keep_rate * (1 - est.keep_rate) / shots)
    assert abs(report.keep_rate - est.keep_rate) < 4 * sigma + 1e-3


def test_extrapolate_constant_series():
    r = extrapolate_checks([(1, 0.8), (2, 0.8), (3, 0.8)])
    assert (r.value, r.amplitude, r.rate) == (0.8, 0.0, 1.0)


def test_extrapolate_exact_exponential():
    series = [(m, 0.5 + 0.3 * 0.5 ** m) for m in range(1, 5)]
    r = extrapolate_checks(series)
    assert abs(r.value - 0.5) < 1e-6


def test_extrapolate_needs_three_points():
    with pytest.raises(PostprocessError):
        extrapolate_checks([(1, 0.5), (2, 0.4)])
    with pytest.raises(PostprocessError):
        extrapolate_checks([(1, 0.5), (1, 0.4), (1, 0.3)])


def test_extrapolate_noisy_recovery():
    rng = np.random.default_rng(10)
    errors = []
    for _ in range(100):
        series = [(m, 0.6 + 0.25 * 0.55 ** m + rng.normal(0, 0.01)) for m in range(1, 7)]
        r = extrapolate_checks(series)
        errors.append(abs(r.value - 0.6))
    assert float(np.median(errors)) < 0.03


def test_extrapolate_weights_downweight_noisy_points():
    base = [(m, 0.5 + 0.2 * 0.5 ** m, 0.001) for m in range(1, 6)]
    outlier = base + [(6, 0.9, 10.0)]  # huge stderr: should barely matter
    r = extrapolate_checks(outlier)
    assert abs(r.value - 0.5) < 5e-3
