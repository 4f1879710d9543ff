"""Detection postprocessing: postselection on check and syndrome outcomes,
analytic keep-rate estimation under depolarizing noise, and extrapolation of
the error-mitigated estimate to the infinite-check limit."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Register, key_group_index
from .errorprop import propagate_flips
from .iceberg import IcebergMeta, decode_readout
from .pauli import PauliString, single_qubit_pauli
from .pcs import PcsMeta
from .simulator import NoiseModel


class PostprocessError(Exception):
    pass


@dataclass
class PostselectionReport:
    total_shots: int
    kept_shots: int
    discarded_shots: int
    counts: dict[str, int]

    @property
    def keep_rate(self) -> float:
        return self.kept_shots / self.total_shots if self.total_shots else 0.0

    def to_dict(self) -> dict:
        return {
            "total": self.total_shots,
            "kept": self.kept_shots,
            "discarded": self.discarded_shots,
            "keep_rate": self.keep_rate,
            "counts": dict(sorted(self.counts.items())),
        }


def _split_key(key: str) -> list[str]:
    return key.split(" ")


def postselect_counts(
    counts: dict[str, int],
    meta: PcsMeta,
    cregs: list[Register] | None = None,
) -> PostselectionReport:
    """Keep shots whose check-ancilla bits equal the expected pattern; the
    ancilla group is removed from the surviving keys.

    The ancilla register is declared last, hence appears as the first
    space-separated group unless `cregs` says otherwise.
    """
    group = key_group_index(cregs, meta.ancilla_register) if cregs is not None else 0
    expected = meta.expected_ancilla_bits
    total = kept = 0
    out: dict[str, int] = {}
    for key, cnt in counts.items():
        total += cnt
        parts = _split_key(key)
        if len(parts[group]) != len(expected):
            raise PostprocessError(
                f"key group {parts[group]!r} does not match {len(expected)} checks"
            )
        if parts[group] != expected:
            continue
        kept += cnt
        rest = " ".join(parts[:group] + parts[group + 1:])
        out[rest] = out.get(rest, 0) + cnt
    return PostselectionReport(total, kept, total - kept, out)


def postselect_counts_iceberg(
    counts: dict[str, int],
    meta: IcebergMeta,
    cregs: list[Register],
) -> PostselectionReport:
    """Keep shots with verification bit 0, all syndrome bits 0, and even
    readout parity; surviving keys are the decoded logical bitstrings."""
    g_meas = key_group_index(cregs, meta.readout_register)
    g_verify = key_group_index(cregs, meta.verify_register)
    has_cycles = meta.layout.cycle_count > 0
    g_synd = key_group_index(cregs, meta.cycle_register) if has_cycles else None
    total = kept = 0
    out: dict[str, int] = {}
    for key, cnt in counts.items():
        total += cnt
        parts = _split_key(key)
        if int(parts[g_verify], 2) != 0:
            continue
        if has_cycles and int(parts[g_synd], 2) != 0:
            continue
        accept, logical = decode_readout(parts[g_meas], meta)
        if not accept:
            continue
        kept += cnt
        out[logical] = out.get(logical, 0) + cnt
    return PostselectionReport(total, kept, total - kept, out)


# -- analytic keep-rate estimate ---------------------------------------------

@dataclass
class OverheadEstimate:
    keep_rate: float
    expected_shot_multiplier: float
    detectable_fraction_by_gate: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "keep_rate": self.keep_rate,
            "expected_shot_multiplier": self.expected_shot_multiplier,
        }


def _detection_clbits_iceberg(circ: Circuit, meta: IcebergMeta) -> tuple[set[int], set[int]]:
    """(hard clbits that must read 0, readout clbits entering the parity)."""
    hard: set[int] = set()
    parity: set[int] = set()
    for reg in circ.cregs:
        if reg.name in (meta.verify_register, meta.cycle_register):
            hard.update(range(reg.start, reg.start + reg.size))
        elif reg.name == meta.readout_register:
            parity.update(range(reg.start, reg.start + reg.size))
    return hard, parity


def _single_fault_paulis(n: int, qubits: tuple[int, ...]) -> list[PauliString]:
    """The depolarizing fault set on the given qubits: all non-identity
    Paulis supported there (3 for one qubit, 15 for two)."""
    out = []
    kinds = []
    for q in qubits:
        kinds.append([PauliString(n, 0, 0, 0)] + [single_qubit_pauli(n, q, k) for k in "XYZ"])
    if len(qubits) == 1:
        return kinds[0][1:]
    for pa in kinds[0]:
        for pb in kinds[1]:
            if pa.is_identity and pb.is_identity:
                continue
            out.append(PauliString(n, pa.x | pb.x, pa.z | pb.z, 0))
    return out


def _iceberg_fault_signatures(
    circ: Circuit, meta: IcebergMeta, idx: int, qubits: tuple[int, ...]
) -> list[int]:
    """Detection signature of each depolarizing Pauli after instruction `idx`:
    one bit per hard detection clbit flipped, plus a readout-parity bit."""
    hard, parity = _detection_clbits_iceberg(circ, meta)
    hard_index = {cb: i for i, cb in enumerate(sorted(hard))}
    n = circ.num_qubits
    sigs = []
    for p in _single_fault_paulis(n, qubits):
        flips = propagate_flips(circ.instructions, idx + 1, p)
        sig = 0
        for cb in flips & hard:
            sig |= 1 << hard_index[cb]
        if len(flips & parity) % 2 == 1:
            sig |= 1 << len(hard_index)
        sigs.append(sig)
    return sigs


def _pcs_fault_signatures(
    meta: PcsMeta, qubits: tuple[int, ...], suffix_tab
) -> list[int]:
    """Detection signature of each depolarizing Pauli after a payload
    instruction: one bit per right check whose ancilla it flips."""
    from .clifford import conjugate

    local_of = {g: i for i, g in enumerate(meta.payload_qubits)}
    k = len(meta.payload_qubits)
    faults = _single_fault_paulis(k, tuple(local_of[q] for q in qubits))
    rights = [c.right for c in meta.check_pairs]
    sigs = []
    for p in faults:
        prop = conjugate(suffix_tab, p)
        sig = 0
        for i, r in enumerate(rights):
            if not prop.commutes_with(r):
                sig |= 1 << i
        sigs.append(sig)
    return sigs


def _convolve_signature(dist: dict[int, float], p: float, sigs: list[int]) -> dict[int, float]:
    """Fold one gate's error channel into the syndrome distribution.

    Flip sets of simultaneous Pauli faults compose by XOR, so the joint
    detection state is a distribution over signature bitmasks."""
    out = {s: q * (1.0 - p) for s, q in dist.items()}
    w = p / len(sigs)
    for s, q in dist.items():
        for sig in sigs:
            key = s ^ sig
            out[key] = out.get(key, 0.0) + q * w
    return out


def estimate_overhead(circ: Circuit, meta, noise: NoiseModel) -> OverheadEstimate:
    """Analytic keep-rate under independent per-gate depolarizing faults.

    Fault flip sets compose by XOR, so the joint detection outcome is tracked
    exactly (to all orders, including cancellations between faults) as a
    distribution over syndrome signatures; the keep rate is the probability of
    the all-clear signature.  Iceberg signatures cover the full detection
    chain.  PCS signatures are computed only for gates inside the sandwiched
    payload, where check conjugation is well defined; noise on gates outside
    the sandwich counts as undetectable, so the estimate is an upper bound on
    the keep rate there.
    """
    meta = getattr(meta, "code_meta", meta)
    dist: dict[int, float] = {0: 1.0}
    fractions: list[float] = []
    if isinstance(meta, IcebergMeta):
        for idx, inst in enumerate(circ.instructions):
            p = noise.gate_error(inst)
            if p == 0.0:
                fractions.append(0.0)
                continue
            sigs = _iceberg_fault_signatures(circ, meta, idx, inst.qubits)
            fractions.append(sum(1 for s in sigs if s) / len(sigs))
            dist = _convolve_signature(dist, p, sigs)
    elif isinstance(meta, PcsMeta):
        from .clifford import CliffordTableau, tableau_from_circuit

        start, end = meta.payload_span
        k = len(meta.payload_qubits)
        local_of = {g: i for i, g in enumerate(meta.payload_qubits)}
        # suffix tableau of the remaining payload after each position
        suffix = [CliffordTableau.identity(k)]
        for inst in reversed(circ.instructions[start:end]):
            local = inst.__class__(
                inst.gate, tuple(local_of[q] for q in inst.qubits), inst.clbits
            )
            suffix.append(tableau_from_circuit([local], k).compose(suffix[-1]))
        suffix.reverse()
        for idx, inst in enumerate(circ.instructions):
            p = noise.gate_error(inst)
            if p == 0.0 or not (start <= idx < end):
                fractions.append(0.0)
                continue
            sigs = _pcs_fault_signatures(meta, inst.qubits, suffix[idx - start + 1])
            fractions.append(sum(1 for s in sigs if s) / len(sigs))
            dist = _convolve_signature(dist, p, sigs)
    else:
        raise PostprocessError(f"unsupported metadata type {type(meta).__name__}")
    keep = dist.get(0, 0.0)
    return OverheadEstimate(keep, 1.0 / keep if keep > 0 else math.inf, fractions)


# -- distribution utilities ---------------------------------------------------

def normalize_counts(counts: dict[str, int]) -> dict[str, float]:
    total = sum(counts.values())
    if total == 0:
        raise PostprocessError("empty counts")
    return {k: v / total for k, v in counts.items()}


def tvd(p: dict[str, float], q: dict[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def counts_tvd(a: dict[str, int], b: dict[str, int]) -> float:
    return tvd(normalize_counts(a), normalize_counts(b))


def marginalize_group(counts: dict[str, int], group: int) -> dict[str, int]:
    """Drop one space-separated key group, summing collided keys."""
    out: dict[str, int] = {}
    for key, cnt in counts.items():
        parts = _split_key(key)
        rest = " ".join(parts[:group] + parts[group + 1:])
        out[rest] = out.get(rest, 0) + cnt
    return out


# -- check-count extrapolation ------------------------------------------------

@dataclass
class ExtrapolationResult:
    value: float        # estimate at infinite checks
    amplitude: float
    rate: float
    residual: float
    points: list[tuple[int, float]]

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "amplitude": self.amplitude,
            "rate": self.rate,
            "residual": self.residual,
            "points": [[int(m), float(v)] for m, v in self.points],
        }


def extrapolate_checks(series) -> ExtrapolationResult:
    """Fit v(m) = value + amplitude * rate**m by least squares and report the
    m -> infinity limit.

    Each point is (m, value) or (m, value, stderr); stderrs weight the fit by
    1/stderr**2.  The rate is scanned over a grid in (0, 1]; for each
    candidate the linear parameters solve in closed form, then Gauss-Newton
    refines the best seed.  A constant series returns (value, 0, 1) exactly.
    """
    series = [tuple(pt) for pt in series]
    if len(series) < 3 or len({pt[0] for pt in series}) < 3:
        raise PostprocessError("need at least 3 distinct check counts")
    ms = np.array([float(pt[0]) for pt in series])
    vs = np.array([float(pt[1]) for pt in series])
    errs = np.array([float(pt[2]) if len(pt) > 2 and pt[2] else 1.0 for pt in series])
    w = np.sqrt(1.0 / errs ** 2)
    if np.allclose(vs, vs[0], rtol=0, atol=1e-15):
        return ExtrapolationResult(float(vs[0]), 0.0, 1.0, 0.0, [(int(m), float(v)) for m, v in zip(ms, vs)])

    def linfit(r: float):
        basis = np.vstack([np.ones_like(ms), r ** ms]).T
        coef, *_ = np.linalg.lstsq(basis * w[:, None], vs * w, rcond=None)
        resid = float(np.sum((w * (basis @ coef - vs)) ** 2))
        return coef, resid

    # r = 1 makes the basis collinear with the constant column, so the scan
    # and the refinement stay strictly inside (0, 1)
    best = None
    for r in np.arange(0.05, 0.95 + 1e-12, 0.05):
        coef, resid = linfit(float(r))
        if best is None or resid < best[2]:
            best = (float(r), coef, resid)
    r, (e_inf, amp), resid = best

    theta = np.array([e_inf, amp, r])
    for _ in range(100):
        e_inf, amp, r = theta
        rc = float(np.clip(r, 1e-9, 0.999))
        rpow = rc ** ms
        res = w * (vs - (e_inf + amp * rpow))
        jac = np.vstack([
            w,
            w * rpow,
            w * amp * ms * rc ** (ms - 1),
        ]).T
        try:
            step, *_ = np.linalg.lstsq(jac, res, rcond=None)
        except np.linalg.LinAlgError:
            break
        theta = theta + step
        theta[2] = float(np.clip(theta[2], 1e-9, 0.999))
        if float(np.max(np.abs(step))) < 1e-10:
            break
    e_inf, amp, r = (float(t) for t in theta)
    final = float(np.sum((w * (e_inf + amp * r ** ms - vs)) ** 2))
    if final > resid:  # keep the grid seed if refinement diverged
        e_inf, amp, r, final = float(best[1][0]), float(best[1][1]), best[0], resid
    return ExtrapolationResult(e_inf, amp, r, final, [(int(m), float(v)) for m, v in zip(ms, vs)])


def expectation_z(counts: dict[str, int], bit: int = 0) -> float:
    """<Z> on one readout bit of single-group keys."""
    total = sum(counts.values())
    if total == 0:
        raise PostprocessError("empty counts")
    acc = 0
    for key, cnt in counts.items():
        b = int(key.replace(" ", "")[::-1][bit])
        acc += cnt * (1 - 2 * b)
    return acc / total
