"""Conversions between the two encodings, and the tensor-product merge.

Antisymmetric-to-sorted-list runs a record-keeping sorting network forward:
comparison outcomes land in one ancilla per comparator, a -1 phase rides
along with every swap, and for a properly antisymmetrized input the record
register provably factorizes (outcomes depend only on the ordering
permutation, and the per-branch phase cancels the permutation sign).

Sorted-list-to-antisymmetric seeds the permutation the other way round: a
uniform superposition over auxiliary registers is sorted without phases to
mint one record pattern per permutation, a projective measurement discards
colliding seeds, the records drive the inverse network across the system
registers (one Z per record supplies the sign), and a replay of network
prefixes erases the records comparison by comparison.

The merge concatenates two sorted lists, resorts with an adjacent-only
network whose swap phase is withheld for sentinel moves, and flags
duplicate orbitals via adjacent equality tests on the sorted result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import (
    Circuit,
    GateCount,
    Gate,
    Statevector,
    apply_circuit,
    build_layout,
    count_gates,
    cswap,
    h,
    mcx,
    sparse_action,
    x,
    z,
)
from .comparators import (
    SortingNetworkSpec,
    compare_swap_gates,
    compute_greater_gates,
    equality_flag_gates,
    sorting_network_circuit,
)
from .encodings import (
    AMP_THRESHOLD,
    FIRST_QUANTIZED,
    SORTED_LIST,
    EncodedState,
    validate,
)
from .errors import (
    BadParam,
    BasisMismatch,
    EntangledAncilla,
    MalformedComponent,
    MixedParticleNumber,
    NotAntisymmetric,
    RetryBudgetExceeded,
)

# rank-1 split residual bound: fidelity of the kept factor >= 1 - 1e-9
_SPLIT_RESID = math.sqrt(1e-9)


@dataclass
class ConversionReport:
    """Bookkeeping emitted next to every converted state."""

    direction: str
    gate_count: GateCount
    record_ancillas: int
    success_probability: float
    attempts: int
    record_state: np.ndarray | None = None


def _rank_one_split(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split A (rows = ancilla patterns) as outer(u, psi) or raise.

    psi is the dominant row normalized; u collects row coefficients. The
    residual bound keeps the fidelity loss of discarding the ancilla factor
    below 1e-9.
    """
    norms = np.linalg.norm(A, axis=1)
    r_star = int(np.argmax(norms))
    if norms[r_star] == 0:
        raise EntangledAncilla("zero state, nothing to split")
    psi = A[r_star] / norms[r_star]
    u = A @ psi.conj()
    resid = np.linalg.norm(A - np.outer(u, psi))
    if resid > _SPLIT_RESID * np.linalg.norm(A):
        raise EntangledAncilla(
            f"ancilla register does not factorize (residual {resid:.2e})"
        )
    return u, psi


def first_to_second(
    enc: EncodedState, extra_registers: int = 0
) -> tuple[EncodedState, ConversionReport]:
    """Antisymmetric N-register state -> sorted list on N + extra registers.

    The input is validated first (NotAntisymmetric wraps any violation).
    Extra registers are initialized to the sentinel by X gates and provably
    never move during the sort, so the conversion works unchanged on states
    destined for a larger orbital budget.
    """
    if enc.discipline != FIRST_QUANTIZED:
        raise BadParam("input must be first-quantized")
    if enc.layout.n_anc:
        raise BadParam("input must not carry ancillas")
    if extra_registers < 0:
        raise BadParam("extra_registers must be >= 0")
    rep = validate(enc)
    if not rep.ok:
        raise NotAntisymmetric(
            f"{len(rep.violations)} bad components; first: {rep.violations[0][2]}"
        )
    N = enc.layout.n_reg
    n_out = N + extra_registers
    spec = SortingNetworkSpec.batcher(n_out)
    T = spec.n_comparators
    layout = build_layout(enc.M, n_out, T)

    circ = Circuit(layout)
    for r in range(N, n_out):
        for q in layout.register_qubits(r):
            circ.add(x(q))  # all-zeros register -> all-ones sentinel
    circ += sorting_network_circuit(layout, spec, with_z=True)

    # pure permutation+phase: trace the components, not the dense vector
    idx0 = np.flatnonzero(enc.state.amps)
    oi, oa = sparse_action(circ, idx0, enc.state.amps[idx0])
    reg_dim = 1 << (n_out * layout.b)
    A = np.zeros((1 << T) * reg_dim, dtype=complex)
    np.add.at(A, oi, oa)
    A = A.reshape(1 << T, reg_dim)
    u, psi = _rank_one_split(A)
    out_layout = build_layout(enc.M, n_out, 0)
    result = EncodedState(Statevector(psi.copy()), SORTED_LIST, out_layout, enc.N)
    report = ConversionReport(
        direction="antisymmetric-to-sorted-list",
        gate_count=count_gates(circ),
        record_ancillas=T,
        success_probability=1.0,
        attempts=1,
        record_state=u / np.linalg.norm(u),
    )
    return result, report


def fq2sl_gate_count(M: int, N: int, extra_registers: int = 0) -> GateCount:
    """Cost of the forward conversion circuit, no statevector built.

    Counting-only layouts may exceed the simulation cap, so this works for
    scaling grids far beyond desk size.
    """
    n_out = N + extra_registers
    spec = SortingNetworkSpec.batcher(n_out)
    layout = build_layout(M, n_out, spec.n_comparators, counting_only=True)
    circ = Circuit(layout)
    for r in range(N, n_out):
        for q in layout.register_qubits(r):
            circ.add(x(q))
    circ += sorting_network_circuit(layout, spec, with_z=True)
    return count_gates(circ)


def _occupancies(enc: EncodedState) -> set[int]:
    layout = enc.layout
    occ = set()
    for comp in np.nonzero(np.abs(enc.state.amps) > AMP_THRESHOLD)[0]:
        values = layout.values(int(comp))
        occ.add(sum(1 for v in values if v != layout.sentinel))
    return occ


def second_to_first(
    enc: EncodedState,
    N: int | None = None,
    rng: np.random.Generator | None = None,
    retry_budget: int = 16,
) -> tuple[EncodedState, ConversionReport]:
    """Sorted list with a fixed electron count -> antisymmetric N registers.

    Pipeline: slice off the all-sentinel tail, put N seed registers in a
    uniform superposition, sort them phase-free while recording comparisons,
    measure away seed collisions (success probability prod_k (1 - k/2^b),
    retried up to retry_budget times), discard the seed, drive the inverse
    network over the system with one Z per record, then erase each record by
    replaying the network prefix and recomputing its comparison.
    """
    if enc.discipline != SORTED_LIST:
        raise BadParam("input must be a sorted list")
    if enc.layout.n_anc:
        raise BadParam("input must not carry ancillas")
    rep = validate(enc)
    if not rep.ok:
        raise MalformedComponent(
            f"{len(rep.violations)} bad components; first: {rep.violations[0][2]}"
        )
    occs = _occupancies(enc)
    if len(occs) > 1:
        raise MixedParticleNumber(f"occupancies {sorted(occs)} present")
    if occs and N is not None and occs != {N}:
        raise MixedParticleNumber(f"state occupies {occs.pop()} registers, not {N}")
    if N is None:
        if not occs:
            raise BadParam("zero state has no electron count")
        N = occs.pop()
    if N < 1:
        raise BadParam("antisymmetric encoding needs N >= 1")
    layout = enc.layout
    b = layout.b
    if N > layout.n_reg:
        raise MixedParticleNumber(f"N={N} exceeds {layout.n_reg} registers")

    # trailing registers hold sentinels on every valid component: slice off
    if layout.n_reg > N:
        view = enc.state.amps.reshape(-1, 1 << (N * b))
        tail = sum(layout.sentinel << (j * b) for j in range(layout.n_reg - N))
        spill = np.linalg.norm(view[np.arange(view.shape[0]) != tail])
        if spill > 1e-10:
            raise MixedParticleNumber(f"non-sentinel tail amplitude {spill:.2e}")
        amps_sys = view[tail].copy()
    else:
        amps_sys = enc.state.amps.copy()

    fq_layout = build_layout(enc.M, N, 0)
    if N == 1:
        result = EncodedState(Statevector(amps_sys), FIRST_QUANTIZED, fq_layout, N)
        report = ConversionReport(
            direction="sorted-list-to-antisymmetric",
            gate_count=GateCount(),
            record_ancillas=0,
            success_probability=1.0,
            attempts=0,
        )
        return result, report

    if rng is None:
        rng = np.random.default_rng(0)
    spec = SortingNetworkSpec.batcher(N)
    T = spec.n_comparators
    work = build_layout(enc.M, 2 * N, T + (N - 1))

    records = [work.anc_qubit(t) for t in range(T)]
    eqs = [work.anc_qubit(T + k) for k in range(N - 1)]
    stage1 = Circuit(work)
    for r in range(N, 2 * N):
        for q in work.register_qubits(r):
            stage1.add(h(q))
    for t, (i, j) in enumerate(spec.pairs):
        # seed sort is phase-free: the sign enters once, on the system pass
        stage1.extend(
            compare_swap_gates(work, N + i, N + j, records[t], with_z=False)
        )
    for k in range(N - 1):
        stage1.extend(equality_flag_gates(work, N + k, N + k + 1, eqs[k]))

    # the system occupies registers 0..N-1, so its component indices carry
    # over unchanged; the H layer branches inside the sparse tracer
    idx0 = np.flatnonzero(amps_sys)
    oi, oa = sparse_action(stage1, idx0, amps_sys[idx0])

    eq_field = oi >> np.int64(2 * N * b + T)
    keep = eq_field == 0
    p_success = float(np.sum(np.abs(oa[keep]) ** 2))
    attempts = 0
    for attempts in range(1, retry_budget + 1):
        if rng.random() < p_success:
            break
    else:
        raise RetryBudgetExceeded(
            f"{retry_budget} attempts at success probability {p_success:.3f}"
        )
    ki = oi[keep]
    ka = oa[keep] / math.sqrt(p_success)

    # discard the seed: it factorizes as (uniform over distinct sorted
    # values) x (records x system), because record patterns depend only on
    # the seeding permutation, never on which distinct values were drawn
    reg_f = 1 << (N * b)
    seed_vals = (ki >> np.int64(N * b)) & np.int64(reg_f - 1)
    rec_vals = ki >> np.int64(2 * N * b)
    sys_vals = ki & np.int64(reg_f - 1)
    A = np.zeros((reg_f, (1 << T) * reg_f), dtype=complex)
    np.add.at(A, (seed_vals, rec_vals * reg_f + sys_vals), ka)
    _, rest = _rank_one_split(A)

    work2 = build_layout(enc.M, N, T)
    state2 = Statevector(rest.copy())
    records2 = [work2.anc_qubit(t) for t in range(T)]
    unsort = Circuit(work2)
    for t in reversed(range(T)):
        i, j = spec.pairs[t]
        qi = list(work2.register_qubits(i))
        qj = list(work2.register_qubits(j))
        unsort.add(z(records2[t]))
        unsort.extend(cswap(records2[t], qi[k], qj[k]) for k in range(b))
    erase = Circuit(work2)
    for t in reversed(range(T)):
        prefix: list[Gate] = []
        for u in range(t):
            iu, ju = spec.pairs[u]
            qi = list(work2.register_qubits(iu))
            qj = list(work2.register_qubits(ju))
            prefix += [cswap(records2[u], qi[k], qj[k]) for k in range(b)]
        it, jt = spec.pairs[t]
        erase.extend(prefix)
        erase.extend(compute_greater_gates(work2, it, jt, records2[t]))
        erase.extend(reversed(prefix))
    final = apply_circuit(state2, unsort + erase)

    rec_view = final.amps.reshape(1 << T, reg_f)
    leak = np.linalg.norm(rec_view[1:])
    if leak > 1e-9:
        raise EntangledAncilla(f"records kept amplitude {leak:.2e} after erasure")
    out_amps = rec_view[0] / np.linalg.norm(rec_view[0])

    result = EncodedState(Statevector(out_amps.copy()), FIRST_QUANTIZED, fq_layout, N)
    total = count_gates(stage1) + count_gates(unsort) + count_gates(erase)
    report = ConversionReport(
        direction="sorted-list-to-antisymmetric",
        gate_count=total,
        record_ancillas=T,
        success_probability=p_success,
        attempts=attempts,
    )
    return result, report


@dataclass
class MergeResult:
    """Merged sorted-list state plus the duplicate flag's bookkeeping."""

    state: EncodedState
    flag_qubit: int
    duplicate_probability: float
    records_discarded: bool
    gate_count: GateCount


def tensor_product_merge(a: EncodedState, b: EncodedState) -> MergeResult:
    """Concatenate two sorted lists, resort, and flag duplicate orbitals.

    The comparator schedule is adjacent-only, so the -1-per-swap phase
    (withheld when the moving partner is a sentinel) equals the fermionic
    reordering sign of the concatenated creation strings exactly. Duplicate
    detection compares sorted neighbors for equality, not counting sentinel
    pairs, and ORs the outcomes into one flag qubit.

    For basis-state inputs the comparison records are deterministic and are
    discarded; for superpositions they may stay entangled with the system
    and are then kept (records_discarded=False) rather than faked away.
    """
    for s in (a, b):
        if s.discipline != SORTED_LIST:
            raise BadParam("merge inputs must be sorted lists")
        if s.layout.n_anc:
            raise BadParam("merge inputs must not carry ancillas")
        rep = validate(s)
        if not rep.ok:
            raise MalformedComponent(
                f"{len(rep.violations)} bad components; first: {rep.violations[0][2]}"
            )
    if a.M != b.M:
        raise BasisMismatch(f"orbital counts differ: {a.M} vs {b.M}")
    M = a.M
    n_out = a.layout.n_reg + b.layout.n_reg
    spec = SortingNetworkSpec.adjacent(n_out)
    T = spec.n_comparators
    # ancillas: T records, n_out-1 equality flags, 1 sentinel marker, 1 flag
    layout = build_layout(M, n_out, T + n_out + 1)
    b_width = layout.b
    records = [layout.anc_qubit(t) for t in range(T)]
    eqs = [layout.anc_qubit(T + k) for k in range(n_out - 1)]
    tmp = layout.anc_qubit(T + n_out - 1)
    flag = layout.anc_qubit(T + n_out)

    joint = np.kron(b.state.amps, a.state.amps)  # a occupies the low registers

    circ = sorting_network_circuit(
        layout, spec, records, with_z=True, sentinel_exempt=True, exempt_anc=tmp
    )
    dup = Circuit(layout)
    for k in range(n_out - 1):
        dup.extend(equality_flag_gates(layout, k, k + 1, eqs[k]))
        both = list(layout.register_qubits(k)) + list(layout.register_qubits(k + 1))
        dup.add(mcx(both, eqs[k]))  # subtract the sentinel-sentinel case
    orgate = Circuit(layout)
    for q in eqs:
        orgate.add(x(q))
    orgate.add(mcx(eqs, flag))
    orgate.add(x(flag))
    for q in eqs:
        orgate.add(x(q))
    full = circ + dup + orgate + dup.inverse()

    idx0 = np.flatnonzero(joint)
    oi, oa = sparse_action(full, idx0, joint[idx0])

    reg_dim = 1 << (n_out * b_width)
    # scratch = eq + tmp ancilla bits, which must have come back clean
    scratch = (oi >> np.int64(n_out * b_width + T)) & np.int64((1 << n_out) - 1)
    keep = scratch == 0
    leak_sq = float(np.sum(np.abs(oa[~keep]) ** 2))
    leak = math.sqrt(max(leak_sq, 0.0))
    if leak > 1e-10:
        raise EntangledAncilla(f"scratch ancillas kept amplitude {leak:.2e}")
    ki = oi[keep]
    ka = oa[keep]
    flag_bits = ki >> np.int64(n_out * b_width + T + n_out)
    rec_bits = (ki >> np.int64(n_out * b_width)) & np.int64((1 << T) - 1)
    sys_bits = ki & np.int64(reg_dim - 1)
    clean = np.zeros((2, 1 << T, reg_dim), dtype=complex)
    np.add.at(clean, (flag_bits, rec_bits, sys_bits), ka)
    dup_prob = float(np.linalg.norm(clean[1]) ** 2)

    A = clean.transpose(1, 0, 2).reshape(1 << T, 2 * reg_dim)
    n_total = a.N + b.N if (a.N is not None and b.N is not None) else None
    try:
        _, rest = _rank_one_split(A)
        out_layout = build_layout(M, n_out, 1)
        state = EncodedState(Statevector(rest.copy()), SORTED_LIST, out_layout, n_total)
        flag_q = out_layout.anc_qubit(0)
        discarded = True
    except EntangledAncilla:
        out_layout = build_layout(M, n_out, T + 1)
        # (flag, records, system) is already the layout's ancilla order
        kept = clean.reshape(-1).copy()
        state = EncodedState(Statevector(kept), SORTED_LIST, out_layout, n_total)
        flag_q = out_layout.anc_qubit(T)
        discarded = False
    return MergeResult(
        state=state,
        flag_qubit=flag_q,
        duplicate_probability=dup_prob,
        records_discarded=discarded,
        gate_count=count_gates(full),
    )
