"""Majorana and ladder circuits against the dense Fock-space oracle."""

import numpy as np
import pytest

from fermiconv import (
    FockSpace,
    OccupationBitstring,
    apply_ladder,
    build_layout,
    encode_first_quantized_determinant,
    encode_sorted_list,
    majorana_circuit,
    sorted_list_to_fock,
)
from fermiconv.circuits import basis_action
from fermiconv.encodings import with_ancillas
from fermiconv.errors import (
    BadConstant,
    BadParam,
    DisciplineMismatch,
    NoSlack,
)
from fermiconv.fci import ladder_matrix
from fermiconv.majorana import (
    N_WORK_ANCILLAS,
    bit_flip_circuit,
    sgn_rank_circuit,
)


def _enc(M, indices, n_reg, n_anc=0):
    return encode_sorted_list(
        OccupationBitstring.from_indices(M, indices), n_reg, n_anc
    )


def test_sgn_rank_zero_is_identity():
    lay = build_layout(4, 3, 1)
    assert len(sgn_rank_circuit(lay, 0, lay.anc_qubit(0))) == 0


def test_sgn_rank_phases():
    lay = build_layout(4, 3, 1)
    anc = lay.anc_qubit(0)
    # |{1,3}>, p=2: one occupied index <= 2
    out, ph = basis_action(sgn_rank_circuit(lay, 2, anc), lay.basis_index((1, 3, 7)))
    assert lay.values(out) == (1, 3, 7) and ph == -1
    # |{1,2}>, p=3: two indices <= 3
    out, ph = basis_action(sgn_rank_circuit(lay, 3, anc), lay.basis_index((1, 2, 7)))
    assert lay.values(out) == (1, 2, 7) and ph == 1
    with pytest.raises(BadConstant):
        sgn_rank_circuit(lay, 5, anc)


def test_bit_flip_insert_and_remove():
    lay = build_layout(4, 4, N_WORK_ANCILLAS)
    ancs = [lay.anc_qubit(j) for j in range(N_WORK_ANCILLAS)]
    circ = bit_flip_circuit(lay, 2, ancs)
    out, ph = basis_action(circ, lay.basis_index((1, 3, 7, 7)))
    assert lay.values(out) == (1, 2, 3, 7) and ph == 1
    out, ph = basis_action(circ, lay.basis_index((1, 2, 3, 7)))
    assert lay.values(out) == (1, 3, 7, 7) and ph == 1


def test_bit_flip_involution_exhaustive():
    M = 5
    lay = build_layout(M, 3, N_WORK_ANCILLAS)
    ancs = [lay.anc_qubit(j) for j in range(N_WORK_ANCILLAS)]
    states = [
        OccupationBitstring(M, mask)
        for mask in range(1 << M)
        if bin(mask).count("1") <= 3
    ]
    for p in range(1, M + 1):
        circ = bit_flip_circuit(lay, p, ancs)
        for x in states:
            if x.N == 3 and p not in x.indices():
                continue  # no slack: the circuit fixes these by design
            idx = lay.basis_index(tuple(x.indices()) + (lay.sentinel,) * (3 - x.N))
            once, ph1 = basis_action(circ, idx)
            assert once >> (3 * lay.b) == 0  # work ancillas restored
            twice, ph2 = basis_action(circ, once)
            assert twice == idx and ph1 * ph2 == 1


def test_majorana_on_vacuum():
    vac = _enc(2, (), 2, N_WORK_ANCILLAS)
    one = _enc(2, (1,), 2, N_WORK_ANCILLAS)
    g1 = majorana_circuit(vac.layout, 1)
    assert g1.scalar == 1.0 + 0.0j
    np.testing.assert_allclose(
        g1.apply(vac.state).amps, one.state.amps, atol=1e-12
    )
    g2 = majorana_circuit(vac.layout, 2)
    assert g2.scalar == 1.0j
    np.testing.assert_allclose(
        g2.apply(vac.state).amps, 1.0j * one.state.amps, atol=1e-12
    )


def test_majorana_validation():
    lay = build_layout(2, 2, N_WORK_ANCILLAS)
    with pytest.raises(BadParam):
        majorana_circuit(lay, 0)
    with pytest.raises(BadParam):
        majorana_circuit(lay, 5)
    with pytest.raises(BadParam):
        majorana_circuit(build_layout(2, 2, 1), 1)


def _gamma_matrix(M, n_reg, mu):
    """Dense Majorana action on the valid sorted-list subspace."""
    lay = build_layout(M, n_reg, N_WORK_ANCILLAS)
    g = majorana_circuit(lay, mu)
    states = [
        OccupationBitstring(M, mask)
        for mask in range(1 << M)
        if bin(mask).count("1") <= n_reg
    ]
    slots = {}
    for k, x in enumerate(states):
        vals = tuple(x.indices()) + (lay.sentinel,) * (n_reg - x.N)
        slots[lay.basis_index(vals)] = k
    mat = np.zeros((len(states), len(states)), dtype=complex)
    for k, x in enumerate(states):
        vals = tuple(x.indices()) + (lay.sentinel,) * (n_reg - x.N)
        out, ph = basis_action(g.circuit, lay.basis_index(vals))
        mat[slots[out], k] = g.scalar * ph
    return mat


def test_gamma_hermitian_and_anticommuting():
    M, n_reg = 3, 5
    mats = {mu: _gamma_matrix(M, n_reg, mu) for mu in range(1, 2 * M + 1)}
    eye = np.eye(mats[1].shape[0])
    for a in range(1, 2 * M + 1):
        np.testing.assert_allclose(mats[a], mats[a].conj().T, atol=1e-10)
        for b in range(a, 2 * M + 1):
            anti = mats[a] @ mats[b] + mats[b] @ mats[a]
            np.testing.assert_allclose(
                anti, (2.0 if a == b else 0.0) * eye, atol=1e-10
            )


def test_ladder_examples():
    vac = _enc(2, (), 2)
    out = apply_ladder(vac, 2, "create")
    two = _enc(2, (2,), 2)
    np.testing.assert_allclose(out.state.amps, two.state.amps, atol=1e-12)
    assert out.N == 1

    # a2+ on |{1}> = -|{1,2}> under a1+ a2+ |vac> = +|{1,2}>
    one = _enc(2, (1,), 2)
    out = apply_ladder(one, 2, "create")
    both = _enc(2, (1, 2), 2)
    np.testing.assert_allclose(out.state.amps, -both.state.amps, atol=1e-12)

    # Pauli exclusion
    out = apply_ladder(one, 1, "create")
    assert out.state.norm() < 1e-12
    assert out.N == 2

    # annihilation round trip
    out = apply_ladder(both, 2, "annihilate")
    np.testing.assert_allclose(out.state.amps, -one.state.amps, atol=1e-12)
    assert out.N == 1


def test_ladder_matches_fock_oracle():
    M, n_reg = 3, 5
    space = FockSpace(M)
    for mask in range(1 << M):
        x = OccupationBitstring(M, mask)
        enc = _enc(M, x.indices(), n_reg)
        fock_in = np.zeros(space.dim, dtype=complex)
        fock_in[mask] = 1.0
        for p in range(1, M + 1):
            for kind in ("create", "annihilate"):
                got = sorted_list_to_fock(apply_ladder(enc, p, kind))
                want = ladder_matrix(p, kind, space) @ fock_in
                np.testing.assert_allclose(got, want, atol=1e-10)


def test_number_operator_counts_electrons():
    M, n_reg = 3, 5
    rng = np.random.default_rng(5)
    # random 2-electron superposition
    det_masks = [m for m in range(1 << M) if bin(m).count("1") == 2]
    coefs = rng.standard_normal(len(det_masks)) + 1j * rng.standard_normal(len(det_masks))
    coefs /= np.linalg.norm(coefs)
    enc = _enc(M, OccupationBitstring(M, det_masks[0]).indices(), n_reg)
    amps = np.zeros_like(enc.state.amps)
    for c, m in zip(coefs, det_masks):
        amps += c * _enc(M, OccupationBitstring(M, m).indices(), n_reg).state.amps
    enc.state.amps[:] = amps
    total = np.zeros_like(amps)
    for p in range(1, M + 1):
        step = apply_ladder(enc, p, "annihilate")
        step = apply_ladder(step, p, "create")
        total += step.state.amps
    np.testing.assert_allclose(total, 2.0 * amps, atol=1e-10)


def test_ladder_no_slack():
    full = _enc(3, (2,), 1)
    with pytest.raises(NoSlack):
        apply_ladder(full, 1, "create")
    # fine when p is already present: the toggle only removes
    out = apply_ladder(full, 2, "annihilate")
    assert abs(out.state.amps[full.layout.basis_index((full.layout.sentinel,))] - 1) < 1e-12


def test_ladder_rejects_wrong_discipline_and_dirty_ancillas():
    fq = encode_first_quantized_determinant(
        OccupationBitstring.from_indices(3, (1, 2))
    )
    with pytest.raises(DisciplineMismatch):
        apply_ladder(fq, 1, "create")
    enc = with_ancillas(_enc(3, (1,), 2), N_WORK_ANCILLAS)
    reg_dim = 1 << (enc.layout.n_reg * enc.layout.b)
    enc.state.amps[:] = 0
    enc.state.amps[reg_dim + enc.layout.basis_index((1, 7))] = 1.0  # anc 0 set
    with pytest.raises(BadParam):
        apply_ladder(enc, 2, "create")
    with pytest.raises(BadParam):
        apply_ladder(_enc(3, (1,), 2), 1, "make")
    with pytest.raises(BadConstant):
        apply_ladder(_enc(3, (1,), 2), 4, "create")
