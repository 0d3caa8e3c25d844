"""Dense Fock-space oracle: ladder matrices, k-RDMs, determinant rotations,
toy Hamiltonians, and ionization/attachment overlap tables.

This module is deliberately a different algorithm family from the circuit
side: operators act on the 2^M occupation basis (bit p-1 of a mask is the
occupation of orbital p, masks in increasing integer order), so agreement
with the register circuits is evidence rather than tautology.

Sign convention (shared with the circuit layer): a creation operator picks
up (-1)^(#occupied q < p), i.e. a_p^dag |x> = (-1)^par * |x + e_p| when
orbital p is empty. Under it the ascending product a_1^dag a_2^dag ... |vac>
carries a plus sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import (
    BadParam,
    IndexOutOfRange,
    NotUnitary,
    SectorEmpty,
)

FOCK_CAP = 12  # dense 4096-dim cap


def _popcount(masks: np.ndarray, M: int) -> np.ndarray:
    out = np.zeros_like(masks)
    for s in range(M):
        out += (masks >> s) & 1
    return out


@dataclass(frozen=True)
class FockSpace:
    """All 2^M occupation masks, in increasing mask order."""

    M: int

    def __post_init__(self):
        if not 1 <= self.M <= FOCK_CAP:
            raise BadParam(f"M={self.M} outside 1..{FOCK_CAP}")

    @property
    def dim(self) -> int:
        return 1 << self.M

    def masks(self) -> np.ndarray:
        return np.arange(self.dim, dtype=np.int64)

    def sector_indices(self, n: int) -> np.ndarray:
        """Mask indices of the n-electron sector."""
        m = self.masks()
        return m[_popcount(m, self.M) == n]

    def check_orbital(self, p: int) -> None:
        if not 1 <= p <= self.M:
            raise IndexOutOfRange(f"orbital {p} outside 1..{self.M}")


def apply_ladder_fock(vec: np.ndarray, p: int, kind: str, space: FockSpace) -> np.ndarray:
    """a_p or a_p^dag applied to a Fock vector, O(2^M), no matrix built."""
    space.check_orbital(p)
    masks = space.masks()
    below = masks & ((1 << (p - 1)) - 1)
    sign = 1.0 - 2.0 * (_popcount(below, space.M) & 1)
    occ = (masks >> (p - 1)) & 1
    out = np.zeros_like(vec, dtype=complex)
    if kind == "create":
        src = occ == 0
    elif kind == "annihilate":
        src = occ == 1
    else:
        raise BadParam(f"kind {kind!r} not create/annihilate")
    flipped = masks ^ (1 << (p - 1))
    out[flipped[src]] = sign[src] * vec[src]
    return out


def ladder_matrix(p: int, kind: str, space: FockSpace) -> np.ndarray:
    """Dense ladder matrix with Jordan-Wigner signs; a_p^dag = a_p^T here
    because all entries are real."""
    space.check_orbital(p)
    dim = space.dim
    mat = np.zeros((dim, dim))
    masks = space.masks()
    below = masks & ((1 << (p - 1)) - 1)
    sign = 1.0 - 2.0 * (_popcount(below, space.M) & 1)
    occ = (masks >> (p - 1)) & 1
    if kind == "create":
        src = masks[occ == 0]
    elif kind == "annihilate":
        src = masks[occ == 1]
    else:
        raise BadParam(f"kind {kind!r} not create/annihilate")
    mat[src ^ (1 << (p - 1)), src] = sign[occ == (0 if kind == "create" else 1)]
    return mat


def vacuum(space: FockSpace) -> np.ndarray:
    v = np.zeros(space.dim, dtype=complex)
    v[0] = 1.0
    return v


def determinant_vector(space: FockSpace, indices) -> np.ndarray:
    """Basis vector of the determinant with the given (distinct) orbitals,
    i.e. the ascending creation string applied to the vacuum (plus sign)."""
    mask = 0
    for p in indices:
        space.check_orbital(p)
        if mask & (1 << (p - 1)):
            raise BadParam(f"orbital {p} repeated")
        mask |= 1 << (p - 1)
    v = np.zeros(space.dim, dtype=complex)
    v[mask] = 1.0
    return v


def creation_string(space: FockSpace, indices) -> np.ndarray:
    """a_{i1}^dag a_{i2}^dag ... a_{ik}^dag |vac> applied right to left.

    Returns the zero vector when an index repeats (Pauli exclusion).
    """
    v = vacuum(space)
    for p in reversed(tuple(indices)):
        v = apply_ladder_fock(v, p, "create", space)
    return v


def k_rdm(state: np.ndarray, ps, qs, space: FockSpace) -> complex:
    """<a_{p1}^dag ... a_{pk}^dag a_{qk} ... a_{q1}>, exact.

    The operator string is applied to a copy of the state right to left;
    the value is the inner product with the original state.
    """
    ps = tuple(ps)
    qs = tuple(qs)
    if len(ps) != len(qs):
        raise BadParam("p and q index lists must have equal length")
    if abs(np.linalg.norm(state) - 1.0) > 1e-8:
        raise BadParam("state must be normalized")
    v = np.asarray(state, dtype=complex)
    for q in qs:  # a_{q1} is rightmost: apply first
        v = apply_ladder_fock(v, q, "annihilate", space)
    for p in reversed(ps):
        v = apply_ladder_fock(v, p, "create", space)
    return complex(np.vdot(state, v))


def one_rdm(state: np.ndarray, space: FockSpace) -> np.ndarray:
    d = np.empty((space.M, space.M), dtype=complex)
    for p in range(1, space.M + 1):
        for q in range(1, space.M + 1):
            d[p - 1, q - 1] = k_rdm(state, (p,), (q,), space)
    return d


def rotate_determinants(state: np.ndarray, U: np.ndarray, space: FockSpace) -> np.ndarray:
    """Single-particle rotation lifted to the Fock space.

    Each N-particle sector transforms by the N-th compound matrix of U:
    |S> -> sum_T det(U[T, S]) |T> over ascending index sets. The vacuum
    sector is invariant.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (space.M, space.M):
        raise BadParam(f"U must be {space.M}x{space.M}")
    if np.linalg.norm(U.conj().T @ U - np.eye(space.M), ord=2) > 1e-10:
        raise NotUnitary("single-particle matrix fails unitarity at 1e-10")
    out = np.zeros_like(np.asarray(state, dtype=complex))
    out[0] = state[0]
    for n in range(1, space.M + 1):
        sets = list(combinations(range(space.M), n))
        amps = {s: state[sum(1 << p for p in s)] for s in sets}
        for T in sets:
            acc = 0.0 + 0.0j
            for S in sets:
                c = amps[S]
                if c == 0:
                    continue
                acc += np.linalg.det(U[np.ix_(T, S)]) * c
            out[sum(1 << p for p in T)] = acc
    return out


def _h2_orbit_deviation(h2: np.ndarray) -> float:
    # physical pair symmetry: h_pqrs = conj(h_qpsr)
    return float(np.max(np.abs(h2 - np.conj(np.transpose(h2, (1, 0, 3, 2))))))


@dataclass
class ToyHamiltonian:
    """H = sum h1[p,q] a_p^dag a_q + 1/2 sum h2[p,q,r,s] a_p^dag a_q^dag a_r a_s.

    Coefficient tables are 0-indexed by orbital-1. Ingestion rejects
    violations of h1 = h1^dag and h_pqrs = conj(h_qpsr) instead of
    symmetrizing silently.
    """

    M: int
    h1: np.ndarray
    h2: np.ndarray = field(default=None)

    def __post_init__(self):
        self.h1 = np.asarray(self.h1, dtype=complex)
        if self.h1.shape != (self.M, self.M):
            raise BadParam(f"h1 must be {self.M}x{self.M}")
        if np.max(np.abs(self.h1 - self.h1.conj().T)) > 1e-10:
            raise BadParam("h1 is not Hermitian at 1e-10")
        if self.h2 is None:
            self.h2 = np.zeros((self.M,) * 4, dtype=complex)
        self.h2 = np.asarray(self.h2, dtype=complex)
        if self.h2.shape != (self.M,) * 4:
            raise BadParam(f"h2 must be {self.M}^4")
        dev = _h2_orbit_deviation(self.h2)
        if dev > 1e-10:
            raise BadParam(f"h2 violates h_pqrs = conj(h_qpsr) by {dev:.2e}")

    def dense_matrix(self, space: FockSpace) -> np.ndarray:
        if space.M != self.M:
            raise BadParam("space and Hamiltonian disagree on M")
        dim = space.dim
        H = np.zeros((dim, dim), dtype=complex)
        cols = space.masks()
        for p in range(1, self.M + 1):
            for q in range(1, self.M + 1):
                c = self.h1[p - 1, q - 1]
                if c == 0:
                    continue
                _accumulate_term(H, cols, c, (("a", q), ("c", p)), self.M)
        for p in range(1, self.M + 1):
            for q in range(1, self.M + 1):
                for r in range(1, self.M + 1):
                    for s in range(1, self.M + 1):
                        c = 0.5 * self.h2[p - 1, q - 1, r - 1, s - 1]
                        if c == 0:
                            continue
                        _accumulate_term(
                            H, cols, c, (("a", s), ("a", r), ("c", q), ("c", p)), self.M
                        )
        if np.max(np.abs(H - H.conj().T)) > 1e-10:
            raise BadParam("dense Hamiltonian is not Hermitian at 1e-10")
        return H


def _accumulate_term(H, cols, coef, ops, M):
    """Add coef * (op string, applied right to left == tuple order) to H."""
    cur = cols.copy()
    sign = np.ones(len(cols))
    ok = np.ones(len(cols), dtype=bool)
    for op, idx in ops:
        bit = 1 << (idx - 1)
        occ = (cur & bit) != 0
        ok &= occ if op == "a" else ~occ
        below = cur & (bit - 1)
        sign *= 1.0 - 2.0 * (_popcount(below, M) & 1)
        cur = cur ^ bit
    H[cur[ok], cols[ok]] += coef * sign[ok]


def random_toy_hamiltonian(rng: np.random.Generator, M: int, two_body: bool = True) -> ToyHamiltonian:
    """Random Hermitian toy Hamiltonian satisfying the ingestion symmetries.

    h2 is averaged over the orbit {pqrs, conj qpsr, conj srqp, rsqp}, which
    enforces both the pair symmetry and Hermiticity of the dense matrix.
    """
    a = rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M))
    h1 = (a + a.conj().T) / 2
    if two_body:
        g = rng.normal(size=(M,) * 4) + 1j * rng.normal(size=(M,) * 4)
        g = 0.25 * (
            g
            + np.conj(np.transpose(g, (1, 0, 3, 2)))
            + np.conj(np.transpose(g, (3, 2, 1, 0)))
            + np.transpose(g, (2, 3, 0, 1))
        )
    else:
        g = np.zeros((M,) * 4)
    return ToyHamiltonian(M, h1, g)


def sector_eigensystem(H: np.ndarray, space: FockSpace, n: int):
    """(eigenvalues, eigenvectors as full Fock columns) of the n-electron block."""
    idx = space.sector_indices(n)
    if len(idx) == 0:
        raise SectorEmpty(f"no {n}-electron states for M={space.M}")
    block = H[np.ix_(idx, idx)]
    vals, vecs = np.linalg.eigh(block)
    full = np.zeros((space.dim, len(idx)), dtype=complex)
    full[idx, :] = vecs
    return vals, full


def ionization_attachment_probabilities(
    H: ToyHamiltonian, i: int, N0: int
) -> tuple[np.ndarray, np.ndarray]:
    """Exact overlap tables lam_h[n] = |<Psi_{N0-1,n}| a_i |Psi_{N0,0}>|^2 and
    lam_p[n] = |<Psi_{N0+1,n}| a_i^dag |Psi_{N0,0}>|^2.

    n runs over the full target sector (dimension C(M, N0-/+1); the cited
    expression's upper limit M reads as "all sector eigenstates"). Sum rules
    sum_n lam_h = <n_i> and sum_n lam_p = 1 - <n_i> hold exactly; ground
    state degeneracy is broken deterministically (lowest eigh column).
    """
    if H.M > 8:
        raise BadParam("dense diagonalization capped at M=8")
    space = FockSpace(H.M)
    space.check_orbital(i)
    if not 0 <= N0 <= H.M:
        raise SectorEmpty(f"N0={N0} outside 0..{H.M}")
    if N0 - 1 < 0 or N0 + 1 > H.M:
        raise SectorEmpty(f"N0={N0} leaves no room for both N0-1 and N0+1 sectors")
    Hm = H.dense_matrix(space)
    _, vecs0 = sector_eigensystem(Hm, space, N0)
    psi0 = vecs0[:, 0]
    _, vh = sector_eigensystem(Hm, space, N0 - 1)
    _, vp = sector_eigensystem(Hm, space, N0 + 1)
    a_psi = apply_ladder_fock(psi0, i, "annihilate", space)
    c_psi = apply_ladder_fock(psi0, i, "create", space)
    lam_h = np.abs(vh.conj().T @ a_psi) ** 2
    lam_p = np.abs(vp.conj().T @ c_psi) ** 2
    return lam_h, lam_p


# --- ToyHamiltonian text format: H1 p q re im / H2 p q r s re im ---------


def write_toy_hamiltonian(H: ToyHamiltonian) -> str:
    lines = []
    for p in range(H.M):
        for q in range(H.M):
            zv = complex(H.h1[p, q])
            if zv != 0:
                lines.append(f"H1 {p + 1} {q + 1} {zv.real!r} {zv.imag!r}")
    for p, q, r, s in np.ndindex(*(H.M,) * 4):
        zv = complex(H.h2[p, q, r, s])
        if zv != 0:
            lines.append(f"H2 {p + 1} {q + 1} {r + 1} {s + 1} {zv.real!r} {zv.imag!r}")
    return "\n".join(lines) + "\n"


def read_toy_hamiltonian(text: str, M: int | None = None) -> ToyHamiltonian:
    """Parse H1/H2 coefficient lines; unlisted entries are zero.

    M defaults to the largest orbital index mentioned.
    """
    entries1: list[tuple[int, int, complex]] = []
    entries2: list[tuple[int, int, int, int, complex]] = []
    seen = 0
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        tok = ln.split()
        if tok[0] == "H1" and len(tok) == 5:
            p, q = int(tok[1]), int(tok[2])
            entries1.append((p, q, float(tok[3]) + 1j * float(tok[4])))
            seen = max(seen, p, q)
        elif tok[0] == "H2" and len(tok) == 7:
            p, q, r, s = (int(t) for t in tok[1:5])
            entries2.append((p, q, r, s, float(tok[5]) + 1j * float(tok[6])))
            seen = max(seen, p, q, r, s)
        else:
            raise BadParam(f"bad Hamiltonian line: {ln!r}")
    if M is None:
        M = seen
    if M < 1:
        raise BadParam("no coefficients and no explicit M")
    h1 = np.zeros((M, M), dtype=complex)
    h2 = np.zeros((M,) * 4, dtype=complex)
    for p, q, zv in entries1:
        h1[p - 1, q - 1] = zv
    for p, q, r, s, zv in entries2:
        h2[p - 1, q - 1, r - 1, s - 1] = zv
    return ToyHamiltonian(M, h1, h2)
