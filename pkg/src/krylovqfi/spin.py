"""Collective spin operators, coherent states and symmetry sectors.

Two representations of N qubits are supported:

* ``symmetric``: the permutation-symmetric (Dicke) subspace, spin j = N/2,
  dimension N + 1, basis ordered m = +j, j - 1, ..., -j.
* ``full``: the 2**N tensor-product space.  Qubit 1 is the most significant
  bit of the basis index and bit value 0 means spin up, so for N = 2 the
  basis reads up-up, up-down, down-up, down-down.

Symmetry sectors (bit reversal, spin-flip parity) of the full space are
built from exact symmetrised / antisymmetrised basis combinations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.special import gammaln, xlogy

from .errors import BasisMismatchError, CapacityError, SymmetryMismatchError

MAX_FULL_QUBITS = 14

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12


class Representation(str, enum.Enum):
    SYMMETRIC = "symmetric"
    FULL = "full"
    SECTOR = "sector"


class Kind(str, enum.Enum):
    HERMITIAN = "hermitian"
    UNITARY = "unitary"


@dataclass(frozen=True)
class Basis:
    """Which space a vector or matrix lives in."""

    representation: Representation
    n_qubits: int
    dimension: int
    sector_label: str | None = None

    def __post_init__(self):
        rep = Representation(self.representation)
        object.__setattr__(self, "representation", rep)
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        if rep is Representation.SYMMETRIC and self.dimension != self.n_qubits + 1:
            raise ValueError("symmetric basis must have dimension N + 1")
        if rep is Representation.FULL and self.dimension != 2**self.n_qubits:
            raise ValueError("full basis must have dimension 2**N")
        if rep is Representation.SECTOR and self.sector_label is None:
            raise ValueError("sector basis needs a sector_label")

    @classmethod
    def symmetric(cls, n_qubits: int) -> Basis:
        return cls(Representation.SYMMETRIC, n_qubits, n_qubits + 1)

    @classmethod
    def full(cls, n_qubits: int) -> Basis:
        return cls(Representation.FULL, n_qubits, 2**n_qubits)

    @classmethod
    def sector(cls, n_qubits: int, dimension: int, label: str) -> Basis:
        return cls(Representation.SECTOR, n_qubits, dimension, label)

    def to_dict(self) -> dict:
        return {
            "representation": self.representation.value,
            "n_qubits": self.n_qubits,
            "dimension": self.dimension,
            "sector_label": self.sector_label,
        }


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense square matrix tagged with its basis and kind.

    The invariant matching ``kind`` is checked on construction; pass
    ``check=False`` only for matrices whose structure is guaranteed.
    """

    matrix: np.ndarray
    basis: Basis
    kind: Kind = Kind.HERMITIAN
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        if m.shape[0] != self.basis.dimension:
            raise BasisMismatchError(
                f"matrix of size {m.shape[0]} does not match basis dimension {self.basis.dimension}"
            )
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "matrix", m)
        if self.check:
            if kind is Kind.HERMITIAN:
                scale = max(1.0, float(np.max(np.abs(m))))
                if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * scale:
                    raise ValueError("matrix is not Hermitian")
            elif np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) > UNITARY_TOL:
                raise ValueError("matrix is not unitary")

    @property
    def dim(self) -> int:
        return self.basis.dimension

    def __matmul__(self, other):
        if isinstance(other, Operator):
            _require_same_basis(self.basis, other.basis)
            return self.matrix @ other.matrix
        return self.matrix @ other


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector in a given basis."""

    amplitudes: np.ndarray
    basis: Basis

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (self.basis.dimension,):
            raise BasisMismatchError("amplitude length does not match basis dimension")
        if abs(np.vdot(a, a).real - 1.0) > NORM_TOL:
            raise ValueError("state is not normalized")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def normalized(cls, amplitudes, basis: Basis) -> StateVector:
        a = np.asarray(amplitudes, dtype=complex)
        return cls(a / np.linalg.norm(a), basis)

    def expect(self, op: Operator) -> complex:
        _require_same_basis(self.basis, op.basis)
        return np.vdot(self.amplitudes, op.matrix @ self.amplitudes)


def _require_same_basis(a: Basis, b: Basis) -> None:
    if a != b:
        raise BasisMismatchError(f"basis mismatch: {a} vs {b}")


def check_capacity(n_qubits: int, max_qubits: int | None = None) -> None:
    cap = MAX_FULL_QUBITS if max_qubits is None else max_qubits
    if n_qubits > cap:
        raise CapacityError(
            f"full representation with N={n_qubits} exceeds the cap of {cap} qubits"
        )


def magnetic_numbers(n_qubits: int) -> np.ndarray:
    """m values of the Dicke basis, from +j down to -j."""
    j = n_qubits / 2
    return j - np.arange(n_qubits + 1)


def _symmetric_ops(n_qubits):
    j = n_qubits / 2
    m = magnetic_numbers(n_qubits)
    # <m+1|J+|m> sits one row above the diagonal because m decreases with index
    raise_elems = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.diag(raise_elems, k=1).astype(complex)
    jx = (jp + jp.conj().T) / 2
    jy = (jp - jp.conj().T) / 2j
    jz = np.diag(m).astype(complex)
    return jx, jy, jz


def _bit_up(n_qubits: int) -> np.ndarray:
    """Boolean table up[s, i]: qubit i (0-based) of basis index s points up."""
    s = np.arange(2**n_qubits)[:, None]
    shifts = n_qubits - 1 - np.arange(n_qubits)[None, :]
    return ((s >> shifts) & 1) == 0


def _full_ops(n_qubits):
    dim = 2**n_qubits
    idx = np.arange(dim)
    up = _bit_up(n_qubits)
    jx = np.zeros((dim, dim), dtype=complex)
    jy = np.zeros((dim, dim), dtype=complex)
    for i in range(n_qubits):
        flipped = idx ^ (1 << (n_qubits - 1 - i))
        jx[flipped, idx] += 0.5
        # sigma_y |up> = i |down>,  sigma_y |down> = -i |up>
        jy[flipped, idx] += np.where(up[:, i], 0.5j, -0.5j)
    jz = np.diag(np.where(up, 0.5, -0.5).sum(axis=1)).astype(complex)
    return jx, jy, jz


def build_collective_ops(
    n_qubits: int, rep: str | Representation = "symmetric", max_qubits: int | None = None
) -> dict[str, Operator]:
    """Collective spin operators ``{"x": Jx, "y": Jy, "z": Jz}``."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    rep = Representation(rep)
    if rep is Representation.SYMMETRIC:
        mats, basis = _symmetric_ops(n_qubits), Basis.symmetric(n_qubits)
    elif rep is Representation.FULL:
        check_capacity(n_qubits, max_qubits)
        mats, basis = _full_ops(n_qubits), Basis.full(n_qubits)
    else:
        raise ValueError("collective operators are built in the symmetric or full representation")
    return {ax: Operator(m, basis, Kind.HERMITIAN, check=False) for ax, m in zip("xyz", mats)}


def flip_table(n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """Basis indices with qubit i flipped, ``flips[:, i]``, and the ``up`` table."""
    idx = np.arange(2**n_qubits)[:, None]
    flips = idx ^ (1 << (n_qubits - 1 - np.arange(n_qubits)))[None, :]
    return flips, _bit_up(n_qubits)


def coherent_spin_state(
    n_qubits: int,
    theta: float,
    phi: float,
    rep: str | Representation = "symmetric",
    max_qubits: int | None = None,
) -> StateVector:
    """Spin coherent state pointing along (theta, phi).

    Symmetric amplitudes are ``sqrt(C(N,k)) cos(theta/2)^(N-k)
    (e^{i phi} sin(theta/2))^k`` with k = j - m, evaluated in log space so
    that N in the hundreds does not overflow.
    """
    rep = Representation(rep)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    # cos(pi/2) is 6e-17 in floating point; pole states must be exact
    c = 0.0 if abs(c) < 1e-15 else c
    s = 0.0 if abs(s) < 1e-15 else s
    if rep is Representation.FULL:
        check_capacity(n_qubits, max_qubits)
        single = np.array([c, s * np.exp(1j * phi)])
        amp = np.ones(1, dtype=complex)
        for _ in range(n_qubits):
            amp = np.kron(amp, single)
        return StateVector.normalized(amp, Basis.full(n_qubits))
    if rep is not Representation.SYMMETRIC:
        raise ValueError("coherent states are built in the symmetric or full representation")
    n = n_qubits
    k = np.arange(n + 1)
    log_binom = 0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))
    # xlogy keeps 0 * log(0) = 0 at the poles
    log_mag = log_binom + xlogy(n - k, abs(c)) + xlogy(k, abs(s))
    sign = np.sign(c) ** (n - k) * np.sign(s) ** k
    amp = sign * np.exp(log_mag) * np.exp(1j * phi * k)
    return StateVector.normalized(amp, Basis.symmetric(n))


def ghz_state(n_qubits: int, rep: str | Representation = "symmetric") -> StateVector:
    """(|up...up> + |down...down>)/sqrt(2)."""
    rep = Representation(rep)
    basis = Basis.symmetric(n_qubits) if rep is Representation.SYMMETRIC else Basis.full(n_qubits)
    amp = np.zeros(basis.dimension, dtype=complex)
    amp[0] = amp[-1] = 1 / np.sqrt(2)
    return StateVector(amp, basis)


def dicke_state(n_qubits: int, m: float) -> StateVector:
    """Jz eigenstate |j, m> in the symmetric representation."""
    ms = magnetic_numbers(n_qubits)
    hit = np.flatnonzero(np.isclose(ms, m))
    if hit.size != 1:
        raise ValueError(f"m={m} is not a valid magnetic number for N={n_qubits}")
    amp = np.zeros(n_qubits + 1, dtype=complex)
    amp[hit[0]] = 1.0
    return StateVector(amp, Basis.symmetric(n_qubits))


# ---------------------------------------------------------------- sectors


class Symmetry(str, enum.Enum):
    BIT_REVERSAL = "bit_reversal"
    PARITY = "parity"


_SECTOR_NAMES = {Symmetry.BIT_REVERSAL: "reflection", Symmetry.PARITY: "parity"}


@dataclass(frozen=True, eq=False)
class Sector:
    """An operator restricted to one symmetry eigensector.

    ``isometry`` has orthonormal columns spanning the sector inside the
    parent space, so ``isometry.conj().T @ M @ isometry`` restricts and
    ``isometry @ v`` lifts.
    """

    operator: Operator
    basis: Basis
    isometry: np.ndarray | sparse.csr_array

    def restrict_operator(self, op: Operator) -> Operator:
        return Operator(_sandwich(self.isometry, op.matrix), self.basis, op.kind)

    def restrict_state(self, psi: StateVector) -> StateVector:
        a = self.isometry.conj().T @ psi.amplitudes
        if abs(np.vdot(a, a).real - 1.0) > 1e-10:
            raise ValueError("state is not contained in this sector")
        return StateVector.normalized(a, self.basis)

    def lift_state(self, psi: StateVector, parent: Basis) -> StateVector:
        return StateVector.normalized(self.isometry @ psi.amplitudes, parent)


def _sandwich(iso, m: np.ndarray) -> np.ndarray:
    """iso^dagger m iso, using only products with iso^dagger on the left so a
    sparse isometry is never densified."""
    adj = iso.conj().T
    left = adj @ m
    return np.asarray(adj @ left.conj().T).conj().T


def symmetry_operator(n_qubits: int, symmetry: str | Symmetry) -> np.ndarray:
    """Dense matrix of the bit-reversal permutation or of prod_i sigma_z^(i)."""
    symmetry = Symmetry(symmetry)
    dim = 2**n_qubits
    if symmetry is Symmetry.PARITY:
        downs = (~_bit_up(n_qubits)).sum(axis=1)
        return np.diag(np.where(downs % 2 == 0, 1.0, -1.0))
    perm = np.zeros((dim, dim))
    perm[_reversed_indices(n_qubits), np.arange(dim)] = 1.0
    return perm


def _reversed_indices(n_qubits: int) -> np.ndarray:
    s = np.arange(2**n_qubits)
    r = np.zeros_like(s)
    for i in range(n_qubits):
        r |= ((s >> i) & 1) << (n_qubits - 1 - i)
    return r


def sector_isometry(n_qubits: int, symmetry: str | Symmetry, sector: str = "even") -> np.ndarray:
    """Orthonormal basis of one eigensector as a sparse (2^N, k) array; each
    column holds one basis string or a normalized reflected pair."""
    symmetry = Symmetry(symmetry)
    if sector not in ("even", "odd"):
        raise ValueError("sector must be 'even' or 'odd'")
    dim = 2**n_qubits
    if symmetry is Symmetry.PARITY:
        downs = (~_bit_up(n_qubits)).sum(axis=1)
        keep = np.flatnonzero(downs % 2 == (0 if sector == "even" else 1))
        return sparse.csr_array(
            (np.ones(keep.size), (keep, np.arange(keep.size))), shape=(dim, keep.size)
        )
    s = np.arange(dim)
    r = _reversed_indices(n_qubits)
    sign = 1.0 if sector == "even" else -1.0
    fixed = s[s == r] if sector == "even" else s[:0]
    pairs = s[s < r]
    cols = fixed.size + np.arange(pairs.size)
    rows = np.concatenate([fixed, pairs, r[pairs]])
    cols = np.concatenate([np.arange(fixed.size), cols, cols])
    vals = np.concatenate(
        [np.ones(fixed.size), np.full(pairs.size, 1 / np.sqrt(2)), np.full(pairs.size, sign / np.sqrt(2))]
    )
    return sparse.csr_array((vals, (rows, cols)), shape=(dim, fixed.size + pairs.size))


def symmetry_sector(
    op: Operator,
    symmetry: str | Symmetry,
    sector: str = "even",
    tol: float = 1e-9,
) -> Sector:
    """Restrict a full-representation operator to one symmetry eigensector."""
    symmetry = Symmetry(symmetry)
    if op.basis.representation is not Representation.FULL:
        raise BasisMismatchError("symmetry sectors are defined on the full representation")
    n = op.basis.n_qubits
    m = op.matrix
    if symmetry is Symmetry.PARITY:
        d = np.diag(symmetry_operator(n, symmetry))
        comm = (d[:, None] - d[None, :]) * m
    else:
        r = _reversed_indices(n)  # an involution, so P M P = M[r][:, r]
        comm = m[np.ix_(r, r)] - m
    if np.max(np.abs(comm), initial=0.0) > tol:
        raise SymmetryMismatchError(f"operator does not commute with {symmetry.value}")
    iso = sector_isometry(n, symmetry, sector)
    basis = Basis.sector(n, iso.shape[1], f"{_SECTOR_NAMES[symmetry]}-{sector}")
    return Sector(Operator(_sandwich(iso, m), basis, op.kind), basis, iso)


def collective_parity_sectors(op: Operator, axis: str = "x", tol: float = 1e-9) -> list[Sector]:
    """Split a symmetric-representation operator by the pi rotation about ``axis``.

    The rotation exp(-i pi J_axis) is diagonal in the eigenbasis of J_axis
    with sign (-1)^(j - m), so the sectors are read off from the integer
    j - m of each eigenvector.  Returns ``[even, odd]``.
    """
    if op.basis.representation is not Representation.SYMMETRIC:
        raise BasisMismatchError("collective parity needs the symmetric representation")
    n = op.basis.n_qubits
    jax = build_collective_ops(n)[axis].matrix
    vals, vecs = np.linalg.eigh(jax)
    k = np.rint(n / 2 - vals).astype(int)
    rotated = vecs.conj().T @ op.matrix @ vecs
    out = []
    for parity, name in ((0, "even"), (1, "odd")):
        keep = np.flatnonzero(k % 2 == parity)
        other = np.flatnonzero(k % 2 != parity)
        if other.size and np.max(np.abs(rotated[np.ix_(keep, other)])) > tol:
            raise SymmetryMismatchError(f"operator does not commute with the {axis}-parity")
        basis = Basis.sector(n, keep.size, f"{axis}-parity-{name}")
        block = rotated[np.ix_(keep, keep)]
        out.append(Sector(Operator(block, basis, op.kind), basis, vecs[:, keep]))
    return out
