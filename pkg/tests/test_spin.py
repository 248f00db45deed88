import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krylovqfi.errors import BasisMismatchError, CapacityError, SymmetryMismatchError
from krylovqfi.models import ising_hamiltonian
from krylovqfi.spin import (
    Basis,
    Kind,
    Operator,
    StateVector,
    Symmetry,
    build_collective_ops,
    coherent_spin_state,
    collective_parity_sectors,
    dicke_state,
    ghz_state,
    magnetic_numbers,
    symmetry_sector,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def kron_site(op, i, n):
    """op on qubit i (0-based, most significant first) by explicit Kronecker products."""
    mats = [np.eye(2)] * n
    mats[i] = op
    out = np.ones((1, 1))
    for m in mats:
        out = np.kron(out, m)
    return out


def test_symmetric_jz_n2():
    jz = build_collective_ops(2)["z"].matrix
    assert np.allclose(jz, np.diag([1, 0, -1]))


def test_full_jz_n2():
    jz = build_collective_ops(2, "full")["z"].matrix
    assert np.allclose(jz, np.diag([1, 0, 0, -1]))


def test_symmetric_jx_ladder_elements_n3():
    j = 1.5
    jx = build_collective_ops(3)["x"].matrix
    m = magnetic_numbers(3)
    for a in range(3):
        # rows ordered m = j..-j, so entry (a, a+1) is <m|Jx|m-1>
        expected = np.sqrt(j * (j + 1) - m[a] * (m[a] - 1)) / 2
        assert jx[a, a + 1] == pytest.approx(expected, abs=1e-14)
        assert jx[a + 1, a] == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_full_ops_match_kronecker_oracle(n):
    ops = build_collective_ops(n, "full")
    for ax, pauli in zip("xyz", (SX, SY, SZ)):
        oracle = sum(kron_site(pauli, i, n) for i in range(n)) / 2
        assert np.allclose(ops[ax].matrix, oracle, atol=1e-14)


@pytest.mark.parametrize("rep,n", [("symmetric", 1), ("symmetric", 57), ("symmetric", 400), ("full", 1), ("full", 8)])
def test_su2_commutators(rep, n):
    j = build_collective_ops(n, rep)
    for a, b, c in (("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")):
        comm = j[a].matrix @ j[b].matrix - j[b].matrix @ j[a].matrix
        assert np.max(np.abs(comm - 1j * j[c].matrix)) < 1e-10


@pytest.mark.parametrize("n", [1, 10, 200])
def test_casimir_symmetric(n):
    j = build_collective_ops(n)
    cas = sum(j[a].matrix @ j[a].matrix for a in "xyz")
    s = n / 2
    assert np.max(np.abs(cas - s * (s + 1) * np.eye(n + 1))) < 1e-10 * max(1, s * s)


def test_capacity_error():
    with pytest.raises(CapacityError):
        build_collective_ops(15, "full")
    with pytest.raises(CapacityError):
        build_collective_ops(5, "full", max_qubits=4)


def test_operator_validation():
    basis = Basis.symmetric(1)
    with pytest.raises(ValueError):
        Operator(np.array([[0, 1], [0, 0]]), basis)
    with pytest.raises(ValueError):
        Operator(np.eye(2) * 2, basis, Kind.UNITARY)
    with pytest.raises(BasisMismatchError):
        Operator(np.eye(3), basis)


def test_state_validation():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]), Basis.symmetric(1))
    with pytest.raises(BasisMismatchError):
        StateVector(np.array([1.0, 0, 0]), Basis.symmetric(1))


def test_basis_dimension_rule():
    with pytest.raises(ValueError):
        Basis("symmetric", 3, 5)
    assert Basis.full(4).dimension == 16


def test_css_north_pole():
    psi = coherent_spin_state(4, 0.0, 0.0)
    assert np.allclose(psi.amplitudes, [1, 0, 0, 0, 0])


def test_css_minus_y():
    psi = coherent_spin_state(2, np.pi / 2, -np.pi / 2)
    jy = build_collective_ops(2)["y"]
    assert psi.expect(jy).real == pytest.approx(-1.0, abs=1e-10)


def test_css_binomial_profile():
    n = 10
    psi = coherent_spin_state(n, np.pi / 2, 0.0)
    oracle = np.sqrt([comb(n, k) for k in range(n + 1)]) / 2 ** (n / 2)
    assert np.allclose(np.abs(psi.amplitudes), oracle, atol=1e-14)


def test_css_pole_is_exact():
    psi = coherent_spin_state(50, np.pi, 0.0)
    assert np.count_nonzero(psi.amplitudes) == 1


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(1, 60),
    theta=st.floats(0, np.pi),
    phi=st.floats(-np.pi, np.pi),
)
def test_css_is_eigenvector_of_direction(n, theta, phi):
    j = build_collective_ops(n)
    nvec = (np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))
    jn = sum(c * j[a].matrix for c, a in zip(nvec, "xyz"))
    psi = coherent_spin_state(n, theta, phi)
    assert np.allclose(jn @ psi.amplitudes, n / 2 * psi.amplitudes, atol=1e-9)


@pytest.mark.parametrize("n", [3, 6])
def test_css_full_matches_symmetric_mean_spin(n):
    theta, phi = 1.1, -0.4
    for rep in ("symmetric", "full"):
        j = build_collective_ops(n, rep)
        psi = coherent_spin_state(n, theta, phi, rep)
        mean = np.array([psi.expect(j[a]).real for a in "xyz"])
        expected = n / 2 * np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
        assert np.allclose(mean, expected, atol=1e-10)


def test_ghz_and_dicke():
    g = ghz_state(3, "full")
    assert g.amplitudes[0] == pytest.approx(1 / np.sqrt(2))
    assert g.amplitudes[-1] == pytest.approx(1 / np.sqrt(2))
    d = dicke_state(4, 0)
    assert np.flatnonzero(d.amplitudes) == [2]
    with pytest.raises(ValueError):
        dicke_state(4, 0.5)


def brute_force_reflection_counts(n):
    """Orbits of bit reversal: fixed strings add to the even sector only."""
    seen, even, odd = set(), 0, 0
    for bits in itertools.product((0, 1), repeat=n):
        if bits in seen:
            continue
        rev = bits[::-1]
        seen.update({bits, rev})
        even += 1
        odd += rev != bits
    return even, odd


@pytest.mark.parametrize("n", [4, 5, 8])
def test_ising_reflection_blocks(n):
    h = ising_hamiltonian(n, 1.0, 1.0, 1.0)
    even = symmetry_sector(h, Symmetry.BIT_REVERSAL, "even")
    odd = symmetry_sector(h, Symmetry.BIT_REVERSAL, "odd")
    assert (even.basis.dimension, odd.basis.dimension) == brute_force_reflection_counts(n)
    assert even.basis.sector_label == "reflection-even"
    # the union of block spectra is the full spectrum
    e_full = np.linalg.eigvalsh(h.matrix)
    e_blocks = np.sort(np.concatenate([np.linalg.eigvalsh(b.operator.matrix) for b in (even, odd)]))
    assert np.allclose(e_full, e_blocks, atol=1e-9)


def test_ising_n4_reflection_dims_10_6():
    h = ising_hamiltonian(4, 1.0, 1.0, 1.0)
    dims = [symmetry_sector(h, "bit_reversal", s).basis.dimension for s in ("even", "odd")]
    assert dims == [10, 6]


def test_parity_blocks_of_jz():
    jz = build_collective_ops(4, "full")["z"]
    dims = [symmetry_sector(jz, Symmetry.PARITY, s).basis.dimension for s in ("even", "odd")]
    assert dims == [8, 8]


def test_parity_mismatch():
    jx = build_collective_ops(4, "full")["x"]
    with pytest.raises(SymmetryMismatchError):
        symmetry_sector(jx, Symmetry.PARITY)


def test_sector_requires_full_rep():
    with pytest.raises(BasisMismatchError):
        symmetry_sector(build_collective_ops(4)["z"], Symmetry.PARITY)


def test_sector_state_round_trip():
    h = ising_hamiltonian(6, 1.0, 1.0, 1.0)
    sec = symmetry_sector(h, Symmetry.BIT_REVERSAL, "even")
    psi = coherent_spin_state(6, 0.7, 0.3, "full")
    back = sec.lift_state(sec.restrict_state(psi), psi.basis)
    assert np.allclose(back.amplitudes, psi.amplitudes, atol=1e-12)
    odd = symmetry_sector(h, Symmetry.BIT_REVERSAL, "odd")
    with pytest.raises(ValueError):
        odd.restrict_state(psi)


def test_collective_parity_sectors_preserve_spectrum():
    j = build_collective_ops(9)
    h = j["x"].matrix @ j["x"].matrix + 0.3 * j["x"].matrix + j["z"].matrix @ j["z"].matrix
    op = Operator(h, j["x"].basis)
    sectors = collective_parity_sectors(op, "x")
    e = np.sort(np.concatenate([np.linalg.eigvalsh(s.operator.matrix) for s in sectors]))
    assert np.allclose(e, np.linalg.eigvalsh(h), atol=1e-9)
    with pytest.raises(SymmetryMismatchError):
        collective_parity_sectors(j["y"], "x")
