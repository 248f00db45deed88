import numpy as np
import pytest
import scipy.linalg

from krylovqfi.errors import CapacityError
from krylovqfi.models import (
    DEFAULT_PARAMS,
    ModelName,
    ModelSpec,
    build_model,
    cse_generators,
    floquet_coe,
    floquet_cse,
    floquet_cue,
    ising_hamiltonian,
    lmg_hamiltonian,
)
from krylovqfi.spin import build_collective_ops, magnetic_numbers, symmetry_operator


def unitarity_error(u):
    return np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))


def test_coe_trivial_is_identity():
    assert np.allclose(floquet_coe(2, 0.0, 0.0).matrix, np.eye(3))


def test_coe_pure_torsion_phases():
    n, c = 7, 3.3
    m = magnetic_numbers(n)
    assert np.allclose(floquet_coe(n, 0.0, c).matrix, np.diag(np.exp(-1j * c * m**2 / n)), atol=1e-12)


def test_coe_matches_scipy_expm():
    n, a, c = 6, 1.7, 10.0
    j = build_collective_ops(n)
    jx, jz = j["x"].matrix, j["z"].matrix
    oracle = scipy.linalg.expm(-1j * c / n * jz @ jz) @ scipy.linalg.expm(-1j * a * jx)
    assert np.allclose(floquet_coe(n, a, c).matrix, oracle, atol=1e-10)


def test_cue_trivial_and_reduction_to_coe():
    assert np.allclose(floquet_cue(2, 0, 0, 0).matrix, np.eye(3))
    assert np.allclose(floquet_cue(30, 1.7, 10, 0).matrix, floquet_coe(30, 1.7, 10).matrix, atol=1e-12)


def test_cse_trivial_and_even_n():
    assert np.allclose(floquet_cse(3, 0, 0, 0, 0).matrix, np.eye(4))
    with pytest.raises(ValueError):
        floquet_cse(4, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        ModelSpec.with_defaults("cse", 10)


def test_cse_generators_hermitian():
    h0, v = cse_generators(5, 2.5, 2.5, 5, 7.5)
    assert np.allclose(h0, h0.conj().T)
    assert np.allclose(v, v.conj().T)


@pytest.mark.parametrize("n", [3, 5, 11, 21, 41])
def test_cse_kramers_degeneracy(n):
    u = floquet_cse(n, 2.5, 2.5, 5.0, 7.5).matrix
    phases = np.sort(np.angle(np.linalg.eigvals(u)))
    # pairs must agree; adjacent pairs are well separated
    assert np.max(np.abs(phases[0::2] - phases[1::2])) < 1e-8


def test_random_parameters_unitary():
    rng = np.random.default_rng(5)
    for _ in range(100):
        a, c, lp = rng.uniform(-5, 15, 3)
        n = int(rng.integers(1, 12)) * 2 + 1
        assert unitarity_error(floquet_coe(n, a, c).matrix) < 1e-10
        assert unitarity_error(floquet_cue(n, a, c, lp).matrix) < 1e-10
        assert unitarity_error(floquet_cse(n, *rng.uniform(0, 10, 4)).matrix) < 1e-10


def test_ising_small_spectra():
    assert np.allclose(np.linalg.eigvalsh(ising_hamiltonian(2, 1, 0, 0).matrix), [-1, -1, 1, 1])
    assert np.allclose(np.linalg.eigvalsh(ising_hamiltonian(2, 0, 0, 1).matrix), [-2, 0, 0, 2])


def test_ising_matches_kronecker_oracle():
    from tests.test_spin import SX, SZ, kron_site

    n, J, h, lam = 5, 0.7, 1.3, -0.4
    oracle = sum(J * kron_site(SX, i, n) @ kron_site(SX, i + 1, n) for i in range(n - 1))
    oracle = oracle + sum(h * kron_site(SX, i, n) + lam * kron_site(SZ, i, n) for i in range(n))
    assert np.allclose(ising_hamiltonian(n, J, h, lam).matrix, oracle)


@pytest.mark.parametrize("n", range(2, 13))
def test_ising_commutes_with_bit_reversal(n):
    h = ising_hamiltonian(n, 1.0, 1.0, 1.0).matrix
    if n <= 10:
        p = symmetry_operator(n, "bit_reversal")
        assert np.max(np.abs(p @ h - h @ p)) < 1e-12
    else:
        from krylovqfi.spin import _reversed_indices

        r = _reversed_indices(n)
        assert np.max(np.abs(h[np.ix_(r, r)] - h)) < 1e-12


def test_ising_capacity():
    with pytest.raises(CapacityError):
        ising_hamiltonian(15, 1, 1, 1)
    with pytest.raises(ValueError):
        ising_hamiltonian(1, 1, 1, 1)


def test_lmg_spectra_small():
    assert np.allclose(np.linalg.eigvalsh(lmg_hamiltonian(2, 1.0, 0.0).matrix), [-1, 0, 1])
    assert np.allclose(np.linalg.eigvalsh(lmg_hamiltonian(2, 0.0, 1.0).matrix), [-1, -1, 0])


def test_lmg_commutes_with_parity():
    n = 40
    h = lmg_hamiltonian(n, 1.0, 1.0).matrix
    parity = np.diag(np.exp(1j * np.pi * (magnetic_numbers(n) + n / 2)))
    assert np.max(np.abs(parity @ h - h @ parity)) < 1e-10


def test_modelspec_validation_and_round_trip():
    with pytest.raises(ValueError):
        ModelSpec(ModelName.COE, 10, {"A": 1.0})
    spec = ModelSpec.with_defaults("lmg", 20, xi=2.0)
    assert spec.params == {"Omega": 1.0, "xi": 2.0}
    assert ModelSpec.from_dict(spec.to_dict()) == spec
    assert not spec.is_floquet


@pytest.mark.parametrize("model", list(ModelName))
def test_build_model_dispatch(model):
    n = 5 if model is not ModelName.ISING else 4
    op = build_model(ModelSpec(model, n, DEFAULT_PARAMS[model]))
    expected_dim = 2**n if model is ModelName.ISING else n + 1
    assert op.dim == expected_dim
