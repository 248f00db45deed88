import numpy as np
import pytest
import scipy.linalg
from scipy.spatial.transform import Rotation
from scipy.special import sph_harm_y
from sympy import Rational
from sympy import N as numeric
from sympy.physics.wigner import wigner_3j

from krylovqfi.dynamics import evolve_state, spectral_decomposition
from krylovqfi.errors import CapacityError
from krylovqfi.models import floquet_coe
from krylovqfi.rmt import sample_random_state
from krylovqfi.spin import StateVector, build_collective_ops, coherent_spin_state, dicke_state
from krylovqfi.wigner import (
    kernel_weights,
    rotation_fidelity,
    rotation_fidelity_width,
    wigner_at,
    wigner_grid,
)


def multipole_oracle(psi, theta, phi):
    """sum_kq rho_kq Y_kq with tensor operators built from exact 3j symbols,
    scaled to unit integral."""
    n = psi.basis.n_qubits
    j = Rational(n, 2)
    d = n + 1
    ms = [j - i for i in range(d)]
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    total = 0.0
    for k in range(d):
        for q in range(-k, k + 1):
            t = np.zeros((d, d), complex)
            for a, m in enumerate(ms):
                for b, mp in enumerate(ms):
                    c = wigner_3j(j, j, k, m, -mp, -q)
                    if c != 0:
                        t[a, b] = (-1) ** int(j - m) * np.sqrt(2 * k + 1) * float(numeric(c, 30))
            total = total + np.trace(rho @ t.conj().T) * sph_harm_y(k, q, theta, phi)
    return total.real * np.sqrt(d / (4 * np.pi))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
def test_matches_clebsch_gordan_oracle(n):
    psi = sample_random_state(n + 1, "CUE", seed=n)
    rng = np.random.default_rng(n)
    theta, phi = rng.uniform(0, np.pi, 3), rng.uniform(0, 2 * np.pi, 3)
    ours = wigner_at(psi, theta, phi)
    ref = [multipole_oracle(psi, t, p) for t, p in zip(theta, phi)]
    assert np.allclose(ours, ref, atol=1e-12)


def test_css_up_peaks_at_north_pole():
    field = wigner_grid(coherent_spin_state(20, 0, 0))
    assert field.argmax()[0] == field.theta[0]


def test_css_peak_follows_direction():
    field = wigner_grid(coherent_spin_state(30, np.pi / 2, -np.pi / 2), 64, 128)
    th, ph = field.argmax()
    assert abs(th - np.pi / 2) <= np.pi / 64
    assert abs(np.mod(ph - 3 * np.pi / 2 + np.pi, 2 * np.pi) - np.pi) <= 2 * np.pi / 128


def rotate_state(psi, rotvec):
    n = psi.basis.n_qubits
    j = build_collective_ops(n)
    gen = sum(c * j[a].matrix for c, a in zip(rotvec, "xyz"))
    return StateVector(scipy.linalg.expm(-1j * gen) @ psi.amplitudes, psi.basis)


def to_angles(v):
    return np.arccos(np.clip(v[:, 2], -1, 1)), np.arctan2(v[:, 1], v[:, 0])


def test_rotational_covariance():
    rng = np.random.default_rng(11)
    psi = sample_random_state(13, "CUE", seed=2)
    for _ in range(10):
        rotvec = rng.normal(size=3)
        pts = rng.normal(size=(20, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        moved = Rotation.from_rotvec(rotvec).apply(pts)
        before = wigner_at(psi, *to_angles(pts))
        after = wigner_at(rotate_state(psi, rotvec), *to_angles(moved))
        assert np.allclose(before, after, atol=1e-6)


def test_css_minus_y_is_rotated_up_field():
    up = coherent_spin_state(12, 0, 0)
    down_y = coherent_spin_state(12, np.pi / 2, -np.pi / 2)
    # +z goes to -y under a quarter turn about +x
    rot = Rotation.from_rotvec([np.pi / 2, 0, 0])
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(30, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    assert np.allclose(wigner_at(up, *to_angles(pts)), wigner_at(down_y, *to_angles(rot.apply(pts))), atol=1e-6)


@pytest.mark.parametrize("n", [1, 6, 50, 200])
def test_monopole_weight_fixes_normalization(n):
    assert 4 * np.pi * np.sum(kernel_weights(n)) / (n + 1) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("state", ["css", "dicke", "random"])
def test_grid_integral_is_one(state):
    n = 16
    psi = {
        "css": coherent_spin_state(n, 1.0, 0.4),
        "dicke": dicke_state(n, 0),
        "random": sample_random_state(n + 1, "COE", seed=1),
    }[state]
    assert wigner_grid(psi).integral() == pytest.approx(1, rel=0.01)


def test_css_decays_along_great_circle():
    n = 60
    psi = coherent_spin_state(n, 0, 0)
    theta = np.linspace(0, 2 / np.sqrt(n), 40)
    w = wigner_at(psi, theta, np.full_like(theta, 0.7))
    assert w[0] > 0
    assert np.all(np.diff(w) < 0)


def test_input_validation():
    with pytest.raises(CapacityError):
        wigner_grid(coherent_spin_state(201, 0, 0))
    with pytest.raises(ValueError):
        wigner_grid(coherent_spin_state(3, 0, 0, "full"))
    with pytest.raises(ValueError):
        wigner_grid(coherent_spin_state(3, 0, 0), 32, 128)


def test_fidelity_at_zero_is_one():
    psi = sample_random_state(9, "CUE", seed=0)
    assert rotation_fidelity(psi, "x", 0.0) == pytest.approx(1)


def test_eigenstate_never_crosses():
    res = rotation_fidelity_width(dicke_state(10, 2), "z")
    assert res.angle == np.pi and not res.crossed


@pytest.mark.parametrize("n", [10, 100])
def test_css_width(n):
    res = rotation_fidelity_width(coherent_spin_state(n, 0, 0), "x")
    # overlap of two coherent states is cos(theta/2)^(2N)
    exact = 2 * np.arccos(0.5 ** (1 / (2 * n)))
    assert res.crossed
    assert res.angle == pytest.approx(exact, abs=1e-12)
    assert res.angle == pytest.approx(2 * np.sqrt(np.log(2) / n), rel=0.02)


@pytest.fixture(scope="module")
def chaotic_state():
    n = 100
    spec = spectral_decomposition(floquet_coe(n, 1.7, 10))
    return evolve_state(coherent_spin_state(n, np.pi / 2, -np.pi / 2), spec, 1000)


def test_chaotic_widths_isotropic(chaotic_state):
    widths = [rotation_fidelity_width(chaotic_state, a).angle for a in "xyz"]
    assert max(widths) / min(widths) < 1.2
    # of order sqrt(3)/N: a chaotic state has sub-Planck structure
    assert 0.5 < np.mean(widths) / (np.sqrt(3) / 100) < 2
