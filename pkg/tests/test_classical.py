import numpy as np
import pytest

from krylovqfi.classical import (
    PhaseCell,
    SphereMap,
    Step,
    cue_classical_map,
    kicked_top_classical_map,
    lmg_lyapunov,
    lyapunov_exponent,
    mask_correlation,
    orbit_exponents,
    phase_cell,
    phase_diagram_scan,
    random_sphere_points,
    write_phase_csv,
)
from krylovqfi.dynamics import Window

RNG_POINTS = random_sphere_points(20, np.random.default_rng(7))


def test_identity_map():
    assert np.allclose(kicked_top_classical_map(0, 0)(RNG_POINTS), RNG_POINTS, atol=1e-15)


def test_equator_is_fixed_without_rotation():
    p = np.array([[np.cos(0.4), np.sin(0.4), 0.0]])
    assert np.allclose(kicked_top_classical_map(0, 7.3)(p), p, atol=1e-15)


def test_rotation_then_torsion():
    p = np.array([0.0, 0.0, 1.0])
    a, c = 0.3, 2.0
    # x rotation by a takes +z to (0, -sin a, cos a); torsion turns it by c cos a about z
    q = kicked_top_classical_map(a, c)(p)
    y, z = -np.sin(a), np.cos(a)
    expected = [-np.sin(c * z) * y, np.cos(c * z) * y, z]
    assert np.allclose(q, expected, atol=1e-14)


def test_bad_step_rejected():
    with pytest.raises(ValueError):
        SphereMap([Step("shear", "x", 1.0)])


@pytest.mark.parametrize("smap", [kicked_top_classical_map(1.7, 10), cue_classical_map(1.7, 10, 0.5)])
def test_tangent_map_matches_finite_differences(smap):
    rng = np.random.default_rng(0)
    p = random_sphere_points(5, rng)
    v = rng.standard_normal((5, 3))
    v -= np.sum(v * p, axis=1, keepdims=True) * p
    h = 1e-6
    fd = (smap(p + h * v) - smap(p - h * v)) / (2 * h)
    _, tv = smap.step(p, v)
    assert np.allclose(tv, fd, atol=1e-6)


@pytest.mark.slow
def test_norm_drift_over_a_million_kicks():
    smap = kicked_top_classical_map(1.7, 10)
    p = RNG_POINTS[:1]
    worst = 0.0
    for _ in range(1_000_000):
        p = smap(p)
        worst = max(worst, abs(np.linalg.norm(p) - 1))
    assert worst < 1e-9


@pytest.mark.parametrize("axis,angle", [("x", 0.7), ("y", 2.9), ("z", -1.3)])
def test_pure_rotation_has_zero_exponent(axis, angle):
    smap = SphereMap([Step("rotation", axis, angle)])
    full, _ = orbit_exponents(smap, RNG_POINTS, 10_000, 100)
    assert np.max(np.abs(full)) < 1e-3
    assert lyapunov_exponent(smap, n_iter=10_000).lambda_le < 1e-3


def test_identity_map_exponent():
    assert lyapunov_exponent(kicked_top_classical_map(0, 0), n_iter=2000).lambda_le == 0


def test_chaotic_sea_points_agree():
    full, _ = orbit_exponents(kicked_top_classical_map(1.7, 10), random_sphere_points(10, np.random.default_rng(1)))
    assert (full.max() - full.min()) / np.median(full) < 0.02


def test_ensemble_result_fields():
    res = lyapunov_exponent(kicked_top_classical_map(1.7, 10), n_iter=2000, n_transient=100, n_points=20)
    assert res.iterations == 2000 and res.transient_discard == 100
    assert "median over 20" in res.initial_condition
    assert res.per_orbit.shape == (20,)
    single = lyapunov_exponent(kicked_top_classical_map(1.7, 10), p0=[0, -1, 0], n_iter=2000)
    assert single.initial_condition == "single orbit"
    with pytest.raises(ValueError):
        lyapunov_exponent(kicked_top_classical_map(1, 1), n_iter=1)


def test_lmg_lyapunov_values():
    assert lmg_lyapunov(1, 1) == 1
    assert lmg_lyapunov(2, 1) == 0
    assert lmg_lyapunov(1, 0) == 0
    assert lmg_lyapunov(1, 2) == pytest.approx(np.sqrt(3))


def test_lmg_lyapunov_continuous_at_boundary():
    for eps in (1e-2, 1e-4, 1e-8):
        assert lmg_lyapunov(2 - eps, 1) < 2 * np.sqrt(eps)


def test_zero_torsion_column_is_regular():
    for a in (0.0, 0.5, 1.7, 3.0):
        assert lyapunov_exponent(kicked_top_classical_map(a, 0.0), n_iter=2000, n_points=20).lambda_le < 1e-12


def test_phase_cells_at_reference_points():
    window = Window(200, 2000, 1)
    chaotic = phase_cell(1.7, 10, 40, window, n_iter=2000, n_transient=200, n_points=20)
    regular = phase_cell(0.1, 0.5, 40, window, n_iter=2000, n_transient=200, n_points=20)
    assert 0.9 <= chaotic.qfi_over_prediction <= 1.1
    assert chaotic.lambda_le > 1
    assert regular.qfi_over_prediction < 0.5
    assert regular.lambda_le < 0.1


def test_phase_scan_order_and_csv(tmp_path):
    cells = phase_diagram_scan([0.0, 1.7], [0.0, 10.0], 10, Window(20, 60, 1),
                               threads=2, n_iter=500, n_transient=50, n_points=10)
    assert [(c.A, c.C) for c in cells] == [(0, 0), (0, 10), (1.7, 0), (1.7, 10)]
    assert cells[0].lambda_le == 0 and cells[2].lambda_le == 0
    write_phase_csv(tmp_path / "p.csv", cells)
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "A,C,lambda_le,qfi_mean,qfi_over_prediction"
    assert len(lines) == 5


def test_mask_correlation():
    cells = [PhaseCell(0, 0, le, 0, q) for le, q in [(0, 0.1), (0, 0.2), (1, 0.9), (1, 1.0)]]
    assert mask_correlation(cells) == pytest.approx(1)
    flipped = [PhaseCell(0, 0, le, 0, q) for le, q in [(0, 0.9), (0, 1.0), (1, 0.1), (1, 0.2)]]
    assert mask_correlation(flipped) == pytest.approx(-1)
