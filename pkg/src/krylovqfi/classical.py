"""Classical limits on the unit sphere and Lyapunov exponents.

In the large-N limit a kick exp(-i k Jz^2 / N) acts on the unit vector
J / j as a rotation about z by the angle k z (a torsion), while a linear
kick exp(-i a J_axis) is a rigid rotation.  Maps here are compositions of
such steps, applied left to right, each with its analytic Jacobian so
that tangent vectors can be propagated exactly.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import STROBOSCOPIC_WINDOW, Window, spectral_decomposition, time_averaged_qfi
from .models import floquet_coe
from .predict import symmetric_prediction
from .spin import build_collective_ops, coherent_spin_state

AXES = {"x": 0, "y": 1, "z": 2}
N_ENSEMBLE = 100
N_ITER = 10_000
N_TRANSIENT = 1_000
CONVERGENCE_TOL = 0.01


def _rotation(axis: int, angle):
    """Rotation matrices about a coordinate axis, broadcast over ``angle``."""
    angle = np.asarray(angle, dtype=float)
    c, s = np.cos(angle), np.sin(angle)
    r = np.zeros(angle.shape + (3, 3))
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    r[..., axis, axis] = 1.0
    r[..., i, i] = c
    r[..., j, j] = c
    r[..., j, i] = s
    r[..., i, j] = -s
    return r


@dataclass(frozen=True)
class Step:
    kind: str  # "rotation" or "torsion"
    axis: str
    strength: float


class SphereMap:
    """Composition of rigid rotations and torsions on S^2."""

    def __init__(self, steps):
        self.steps = tuple(steps)
        for st in self.steps:
            if st.kind not in ("rotation", "torsion") or st.axis not in AXES:
                raise ValueError(f"bad map step {st}")

    def __call__(self, points):
        return self.step(points)[0]

    def step(self, points, tangents=None):
        """Image of ``points`` (..., 3) and, if given, of tangent vectors."""
        p = np.asarray(points, dtype=float)
        v = None if tangents is None else np.asarray(tangents, dtype=float)
        for st in self.steps:
            a = AXES[st.axis]
            if st.kind == "rotation":
                r = _rotation(a, st.strength)
                p = p @ r.T
                if v is not None:
                    v = v @ r.T
                continue
            r = _rotation(a, st.strength * p[..., a])
            new = np.einsum("...ij,...j->...i", r, p)
            if v is not None:
                # d/dv [R(k v_a) v] = R + (e_a x R v) k e_a^T
                e = np.zeros(3)
                e[a] = 1.0
                v = np.einsum("...ij,...j->...i", r, v) + st.strength * v[..., a, None] * np.cross(
                    e, new
                )
            p = new
        p = p / np.linalg.norm(p, axis=-1, keepdims=True)
        return p, v


def kicked_top_classical_map(A: float, C: float) -> SphereMap:
    """Rotation by A about x, then torsion C z about z."""
    return SphereMap([Step("rotation", "x", A), Step("torsion", "z", C)])


def cue_classical_map(p: float, lam: float, lam_prime: float) -> SphereMap:
    """Rotation by p about x, torsion lam about z, then torsion lam' about y."""
    return SphereMap(
        [Step("rotation", "x", p), Step("torsion", "z", lam), Step("torsion", "y", lam_prime)]
    )


def random_sphere_points(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _tangent_seed(points, rng):
    g = rng.standard_normal(points.shape)
    g -= np.sum(g * points, axis=-1, keepdims=True) * points
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


@dataclass(frozen=True)
class LyapunovResult:
    lambda_le: float
    iterations: int
    transient_discard: int
    initial_condition: str
    converged: bool
    per_orbit: np.ndarray = field(repr=False, default=None)


def orbit_exponents(
    smap: SphereMap, points, n_iter: int = N_ITER, n_transient: int = N_TRANSIENT, seed=0
):
    """Tangent-map exponents of every orbit after ``n_iter`` and after
    ``n_iter // 2`` kicks, renormalizing the tangent vector every kick."""
    rng = np.random.default_rng(seed)
    p = np.atleast_2d(np.asarray(points, dtype=float))
    p = p / np.linalg.norm(p, axis=1, keepdims=True)
    for _ in range(n_transient):
        p = smap(p)
    v = _tangent_seed(p, rng)
    log_sum = np.zeros(p.shape[0])
    half = None
    for k in range(n_iter):
        p, v = smap.step(p, v)
        norm = np.linalg.norm(v, axis=1)
        log_sum += np.log(norm)
        v /= norm[:, None]
        if k + 1 == n_iter // 2:
            half = log_sum / (k + 1)
    return log_sum / n_iter, half


def lyapunov_exponent(
    smap: SphereMap,
    p0=None,
    n_iter: int = N_ITER,
    n_transient: int = N_TRANSIENT,
    n_points: int = N_ENSEMBLE,
    seed=0,
) -> LyapunovResult:
    """Largest Lyapunov exponent per kick.

    With ``p0`` a single orbit is followed; otherwise the median over
    ``n_points`` uniformly random initial points is reported.  The result
    is flagged converged when the estimate moved by less than 1% between
    half and full length.
    """
    if n_iter < 2:
        raise ValueError("need at least two iterations")
    rng = np.random.default_rng(seed)
    if p0 is None:
        points = random_sphere_points(n_points, rng)
        policy = f"median over {n_points} uniform random points (seed {seed})"
    else:
        points = np.atleast_2d(p0)
        policy = "single orbit"
    full, half = orbit_exponents(smap, points, n_iter, n_transient, seed=rng)
    value = max(0.0, float(np.median(full)))
    earlier = max(0.0, float(np.median(half)))
    converged = abs(value - earlier) <= CONVERGENCE_TOL * max(value, 1e-3)
    return LyapunovResult(value, n_iter, n_transient, policy, converged, full)


def lmg_lyapunov(Omega: float, xi: float) -> float:
    """sqrt(Omega (2 xi - Omega)) in the unstable phase, else 0."""
    product = Omega * (2 * xi - Omega)
    return float(np.sqrt(product)) if product > 0 else 0.0


# ------------------------------------------------------------ phase diagram

PHASE_GRID = 50
A_RANGE = (0.0, 3.0)
C_RANGE = (0.0, 15.0)


@dataclass(frozen=True)
class PhaseCell:
    A: float
    C: float
    lambda_le: float
    qfi_mean: float
    qfi_over_prediction: float


def phase_cell(
    A: float,
    C: float,
    n_qubits: int,
    window: Window = STROBOSCOPIC_WINDOW,
    n_iter: int = N_ITER,
    n_transient: int = N_TRANSIENT,
    n_points: int = N_ENSEMBLE,
    seed=0,
    axis: str = "z",
) -> PhaseCell:
    """Ensemble LE and the QFI plateau of J_axis for one (A, C).

    The QFI starts from a coherent state along -y and is averaged over
    the fixed window, without a plateau search.
    """
    le = lyapunov_exponent(
        kicked_top_classical_map(A, C), None, n_iter, n_transient, n_points, seed
    ).lambda_le
    ops = {axis: build_collective_ops(n_qubits)[axis]}
    spec = spectral_decomposition(floquet_coe(n_qubits, A, C))
    psi0 = coherent_spin_state(n_qubits, np.pi / 2, -np.pi / 2)
    trace = time_averaged_qfi(psi0, spec, ops, window, t_star=float(window.start))
    mean = trace.mean(axis)
    return PhaseCell(A, C, le, mean, mean / symmetric_prediction(n_qubits))


def phase_diagram_scan(
    A_values,
    C_values,
    n_qubits: int,
    window: Window = STROBOSCOPIC_WINDOW,
    threads: int = 1,
    **le_options,
) -> list[PhaseCell]:
    """Every (A, C) cell, ordered with A varying slowest."""
    A_values = np.asarray(A_values, dtype=float)
    C_values = np.asarray(C_values, dtype=float)
    cells = [(a, c) for a in A_values for c in C_values]

    def run(ac):
        return phase_cell(ac[0], ac[1], n_qubits, window, **le_options)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(run, cells))


def write_phase_csv(path, cells) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["A", "C", "lambda_le", "qfi_mean", "qfi_over_prediction"])
        for c in cells:
            w.writerow(
                [repr(float(x)) for x in (c.A, c.C, c.lambda_le, c.qfi_mean, c.qfi_over_prediction)]
            )


def mask_correlation(cells, le_threshold: float = 0.1, qfi_threshold: float = 0.8) -> float:
    """Pearson correlation between the chaotic (LE) and saturated (QFI) masks."""
    a = np.array([c.lambda_le > le_threshold for c in cells], dtype=float)
    b = np.array([c.qfi_over_prediction > qfi_threshold for c in cells], dtype=float)
    if a.std() == 0 or b.std() == 0:
        return float(np.all(a == b))
    return float(np.corrcoef(a, b)[0, 1])
