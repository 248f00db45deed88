"""Spectral time evolution, QFI along trajectories and related diagnostics.

Hamiltonians evolve in continuous time, ``exp(-i H t)``.  Floquet operators
evolve stroboscopically; writing U = exp(-i H_eff) with eigenphases
``phi`` the same formula applies with effective energies ``-phi``, so
integer times are kicks.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import BasisMismatchError, NumericalError
from .spin import Basis, Kind, Operator, StateVector

QFI_CLAMP = 1e-9
DEGENERACY_TOL = 1e-8
KRYLOV_TOL = 1e-10

_CHUNK = 512


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues and orthonormal eigenvectors (columns) of an operator.

    ``values`` are energies for a Hermitian operator and eigenphases in
    (-pi, pi] for a unitary one, sorted ascending either way.
    """

    values: np.ndarray
    vectors: np.ndarray
    basis: Basis
    kind: Kind

    @property
    def energies(self) -> np.ndarray:
        return self.values if self.kind is Kind.HERMITIAN else -self.values

    @property
    def dim(self) -> int:
        return self.basis.dimension

    def reconstruct(self) -> np.ndarray:
        d = self.values if self.kind is Kind.HERMITIAN else np.exp(1j * self.values)
        return (self.vectors * d) @ self.vectors.conj().T

    def coefficients(self, psi: StateVector) -> np.ndarray:
        """Overlaps <b_m|psi> with the eigenvectors."""
        if psi.basis != self.basis:
            raise BasisMismatchError("state and spectrum live in different bases")
        return self.vectors.conj().T @ psi.amplitudes


def spectral_decomposition(op: Operator) -> SpectralDecomposition:
    m = op.matrix
    if op.kind is Kind.HERMITIAN:
        vals, vecs = np.linalg.eigh(m)
    else:
        # the complex Schur form of a normal matrix is diagonal with a unitary
        # Z, which keeps degenerate (Kramers) eigenvectors orthonormal
        t, vecs = scipy.linalg.schur(m, output="complex")
        vals = np.angle(np.diag(t))
        vals[vals <= -np.pi] += 2 * np.pi
        order = np.argsort(vals, kind="stable")
        vals, vecs = vals[order], vecs[:, order]
    spec = SpectralDecomposition(vals, vecs, op.basis, op.kind)
    err = np.linalg.norm(spec.reconstruct() - m)
    if err > 1e-9 * op.dim * max(1.0, np.max(np.abs(m))):
        raise NumericalError(f"spectral reconstruction error {err:.2e} too large")
    return spec


def evolve(psi0: StateVector, spec: SpectralDecomposition, times) -> np.ndarray:
    """Amplitudes of psi(t) for each t, as an array of shape (len(times), dim)."""
    a = spec.coefficients(psi0)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(-1j * np.outer(times, spec.energies))
    out = (phases * a[None, :]) @ spec.vectors.T
    out[times == 0] = psi0.amplitudes
    return out


def evolve_state(psi0: StateVector, spec: SpectralDecomposition, t: float) -> StateVector:
    return StateVector.normalized(evolve(psi0, spec, [t])[0], spec.basis)


def _require_hermitian(op: Operator) -> None:
    if op.kind is not Kind.HERMITIAN:
        raise ValueError("the QFI generator must be a Hermitian operator")


def qfi_pure(psi: StateVector, op: Operator) -> float:
    """4 (<O^2> - <O>^2) for a pure state, clamped at zero."""
    _require_hermitian(op)
    if psi.basis != op.basis:
        raise BasisMismatchError("state and operator live in different bases")
    opsi = op.matrix @ psi.amplitudes
    mean = np.vdot(psi.amplitudes, opsi).real
    var = np.vdot(opsi, opsi).real - mean**2
    return _clamp(4 * var)


def _clamp(value):
    value = np.asarray(value, dtype=float)
    if np.any(value < -QFI_CLAMP * np.maximum(1.0, np.abs(value))):
        raise NumericalError("QFI is significantly negative")
    out = np.maximum(value, 0.0)
    return float(out) if out.ndim == 0 else out


def qfi_of_states(states: np.ndarray, op: Operator) -> np.ndarray:
    """QFI of each row of ``states`` with respect to ``op``."""
    _require_hermitian(op)
    m = op.matrix
    if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
        d = np.diag(m).real
        p = np.abs(states) ** 2
        mean = p @ d
        second = p @ d**2
    else:
        opsi = states @ m.T
        mean = np.einsum("ti,ti->t", states.conj(), opsi).real
        second = np.einsum("ti,ti->t", opsi.conj(), opsi).real
    return _clamp(4 * (second - mean**2))


# ------------------------------------------------------------ time averaging


@dataclass(frozen=True)
class Window:
    """Averaging window [start, stop] sampled every ``step`` time units."""

    start: float
    stop: float
    step: float = 1.0

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("window step must be positive")
        if self.stop < self.start or self.start < 0:
            raise ValueError("empty window")

    def grid_from_zero(self) -> np.ndarray:
        n = int(np.floor(self.stop / self.step + 1e-9))
        return np.arange(n + 1) * self.step


STROBOSCOPIC_WINDOW = Window(200, 2000, 1)
CONTINUOUS_WINDOW = Window(50, 500, 0.1)


@dataclass(frozen=True)
class TStar:
    time: float | None
    index: int | None
    conclusive: bool


def estimate_t_star(series, times=None, rel_change: float = 0.05) -> TStar:
    """Earliest time after which the running mean has settled.

    Index i is settled when the mean over [i, i + w) and the mean over the
    doubled window [i, i + 2w) differ by less than ``rel_change``, with
    w = i + 1.  The estimate is the first index from which every later
    testable index is settled too; if the last testable index is not
    settled the series holds no plateau.
    """
    q = np.asarray(series, dtype=float)
    times = np.arange(q.size) if times is None else np.asarray(times, dtype=float)
    n_test = (q.size + 1) // 3  # i + 2(i + 1) <= size
    if n_test == 0:
        return TStar(None, None, False)
    csum = np.concatenate([[0.0], np.cumsum(q)])
    i = np.arange(n_test)
    w = i + 1
    short = (csum[i + w] - csum[i]) / w
    long = (csum[i + 2 * w] - csum[i]) / (2 * w)
    settled = np.abs(short - long) < rel_change * np.maximum(np.abs(long), 1e-300)
    if not settled[-1]:
        return TStar(None, None, False)
    unsettled = np.flatnonzero(~settled)
    first = 0 if unsettled.size == 0 else int(unsettled[-1] + 1)
    return TStar(float(times[first]), first, True)


@dataclass
class QfiTrace:
    """QFI time series per axis plus the averaging window."""

    times: np.ndarray
    qfi: dict[str, np.ndarray]
    window: tuple[float, float]
    t_star: float | None = None
    t_star_conclusive: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for v in self.qfi.values():
            if np.any(v < 0):
                raise ValueError("QFI values must be nonnegative")
        lo, hi = self.window
        if lo < self.times[0] - 1e-12 or hi > self.times[-1] + 1e-12:
            raise ValueError("window is not contained in the sampled times")

    @property
    def mask(self) -> np.ndarray:
        lo, hi = self.window
        eps = 1e-9 * max(1.0, hi)
        return (self.times >= lo - eps) & (self.times <= hi + eps)

    def mean(self, axis: str) -> float:
        return float(np.mean(self.qfi[axis][self.mask]))

    def std(self, axis: str) -> float:
        return float(np.std(self.qfi[axis][self.mask]))

    @property
    def means(self) -> dict[str, float]:
        return {ax: self.mean(ax) for ax in self.qfi}

    def to_csv(self, path) -> None:
        """Columns time, qfi_x, qfi_y, qfi_z; axes not computed are left blank."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", "qfi_x", "qfi_y", "qfi_z"])
            for k, t in enumerate(self.times):
                row = [repr(float(t))]
                for ax in "xyz":
                    row.append(repr(float(self.qfi[ax][k])) if ax in self.qfi else "")
                w.writerow(row)


def qfi_trajectory(
    psi0: StateVector, spec: SpectralDecomposition, operators: dict[str, Operator], times
) -> dict[str, np.ndarray]:
    """QFI of psi(t) for every time and axis, evaluated in chunks of times."""
    times = np.asarray(times, dtype=float)
    out = {ax: np.empty(times.size) for ax in operators}
    for start in range(0, times.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        states = evolve(psi0, spec, times[sl])
        for ax, op in operators.items():
            if op.basis != spec.basis:
                raise BasisMismatchError(f"operator {ax} lives in a different basis")
            out[ax][sl] = qfi_of_states(states, op)
    return out


def time_averaged_qfi(
    psi0: StateVector,
    spec: SpectralDecomposition,
    operators: dict[str, Operator],
    window: Window,
    t_star: float | None = None,
    adjust_start: bool = False,
) -> QfiTrace:
    """QFI series from t = 0 to the window end, averaged over the window.

    Without an explicit ``t_star`` the plateau detector runs on the summed
    series.  A conclusive estimate later than the window start is an error,
    unless ``adjust_start`` is set, in which case the window starts at the
    estimate instead.
    """
    times = window.grid_from_zero()
    if not np.any(times >= window.start - 1e-9):
        raise ValueError("empty window")
    series = qfi_trajectory(psi0, spec, operators, times)
    conclusive = t_star is not None
    if t_star is None:
        est = estimate_t_star(sum(series.values()), times)
        t_star, conclusive = est.time, est.conclusive
    start = float(window.start)
    if conclusive and t_star > start + 1e-9:
        if not adjust_start:
            raise ValueError(
                f"window starts at {window.start} before the estimated scrambling time {t_star}"
            )
        start = float(t_star)
    return QfiTrace(
        times,
        series,
        (start, float(times[-1])),
        t_star,
        conclusive,
        meta={"window_step": window.step},
    )


# -------------------------------------------------------------- fidelity OTOC


def fidelity_otoc(psi0: StateVector, spec: SpectralDecomposition, op: Operator, theta, t: float):
    """|<psi(t)| exp(i theta O) |psi(t)>|^2, vectorised over ``theta``."""
    _require_hermitian(op)
    psi_t = evolve(psi0, spec, [t])[0]
    vals, vecs = np.linalg.eigh(op.matrix)
    weights = np.abs(vecs.conj().T @ psi_t) ** 2
    theta = np.asarray(theta, dtype=float)
    amp = np.exp(1j * np.multiply.outer(theta, vals)) @ weights
    return np.abs(amp) ** 2


def fidelity_curvature(
    psi0: StateVector, spec: SpectralDecomposition, op: Operator, t: float, step: float = 1e-3
) -> float:
    """-2 times the central second difference of the fidelity OTOC at theta = 0."""
    f = fidelity_otoc(psi0, spec, op, np.array([-step, 0.0, step]), t)
    return float(-2 * (f[0] - 2 * f[1] + f[2]) / step**2)


# ---------------------------------------------------------- Krylov dimension


def krylov_dimension(op: Operator, psi0: StateVector, tol: float = KRYLOV_TOL) -> int:
    """Length of the orthogonalised Krylov chain started from ``psi0``.

    Hermitian operators are rescaled to unit norm and iterated directly; for
    a unitary U, span{U^n psi} coincides with the Krylov space of its
    effective Hamiltonian, so U is iterated instead.  Every new vector is
    orthogonalised twice against the whole chain, and the chain stops when
    the residual norm falls below ``tol``.
    """
    if psi0.basis != op.basis:
        raise BasisMismatchError("state and operator live in different bases")
    m = op.matrix
    if op.kind is Kind.HERMITIAN:
        scale = np.max(np.sum(np.abs(m), axis=1))
        if scale == 0:
            return 1
        m = m / scale
    dim = op.dim
    q = np.zeros((dim, dim), dtype=complex)
    q[:, 0] = psi0.amplitudes
    k = 1
    while k < dim:
        w = m @ q[:, k - 1]
        for _ in range(2):
            w = w - q[:, :k] @ (q[:, :k].conj().T @ w)
        r = np.linalg.norm(w)
        if r < tol:
            break
        q[:, k] = w / r
        k += 1
    return k


def eigenspace_groups(spec: SpectralDecomposition, degeneracy_tol: float = DEGENERACY_TOL):
    """Group labels for (circularly, for phases) degenerate eigenvalues."""
    v = spec.values
    gaps = np.diff(v)
    labels = np.concatenate([[0], np.cumsum(gaps > degeneracy_tol)])
    if spec.kind is Kind.UNITARY and v.size > 1:
        if (v[0] + 2 * np.pi - v[-1]) <= degeneracy_tol:
            labels[labels == labels[-1]] = 0
    return labels


def krylov_dimension_spectral(
    spec: SpectralDecomposition,
    psi0: StateVector,
    tol: float = KRYLOV_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> int:
    """Number of eigenspaces carrying weight above ``tol**2``."""
    weights = np.abs(spec.coefficients(psi0)) ** 2
    labels = eigenspace_groups(spec, degeneracy_tol)
    totals = np.bincount(labels, weights=weights)
    return int(np.count_nonzero(totals > tol**2))


# ------------------------------------------------------------- growth fitting


@dataclass(frozen=True)
class GrowthFit:
    rate: float
    prefactor: float
    n_points: int
    t_range: tuple[float, float]


def fit_growth_rate(times, values, lower: float, upper: float) -> GrowthFit:
    """Least-squares fit of log(values) against time on the first rise.

    The segment starts where ``values`` first reaches ``lower`` and ends just
    before it first exceeds ``upper``.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    above = np.flatnonzero(v >= lower)
    if above.size == 0:
        raise NumericalError("series never reaches the lower fit bound")
    i0 = above[0]
    over = np.flatnonzero(v[i0:] > upper)
    i1 = i0 + (over[0] if over.size else v.size - i0)
    if i1 - i0 < 3:
        raise NumericalError("fewer than three points in the growth segment")
    slope, intercept = np.polyfit(t[i0:i1], np.log(v[i0:i1]), 1)
    return GrowthFit(float(slope), float(np.exp(intercept)), int(i1 - i0), (t[i0], t[i1 - 1]))


def default_growth_bounds(initial: float, plateau: float) -> tuple[float, float]:
    """Fit bounds for the exponential regime: twice the initial value (at
    least 2) up to 5% of the plateau."""
    return 2.0 * max(initial, 1.0), 0.05 * plateau
