"""End-to-end experiment recipes shared by the command line and the tests.

Each recipe fixes the protocol choices (initial state, symmetry sector,
averaging window) that the lower-level modules leave open.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rmt
from .dynamics import (
    CONTINUOUS_WINDOW,
    KRYLOV_TOL,
    STROBOSCOPIC_WINDOW,
    QfiTrace,
    SpectralDecomposition,
    Window,
    default_growth_bounds,
    fit_growth_rate,
    krylov_dimension,
    krylov_dimension_spectral,
    spectral_decomposition,
    time_averaged_qfi,
)
from .models import ModelName, ModelSpec, build_model
from .predict import full_space_prediction, symmetric_prediction
from .spin import (
    Operator,
    StateVector,
    Symmetry,
    build_collective_ops,
    coherent_spin_state,
    collective_parity_sectors,
    symmetry_sector,
)

DIRECTIONS = {
    "+x": (np.pi / 2, 0.0),
    "-x": (np.pi / 2, np.pi),
    "+y": (np.pi / 2, np.pi / 2),
    "-y": (np.pi / 2, -np.pi / 2),
    "+z": (0.0, 0.0),
    "-z": (np.pi, 0.0),
}

DEFAULT_DIRECTION = {
    ModelName.COE: "-y",
    ModelName.CUE: "-y",
    ModelName.CSE: "-y",
    ModelName.ISING: "+z",
    # the unstable fixed point of the LMG flow
    ModelName.LMG: "-z",
}

# symmetry used to split each spectrum before spacing statistics
DEFAULT_SECTOR = {
    ModelName.COE: "x-parity",
    ModelName.CUE: "x-parity",
    ModelName.CSE: "kramers",
    ModelName.ISING: "reflection-even",
    ModelName.LMG: "z-parity",
}

SECTOR_CHOICES = (
    "auto",
    "none",
    "kramers",
    "x-parity",
    "z-parity",
    "reflection-even",
    "reflection-odd",
    "parity-even",
    "parity-odd",
)


def default_window(spec: ModelSpec) -> Window:
    return STROBOSCOPIC_WINDOW if spec.is_floquet else CONTINUOUS_WINDOW


def direction_state(n_qubits: int, direction: str, rep: str = "symmetric") -> StateVector:
    try:
        theta, phi = DIRECTIONS[direction]
    except KeyError:
        raise ValueError(f"unknown direction {direction!r}; use one of {sorted(DIRECTIONS)}")
    return coherent_spin_state(n_qubits, theta, phi, rep)


def prediction_for(spec: ModelSpec) -> float:
    if spec.model is ModelName.ISING:
        return full_space_prediction(spec.n_qubits)
    return symmetric_prediction(spec.n_qubits)


@dataclass
class DynamicsSetup:
    model: ModelSpec
    generator: Operator
    spectrum: SpectralDecomposition
    operators: dict[str, Operator]
    psi0: StateVector
    prediction: float
    direction: str
    sector: str


def prepare_dynamics(
    spec: ModelSpec, direction: str | None = None, max_qubits: int | None = None
) -> DynamicsSetup:
    """Spectrum, collective operators and initial state for one model.

    The Ising chain is evolved inside the reflection-even sector, which
    holds every product state along a common axis and commutes with the
    collective spin.
    """
    direction = direction or DEFAULT_DIRECTION[spec.model]
    op = build_model(spec, max_qubits=max_qubits)
    if spec.model is ModelName.ISING:
        sector = symmetry_sector(op, Symmetry.BIT_REVERSAL, "even")
        full = build_collective_ops(spec.n_qubits, "full", max_qubits=max_qubits)
        ops = {ax: sector.restrict_operator(o) for ax, o in full.items()}
        psi0 = sector.restrict_state(direction_state(spec.n_qubits, direction, "full"))
        return DynamicsSetup(
            spec,
            sector.operator,
            spectral_decomposition(sector.operator),
            ops,
            psi0,
            prediction_for(spec),
            direction,
            sector.basis.sector_label,
        )
    return DynamicsSetup(
        spec,
        op,
        spectral_decomposition(op),
        build_collective_ops(spec.n_qubits),
        direction_state(spec.n_qubits, direction),
        prediction_for(spec),
        direction,
        "symmetric",
    )


def qfi_evolution(
    setup: DynamicsSetup, axes: str = "xyz", window: Window | None = None
) -> QfiTrace:
    """QFI series and window average.  Hamiltonian runs move the window
    start to the detected plateau onset when that comes later."""
    window = window or default_window(setup.model)
    ops = {ax: setup.operators[ax] for ax in axes}
    return time_averaged_qfi(
        setup.psi0, setup.spectrum, ops, window, adjust_start=not setup.model.is_floquet
    )


def growth_fit(trace: QfiTrace, axis: str):
    q = trace.qfi[axis]
    lo, hi = default_growth_bounds(q[0], trace.mean(axis))
    return fit_growth_rate(trace.times, q, lo, hi)


# ---------------------------------------------------------------- spectra


def _sectors_for(spec: ModelSpec, op: Operator, sector: str):
    if sector == "x-parity":
        return collective_parity_sectors(op, "x")
    if sector == "z-parity":
        return collective_parity_sectors(op, "z")
    if sector.startswith("reflection-"):
        return [symmetry_sector(op, Symmetry.BIT_REVERSAL, sector.split("-")[1])]
    if sector.startswith("parity-"):
        return [symmetry_sector(op, Symmetry.PARITY, sector.split("-")[1])]
    raise ValueError(f"unknown sector {sector!r}")


def level_spacings(
    spec: ModelSpec,
    sector: str = "auto",
    degree: int = 10,
    trim: float = 0.1,
    max_qubits: int | None = None,
) -> tuple[rmt.SpacingSample, str]:
    """Spacings pooled over the requested symmetry sectors.

    Floquet spectra are used as they are; Hamiltonian spectra are unfolded
    sector by sector.  Returns the sample and the sector actually used.
    """
    if sector not in SECTOR_CHOICES:
        raise ValueError(f"unknown sector {sector!r}")
    if sector == "auto":
        sector = DEFAULT_SECTOR[spec.model]
    if sector == "kramers" and spec.model is not ModelName.CSE:
        raise ValueError("Kramers pairing only applies to the CSE top")
    op = build_model(spec, max_qubits=max_qubits)
    blocks = [op] if sector in ("none", "kramers") else [s.operator for s in _sectors_for(spec, op, sector)]
    label = f"{spec.model.value} N={spec.n_qubits} sector={sector}"
    samples = []
    for block in blocks:
        sd = spectral_decomposition(block)
        if spec.is_floquet:
            samples.append(rmt.quasi_energy_spacings(sd, kramers=sector == "kramers", source=label))
        else:
            samples.append(rmt.unfold_spectrum(sd.values, degree, trim, source=label))
    return rmt.SpacingSample.concatenate(samples, label), sector


# --------------------------------------------------------------- scaling


@dataclass(frozen=True)
class PowerLaw:
    prefactor: float
    exponent: float


def power_law_fit(ns, values) -> PowerLaw:
    slope, intercept = np.polyfit(np.log(ns), np.log(values), 1)
    return PowerLaw(float(np.exp(intercept)), float(slope))


@dataclass(frozen=True)
class SweepRow:
    n_qubits: int
    qfi_mean: float
    qfi_std: float
    prediction: float
    window_start: float


def scaling_sweep(
    model,
    n_list,
    params: dict | None = None,
    axis: str = "z",
    direction: str | None = None,
    window: Window | None = None,
    threads: int = 1,
    max_qubits: int | None = None,
) -> tuple[list[SweepRow], PowerLaw]:
    """Plateau QFI of one axis for every N, with a log-log power-law fit."""
    params = params or {}

    def run(n):
        spec = ModelSpec.with_defaults(model, int(n), **params)
        setup = prepare_dynamics(spec, direction, max_qubits)
        trace = qfi_evolution(setup, axis, window)
        return SweepRow(int(n), trace.mean(axis), trace.std(axis), setup.prediction, trace.window[0])

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(run, n_list))
    fit = power_law_fit([r.n_qubits for r in rows], [r.qfi_mean for r in rows])
    return rows, fit


# ---------------------------------------------------------------- Krylov


@dataclass(frozen=True)
class KrylovReport:
    lanczos: int
    spectral: int
    hilbert_dimension: int


def krylov_report(setup: DynamicsSetup, tol: float = KRYLOV_TOL) -> KrylovReport:
    return KrylovReport(
        krylov_dimension(setup.generator, setup.psi0, tol),
        krylov_dimension_spectral(setup.spectrum, setup.psi0, tol),
        setup.spectrum.dim,
    )
