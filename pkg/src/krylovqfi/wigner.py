"""Spin Wigner function on the sphere and rotation-fidelity widths.

The field is the multipole expansion W(n) = sum_kq rho_kq Y_kq(n).  Rotating
n to the north pole leaves only q = 0, so

    W(theta, phi) = sum_m w_m |<m| exp(i theta Jy) exp(i phi Jz) |psi>|^2,

where the weights w_m collect the diagonal elements of the tensor
operators T_k0.  Those diagonals are the polynomials in m orthonormal under
the counting measure, which a Lanczos run on diag(m) produces stably,
so no Clebsch-Gordan tables are needed.  The overall scale is fixed so
that the field integrates to one over the sphere.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import CapacityError
from .spin import Representation, StateVector, build_collective_ops, magnetic_numbers

MAX_WIGNER_QUBITS = 200
MIN_GRID = 64


@lru_cache(maxsize=32)
def tensor_diagonals(n_qubits: int) -> np.ndarray:
    """Rows k = 0..2j hold <m|T_k0|m> over m = j..-j, with <j|T_k0|j> > 0."""
    m = magnetic_numbers(n_qubits)
    d = m.size
    q = np.zeros((d, d))
    q[0] = 1 / np.sqrt(d)
    for k in range(1, d):
        w = m * q[k - 1]
        for _ in range(2):
            w -= q[:k].T @ (q[:k] @ w)
        q[k] = w / np.linalg.norm(w)
    q *= np.sign(q[:, 0])[:, None]
    q.setflags(write=False)
    return q


@lru_cache(maxsize=32)
def kernel_weights(n_qubits: int) -> np.ndarray:
    t = tensor_diagonals(n_qubits)
    d = t.shape[0]
    k = np.arange(d)
    w = np.sqrt(d / (4 * np.pi)) * (np.sqrt((2 * k + 1) / (4 * np.pi)) @ t)
    w.setflags(write=False)
    return w


def _check_state(psi: StateVector) -> int:
    if psi.basis.representation is not Representation.SYMMETRIC:
        raise ValueError("the spin Wigner function needs the symmetric representation")
    n = psi.basis.n_qubits
    if n > MAX_WIGNER_QUBITS:
        raise CapacityError(f"Wigner fields are limited to N <= {MAX_WIGNER_QUBITS}")
    return n


class _Rotator:
    """exp(i theta Jy) through one eigendecomposition of Jy."""

    def __init__(self, n_qubits: int):
        jy = build_collective_ops(n_qubits)["y"].matrix
        self.vals, self.vecs = np.linalg.eigh(jy)

    def rows(self, theta: float) -> np.ndarray:
        return (self.vecs * np.exp(1j * theta * self.vals)) @ self.vecs.conj().T


@dataclass(frozen=True, eq=False)
class SphericalField:
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray  # shape (n_theta, n_phi)

    def integral(self) -> float:
        """Midpoint quadrature of W sin(theta) over the sphere."""
        dth = np.pi / self.theta.size
        dph = 2 * np.pi / self.phi.size
        return float(np.sum(self.values * np.sin(self.theta)[:, None]) * dth * dph)

    def argmax(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.theta[i]), float(self.phi[j])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "phi", "W"])
            for i, th in enumerate(self.theta):
                for j, ph in enumerate(self.phi):
                    w.writerow([repr(float(th)), repr(float(ph)), repr(float(self.values[i, j]))])


def wigner_at(psi: StateVector, theta, phi) -> np.ndarray:
    """W at matching arrays of angles."""
    n = _check_state(psi)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    m = magnetic_numbers(n)
    w = kernel_weights(n)
    rot = _Rotator(n)
    out = np.empty(theta.shape)
    for idx in np.ndindex(theta.shape):
        v = rot.rows(theta[idx]) @ (np.exp(1j * phi[idx] * m) * psi.amplitudes)
        out[idx] = np.abs(v) ** 2 @ w
    return out


def wigner_grid(psi: StateVector, n_theta: int = 64, n_phi: int = 128) -> SphericalField:
    """Field on a midpoint grid in theta and a uniform periodic grid in phi."""
    n = _check_state(psi)
    if n_theta < MIN_GRID or n_phi < MIN_GRID:
        raise ValueError(f"grids need at least {MIN_GRID} points per angle")
    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    phi = np.arange(n_phi) * 2 * np.pi / n_phi
    m = magnetic_numbers(n)
    w = kernel_weights(n)
    rot = _Rotator(n)
    phased = np.exp(1j * np.outer(phi, m)) * psi.amplitudes  # (n_phi, d)
    values = np.empty((n_theta, n_phi))
    for i, th in enumerate(theta):
        values[i] = np.abs(phased @ rot.rows(th).T) ** 2 @ w
    return SphericalField(theta, phi, values)


# --------------------------------------------------------- rotation fidelity


@dataclass(frozen=True)
class FidelityWidth:
    angle: float
    crossed: bool


def _fidelity_function(psi: StateVector, axis: str):
    op = build_collective_ops(psi.basis.n_qubits, psi.basis.representation)[axis]
    if op.basis != psi.basis:
        raise ValueError("state and collective operators live in different bases")
    vals, vecs = np.linalg.eigh(op.matrix)
    weights = np.abs(vecs.conj().T @ psi.amplitudes) ** 2

    def f(theta):
        return np.abs(np.exp(1j * np.multiply.outer(np.asarray(theta, float), vals)) @ weights) ** 2

    return f


def rotation_fidelity(psi: StateVector, axis: str, theta) -> np.ndarray:
    """|<psi| exp(i theta J_axis) |psi>|^2, vectorised over ``theta``."""
    return _fidelity_function(psi, axis)(theta)


def rotation_fidelity_width(psi: StateVector, axis: str, n_scan: int | None = None) -> FidelityWidth:
    """Smallest theta in (0, pi] where the rotation fidelity reaches 1/2.

    A scan locates the first grid point at or below 1/2 and the crossing is
    then refined by root bracketing.  Without a crossing the result is pi
    with ``crossed`` false.
    """
    n_scan = n_scan or max(1024, 16 * psi.basis.dimension)
    f = _fidelity_function(psi, axis)
    grid = np.linspace(0, np.pi, n_scan + 1)[1:]
    below = np.flatnonzero(f(grid) <= 0.5)
    if below.size == 0:
        return FidelityWidth(float(np.pi), False)
    i = below[0]
    hi = grid[i]
    lo = grid[i - 1] if i > 0 else 0.0
    if f(hi) == 0.5:
        return FidelityWidth(float(hi), True)
    return FidelityWidth(float(brentq(lambda t: f(t) - 0.5, lo, hi, xtol=1e-14)), True)
