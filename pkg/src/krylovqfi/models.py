"""Kicked-top Floquet operators, the chaotic Ising chain and the LMG model.

All kicked tops act on the symmetric representation and use one
stroboscopic time unit per kick.  Matrix exponentials are taken through
the eigendecomposition of the Hermitian generator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .spin import (
    Basis,
    Kind,
    Operator,
    build_collective_ops,
    check_capacity,
    flip_table,
)


class ModelName(str, enum.Enum):
    COE = "coe"
    CUE = "cue"
    CSE = "cse"
    ISING = "ising"
    LMG = "lmg"


REQUIRED_PARAMS = {
    ModelName.COE: ("A", "C"),
    ModelName.CUE: ("p", "lam", "lam_prime"),
    ModelName.CSE: ("lam0", "lam1", "lam2", "lam3"),
    ModelName.ISING: ("J", "h", "lam"),
    ModelName.LMG: ("Omega", "xi"),
}

# parameter sets quoted for the figures
DEFAULT_PARAMS = {
    ModelName.COE: {"A": 1.7, "C": 10.0},
    ModelName.CUE: {"p": 1.7, "lam": 10.0, "lam_prime": 0.5},
    ModelName.CSE: {"lam0": 2.5, "lam1": 2.5, "lam2": 5.0, "lam3": 7.5},
    ModelName.ISING: {"J": 1.0, "h": 1.0, "lam": 1.0},
    ModelName.LMG: {"Omega": 1.0, "xi": 1.0},
}

FLOQUET_MODELS = (ModelName.COE, ModelName.CUE, ModelName.CSE)
# one kick per stroboscopic time unit
KICK_PERIOD = 1.0


@dataclass(frozen=True)
class ModelSpec:
    model: ModelName
    n_qubits: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        model = ModelName(self.model)
        object.__setattr__(self, "model", model)
        missing = [k for k in REQUIRED_PARAMS[model] if k not in self.params]
        if missing:
            raise ValueError(f"{model.value} model is missing parameters {missing}")
        unknown = sorted(set(self.params) - set(REQUIRED_PARAMS[model]))
        if unknown:
            raise ValueError(f"{model.value} model has no parameters {unknown}")
        if model is ModelName.CSE and self.n_qubits % 2 == 0:
            raise ValueError("the CSE top needs odd N (half-integer spin)")
        object.__setattr__(self, "params", {k: float(v) for k, v in self.params.items()})

    @classmethod
    def with_defaults(cls, model, n_qubits: int, **overrides) -> ModelSpec:
        params = dict(DEFAULT_PARAMS[ModelName(model)])
        params.update(overrides)
        return cls(ModelName(model), n_qubits, params)

    @property
    def is_floquet(self) -> bool:
        return self.model in FLOQUET_MODELS

    def to_dict(self) -> dict:
        return {"model": self.model.value, "n_qubits": self.n_qubits, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> ModelSpec:
        return cls(ModelName(d["model"]), int(d["n_qubits"]), dict(d["params"]))


def expm_hermitian(generator: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(-i t G) for Hermitian G."""
    vals, vecs = np.linalg.eigh(generator)
    return (vecs * np.exp(-1j * t * vals)) @ vecs.conj().T


def _floquet(mats, basis):
    u = np.eye(basis.dimension, dtype=complex)
    for m in mats:  # rightmost factor acts first
        u = u @ m
    return Operator(u, basis, Kind.UNITARY)


def floquet_coe(n_qubits: int, A: float, C: float) -> Operator:
    """exp(-i C/N Jz^2) exp(-i A Jx)."""
    j = build_collective_ops(n_qubits)
    jz2 = j["z"].matrix @ j["z"].matrix
    return _floquet(
        [expm_hermitian(C / n_qubits * jz2), expm_hermitian(A * j["x"].matrix)],
        j["z"].basis,
    )


def floquet_cue(n_qubits: int, p: float, lam: float, lam_prime: float) -> Operator:
    """exp(-i lam' Jy^2/N) exp(-i lam Jz^2/N) exp(-i p Jx)."""
    j = build_collective_ops(n_qubits)
    jy, jz = j["y"].matrix, j["z"].matrix
    return _floquet(
        [
            expm_hermitian(lam_prime / n_qubits * (jy @ jy)),
            expm_hermitian(lam / n_qubits * (jz @ jz)),
            expm_hermitian(p * j["x"].matrix),
        ],
        j["z"].basis,
    )


def cse_generators(n_qubits, lam0, lam1, lam2, lam3):
    """The kick generators (H0, V) of the symplectic top."""
    j = build_collective_ops(n_qubits)
    jx, jy, jz = (j[a].matrix for a in "xyz")
    n = n_qubits
    h0 = 2 * lam0 * (jz @ jz) / n
    v = (
        8 * lam1 * np.linalg.matrix_power(jz, 4) / n**3
        + 2 * lam2 * (jx @ jz + jz @ jx) / n
        + 2 * lam3 * (jx @ jy + jy @ jx) / n
    )
    return h0, v


def floquet_cse(n_qubits: int, lam0: float, lam1: float, lam2: float, lam3: float) -> Operator:
    """exp(-i V) exp(-i H0); N must be odd so that the spin is half-integer."""
    if n_qubits % 2 == 0:
        raise ValueError("the CSE top needs odd N (half-integer spin)")
    h0, v = cse_generators(n_qubits, lam0, lam1, lam2, lam3)
    return _floquet([expm_hermitian(v), expm_hermitian(h0)], Basis.symmetric(n_qubits))


def ising_hamiltonian(
    n_qubits: int, J: float, h: float, lam: float, max_qubits: int | None = None
) -> Operator:
    """Open chain sum_i J sx_i sx_{i+1} + sum_i (h sx_i + lam sz_i)."""
    if n_qubits < 2:
        raise ValueError("the Ising chain needs at least two sites")
    check_capacity(n_qubits, max_qubits)
    dim = 2**n_qubits
    idx = np.arange(dim)
    flips, up = flip_table(n_qubits)
    ham = np.zeros((dim, dim))
    ham[idx, idx] = lam * np.where(up, 1.0, -1.0).sum(axis=1)
    for i in range(n_qubits):
        ham[flips[:, i], idx] += h
        if i < n_qubits - 1:
            ham[flips[flips[:, i], i + 1], idx] += J
    return Operator(ham, Basis.full(n_qubits), Kind.HERMITIAN)


def lmg_hamiltonian(n_qubits: int, Omega: float, xi: float) -> Operator:
    """Omega Jz - 2 xi Jx^2 / N."""
    j = build_collective_ops(n_qubits)
    jx = j["x"].matrix
    ham = Omega * j["z"].matrix - 2 * xi * (jx @ jx) / n_qubits
    return Operator(ham, j["z"].basis, Kind.HERMITIAN)


def build_model(spec: ModelSpec, max_qubits: int | None = None) -> Operator:
    p = spec.params
    n = spec.n_qubits
    if spec.model is ModelName.COE:
        return floquet_coe(n, p["A"], p["C"])
    if spec.model is ModelName.CUE:
        return floquet_cue(n, p["p"], p["lam"], p["lam_prime"])
    if spec.model is ModelName.CSE:
        return floquet_cse(n, p["lam0"], p["lam1"], p["lam2"], p["lam3"])
    if spec.model is ModelName.ISING:
        return ising_hamiltonian(n, p["J"], p["h"], p["lam"], max_qubits=max_qubits)
    return lmg_hamiltonian(n, p["Omega"], p["xi"])
