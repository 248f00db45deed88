"""Level-spacing statistics and random-state averages for Dyson's ensembles."""

from __future__ import annotations

import csv
import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, gammaln

from .dynamics import DEGENERACY_TOL, SpectralDecomposition, qfi_of_states
from .errors import NumericalError
from .spin import Basis, Kind, Operator, StateVector

MIN_TEST_SAMPLE = 200
VERDICT_THRESHOLD = 0.08
HIST_BINS = 60
HIST_RANGE = (0.0, 4.0)


class Ensemble(enum.Enum):
    COE = 1
    CUE = 2
    CSE = 4

    @property
    def beta(self) -> int:
        return self.value

    @classmethod
    def parse(cls, value) -> Ensemble:
        if isinstance(value, Ensemble):
            return value
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(int(value))


@dataclass(frozen=True, eq=False)
class SpacingSample:
    spacings: np.ndarray
    source: str = ""

    def __post_init__(self):
        s = np.asarray(self.spacings, dtype=float)
        if s.size == 0:
            raise ValueError("empty spacing sample")
        if np.any(s < 0):
            raise ValueError("negative spacing")
        if abs(s.mean() - 1.0) > 1e-6:
            raise ValueError("spacings must be normalized to unit mean")
        object.__setattr__(self, "spacings", s)

    def __len__(self):
        return self.spacings.size

    @classmethod
    def concatenate(cls, samples, source: str = "") -> SpacingSample:
        """Pool samples; each has unit mean so the pool does too."""
        s = np.concatenate([x.spacings for x in samples])
        return cls(s / s.mean(), source or "+".join(x.source for x in samples))


def quasi_energy_spacings(
    spec: SpectralDecomposition,
    kramers: bool = False,
    degeneracy_tol: float = DEGENERACY_TOL,
    source: str = "",
) -> SpacingSample:
    """Nearest-neighbour spacings of eigenphases on the unit circle.

    The wrap-around gap is included and the mean spacing is exactly
    2 pi / K.  With ``kramers`` each degenerate pair is first collapsed to
    one level.
    """
    if spec.kind is not Kind.UNITARY:
        raise ValueError("quasi-energy spacings need a unitary spectrum")
    phases = np.sort(np.mod(spec.values, 2 * np.pi))
    if kramers:
        gaps_prev = np.diff(np.concatenate([[phases[-1] - 2 * np.pi], phases]))
        levels = phases[gaps_prev > degeneracy_tol]
        if 2 * levels.size != phases.size:
            raise NumericalError(
                f"{phases.size} phases did not collapse into {phases.size // 2} Kramers doublets"
            )
        phases = levels
    gaps = np.diff(np.concatenate([phases, [phases[0] + 2 * np.pi]]))
    return SpacingSample(gaps / (2 * np.pi / phases.size), source)


def unfold_spectrum(
    energies, degree: int = 10, trim_fraction: float = 0.1, source: str = ""
) -> SpacingSample:
    """Unfold with a polynomial fit to the level staircase, then trim the edges."""
    e = np.sort(np.asarray(energies, dtype=float))
    if e.size < 50:
        raise ValueError("unfolding needs at least 50 levels")
    staircase = np.arange(1, e.size + 1)
    fit = np.polynomial.Polynomial.fit(e, staircase, degree)
    unfolded = fit(e)
    k = int(trim_fraction * e.size)
    unfolded = unfolded[k : e.size - k]
    s = np.diff(unfolded)
    if np.any(s < 0):
        raise NumericalError("unfolding map is not monotone; lower the polynomial degree")
    return SpacingSample(s / s.mean(), source)


# ------------------------------------------------------------------ surmises

_CSE_A = 2**18 / (3**6 * np.pi**3)
_CSE_B = 64 / (9 * np.pi)


def surmise_pdf(ensemble, s):
    s = np.asarray(s, dtype=float)
    ens = Ensemble.parse(ensemble)
    if ens is Ensemble.COE:
        return np.pi * s / 2 * np.exp(-np.pi * s**2 / 4)
    if ens is Ensemble.CUE:
        return 32 * s**2 / np.pi**2 * np.exp(-4 * s**2 / np.pi)
    return _CSE_A * s**4 * np.exp(-_CSE_B * s**2)


def surmise_cdf(ensemble, s):
    s = np.asarray(s, dtype=float)
    ens = Ensemble.parse(ensemble)
    if ens is Ensemble.COE:
        return 1 - np.exp(-np.pi * s**2 / 4)
    if ens is Ensemble.CUE:
        return erf(2 * s / np.sqrt(np.pi)) - 4 * s / np.pi * np.exp(-4 * s**2 / np.pi)
    b = _CSE_B
    # integral of s^4 exp(-b s^2) from 0 to s
    prim = 3 * np.sqrt(np.pi) / (8 * b**2.5) * erf(np.sqrt(b) * s) - np.exp(-b * s**2) * (
        s**3 / (2 * b) + 3 * s / (4 * b**2)
    )
    return _CSE_A * prim


def ks_distance(sample: SpacingSample, ensemble) -> float:
    s = np.sort(sample.spacings)
    n = s.size
    f = surmise_cdf(ensemble, s)
    return float(max(np.max(np.arange(1, n + 1) / n - f), np.max(f - np.arange(n) / n)))


@dataclass(frozen=True)
class SpacingTest:
    ks: dict
    ks_distance: float | None
    verdict: Ensemble | None
    n: int


def spacing_test(
    sample: SpacingSample, ensemble=None, threshold: float = VERDICT_THRESHOLD
) -> SpacingTest:
    """KS distance to each surmise; the verdict is the closest ensemble, or
    ``None`` when even the closest is at least ``threshold`` away."""
    if len(sample) < MIN_TEST_SAMPLE:
        raise ValueError(f"spacing test needs at least {MIN_TEST_SAMPLE} spacings")
    ks = {e: ks_distance(sample, e) for e in Ensemble}
    best = min(ks, key=ks.get)
    verdict = best if ks[best] < threshold else None
    asked = None if ensemble is None else ks[Ensemble.parse(ensemble)]
    return SpacingTest(ks, asked, verdict, len(sample))


def spacing_histogram(sample: SpacingSample, ensemble, bins: int = HIST_BINS, range_=HIST_RANGE):
    """Rows (bin_left, bin_right, density, surmise_value) with the surmise
    evaluated at the bin centre."""
    density, edges = np.histogram(sample.spacings, bins=bins, range=range_, density=False)
    width = edges[1] - edges[0]
    density = density / (len(sample) * width)
    centres = 0.5 * (edges[:-1] + edges[1:])
    surmise = surmise_pdf(ensemble, centres)
    return list(zip(edges[:-1], edges[1:], density, surmise))


def write_histogram_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_left", "bin_right", "density", "surmise_value"])
        for row in rows:
            w.writerow([repr(float(x)) for x in row])


# ------------------------------------------------------------- random states


def _default_basis(dim: int) -> Basis:
    return Basis.symmetric(dim - 1)


def _gaussian_rows(rng: np.random.Generator, n: int, dim: int, beta: int) -> np.ndarray:
    if beta == 1:
        return rng.standard_normal((n, dim)).astype(complex)
    # beta = 2: one complex Gaussian per component.  beta = 4: the 2K real
    # Gaussians are read as K (re, im) pairs, so a single vector has the
    # same law as for beta = 2; the ensembles differ only jointly.
    g = rng.standard_normal((n, dim, 2))
    return g[..., 0] + 1j * g[..., 1]


def sample_random_states(dim: int, ensemble, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` normalized random vectors as rows."""
    beta = Ensemble.parse(ensemble).beta
    rows = _gaussian_rows(rng, n, dim, beta)
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def sample_random_state(dim: int, ensemble, seed=None, basis: Basis | None = None) -> StateVector:
    if dim < 2:
        raise ValueError("need dimension at least 2")
    basis = basis or _default_basis(dim)
    if basis.dimension != dim:
        raise ValueError("basis dimension does not match")
    rng = np.random.default_rng(seed)
    return StateVector.normalized(sample_random_states(dim, ensemble, 1, rng)[0], basis)


@dataclass(frozen=True)
class MonteCarloMean:
    mean: float
    standard_error: float
    samples: int


def _shard_sizes(total: int, shards: int) -> list[int]:
    base, extra = divmod(total, shards)
    return [base + (i < extra) for i in range(shards)]


def random_qfi(
    op: Operator, ensemble, samples: int, seed=0, shards: int = 1, threads: int = 1
) -> MonteCarloMean:
    """Monte-Carlo average of the pure-state QFI over random states.

    Each shard draws from its own child of ``SeedSequence(seed)``; results
    are merged in shard order so the thread count never changes the answer.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    children = np.random.SeedSequence(seed).spawn(shards)
    sizes = _shard_sizes(samples, shards)

    def run(i):
        rng = np.random.default_rng(children[i])
        out = []
        for start in range(0, sizes[i], 2048):
            n = min(2048, sizes[i] - start)
            out.append(qfi_of_states(sample_random_states(op.dim, ensemble, n, rng), op))
        return np.concatenate(out) if out else np.empty(0)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        values = np.concatenate(list(pool.map(run, range(shards))))
    return MonteCarloMean(
        float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size)), values.size
    )


def rand_qfi_exact(op: Operator, dim: int | None = None) -> float:
    """Haar average 4 Tr[O^2]/(K+1) - 4 Tr[O]^2 / (K (K+1))."""
    m = op.matrix
    k = op.dim
    if dim is not None and dim != k:
        raise ValueError(f"operator acts on dimension {k}, not {dim}")
    tr2 = np.trace(m @ m).real
    tr1 = np.trace(m).real
    return float(4 * tr2 / (k + 1) - 4 * tr1**2 / (k * (k + 1)))


def rand_qfi_exact_real(op: Operator) -> float:
    """Average QFI over random *real* unit vectors.

    Only Re(O) contributes to <O> for a real vector, and real Gaussian
    fourth moments give E<O>^2 = (2 Tr[R^2] + Tr[R]^2) / (K (K+2)) with
    R = Re(O).
    """
    m = op.matrix
    k = op.dim
    r = m.real
    second = np.trace(m @ m).real / k
    mean_sq = (2 * np.trace(r @ r) + np.trace(r) ** 2) / (k * (k + 2))
    return float(4 * (second - mean_sq))


def eigenvector_second_moment(dim: int, ensemble) -> float:
    """Gamma(bK/2)/Gamma(bK/2 + 1) * Gamma(1 + b/2)/Gamma(b/2); equals 1/K."""
    b = Ensemble.parse(ensemble).beta
    x = b * dim / 2
    return float(np.exp(gammaln(x) - gammaln(x + 1) + gammaln(1 + b / 2) - gammaln(b / 2)))


def second_moment_matrix(dim: int, ensemble, samples: int, seed=0):
    """Sample mean of a_m^* a_m' and its standard error (real and imaginary
    parts pooled into one error per entry)."""
    rng = np.random.default_rng(seed)
    total = np.zeros((dim, dim), dtype=complex)
    total_sq = np.zeros((dim, dim))
    done = 0
    while done < samples:
        n = min(2048, samples - done)
        a = sample_random_states(dim, ensemble, n, rng)
        outer = a.conj()[:, :, None] * a[:, None, :]
        total += outer.sum(axis=0)
        total_sq += (np.abs(outer) ** 2).sum(axis=0)
        done += n
    mean = total / samples
    var = total_sq / samples - np.abs(mean) ** 2
    return mean, np.sqrt(np.maximum(var, 0) / (samples - 1))
