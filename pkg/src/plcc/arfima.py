"""Fractionally integrated noise and mixed-correlation pair generation.

A single series is a causal moving average of Gaussian or standardized
Student-t innovations with hyperbolically decaying weights controlled by a
memory parameter ``d``. A pair mixes two such components per side, with the
four innovation streams drawing from a shared contemporaneous covariance
matrix; that structure gives independent control over the memory of each
series and of their cross-correlation.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass

import numpy as np

from .core import TimeSeries
from .errors import InvalidParameter, TruncationWarning

__all__ = [
    "GAUSSIAN",
    "STUDENT_T",
    "WeightTable",
    "McArfimaSpec",
    "BivariateSeries",
    "arfima_weights",
    "correlated_innovations",
    "filter_mc_arfima",
    "generate_mc_arfima",
    "generate_arfima",
]

GAUSSIAN = "gaussian"
STUDENT_T = "student-t"
_DISTRIBUTIONS = (GAUSSIAN, STUDENT_T)


# =========================================================================
# Moving-average weights
# =========================================================================


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Moving-average weights ``a_0 .. a_{n-1}`` for one memory parameter."""

    d: float
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return int(self.weights.size)


def arfima_weights(d: float, n_terms: int) -> WeightTable:
    """Weights of the fractional-integration moving average.

    Built by the stable recursion ``a_0 = 1``, ``a_n = a_{n-1} (n - 1 + d) / n``,
    which avoids gamma-function overflow for large ``n``. For ``d = 0`` every
    weight beyond ``a_0`` vanishes; for ``d`` in (0, 0.5) the weights are
    positive and decay hyperbolically.
    """
    if not -0.5 < d < 0.5:
        raise InvalidParameter(f"d = {d}: memory parameter must lie in (-0.5, 0.5)")
    n = int(n_terms)
    if n != n_terms or n < 1:
        raise InvalidParameter("n_terms must be a positive integer")
    w = np.empty(n)
    w[0] = 1.0
    if n > 1:
        k = np.arange(1.0, n)
        w[1:] = np.cumprod((k - 1.0 + d) / k)
    return WeightTable(d=float(d), weights=w)


# =========================================================================
# Innovations
# =========================================================================


def _validate_sigma(sigma) -> np.ndarray:
    s = np.asarray(sigma, dtype=float)
    if s.shape != (4, 4):
        raise InvalidParameter(f"sigma must be 4x4, got shape {s.shape}")
    if not np.isfinite(s).all():
        raise InvalidParameter("sigma contains NaN or infinite entries")
    scale = max(1.0, float(np.abs(s).max()))
    if float(np.abs(s - s.T).max()) > 1e-12 * scale:
        raise InvalidParameter("sigma must be symmetric")
    if np.any(np.diag(s) <= 0):
        raise InvalidParameter("sigma diagonal entries must be strictly positive")
    if float(np.linalg.eigvalsh(s).min()) < -1e-10:
        raise InvalidParameter("sigma must be positive semi-definite")
    return s


def _validate_dist(dist: str, dof) -> None:
    if dist not in _DISTRIBUTIONS:
        raise InvalidParameter(f"innovation_dist must be one of {_DISTRIBUTIONS}, got {dist!r}")
    if dist == STUDENT_T:
        if dof is None or not dof > 2:
            raise InvalidParameter("Student-t innovations need dof > 2 for a finite variance")


def _validate_seed(seed) -> int:
    s = int(seed)
    if s != seed or s < 0:
        raise InvalidParameter("seed must be a non-negative integer")
    return s


def _sigma_factor(sigma: np.ndarray) -> np.ndarray:
    """Factor F with F @ F.T = sigma; eigenvalue clipping for singular input."""
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        eigvals, eigvecs = np.linalg.eigh(sigma)
        return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


def _unit_stream(rng: np.random.Generator, dist: str, dof, n: int) -> np.ndarray:
    z = rng.standard_normal(n)
    if dist == GAUSSIAN:
        return z
    # Scale-mixture construction of Student-t: z * sqrt(dof / w) with a
    # chi-square mixing variable, standardized to unit variance. Drawing the
    # normal part first means a Gaussian run and a Student-t run under the
    # same seed share the normal path, so paired comparisons across the two
    # distributions isolate the tail effect (common random numbers).
    w = rng.chisquare(dof, n)
    return z * np.sqrt((dof - 2.0) / w)


def correlated_innovations(sigma, dist: str, length: int, seed, dof=None) -> np.ndarray:
    """Four aligned innovation streams with contemporaneous covariance ``sigma``.

    Stream ``i`` draws from its own generator seeded with ``seed + i``, so the
    streams are reproducible independently of generation order. The raw unit-
    variance streams are then mixed with a factor of ``sigma``; Student-t
    streams are rescaled to unit variance first so ``sigma`` is the actual
    covariance, not just a shape parameter.

    Returns an array of shape ``(4, length)``.
    """
    s = _validate_sigma(sigma)
    _validate_dist(dist, dof)
    base = _validate_seed(seed)
    n = int(length)
    if n != length or n < 1:
        raise InvalidParameter("length must be a positive integer")
    raw = np.empty((4, n))
    for i in range(4):
        raw[i] = _unit_stream(np.random.default_rng(base + i), dist, dof, n)
    return _sigma_factor(s) @ raw


# =========================================================================
# Pair specification and generation
# =========================================================================


@dataclass(frozen=True, eq=False)
class McArfimaSpec:
    """Parameters of a correlated pair of two-component long-memory series.

    ``x`` mixes components with memory ``d1``/``d2`` and weights
    ``alpha``/``beta``; ``y`` mixes ``d3``/``d4`` with ``gamma``/``delta``.
    ``sigma`` is the 4x4 contemporaneous covariance of the innovation streams
    feeding the four components, in that order.

    ``truncation`` (moving-average cutoff: highest retained weight index) and
    ``burn_in`` may be left as None to be resolved against the generated
    length: ``burn_in = length`` and ``truncation = length + burn_in``, which
    keeps the full weight memory available for every retained sample.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    d1: float
    d2: float
    d3: float
    d4: float
    sigma: np.ndarray
    innovation_dist: str = GAUSSIAN
    dof: float | None = None
    truncation: int | None = None
    burn_in: int | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise InvalidParameter(f"{name} = {v}: weights must be finite")
        for name in ("d1", "d2", "d3", "d4"):
            v = getattr(self, name)
            if not -0.5 < v < 0.5:
                raise InvalidParameter(f"{name} = {v}: memory parameters must lie in (-0.5, 0.5)")
        s = _validate_sigma(self.sigma)
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "sigma", s)
        _validate_dist(self.innovation_dist, self.dof)
        if self.truncation is not None and self.truncation < 1:
            raise InvalidParameter("truncation must be a positive integer")
        if self.burn_in is not None and self.burn_in < 0:
            raise InvalidParameter("burn_in must be non-negative")

    def resolved(self, length: int) -> "McArfimaSpec":
        """Concrete copy with truncation and burn-in defaults filled in."""
        burn = self.burn_in if self.burn_in is not None else int(length)
        trunc = self.truncation if self.truncation is not None else int(length) + burn
        return dataclasses.replace(self, truncation=int(trunc), burn_in=int(burn))

    def component_weights(self) -> tuple[tuple[float, float], ...]:
        """((weight, d), ...) for the four components in stream order."""
        return (
            (self.alpha, self.d1),
            (self.beta, self.d2),
            (self.gamma, self.d3),
            (self.delta, self.d4),
        )

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "delta": self.delta,
            "d1": self.d1,
            "d2": self.d2,
            "d3": self.d3,
            "d4": self.d4,
            "sigma": [[float(v) for v in row] for row in self.sigma],
            "innovation_dist": self.innovation_dist,
            "dof": self.dof,
            "truncation": self.truncation,
            "burn_in": self.burn_in,
        }


@dataclass(frozen=True, eq=False)
class BivariateSeries:
    """A generated pair along with the spec and seed that produced it."""

    x: TimeSeries
    y: TimeSeries
    spec_echo: McArfimaSpec
    seed: int


def _fft_convolve_tail(stream: np.ndarray, weights: np.ndarray, n_keep: int) -> np.ndarray:
    """Fully-overlapping part of ``stream * weights``, first ``n_keep`` samples.

    Equivalent to ``np.convolve(stream, weights)[len(weights)-1:][:n_keep]``
    but FFT-based; direct convolution is quadratic and unusable at the
    default truncation lengths.
    """
    n_full = stream.size + weights.size - 1
    n_fft = 1 << (n_full - 1).bit_length()
    prod = np.fft.rfft(stream, n_fft) * np.fft.rfft(weights, n_fft)
    full = np.fft.irfft(prod, n_fft)
    start = weights.size - 1
    return full[start : start + n_keep]


def filter_mc_arfima(spec: McArfimaSpec, innovations: np.ndarray, length: int) -> tuple[np.ndarray, np.ndarray]:
    """Apply the moving-average filters of a resolved spec to given streams.

    ``innovations`` must have shape (4, truncation + burn_in + length). This
    is the deterministic core of :func:`generate_mc_arfima`, exposed so the
    filtering can be checked independently of the stream generation (for
    example under a consistent swap of the two sides).
    """
    if spec.truncation is None or spec.burn_in is None:
        raise InvalidParameter("spec must be resolved before filtering")
    n_keep = spec.burn_in + length
    needed = spec.truncation + n_keep
    if innovations.shape != (4, needed):
        raise InvalidParameter(
            f"innovations must have shape (4, {needed}), got {innovations.shape}"
        )
    tables: dict[float, np.ndarray] = {}
    parts = []
    for (weight, d), stream in zip(spec.component_weights(), innovations):
        if weight == 0.0:
            parts.append(np.zeros(length))
            continue
        if d not in tables:
            tables[d] = arfima_weights(d, spec.truncation + 1).weights
        filtered = _fft_convolve_tail(stream, tables[d], n_keep)
        parts.append(weight * filtered[spec.burn_in :])
    return parts[0] + parts[1], parts[2] + parts[3]


def generate_mc_arfima(spec: McArfimaSpec, length: int, seed) -> BivariateSeries:
    """Generate a correlated long-memory pair of the given length.

    Deterministic: the same (spec, length, seed) always returns bit-identical
    series. A truncation below ``length`` is accepted but flagged with a
    :class:`TruncationWarning` since long-lag correlations are then biased.
    """
    n = int(length)
    if n != length or n < 64:
        raise InvalidParameter("length must be an integer >= 64")
    base = _validate_seed(seed)
    rspec = spec.resolved(n)
    if rspec.truncation < n:
        warnings.warn(
            f"truncation {rspec.truncation} is below the series length {n}",
            TruncationWarning,
            stacklevel=2,
        )
    total = rspec.truncation + rspec.burn_in + n
    eps = correlated_innovations(rspec.sigma, rspec.innovation_dist, total, base, rspec.dof)
    x, y = filter_mc_arfima(rspec, eps, n)
    return BivariateSeries(
        x=TimeSeries(x, label="x"),
        y=TimeSeries(y, label="y"),
        spec_echo=rspec,
        seed=base,
    )


def generate_arfima(
    d: float,
    length: int,
    seed,
    dist: str = GAUSSIAN,
    dof=None,
    truncation: int | None = None,
    burn_in: int | None = None,
) -> TimeSeries:
    """Generate a single fractionally integrated noise series.

    Uses the same stream derivation, truncation and burn-in conventions as
    :func:`generate_mc_arfima`, so it reproduces the ``x`` side of a pair
    whose spec degenerates to one active component with unit weight and
    identity covariance.
    """
    n = int(length)
    if n != length or n < 64:
        raise InvalidParameter("length must be an integer >= 64")
    base = _validate_seed(seed)
    _validate_dist(dist, dof)
    if not -0.5 < d < 0.5:
        raise InvalidParameter(f"d = {d}: memory parameter must lie in (-0.5, 0.5)")
    burn = int(burn_in) if burn_in is not None else n
    if burn < 0:
        raise InvalidParameter("burn_in must be non-negative")
    trunc = int(truncation) if truncation is not None else n + burn
    if trunc < 1:
        raise InvalidParameter("truncation must be a positive integer")
    if trunc < n:
        warnings.warn(
            f"truncation {trunc} is below the series length {n}",
            TruncationWarning,
            stacklevel=2,
        )
    n_keep = burn + n
    stream = _unit_stream(np.random.default_rng(base + 0), dist, dof, trunc + n_keep)
    weights = arfima_weights(d, trunc + 1).weights
    values = _fft_convolve_tail(stream, weights, n_keep)[burn:]
    return TimeSeries(values, label=f"arfima(d={d:g})")
