"""Detrended fluctuation statistics on box-wise polynomial residuals.

The profile of each series is cut into boxes of length ``s`` taken from both
the start and the end (``2 * (T // s)`` boxes per scale), a polynomial trend
is removed in every box, and the mean residual product per box is averaged
across boxes. With one series that average is a variance-like curve growing
as ``s**(2H)``; with two series it is the covariance-like analogue.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import FluctuationCurve, ScalingFit, fit_loglog, profile, series_values
from .errors import (
    DegenerateInput,
    EstimationFailed,
    InvalidInput,
    InvalidParameter,
    SeriesTooShort,
)

__all__ = [
    "DetrendConfig",
    "min_scale_for_order",
    "default_scale_grid",
    "dfa_fluctuation",
    "dcca_fluctuation",
    "estimate_hurst_dfa",
    "estimate_hxy_dcca",
    "rho_dcca",
    "beta_dcca",
]


def min_scale_for_order(poly_order: int) -> int:
    """Smallest admissible box size for a given detrending order."""
    return max(10, 4 * (poly_order + 2))


@dataclass(frozen=True, eq=False)
class DetrendConfig:
    """Scale grid and detrending order shared by all detrended statistics.

    The box layout is fixed: boxes come from both ends of the profile, so
    every statistic at scale ``s`` pools ``2 * (T // s)`` boxes. Scales must
    be strictly increasing, at least 5 of them, none below
    ``min_scale_for_order(poly_order)``; the upper bound (at most a fifth of
    the series length) is checked against each analyzed series.
    """

    scale_grid: np.ndarray
    poly_order: int = 1

    def __post_init__(self):
        order = int(self.poly_order)
        if order != self.poly_order or order < 0:
            raise InvalidParameter("poly_order must be a non-negative integer")
        grid = np.asarray(self.scale_grid)
        if grid.size and not np.issubdtype(grid.dtype, np.integer):
            if not np.all(grid == np.floor(grid)):
                raise InvalidParameter("scales must be integers")
        grid = grid.astype(int)
        if grid.size < 5:
            raise InvalidParameter(f"need at least 5 scales, got {grid.size}")
        if np.any(np.diff(grid) <= 0):
            raise InvalidParameter("scales must be strictly increasing")
        lo = min_scale_for_order(order)
        if grid[0] < lo:
            raise InvalidParameter(
                f"smallest scale {int(grid[0])} is below {lo}, the minimum for order {order}"
            )
        grid.flags.writeable = False
        object.__setattr__(self, "scale_grid", grid)
        object.__setattr__(self, "poly_order", order)


def default_scale_grid(
    length: int,
    poly_order: int = 1,
    n_scales: int = 20,
    min_scale: int | None = None,
    max_scale: int | None = None,
) -> np.ndarray:
    """Log-spaced integer scales between the order's minimum and ``length // 5``.

    ``min_scale`` and ``max_scale`` tighten the bounds without escaping them;
    capping the top is useful when a cross signal drowns in fluctuation noise
    at large scales.
    """
    lo = min_scale_for_order(poly_order)
    if min_scale is not None:
        lo = max(lo, int(min_scale))
    hi = int(length) // 5
    if max_scale is not None:
        hi = min(hi, int(max_scale))
    if hi < lo:
        raise SeriesTooShort(
            f"length {length} leaves no admissible scales for order {poly_order}"
        )
    grid = np.unique(np.round(np.geomspace(lo, hi, int(n_scales))).astype(int))
    if grid.size < 5:
        raise SeriesTooShort(f"length {length} yields fewer than 5 distinct scales")
    return grid


# =========================================================================
# Residual machinery
# =========================================================================


@lru_cache(maxsize=512)
def _detrend_basis(s: int, order: int) -> np.ndarray:
    """Orthonormal polynomial basis on box abscissa 1..s rescaled to [-1, 1].

    The rescaling keeps the Vandermonde matrix well conditioned at large box
    sizes; Q is cached per (scale, order) since every box shares it.
    """
    u = (2.0 * np.arange(1, s + 1) - (s + 1)) / (s - 1)
    v = np.vander(u, order + 1, increasing=True)
    q, _ = np.linalg.qr(v)
    q.flags.writeable = False
    return q


def _box_residuals(pv: np.ndarray, s: int, order: int) -> np.ndarray:
    """Residual matrix (2*(T//s), s) of box-wise polynomial detrending."""
    t = pv.size
    ns = t // s
    fwd = pv[: ns * s].reshape(ns, s)
    bwd = pv[t - ns * s :].reshape(ns, s)
    boxes = np.concatenate([fwd, bwd], axis=0)
    q = _detrend_basis(s, order)
    return boxes - (boxes @ q) @ q.T


def _check_series(v: np.ndarray, cfg: DetrendConfig) -> None:
    if v.std() == 0.0:
        raise DegenerateInput("detrended statistics are undefined for a zero-variance series")
    t = v.size
    if t < 4 * int(cfg.scale_grid[0]):
        raise SeriesTooShort(
            f"length {t} is below 4x the smallest scale {int(cfg.scale_grid[0])}"
        )
    if int(cfg.scale_grid[-1]) > t // 5:
        raise InvalidInput(
            f"largest scale {int(cfg.scale_grid[-1])} exceeds T/5 = {t // 5}"
        )


def _joint_fluctuations(x, y, cfg: DetrendConfig):
    """Scales plus pooled second moments (F2_x, F2_y, F2_xy) of box residuals.

    ``y`` may be None for the univariate case. Using one box layout for all
    three curves is what makes the correlation coefficient built from them
    obey the Cauchy-Schwarz bound scale by scale.
    """
    vx = series_values(x)
    vy = None if y is None else series_values(y)
    if vy is not None and vy.size != vx.size:
        raise InvalidInput(f"series lengths differ: {vx.size} vs {vy.size}")
    _check_series(vx, cfg)
    if vy is not None and vy.std() == 0.0:
        raise DegenerateInput("detrended statistics are undefined for a zero-variance series")
    px = profile(vx).values
    py = px if vy is None else profile(vy).values
    k = cfg.scale_grid.size
    fxx = np.empty(k)
    fyy = np.empty(k)
    fxy = np.empty(k)
    for i, s in enumerate(cfg.scale_grid):
        rx = _box_residuals(px, int(s), cfg.poly_order)
        ry = rx if py is px else _box_residuals(py, int(s), cfg.poly_order)
        # box statistic = mean squared residual; curve value = mean over boxes
        fxx[i] = (rx * rx).mean(axis=1).mean()
        if ry is rx:
            fyy[i] = fxx[i]
            fxy[i] = fxx[i]
        else:
            fyy[i] = (ry * ry).mean(axis=1).mean()
            fxy[i] = (rx * ry).mean(axis=1).mean()
    return cfg.scale_grid, fxx, fyy, fxy


# =========================================================================
# Fluctuation curves
# =========================================================================


def dfa_fluctuation(x, cfg: DetrendConfig) -> FluctuationCurve:
    """Detrended variance curve F2(s); grows as ``s**(2H)``."""
    scales, fxx, _, _ = _joint_fluctuations(x, None, cfg)
    return FluctuationCurve(scales=scales, values=fxx, kind="dfa")


def dcca_fluctuation(x, y, cfg: DetrendConfig) -> FluctuationCurve:
    """Detrended covariance curve F2_xy(s); may change sign.

    Bilinear in its inputs and reduces exactly to :func:`dfa_fluctuation`
    when both arguments hold the same values.
    """
    scales, _, _, fxy = _joint_fluctuations(x, y, cfg)
    return FluctuationCurve(scales=scales, values=fxy, kind="dcca")


# =========================================================================
# Exponent estimates and scale-specific coefficients
# =========================================================================


def _fit_scaling(scales, values, divisor: float, min_points: int = 3) -> ScalingFit:
    """Log-log fit of |values| vs scales with sign-flip and drop accounting."""
    vals = np.asarray(values, dtype=float)
    sign_flips = int(np.count_nonzero(vals < 0))
    signs = np.sign(vals[vals != 0])
    sign_changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    mag = np.abs(vals)
    keep = mag > 0
    dropped = int(vals.size - np.count_nonzero(keep))
    if int(np.count_nonzero(keep)) < min_points:
        raise EstimationFailed(
            f"only {int(np.count_nonzero(keep))} usable points after dropping "
            f"non-positive values; need {min_points}"
        )
    fit = fit_loglog(np.column_stack([np.asarray(scales)[keep], mag[keep]]), divisor)
    return dataclasses.replace(
        fit,
        diagnostics={
            "sign_flips": sign_flips,
            "sign_changes": sign_changes,
            "dropped_nonpositive": dropped,
        },
    )


def estimate_hurst_dfa(x, cfg: DetrendConfig) -> ScalingFit:
    """Memory exponent H from the slope of log F2(s) on log s, divided by 2."""
    curve = dfa_fluctuation(x, cfg)
    return _fit_scaling(curve.scales, curve.values, divisor=2.0)


def estimate_hxy_dcca(x, y, cfg: DetrendConfig) -> ScalingFit:
    """Cross-memory exponent H_xy from the detrended covariance curve.

    Negative curve values enter the fit through their absolute value; the
    count is reported as ``diagnostics["sign_flips"]`` and the number of
    sign alternations along the scale axis as ``diagnostics["sign_changes"]``.
    Frequent alternations mean the power-law reading is not trustworthy (a
    stably negative curve, e.g. for anti-correlated pairs, is fine).
    """
    curve = dcca_fluctuation(x, y, cfg)
    return _fit_scaling(curve.scales, curve.values, divisor=2.0)


def _rho_values(fxx: np.ndarray, fyy: np.ndarray, fxy: np.ndarray) -> np.ndarray:
    if np.any(fxx <= 0) or np.any(fyy <= 0):
        raise DegenerateInput("zero detrended variance at some scale")
    return np.clip(fxy / np.sqrt(fxx * fyy), -1.0, 1.0)


def rho_dcca(x, y, cfg: DetrendConfig) -> list[tuple[int, float]]:
    """Scale-specific correlation F2_xy / sqrt(F2_x F2_y) per scale.

    Shares one box layout across the three curves, so every coefficient lies
    in [-1, 1] (clipping absorbs at most floating-point rounding).
    """
    scales, fxx, fyy, fxy = _joint_fluctuations(x, y, cfg)
    rho = _rho_values(fxx, fyy, fxy)
    return [(int(s), float(r)) for s, r in zip(scales, rho)]


def beta_dcca(x, y, cfg: DetrendConfig) -> list[tuple[int, float]]:
    """Scale-specific regression coefficient F2_xy / F2_x per scale.

    ``x`` is the regressor. Invariant under adding a constant to either
    series and scales linearly in ``y``.
    """
    scales, fxx, _, fxy = _joint_fluctuations(x, y, cfg)
    if np.any(fxx <= 0):
        raise DegenerateInput("zero detrended variance of the regressor at some scale")
    beta = fxy / fxx
    return [(int(s), float(b)) for s, b in zip(scales, beta)]
