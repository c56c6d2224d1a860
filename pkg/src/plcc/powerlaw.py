"""Power-law coherency: joint decay of scale-specific correlation and
squared spectral coherency, with feasibility-aware regime classification.

The decay exponent ``H_rho = H_xy - (H_x + H_y) / 2`` is never positive for
a true power-law pair, because squared coherency is bounded by one. It can
be read off three ways: from the squared coherency near the origin
(``K2 ~ freq**(-4 H_rho)``), from the squared scale-specific correlation at
large scales (``rho2 ~ scale**(4 H_rho)``), or as the difference of the
separately estimated exponents. Estimates above zero are finite-sample
artifacts and are flagged, not interpreted.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .core import ScalingFit, fit_loglog, series_values
from .detrended import (
    DetrendConfig,
    default_scale_grid,
    estimate_hurst_dfa,
    estimate_hxy_dcca,
    rho_dcca,
)
from .errors import EstimationFailed, InvalidParameter, PlccError
from .spectral import _resolve_n_freqs, _validate_bandwidth, coherency

__all__ = [
    "REGIME_STANDARD",
    "REGIME_ANTI_COINTEGRATION",
    "REGIME_INFEASIBLE",
    "CoherencySettings",
    "CoherencyReport",
    "h_rho_frequency",
    "h_rho_time",
    "classify",
    "coherency_report",
]

REGIME_STANDARD = "standard"
REGIME_ANTI_COINTEGRATION = "anti-cointegration"
REGIME_INFEASIBLE = "infeasible-flag"


def _fit_power_decay(abscissa, ordinates, divisor: float, min_points: int = 5) -> ScalingFit:
    """Shared OLS core of both decay channels: drop zeros, fit, divide."""
    a = np.asarray(abscissa, dtype=float)
    o = np.asarray(ordinates, dtype=float)
    keep = o > 0
    dropped = int(o.size - np.count_nonzero(keep))
    if int(np.count_nonzero(keep)) < min_points:
        raise EstimationFailed(
            f"only {int(np.count_nonzero(keep))} positive ordinates survive; "
            f"need {min_points}"
        )
    fit = fit_loglog(np.column_stack([a[keep], o[keep]]), divisor)
    return dataclasses.replace(fit, diagnostics={"dropped_zero": dropped})


def h_rho_frequency(x, y, n_freqs: int | None = None, bandwidth: int = 11) -> ScalingFit:
    """Coherency-decay exponent from smoothed squared coherency near the origin.

    Fits ``log K2`` on ``log freq`` over the ``n_freqs`` lowest frequencies
    and divides the slope by -4. Zero ordinates are dropped (reported as
    ``diagnostics["dropped_zero"]``); fewer than 5 survivors fail.
    """
    b = _validate_bandwidth(bandwidth)
    vx = series_values(x)
    n = _resolve_n_freqs(n_freqs, vx.size)
    est = coherency(vx, y, b)
    return _fit_power_decay(est.frequencies[:n], est.values[:n], divisor=-4.0)


def h_rho_time(x, y, cfg: DetrendConfig | None = None) -> ScalingFit:
    """Coherency-decay exponent from the squared scale-specific correlation.

    Fits ``log rho2(s)`` on ``log s`` over the configured scales and divides
    the slope by 4. Zero coefficients are dropped; fewer than 5 survivors
    fail.
    """
    vx = series_values(x)
    if cfg is None:
        cfg = DetrendConfig(default_scale_grid(vx.size))
    pairs = rho_dcca(vx, y, cfg)
    return _rho_decay_fit(pairs)


def _rho_decay_fit(pairs: list[tuple[int, float]]) -> ScalingFit:
    scales = np.array([s for s, _ in pairs], dtype=float)
    rho2 = np.array([r * r for _, r in pairs])
    return _fit_power_decay(scales, rho2, divisor=4.0)


def classify(hx: float, hy: float, hxy: float, tol: float = 0.05) -> str:
    """Regime of a (H_x, H_y, H_xy) triple against the feasibility bound.

    "standard" when H_xy matches the average of H_x and H_y within ``tol``;
    "anti-cointegration" when it falls more than ``tol`` below;
    "infeasible-flag" when it exceeds the average by more than ``tol``,
    which no power-law pair can sustain and therefore marks an estimation
    artifact.
    """
    if not tol > 0:
        raise InvalidParameter("tol must be positive")
    average = (hx + hy) / 2.0
    if hxy > average + tol:
        return REGIME_INFEASIBLE
    if hxy < average - tol:
        return REGIME_ANTI_COINTEGRATION
    return REGIME_STANDARD


@dataclass(frozen=True)
class CoherencySettings:
    """Estimation settings for :func:`coherency_report`.

    Unset values resolve against the series length: the default scale grid
    for the detrended channel and ``floor(sqrt(T))`` frequencies for the
    spectral channel.
    """

    detrend: DetrendConfig | None = None
    n_freqs: int | None = None
    bandwidth: int = 11
    tolerance: float = 0.05

    def __post_init__(self):
        _validate_bandwidth(self.bandwidth)
        if not self.tolerance > 0:
            raise InvalidParameter("tolerance must be positive")


@dataclass(frozen=True)
class CoherencyReport:
    """Three-channel power-law coherency summary for one pair of series.

    Channels that fail carry None, with the reason recorded in ``failures``
    under the field name. ``rho_at_max_scale`` is reported for inspection
    only; a strongly negative value is not a cointegration claim.
    """

    h_x: ScalingFit | None
    h_y: ScalingFit | None
    h_xy: ScalingFit | None
    h_rho_freq: ScalingFit | None
    h_rho_time: ScalingFit | None
    h_rho_diff: float | None
    regime: str | None
    rho_at_max_scale: float | None
    settings: CoherencySettings
    failures: dict = field(default_factory=dict)


def coherency_report(x, y, settings: CoherencySettings | None = None) -> CoherencyReport:
    """Estimate all three decay channels plus the regime for one pair.

    The regime comes from :func:`classify` applied to the detrended
    exponents, so it is only available when H_x, H_y and H_xy all estimate
    cleanly.
    """
    vx = series_values(x)
    vy = series_values(y)
    if settings is None:
        settings = CoherencySettings()
    cfg = settings.detrend
    failures: dict = {}

    def attempt(name, fn, *args):
        try:
            return fn(*args)
        except PlccError as exc:
            failures[name] = str(exc)
            return None

    if cfg is None:
        cfg = attempt("h_x", lambda: DetrendConfig(default_scale_grid(vx.size)))
        if cfg is None:
            failures.setdefault("h_y", failures["h_x"])
            failures.setdefault("h_xy", failures["h_x"])
            failures.setdefault("h_rho_time", failures["h_x"])

    h_x = attempt("h_x", estimate_hurst_dfa, vx, cfg) if cfg is not None else None
    h_y = attempt("h_y", estimate_hurst_dfa, vy, cfg) if cfg is not None else None
    h_xy = attempt("h_xy", estimate_hxy_dcca, vx, vy, cfg) if cfg is not None else None
    h_rho_freq = attempt(
        "h_rho_freq", h_rho_frequency, vx, vy, settings.n_freqs, settings.bandwidth
    )

    h_rho_time_fit = None
    rho_at_max = None
    if cfg is not None:
        pairs = attempt("h_rho_time", rho_dcca, vx, vy, cfg)
        if pairs is not None:
            rho_at_max = pairs[-1][1]
            h_rho_time_fit = attempt("h_rho_time", _rho_decay_fit, pairs)

    h_rho_diff = None
    regime = None
    if h_x is not None and h_y is not None and h_xy is not None:
        h_rho_diff = h_xy.exponent - (h_x.exponent + h_y.exponent) / 2.0
        regime = classify(h_x.exponent, h_y.exponent, h_xy.exponent, settings.tolerance)

    return CoherencyReport(
        h_x=h_x,
        h_y=h_y,
        h_xy=h_xy,
        h_rho_freq=h_rho_freq,
        h_rho_time=h_rho_time_fit,
        h_rho_diff=h_rho_diff,
        regime=regime,
        rho_at_max_scale=rho_at_max,
        settings=settings,
        failures=failures,
    )
