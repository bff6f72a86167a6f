"""HRR/K singularity slopes and regime detection in crack-plane profiles.

For a power-law hardening solid the crack-tip stress decays as
(J/r)^(N/(N+1)) while the linear-elastic field decays as r^(-1/2).  On a
log-log plot of stress against distance these are straight lines, which
gives a practical criterion for J-dominance: measure the log-transformed
length of the region whose local slope matches the theoretical one, and
declare the HRR field gone once that length falls below a threshold
(0.05 decades by default).

The fitting procedure is a toolkit parameter (window width, tolerance band,
near-tip exclusion); defaults below are calibrated against the bundled FE
reference case and documented in the README.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ProfileTooShortError
from .materials import Material
from .profiles import RadialProfile

KIND_K = "K-field"
KIND_HRR = "HRR"
ELASTIC_SLOPE = 0.5


@dataclass(frozen=True)
class TheoreticalSlopes:
    """Positive magnitudes of the log-log decay exponents."""

    stress_slope: float  # N/(N+1)
    strain_slope: float  # 1/(N+1)
    elastic_slope: float  # 1/2


def theoretical_slopes(N: float) -> TheoreticalSlopes:
    if not 0.0 <= N < 1.0:
        raise InputError(f"N must lie in [0, 1), got {N}")
    return TheoreticalSlopes(
        stress_slope=N / (N + 1.0),
        strain_slope=1.0 / (N + 1.0),
        elastic_slope=ELASTIC_SLOPE,
    )


def strain_energy_density(material: Material, sigma: float) -> float:
    """Uniaxial strain energy density of the power-law solid at stress ``sigma``.

    psi = sigma_Y * eps_Y / (N+1) * (sigma/sigma_Y)^(1 + 1/N).  Used to
    verify the (sigma/sigma_Y)^((N+1)/N) ~ J/r proportionality; the
    proportionality constant itself is not modelled.  Perfect plasticity
    (N = 0) has no finite exponent and is rejected.
    """
    if material.N == 0.0:
        raise InputError("strain energy density scaling is undefined for N = 0")
    if sigma < material.sigma_Y:
        raise InputError("sigma must be at or above the yield strength")
    ratio = sigma / material.sigma_Y
    return (
        material.sigma_Y
        * material.eps_Y
        / (material.N + 1.0)
        * ratio ** (1.0 + 1.0 / material.N)
    )


@dataclass(frozen=True)
class DetectionParams:
    """Tunable parameters of the sliding-window slope detector."""

    window_decades: float = 0.15
    slope_tol_frac: float = 0.10  # band half-width as fraction of |slope|
    slope_tol_floor: float = 0.01  # absolute floor, handles N -> 0
    min_hrr_decades: float = 0.05  # J-dominance threshold
    r_min_frac: float = 1e-3  # near-tip exclusion, in units of r/a
    min_window_pts: int = 4

    def __post_init__(self):
        if not self.window_decades > 0:
            raise InputError("window_decades must be positive")
        if self.slope_tol_frac < 0 or self.slope_tol_floor < 0:
            raise InputError("slope tolerances must be non-negative")
        if not self.min_hrr_decades > 0:
            raise InputError("min_hrr_decades must be positive")
        if self.r_min_frac < 0:
            raise InputError("r_min_frac must be non-negative")
        if self.min_window_pts < 3:
            raise InputError("min_window_pts must be at least 3")

    def band(self, slope_magnitude: float) -> float:
        return max(self.slope_tol_frac * slope_magnitude, self.slope_tol_floor)


@dataclass(frozen=True)
class RegimeSegment:
    """A contiguous run of samples following one singularity kind."""

    kind: str  # KIND_K or KIND_HRR
    r_lo: float  # normalised bounds (same units as the profile's r_over_a)
    r_hi: float
    fitted_slope: float
    log_length: float

    def __post_init__(self):
        if self.r_lo >= self.r_hi:
            raise InputError("segment requires r_lo < r_hi")


@dataclass(frozen=True)
class HrrVerdict:
    valid: bool
    hrr_log_length: float  # decades of the longest HRR segment (0 if none)


def _window_slopes(x: np.ndarray, y: np.ndarray, params: DetectionParams):
    """Least-squares slope of y(x) in a window of fixed width around each sample.

    Windows are centred where possible and shifted inward at the profile
    ends so that every sample sees the full window width.  Returns
    (slopes, ok) where ok marks samples whose window held enough points.
    """
    half = 0.5 * params.window_decades
    n = x.size
    slopes = np.full(n, np.nan)
    ok = np.zeros(n, dtype=bool)
    w_lo = x - half
    w_hi = x + half
    shift_up = np.maximum(x[0] - w_lo, 0.0)
    shift_dn = np.maximum(w_hi - x[-1], 0.0)
    w_lo = w_lo + shift_up - shift_dn
    w_hi = w_hi + shift_up - shift_dn
    lo = np.searchsorted(x, w_lo - 1e-12, side="left")
    hi = np.searchsorted(x, w_hi + 1e-12, side="right")
    for i in range(n):
        sl = slice(lo[i], hi[i])
        m = hi[i] - lo[i]
        if m < params.min_window_pts:
            continue
        xw = x[sl]
        yw = y[sl]
        xm = xw - xw.mean()
        denom = float(xm @ xm)
        if denom <= 0.0:
            continue
        slopes[i] = float(xm @ (yw - yw.mean())) / denom
        ok[i] = True
    return slopes, ok


def detect_regimes(
    profile: RadialProfile, N: float, params: DetectionParams | None = None
) -> list[RegimeSegment]:
    """Find maximal K-field and HRR segments in a crack-plane profile.

    A sample belongs to a regime when the least-squares slope of
    log10(stress) vs log10(r) over a centred window of
    ``params.window_decades`` lies within the tolerance band of the
    theoretical slope (-1/2 for the K-field, -N/(N+1) for HRR).  When a
    window qualifies for both bands the smaller slope residual wins.
    Samples with r/a below ``params.r_min_frac`` (the blunting/notch-root
    zone) are excluded.
    """
    params = params or DetectionParams()
    slopes_th = theoretical_slopes(N)
    mask = profile.r_over_a >= params.r_min_frac
    x = np.log10(profile.r_over_a[mask])
    y = np.log10(profile.stress_ratio[mask])
    if x.size < params.min_window_pts:
        raise ProfileTooShortError(
            f"only {x.size} samples beyond r_min_frac; need >= {params.min_window_pts}"
        )
    slopes, ok = _window_slopes(x, y, params)
    if not ok.any():
        raise ProfileTooShortError("no window held enough samples for a slope fit")

    target_k = -slopes_th.elastic_slope
    target_h = -slopes_th.stress_slope
    res_k = np.abs(slopes - target_k)
    res_h = np.abs(slopes - target_h)
    in_k = ok & (res_k <= params.band(slopes_th.elastic_slope))
    in_h = ok & (res_h <= params.band(slopes_th.stress_slope))
    both = in_k & in_h
    kind = np.full(x.size, "", dtype=object)
    kind[in_k] = KIND_K
    kind[in_h] = KIND_HRR
    kind[both] = np.where(res_k[both] <= res_h[both], KIND_K, KIND_HRR)

    segments: list[RegimeSegment] = []
    i = 0
    n = x.size
    while i < n:
        if not kind[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and kind[j + 1] == kind[i]:
            j += 1
        if j > i:  # at least two samples -> finite log length
            xm = x[i : j + 1] - x[i : j + 1].mean()
            ym = y[i : j + 1] - y[i : j + 1].mean()
            fitted = float(xm @ ym) / float(xm @ xm)
            segments.append(
                RegimeSegment(
                    kind=str(kind[i]),
                    r_lo=float(10.0 ** x[i]),
                    r_hi=float(10.0 ** x[j]),
                    fitted_slope=fitted,
                    log_length=float(x[j] - x[i]),
                )
            )
        i = j + 1
    return segments


def hrr_valid(
    profile: RadialProfile, N: float, params: DetectionParams | None = None
) -> HrrVerdict:
    """J-dominance verdict: longest HRR segment >= ``min_hrr_decades``."""
    params = params or DetectionParams()
    segments = detect_regimes(profile, N, params)
    lengths = [s.log_length for s in segments if s.kind == KIND_HRR]
    longest = max(lengths) if lengths else 0.0
    return HrrVerdict(valid=longest >= params.min_hrr_decades, hrr_log_length=longest)
