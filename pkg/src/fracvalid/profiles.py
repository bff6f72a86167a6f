"""Crack-plane stress profiles: container, CSV round trip, synthetic builders.

A profile is the normalised opening stress sigma/sigma_Y sampled against the
normalised distance r/a ahead of the crack tip on the extended crack plane
(theta = 0).  Profiles can come from the bundled FE kernel or be imported
from third-party tools via the CSV format below::

    # fracvalid radial profile
    # a_ref_mm = 0.01
    # j_at_load_kJ_m2 = 0.04
    r_over_a,stress_ratio
    1.0e-03,4.21
    ...
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError

MIN_SAMPLES = 20
MIN_SPAN_DECADES = 2.0


@dataclass(frozen=True)
class RadialProfile:
    """Opening-stress profile along the crack plane.

    ``r_over_a`` must be strictly increasing and positive, with at least
    20 samples spanning at least two decades; ``stress_ratio`` must be
    positive throughout.
    """

    r_over_a: np.ndarray
    stress_ratio: np.ndarray
    a_ref: float  # normalising length [mm]
    j_at_load: float  # applied J at this load level [kJ/m^2]

    def __post_init__(self):
        r = np.asarray(self.r_over_a, dtype=float)
        s = np.asarray(self.stress_ratio, dtype=float)
        object.__setattr__(self, "r_over_a", r)
        object.__setattr__(self, "stress_ratio", s)
        if r.ndim != 1 or s.shape != r.shape:
            raise InputError("r_over_a and stress_ratio must be matching 1-D arrays")
        if r.size < MIN_SAMPLES:
            raise InputError(f"profile needs >= {MIN_SAMPLES} samples, got {r.size}")
        if np.any(r <= 0.0) or np.any(s <= 0.0):
            raise InputError("profile samples must be strictly positive")
        if np.any(np.diff(r) <= 0.0):
            raise InputError("r_over_a must be strictly increasing")
        span = np.log10(r[-1] / r[0])
        if span < MIN_SPAN_DECADES * (1.0 - 1e-12):
            raise InputError(
                f"profile must span >= {MIN_SPAN_DECADES} decades, got {span:.3f}"
            )
        if not self.a_ref > 0.0:
            raise InputError("a_ref must be positive")
        if self.j_at_load < 0.0:
            raise InputError("j_at_load must be non-negative")

    @property
    def samples(self):
        """Ordered (r_over_a, stress_ratio) pairs."""
        return list(zip(self.r_over_a, self.stress_ratio))

    def rescaled(self, new_a_ref: float) -> "RadialProfile":
        """Re-normalise the radial coordinate to a different reference length."""
        factor = self.a_ref / new_a_ref
        return RadialProfile(
            r_over_a=self.r_over_a * factor,
            stress_ratio=self.stress_ratio,
            a_ref=new_a_ref,
            j_at_load=self.j_at_load,
        )

    def to_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv_text())

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write("# fracvalid radial profile\n")
        buf.write(f"# a_ref_mm = {float(self.a_ref)!r}\n")
        buf.write(f"# j_at_load_kJ_m2 = {float(self.j_at_load)!r}\n")
        buf.write("r_over_a,stress_ratio\n")
        for r, s in zip(self.r_over_a, self.stress_ratio):
            buf.write(f"{float(r)!r},{float(s)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path: str | Path) -> "RadialProfile":
        path = Path(path)
        if not path.exists():
            raise InputError(f"profile file not found: {path}")
        meta: dict[str, float] = {}
        rows: list[tuple[float, float]] = []
        saw_header = False
        for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    try:
                        meta[key.strip()] = float(val.strip())
                    except ValueError:
                        pass
                continue
            if not saw_header:
                cols = [c.strip() for c in line.split(",")]
                if cols != ["r_over_a", "stress_ratio"]:
                    raise InputError(
                        f"{path}:{lineno}: expected header 'r_over_a,stress_ratio'"
                    )
                saw_header = True
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected two columns")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: non-numeric sample") from exc
        for key in ("a_ref_mm", "j_at_load_kJ_m2"):
            if key not in meta:
                raise InputError(f"{path}: missing metadata line '# {key} = ...'")
        if not rows:
            raise InputError(f"{path}: no samples")
        arr = np.asarray(rows, dtype=float)
        return cls(
            r_over_a=arr[:, 0],
            stress_ratio=arr[:, 1],
            a_ref=meta["a_ref_mm"],
            j_at_load=meta["j_at_load_kJ_m2"],
        )


def synthesize_profile(
    segments: list[tuple[float, float]],
    r_start: float = 1e-3,
    amplitude: float = 4.0,
    samples_per_decade: int = 40,
    a_ref: float = 0.01,
    j_at_load: float = 0.0,
) -> RadialProfile:
    """Build a piecewise power-law profile, continuous in log-log space.

    ``segments`` is a list of (slope, decades) pairs, e.g.
    ``[(-1/11, 1.5), (-0.5, 1.0)]`` for an inner HRR stretch followed by a
    K-field tail.  Slopes are signed log-log slopes; ``amplitude`` is the
    stress ratio at ``r_start``.
    """
    if not segments:
        raise InputError("need at least one (slope, decades) segment")
    xs: list[np.ndarray] = []
    x0 = np.log10(r_start)
    for slope, decades in segments:
        if decades <= 0.0:
            raise InputError("segment decades must be positive")
        n = max(2, int(round(decades * samples_per_decade)))
        seg = np.linspace(x0, x0 + decades, n, endpoint=False)
        xs.append(seg)
        x0 += decades
    x = np.concatenate(xs + [np.array([x0])])
    y = np.empty_like(x)
    y[0] = np.log10(amplitude)
    # integrate the piecewise slope over the log-log abscissa
    slopes = np.empty(x.size - 1)
    edges = np.cumsum([0.0] + [d for _, d in segments]) + np.log10(r_start)
    mid = 0.5 * (x[:-1] + x[1:])
    idx = np.clip(np.searchsorted(edges, mid, side="right") - 1, 0, len(segments) - 1)
    slopes[:] = [segments[i][0] for i in idx]
    y[1:] = y[0] + np.cumsum(slopes * np.diff(x))
    return RadialProfile(
        r_over_a=10.0**x,
        stress_ratio=10.0**y,
        a_ref=a_ref,
        j_at_load=j_at_load,
    )
