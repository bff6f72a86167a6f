"""Crack-plane stress profile extraction from converged FE states.

Samples the opening stress (Cauchy component normal to the crack plane) at
integration points lying in a narrow cone around the extended crack plane,
sorted by reference distance from the tip and thinned to one sample per
radial station (the one closest to the plane wins).  The polar tip patch
makes the resulting sampling log-uniform in radius, which is exactly what
the sliding-window slope detector needs.
"""

from __future__ import annotations

import numpy as np

from ..profiles import RadialProfile
from .solver import FEModel, SolutionState

#: cone half-width: perpendicular distance allowed as a fraction of the
#: along-plane distance, with an absolute floor near the notch root
CONE_FRAC = 0.12
CONE_FLOOR_RHO0 = 0.8
#: radial stations closer than this factor are duplicates of one station
STATION_MERGE = 1.01


def crack_plane_samples(model: FEModel, sol: SolutionState):
    """(r_mm, sigma_open_MPa) along the extended crack plane, tip outward."""
    mesh = model.mesh
    rel = model.ip_coords - mesh.tip
    r_along = rel @ mesh.crack_dir
    d_perp = np.abs(rel @ mesh.crack_normal)
    cone = np.maximum(CONE_FRAC * r_along, CONE_FLOOR_RHO0 * mesh.rho0)
    sel = np.flatnonzero((r_along > 0.0) & (d_perp <= cone))
    if sel.size == 0:
        return np.empty(0), np.empty(0)
    order = sel[np.argsort(r_along[sel], kind="stable")]
    sigma_nn = np.einsum(
        "i,nij,j->n", mesh.crack_normal, sol.cauchy[order], mesh.crack_normal
    )
    r_sorted = r_along[order]
    d_sorted = d_perp[order]
    # one representative per radial station: smallest perpendicular offset
    out_r, out_s = [], []
    i = 0
    n = r_sorted.size
    while i < n:
        j = i
        best = i
        while j + 1 < n and r_sorted[j + 1] <= r_sorted[i] * STATION_MERGE:
            j += 1
            if d_sorted[j] < d_sorted[best]:
                best = j
        out_r.append(r_sorted[best])
        out_s.append(sigma_nn[best])
        i = j + 1
    return np.asarray(out_r), np.asarray(out_s)


def extract_crack_plane_profile(
    model: FEModel, sol: SolutionState, j_at_load: float
) -> RadialProfile:
    """Normalised opening-stress profile (sigma/sigma_Y vs r/a).

    The profile is truncated at the first non-positive stress sample: the
    far ligament can go into bending compression, which carries no
    singularity information and would break the positivity invariant.
    """
    r, s = crack_plane_samples(model, sol)
    positive = s > 1e-9 * model.material.sigma_Y
    if not positive.all():
        cut = int(np.argmin(positive))  # first False
        r, s = r[:cut], s[:cut]
    return RadialProfile(
        r_over_a=r / model.mesh.geom.a,
        stress_ratio=s / model.material.sigma_Y,
        a_ref=model.mesh.geom.a,
        j_at_load=j_at_load,
    )
