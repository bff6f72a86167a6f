"""Semi-analytical size requirements and J_max estimates for test validity.

The central relation is the size requirement a, (W-a) >= M * J_Ic / sigma_Y
with a criterion-dependent factor M, and its rearrangement
J_max = controlling_size * sigma_Y / M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .materials import (
    SQRT_M_PER_SQRT_MM,
    CtodCoefficient,
    Material,
    ctod_from_j,
)

#: Named size-factor variants.  The 25 value is the long-standing default;
#: 10/100 are the current stable/unstable recommendations, 200 the earlier
#: unstable-fracture rule, and 180 the centre-cracked-panel estimate.
NAMED_CRITERIA: dict[str, float] = {
    "ASTM-E813-25": 25.0,
    "ASTM-E1820-stable-10": 10.0,
    "ASTM-E1820-unstable-100": 100.0,
    "E1737-unstable-200": 200.0,
    "CCP-180": 180.0,
}

#: Fraction of the ligament over which the HRR annulus extends in bend-type
#: and centre-cracked configurations (numerical estimates from the classical
#: J-dominance studies).
R_LIGAMENT_FRACTION_BEND = 0.07
R_LIGAMENT_FRACTION_CCP = 0.01

#: Finite-strain blunting destroys the singular field within about 3 CTOD.
R_OVER_CTOD_MIN = 3.0


@dataclass(frozen=True)
class SizeCriterion:
    """Dimensionless size factor M with a provenance label."""

    M: float
    label: str = "custom"

    def __post_init__(self):
        if not self.M > 0:
            raise InputError(f"M must be positive, got {self.M}")
        if self.label != "custom":
            expected = NAMED_CRITERIA.get(self.label)
            if expected is None:
                raise InputError(
                    f"unknown criterion label {self.label!r}; "
                    f"known: {sorted(NAMED_CRITERIA)} or 'custom'"
                )
            if expected != self.M:
                raise InputError(
                    f"label {self.label!r} fixes M={expected}, got M={self.M}"
                )

    @classmethod
    def from_label(cls, label: str) -> "SizeCriterion":
        if label not in NAMED_CRITERIA:
            raise InputError(f"unknown criterion label {label!r}")
        return cls(M=NAMED_CRITERIA[label], label=label)

    @classmethod
    def custom(cls, M: float) -> "SizeCriterion":
        return cls(M=M, label="custom")


@dataclass(frozen=True)
class SpecimenDimensions:
    """Crack length and width; the controlling dimension is min(a, W-a)."""

    a: float
    W: float

    def __post_init__(self):
        if not 0.0 < self.a < self.W:
            raise InputError(f"require 0 < a < W, got a={self.a}, W={self.W}")

    @property
    def ligament(self) -> float:
        return self.W - self.a

    @property
    def controlling(self) -> float:
        return min(self.a, self.ligament)


def lefm_min_size(K_Ic: float, material: Material) -> float:
    """Minimum in-plane dimension [mm] for a valid K-field: 2.5 (K_Ic/sigma_Y)^2.

    ``K_Ic`` in MPa*sqrt(m).
    """
    if K_Ic < 0.0:
        raise InputError("K_Ic must be non-negative")
    k_mm = K_Ic * SQRT_M_PER_SQRT_MM
    return 2.5 * (k_mm / material.sigma_Y) ** 2


def j_min_size(J_Ic: float, material: Material, criterion: SizeCriterion) -> float:
    """Minimum crack/ligament length [mm] for a valid J test: M * J_Ic / sigma_Y."""
    if J_Ic < 0.0:
        raise InputError("J_Ic must be non-negative")
    return criterion.M * J_Ic / material.sigma_Y


def j_max_semi(
    dims: SpecimenDimensions | float, material: Material, criterion: SizeCriterion
) -> float:
    """Semi-analytical maximum valid J [kJ/m^2]: controlling * sigma_Y / M.

    ``dims`` may be a :class:`SpecimenDimensions` or the controlling
    dimension directly in mm.
    """
    size = dims.controlling if isinstance(dims, SpecimenDimensions) else float(dims)
    if size <= 0.0:
        raise InputError("controlling dimension must be positive")
    return size * material.sigma_Y / criterion.M


@dataclass(frozen=True)
class HrrRadiusReport:
    """Radius requirements for HRR dominance at a given load level."""

    R_min_finite_strain: float  # 3 * CTOD [mm]
    R_bend_estimate: float  # 0.07 * ligament [mm]
    R_ccp_estimate: float  # 0.01 * ligament [mm]
    satisfied: bool  # bend-type: R_bend >= R_min


def hrr_radius_requirements(
    J: float,
    material: Material,
    dims: SpecimenDimensions,
    d_n: CtodCoefficient | float,
) -> HrrRadiusReport:
    """Compare the finite-strain radius floor against ligament-based estimates.

    ``R_min_finite_strain = 3 * d_n * J / sigma_Y``; with d_n = 0.6 this is
    the familiar 1.8 J/sigma_Y.  The bend / CCP annulus radii are 0.07 and
    0.01 of the ligament.
    """
    if J < 0.0:
        raise InputError("J must be non-negative")
    r_min = R_OVER_CTOD_MIN * ctod_from_j(J, material, d_n)
    r_bend = R_LIGAMENT_FRACTION_BEND * dims.ligament
    r_ccp = R_LIGAMENT_FRACTION_CCP * dims.ligament
    return HrrRadiusReport(
        R_min_finite_strain=r_min,
        R_bend_estimate=r_bend,
        R_ccp_estimate=r_ccp,
        satisfied=r_bend >= r_min,
    )


def semi_analytical_map(sigma_Y_grid, size_grid, criterion: SizeCriterion):
    """Build the semi-analytical validity map J_max = size * sigma_Y / M.

    Grids must be strictly increasing and positive.  Returns a
    :class:`fracvalid.maps.ValidityMap` with 'semi-analytical' provenance.
    """
    from .maps import ValidityMap  # local import to avoid a cycle

    sigma = np.asarray(sigma_Y_grid, dtype=float)
    size = np.asarray(size_grid, dtype=float)
    for name, grid in (("sigma_Y_grid", sigma), ("size_grid", size)):
        if grid.size == 0:
            raise InputError(f"{name} is empty")
        if np.any(grid <= 0.0):
            raise InputError(f"{name} must be positive")
        if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
            raise InputError(f"{name} must be strictly increasing")
    jmax = size[:, None] * sigma[None, :] / criterion.M
    return ValidityMap(
        sigma_grid=sigma,
        size_grid=size,
        jmax=jmax,
        provenance="semi-analytical",
        kind=None,
        N=None,
        converged=np.ones_like(jmax, dtype=bool),
        metadata={"criterion_label": criterion.label, "M": criterion.M},
    )


def default_sigma_grid(n: int = 8) -> np.ndarray:
    """Linear yield-strength grid over the 100-1500 MPa study range."""
    return np.linspace(100.0, 1500.0, n)


def default_size_grid(n: int = 7) -> np.ndarray:
    """Log size grid over the 0.001-100 mm study range."""
    return np.logspace(-3.0, 2.0, n)
