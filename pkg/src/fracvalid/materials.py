"""Material model: power-law hardening and crack-tip opening relations.

Units: stresses in MPa, lengths in mm, energy release rates in kJ/m^2.
With these choices 1 MPa*mm == 1 kJ/m^2, so toughness/size relations carry
no conversion factors.  Stress intensity factors are MPa*sqrt(m) at the
public interface and MPa*sqrt(mm) internally (factor sqrt(1000)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError

SQRT_M_PER_SQRT_MM = math.sqrt(1000.0)

# Piecewise-linear anchors for the CTOD coefficient d_n(N).  The endpoints
# reproduce the published range (1.0 for perfect plasticity, 0.7..0.2 over
# N = 0.05..0.33); constant extrapolation beyond the last anchor.
_DN_ANCHORS_N = (0.0, 0.05, 0.33)
_DN_ANCHORS_V = (1.0, 0.7, 0.2)


@dataclass(frozen=True)
class Material:
    """Isotropic elastic-plastic material with power-law hardening.

    Attributes
    ----------
    E : float
        Young's modulus [MPa].
    nu : float
        Poisson's ratio.
    sigma_Y : float
        Initial yield strength [MPa].
    N : float
        Strain hardening exponent, ``0 <= N < 1``; ``N == 0`` is an
        elastic-perfectly plastic solid.
    """

    E: float
    nu: float
    sigma_Y: float
    N: float = 0.0

    def __post_init__(self):
        if not self.E > 0:
            raise InputError(f"E must be positive, got {self.E}")
        if not 0.0 < self.nu < 0.5:
            raise InputError(f"nu must lie in (0, 0.5), got {self.nu}")
        if not self.sigma_Y > 0:
            raise InputError(f"sigma_Y must be positive, got {self.sigma_Y}")
        if not 0.0 <= self.N < 1.0:
            raise InputError(f"N must lie in [0, 1), got {self.N}")

    @property
    def eps_Y(self) -> float:
        """Initial yield strain sigma_Y / E."""
        return self.sigma_Y / self.E

    @property
    def mu(self) -> float:
        """Shear modulus [MPa]."""
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def kappa(self) -> float:
        """Bulk modulus [MPa]."""
        return self.E / (3.0 * (1.0 - 2.0 * self.nu))


@dataclass(frozen=True)
class CtodCoefficient:
    """Dimensionless coefficient relating CTOD to J: delta = d_n * J / sigma_Y."""

    d_n: float

    def __post_init__(self):
        if not 0.0 < self.d_n <= 1.0:
            raise InputError(f"d_n must lie in (0, 1], got {self.d_n}")


def flow_stress(material: Material, eps_p):
    """Flow stress sigma_Y * (1 + eps_p/eps_Y)**N at plastic strain ``eps_p``.

    Accepts scalars or arrays; negative plastic strain raises.
    """
    eps = np.asarray(eps_p, dtype=float)
    if np.any(eps < 0.0):
        raise InputError("effective plastic strain must be non-negative")
    out = material.sigma_Y * (1.0 + eps / material.eps_Y) ** material.N
    return float(out) if np.isscalar(eps_p) else out


def hardening_modulus(material: Material, eps_p):
    """Tangent d(flow stress)/d(eps_p); zero for perfect plasticity."""
    eps = np.asarray(eps_p, dtype=float)
    if np.any(eps < 0.0):
        raise InputError("effective plastic strain must be non-negative")
    if material.N == 0.0:
        out = np.zeros_like(eps)
    else:
        out = (
            material.sigma_Y
            * material.N
            / material.eps_Y
            * (1.0 + eps / material.eps_Y) ** (material.N - 1.0)
        )
    return float(out) if np.isscalar(eps_p) else out


def _dn_value(d_n: CtodCoefficient | float) -> float:
    return d_n.d_n if isinstance(d_n, CtodCoefficient) else float(d_n)


def ctod_from_j(J: float, material: Material, d_n: CtodCoefficient | float) -> float:
    """Crack tip opening displacement delta = d_n * J / sigma_Y [mm].

    ``J`` in kJ/m^2; the MPa/mm/kJ-m^-2 unit system makes the quotient a
    length in mm directly.
    """
    if J < 0.0:
        raise InputError("J must be non-negative")
    return _dn_value(d_n) * J / material.sigma_Y


def estimate_dn(material: Material) -> CtodCoefficient:
    """Estimate d_n from the hardening exponent.

    Piecewise linear through (N, d_n) anchors (0, 1.0), (0.05, 0.7),
    (0.33, 0.2); constant beyond the anchor range.  This is an estimate:
    the weak dependence on sigma_Y/E is not modelled.
    """
    return CtodCoefficient(float(np.interp(material.N, _DN_ANCHORS_N, _DN_ANCHORS_V)))


def j_from_k(K: float, material: Material, mode: str = "plane-strain") -> float:
    """Convert K [MPa*sqrt(m)] to J [kJ/m^2]."""
    if K < 0.0:
        raise InputError("K must be non-negative")
    k_mm = K * SQRT_M_PER_SQRT_MM
    j = k_mm * k_mm / material.E
    if mode == "plane-strain":
        return j * (1.0 - material.nu**2)
    if mode == "plane-stress":
        return j
    raise InputError(f"unknown mode {mode!r}; use 'plane-stress' or 'plane-strain'")


def k_from_j(J: float, material: Material, mode: str = "plane-strain") -> float:
    """Convert J [kJ/m^2] to K [MPa*sqrt(m)]; exact inverse of :func:`j_from_k`."""
    if J < 0.0:
        raise InputError("J must be non-negative")
    j_eff = J / (1.0 - material.nu**2) if mode == "plane-strain" else J
    if mode not in ("plane-strain", "plane-stress"):
        raise InputError(f"unknown mode {mode!r}; use 'plane-stress' or 'plane-strain'")
    return math.sqrt(j_eff * material.E) / SQRT_M_PER_SQRT_MM


def k_j_convert(
    value: float, material: Material, mode: str = "plane-strain", target: str = "J"
) -> float:
    """Convert between K [MPa*sqrt(m)] and J [kJ/m^2] in either direction."""
    if target == "J":
        return j_from_k(value, material, mode)
    if target == "K":
        return k_from_j(value, material, mode)
    raise InputError(f"unknown target {target!r}; use 'J' or 'K'")


def load_material(path: str | Path) -> tuple[Material, CtodCoefficient | None]:
    """Read a material from a key-value config file.

    Format: one ``key = value`` pair per line; ``#`` starts a comment.
    Required keys: ``E`` [MPa], ``nu``, ``sigma_Y`` [MPa], ``N``.
    Optional: ``d_n``.  Returns the material and the explicit CTOD
    coefficient if one was given (``None`` means callers should fall back
    to :func:`estimate_dn`).
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"material file not found: {path}")
    values: dict[str, float] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: non-numeric value for {key!r}") from exc
    missing = [k for k in ("E", "nu", "sigma_Y", "N") if k not in values]
    if missing:
        raise InputError(f"{path}: missing required field(s): {', '.join(missing)}")
    material = Material(
        E=values["E"], nu=values["nu"], sigma_Y=values["sigma_Y"], N=values["N"]
    )
    d_n = CtodCoefficient(values["d_n"]) if "d_n" in values else None
    return material, d_n
