"""Validity limits of small-scale fracture toughness tests.

The package provides three layers:

* closed-form material relations and semi-analytical size criteria
  (``materials``, ``criteria``),
* detection of K-field / HRR singularity regimes in crack-plane stress
  profiles (``profiles``, ``hrr``),
* a plane-strain, finite-strain elastic-plastic finite element kernel with
  domain-integral J evaluation (``fem``) and a campaign layer that searches
  for the maximum valid J per specimen and assembles validity maps
  (``campaign``, ``maps``), including a hydrogen-embrittlement overlay
  (``hydrogen``).

Internal unit system: MPa, mm, kJ/m^2 (1 MPa*mm == 1 kJ/m^2).  Stress
intensity factors are MPa*sqrt(m) at public interfaces.
"""

__version__ = "0.1.0"

from .materials import Material, CtodCoefficient  # noqa: F401
from .criteria import SizeCriterion, SpecimenDimensions  # noqa: F401
