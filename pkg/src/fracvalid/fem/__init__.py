"""Plane-strain, finite-strain elastic-plastic finite element kernel.

Submodules: ``geometry`` (specimen families), ``mesh`` (block-structured
Q8 meshes with a focused notch-root patch), ``constitutive`` (logarithmic
strain multiplicative J2 plasticity), ``solver`` (load-controlled Newton
ramp), ``jintegral`` (domain-form J over nested contours) and ``postproc``
(crack-plane stress profiles).
"""

from .geometry import GeometrySpec, build_geometry  # noqa: F401
