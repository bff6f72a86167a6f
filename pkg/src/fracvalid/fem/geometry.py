"""Parametric specimen geometries, resolved from one controlling dimension.

Two micro-scale families are modelled in 2D plane strain:

* DCB: a splitting specimen of length W along the crack direction and
  height L, cracked along its mid-plane from the mouth to depth a.  The
  opening load acts on the crack faces at offset e from the mouth.  Only
  the upper half is analysed (symmetry ahead of the crack), so the model
  domain is W x L/2.  Fixed ratios: L/W = 0.25, a/W = 0.125, e/L = 0.2;
  validity is crack-length controlled (a < W - a).

* NotchedCantilever: a beam of length H and depth W, cracked from the top
  surface at station L1 to depth a (milled notch to a_n, sharper crack to
  a), loaded downward at station L2.  A square support block of side W is
  attached at the root; its left and bottom edges are clamped.  Fixed
  ratios: a_n/W = 0.5, a/W = 0.6, W/H = 0.3, L1/H = 0.3, L2/H = 0.7;
  validity is ligament controlled (W - a < a).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InputError

KIND_DCB = "DCB"
KIND_CANTILEVER = "NotchedCantilever"
KINDS = (KIND_DCB, KIND_CANTILEVER)

DCB_L_OVER_W = 0.25
DCB_A_OVER_W = 0.125
DCB_E_OVER_L = 0.2

CANT_AN_OVER_W = 0.5
CANT_A_OVER_W = 0.6
CANT_W_OVER_H = 0.3
CANT_L1_OVER_H = 0.3
CANT_L2_OVER_H = 0.7


@dataclass(frozen=True)
class GeometrySpec:
    """All absolute dimensions [mm] of one specimen, resolved from ``a``."""

    kind: str
    a: float
    W: float
    # DCB: L = full height, e = load offset from the mouth; unused for the beam
    L: float = 0.0
    e: float = 0.0
    # cantilever: beam length H, notch depth a_n, crack/load stations L1, L2
    H: float = 0.0
    a_n: float = 0.0
    L1: float = 0.0
    L2: float = 0.0

    @property
    def ligament(self) -> float:
        return self.W - self.a

    @property
    def controlling(self) -> float:
        """The dimension that governs validity: min(a, W - a)."""
        return min(self.a, self.ligament)


def build_geometry(kind: str, a: float) -> GeometrySpec:
    """Resolve a specimen from its crack length via the fixed shape ratios."""
    if not a > 0.0:
        raise InputError(f"crack length must be positive, got {a}")
    if kind == KIND_DCB:
        W = a / DCB_A_OVER_W
        L = DCB_L_OVER_W * W
        return GeometrySpec(kind=kind, a=a, W=W, L=L, e=DCB_E_OVER_L * L)
    if kind == KIND_CANTILEVER:
        W = a / CANT_A_OVER_W
        H = W / CANT_W_OVER_H
        spec = GeometrySpec(
            kind=kind,
            a=a,
            W=W,
            H=H,
            a_n=CANT_AN_OVER_W * W,
            L1=CANT_L1_OVER_H * H,
            L2=CANT_L2_OVER_H * H,
        )
        assert spec.a_n < spec.a < spec.W
        return spec
    raise InputError(f"unknown geometry kind {kind!r}; use one of {KINDS}")


def crack_length_for_controlling(kind: str, size: float) -> float:
    """Crack length that yields the requested controlling dimension.

    DCB validity is controlled by a itself; the cantilever by the ligament
    W - a = a (1/0.6 - 1), so a = 1.5 * size there.
    """
    if not size > 0.0:
        raise InputError(f"controlling size must be positive, got {size}")
    if kind == KIND_DCB:
        return size
    if kind == KIND_CANTILEVER:
        return size * CANT_A_OVER_W / (1.0 - CANT_A_OVER_W)
    raise InputError(f"unknown geometry kind {kind!r}; use one of {KINDS}")
