"""Validity maps: J_max over (yield strength, controlling size), IO, inversion.

A map is a grid of the maximum valid J for one specimen family; cells may
come from the semi-analytical relation or from the FE campaign.  Inversion
answers the practical question: given a material (J_Ic, sigma_Y), what is
the smallest specimen that still yields a valid test?
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError, MapDomainError
from .criteria import SizeCriterion


@dataclass
class ValidityMap:
    """J_max [kJ/m^2] over a (size, sigma_Y) grid.

    ``jmax[i, j]`` corresponds to ``size_grid[i]`` and ``sigma_grid[j]``.
    ``converged`` flags cells backed by a successful computation; failed FE
    cells are flagged False and never interpolated over.
    """

    sigma_grid: np.ndarray  # MPa, ascending
    size_grid: np.ndarray  # mm, ascending
    jmax: np.ndarray  # (n_size, n_sigma)
    provenance: str  # 'semi-analytical' | 'numerical'
    kind: str | None = None  # 'DCB' | 'NotchedCantilever' for numerical maps
    N: float | None = None
    converged: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.sigma_grid = np.asarray(self.sigma_grid, dtype=float)
        self.size_grid = np.asarray(self.size_grid, dtype=float)
        self.jmax = np.asarray(self.jmax, dtype=float)
        if self.jmax.shape != (self.size_grid.size, self.sigma_grid.size):
            raise InputError("jmax shape must be (n_size, n_sigma)")
        if self.converged is None:
            self.converged = np.isfinite(self.jmax) & (self.jmax > 0.0)
        else:
            self.converged = np.asarray(self.converged, dtype=bool)

    def monotonicity_violations(self) -> list[str]:
        """Cells where J_max decreases along either axis (converged cells only)."""
        out = []
        j, c = self.jmax, self.converged
        for i in range(self.size_grid.size):
            for k in range(self.sigma_grid.size - 1):
                if c[i, k] and c[i, k + 1] and j[i, k] > j[i, k + 1] * (1 + 1e-9):
                    out.append(f"sigma axis at size={self.size_grid[i]:g}, "
                               f"sigma={self.sigma_grid[k]:g}->{self.sigma_grid[k+1]:g}")
        for k in range(self.sigma_grid.size):
            for i in range(self.size_grid.size - 1):
                if c[i, k] and c[i + 1, k] and j[i, k] > j[i + 1, k] * (1 + 1e-9):
                    out.append(f"size axis at sigma={self.sigma_grid[k]:g}, "
                               f"size={self.size_grid[i]:g}->{self.size_grid[i+1]:g}")
        return out

    # ------------------------------------------------------------------ IO
    def to_csv(self, path: str | Path) -> None:
        """Write the grid as long-form CSV plus a JSON metadata sidecar."""
        path = Path(path)
        lines = ["sigma_Y,size,J_max,converged"]
        for i, s in enumerate(self.size_grid):
            for k, sig in enumerate(self.sigma_grid):
                lines.append(
                    f"{float(sig)!r},{float(s)!r},{float(self.jmax[i, k])!r},"
                    f"{int(self.converged[i, k])}"
                )
        path.write_text("\n".join(lines) + "\n")
        meta = {
            "provenance": self.provenance,
            "kind": self.kind,
            "N": self.N,
            "n_sigma": int(self.sigma_grid.size),
            "n_size": int(self.size_grid.size),
            **self.metadata,
        }
        self.meta_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    @staticmethod
    def meta_path(csv_path: str | Path) -> Path:
        csv_path = Path(csv_path)
        return csv_path.with_name(csv_path.stem + ".meta.json")

    @classmethod
    def from_csv(cls, path: str | Path) -> "ValidityMap":
        path = Path(path)
        if not path.exists():
            raise InputError(f"map file not found: {path}")
        rows = path.read_text().strip().splitlines()
        if not rows or rows[0].split(",")[:3] != ["sigma_Y", "size", "J_max"]:
            raise InputError(f"{path}: expected 'sigma_Y,size,J_max[,converged]' header")
        data = []
        for line in rows[1:]:
            parts = line.split(",")
            conv = int(parts[3]) if len(parts) > 3 else 1
            data.append((float(parts[0]), float(parts[1]), float(parts[2]), conv))
        arr = np.asarray(data, dtype=float)
        sigma = np.unique(arr[:, 0])
        size = np.unique(arr[:, 1])
        jmax = np.full((size.size, sigma.size), np.nan)
        conv = np.zeros((size.size, sigma.size), dtype=bool)
        si = np.searchsorted(size, arr[:, 1])
        ki = np.searchsorted(sigma, arr[:, 0])
        jmax[si, ki] = arr[:, 2]
        conv[si, ki] = arr[:, 3] > 0
        meta_file = cls.meta_path(path)
        meta = json.loads(meta_file.read_text()) if meta_file.exists() else {}
        return cls(
            sigma_grid=sigma,
            size_grid=size,
            jmax=jmax,
            provenance=meta.get("provenance", "unknown"),
            kind=meta.get("kind"),
            N=meta.get("N"),
            converged=conv,
            metadata={k: v for k, v in meta.items()
                      if k not in ("provenance", "kind", "N", "n_sigma", "n_size")},
        )


def _interp_log_j_at_sigma(vmap: ValidityMap, sigma_Y: float) -> np.ndarray:
    """log10(J_max) per size row at the requested yield strength.

    Interpolation is linear in (log sigma, log J); on a semi-analytical map
    (J = size*sigma/M) this is exact everywhere, not only at grid points.
    """
    sg = vmap.sigma_grid
    if sigma_Y < sg[0] * (1 - 1e-12) or sigma_Y > sg[-1] * (1 + 1e-12):
        raise MapDomainError(
            f"sigma_Y={sigma_Y:g} outside the map hull [{sg[0]:g}, {sg[-1]:g}] MPa"
        )
    if sg.size == 1:
        cols = (0, 0)
        t = 0.0
    else:
        k = min(int(np.searchsorted(sg, sigma_Y, side="right") - 1), sg.size - 2)
        k = max(k, 0)
        cols = (k, k + 1)
        t = (np.log(sigma_Y) - np.log(sg[k])) / (np.log(sg[k + 1]) - np.log(sg[k]))
    needed = vmap.converged[:, cols[0]] & vmap.converged[:, cols[1]]
    if not needed.all():
        bad = vmap.size_grid[~needed]
        raise MapDomainError(
            f"unconverged cells at sigma_Y={sigma_Y:g} for sizes {bad}; "
            "refusing to interpolate over them"
        )
    lj = np.log10(vmap.jmax)
    return (1.0 - t) * lj[:, cols[0]] + t * lj[:, cols[1]]


def min_size_for_toughness(vmap: ValidityMap, J_Ic: float, sigma_Y: float) -> float:
    """Smallest controlling size [mm] whose J_max reaches ``J_Ic`` at ``sigma_Y``.

    Inverts the map by interpolating the J_max = J_Ic contour, linear in
    (log size, log J).  Points outside the map hull raise
    :class:`MapDomainError` (no extrapolation).
    """
    if not J_Ic > 0.0:
        raise InputError("J_Ic must be positive")
    col = _interp_log_j_at_sigma(vmap, sigma_Y)
    target = np.log10(J_Ic)
    ls = np.log10(vmap.size_grid)
    if target < col[0] - 1e-12:
        raise MapDomainError(
            f"J_Ic={J_Ic:g} below the map floor ({10.0**col[0]:g}) at sigma_Y={sigma_Y:g}; "
            "minimum size lies outside the hull"
        )
    if target > col[-1] + 1e-12:
        raise MapDomainError(
            f"J_Ic={J_Ic:g} above the map ceiling ({10.0**col[-1]:g}) at sigma_Y={sigma_Y:g}"
        )
    # first crossing of the ascending column
    idx = int(np.searchsorted(col, target, side="left"))
    if idx == 0:
        return float(vmap.size_grid[0])
    lo, hi = idx - 1, idx
    if col[hi] == col[lo]:
        return float(10.0 ** ls[hi])
    t = (target - col[lo]) / (col[hi] - col[lo])
    return float(10.0 ** (ls[lo] + t * (ls[hi] - ls[lo])))


def lookup_jmax(vmap: ValidityMap, sigma_Y: float, size: float) -> float:
    """Forward interpolation of J_max at an arbitrary (sigma_Y, size) point."""
    col = _interp_log_j_at_sigma(vmap, sigma_Y)
    ls = np.log10(vmap.size_grid)
    x = np.log10(size)
    if x < ls[0] - 1e-12 or x > ls[-1] + 1e-12:
        raise MapDomainError(
            f"size={size:g} outside the map hull [{vmap.size_grid[0]:g}, "
            f"{vmap.size_grid[-1]:g}] mm"
        )
    return float(10.0 ** np.interp(x, ls, col))


def compare_semi_numerical(
    vmap: ValidityMap, criterion: SizeCriterion, J_Ic_list, sigma_Y_list=None
) -> list[dict]:
    """Tabulate numerical vs M-based minimum sizes and conservativeness.

    A criterion is conservative when the semi-analytical size requirement is
    at least as large as the numerical one.  Rows that fall outside the map
    hull carry ``numerical_min_size = None`` and a reason.
    """
    sigmas = vmap.sigma_grid if sigma_Y_list is None else np.asarray(sigma_Y_list, float)
    rows: list[dict] = []
    for jic in J_Ic_list:
        for sig in sigmas:
            semi = criterion.M * jic / sig
            row = {
                "J_Ic": float(jic),
                "sigma_Y": float(sig),
                "M": criterion.M,
                "semi_min_size": float(semi),
            }
            try:
                num = min_size_for_toughness(vmap, jic, sig)
            except MapDomainError as exc:
                row.update(
                    numerical_min_size=None, conservative=None, ratio=None,
                    note=str(exc),
                )
            else:
                row.update(
                    numerical_min_size=float(num),
                    conservative=bool(semi >= num),
                    ratio=float(num / semi),
                    note="",
                )
            rows.append(row)
    return rows
