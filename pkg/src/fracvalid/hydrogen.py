"""Hydrogen-embrittlement dataset and minimum-size overlays on validity maps.

Hydrogen ingress cuts fracture toughness sharply while leaving the yield
strength nearly unchanged, which shrinks the specimen size needed for a
valid test.  The bundled dataset tabulates (sigma_Y, J_Ic) pairs in air and
in hydrogen gas for twelve alloys; a "/" entry means the hydrogen-charged
yield strength was not reported and the air value is assumed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import InputError, MapDomainError
from .maps import ValidityMap, min_size_for_toughness

#: Fractional yield-strength change beyond which a record is rejected
#: (hydrogen is taken not to alter strength appreciably).
MAX_SIGMA_SHIFT = 0.10


@dataclass(frozen=True)
class HydrogenRecord:
    material: str
    sigma_Y_air: float  # MPa
    J_Ic_air: float  # kJ/m^2
    p_H2: float  # hydrogen gas pressure, MPa
    sigma_Y_H: float  # MPa (defaulted to air value when unreported)
    J_Ic_H: float  # kJ/m^2
    source: str = ""
    sigma_Y_H_assumed: bool = False  # True when the table had "/"

    def __post_init__(self):
        if not self.J_Ic_H < self.J_Ic_air:
            raise InputError(
                f"{self.material}: hydrogen toughness {self.J_Ic_H} must be "
                f"below the air value {self.J_Ic_air}"
            )
        shift = abs(self.sigma_Y_H - self.sigma_Y_air) / self.sigma_Y_air
        if shift > MAX_SIGMA_SHIFT:
            raise InputError(
                f"{self.material}: yield strength shift {shift:.0%} exceeds "
                f"{MAX_SIGMA_SHIFT:.0%}"
            )


def bundled_table_path() -> Path:
    return Path(resources.files("fracvalid").joinpath("data/hydrogen_toughness.csv"))


def load_table(source: str | Path | None = None) -> list[HydrogenRecord]:
    """Parse the hydrogen dataset CSV, validating every record.

    Rows violating the invariants (toughness must drop, strength must stay
    within 10%) are rejected with a diagnostic naming the row.
    """
    path = Path(source) if source is not None else bundled_table_path()
    if not path.exists():
        raise InputError(f"hydrogen table not found: {path}")
    records: list[HydrogenRecord] = []
    problems: list[str] = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        required = {
            "material", "sigma_Y_air_MPa", "J_Ic_air_kJ_m2",
            "p_H2_MPa", "sigma_Y_H_MPa", "J_Ic_H_kJ_m2",
        }
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise InputError(
                f"{path}: header must contain {sorted(required)}"
            )
        for row in reader:
            name = (row["material"] or "").strip()
            try:
                sigma_air = float(row["sigma_Y_air_MPa"])
                raw_sigma_h = (row["sigma_Y_H_MPa"] or "").strip()
                assumed = raw_sigma_h in ("/", "")
                sigma_h = sigma_air if assumed else float(raw_sigma_h)
                records.append(
                    HydrogenRecord(
                        material=name,
                        sigma_Y_air=sigma_air,
                        J_Ic_air=float(row["J_Ic_air_kJ_m2"]),
                        p_H2=float(row["p_H2_MPa"]),
                        sigma_Y_H=sigma_h,
                        J_Ic_H=float(row["J_Ic_H_kJ_m2"]),
                        source=(row.get("source") or "").strip(),
                        sigma_Y_H_assumed=assumed,
                    )
                )
            except (InputError, ValueError) as exc:
                problems.append(f"{name or '<unnamed>'}: {exc}")
    if problems:
        raise InputError("rejected hydrogen records:\n  " + "\n  ".join(problems))
    return records


@dataclass(frozen=True)
class OverlayEntry:
    material: str
    condition: str  # 'air' | 'H2'
    p_H2: float  # 0 for air
    sigma_Y: float
    J_Ic: float
    min_size: float | None  # mm, None when outside the map hull
    note: str = ""


def overlay_min_sizes(
    vmap: ValidityMap, records: list[HydrogenRecord]
) -> list[OverlayEntry]:
    """Minimum size in air and in hydrogen for each record, via map inversion.

    Out-of-hull points are flagged and skipped rather than extrapolated.
    """
    entries: list[OverlayEntry] = []
    for rec in records:
        for condition, sigma, jic, p in (
            ("air", rec.sigma_Y_air, rec.J_Ic_air, 0.0),
            ("H2", rec.sigma_Y_H, rec.J_Ic_H, rec.p_H2),
        ):
            try:
                size = min_size_for_toughness(vmap, jic, sigma)
                note = ""
            except MapDomainError as exc:
                size = None
                note = str(exc)
            entries.append(
                OverlayEntry(
                    material=rec.material,
                    condition=condition,
                    p_H2=p,
                    sigma_Y=sigma,
                    J_Ic=jic,
                    min_size=size,
                    note=note,
                )
            )
    return entries


def reduction_factors(entries: list[OverlayEntry]) -> dict[str, float]:
    """min_size(air) / min_size(H2) per material, where both exist."""
    by_mat: dict[str, dict[str, float]] = {}
    for e in entries:
        if e.min_size is not None:
            by_mat.setdefault(e.material, {})[e.condition] = e.min_size
    return {
        mat: sizes["air"] / sizes["H2"]
        for mat, sizes in by_mat.items()
        if "air" in sizes and "H2" in sizes
    }


def overlay_to_csv(entries: list[OverlayEntry], path: str | Path) -> None:
    lines = ["material,condition,p_H2,sigma_Y,J_Ic,min_size_mm,note"]
    for e in entries:
        size = "" if e.min_size is None else repr(e.min_size)
        note = e.note.replace(",", ";").replace("\n", " ")
        lines.append(
            f"{e.material},{e.condition},{e.p_H2!r},{e.sigma_Y!r},{e.J_Ic!r},{size},{note}"
        )
    Path(path).write_text("\n".join(lines) + "\n")
