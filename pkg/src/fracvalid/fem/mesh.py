"""Block-structured 8-node quadrilateral meshes for the two specimen families.

The crack is modelled as a slot of half-width rho0 ending in a (semi)circular
root, the standard device for finite-strain blunting analyses.  Around the
root sits a focused patch: polar rings graded geometrically in radius (which
samples the crack plane log-uniformly, exactly what the slope detector
needs), blended outward to a square via the usual O-grid construction.
Tensor-product graded blocks fill the rest of the specimen.  Blocks are
Coons patches evaluated on a half-index lattice, so midside nodes of curved
edges land exactly on the arcs; coincident block boundaries are merged by
coordinate.

All dimensions derive from the crack length, so meshes for different sizes
of the same family are exact geometric rescalings of each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import InputError
from .geometry import KIND_CANTILEVER, KIND_DCB, GeometrySpec

# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class Refinement:
    """Mesh density controls.  ``scale`` refines everything uniformly."""

    rings_per_decade: float = 14.0  # polar rings per decade of radius
    n_theta_quarter: int = 10  # angular elements per 90 deg (even)
    n_blend: int = 4  # rings in the circle-to-square blend
    rho0_frac: float = 1e-3  # notch root radius / crack length
    r_f_frac: float = 0.22  # polar zone radius / controlling length
    r_s_frac: float = 0.45  # O-grid square half-size / controlling length
    far_ratio: float = 1.35  # geometric growth of far-field cells
    tip_frac: float = 1.0 / 200.0  # required near-tip element size / a
    scale: float = 1.0

    @property
    def eff_n_theta(self) -> int:
        return 2 * max(2, round(self.n_theta_quarter * self.scale / 2))

    @property
    def eff_rings_per_decade(self) -> float:
        return self.rings_per_decade * self.scale

    @property
    def eff_n_blend(self) -> int:
        return max(2, round(self.n_blend * self.scale))

    def refined(self, factor: float) -> "Refinement":
        return replace(self, scale=self.scale * factor)


@dataclass
class Mesh:
    """Q8 mesh plus the crack-tip bookkeeping the solver and J-domains need."""

    nodes: np.ndarray  # (n_nodes, 2) reference coordinates [mm]
    elems: np.ndarray  # (n_elems, 8) connectivity, corners CCW then midsides
    geom: GeometrySpec
    tip: np.ndarray  # reference crack-tip position
    crack_dir: np.ndarray  # unit vector of crack advance
    crack_normal: np.ndarray  # unit normal to the crack plane
    rho0: float
    char_length: float  # controlling dimension used for contour scaling
    symmetry_factor: float  # 2 for the half DCB model, 1 otherwise
    contour_stations: np.ndarray  # radii (from tip) bounding the J domains
    node_sets: dict[str, np.ndarray] = field(default_factory=dict)
    edge_sets: dict[str, np.ndarray] = field(default_factory=dict)  # (n, 2) elem, edge

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elems(self) -> int:
        return self.elems.shape[0]


# ---------------------------------------------------------------------------
# parameter grading helpers


def uniform_params(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n + 1)


def graded_params(span: float, h0: float, ratio: float, reverse: bool = False):
    """Cumulative fractions of a geometric size sequence filling ``span``.

    First interval ~ ``h0`` growing by ``ratio``; sizes are rescaled so the
    last station lands exactly on the far end.  ``reverse`` puts the fine
    end at 1 instead of 0.
    """
    if h0 >= span:
        params = np.array([0.0, 1.0])
    else:
        n = max(1, math.ceil(math.log(1.0 + span * (ratio - 1.0) / h0) / math.log(ratio)))
        sizes = h0 * ratio ** np.arange(n)
        sizes *= span / sizes.sum()
        params = np.concatenate([[0.0], np.cumsum(sizes)]) / span
        params[-1] = 1.0
    return 1.0 - params[::-1] if reverse else params


def fractions_of(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    return (np.asarray(values, dtype=float) - lo) / (hi - lo)


# ---------------------------------------------------------------------------
# Coons-patch blocks


def line_edge(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)

    def edge(t):
        t = np.asarray(t, dtype=float)[..., None]
        return (1.0 - t) * p + t * q

    return edge


def arc_edge(center, radius, theta0, theta1):
    c = np.asarray(center, dtype=float)

    def edge(t):
        t = np.asarray(t, dtype=float)
        th = theta0 + t * (theta1 - theta0)
        return c + radius * np.stack([np.cos(th), np.sin(th)], axis=-1)

    return edge


def polyline_edge(points):
    """Arclength-parameterised polyline through ``points``."""
    pts = np.asarray(points, dtype=float)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]

    def edge(t):
        t = np.asarray(t, dtype=float)
        s = np.clip(t, 0.0, 1.0) * total
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
        local = (s - cum[idx]) / seg[idx]
        return pts[idx] + local[..., None] * (pts[idx + 1] - pts[idx])

    return edge


@dataclass
class Block:
    """Transfinite (Coons) patch with node stations ``xi`` x ``eta``."""

    bottom: object  # eta = 0 edge, callable over xi in [0, 1]
    top: object  # eta = 1
    left: object  # xi = 0, callable over eta
    right: object  # xi = 1
    xi: np.ndarray
    eta: np.ndarray

    def points(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        X, Y = np.meshgrid(xi, eta, indexing="ij")
        b = self.bottom(X.ravel()).reshape(*X.shape, 2)
        t = self.top(X.ravel()).reshape(*X.shape, 2)
        l = self.left(Y.ravel()).reshape(*X.shape, 2)
        r = self.right(Y.ravel()).reshape(*X.shape, 2)
        p00 = self.bottom(0.0)
        p10 = self.bottom(1.0)
        p01 = self.top(0.0)
        p11 = self.top(1.0)
        E = Y[..., None]
        XI = X[..., None]
        pts = (
            (1 - E) * b
            + E * t
            + (1 - XI) * l
            + XI * r
            - ((1 - XI) * (1 - E) * p00 + XI * (1 - E) * p10
               + (1 - XI) * E * p01 + XI * E * p11)
        )
        return pts

    def lattice(self) -> np.ndarray:
        """Node lattice at half-index stations, shape (2nx+1, 2ny+1, 2)."""
        xi_full = _half_index(self.xi)
        eta_full = _half_index(self.eta)
        return self.points(xi_full, eta_full)


def _half_index(params: np.ndarray) -> np.ndarray:
    mids = 0.5 * (params[:-1] + params[1:])
    out = np.empty(2 * params.size - 1)
    out[0::2] = params
    out[1::2] = mids
    return out


def rect_block(x0, x1, y0, y1, xi, eta) -> Block:
    return Block(
        bottom=line_edge((x0, y0), (x1, y0)),
        top=line_edge((x0, y1), (x1, y1)),
        left=line_edge((x0, y0), (x0, y1)),
        right=line_edge((x1, y0), (x1, y1)),
        xi=np.asarray(xi, dtype=float),
        eta=np.asarray(eta, dtype=float),
    )


def sector_block(center, r_params_abs, theta0, theta1, n_theta) -> Block:
    """Polar annulus sector; xi runs along theta, eta along radius."""
    r0, r1 = r_params_abs[0], r_params_abs[-1]
    return Block(
        bottom=arc_edge(center, r0, theta0, theta1),
        top=arc_edge(center, r1, theta0, theta1),
        left=line_edge(
            np.asarray(center) + r0 * np.array([math.cos(theta0), math.sin(theta0)]),
            np.asarray(center) + r1 * np.array([math.cos(theta0), math.sin(theta0)]),
        ),
        right=line_edge(
            np.asarray(center) + r0 * np.array([math.cos(theta1), math.sin(theta1)]),
            np.asarray(center) + r1 * np.array([math.cos(theta1), math.sin(theta1)]),
        ),
        xi=uniform_params(n_theta),
        eta=fractions_of(r_params_abs, r0, r1),
    )


def blend_block(center, R_f, theta0, theta1, path_pts, n_theta, n_blend) -> Block:
    """Circle-to-square O-grid quarter: inner arc to the two square sides."""
    c = np.asarray(center, dtype=float)
    e0 = np.array([math.cos(theta0), math.sin(theta0)])
    e1 = np.array([math.cos(theta1), math.sin(theta1)])
    path = polyline_edge(path_pts)
    return Block(
        bottom=arc_edge(center, R_f, theta0, theta1),
        top=path,
        left=line_edge(c + R_f * e0, path(0.0)),
        right=line_edge(c + R_f * e1, path(1.0)),
        xi=uniform_params(n_theta),
        eta=uniform_params(n_blend),
    )


# ---------------------------------------------------------------------------
# assembly


class _NodeMerger:
    def __init__(self, tol: float):
        self.tol = tol
        self.key_map: dict[tuple[int, int], int] = {}
        self.coords: list[tuple[float, float]] = []

    def add(self, x: float, y: float) -> int:
        kx = round(x / self.tol)
        ky = round(y / self.tol)
        for dx in (0, -1, 1):
            for dy in (0, -1, 1):
                hit = self.key_map.get((kx + dx, ky + dy))
                if hit is not None:
                    cx, cy = self.coords[hit]
                    if abs(cx - x) <= self.tol and abs(cy - y) <= self.tol:
                        return hit
        idx = len(self.coords)
        self.coords.append((x, y))
        self.key_map[(kx, ky)] = idx
        return idx


_FLIP = [0, 3, 2, 1, 7, 6, 5, 4]


def assemble_blocks(blocks: list[Block], tol: float):
    """Merge block lattices into global (nodes, elems) with CCW elements."""
    merger = _NodeMerger(tol)
    elems = []
    for block in blocks:
        lat = block.lattice()
        nx = block.xi.size - 1
        ny = block.eta.size - 1
        ids = np.full(lat.shape[:2], -1, dtype=int)
        for i in range(lat.shape[0]):
            for j in range(lat.shape[1]):
                if i % 2 == 1 and j % 2 == 1:
                    continue  # element centres are not Q8 nodes
                ids[i, j] = merger.add(float(lat[i, j, 0]), float(lat[i, j, 1]))
        for i in range(nx):
            for j in range(ny):
                I, J = 2 * i, 2 * j
                conn = [
                    ids[I, J], ids[I + 2, J], ids[I + 2, J + 2], ids[I, J + 2],
                    ids[I + 1, J], ids[I + 2, J + 1], ids[I + 1, J + 2], ids[I, J + 1],
                ]
                elems.append(conn)
    nodes = np.asarray(merger.coords, dtype=float)
    elems = np.asarray(elems, dtype=int)
    # enforce CCW corner ordering (positive area)
    c = nodes[elems[:, :4]]
    area2 = np.zeros(elems.shape[0])
    for k in range(4):
        x0, y0 = c[:, k, 0], c[:, k, 1]
        x1, y1 = c[:, (k + 1) % 4, 0], c[:, (k + 1) % 4, 1]
        area2 += x0 * y1 - x1 * y0
    flip = area2 < 0.0
    elems[flip] = elems[flip][:, _FLIP]
    return nodes, elems


_EDGE_NODES = [(0, 1, 4), (1, 2, 5), (2, 3, 6), (3, 0, 7)]


def boundary_edges(elems: np.ndarray) -> list[tuple[int, int]]:
    """(element, local_edge) pairs whose corner pair is used exactly once."""
    count: dict[tuple[int, int], int] = {}
    where: dict[tuple[int, int], tuple[int, int]] = {}
    for e in range(elems.shape[0]):
        for le, (a, b, _) in enumerate(_EDGE_NODES):
            key = tuple(sorted((int(elems[e, a]), int(elems[e, b]))))
            count[key] = count.get(key, 0) + 1
            where[key] = (e, le)
    return [where[k] for k, v in count.items() if v == 1]


def edge_nodes(elems: np.ndarray, elem: int, local_edge: int) -> tuple[int, int, int]:
    a, b, m = _EDGE_NODES[local_edge]
    return int(elems[elem, a]), int(elems[elem, b]), int(elems[elem, m])


def _select_edges(nodes, elems, edges, predicate):
    out = []
    for e, le in edges:
        n1, n2, nm = edge_nodes(elems, e, le)
        if predicate(nodes[n1], nodes[n2], nodes[nm]):
            out.append((e, le))
    return np.asarray(sorted(out), dtype=int).reshape(-1, 2)


def _contour_stations(char_length: float, n_domains: int = 6) -> np.ndarray:
    # innermost radius clear of the notch root, outermost inside the O-grid
    return np.geomspace(0.045, 0.42, n_domains + 1) * char_length


# ---------------------------------------------------------------------------
# specimen meshes


def _radial_stations(rho0: float, R_f: float, rings_per_decade: float) -> np.ndarray:
    decades = math.log10(R_f / rho0)
    n = max(6, math.ceil(decades * rings_per_decade))
    return np.geomspace(rho0, R_f, n + 1)


def build_mesh(geom: GeometrySpec, refinement: Refinement | None = None) -> Mesh:
    ref = refinement or Refinement()
    if ref.eff_n_theta % 2 or ref.eff_n_theta < 4:
        raise InputError("effective n_theta must be even and >= 4")
    if geom.kind == KIND_DCB:
        return _build_dcb(geom, ref)
    if geom.kind == KIND_CANTILEVER:
        return _build_cantilever(geom, ref)
    raise InputError(f"unknown geometry kind {geom.kind!r}")


def _check_tip_size(radii: np.ndarray, a: float, ref: Refinement):
    h_tip = radii[1] - radii[0]
    if h_tip > ref.tip_frac * a:
        raise InputError(
            f"near-tip element size {h_tip:.3g} exceeds tip_frac*a = "
            f"{ref.tip_frac * a:.3g}; increase rings_per_decade"
        )


def _validate_jacobians(nodes, elems):
    from .solver import q8_reference_operators  # deferred: solver owns Q8 shapes

    dNdX, detJ, _ = q8_reference_operators(nodes, elems)
    if np.any(detJ <= 0.0):
        bad = int(np.sum(np.any(detJ.reshape(elems.shape[0], -1) <= 0, axis=1)))
        raise InputError(f"mesh has {bad} element(s) with non-positive Jacobian")


def _build_dcb(geom: GeometrySpec, ref: Refinement) -> Mesh:
    a, W = geom.a, geom.W
    Lh = geom.L / 2.0  # half model above the crack plane
    rho0 = ref.rho0_frac * a
    s = geom.controlling  # = a for this family
    R_f = ref.r_f_frac * s
    R_s = ref.r_s_frac * s
    xc = a - rho0  # root centre
    if not (R_s < Lh and xc + R_s < W and R_f < R_s and rho0 < R_f):
        raise InputError("DCB tip patch does not fit the specimen; adjust fractions")

    n_th = ref.eff_n_theta
    radii = _radial_stations(rho0, R_f, ref.eff_rings_per_decade)
    _check_tip_size(radii, a, ref)
    blend = np.linspace(R_f, R_s, ref.eff_n_blend + 1)
    ray = np.concatenate([radii, blend[1:]])  # all stations along the rays

    C = (xc, 0.0)
    path = [(xc + R_s, 0.0), (xc + R_s, R_s), (xc, R_s)]

    x_B = graded_params(xc, 0.055 * a / ref.scale, ref.far_ratio, reverse=True)
    x_D = graded_params(W - (xc + R_s), 2.0 * R_s / n_th, ref.far_ratio)
    y_E = graded_params(Lh - R_s, 2.0 * R_s / n_th, ref.far_ratio)
    y_B = fractions_of(ray, rho0, R_s)

    blocks = [
        sector_block(C, radii, 0.0, math.pi / 2.0, n_th),
        blend_block(C, R_f, 0.0, math.pi / 2.0, path, n_th, ref.eff_n_blend),
        rect_block(0.0, xc, rho0, R_s, x_B, y_B),
        rect_block(xc + R_s, W, 0.0, R_s, x_D, uniform_params(n_th // 2)),
        rect_block(xc, xc + R_s, R_s, Lh, uniform_params(n_th // 2), y_E),
        rect_block(0.0, xc, R_s, Lh, x_B, y_E),
        rect_block(xc + R_s, W, R_s, Lh, x_D, y_E),
    ]
    tol = rho0 * 1e-3
    nodes, elems = assemble_blocks(blocks, tol)
    _validate_jacobians(nodes, elems)

    geom_tol = rho0 * 0.1
    symmetry = np.flatnonzero(np.abs(nodes[:, 1]) < geom_tol)
    base = np.flatnonzero(np.abs(nodes[:, 0] - W) < geom_tol)
    bedges = boundary_edges(elems)
    crack_face = _select_edges(
        nodes, elems, bedges,
        lambda p1, p2, pm: abs(pm[1] - rho0) < geom_tol and pm[0] < xc - geom_tol,
    )

    return Mesh(
        nodes=nodes,
        elems=elems,
        geom=geom,
        tip=np.array([a, 0.0]),
        crack_dir=np.array([1.0, 0.0]),
        crack_normal=np.array([0.0, 1.0]),
        rho0=rho0,
        char_length=s,
        symmetry_factor=2.0,
        contour_stations=_contour_stations(s),
        node_sets={"symmetry": symmetry, "base": base},
        edge_sets={"crack_face": crack_face},
    )


def _build_cantilever(geom: GeometrySpec, ref: Refinement) -> Mesh:
    a, W, H, L1 = geom.a, geom.W, geom.H, geom.L1
    lig = geom.ligament
    rho0 = ref.rho0_frac * a
    s = geom.controlling  # = ligament for this family
    R_f = ref.r_f_frac * s
    R_s = ref.r_s_frac * s
    yC = lig + rho0  # root centre height
    Wb = Hb = W  # support block dimensions
    if not (R_s < yC and R_s < L1 and L1 + R_s < H and R_f < R_s and rho0 < R_f):
        raise InputError("cantilever tip patch does not fit; adjust fractions")

    n_th = ref.eff_n_theta
    radii = _radial_stations(rho0, R_f, ref.eff_rings_per_decade)
    _check_tip_size(radii, a, ref)
    blend = np.linspace(R_f, R_s, ref.eff_n_blend + 1)
    ray = np.concatenate([radii, blend[1:]])

    C = (L1, yC)
    path1 = [(L1, yC - R_s), (L1 + R_s, yC - R_s), (L1 + R_s, yC)]  # theta -pi/2..0
    path2 = [(L1 - R_s, yC), (L1 - R_s, yC - R_s), (L1, yC - R_s)]  # theta -pi..-pi/2

    h_near = 2.0 * R_s / n_th
    x_strip_l = fractions_of(R_s - ray[::-1], 0.0, R_s - rho0)  # for LS
    x_strip_r = fractions_of(ray, rho0, R_s)  # for RS
    y_strip = graded_params(W - yC, max(3.0 * rho0, (W - yC) / 400.0) / ref.scale, 1.6)
    y_UB = graded_params(yC - R_s, h_near, ref.far_ratio, reverse=True)
    x_BL = graded_params(L1 - R_s, h_near, ref.far_ratio, reverse=True)
    x_BR = graded_params(H - (L1 + R_s), h_near, ref.far_ratio)
    x_SB = graded_params(Wb, 0.2 * W / ref.scale, 1.5, reverse=True)
    y_SB2 = graded_params(Hb, 0.2 * W / ref.scale, 1.5, reverse=True)
    y_sq = uniform_params(n_th // 2)

    def stack(x0, x1, x_params):
        return [
            rect_block(x0, x1, 0.0, yC - R_s, x_params, y_UB),
            rect_block(x0, x1, yC - R_s, yC, x_params, y_sq),
            rect_block(x0, x1, yC, W, x_params, y_strip),
        ]

    # support-block right edge must carry the full beam-left node column
    y_SB1 = np.concatenate([
        y_UB * (yC - R_s) / W,
        (yC - R_s + y_sq[1:] * R_s) / W,
        (yC + y_strip[1:] * (W - yC)) / W,
    ])

    blocks = [
        sector_block(C, radii, -math.pi / 2.0, 0.0, n_th),
        sector_block(C, radii, -math.pi, -math.pi / 2.0, n_th),
        blend_block(C, R_f, -math.pi / 2.0, 0.0, path1, n_th, ref.eff_n_blend),
        blend_block(C, R_f, -math.pi, -math.pi / 2.0, path2, n_th, ref.eff_n_blend),
        rect_block(L1 - R_s, L1 + R_s, 0.0, yC - R_s, uniform_params(n_th), y_UB),
        rect_block(L1 - R_s, L1 - rho0, yC, W, x_strip_l, y_strip),
        rect_block(L1 + rho0, L1 + R_s, yC, W, x_strip_r, y_strip),
        *stack(0.0, L1 - R_s, x_BL),
        *stack(L1 + R_s, H, x_BR),
        rect_block(-Wb, 0.0, 0.0, W, x_SB, y_SB1),
        rect_block(-Wb, 0.0, -Hb, 0.0, x_SB, y_SB2),
    ]
    tol = rho0 * 1e-3
    nodes, elems = assemble_blocks(blocks, tol)
    _validate_jacobians(nodes, elems)

    geom_tol = rho0 * 0.1
    clamp = np.flatnonzero(
        (np.abs(nodes[:, 0] + Wb) < geom_tol) | (np.abs(nodes[:, 1] + Hb) < geom_tol)
    )
    bedges = boundary_edges(elems)
    top_surface = _select_edges(
        nodes, elems, bedges,
        lambda p1, p2, pm: abs(pm[1] - W) < geom_tol and pm[0] > 0.0,
    )

    return Mesh(
        nodes=nodes,
        elems=elems,
        geom=geom,
        tip=np.array([L1, lig]),
        crack_dir=np.array([0.0, -1.0]),
        crack_normal=np.array([1.0, 0.0]),
        rho0=rho0,
        char_length=s,
        symmetry_factor=1.0,
        contour_stations=_contour_stations(s),
        node_sets={"clamp": clamp},
        edge_sets={"top_surface": top_surface},
    )


def pick_load_patch(mesh: Mesh, edge_set: str, target: float, axis: int, n_edges: int = 2):
    """The ``n_edges`` edges of a named set whose midpoints are nearest
    ``target`` along ``axis`` (the default two-element patch avoids a point
    load singularity)."""
    edges = mesh.edge_sets[edge_set]
    if edges.shape[0] < n_edges:
        raise InputError(f"edge set {edge_set!r} has fewer than {n_edges} edges")
    mids = np.array([
        mesh.nodes[edge_nodes(mesh.elems, e, le)[2], axis] for e, le in edges
    ])
    order = np.argsort(np.abs(mids - target), kind="stable")
    chosen = edges[order[:n_edges]]
    return chosen[np.lexsort((chosen[:, 1], chosen[:, 0]))]
