"""Born data synthesis, far-field ingestion, and calibrated noise.

The forward map is the Fourier-type integral u(p) = int_Omega exp(i kappa
p.p') q(p') dp' evaluated by quadrature over the contrast support; the
scattering amplitude at wavenumber k factors through it as
k^2 u(theta_hat - x_hat).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .errors import ParameterError
from .numerics import QuadratureRule, annulus_polar_rule, disk_polar_rule
from .symset_basis import Geometry, membership

__all__ = [
    "ContrastField",
    "DataGrid",
    "synthesize_born",
    "far_field",
    "ingest_farfield",
    "add_noise",
    "write_datagrid",
    "read_datagrid",
]


@dataclass(frozen=True)
class ContrastField:
    """The unknown medium contrast: support descriptor, point oracle, quadrature.

    `shapes` is a list of dicts ({type, center, radius, value} for disks,
    r_inner/r_outer for annuli) or a grid dict {origin, dx, dy, values};
    overlapping shape values add.  `evaluate` returns q at (N, 2) points and
    vanishes off the support.
    """

    shapes: list | dict
    evaluate: Callable[[np.ndarray], np.ndarray]
    quad: QuadratureRule

    @staticmethod
    def from_shapes(shapes: list[dict], resolution: int = 160, method: str = "polar") -> "ContrastField":
        if not shapes:
            raise ParameterError("contrast needs at least one shape")
        rules = []
        for sh in shapes:
            center = tuple(sh.get("center", (0.0, 0.0)))
            n_t = resolution + resolution % 2
            if sh["type"] == "disk":
                if method == "polar":
                    rules.append(disk_polar_rule(sh["radius"], resolution, n_t, center=center))
                else:
                    rules.append(_midpoint_disk(center, 0.0, sh["radius"], resolution))
            elif sh["type"] == "annulus":
                if method == "polar":
                    rules.append(annulus_polar_rule(sh["r_inner"], sh["r_outer"], resolution,
                                                    n_t, center=center))
                else:
                    rules.append(_midpoint_disk(center, sh["r_inner"], sh["r_outer"], resolution))
            else:
                raise ParameterError(f"unknown shape type {sh['type']!r}")
        quad = QuadratureRule(np.concatenate([r.nodes for r in rules]),
                              np.concatenate([r.weights for r in rules]))

        def evaluate(pts: np.ndarray) -> np.ndarray:
            pts = np.atleast_2d(np.asarray(pts, dtype=float))
            out = np.zeros(len(pts))
            for sh in shapes:
                cx, cy = sh.get("center", (0.0, 0.0))
                d2 = (pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2
                if sh["type"] == "disk":
                    out += np.where(d2 < sh["radius"] ** 2, sh["value"], 0.0)
                else:
                    inside = (d2 > sh["r_inner"] ** 2) & (d2 < sh["r_outer"] ** 2)
                    out += np.where(inside, sh["value"], 0.0)
            return out

        return ContrastField(shapes=list(shapes), evaluate=evaluate, quad=quad)

    @staticmethod
    def from_grid(origin, dx: float, dy: float, values) -> "ContrastField":
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 2:
            raise ParameterError("grid values must be a 2D array")
        ox, oy = float(origin[0]), float(origin[1])
        ii, jj = np.nonzero(vals)
        if len(ii) == 0:
            raise ParameterError("grid contrast is identically zero")
        centers = np.stack([ox + (ii + 0.5) * dx, oy + (jj + 0.5) * dy], axis=1)
        quad = QuadratureRule(centers, np.full(len(ii), dx * dy))

        def evaluate(pts: np.ndarray) -> np.ndarray:
            pts = np.atleast_2d(np.asarray(pts, dtype=float))
            i = np.floor((pts[:, 0] - ox) / dx).astype(int)
            j = np.floor((pts[:, 1] - oy) / dy).astype(int)
            ok = (i >= 0) & (i < vals.shape[0]) & (j >= 0) & (j < vals.shape[1])
            out = np.zeros(len(pts))
            out[ok] = vals[i[ok], j[ok]]
            return out

        return ContrastField(shapes={"grid": {"origin": [ox, oy], "dx": dx, "dy": dy,
                                              "values": vals.tolist()}},
                             evaluate=evaluate, quad=quad)

    @staticmethod
    def from_callable(evaluate: Callable, quad: QuadratureRule,
                      circumradius: float | None = None) -> "ContrastField":
        """Arbitrary oracle backed by an explicit support quadrature (tests, band-limited fields)."""
        shapes = [{"type": "disk", "center": (0.0, 0.0),
                   "radius": circumradius if circumradius is not None
                   else float(np.hypot(quad.nodes[:, 0], quad.nodes[:, 1]).max()),
                   "value": None}]
        return ContrastField(shapes=shapes, evaluate=evaluate, quad=quad)

    @staticmethod
    def from_config(cfg: dict, resolution: int = 160) -> "ContrastField":
        if "grid" in cfg:
            g = cfg["grid"]
            return ContrastField.from_grid(g["origin"], g["dx"], g["dy"], g["values"])
        return ContrastField.from_shapes(cfg["shapes"], resolution=resolution)

    def circumradius(self) -> float:
        """Radius of the smallest origin-centered disk containing the support."""
        if isinstance(self.shapes, dict):
            return float(np.hypot(self.quad.nodes[:, 0], self.quad.nodes[:, 1]).max())
        radii = []
        for sh in self.shapes:
            cx, cy = sh.get("center", (0.0, 0.0))
            r = sh["radius"] if sh["type"] == "disk" else sh["r_outer"]
            radii.append(np.hypot(cx, cy) + r)
        return float(max(radii))

    def boundary_points(self, n: int = 1024) -> np.ndarray:
        """Points sampling the support boundary, used for containment checks."""
        if isinstance(self.shapes, dict):
            g = self.shapes["grid"]
            vals = np.asarray(g["values"])
            ii, jj = np.nonzero(vals)
            ox, oy = g["origin"]
            corners = []
            for di in (0, 1):
                for dj in (0, 1):
                    corners.append(np.stack([ox + (ii + di) * g["dx"], oy + (jj + dj) * g["dy"]], axis=1))
            return np.concatenate(corners)
        per = max(64, n // max(len(self.shapes), 1))
        t = 2.0 * np.pi * np.arange(per) / per
        pts = []
        for sh in self.shapes:
            cx, cy = sh.get("center", (0.0, 0.0))
            radii = [sh["radius"]] if sh["type"] == "disk" else [sh["r_inner"], sh["r_outer"]]
            for r in radii:
                pts.append(np.stack([cx + r * np.cos(t), cy + r * np.sin(t)], axis=1))
        return np.concatenate(pts)


def _midpoint_disk(center, r_inner: float, r_outer: float, resolution: int) -> QuadratureRule:
    step = 2.0 * r_outer / resolution
    g = step * (np.arange(resolution) - (resolution - 1) / 2.0)
    X, Y = np.meshgrid(g, g, indexing="ij")
    d2 = X**2 + Y**2
    keep = (d2 < r_outer**2) & (d2 > r_inner**2) if r_inner > 0 else d2 < r_outer**2
    pts = np.stack([X[keep] + center[0], Y[keep] + center[1]], axis=1)
    return QuadratureRule(pts, np.full(len(pts), step * step))


@dataclass(frozen=True)
class DataGrid:
    """Complex Born data sampled on quadrature nodes of the data domain."""

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    flags: np.ndarray  # 0 valid, 1 missing
    meta: dict = field(default_factory=dict)
    geometry: Geometry | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        object.__setattr__(self, "flags", np.asarray(self.flags, dtype=np.uint8))

    @property
    def valid(self) -> np.ndarray:
        return self.flags == 0

    def weighted_norm(self) -> float:
        ok = self.valid
        return float(np.sqrt(np.sum(self.weights[ok] * np.abs(self.values[ok]) ** 2)))


def _oscillation_resolved(q: ContrastField, kappa: float, targets: np.ndarray) -> bool:
    """Heuristic: at least ~10 support nodes per oscillation period of the kernel."""
    support = q.quad.nodes
    diam = float(np.ptp(support[:, 0]) + np.ptp(support[:, 1]))
    if diam == 0.0:
        return True
    spacing = np.sqrt(q.quad.total_weight / len(q.quad))
    pmax = float(np.hypot(targets[:, 0], targets[:, 1]).max()) if len(targets) else 0.0
    return kappa * pmax * spacing <= 2.0 * np.pi / 10.0


def synthesize_born(q: ContrastField, kernel_scale: float, targets,
                    geometry: Geometry | None = None) -> DataGrid:
    """u(p) = int_Omega exp(i kappa p.p') q(p') dp' on the target nodes.

    `targets` is a QuadratureRule (its nodes and weights are carried into the
    DataGrid) or a bare (N, 2) array (unit weights).  Sets meta flag
    "underresolved" when the support quadrature looks too coarse for the
    kernel oscillation.
    """
    if kernel_scale <= 0.0:
        raise ParameterError("kernel_scale must be positive")
    if isinstance(targets, QuadratureRule):
        nodes, weights = targets.nodes, targets.weights
    else:
        nodes = np.atleast_2d(np.asarray(targets, dtype=float))
        weights = np.ones(len(nodes))
    qv = q.evaluate(q.quad.nodes) * q.quad.weights
    values = np.empty(len(nodes), dtype=complex)
    block = max(1, 4_000_000 // max(len(q.quad), 1))
    for start in range(0, len(nodes), block):
        stop = min(start + block, len(nodes))
        phase = kernel_scale * (nodes[start:stop] @ q.quad.nodes.T)
        values[start:stop] = np.exp(1j * phase) @ qv
    meta = {"kappa": float(kernel_scale), "delta": 0.0, "seed": None,
            "underresolved": not _oscillation_resolved(q, kernel_scale, nodes)}
    return DataGrid(nodes=nodes, weights=weights, values=values,
                    flags=np.zeros(len(nodes), dtype=np.uint8), meta=meta, geometry=geometry)


def far_field(q: ContrastField, x_hat, theta_hat, k: float) -> complex:
    """Scattering amplitude k^2 int_Omega exp(-i k x_hat.p') q(p') exp(i k p'.theta_hat) dp'."""
    if k <= 0.0:
        raise ParameterError("far_field requires k > 0")
    x_hat = np.asarray(x_hat, dtype=float)
    theta_hat = np.asarray(theta_hat, dtype=float)
    phase = k * (q.quad.nodes @ (theta_hat - x_hat))
    qv = q.evaluate(q.quad.nodes) * q.quad.weights
    return complex(k * k * np.sum(np.exp(1j * phase) * qv))


def ingest_farfield(samples, k: float, target: QuadratureRule,
                    cutoff: float | None = None, geometry: Geometry | None = None) -> DataGrid:
    """Map far-field samples (x_hat, theta_hat, value) onto the p = theta_hat - x_hat
    representation and resample onto the target rule.

    Duplicate p points (to 1e-12) are averaged; target values come from
    inverse-distance weighting of the 4 nearest samples; nodes farther than
    `cutoff` from every sample are flagged missing (cutoff defaults to 3x the
    median nearest-neighbor spacing of the samples).
    """
    if k <= 0.0:
        raise ParameterError("ingest_farfield requires k > 0")
    n_t = len(target)
    if len(samples) == 0:
        return DataGrid(nodes=target.nodes, weights=target.weights,
                        values=np.zeros(n_t, dtype=complex),
                        flags=np.ones(n_t, dtype=np.uint8),
                        meta={"kappa": None, "delta": 0.0, "seed": None}, geometry=geometry)
    pts, vals = [], []
    for x_hat, theta_hat, value in samples:
        pts.append(np.asarray(theta_hat, dtype=float) - np.asarray(x_hat, dtype=float))
        vals.append(complex(value) / k**2)
    pts = np.array(pts)
    vals = np.array(vals)
    keys = np.round(pts / 1e-12).astype(np.int64)
    _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    merged_pts = np.zeros((len(counts), 2))
    merged_vals = np.zeros(len(counts), dtype=complex)
    np.add.at(merged_pts, inverse, pts)
    np.add.at(merged_vals, inverse, vals)
    merged_pts /= counts[:, None]
    merged_vals /= counts

    tree = cKDTree(merged_pts)
    if cutoff is None:
        if len(merged_pts) > 1:
            nn = tree.query(merged_pts, k=2)[0][:, 1]
            cutoff = 3.0 * float(np.median(nn))
        else:
            cutoff = np.inf
    kq = min(4, len(merged_pts))
    dist, idx = tree.query(target.nodes, k=kq)
    dist = np.atleast_2d(dist.T).T.reshape(n_t, kq)
    idx = np.atleast_2d(idx.T).T.reshape(n_t, kq)
    flags = (dist[:, 0] > cutoff).astype(np.uint8)
    values = np.zeros(n_t, dtype=complex)
    exact = dist[:, 0] < 1e-13
    values[exact] = merged_vals[idx[exact, 0]]
    rest = ~exact
    if rest.any():
        wgt = 1.0 / dist[rest]
        values[rest] = np.sum(wgt * merged_vals[idx[rest]], axis=1) / np.sum(wgt, axis=1)
    values[flags == 1] = 0.0
    return DataGrid(nodes=target.nodes, weights=target.weights, values=values, flags=flags,
                    meta={"kappa": None, "delta": 0.0, "seed": None, "cutoff": float(cutoff)},
                    geometry=geometry)


def add_noise(data: DataGrid, delta: float, seed: int) -> DataGrid:
    """Add complex Gaussian noise with weighted norm exactly delta * ||u||.

    delta is relative; the achieved absolute level delta * ||u|| is recorded in
    meta["delta_abs"].  delta = 0 returns bitwise-identical values.
    """
    if delta < 0.0:
        raise ParameterError("noise level must be nonnegative")
    meta = dict(data.meta)
    if delta == 0.0:
        meta.update({"delta": 0.0, "delta_abs": 0.0, "seed": seed})
        return replace(data, values=data.values.copy(), meta=meta)
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal(len(data.values)) + 1j * rng.standard_normal(len(data.values))
    ok = data.valid
    raw_norm = np.sqrt(np.sum(data.weights[ok] * np.abs(raw[ok]) ** 2))
    target = delta * data.weighted_norm()
    noise = raw * (target / raw_norm)
    meta.update({"delta": float(delta), "delta_abs": float(target), "seed": int(seed)})
    return replace(data, values=data.values + noise, meta=meta)


def write_datagrid(path, data: DataGrid) -> None:
    """One JSON header line {kappa, delta, seed, geometry, count}, then CSV rows
    px,py,weight,re,im,flag."""
    header = {
        "kappa": data.meta.get("kappa"),
        "delta": data.meta.get("delta", 0.0),
        "seed": data.meta.get("seed"),
        "geometry": data.geometry.to_dict() if data.geometry is not None else None,
        "count": len(data.values),
    }
    extra = {k: v for k, v in data.meta.items() if k not in header and _json_safe(v)}
    header["meta"] = extra
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        f.write("px,py,weight,re,im,flag\n")
        for (x, y), w, v, fl in zip(data.nodes, data.weights, data.values, data.flags):
            f.write(f"{float(x)!r},{float(y)!r},{float(w)!r},"
                    f"{float(v.real)!r},{float(v.imag)!r},{int(fl)}\n")


def _json_safe(v) -> bool:
    return isinstance(v, (int, float, str, bool, type(None)))


def read_datagrid(path) -> DataGrid:
    with open(path, "r", encoding="utf-8") as f:
        header = json.loads(f.readline())
        cols = f.readline().strip().split(",")
        if cols != ["px", "py", "weight", "re", "im", "flag"]:
            raise ParameterError(f"unexpected data columns {cols}")
        rows = [line.strip().split(",") for line in f if line.strip()]
    nodes = np.array([[float(r[0]), float(r[1])] for r in rows])
    weights = np.array([float(r[2]) for r in rows])
    values = np.array([float(r[3]) + 1j * float(r[4]) for r in rows])
    flags = np.array([int(r[5]) for r in rows], dtype=np.uint8)
    if len(values) != header["count"]:
        raise ParameterError("row count does not match header")
    meta = {"kappa": header.get("kappa"), "delta": header.get("delta", 0.0),
            "seed": header.get("seed")}
    meta.update(header.get("meta", {}))
    geometry = Geometry.from_dict(header["geometry"]) if header.get("geometry") else None
    return DataGrid(nodes=nodes, weights=weights, values=values, flags=flags,
                    meta=meta, geometry=geometry)
