"""Symmetric data domains and their Nystrom eigensystems.

Covers the three data geometries of the Born problem: a disk, the
limited-aperture difference set

    L(Theta) = interior of { theta_hat - x_hat : |arg| < Theta on both },

and the multi-frequency set M = B(x*, 1) u B(-x*, 1).  All three are symmetric
under p -> -p and star-shaped about the origin; `radial_profile` gives the
exact radial boundary, used for analytic areas and polar quadratures.

On the dilated set A_h = h A the Fourier kernel has effective frequency
c / h^2, and it splits into a cosine part acting on even functions (real
eigenvalues) and a sine part acting on odd functions (imaginary eigenvalues).
Both are discretized as symmetrically scaled Nystrom matrices
sqrt(w_i) k(c/h^2 p_i.p_j) sqrt(w_j); merged eigenpairs are ordered by |alpha|
and normalized to unit plane energy, i.e. weighted node-norm squared equal to
(c / 2 pi)^2 |alpha_n|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyQuadratureError, ParameterError
from .numerics import QuadratureRule, disk_polar_rule, gauss_legendre_01, sym_eig

__all__ = [
    "Geometry",
    "SymSetMode",
    "SymSetBasis",
    "membership",
    "radial_profile",
    "analytic_area",
    "bounding_box",
    "build_quadrature",
    "compute_symset_basis",
    "eval_symset_psi",
]

ALPHA_FLOOR = 1e-14


@dataclass(frozen=True)
class Geometry:
    """A symmetric data domain A dilated by h: membership tests run on p / h."""

    kind: str  # "disk" | "limited_aperture" | "multi_freq"
    h: float = 1.0
    radius: float = 1.0
    theta: float = math.pi
    x_star: tuple[float, float] = (1.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("disk", "limited_aperture", "multi_freq"):
            raise ParameterError(f"unknown geometry kind {self.kind!r}")
        if self.h <= 0.0:
            raise ParameterError("geometry scale h must be positive")
        if self.kind == "disk" and self.radius <= 0.0:
            raise ParameterError("disk radius must be positive")
        if self.kind == "limited_aperture" and not 0.0 < self.theta <= math.pi:
            raise ParameterError("aperture half-angle must lie in (0, pi]")
        if self.kind == "multi_freq":
            norm = math.hypot(*self.x_star)
            if abs(norm - 1.0) > 1e-9:
                raise ParameterError("x_star must be a unit vector")
            object.__setattr__(self, "x_star", (self.x_star[0] / norm, self.x_star[1] / norm))

    @staticmethod
    def disk(radius: float = 1.0, h: float = 1.0) -> "Geometry":
        return Geometry(kind="disk", h=h, radius=radius)

    @staticmethod
    def limited_aperture(theta: float, h: float = 1.0) -> "Geometry":
        return Geometry(kind="limited_aperture", h=h, theta=theta)

    @staticmethod
    def multi_freq(x_star, h: float = 1.0) -> "Geometry":
        return Geometry(kind="multi_freq", h=h, x_star=(float(x_star[0]), float(x_star[1])))

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "h": self.h}
        if self.kind == "disk":
            out["radius"] = self.radius
        elif self.kind == "limited_aperture":
            out["theta"] = self.theta
        else:
            out["x_star"] = [self.x_star[0], self.x_star[1]]
        return out

    @staticmethod
    def from_dict(d: dict) -> "Geometry":
        kind = d["kind"]
        if kind == "disk":
            return Geometry.disk(radius=d.get("radius", 1.0), h=d.get("h", 1.0))
        if kind == "limited_aperture":
            return Geometry.limited_aperture(theta=d["theta"], h=d.get("h", 1.0))
        return Geometry.multi_freq(d["x_star"], h=d.get("h", 1.0))


def _limited_membership(theta_cap: float, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """p in L(Theta) iff some unit pair (x_hat, theta_hat = x_hat + p) exists
    with both arguments strictly inside (-Theta, Theta).

    Unit solutions of |x_hat + p| = 1 satisfy x_hat.p = -|p|^2 / 2, giving at
    most two candidates; p = 0 lies in the interior iff Theta > pi / 2.
    """
    rho2 = px * px + py * py
    rho = np.sqrt(rho2)
    out = np.zeros(rho.shape, dtype=bool)
    origin = rho < 1e-14
    out[origin] = theta_cap > math.pi / 2.0
    ok = (~origin) & (rho < 2.0)
    if ok.any():
        ux, uy = px[ok] / rho[ok], py[ok] / rho[ok]
        t = -rho[ok] / 2.0
        s = np.sqrt(np.maximum(0.0, 1.0 - rho2[ok] / 4.0))
        hit = np.zeros(t.shape, dtype=bool)
        for sgn in (1.0, -1.0):
            xh = t * ux - sgn * s * uy
            yh = t * uy + sgn * s * ux
            good = (np.abs(np.arctan2(yh, xh)) < theta_cap) & (
                np.abs(np.arctan2(yh + py[ok], xh + px[ok])) < theta_cap
            )
            hit |= good
        out[ok] = hit
    return out


def membership(geometry: Geometry, p) -> bool | np.ndarray:
    """True iff p / h lies in the open set A."""
    pts = np.atleast_2d(np.asarray(p, dtype=float)) / geometry.h
    x, y = pts[:, 0], pts[:, 1]
    if geometry.kind == "disk":
        out = x * x + y * y < geometry.radius**2
    elif geometry.kind == "multi_freq":
        ax, ay = geometry.x_star
        out = ((x - ax) ** 2 + (y - ay) ** 2 < 1.0) | ((x + ax) ** 2 + (y + ay) ** 2 < 1.0)
    else:
        out = _limited_membership(geometry.theta, x, y)
    return bool(out[0]) if np.asarray(p).ndim == 1 else out


def _wrap(a: np.ndarray) -> np.ndarray:
    return (a + np.pi) % (2.0 * np.pi) - np.pi


def radial_profile(geometry: Geometry, phi) -> np.ndarray:
    """Radial extent of A along direction phi (unit scale, multiply by h).

    All three geometries are star-shaped about the origin, so membership is
    equivalent to |p| / h < radial_profile(phi).  For the limited-aperture set
    the profile follows from the parametrization p = 2 sin(u) e(v + pi/2) with
    the constraint u + |v| < Theta.
    """
    phi = np.asarray(phi, dtype=float)
    if geometry.kind == "disk":
        return np.full(phi.shape, geometry.radius)
    if geometry.kind == "multi_freq":
        phi_star = math.atan2(geometry.x_star[1], geometry.x_star[0])
        return 2.0 * np.abs(np.cos(phi - phi_star))
    cap = geometry.theta
    rho = np.zeros(phi.shape)
    for shift in (-math.pi / 2.0, math.pi / 2.0):
        q = cap - np.abs(_wrap(phi + shift))
        branch = np.where(q >= math.pi / 2.0, 2.0, np.where(q > 0.0, 2.0 * np.sin(np.maximum(q, 0.0)), 0.0))
        rho = np.maximum(rho, branch)
    return rho


def analytic_area(geometry: Geometry) -> float:
    """Measure of A_h.  Exact for disk and multi-frequency; the limited
    aperture case integrates the closed-form radial profile."""
    if geometry.kind == "disk":
        return math.pi * (geometry.radius * geometry.h) ** 2
    if geometry.kind == "multi_freq":
        return 2.0 * math.pi * geometry.h**2  # two tangent unit disks
    n = 200_000
    phi = 2.0 * math.pi * (np.arange(n) + 0.5) / n
    rho = radial_profile(geometry, phi)
    return float(0.5 * np.sum(rho**2) * (2.0 * math.pi / n) * geometry.h**2)


def bounding_box(geometry: Geometry) -> float:
    """Half-width b of the symmetric bounding box [-b, b]^2 of A_h."""
    if geometry.kind == "disk":
        return geometry.radius * geometry.h
    return 2.0 * geometry.h


def build_quadrature(geometry: Geometry, resolution: int, method: str = "auto") -> QuadratureRule:
    """Quadrature over A_h.

    method "midpoint": tensor midpoint grid over the bounding box filtered by
    membership, weight equal to the cell area (default for the aperture and
    multi-frequency sets; first-order boundary accuracy).  method "polar":
    analytic rules built from the radial profile (default for disks; also
    available for L and M when spectral accuracy of the total weight matters).
    """
    if resolution < 8:
        raise ParameterError("resolution must be at least 8")
    if method == "auto":
        method = "polar" if geometry.kind == "disk" else "midpoint"
    if method == "midpoint":
        b = bounding_box(geometry)
        step = 2.0 * b / resolution
        centers = step * (np.arange(resolution) - (resolution - 1) / 2.0)
        X, Y = np.meshgrid(centers, centers, indexing="ij")
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        keep = membership(geometry, pts)
        if not keep.any():
            raise EmptyQuadratureError("no quadrature nodes inside the set")
        pts = pts[keep]
        return QuadratureRule(pts, np.full(len(pts), step * step))
    if method != "polar":
        raise ParameterError(f"unknown quadrature method {method!r}")

    n_r = max(12, resolution // 8)
    n_t = max(24, 2 * (resolution // 8))
    n_t += n_t % 2
    if geometry.kind == "disk":
        return disk_polar_rule(geometry.radius * geometry.h, n_r, n_t)
    if geometry.kind == "multi_freq":
        cx, cy = geometry.h * geometry.x_star[0], geometry.h * geometry.x_star[1]
        plus = disk_polar_rule(geometry.h, n_r, n_t, center=(cx, cy))
        nodes = np.concatenate([plus.nodes, -plus.nodes])
        weights = np.concatenate([plus.weights, plus.weights])
        return QuadratureRule(nodes, weights)
    # star-shaped rule for L: uniform angles, Gauss in radius up to the profile
    n_phi = max(64, resolution)
    n_phi += n_phi % 2
    half = n_phi // 2
    phi = np.pi * (np.arange(half) + 0.5) / half
    wphi = 2.0 * np.pi / n_phi
    rad = gauss_legendre_01(n_r)
    rho = geometry.h * radial_profile(geometry, phi)
    live = rho > 0.0
    if not live.any():
        raise EmptyQuadratureError("no quadrature nodes inside the set")
    r = np.outer(rad.nodes, rho[live])                    # (n_r, n_live)
    w = np.outer(rad.weights, rho[live]) * r * wphi       # r dr dphi
    cosq, sinq = np.cos(phi[live]), np.sin(phi[live])
    x = (r * cosq).ravel()
    y = (r * sinq).ravel()
    pts = np.concatenate([np.stack([x, y], axis=1), np.stack([-x, -y], axis=1)])
    return QuadratureRule(pts, np.tile(w.ravel(), 2))


@dataclass(frozen=True)
class SymSetMode:
    """One Nystrom eigenpair: parity, operator eigenvalue, node samples."""

    parity: str  # "even" | "odd"
    alpha: complex  # eigenvalue of the unit-scale set A (real if even, imaginary if odd)
    node_values: np.ndarray

    @property
    def beta(self) -> float:
        """Signed real eigenvalue of the cos (even) or sin (odd) kernel on A."""
        return self.alpha.real if self.parity == "even" else self.alpha.imag


@dataclass(frozen=True)
class SymSetBasis:
    """Retained eigenpairs of the Fourier operator on A_h, |alpha| descending.

    `spectrum_even` / `spectrum_odd` keep the complete Nystrom eigenvalue lists
    (operator scale, i.e. h^2 beta), which the Hilbert-Schmidt sum rule checks
    against the squared domain measure.
    """

    c: float
    geometry: Geometry
    quad: QuadratureRule
    modes: tuple[SymSetMode, ...]
    spectrum_even: np.ndarray = None
    spectrum_odd: np.ndarray = None
    complete: bool = True  # False if fewer than requested survived the floor

    @property
    def kernel_scale(self) -> float:
        return self.c / self.geometry.h**2

    @property
    def alphas(self) -> np.ndarray:
        return np.array([mo.alpha for mo in self.modes])

    @property
    def mu(self) -> np.ndarray:
        """Eigenvalues h^2 alpha_n of the operator on the dilated set A_h."""
        return self.geometry.h**2 * self.alphas

    @property
    def mode_norms(self) -> np.ndarray:
        """L2(A_h) norms, equal to (c / 2 pi) |alpha_n| per mode."""
        return (self.c / (2.0 * np.pi)) * np.abs(self.alphas)

    @property
    def node_values(self) -> np.ndarray:
        return np.array([mo.node_values for mo in self.modes])


def compute_symset_basis(c: float, geometry: Geometry, quad: QuadratureRule,
                         n_modes: int) -> SymSetBasis:
    """Nystrom eigensystem of the Fourier operator on A_h.

    Assembles the symmetrized cosine and sine kernel matrices, eigendecomposes
    both, merges even modes (alpha = beta_e) with odd modes (alpha = i beta_o),
    sorts by |alpha| descending, and keeps the top n_modes above the floor
    1e-14 |alpha_0|.
    """
    if c <= 0.0:
        raise ParameterError("compute_symset_basis requires c > 0")
    if n_modes < 1:
        raise ParameterError("n_modes must be positive")
    if n_modes > len(quad) // 2:
        raise ParameterError("n_modes must be much smaller than the node count")
    pts, w = quad.nodes, quad.weights
    sw = np.sqrt(w)
    h2 = geometry.h**2
    gram = (c / h2) * (pts @ pts.T)
    scaled = sw[:, None] * sw[None, :]
    candidates: list[tuple[float, int, int, str, float, np.ndarray]] = []
    spectra = {}
    for parity, kernel in (("even", np.cos(gram)), ("odd", np.sin(gram))):
        vals, vecs = sym_eig(kernel * scaled)
        spectra[parity] = vals.copy()
        keep = np.argsort(-np.abs(vals))[: min(2 * n_modes + 8, len(vals))]
        for rank, idx in enumerate(keep):
            lam = float(vals[idx])  # matrix eigenvalue approximates h^2 beta
            alpha = complex(lam / h2) if parity == "even" else complex(0.0, lam / h2)
            v = vecs[:, idx] / sw
            candidates.append((-abs(alpha), 0 if parity == "even" else 1, rank, parity, lam, v))
    del gram
    candidates.sort(key=lambda t: (t[0], t[1], t[2]))
    floor = ALPHA_FLOOR * abs(candidates[0][0]) if candidates else 0.0
    modes: list[SymSetMode] = []
    for negabs, _, _, parity, lam, v in candidates:
        if len(modes) >= n_modes:
            break
        if -negabs < floor:
            continue
        alpha = complex(lam / h2) if parity == "even" else complex(0.0, lam / h2)
        scale = (c / (2.0 * np.pi)) * abs(alpha)  # weighted node-norm = (c/2pi)|alpha|
        vv = scale * v
        if vv[int(np.argmax(np.abs(vv)))] < 0.0:
            vv = -vv
        vv.flags.writeable = False
        modes.append(SymSetMode(parity=parity, alpha=alpha, node_values=vv))
    return SymSetBasis(c=float(c), geometry=geometry, quad=quad, modes=tuple(modes),
                       spectrum_even=spectra["even"], spectrum_odd=spectra["odd"],
                       complete=len(modes) >= n_modes)


def eval_symset_psi(basis: SymSetBasis, n: int, p) -> float | np.ndarray:
    """Nystrom natural interpolation of mode n at arbitrary points.

    Inside A_h this reproduces the stored node values; outside it evaluates
    the analytic extension through the same kernel sum.  Even modes use the
    cosine kernel, odd modes the sine kernel, so values are exactly real.
    """
    mo = basis.modes[n]
    pts = np.atleast_2d(np.asarray(p, dtype=float))
    gram = basis.kernel_scale * (pts @ basis.quad.nodes.T)
    kernel = np.cos(gram) if mo.parity == "even" else np.sin(gram)
    lam = mo.beta * basis.geometry.h**2  # operator eigenvalue on A_h
    out = kernel @ (basis.quad.weights * mo.node_values) / lam
    return float(out[0]) if np.asarray(p).ndim == 1 else out


def mirror_indices(quad: QuadratureRule) -> np.ndarray:
    """Index map i -> j with nodes[j] == -nodes[i] (exact for built-in rules)."""
    lookup = {(-x, -y): i for i, (x, y) in enumerate(map(tuple, quad.nodes))}
    try:
        return np.array([lookup[(x, y)] for x, y in map(tuple, quad.nodes)])
    except KeyError as exc:
        raise ParameterError("quadrature nodes are not symmetric under negation") from exc
