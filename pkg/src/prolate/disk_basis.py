"""Generalized prolate spheroidal eigensystem on the unit disk.

The basis psi_{m,n,l}(x; c) diagonalizes the finite Fourier operator

    (F_c psi)(p) = int_{B(0,1)} exp(i c p.p') psi(p') dp' = alpha psi(p)

and simultaneously the Sturm-Liouville operator

    D_{c,x} = -(1-r^2) d_r^2 + (3r - 1/r) d_r - r^{-2} d_theta^2 + c^2 r^2

with eigenvalue chi_{m,n}(c).  Separating variables, psi = R(r) Y_{m,l}(theta)
with Y = {1, cos(m theta), sin(m theta)}; the radial factor is expanded in the
orthonormal disk-polynomial basis of `zernike_radial`, in which D_{c,x}
restricted to azimuthal order m is exactly tridiagonal:

    diag_j = (m+2j)(m+2j+2) + c^2 <r^2 Z_j, Z_j>,   off_j = c^2 <r^2 Z_j, Z_{j+1}>.

The Fourier eigenvalue comes from the radial kernel relation

    sqrt(c) int_0^1 J_m(c r s) R(s) s ds = gamma R(r),    alpha = 2 pi i^m gamma / sqrt(c),

with gamma real.  Each mode is normalized to unit energy on the whole plane,
equivalently ||psi||_{L2(B(0,1))} = (c / 2 pi) |alpha|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import jv

from .errors import ParameterError
from .numerics import (
    QuadratureRule,
    SymmetricTridiagonal,
    disk_polar_rule,
    gauss_legendre_01,
    sym_eig,
    zernike_radial_table,
)

__all__ = [
    "DiskMode",
    "DiskBasis",
    "ScaledDiskBasis",
    "assemble_sl_matrix",
    "compute_disk_basis",
    "default_truncation",
    "eval_psi",
    "eval_psi_scaled",
    "scale_to_data_domain",
]

GAMMA_FLOOR = 1e-300


@dataclass(frozen=True)
class DiskMode:
    """One disk eigenfunction: indices, eigenvalues, and radial coefficients.

    `coeffs` expands the radial factor in the orthonormal disk polynomials of
    matching azimuthal order, scaled so the plane energy of the mode is 1 and
    signed so the first significant coefficient is positive.
    """

    m: int
    n: int
    ell: int
    chi: float
    gamma: float
    alpha: complex
    coeffs: np.ndarray
    usable: bool = True

    @property
    def chi_radial(self) -> float:
        """Eigenvalue of the radial operator acting on sqrt(r) R(r); exceeds chi by 3/4."""
        return self.chi + 0.75

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.ell)


@dataclass(frozen=True)
class DiskBasis:
    """Computed disk modes plus the unit-disk quadrature used for inner products.

    `node_values[i]` holds mode i sampled on `quad.nodes`; modes are ordered by
    (m + 2n, m, ell).
    """

    c: float
    truncation: int
    modes: tuple[DiskMode, ...]
    quad: QuadratureRule
    node_values: np.ndarray
    quad_size: tuple[int, int] = (0, 0)

    @property
    def mode_norms(self) -> np.ndarray:
        """L2(B(0,1)) norms, equal to (c / 2 pi) |alpha| per mode."""
        return np.array([(self.c / (2.0 * np.pi)) * abs(mo.alpha) for mo in self.modes])

    def mode_index(self, key: tuple[int, int, int]) -> int:
        for i, mo in enumerate(self.modes):
            if mo.key == tuple(key):
                return i
        raise KeyError(f"mode {key} not present in basis")


@dataclass(frozen=True)
class ScaledDiskBasis:
    """The disk eigensystem mapped onto the data disk of radius base.c / (2k).

    psi_scaled(x) = (2k / c) psi(2k x / c) satisfies the Fourier eigenrelation
    with kernel exp(i (4 k^2 / c) p.p') and eigenvalue (c / 2k)^2 alpha, has
    unit plane energy, and squared norm (c / 2 pi)^2 |alpha|^2 on the data disk.
    """

    base: DiskBasis
    k: float
    quad: QuadratureRule
    node_values: np.ndarray

    @property
    def radius(self) -> float:
        return self.base.c / (2.0 * self.k)

    @property
    def kernel_scale(self) -> float:
        return 4.0 * self.k**2 / self.base.c

    @property
    def modes(self) -> tuple[DiskMode, ...]:
        return self.base.modes

    @property
    def mode_norms(self) -> np.ndarray:
        """L2(D) norms on the data disk, equal to (c / 2 pi) |alpha| per mode."""
        return self.base.mode_norms

    @property
    def eigenvalues(self) -> np.ndarray:
        """Fourier eigenvalues (c / 2k)^2 alpha_{m,n}(c) of the scaled operator."""
        return np.array([(self.radius**2) * mo.alpha for mo in self.modes])


def default_truncation(c: float, n_max: int) -> int:
    """Disk-polynomial count resolving the c^2 r^2 coupling for n <= n_max."""
    return 2 * n_max + math.ceil(c) + 10


def assemble_sl_matrix(c: float, m: int, J: int) -> SymmetricTridiagonal:
    """Matrix of D_{c,x} at azimuthal order m in the orthonormal disk polynomials.

    The radial inner products <r^2 Z_j, Z_k> (weight r) are computed with a
    Gauss rule exact for the integrand degree, so the matrix is exact to
    rounding.  c = 0 is allowed and gives the decoupled diagonal
    (m+2j)(m+2j+2).
    """
    if c < 0.0:
        raise ParameterError("assemble_sl_matrix requires c >= 0")
    if m < 0 or J < 1:
        raise ParameterError("assemble_sl_matrix requires m >= 0 and J >= 1")
    rule = gauss_legendre_01(m + 2 * J + 4)
    x, w = rule.nodes, rule.weights
    Z = zernike_radial_table(m, J, x)
    wr3 = w * x**3  # weight r times r^2
    diag = np.array(
        [(m + 2 * j) * (m + 2 * j + 2) + c * c * np.dot(Z[j] * wr3, Z[j]) for j in range(J)]
    )
    off = np.array([c * c * np.dot(Z[j] * wr3, Z[j + 1]) for j in range(J - 1)])
    return SymmetricTridiagonal(diag, off)


def _radial_rule_size(c: float, m: int, J: int, r_max: float = 1.0) -> int:
    # resolves both the disk-polynomial degree and the kernel oscillation
    # c * r_max * s over s in [0, 1]
    return m + 2 * J + math.ceil(c * max(1.0, r_max) / 2.0) + 16


def _angular_factor(m: int, ell: int, theta: np.ndarray) -> np.ndarray:
    if m == 0:
        return np.ones_like(theta)
    return np.cos(m * theta) if ell == 1 else np.sin(m * theta)


def compute_disk_basis(c: float, m_max: int, n_max: int, truncation: int | None = None,
                       quad_size: tuple[int, int] | None = None) -> DiskBasis:
    """Compute the disk eigensystem for m <= m_max, n <= n_max at bandwidth c.

    For each azimuthal order the tridiagonal Galerkin matrix is diagonalized
    (chi ascending, n-th eigenvalue), gamma is the Rayleigh quotient of the
    radial kernel operator on the eigenfunction, and alpha = 2 pi i^m gamma /
    sqrt(c).  Modes whose |gamma| underflows are flagged unusable.
    """
    if c <= 0.0:
        raise ParameterError("compute_disk_basis requires c > 0")
    if m_max < 0 or n_max < 0:
        raise ParameterError("compute_disk_basis requires m_max >= 0 and n_max >= 0")
    J = default_truncation(c, n_max) if truncation is None else int(truncation)
    if J < n_max + 1:
        raise ParameterError("truncation must exceed n_max")

    modes: list[DiskMode] = []
    for m in range(m_max + 1):
        tri = assemble_sl_matrix(c, m, J)
        chis, vecs = sym_eig(tri)  # raises EigensolverError on non-convergence
        rule = gauss_legendre_01(_radial_rule_size(c, m, J))
        s, w = rule.nodes, rule.weights
        Z = zernike_radial_table(m, J, s)
        kernel = jv(m, c * np.outer(s, s))
        amp = 2.0 * np.pi if m == 0 else np.pi  # angular factor squared integral
        for n in range(n_max + 1):
            v = vecs[:, n].copy()
            significant = np.abs(v) > 1e-8 * np.abs(v).max()
            lead = int(np.argmax(significant))
            if v[lead] < 0.0:
                v = -v
            R = v @ Z
            wr = w * s
            KR = math.sqrt(c) * (kernel @ (wr * R))
            gamma = float(np.dot(wr * R, KR) / np.dot(wr * R, R))
            alpha = complex(2.0 * np.pi * (1j) ** m / math.sqrt(c) * gamma)
            usable = abs(gamma) >= GAMMA_FLOOR
            # unit plane energy: squared norm on B(0,1) equals (c/2pi)^2 |alpha|^2
            scale = (c / (2.0 * np.pi)) * abs(alpha) / math.sqrt(amp) if usable else 1.0
            coeffs = scale * v
            coeffs.flags.writeable = False
            for ell in ((1,) if m == 0 else (1, 2)):
                modes.append(DiskMode(m, n, ell, float(chis[n]), gamma, alpha, coeffs, usable))
    modes.sort(key=lambda mo: (mo.m + 2 * mo.n, mo.m, mo.ell))

    if quad_size is None:
        n_r = m_max + 2 * J + 2
        n_t = max(32, 4 * m_max + 10)
        n_t += n_t % 2
    else:
        n_r, n_t = quad_size
    quad = disk_polar_rule(1.0, n_r, n_t)
    node_values = _mode_node_values(modes, quad, n_r, n_t, J)
    node_values.flags.writeable = False
    return DiskBasis(c=float(c), truncation=J, modes=tuple(modes), quad=quad,
                     node_values=node_values, quad_size=(n_r, n_t))


def _mode_node_values(modes, quad: QuadratureRule, n_r: int, n_t: int, J: int) -> np.ndarray:
    """Sample every mode on the polar rule, exploiting its tensor structure."""
    half = n_t // 2
    block = n_r * half
    r = np.hypot(quad.nodes[:block, 0], quad.nodes[:block, 1]).reshape(n_r, half)[:, 0]
    theta = np.arctan2(quad.nodes[:block, 1], quad.nodes[:block, 0]).reshape(n_r, half)[0]
    tables = {}
    vals = np.empty((len(modes), len(quad)))
    for i, mo in enumerate(modes):
        if mo.m not in tables:
            tables[mo.m] = zernike_radial_table(mo.m, J, r)
        R = mo.coeffs @ tables[mo.m]
        Y = _angular_factor(mo.m, mo.ell, theta)
        first = np.outer(R, Y).ravel()
        vals[i, :block] = first
        vals[i, block:] = (-1.0) ** mo.m * first  # psi(-p) = (-1)^m psi(p)
    return vals


def eval_psi(basis: DiskBasis, mode, x) -> float | np.ndarray:
    """Evaluate one disk mode anywhere in the plane.

    Inside the unit disk the coefficient expansion is used (finite at the
    origin for every m).  Outside, the analytic extension
    psi(x) = alpha^{-1} int_{B} exp(i c x.p') psi(p') dp' is evaluated through
    its radial reduction sqrt(c)/gamma * Y(theta) * int_0^1 J_m(c |x| s) R(s) s ds.
    """
    mo = mode if isinstance(mode, DiskMode) else basis.modes[basis.mode_index(mode)]
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    J = len(mo.coeffs)
    out = np.empty(len(pts))
    inside = r <= 1.0
    if inside.any():
        Z = zernike_radial_table(mo.m, J, r[inside])
        out[inside] = mo.coeffs @ Z
    if (~inside).any():
        rule = gauss_legendre_01(_radial_rule_size(basis.c, mo.m, J, float(r[~inside].max())))
        s, w = rule.nodes, rule.weights
        R = mo.coeffs @ zernike_radial_table(mo.m, J, s)
        hankel = jv(mo.m, basis.c * np.outer(r[~inside], s)) @ (w * s * R)
        out[~inside] = math.sqrt(basis.c) / mo.gamma * hankel
    out = out * _angular_factor(mo.m, mo.ell, theta)
    return float(out[0]) if np.asarray(x).ndim == 1 else out


def scale_to_data_domain(basis: DiskBasis, k: float) -> ScaledDiskBasis:
    """Map the unit-disk system onto the data disk of radius c / (2k)."""
    if k <= 0.0:
        raise ParameterError("scale_to_data_domain requires k > 0")
    rho = basis.c / (2.0 * k)
    quad = QuadratureRule(rho * basis.quad.nodes, rho**2 * basis.quad.weights)
    node_values = basis.node_values / rho
    node_values.flags.writeable = False
    return ScaledDiskBasis(base=basis, k=float(k), quad=quad, node_values=node_values)


def eval_psi_scaled(scaled: ScaledDiskBasis, mode, x) -> float | np.ndarray:
    """Evaluate a scaled mode psi_scaled(x) = (2k/c) psi(2k x / c) anywhere."""
    rho = scaled.radius
    pts = np.asarray(x, dtype=float)
    return eval_psi(scaled.base, mode, pts / rho) / rho


def with_perturbed_alpha(basis: DiskBasis, index: int, factor: float) -> DiskBasis:
    """Copy of the basis with one alpha scaled by `factor` (for fault-injection checks)."""
    modes = list(basis.modes)
    mo = modes[index]
    modes[index] = replace(mo, alpha=mo.alpha * factor, gamma=mo.gamma * factor)
    return DiskBasis(basis.c, basis.truncation, tuple(modes), basis.quad,
                     basis.node_values, basis.quad_size)
