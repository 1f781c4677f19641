"""Spectral-cutoff projection, prolate Sobolev norms, band-limited
extrapolation, and basis self-validation.

The projector pi_alpha keeps modes with Sturm-Liouville eigenvalue
chi < 1/alpha; for u in the prolate Sobolev space of order s its error obeys
||pi_alpha u - u|| <= alpha^{s/2} ||u||_{H~s}, where the H~s norm weights
squared mode coefficients by chi^s.  The same projector serves the scaled data
disk after the linear change of variables, so no separate implementation is
needed there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disk_basis import DiskBasis, ScaledDiskBasis, eval_psi_scaled
from .errors import ParameterError
from .forward import DataGrid
from .symset_basis import SymSetBasis, analytic_area, mirror_indices

__all__ = [
    "ProjectionReport",
    "project_pi_alpha",
    "sobolev_norm_tilde",
    "projection_error_report",
    "extrapolate",
    "validate_basis",
]


@dataclass(frozen=True)
class ProjectionReport:
    alpha: float
    retained: int
    error_l2: float
    bound: float
    passed: bool


def _disk_like(basis) -> bool:
    return isinstance(basis, (DiskBasis, ScaledDiskBasis))


def _psi_hat(basis) -> np.ndarray:
    return basis.node_values / basis.mode_norms[:, None]


def project_pi_alpha(u: np.ndarray, basis, alpha: float) -> np.ndarray:
    """Spectral cutoff projection of node samples onto {chi < 1/alpha}.

    `u` must be sampled on the basis quadrature.  Works identically for the
    unit-disk basis and its scaled version (the change of variables cancels in
    the normalized projector).  An empty cutoff returns the zero field.
    """
    if alpha <= 0.0:
        raise ParameterError("alpha must be positive")
    if not _disk_like(basis):
        raise ParameterError("project_pi_alpha needs a disk-type basis")
    u = np.asarray(u)
    if u.shape[-1] != len(basis.quad):
        raise ParameterError("samples must live on the basis quadrature")
    chis = np.array([mo.chi for mo in basis.modes])
    keep = chis < 1.0 / alpha
    if not keep.any():
        return np.zeros_like(u)
    psi_hat = _psi_hat(basis)[keep]
    coeffs = psi_hat @ (basis.quad.weights * u)
    return coeffs @ psi_hat


@dataclass(frozen=True)
class SobolevNorm:
    value: float
    tail_fraction: float


def sobolev_norm_tilde(u: np.ndarray, basis, s: float) -> SobolevNorm:
    """Spectral Sobolev norm sqrt(sum chi^s |<u, psi_hat>|^2) over computed modes.

    Also reports the relative mass of u outside the computed span, so a
    truncated mode set cannot silently understate the norm.
    """
    if s < 0.0:
        raise ParameterError("s must be nonnegative")
    if not _disk_like(basis):
        raise ParameterError("sobolev_norm_tilde needs a disk-type basis")
    u = np.asarray(u)
    w = basis.quad.weights
    psi_hat = _psi_hat(basis)
    coeffs = psi_hat @ (w * u)
    chis = np.array([mo.chi for mo in basis.modes])
    value = float(np.sqrt(np.sum(chis**s * np.abs(coeffs) ** 2)))
    unorm2 = float(np.sum(w * np.abs(u) ** 2))
    tail2 = max(unorm2 - float(np.sum(np.abs(coeffs) ** 2)), 0.0)
    tail_fraction = float(np.sqrt(tail2 / unorm2)) if unorm2 > 0 else 0.0
    return SobolevNorm(value=value, tail_fraction=tail_fraction)


def projection_error_report(u: np.ndarray, basis, alpha: float, s: float) -> ProjectionReport:
    """Check ||pi_alpha u - u|| <= alpha^{s/2} ||u||_{H~s} on node samples."""
    proj = project_pi_alpha(u, basis, alpha)
    w = basis.quad.weights
    err = float(np.sqrt(np.sum(w * np.abs(proj - u) ** 2)))
    chis = np.array([mo.chi for mo in basis.modes])
    retained = int(np.sum(chis < 1.0 / alpha))
    bound = alpha ** (s / 2.0) * sobolev_norm_tilde(u, basis, s).value
    return ProjectionReport(alpha=float(alpha), retained=retained, error_l2=err,
                            bound=bound, passed=err <= bound * (1.0 + 1e-10) + 1e-14)


def extrapolate(data: DataGrid, basis: ScaledDiskBasis, targets) -> np.ndarray:
    """Band-limited extension of data off the data disk.

    u_bar(p) = sum_i <u, psi_i>_D / lambda_i^2 * psi_i(p) with lambda_i the
    L2(D) mode norm; inside D this reproduces the band-limited part of the
    data, outside it performs the (ill-posed) analytic extrapolation.
    """
    if not isinstance(basis, ScaledDiskBasis):
        raise ParameterError("extrapolate needs a ScaledDiskBasis")
    if data.nodes.shape != basis.quad.nodes.shape or not np.array_equal(data.nodes, basis.quad.nodes):
        raise ParameterError("data nodes must match the basis quadrature")
    w = data.weights.copy()
    w[~data.valid] = 0.0
    inner = basis.node_values @ (w * data.values)        # <u, psi_i>
    lam2 = basis.mode_norms**2
    pts = np.atleast_2d(np.asarray(targets, dtype=float))
    out = np.zeros(len(pts), dtype=complex)
    for i, mo in enumerate(basis.modes):
        if inner[i] == 0.0:
            continue
        out += (inner[i] / lam2[i]) * eval_psi_scaled(basis, mo, pts)
    return out[0] if np.asarray(targets).ndim == 1 else out


def _check(name: str, residual: float, threshold: float) -> dict:
    return {"check": name, "residual": float(residual), "threshold": float(threshold),
            "passed": bool(residual <= threshold)}


def validate_basis(basis) -> list[dict]:
    """Self-validation report; each entry is {check, residual, threshold, passed}."""
    checks: list[dict] = []
    if _disk_like(basis):
        base = basis.base if isinstance(basis, ScaledDiskBasis) else basis
        c = base.c
        chis = np.array([mo.chi for mo in base.modes])
        lo = np.array([(mo.m + 2 * mo.n) * (mo.m + 2 * mo.n + 2) for mo in base.modes])
        slack = np.maximum(lo - chis, chis - (lo + c * c))
        checks.append(_check("eigenvalue_bracketing", slack.max(), -1e-12))

        w = basis.quad.weights
        vals = basis.node_values
        gram = (vals * w) @ vals.T
        d = np.diag(gram)
        off = np.abs(gram - np.diag(d)) / np.sqrt(np.outer(d, d))
        checks.append(_check("gram_diagonality", off.max(), 1e-8))

        lam2 = basis.mode_norms**2
        checks.append(_check("norm_alpha_consistency", np.abs(d / lam2 - 1.0).max(), 1e-6))

        phases = np.array([mo.alpha * (-1j) ** mo.m for mo in base.modes])
        checks.append(_check("alpha_parity",
                             (np.abs(phases.imag) / np.abs(phases)).max(), 1e-10))

        worst = 0.0
        by_m: dict[int, list] = {}
        for mo in base.modes:
            if mo.ell == 1 and mo.usable:
                by_m.setdefault(mo.m, []).append((mo.n, abs(mo.alpha)))
        for chain in by_m.values():
            chain.sort()
            mags = np.array([a for _, a in chain])
            if len(mags) > 1:
                worst = max(worst, float(((mags[1:] - mags[:-1]) / mags[:-1]).max()))
        checks.append(_check("alpha_monotone_chains", worst, 1e-10))
    elif isinstance(basis, SymSetBasis):
        alphas = basis.alphas
        wrong = np.where(
            np.array([mo.parity == "even" for mo in basis.modes]),
            np.abs(alphas.imag), np.abs(alphas.real),
        )
        checks.append(_check("parity_eigenvalue_type", (wrong / np.abs(alphas)).max(), 1e-12))

        w = basis.quad.weights
        vals = basis.node_values
        gram = (vals * w) @ vals.T
        d = np.diag(gram)
        off = np.abs(gram - np.diag(d)) / np.sqrt(np.outer(d, d))
        checks.append(_check("gram_diagonality", off.max(), 1e-6))

        lam2 = basis.mode_norms**2
        checks.append(_check("norm_alpha_consistency", np.abs(d / lam2 - 1.0).max(), 1e-6))

        total = float(np.sum(basis.spectrum_even**2) + np.sum(basis.spectrum_odd**2))
        sq = basis.quad.total_weight**2
        checks.append(_check("hilbert_schmidt_discrete", abs(total - sq) / sq, 1e-10))
        area2 = analytic_area(basis.geometry) ** 2
        checks.append(_check("hilbert_schmidt_area", abs(total - area2) / area2, 1e-3))

        mirror = mirror_indices(basis.quad)
        worst = 0.0
        for mo in basis.modes:
            sgn = 1.0 if mo.parity == "even" else -1.0
            dev = np.abs(mo.node_values[mirror] - sgn * mo.node_values).max()
            worst = max(worst, dev / np.abs(mo.node_values).max())
        checks.append(_check("parity_node_symmetry", worst, 1e-8))
    else:
        raise ParameterError("validate_basis accepts DiskBasis, ScaledDiskBasis, or SymSetBasis")
    return checks
