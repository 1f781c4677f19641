"""Picard-criterion reconstruction and spectral-cutoff regularization.

Full aperture: the data expands in the scaled disk modes and each coefficient
is q_i = (2k/c)^2 <u, psi_hat_i> / alpha_i; the regularized inverse keeps the
index set J(alpha) = {chi_i < 1/alpha} and its noise amplification is
controlled by beta(alpha) = min over J(alpha) of (c/2k)^2 |alpha_i|.

Partial data (limited aperture / multi-frequency): with operator eigenvalues
mu_n = h^2 alpha_n and mode norms lambda_n = (c/2pi)|alpha_n|, the spectral
cutoff keeps |mu_n| > alpha and inverts mode by mode; the a-priori parameter
choice alpha(delta) = c0 (delta/E)^(1/(1+sigma)) balances noise against a
source condition of order sigma.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .disk_basis import ScaledDiskBasis, eval_psi_scaled
from .errors import DataCoverageError, EmptyCutoffError, ParameterError
from .forward import DataGrid
from .symset_basis import SymSetBasis, eval_symset_psi

__all__ = [
    "ReconstructionResult",
    "picard_coefficients",
    "beta_of_alpha",
    "reconstruct_full",
    "reconstruct_partial",
    "choose_alpha_partial",
    "write_result",
    "read_result",
]

MAX_MISSING_WEIGHT = 0.10


@dataclass(frozen=True)
class ReconstructionResult:
    """Retained-mode coefficients, cutoff bookkeeping, and a field evaluator."""

    coefficients: np.ndarray          # complex, aligned with cutoff_set
    cutoff_set: list                  # retained mode identifiers
    beta_alpha: float | None          # full aperture only
    alpha: float
    node_field: np.ndarray            # reconstruction sampled on the basis quadrature
    field: Callable[[np.ndarray], np.ndarray]
    diagnostics: dict = field(default_factory=dict)


def _check_nodes(data: DataGrid, quad_nodes: np.ndarray) -> None:
    if data.nodes.shape != quad_nodes.shape or not np.array_equal(data.nodes, quad_nodes):
        raise ParameterError("data nodes must match the basis quadrature bitwise")


def _effective_weights(data: DataGrid) -> np.ndarray:
    """Weights with missing nodes zeroed; refuses if too much weight is missing."""
    missing = float(data.weights[~data.valid].sum())
    if missing > MAX_MISSING_WEIGHT * float(data.weights.sum()):
        raise DataCoverageError(
            f"missing nodes carry {missing:.3g} of {data.weights.sum():.3g} total weight"
        )
    w = data.weights.copy()
    w[~data.valid] = 0.0
    return w


def _normalized_values(basis) -> tuple[np.ndarray, np.ndarray]:
    """(psi_hat node values, mu) for either basis kind."""
    if isinstance(basis, ScaledDiskBasis):
        norms = basis.mode_norms
        mu = basis.eigenvalues
        return basis.node_values / norms[:, None], mu
    if isinstance(basis, SymSetBasis):
        norms = basis.mode_norms
        mu = basis.mu
        return basis.node_values / norms[:, None], mu
    raise ParameterError("basis must be a ScaledDiskBasis or SymSetBasis")


def picard_coefficients(data: DataGrid, basis) -> np.ndarray:
    """Per-mode expansion coefficients of the contrast, <u, psi_hat> / mu.

    For the scaled disk basis mu = (c/2k)^2 alpha equals (2k/c)^2 / alpha times
    the norm bookkeeping of the Picard series; for symmetric sets mu = h^2
    alpha_n.  Inner products use the basis quadrature with missing-flagged
    nodes' weight excluded.
    """
    psi_hat, mu = _normalized_values(basis)
    _check_nodes(data, _basis_quad(basis).nodes)
    if np.any(mu == 0.0):
        raise ParameterError("basis contains a zero eigenvalue")
    w = _effective_weights(data)
    inner = psi_hat @ (w * data.values)
    return inner / mu


def _basis_quad(basis):
    return basis.quad


def beta_of_alpha(basis: ScaledDiskBasis, alpha: float) -> float:
    """Smallest retained |(c/2k)^2 alpha_i| over J(alpha) = {chi_i < 1/alpha}."""
    if alpha <= 0.0:
        raise ParameterError("alpha must be positive")
    chis = np.array([mo.chi for mo in basis.modes])
    keep = chis < 1.0 / alpha
    if not keep.any():
        raise EmptyCutoffError(f"no modes with chi < {1.0 / alpha:.6g}")
    return float(np.min(np.abs(basis.eigenvalues[keep])))


def _result(basis, keep: np.ndarray, coeffs: np.ndarray, data: DataGrid, alpha: float,
            beta: float | None, ids: list, realify: bool) -> ReconstructionResult:
    psi_hat, mu = _normalized_values(basis)
    node_field = coeffs @ psi_hat[keep]
    w = _effective_weights(data)
    predicted = (coeffs * mu[keep]) @ psi_hat[keep]
    unorm = np.sqrt(np.sum(w * np.abs(data.values) ** 2))
    residual = float(np.sqrt(np.sum(w * np.abs(predicted - data.values) ** 2))
                     / unorm) if unorm > 0 else 0.0
    diagnostics = {
        "residual": residual,
        "mode_count": int(keep.sum()),
        "delta": data.meta.get("delta_abs", data.meta.get("delta", 0.0)),
    }
    if realify:
        diagnostics["dropped_imag_norm"] = float(np.sqrt(np.sum(w * node_field.imag**2)))
        node_field = node_field.real

    keep_idx = np.nonzero(keep)[0]

    if isinstance(basis, ScaledDiskBasis):
        norms = basis.mode_norms

        def field_eval(x):
            pts = np.atleast_2d(np.asarray(x, dtype=float))
            acc = np.zeros(len(pts), dtype=complex)
            for c_i, i in zip(coeffs, keep_idx):
                acc += c_i / norms[i] * eval_psi_scaled(basis, basis.modes[i], pts)
            out = acc.real if realify else acc
            return out[0] if np.asarray(x).ndim == 1 else out
    else:
        norms = basis.mode_norms

        def field_eval(x):
            pts = np.atleast_2d(np.asarray(x, dtype=float))
            acc = np.zeros(len(pts), dtype=complex)
            for c_i, i in zip(coeffs, keep_idx):
                acc += c_i / norms[i] * eval_symset_psi(basis, i, pts)
            out = acc.real if realify else acc
            return out[0] if np.asarray(x).ndim == 1 else out

    return ReconstructionResult(coefficients=coeffs, cutoff_set=ids, beta_alpha=beta,
                                alpha=float(alpha), node_field=node_field, field=field_eval,
                                diagnostics=diagnostics)


def reconstruct_full(data: DataGrid, basis: ScaledDiskBasis, alpha: float,
                     realify: bool = False) -> ReconstructionResult:
    """Spectral-cutoff regularized reconstruction on the data disk.

    Keeps modes with chi < 1/alpha (strict), computes Picard coefficients, and
    returns the field q = sum coeff_i psi_hat_i together with beta(alpha).
    """
    beta = beta_of_alpha(basis, alpha)  # raises on empty cutoff
    chis = np.array([mo.chi for mo in basis.modes])
    keep = chis < 1.0 / alpha
    coeffs = picard_coefficients(data, basis)[keep]
    ids = [list(basis.modes[i].key) for i in np.nonzero(keep)[0]]
    return _result(basis, keep, coeffs, data, alpha, beta, ids, realify)


def reconstruct_partial(data: DataGrid, basis: SymSetBasis, alpha: float,
                        realify: bool = False) -> ReconstructionResult:
    """Spectral-cutoff reconstruction for symmetric-set data: keep |mu_n| > alpha."""
    if alpha < 0.0:
        raise ParameterError("alpha must be nonnegative")
    keep = np.abs(basis.mu) > alpha
    if not keep.any():
        raise EmptyCutoffError(f"no modes with |mu| > {alpha:.6g}")
    coeffs = picard_coefficients(data, basis)[keep]
    ids = [int(i) for i in np.nonzero(keep)[0]]
    return _result(basis, keep, coeffs, data, alpha, None, ids, realify)


def choose_alpha_partial(delta: float, E: float, sigma: float, c0: float) -> float:
    """A-priori cutoff alpha(delta) = c0 (delta / E)^(1 / (1 + sigma))."""
    if min(delta, E, sigma, c0) <= 0.0:
        raise ParameterError("choose_alpha_partial requires positive arguments")
    return float(c0 * (delta / E) ** (1.0 / (1.0 + sigma)))


def write_result(path, result: ReconstructionResult) -> None:
    payload = {
        "alpha": result.alpha,
        "beta_alpha": result.beta_alpha,
        "delta": result.diagnostics.get("delta", 0.0),
        "diagnostics": {k: v for k, v in result.diagnostics.items() if k != "delta"},
        "modes": [
            {"id": mid, "coeff_re": float(np.real(cf)), "coeff_im": float(np.imag(cf))}
            for mid, cf in zip(result.cutoff_set, result.coefficients)
        ],
    }
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def read_result(path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_field_csv(path, points: np.ndarray, values: np.ndarray) -> None:
    values = np.asarray(values)
    with open(path, "w", encoding="utf-8") as f:
        f.write("x,y,q\n")
        for (x, y), v in zip(points, values):
            q = float(np.real(v)) if np.iscomplexobj(values) else float(v)
            f.write(f"{float(x)!r},{float(y)!r},{q!r}\n")
