"""Problem setup: binds the contrast, the data geometry, and the scale
parameters, and validates the containment precondition Omega inside D.

The data domain is D = A_h with h = c_F/(2k) (full aperture disk), c_L/k
(limited aperture), or c_M/K (multi-frequency); in every regime the effective
kernel scale kappa satisfies kappa * h^2 = c, the bandwidth handed to the
basis computation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .forward import ContrastField
from .symset_basis import Geometry, membership, radial_profile

__all__ = [
    "ProblemSetup",
    "SetupReport",
    "validate_setup",
    "effective_kernel_scale",
    "read_setup",
    "setup_from_dict",
]

REGIMES = ("full", "limited", "multifreq")
DEFAULT_MARGIN_FACTOR = 1.1


@dataclass(frozen=True)
class ProblemSetup:
    """One inverse-problem instance: contrast, regime, and scale bookkeeping."""

    contrast: ContrastField
    regime: str
    k: float                      # wavenumber (K in the multi-frequency regime)
    c_param: float                # c_F, c_L, or c_M
    theta: float | None = None    # limited aperture half-angle
    x_star: tuple | None = None   # multi-frequency observation direction
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ParameterError(f"regime must be one of {REGIMES}")
        if self.k <= 0.0 or self.c_param <= 0.0:
            raise ParameterError("wavenumber and c parameter must be positive")
        if self.regime == "limited":
            if self.theta is None or not 0.0 < self.theta < math.pi:
                raise ParameterError("limited regime needs theta in (0, pi)")
        if self.regime == "multifreq":
            if self.x_star is None:
                raise ParameterError("multifreq regime needs x_star")
            if abs(math.hypot(*self.x_star) - 1.0) > 1e-9:
                raise ParameterError("x_star must be a unit vector")

    @property
    def h(self) -> float:
        if self.regime == "full":
            return self.c_param / (2.0 * self.k)
        return self.c_param / self.k

    @property
    def bandwidth(self) -> float:
        """The c passed to the basis; equals kernel scale times h^2."""
        return self.c_param

    def data_geometry(self) -> Geometry:
        if self.regime == "full":
            return Geometry.disk(radius=1.0, h=self.h)
        if self.regime == "limited":
            return Geometry.limited_aperture(self.theta, h=self.h)
        return Geometry.multi_freq(self.x_star, h=self.h)


def effective_kernel_scale(setup: ProblemSetup) -> float:
    """4k^2/c_F, k^2/c_L, or K^2/c_M depending on the regime."""
    if setup.regime == "full":
        return 4.0 * setup.k**2 / setup.c_param
    return setup.k**2 / setup.c_param


@dataclass(frozen=True)
class SetupReport:
    ok: bool
    margin: float
    violations: list


def validate_setup(setup: ProblemSetup, n_samples: int = 1024) -> SetupReport:
    """Check Omega inside D by sampling the support boundary.

    Every sampled point must pass the data-domain membership oracle; the
    reported margin is the tightest radial distance h rho(phi) - |p| over the
    samples (negative at a violation since all domains are star-shaped).
    """
    if n_samples < 1000:
        n_samples = 1000
    pts = setup.contrast.boundary_points(n_samples)
    geo = setup.data_geometry()
    inside = membership(geo, pts)
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    margins = geo.h * radial_profile(geo, phi) - np.hypot(pts[:, 0], pts[:, 1])
    violations = [[float(x), float(y)] for (x, y) in pts[~inside]]
    return SetupReport(ok=bool(inside.all()), margin=float(margins.min()),
                       violations=violations)


def default_c_full(contrast: ContrastField, k: float) -> float:
    """Minimal full-aperture c with a 10 percent containment margin."""
    return 2.0 * k * DEFAULT_MARGIN_FACTOR * contrast.circumradius()


def setup_from_dict(cfg: dict, contrast_resolution: int = 160) -> ProblemSetup:
    regime = cfg["regime"]
    contrast = ContrastField.from_config(cfg["contrast"], resolution=contrast_resolution)
    if regime == "full":
        k = float(cfg["k"])
        c_param = cfg.get("c_param")
        c_param = default_c_full(contrast, k) if c_param is None else float(c_param)
        return ProblemSetup(contrast=contrast, regime="full", k=k, c_param=c_param)
    if regime == "limited":
        if cfg.get("c_param") is None:
            raise ParameterError("limited regime requires an explicit c_param")
        return ProblemSetup(contrast=contrast, regime="limited", k=float(cfg["k"]),
                            c_param=float(cfg["c_param"]), theta=float(cfg["theta"]))
    if regime == "multifreq":
        if cfg.get("c_param") is None:
            raise ParameterError("multifreq regime requires an explicit c_param")
        x_star = cfg["x_star"]
        return ProblemSetup(contrast=contrast, regime="multifreq", k=float(cfg["K"]),
                            c_param=float(cfg["c_param"]),
                            x_star=(float(x_star[0]), float(x_star[1])))
    raise ParameterError(f"unknown regime {regime!r}")


def read_setup(path, contrast_resolution: int = 160) -> ProblemSetup:
    with open(path, "r", encoding="utf-8") as f:
        return setup_from_dict(json.load(f), contrast_resolution=contrast_resolution)
