"""Command-line surface: basis caching, data synthesis, ingestion,
reconstruction, extrapolation, validation, and the stability experiment.

Exit codes: 0 success, 1 computation failure, 2 bad configuration or
arguments.  All outputs are deterministic for a fixed configuration and seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import cache as cachemod
from .analysis import extrapolate, validate_basis
from .disk_basis import DiskBasis, compute_disk_basis, default_truncation, scale_to_data_domain
from .errors import ParameterError, ProlateError
from .forward import add_noise, ingest_farfield, read_datagrid, synthesize_born, write_datagrid
from .geometry_config import ProblemSetup, effective_kernel_scale, read_setup, validate_setup
from .recon import (beta_of_alpha, choose_alpha_partial, reconstruct_full, reconstruct_partial,
                    write_field_csv, write_result)
from .symset_basis import Geometry, SymSetBasis, build_quadrature, compute_symset_basis

__all__ = ["run", "main", "experiment_stability"]


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prolate",
                                description="Prolate bases for Born inverse scattering")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("basis", help="compute and cache a basis")
    bsub = b.add_subparsers(dest="basis_kind", required=True)
    bd = bsub.add_parser("disk")
    bd.add_argument("--c", type=float, required=True)
    bd.add_argument("--m-max", type=int, required=True)
    bd.add_argument("--n-max", type=int, required=True)
    bd.add_argument("--truncation", type=int, default=None)
    bd.add_argument("-o", "--out-dir", default=None)
    bs = bsub.add_parser("symset")
    bs.add_argument("--geometry", choices=["disk", "L", "M"], required=True)
    bs.add_argument("--c", type=float, required=True)
    bs.add_argument("--h", type=float, default=1.0)
    bs.add_argument("--radius", type=float, default=1.0)
    bs.add_argument("--theta", type=float, default=None)
    bs.add_argument("--x-star", default="1,0")
    bs.add_argument("--resolution", type=int, default=120)
    bs.add_argument("--modes", type=int, default=40)
    bs.add_argument("--method", choices=["auto", "midpoint", "polar"], default="auto")
    bs.add_argument("-o", "--out-dir", default=None)

    s = sub.add_parser("synthesize", help="setup file -> Born data on basis nodes")
    s.add_argument("setup")
    s.add_argument("--basis", required=True)
    s.add_argument("-o", "--out", required=True)
    s.add_argument("--noise", type=float, default=0.0, help="relative noise level")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--contrast-resolution", type=int, default=160)

    i = sub.add_parser("ingest", help="far-field CSV -> Born data on basis nodes")
    i.add_argument("samples")
    i.add_argument("--k", type=float, required=True)
    i.add_argument("--basis", required=True)
    i.add_argument("--cutoff", type=float, default=None)
    i.add_argument("-o", "--out", required=True)

    r = sub.add_parser("reconstruct", help="DataGrid + basis -> contrast coefficients")
    r.add_argument("data")
    r.add_argument("--basis", required=True)
    r.add_argument("--alpha", type=float, default=None)
    r.add_argument("--auto-alpha", action="store_true",
                   help="use the a-priori rule alpha = c0 (delta/E)^(1/(1+sigma))")
    r.add_argument("--delta", type=float, default=None)
    r.add_argument("--E", type=float, default=None)
    r.add_argument("--sigma", type=float, default=None)
    r.add_argument("--c0", type=float, default=None)
    r.add_argument("--realify", action="store_true")
    r.add_argument("-o", "--out", required=True)
    r.add_argument("--field-out", default=None)
    r.add_argument("--field-grid", type=int, default=64)

    e = sub.add_parser("extrapolate", help="band-limited extension of data")
    e.add_argument("data")
    e.add_argument("--basis", required=True)
    e.add_argument("--targets", required=True, help="CSV with header x,y")
    e.add_argument("-o", "--out", required=True)

    v = sub.add_parser("validate", help="basis self-validation report")
    v.add_argument("--basis", required=True)
    v.add_argument("-o", "--out", required=True)

    st = sub.add_parser("stability", help="noise/cutoff sweep: error vs bound table")
    st.add_argument("setup")
    st.add_argument("--basis", required=True)
    st.add_argument("--deltas", required=True, help="comma-separated absolute noise norms")
    st.add_argument("--alphas", required=True, help="comma-separated cutoffs")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--seeds", type=int, default=1, help="average errors over this many seeds")
    st.add_argument("--contrast-resolution", type=int, default=160)
    st.add_argument("-o", "--out", required=True)
    return p


def _basis_cache_path(args) -> tuple[str, dict]:
    out_dir = cachemod.cache_dir(args.out_dir)
    if args.basis_kind == "disk":
        J = args.truncation if args.truncation is not None else default_truncation(args.c, args.n_max)
        key = cachemod.cache_key("disk", c=args.c, m_max=args.m_max, n_max=args.n_max, J=J)
        params = {"J": J}
    else:
        geo = _geometry_from_args(args)
        key = cachemod.cache_key(
            f"symset-{args.geometry}", c=args.c, h=args.h, resolution=args.resolution,
            modes=args.modes, method=args.method,
            radius=args.radius if args.geometry == "disk" else 0.0,
            theta=args.theta or 0.0,
            x_star=geo.x_star if args.geometry == "M" else (0.0, 0.0),
        )
        params = {"geometry": geo}
    return os.path.join(out_dir, key + ".gpswf"), params


def _geometry_from_args(args) -> Geometry:
    if args.geometry == "disk":
        return Geometry.disk(radius=args.radius, h=args.h)
    if args.geometry == "L":
        if args.theta is None:
            raise ParameterError("geometry L requires --theta")
        return Geometry.limited_aperture(args.theta, h=args.h)
    x = [float(t) for t in args.x_star.split(",")]
    return Geometry.multi_freq(x, h=args.h)


def _cmd_basis(args) -> int:
    path, params = _basis_cache_path(args)
    if os.path.exists(path):
        try:
            cachemod.load_basis(path)
            print(path)
            return 0
        except ProlateError:
            pass  # checksum mismatch: recompute below, never trust a corrupt cache
    if args.basis_kind == "disk":
        basis = compute_disk_basis(args.c, args.m_max, args.n_max, truncation=params["J"])
        cachemod.save_disk_basis(path, basis)
    else:
        geo = params["geometry"]
        quad = build_quadrature(geo, args.resolution, method=args.method)
        basis = compute_symset_basis(args.c, geo, quad, args.modes)
        cachemod.save_symset_basis(path, basis)
    print(path)
    return 0


def _load_basis_for_setup(path: str, setup: ProblemSetup):
    """Pair a cached basis with a setup, scaling disk bases onto the data disk."""
    basis = cachemod.load_basis(path)
    if isinstance(basis, DiskBasis):
        if setup.regime != "full":
            raise ParameterError("disk basis files pair with the full-aperture regime")
        if abs(basis.c - setup.bandwidth) > 1e-9 * max(1.0, setup.bandwidth):
            raise ParameterError(
                f"basis bandwidth {basis.c} does not match setup c_F {setup.bandwidth}")
        return scale_to_data_domain(basis, setup.k)
    if setup.regime == "full":
        raise ParameterError("full-aperture regime needs a disk basis file")
    if abs(basis.c - setup.bandwidth) > 1e-9 * max(1.0, setup.bandwidth):
        raise ParameterError("basis bandwidth does not match the setup c parameter")
    want = setup.data_geometry()
    got = basis.geometry
    same = got.kind == want.kind and abs(got.h - want.h) <= 1e-9 * want.h
    if same and want.kind == "limited_aperture":
        same = abs(got.theta - want.theta) <= 1e-9
    if same and want.kind == "multi_freq":
        same = math.hypot(got.x_star[0] - want.x_star[0],
                          got.x_star[1] - want.x_star[1]) <= 1e-9
    if not same:
        raise ParameterError(
            f"basis geometry {got.to_dict()} does not match the setup domain {want.to_dict()}")
    return basis


def _cmd_synthesize(args) -> int:
    setup = read_setup(args.setup, contrast_resolution=args.contrast_resolution)
    report = validate_setup(setup)
    if not report.ok:
        raise ParameterError(
            f"contrast support is not contained in the data domain "
            f"(margin {report.margin:.4g}, {len(report.violations)} offending points)")
    basis = _load_basis_for_setup(args.basis, setup)
    kappa = effective_kernel_scale(setup)
    data = synthesize_born(setup.contrast, kappa, basis.quad, geometry=setup.data_geometry())
    if args.noise > 0.0:
        data = add_noise(data, args.noise, args.seed)
        print(f"noise: relative {args.noise!r}, absolute {data.meta['delta_abs']!r}")
    write_datagrid(args.out, data)
    print(args.out)
    return 0


def _cmd_ingest(args) -> int:
    basis = cachemod.load_basis(args.basis)
    if isinstance(basis, DiskBasis):
        raise ParameterError("ingest requires a symset basis or a scaled target; "
                             "build a symset disk basis for full-aperture targets")
    samples = []
    with open(args.samples, "r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        if header[:6] != ["xhat_x", "xhat_y", "thetahat_x", "thetahat_y", "re", "im"]:
            raise ParameterError(f"unexpected far-field columns {header}")
        for line in f:
            if not line.strip():
                continue
            t = [float(v) for v in line.strip().split(",")]
            samples.append(((t[0], t[1]), (t[2], t[3]), complex(t[4], t[5])))
    data = ingest_farfield(samples, args.k, basis.quad, cutoff=args.cutoff,
                           geometry=basis.geometry)
    write_datagrid(args.out, data)
    print(args.out)
    return 0


def _cmd_reconstruct(args) -> int:
    data = read_datagrid(args.data)
    basis = cachemod.load_basis(args.basis)
    if isinstance(basis, DiskBasis):
        if data.geometry is None or data.geometry.kind != "disk":
            raise ParameterError("data was not produced on a scaled disk domain")
        k = basis.c / (2.0 * data.geometry.h)
        basis = scale_to_data_domain(basis, k)
        partial = False
    else:
        partial = True
    if args.auto_alpha:
        for name in ("delta", "E", "sigma", "c0"):
            if getattr(args, name) is None:
                raise ParameterError("--auto-alpha requires --delta --E --sigma --c0")
        alpha = choose_alpha_partial(args.delta, args.E, args.sigma, args.c0)
    elif args.alpha is not None:
        alpha = args.alpha
    else:
        raise ParameterError("reconstruct requires --alpha or --auto-alpha")
    if partial:
        result = reconstruct_partial(data, basis, alpha, realify=args.realify)
    else:
        result = reconstruct_full(data, basis, alpha, realify=args.realify)
    write_result(args.out, result)
    if args.field_out:
        if partial:
            b = 2.0 * basis.geometry.h
        else:
            b = basis.radius
        g = np.linspace(-b, b, args.field_grid)
        X, Y = np.meshgrid(g, g, indexing="ij")
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        write_field_csv(args.field_out, pts, result.field(pts))
    print(args.out)
    return 0


def _cmd_extrapolate(args) -> int:
    data = read_datagrid(args.data)
    basis = cachemod.load_basis(args.basis)
    if not isinstance(basis, DiskBasis):
        raise ParameterError("extrapolate requires a disk basis file")
    if data.geometry is None or data.geometry.kind != "disk":
        raise ParameterError("data was not produced on a scaled disk domain")
    k = basis.c / (2.0 * data.geometry.h)
    scaled = scale_to_data_domain(basis, k)
    targets = []
    with open(args.targets, "r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        if header[:2] != ["x", "y"]:
            raise ParameterError(f"unexpected target columns {header}")
        for line in f:
            if line.strip():
                t = line.strip().split(",")
                targets.append((float(t[0]), float(t[1])))
    targets = np.array(targets)
    values = extrapolate(data, scaled, targets)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write("x,y,re,im\n")
        for (x, y), v in zip(targets, values):
            f.write(f"{float(x)!r},{float(y)!r},{float(v.real)!r},{float(v.imag)!r}\n")
    print(args.out)
    return 0


def _cmd_validate(args) -> int:
    basis = cachemod.load_basis(args.basis)
    report = validate_basis(basis)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(json.dumps(report, sort_keys=True, indent=1) + "\n")
    print(args.out)
    return 0 if all(c["passed"] for c in report) else 1


def experiment_stability(setup: ProblemSetup, basis, deltas, alphas, seed: int,
                         n_seeds: int = 1) -> list[dict]:
    """Sweep (delta, alpha): synthesize, perturb, reconstruct, compare to the bound.

    deltas are absolute noise norms; each row reports the seed-averaged
    reconstruction error ||q_rec - q|| on the data domain and the bound
    delta / beta(alpha) + truncation error, where the truncation term is the
    noise-free reconstruction error (the spectral-cutoff projection error of
    the contrast, up to quadrature), so every row obeys error <= bound.
    """
    kappa = effective_kernel_scale(setup)
    clean = synthesize_born(setup.contrast, kappa, basis.quad, geometry=setup.data_geometry())
    u_norm = clean.weighted_norm()
    q_nodes = setup.contrast.evaluate(basis.quad.nodes)
    w = basis.quad.weights
    partial = isinstance(basis, SymSetBasis)
    reconstruct = reconstruct_partial if partial else reconstruct_full

    def err_of(grid, alpha):
        rec = reconstruct(grid, basis, alpha)
        return float(np.sqrt(np.sum(w * np.abs(rec.node_field - q_nodes) ** 2)))

    rows = []
    for alpha in alphas:
        trunc_err = err_of(clean, alpha)
        if partial:
            rate = 1.0 / alpha if alpha > 0 else np.inf
        else:
            rate = 1.0 / beta_of_alpha(basis, alpha)
        for delta in deltas:
            if delta > 0:
                errs = [err_of(add_noise(clean, delta / u_norm, seed + s), alpha)
                        for s in range(n_seeds)]
            else:
                errs = [trunc_err]
            rows.append({"delta": float(delta), "alpha": float(alpha),
                         "error": float(np.mean(errs)),
                         "bound": float(delta * rate + trunc_err)})
    rows.sort(key=lambda r: (r["delta"], -r["alpha"]))
    return rows


def _cmd_stability(args) -> int:
    setup = read_setup(args.setup, contrast_resolution=args.contrast_resolution)
    basis = _load_basis_for_setup(args.basis, setup)
    deltas = [float(t) for t in args.deltas.split(",")]
    alphas = [float(t) for t in args.alphas.split(",")]
    rows = experiment_stability(setup, basis, deltas, alphas, args.seed, args.seeds)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write("delta,alpha,error,bound\n")
        for r in rows:
            f.write(f"{r['delta']!r},{r['alpha']!r},{r['error']!r},{r['bound']!r}\n")
    print(args.out)
    return 0


def run(argv) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    handlers = {
        "basis": _cmd_basis,
        "synthesize": _cmd_synthesize,
        "ingest": _cmd_ingest,
        "reconstruct": _cmd_reconstruct,
        "extrapolate": _cmd_extrapolate,
        "validate": _cmd_validate,
        "stability": _cmd_stability,
    }
    try:
        return handlers[args.command](args)
    except (ParameterError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ProlateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
