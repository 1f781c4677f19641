"""Basis cache files.

Container layout: the ASCII line ``GPSWF1``, one JSON metadata record (which
declares the array names, dtypes, shapes, and a sha256 of the payload), then
the raw little-endian arrays concatenated in declared order.  Round trips are
bit-exact and every load verifies the checksum.
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from .disk_basis import DiskBasis, DiskMode, _mode_node_values
from .errors import CacheError
from .numerics import QuadratureRule, disk_polar_rule
from .symset_basis import Geometry, SymSetBasis, SymSetMode

__all__ = [
    "cache_key",
    "cache_dir",
    "save_disk_basis",
    "load_disk_basis",
    "save_symset_basis",
    "load_symset_basis",
    "load_basis",
]

MAGIC = b"GPSWF1\n"
FORMAT_VERSION = 1


def _quantize(x: float) -> int:
    return int(round(float(x) / 1e-12))


def cache_key(kind: str, **params) -> str:
    """Deterministic cache key: geometry kind plus 1e-12-quantized parameters."""
    parts = [f"v{FORMAT_VERSION}", kind]
    for name in sorted(params):
        v = params[name]
        if isinstance(v, float):
            parts.append(f"{name}={_quantize(v)}")
        elif isinstance(v, (tuple, list)):
            parts.append(f"{name}=" + ",".join(str(_quantize(x)) for x in v))
        else:
            parts.append(f"{name}={v}")
    digest = hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]
    return f"{kind}_{digest}"


def cache_dir(explicit: str | None = None) -> str:
    path = explicit or os.environ.get("PROLATE_CACHE_DIR") or "cache"
    os.makedirs(path, exist_ok=True)
    return path


def _write_container(path, meta: dict, arrays: list[tuple[str, np.ndarray]]) -> None:
    decl = []
    blobs = []
    for name, arr in arrays:
        arr = np.ascontiguousarray(arr)
        dtype = "<f8" if arr.dtype.kind == "f" else ("<c16" if arr.dtype.kind == "c" else "|u1")
        arr = arr.astype(dtype, copy=False)
        decl.append([name, dtype, list(arr.shape)])
        blobs.append(arr.tobytes())
    payload = b"".join(blobs)
    meta = dict(meta)
    meta["format"] = FORMAT_VERSION
    meta["arrays"] = decl
    meta["payload_sha256"] = hashlib.sha256(payload).hexdigest()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(json.dumps(meta, sort_keys=True).encode("utf-8") + b"\n")
        f.write(payload)


def _read_container(path) -> tuple[dict, dict]:
    with open(path, "rb") as f:
        if f.readline() != MAGIC:
            raise CacheError(f"{path}: not a GPSWF1 container")
        try:
            meta = json.loads(f.readline().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CacheError(f"{path}: bad metadata record") from exc
        payload = f.read()
    if hashlib.sha256(payload).hexdigest() != meta.get("payload_sha256"):
        raise CacheError(f"{path}: payload checksum mismatch")
    arrays = {}
    offset = 0
    for name, dtype, shape in meta["arrays"]:
        n = int(np.prod(shape)) * np.dtype(dtype).itemsize
        arrays[name] = np.frombuffer(payload[offset:offset + n], dtype=dtype).reshape(shape).copy()
        offset += n
    if offset != len(payload):
        raise CacheError(f"{path}: payload length mismatch")
    return meta, arrays


def save_disk_basis(path, basis: DiskBasis) -> None:
    meta = {
        "geometry": "disk",
        "c": basis.c,
        "m_max": max(mo.m for mo in basis.modes),
        "n_max": max(mo.n for mo in basis.modes),
        "J": basis.truncation,
        "quad_size": list(basis.quad_size),
        "modes": [[mo.m, mo.n, mo.ell, int(mo.usable)] for mo in basis.modes],
    }
    chi = np.array([mo.chi for mo in basis.modes])
    gamma = np.array([mo.gamma for mo in basis.modes])
    alpha = np.array([[mo.alpha.real, mo.alpha.imag] for mo in basis.modes])
    coeffs = np.array([mo.coeffs for mo in basis.modes])
    _write_container(path, meta, [("chi", chi), ("gamma", gamma), ("alpha", alpha),
                                  ("coeffs", coeffs)])


def load_disk_basis(path) -> DiskBasis:
    meta, arrays = _read_container(path)
    if meta.get("geometry") != "disk":
        raise CacheError(f"{path}: not a disk basis file")
    modes = []
    for i, (m, n, ell, usable) in enumerate(meta["modes"]):
        coeffs = arrays["coeffs"][i]
        coeffs.flags.writeable = False
        modes.append(DiskMode(
            m=int(m), n=int(n), ell=int(ell),
            chi=float(arrays["chi"][i]), gamma=float(arrays["gamma"][i]),
            alpha=complex(arrays["alpha"][i, 0], arrays["alpha"][i, 1]),
            coeffs=coeffs, usable=bool(usable),
        ))
    n_r, n_t = meta["quad_size"]
    quad = disk_polar_rule(1.0, n_r, n_t)
    node_values = _mode_node_values(modes, quad, n_r, n_t, meta["J"])
    node_values.flags.writeable = False
    return DiskBasis(c=float(meta["c"]), truncation=int(meta["J"]), modes=tuple(modes),
                     quad=quad, node_values=node_values, quad_size=(n_r, n_t))


_GEO_LABEL = {"disk": "disk", "limited_aperture": "L", "multi_freq": "M"}
_LABEL_GEO = {v: k for k, v in _GEO_LABEL.items()}


def save_symset_basis(path, basis: SymSetBasis) -> None:
    meta = {
        "geometry": _GEO_LABEL[basis.geometry.kind],
        "geometry_params": basis.geometry.to_dict(),
        "c": basis.c,
        "n_modes": len(basis.modes),
        "n_nodes": len(basis.quad),
        "complete": basis.complete,
    }
    parity = np.array([0 if mo.parity == "even" else 1 for mo in basis.modes], dtype=np.uint8)
    alpha = np.array([[mo.alpha.real, mo.alpha.imag] for mo in basis.modes])
    _write_container(path, meta, [
        ("nodes", basis.quad.nodes),
        ("weights", basis.quad.weights),
        ("parity", parity),
        ("alpha", alpha),
        ("node_values", basis.node_values),
        ("spectrum_even", basis.spectrum_even),
        ("spectrum_odd", basis.spectrum_odd),
    ])


def load_symset_basis(path) -> SymSetBasis:
    meta, arrays = _read_container(path)
    if meta.get("geometry") not in _LABEL_GEO:
        raise CacheError(f"{path}: not a symmetric-set basis file")
    geometry = Geometry.from_dict(meta["geometry_params"])
    quad = QuadratureRule(arrays["nodes"], arrays["weights"])
    modes = []
    for i in range(meta["n_modes"]):
        vals = arrays["node_values"][i]
        vals.flags.writeable = False
        modes.append(SymSetMode(
            parity="even" if arrays["parity"][i] == 0 else "odd",
            alpha=complex(arrays["alpha"][i, 0], arrays["alpha"][i, 1]),
            node_values=vals,
        ))
    return SymSetBasis(c=float(meta["c"]), geometry=geometry, quad=quad, modes=tuple(modes),
                       spectrum_even=arrays["spectrum_even"], spectrum_odd=arrays["spectrum_odd"],
                       complete=bool(meta["complete"]))


def load_basis(path):
    """Load either basis kind, dispatching on the metadata layout."""
    meta, _ = _read_container(path)
    if "geometry_params" in meta:
        return load_symset_basis(path)
    return load_disk_basis(path)
