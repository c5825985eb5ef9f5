"""Uniformly sampled fields and the on-disk grid format.

A grid file is raw little-endian float64 (re, im) pairs in row-major order,
accompanied by a JSON sidecar ``<name>.json`` holding
``{m, origin, spacing, shape, field_kind}`` plus optional metadata.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class GridField:
    origin: np.ndarray
    spacing: np.ndarray
    values: np.ndarray
    field_kind: str = "function"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        m = self.values.ndim
        self.origin = np.broadcast_to(np.asarray(self.origin, dtype=float), (m,)).copy()
        self.spacing = np.broadcast_to(np.asarray(self.spacing, dtype=float), (m,)).copy()
        if np.any(self.spacing <= 0):
            raise ValueError("grid spacing must be positive")

    @property
    def m(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self) -> list[np.ndarray]:
        return [o + h * np.arange(k) for o, h, k in zip(self.origin, self.spacing, self.shape)]

    def points(self) -> np.ndarray:
        """Array of shape (*shape, m) with the coordinates of every node."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def with_values(self, values, field_kind: str | None = None) -> "GridField":
        return GridField(self.origin, self.spacing, values,
                         self.field_kind if field_kind is None else field_kind, dict(self.meta))

    @classmethod
    def centered(cls, shape, half_width, field_kind: str = "function") -> "GridField":
        """Grid with nodes -L + k h, h = 2L / N (symmetric about 0 up to one node)."""
        shape = tuple(np.atleast_1d(shape).astype(int))
        L = np.broadcast_to(np.asarray(half_width, dtype=float), (len(shape),))
        h = 2 * L / np.array(shape)
        return cls(-L, h, np.zeros(shape, dtype=complex), field_kind)

    @classmethod
    def sample(cls, fn, shape, half_width, field_kind: str = "function") -> "GridField":
        g = cls.centered(shape, half_width, field_kind)
        g.values = np.asarray(fn(g.points()), dtype=complex)
        return g

    def inner(self, other: "GridField") -> complex:
        return complex(np.sum(self.values * np.conj(other.values)) * self.cell_volume)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.cell_volume))

    # persistence ------------------------------------------------------------
    def descriptor(self) -> dict:
        d = {"m": self.m, "origin": self.origin.tolist(), "spacing": self.spacing.tolist(),
             "shape": list(self.shape), "field_kind": self.field_kind}
        if self.meta:
            d["meta"] = self.meta
        return d

    def to_bytes(self) -> bytes:
        pairs = np.empty(self.values.size * 2, dtype="<f8")
        flat = self.values.reshape(-1)
        pairs[0::2] = flat.real
        pairs[1::2] = flat.imag
        return pairs.tobytes()

    def save(self, path) -> tuple[Path, Path]:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.to_bytes())
        side = path.with_suffix(path.suffix + ".json")
        side.write_text(json.dumps(self.descriptor(), indent=2, sort_keys=True))
        return path, side

    @classmethod
    def load(cls, path) -> "GridField":
        path = Path(path)
        side = path.with_suffix(path.suffix + ".json")
        d = json.loads(side.read_text())
        raw = np.frombuffer(path.read_bytes(), dtype="<f8")
        shape = tuple(d["shape"])
        if raw.size != 2 * int(np.prod(shape)):
            raise ValueError("grid file size does not match its descriptor")
        vals = (raw[0::2] + 1j * raw[1::2]).reshape(shape)
        return cls(np.array(d["origin"]), np.array(d["spacing"]), vals,
                   d.get("field_kind", "function"), d.get("meta", {}))


def interpolate(gf: GridField, pts, order: int = 1, fill: complex = 0.0) -> np.ndarray:
    """Evaluate a GridField at arbitrary points (..., m); multilinear by default."""
    from scipy.ndimage import map_coordinates

    pts = np.asarray(pts, dtype=float)
    idx = (pts - gf.origin) / gf.spacing
    coords = np.moveaxis(idx, -1, 0).reshape(gf.m, -1)
    kw = dict(order=order, mode="constant", cval=0.0, prefilter=order > 1)
    re = map_coordinates(gf.values.real, coords, **kw)
    im = map_coordinates(gf.values.imag, coords, **kw)
    out = (re + 1j * im).reshape(pts.shape[:-1])
    if fill != 0.0:
        outside = np.any((idx < 0) | (idx > np.array(gf.shape) - 1), axis=-1)
        out[outside] = fill
    return out
