"""Bijective bi-Lipschitz coordinate warps.

A warp carries a planar point set into the coordinates where a hull core is
convex. Two named families are supported:

* ``identity`` — no-op, any dimension.
* ``norm_rotation`` — rotate each point by an angle proportional to its
  squared norm (``rate`` radians per squared length unit). Norm-preserving,
  so the inverse is the rotation by the opposite angle at the same radius.
  Planar only; Lipschitz in both directions on bounded domains.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_FAMILIES = ("identity", "norm_rotation")


@dataclass(frozen=True)
class WarpMap:
    name: str = "identity"
    rate: float = 0.0

    def __post_init__(self):
        if self.name not in _FAMILIES:
            raise ValueError(f"unknown warp family {self.name!r}")
        if not math.isfinite(self.rate):
            raise ValueError("warp rate must be finite")
        if self.name == "identity" and self.rate != 0.0:
            raise ValueError("identity warp takes no rate")

    @property
    def is_identity(self) -> bool:
        return self.name == "identity"

    def forward(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        if self.is_identity:
            return pts.copy()
        return _rotate_by_norm(pts, self.rate, inverse=False)

    def inverse(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        if self.is_identity:
            return pts.copy()
        return _rotate_by_norm(pts, self.rate, inverse=True)


IDENTITY = WarpMap()


def norm_rotation(rate: float) -> WarpMap:
    return WarpMap("norm_rotation", rate)


def _rotate_by_norm(pts: np.ndarray, rate: float, inverse: bool) -> np.ndarray:
    if pts.shape[-1] != 2:
        raise ValueError("norm_rotation warp is planar only")
    x = pts[..., 0]
    y = pts[..., 1]
    theta = rate * (x * x + y * y)
    c = np.cos(theta)
    s = np.sin(theta)
    if inverse:
        # transpose of the forward rotation at the same (preserved) radius
        return np.stack((c * x - s * y, s * x + c * y), axis=-1)
    return np.stack((c * x + s * y, -s * x + c * y), axis=-1)
