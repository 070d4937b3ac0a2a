"""Uniform grids on a truncated box, field storage, quadrature and snapshot I/O.

The continuum problem lives on all of R^N; we truncate to a box large enough
that the unit-radius interaction kernel only sees the truncation inside a
margin-1 boundary layer. Fields are sampled on a uniform tensor grid and
integrals are composite trapezoidal sums, which are exact for constants.
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BadMagicError,
    EmptyInteriorError,
    NonFiniteError,
    ParameterError,
    ShapeMismatchError,
    TruncatedSnapshotError,
    UnsupportedVersionError,
)

SNAPSHOT_MAGIC = b"NFLD"
SNAPSHOT_VERSION = 1
_MIN_HALF_WIDTH = 2.0  # kernel support radius 1 plus an interior of the same depth


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid over a box: point k along axis i sits at origin[i] + k*spacing[i]."""

    dim: int
    counts: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...]

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ParameterError(f"dim must be 1, 2 or 3, got {self.dim}")
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        if not (len(self.counts) == len(self.spacing) == len(self.origin) == self.dim):
            raise ShapeMismatchError("counts, spacing and origin must each have dim entries")
        if any(n < 3 for n in self.counts):
            raise ParameterError(f"every axis needs at least 3 points, got {self.counts}")
        if any(s <= 0 for s in self.spacing):
            raise ParameterError(f"spacings must be positive, got {self.spacing}")
        for n, s in zip(self.counts, self.spacing):
            if n * s / 2 < _MIN_HALF_WIDTH:
                raise ParameterError(
                    f"box half-width {n * s / 2:g} < {_MIN_HALF_WIDTH:g}; the unit-ball "
                    "kernel needs an interior at distance >= 1 from the boundary"
                )

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    @property
    def num_points(self) -> int:
        return math.prod(self.counts)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @property
    def box_lo(self) -> tuple[float, ...]:
        return self.origin

    @property
    def box_hi(self) -> tuple[float, ...]:
        return tuple(o + (n - 1) * s for o, n, s in zip(self.origin, self.counts, self.spacing))

    def axis_coords(self, axis: int) -> np.ndarray:
        return self.origin[axis] + np.arange(self.counts[axis]) * self.spacing[axis]

    def meshgrid(self) -> list[np.ndarray]:
        """Sparse (broadcastable) coordinate arrays, one per axis."""
        return list(np.meshgrid(*(self.axis_coords(i) for i in range(self.dim)),
                                indexing="ij", sparse=True))

    def radii(self, center: tuple[float, ...] | None = None) -> np.ndarray:
        """Euclidean distance of every grid point from `center` (default: origin of R^N)."""
        if center is None:
            center = (0.0,) * self.dim
        sq = np.zeros(self.shape)
        for c, ax in zip(center, self.meshgrid()):
            sq = sq + (ax - c) ** 2
        return np.sqrt(sq)


def centered_grid(dim: int, half_width: float, points_per_axis: int) -> GridSpec:
    """Symmetric box [-half_width, half_width]^dim with the given point count per axis."""
    spacing = 2.0 * half_width / (points_per_axis - 1)
    return GridSpec(
        dim=dim,
        counts=(points_per_axis,) * dim,
        spacing=(spacing,) * dim,
        origin=(-half_width,) * dim,
    )


@lru_cache(maxsize=64)
def trapezoid_weights(grid: GridSpec) -> np.ndarray:
    """Tensor-product composite trapezoid weights, shaped like the grid."""
    w = np.ones(grid.shape)
    for axis in range(grid.dim):
        w1 = np.full(grid.counts[axis], grid.spacing[axis])
        w1[0] *= 0.5
        w1[-1] *= 0.5
        shape = [1] * grid.dim
        shape[axis] = grid.counts[axis]
        w = w * w1.reshape(shape)
    w.flags.writeable = False
    return w


@dataclass(frozen=True, eq=False)
class Field:
    """Grid-sampled real field; values are C-ordered over grid indices and finite."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim == 1 and self.grid.dim > 1:
            if values.size != self.grid.num_points:
                raise ShapeMismatchError(
                    f"expected {self.grid.num_points} values, got {values.size}"
                )
            values = values.reshape(self.grid.shape)
        if values.shape != self.grid.shape:
            raise ShapeMismatchError(
                f"values shape {values.shape} does not match grid {self.grid.shape}"
            )
        if not np.isfinite(values).all():
            raise NonFiniteError("field contains NaN or Inf")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def constant_field(grid: GridSpec, value: float) -> Field:
    return Field(grid, np.full(grid.shape, float(value)))


def quadrature(field: Field, weight_samples: np.ndarray | None = None) -> float:
    """Trapezoid approximation of the box integral of field * weight."""
    w = trapezoid_weights(field.grid)
    integrand = field.values
    if weight_samples is not None:
        weight_samples = np.asarray(weight_samples, dtype=np.float64)
        if weight_samples.size != field.grid.num_points:
            raise ShapeMismatchError(
                f"weight has {weight_samples.size} samples, expected {field.grid.num_points}"
            )
        if not np.isfinite(weight_samples).all():
            raise NonFiniteError("weight samples contain NaN or Inf")
        integrand = integrand * weight_samples.reshape(field.grid.shape)
    return float(np.sum(integrand * w))


def quadrature_values(values: np.ndarray, grid: GridSpec) -> float:
    """Trapezoid integral of a raw value array already shaped like the grid."""
    return float(np.sum(values * trapezoid_weights(grid)))


def interior_mask(grid: GridSpec, margin: float) -> np.ndarray:
    """Boolean mask, true where the distance to the box boundary is >= margin."""
    if margin < 0:
        raise ParameterError(f"margin must be nonnegative, got {margin}")
    lo, hi = grid.box_lo, grid.box_hi
    for axis in range(grid.dim):
        if margin >= (hi[axis] - lo[axis]) / 2:
            raise EmptyInteriorError(
                f"margin {margin:g} >= box half-width {(hi[axis] - lo[axis]) / 2:g} on axis {axis}"
            )
    # tiny slack so points exactly at distance == margin survive float rounding
    tol = 1e-12 * max(1.0, margin)
    mask = np.ones(grid.shape, dtype=bool)
    for axis, coords in enumerate(grid.meshgrid()):
        dist = np.minimum(coords - lo[axis], hi[axis] - coords)
        mask = mask & (dist >= margin - tol)
    return mask


def interior_slices(grid: GridSpec, margin: float) -> tuple[slice, ...]:
    """Index slices selecting the sub-box at distance >= margin from the boundary."""
    tol = 1e-12 * max(1.0, margin)
    slices = []
    for axis in range(grid.dim):
        k = math.ceil((margin - tol) / grid.spacing[axis])
        if 2 * k >= grid.counts[axis]:
            raise EmptyInteriorError(f"margin {margin:g} leaves no interior on axis {axis}")
        slices.append(slice(k, grid.counts[axis] - k))
    return tuple(slices)


# ---------------------------------------------------------------------------
# Snapshot persistence
#
# Layout: magic "NFLD" | version u16 LE | dim u8 | per axis (count u32 LE,
# spacing f64 LE, origin f64 LE) | values row-major f64 LE.
# ---------------------------------------------------------------------------

def _header_bytes(grid: GridSpec) -> bytes:
    head = struct.pack("<4sHB", SNAPSHOT_MAGIC, SNAPSHOT_VERSION, grid.dim)
    for n, s, o in zip(grid.counts, grid.spacing, grid.origin):
        head += struct.pack("<Idd", n, s, o)
    return head


def write_snapshot(field: Field, destination) -> int:
    """Write the binary snapshot; returns the number of bytes written."""
    payload = _header_bytes(field.grid) + field.values.astype("<f8").tobytes(order="C")
    if hasattr(destination, "write"):
        destination.write(payload)
    else:
        with open(destination, "wb") as fh:
            fh.write(payload)
    return len(payload)


def read_snapshot(source) -> Field:
    """Read a snapshot produced by write_snapshot; exact inverse."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as fh:
            data = fh.read()
    return _parse_snapshot(data)


def _parse_snapshot(data: bytes) -> Field:
    if len(data) < 7:
        raise TruncatedSnapshotError(f"snapshot header needs 7 bytes, got {len(data)}")
    magic, version, dim = struct.unpack_from("<4sHB", data, 0)
    if magic != SNAPSHOT_MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {SNAPSHOT_MAGIC!r}")
    if version != SNAPSHOT_VERSION:
        raise UnsupportedVersionError(f"unsupported snapshot version {version}")
    offset = 7
    axis_size = struct.calcsize("<Idd")
    if len(data) < offset + dim * axis_size:
        raise TruncatedSnapshotError(
            f"header for dim {dim} needs {offset + dim * axis_size} bytes, got {len(data)}"
        )
    counts, spacing, origin = [], [], []
    for _ in range(dim):
        n, s, o = struct.unpack_from("<Idd", data, offset)
        counts.append(n)
        spacing.append(s)
        origin.append(o)
        offset += axis_size
    expected = math.prod(counts) * 8
    actual = len(data) - offset
    if actual < expected:
        raise TruncatedSnapshotError(f"payload expected {expected} bytes, got {actual}")
    values = np.frombuffer(data, dtype="<f8", count=math.prod(counts), offset=offset)
    grid = GridSpec(dim=dim, counts=tuple(counts), spacing=tuple(spacing), origin=tuple(origin))
    return Field(grid, values.reshape(grid.shape).copy())
