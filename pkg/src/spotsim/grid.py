"""Periodic 2-D scalar fields and the discrete diffusion stencil.

Concentrations live on a regular nx-by-ny grid over an lx-by-ly torus.
Storage is row-major with x fastest, i.e. a C-order array of shape (ny, nx);
cell (i, j) has its center at ((i + 0.5) * hx, (j + 0.5) * hy).  Setting
ny = 1 gives the 1-D mode used for concentration-profile studies: the
y-term of the stencil is identically zero there.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GridMismatchError


@dataclass(frozen=True)
class GridSpec:
    """Grid geometry: cell counts and physical side lengths."""

    nx: int
    ny: int
    lx: float
    ly: float

    def __post_init__(self):
        if self.nx < 3:
            raise ConfigError(f"nx must be >= 3, got {self.nx}")
        if self.ny < 1:
            raise ConfigError(f"ny must be >= 1, got {self.ny}")
        for name in ("lx", "ly"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive and finite, got {v}")

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def shape(self) -> tuple:
        """Array shape (ny, nx): row-major storage, x fastest."""
        return (self.ny, self.nx)

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    def x_centers(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * self.hx

    def y_centers(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.hy

    def wrap_dx(self, dx):
        """Minimal-image displacement along x."""
        return (dx + 0.5 * self.lx) % self.lx - 0.5 * self.lx

    def wrap_dy(self, dy):
        return (dy + 0.5 * self.ly) % self.ly - 0.5 * self.ly

    def periodic_distance(self, p, q) -> float:
        dx = self.wrap_dx(p[0] - q[0])
        dy = self.wrap_dy(p[1] - q[1])
        return float(np.hypot(dx, dy))


@dataclass
class Field:
    """One scalar concentration on a grid."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != self.spec.shape:
            raise GridMismatchError(
                f"values shape {self.values.shape} does not match grid "
                f"shape {self.spec.shape}"
            )

    @classmethod
    def full(cls, spec: GridSpec, value: float) -> "Field":
        return cls(spec, np.full(spec.shape, value, dtype=np.float64))

    @classmethod
    def zeros(cls, spec: GridSpec) -> "Field":
        return cls.full(spec, 0.0)

    def copy(self) -> "Field":
        return Field(self.spec, self.values.copy())


def require_same_spec(*fields: Field) -> GridSpec:
    spec = fields[0].spec
    for f in fields[1:]:
        if f.spec != spec:
            raise GridMismatchError(f"fields on different grids: {f.spec} vs {spec}")
    return spec


def laplacian_array(x: np.ndarray, hx: float, hy: float) -> np.ndarray:
    """Five-point periodic stencil on a raw (ny, nx) array.

    (f[i-1,j] + f[i+1,j] - 2 f[i,j]) / hx^2
      + (f[i,j-1] + f[i,j+1] - 2 f[i,j]) / hy^2
    with indices wrapping.  For ny = 1 the y-neighbors coincide with the
    cell itself and the y-term cancels exactly.
    """
    two_x = 2.0 * x
    sx = np.roll(x, 1, axis=1) + np.roll(x, -1, axis=1) - two_x
    sy = np.roll(x, 1, axis=0) + np.roll(x, -1, axis=0) - two_x
    return sx / (hx * hx) + sy / (hy * hy)


def laplacian(f: Field) -> Field:
    """Discrete Laplacian of a field on its periodic grid."""
    return Field(f.spec, laplacian_array(f.values, f.spec.hx, f.spec.hy))


def total_mass(f: Field) -> float:
    """Integral of the field over the domain: sum(values) * hx * hy.

    Summation order is fixed (C-order pairwise) so the result does not
    depend on worker count.
    """
    return float(np.sum(f.values)) * f.spec.cell_area
