"""Horizons of surfaces on uniform grids and the witness shift identity."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class SurfaceGrid:
    """Heights h[i, j] = g(x_i, y_j) on the closed uniform n x n grid."""
    n: int
    heights: np.ndarray = field(repr=False)
    source: str = ""
    seed: object = None

    def __post_init__(self):
        h = np.asarray(self.heights, dtype=np.float64)
        if h.ndim != 2 or h.shape[0] == 0 or h.shape[1] == 0:
            raise DomainError("a surface grid needs a non-empty 2-D array of heights")
        if h.shape != (self.n, self.n):
            raise DomainError(f"heights have shape {h.shape}, expected ({self.n}, {self.n})")
        if not np.all(np.isfinite(h)):
            raise DomainError("surface heights must be finite")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)

    @property
    def x(self):
        return np.linspace(0.0, 1.0, self.n)

    @classmethod
    def sample(cls, g, n, seed=None):
        if g.dim != 2:
            raise DomainError(f"surface grids need a function on [0,1]^2, got dimension {g.dim}")
        if n < 2:
            raise DomainError(f"grid resolution must be >= 2, got {n}")
        return cls(int(n), g.on_grid(n), getattr(g, "name", ""), seed)


def horizon(grid):
    """H(g)(x_i) = max_j h[i, j]."""
    if not isinstance(grid, SurfaceGrid):
        grid = SurfaceGrid(len(grid), np.asarray(grid))
    return grid.heights.max(axis=1)


def verify_horizon_shift(f, w, n):
    """max_i |H(f + phi_2)(x_i) - (H(f)(x_i) + phi(x_i))| on the n x n grid.

    ``w`` may be the one-dimensional witness or its surface extension.
    """
    if f.dim != 2:
        raise DomainError(f"f must be a surface (dimension 2), got {f.dim}")
    if w.dim not in (1, 2):
        raise DomainError(f"witness dimension {w.dim} does not match a surface")
    from .witness import surface_extend
    w2 = w if w.dim == 2 else surface_extend(w, 2)
    fg = SurfaceGrid.sample(f, n)
    shifted = SurfaceGrid.sample(f + w2, n)
    phi = w2.on_grid(n)[:, 0]
    return float(np.max(np.abs(horizon(shifted) - (horizon(fg) + phi))))
