"""Discretised Brillouin torus.

Points are stored in FFT order: along each axis the integer label ``j`` runs
over ``0..N-1`` and maps to ``k = 2*pi*j/N`` folded into ``(-pi, pi]``.  With
even ``N`` both ``k = 0`` and ``k = pi`` are grid points, so every ``-k`` is
on-grid and the time-reversal-invariant momenta (TRIM) can be evaluated
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import ConfigError


class GridError(ConfigError):
    """Invalid grid configuration."""


@dataclass(frozen=True)
class Plaquette:
    """Elementary square spanned by two axes, corners counterclockwise."""

    base: int
    axes: tuple[int, int]
    corners: tuple[int, int, int, int]


@dataclass(frozen=True)
class BZGrid:
    dim: int
    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not 1 <= self.dim <= 3:
            raise GridError(f"dim must be 1, 2 or 3, got {self.dim}")
        if len(sizes) != self.dim:
            raise GridError(f"expected {self.dim} sizes, got {len(sizes)}")
        for s in sizes:
            if s < 4 or s % 2:
                raise GridError(f"axis sizes must be even and >= 4, got {s}")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.sizes

    @property
    def npoints(self) -> int:
        return int(np.prod(self.sizes))

    def __len__(self) -> int:
        return self.npoints

    @cached_property
    def labels(self) -> np.ndarray:
        """Integer labels ``j_mu`` of every point, shape ``(npoints, dim)``."""
        grids = np.meshgrid(*[np.arange(s) for s in self.sizes], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    @cached_property
    def points(self) -> np.ndarray:
        """Momenta in ``(-pi, pi]``, shape ``(npoints, dim)``."""
        n = np.asarray(self.sizes)
        j = self.labels
        j = np.where(j > n // 2, j - n, j)
        return 2 * np.pi * j / n

    def index(self, labels: Sequence[int] | np.ndarray) -> np.ndarray | int:
        lab = np.mod(np.asarray(labels), self.sizes)
        out = np.ravel_multi_index(tuple(np.moveaxis(lab, -1, 0)), self.sizes)
        return int(out) if np.ndim(out) == 0 else out

    def shift(self, axis: int, step: int = 1) -> np.ndarray:
        """Index map ``idx -> idx + step * e_axis`` with periodic wrap."""
        lab = self.labels.copy()
        lab[:, axis] += step
        return self.index(lab)

    @cached_property
    def negation(self) -> np.ndarray:
        return self.index(-self.labels)

    def negate_index(self, idx):
        """Index of ``-k`` for the point(s) ``idx``."""
        out = self.negation[idx]
        return int(out) if np.ndim(out) == 0 else out

    def trim_points(self) -> list[int]:
        """Indices of the 2**dim momenta with ``k = -k`` mod 2*pi."""
        return [int(i) for i in np.flatnonzero(self.negation == np.arange(self.npoints))]

    def plaquettes(self, axes: tuple[int, int] = (0, 1)) -> Iterator[Plaquette]:
        mu, nu = axes
        if mu == nu or max(axes) >= self.dim:
            raise GridError(f"bad plaquette axes {axes} for dim {self.dim}")
        smu, snu = self.shift(mu), self.shift(nu)
        for base in range(self.npoints):
            a = smu[base]
            yield Plaquette(base, (mu, nu), (base, int(a), int(snu[a]), int(snu[base])))

    def axis_pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.dim) for b in range(a + 1, self.dim)]

    def to_dict(self) -> dict:
        return {"dim": self.dim, "sizes": list(self.sizes)}


def make_grid(dim: int, sizes: int | Sequence[int]) -> BZGrid:
    """Build a grid; a scalar ``sizes`` is repeated along every axis."""
    if isinstance(sizes, (int, np.integer)):
        sizes = [int(sizes)] * dim
    return BZGrid(dim, tuple(sizes))


def trim_points(grid: BZGrid) -> list[int]:
    return grid.trim_points()


def negate_index(grid: BZGrid, idx):
    return grid.negate_index(idx)
