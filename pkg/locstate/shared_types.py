"""
This file is for type definitions shared between the state modules, the
diffraction model and the output layer.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from locstate.constants import NORMALIZATION_TOLERANCE

Evaluator = Callable[[np.ndarray, float], np.ndarray]
"""Maps (grid of y values, time t) to the complex wave function on that grid."""


@dataclass(frozen=True, eq=False)
class SampledDensity:
    """A probability density sampled on a position grid at one time."""

    grid_y: np.ndarray
    density: np.ndarray
    time_t: float
    normalized: bool

    def __post_init__(self):
        from locstate.utils import check_grid, trapezoid

        check_grid(self.grid_y)
        if self.density.shape != self.grid_y.shape:
            raise ValueError(
                f"density has {self.density.size} samples for a grid of {self.grid_y.size} points"
            )
        if not np.all(np.isfinite(self.density)) or np.any(self.density < 0):
            raise ValueError("density samples must be finite and non-negative")
        if self.normalized:
            area = trapezoid(self.density, self.grid_y)
            if abs(area - 1.0) > NORMALIZATION_TOLERANCE:
                raise ValueError(f"density marked normalized integrates to {area!r}")

    @property
    def peak(self) -> float:
        return float(np.max(self.density))

    def same_grid(self, other: "SampledDensity") -> bool:
        return self.grid_y.shape == other.grid_y.shape and bool(
            np.array_equal(self.grid_y, other.grid_y)
        )


class BaseEigenbasis(ABC):
    """A discrete energy eigenbasis u_n(y) of some potential, with hbar/m units.

    Energies are reported as E_n / hbar, i.e. the phase rate of each
    eigenfunction under time evolution.
    """

    @abstractmethod
    def energy(self, n: int) -> float:
        """E_n / hbar for eigenstate n."""

    @abstractmethod
    def eval(self, n: int, y: np.ndarray) -> np.ndarray:
        """The real eigenfunction u_n evaluated at y."""

    @abstractmethod
    def iter_eval(self, n_max: int, y: np.ndarray) -> Iterator[np.ndarray]:
        """Yield u_0(y) .. u_{n_max}(y) in order."""
