"""
Utilities used by the state evaluators, the experiment runner and the CLI
"""

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np

from locstate.constants import CHUNK_SIZE, THREADS_ENV
from locstate.exceptions import ConfigError, InvalidGrid
from locstate.log import LOGGER

_NUMBER_TOKEN = re.compile(r"^\s*(?P<factor>[-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*$")


def check_grid(grid_y) -> np.ndarray:
    """Return grid_y as a float array, or raise InvalidGrid.

    >>> check_grid([0.0, 0.5, 1.0]).tolist()
    [0.0, 0.5, 1.0]
    """
    grid = np.asarray(grid_y, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidGrid("a grid needs at least 2 points")
    if not np.all(np.isfinite(grid)):
        raise InvalidGrid("grid values must be finite")
    if not np.all(np.diff(grid) > 0):
        raise InvalidGrid("grid values must be strictly increasing")
    return grid


def uniform_grid(lo: float, hi: float, points: int) -> np.ndarray:
    if points < 2:
        raise InvalidGrid(f"{points} points requested, at least 2 are needed")
    if not lo < hi:
        raise InvalidGrid(f"grid minimum {lo!r} is not below grid maximum {hi!r}")
    return np.linspace(lo, hi, points)


def parse_grid(spec: str) -> Tuple[float, float, int]:
    """Parse a MIN:MAX:N grid specification.

    >>> parse_grid("-15:15:2001")
    (-15.0, 15.0, 2001)
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f'grid "{spec}" is not of the form MIN:MAX:N')
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f'grid "{spec}" is not of the form MIN:MAX:N')
    return lo, hi, points


def parse_number(token: str) -> float:
    """Parse a float, also accepting multiples of pi such as "pi" or "2pi".

    >>> parse_number("1e-3"), parse_number("2pi") == 2 * math.pi
    (0.001, True)
    """
    token = token.strip()
    try:
        return float(token)
    except ValueError:
        pass
    match = _NUMBER_TOKEN.match(token)
    if match:
        factor = match["factor"]
        try:
            scale = float(factor) if factor not in ("", "+", "-") else float(factor + "1")
        except ValueError:
            raise ConfigError(f'"{token}" is not a number')
        return scale * math.pi
    raise ConfigError(f'"{token}" is not a number')


def parse_number_list(text: str) -> List[float]:
    """Parse a comma-separated list of numbers.

    >>> parse_number_list("0, 1e-5,0.2")
    [0.0, 1e-05, 0.2]
    """
    tokens = [token for token in text.split(",") if token.strip()]
    if not tokens:
        raise ConfigError("expected a comma-separated list of numbers")
    return [parse_number(token) for token in tokens]


def trapezoid(values, grid_y) -> float:
    """Trapezoidal integral summed in a fixed order with exact rounding.

    >>> trapezoid([1.0, 1.0, 1.0], [0.0, 0.5, 1.0])
    1.0
    """
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid_y, dtype=float)
    panels = 0.5 * (values[1:] + values[:-1]) * np.diff(grid)
    return math.fsum(panels.tolist())


def thread_count() -> int:
    """Number of worker threads, capped by LOCSTATE_THREADS when it is set."""
    default = min(32, os.cpu_count() or 1)
    value = os.environ.get(THREADS_ENV)
    if not value:
        return default
    try:
        count = int(value)
    except ValueError:
        LOGGER.warning(f'Ignoring {THREADS_ENV}="{value}": not an integer.')
        return default
    return max(1, count)


def map_chunks(
    func: Callable[[np.ndarray], np.ndarray],
    values: np.ndarray,
    chunk_size: int = CHUNK_SIZE,
    threads: Optional[int] = None,
) -> np.ndarray:
    """Apply func to fixed-size chunks of values, possibly in parallel.

    Chunk boundaries depend only on chunk_size, never on the number of
    threads, and results are concatenated in input order, so the output
    is the same for any degree of parallelism.
    """
    chunks = [values[i : i + chunk_size] for i in range(0, len(values), chunk_size)]
    if threads is None:
        threads = thread_count()
    if threads <= 1 or len(chunks) <= 1:
        results = [func(chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(func, chunks))
    return np.concatenate(results)
