"""
The virtual single-slit experiment.

A particle crossing the slit with longitudinal wave number k_x reaches a
screen at distance D after T = D / v_x, v_x = (hbar/m) k_x. The screen
pattern is the transverse location-state density at that time; the
longitudinal factor has constant modulus and cancels on normalization.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import solve_ivp
from tqdm import tqdm

from locstate.constants import (
    FRAUNHOFER_MAX_FRESNEL_NUMBER,
    FRESNEL_MIN_FRESNEL_NUMBER,
    NODE_THRESHOLD,
    TRAJECTORY_ATOL,
    TRAJECTORY_BATCH,
    TRAJECTORY_COUNT,
    TRAJECTORY_RTOL,
    TRAJECTORY_STEP_FLOOR,
    TRAJECTORY_STEPS,
)
from locstate.exceptions import DomainError, GridMismatch, NumericalError, SingularVelocity
from locstate.freestate import (
    FreeLocationState,
    PhysicalConstants,
    SlitSpec,
    default_grid,
    density_profile,
    evaluate_limit,
    evaluate_limit_gradient,
    evaluate_truncated,
    fraunhofer_reference,
)
from locstate.log import LOGGER
from locstate.shared_types import SampledDensity
from locstate.utils import check_grid, trapezoid


class ScreenGeometry(BaseModel):
    """Screen distance and longitudinal wave number of the incident particle."""

    distance_D: float = Field(gt=0)
    """Distance from the slit to the screen"""

    k_x: float = Field(gt=0)
    """Longitudinal wave number; the wavelength is 2 pi / k_x"""

    constants: PhysicalConstants = PhysicalConstants()

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    @property
    def velocity_x(self) -> float:
        return self.constants.hbar_over_m * self.k_x

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k_x


class Regime(str, Enum):
    fresnel = "Fresnel"
    transition = "Transition"
    fraunhofer = "Fraunhofer"

    @classmethod
    def classify(cls, fresnel_number: float) -> "Regime":
        if fresnel_number < FRAUNHOFER_MAX_FRESNEL_NUMBER:
            return cls.fraunhofer
        if fresnel_number > FRESNEL_MIN_FRESNEL_NUMBER:
            return cls.fresnel
        return cls.transition


class ComparisonReport(BaseModel):
    """How far an observed screen pattern is from the far-field reference."""

    fresnel_number: float
    l2_distance: float = Field(ge=0)
    """L2 norm of the difference of the two normalized densities"""

    linf_distance: float = Field(ge=0)
    """Largest pointwise difference of the two normalized densities"""

    peak_ratio: float
    """max(observed) / max(reference)"""

    regime: Regime

    model_config = ConfigDict(frozen=True)


def time_of_flight(screen: ScreenGeometry) -> float:
    """T = D / v_x."""
    return screen.distance_D / screen.velocity_x


def fresnel_number(slit: SlitSpec, T: float) -> float:
    """N_F = a^2 / (4 lambda D) = a^2 / (8 pi (hbar/m) T)."""
    if not T > 0 or not math.isfinite(T):
        raise DomainError("fresnel_number", f"time of flight must be positive, got {T!r}")
    return slit.width_a**2 / (8 * math.pi * slit.hbar_over_m * T)


def screen_evaluator(slit: SlitSpec, cutoff_km: Optional[float] = None):
    """The transverse evaluator used on the screen: the k_m -> infinity
    closed form, or the truncated state when a cutoff is given."""
    if cutoff_km is None:
        return partial(evaluate_limit, slit)
    return partial(evaluate_truncated, FreeLocationState(slit=slit, cutoff_km=cutoff_km))


def product_density(
    slit: SlitSpec,
    screen: ScreenGeometry,
    grid_y,
    cutoff_km: Optional[float] = None,
    threads: Optional[int] = None,
) -> SampledDensity:
    """|Psi_x Psi_y|^2 on the screen, normalized over grid_y."""
    T = time_of_flight(screen)
    return density_profile(screen_evaluator(slit, cutoff_km), grid_y, T, True, threads=threads)


def fraunhofer_mapped_reference(slit: SlitSpec, T: float, grid_y) -> SampledDensity:
    """The far-field sinc^2 slit pattern placed on the screen.

    Screen position and transverse momentum are related by p_y = m (y - y0) / T,
    so alpha = a (y - y0) / (2 (hbar/m) T).
    """
    if not T > 0:
        raise DomainError("fraunhofer_mapped_reference", f"time must be positive, got {T!r}")
    grid = check_grid(grid_y)
    alpha = slit.width_a * (grid - slit.center_y0) / (2 * slit.hbar_over_m * T)
    density = fraunhofer_reference(slit, alpha)
    density = density / trapezoid(density, grid)
    return SampledDensity(grid_y=grid, density=density, time_t=float(T), normalized=True)


def compare_patterns(
    observed: SampledDensity, reference: SampledDensity, fresnel_number: float
) -> ComparisonReport:
    if not observed.same_grid(reference):
        raise GridMismatch(observed.grid_y.size, reference.grid_y.size)
    if not (observed.normalized and reference.normalized):
        raise DomainError("compare_patterns", "both densities must be normalized")
    difference = observed.density - reference.density
    return ComparisonReport(
        fresnel_number=fresnel_number,
        l2_distance=math.sqrt(trapezoid(difference**2, observed.grid_y)),
        linf_distance=float(np.max(np.abs(difference))),
        peak_ratio=observed.peak / reference.peak,
        regime=Regime.classify(fresnel_number),
    )


def _velocity_field(slit: SlitSpec, y: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """Transverse velocity and a mask of positions too close to a node."""
    if t == 0:
        psi = np.atleast_1d(evaluate_limit(slit, y, t))
        singular = np.abs(psi) <= NODE_THRESHOLD
        return np.zeros(y.shape), singular
    psi = np.atleast_1d(evaluate_limit(slit, y, t))
    singular = np.abs(psi) <= NODE_THRESHOLD
    safe = np.where(singular, 1.0, psi)
    gradient = np.atleast_1d(evaluate_limit_gradient(slit, y, t))
    velocity = slit.hbar_over_m * np.imag(gradient / safe)
    return np.where(singular, 0.0, velocity), singular


def bohm_velocity_y(slit: SlitSpec, y, t: float):
    """de Broglie-Bohm transverse velocity (hbar/m) Im(Psi'/Psi).

    Uses the closed-form limit state. At t=0 the state is real, so the
    velocity is zero inside the slit and undefined outside it.
    """
    positions = np.atleast_1d(np.asarray(y, dtype=float))
    velocity, singular = _velocity_field(slit, positions, float(t))
    if np.any(singular):
        index = int(np.argmax(singular))
        modulus = abs(complex(evaluate_limit(slit, float(positions[index]), t)))
        raise SingularVelocity(float(positions[index]), t, modulus)
    if np.ndim(y) == 0:
        return float(velocity[0])
    return velocity


@dataclass(frozen=True, eq=False)
class TrajectoryFan:
    """Bohmian trajectories launched at quantiles of the slit density."""

    quantiles: np.ndarray
    times: np.ndarray
    paths: np.ndarray
    """positions, one row per trajectory, one column per recorded time"""

    @property
    def endpoints(self) -> np.ndarray:
        return self.paths[:, -1]


def launch_time(T: float) -> float:
    """Trajectories start slightly after the collapse, not at t=0.

    Right after the collapse the edge waves oscillate on scales far below
    any practical step, so the fan is launched at T/200 from quantiles of
    |Psi(T/200)|^2 rather than from equispaced points inside the slit.
    """
    return T / 200.0


def _tail_mass(slit: SlitSpec, t: float, distance):
    """Probability beyond `distance` from the slit centre, on one side.

    Far outside the slit each edge wave leaves a 1/y^2 tail of mean height
    (hbar/m) |t| / (2 pi a (y -+ a/2)^2); the cross term averages out.
    """
    a = slit.width_a
    spread = slit.hbar_over_m * abs(t) / (2 * math.pi * a)
    return spread * (1 / (distance - 0.5 * a) + 1 / (distance + 0.5 * a))


def _tail_distance(slit: SlitSpec, t: float, mass):
    """Inverse of _tail_mass."""
    a = slit.width_a
    spread = slit.hbar_over_m * abs(t) / (2 * math.pi * a)
    return (spread + np.sqrt(spread**2 + (0.5 * a * mass) ** 2)) / mass


def quantile_positions(slit: SlitSpec, t: float, quantiles, points: int = 20001) -> np.ndarray:
    """Positions y with P(Y <= y) = q under |Psi(y, t)|^2.

    In one dimension Bohmian trajectories never cross, so these are
    exactly where trajectories launched at the same quantiles are at t.
    The density is integrated on default_grid; the mass beyond it comes
    from the 1/y^2 tails, which also place quantiles outside the grid.
    """
    quantiles = np.atleast_1d(np.asarray(quantiles, dtype=float))
    center = slit.center_y0
    grid = default_grid(slit, t, points)
    density = np.abs(np.asarray(evaluate_limit(slit, grid, t))) ** 2
    panels = 0.5 * (density[1:] + density[:-1]) * np.diff(grid)
    below = _tail_mass(slit, t, center - grid[0])
    above = _tail_mass(slit, t, grid[-1] - center)
    cumulative = below + np.concatenate(([0.0], np.cumsum(panels)))
    total = cumulative[-1] + above
    cumulative /= total
    positions = np.interp(quantiles, cumulative, grid)
    left = quantiles < cumulative[0]
    positions[left] = center - _tail_distance(slit, t, quantiles[left] * total)
    right = quantiles > cumulative[-1]
    positions[right] = center + _tail_distance(slit, t, (1 - quantiles[right]) * total)
    return positions


def _guidance(slit: SlitSpec):
    def velocity(t, y):
        v, singular = _velocity_field(slit, y, t)
        # nan fails the solver's error test, so a stage on a node shortens the step
        return np.where(singular, np.nan, v)

    return velocity


def trajectory_fan(
    slit: SlitSpec,
    T: float,
    count: int = TRAJECTORY_COUNT,
    steps: int = TRAJECTORY_STEPS,
    quantiles=None,
    record_every: int = 1,
    progress: bool = False,
) -> TrajectoryFan:
    """Integrate Bohmian trajectories of the limit state up to time T.

    The fan is not launched at t=0: by default `count` trajectories start
    at launch_time(T) = T/200 from the equispaced quantiles (i + 1/2) / count
    of |Psi(T/200)|^2.

    Neighbouring trajectories are integrated together with adaptive RK45
    error control, so steps shrink wherever the flow passes near a node.
    No step is longer than (T - T/200) / steps; positions are recorded at
    every record_every-th multiple of that and at T.
    """
    if not T > 0:
        raise DomainError("trajectory_fan", f"time must be positive, got {T!r}")
    if quantiles is None:
        quantiles = (np.arange(count) + 0.5) / count
    quantiles = np.atleast_1d(np.asarray(quantiles, dtype=float))
    t_start = launch_time(T)
    span = T - t_start
    marks = np.arange(0, steps + 1, record_every)
    if marks[-1] != steps:
        marks = np.append(marks, steps)
    times = t_start + span * marks / steps
    times[-1] = T
    start = quantile_positions(slit, t_start, quantiles)
    velocity = _guidance(slit)
    floor = TRAJECTORY_STEP_FLOOR * T
    paths = np.empty((len(quantiles), len(times)))
    batches = range(0, len(quantiles), TRAJECTORY_BATCH)
    for first in tqdm(batches, desc="trajectories", disable=not progress):
        batch = slice(first, first + TRAJECTORY_BATCH)
        # the solver's error norm is an RMS over the batch
        scale = math.sqrt(len(start[batch]))
        solution = solve_ivp(
            velocity,
            (t_start, T),
            start[batch],
            method="RK45",
            dense_output=True,
            max_step=span / steps,
            rtol=TRAJECTORY_RTOL / scale,
            atol=TRAJECTORY_ATOL * slit.width_a / scale,
        )
        if not solution.success:
            raise NumericalError(
                "trajectory_fan",
                f"trajectories from y={float(start[first])!r} at t={t_start!r}: {solution.message}",
            )
        # the last step only closes the gap to T
        taken = np.diff(solution.t)[:-1]
        if taken.size and taken.min() < floor:
            LOGGER.warning(
                f"Trajectories from y={float(start[first])!r} needed a step of "
                f"{float(taken.min())!r}, below {floor!r}, near a node."
            )
        LOGGER.debug(
            f"Batch at quantile {float(quantiles[first])!r} took {len(solution.t) - 1} steps."
        )
        paths[batch] = solution.sol(times)
    paths[:, 0] = start
    return TrajectoryFan(quantiles=quantiles, times=times, paths=paths)
