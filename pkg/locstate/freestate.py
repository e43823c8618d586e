"""
Free-particle location states.

A rectangular wave function of width a centred at y0, expanded over plane
waves with |k| <= k_m and evolved freely:

    Psi(y, t) = 1/(2 pi sqrt(a)) int_{-k_m}^{k_m} dk B(k) exp(i(k y - beta k^2))

with B(k) the Fourier integral of the slit indicator and beta = (hbar/m) t / 2.
Two evaluators are provided: `evaluate_truncated` for a finite cutoff and
`evaluate_limit`, the closed form for k_m -> infinity. Both take either a
scalar y or a numpy array of positions.
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import special

from locstate.constants import (
    CHUNK_SIZE,
    DEFAULT_GRID_POINTS,
    DIRECT_QUADRATURE_MAX_KA,
    EDGE_EXPANSION_MIN_ARGUMENT,
    MAX_QUADRATURE_ORDER,
    OUTER_ORDER_CAP,
    OUTER_ORDER_START,
    OUTER_TOLERANCE,
)
from locstate.exceptions import DomainError, NonFiniteResult, NumericalError
from locstate.log import LOGGER
from locstate.numerics import erf_difference, gauss_legendre, sqrt_i_times
from locstate.shared_types import Evaluator, SampledDensity
from locstate.utils import check_grid, map_chunks, trapezoid, uniform_grid


class PhysicalConstants(BaseModel):
    """Physical constants; only the ratio hbar/m enters free evolution."""

    hbar_over_m: float = Field(1.0, gt=0)
    """hbar/m in length^2/time"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)


class SlitSpec(BaseModel):
    """The slit that collapses the state to a rectangle."""

    width_a: float = Field(gt=0)
    """Slit width a"""

    center_y0: float = 0.0
    """Slit centre y0"""

    constants: PhysicalConstants = PhysicalConstants()

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    @property
    def hbar_over_m(self) -> float:
        return self.constants.hbar_over_m


class FreeLocationState(BaseModel):
    """A free-particle location state with spectral cutoff k_m."""

    slit: SlitSpec
    cutoff_km: float = Field(gt=0)
    """The plane-wave cutoff k_m in 1/length"""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)


def _positions(operation: str, y) -> np.ndarray:
    positions = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(positions)):
        raise DomainError(operation, "positions must be finite")
    return positions


def _time(operation: str, t) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(operation, "time must be finite")
    return t


def _like_input(y, values: np.ndarray):
    if np.ndim(y) == 0:
        return complex(values)
    return values


def rectangular_state(slit: SlitSpec, y):
    """The collapsed state: 1/sqrt(a) on the closed slit interval, 0 elsewhere."""
    positions = _positions("rectangular_state", y)
    inside = np.abs(positions - slit.center_y0) <= 0.5 * slit.width_a
    values = np.where(inside, 1.0 / math.sqrt(slit.width_a), 0.0).astype(complex)
    return _like_input(y, values)


def momentum_amplitude(slit: SlitSpec, p_y):
    """Fourier transform of the rectangular state (hbar = 1 units).

    Always complex: the phase exp(-i p_y y0) is applied for an off-centre slit.
    """
    p = _positions("momentum_amplitude", p_y)
    a = slit.width_a
    values = math.sqrt(a / (2 * math.pi)) * np.sinc(p * a / (2 * math.pi))
    values = values * np.exp(-1j * p * slit.center_y0)
    return _like_input(p_y, values)


def momentum_density(slit: SlitSpec, p_y):
    """P(p_y) = |phi(p_y)|^2 at the instant of collapse."""
    return np.abs(momentum_amplitude(slit, p_y)) ** 2


def fraunhofer_reference(slit: SlitSpec, alpha):
    """(a / 2 pi) (sin alpha / alpha)^2, the far-field slit pattern."""
    alpha_array = _positions("fraunhofer_reference", alpha)
    values = slit.width_a / (2 * math.pi) * np.sinc(alpha_array / math.pi) ** 2
    if np.ndim(alpha) == 0:
        return float(values)
    return values


def evaluate_limit(slit: SlitSpec, y, t: float):
    """The exact free evolution of the rectangle (k_m -> infinity).

    Psi = (erf((y-y0+a/2)/w) - erf((y-y0-a/2)/w)) / (2 sqrt(a)),
    w = sqrt(2 i (hbar/m) t) on the principal branch.
    """
    positions = _positions("evaluate_limit", y)
    t = _time("evaluate_limit", t)
    if t == 0:
        return rectangular_state(slit, y)
    a = slit.width_a
    width = sqrt_i_times(2.0 * slit.hbar_over_m * t)
    offsets = positions - slit.center_y0
    values = erf_difference((offsets + 0.5 * a) / width, (offsets - 0.5 * a) / width)
    return _like_input(y, values / (2.0 * math.sqrt(a)))


def evaluate_limit_gradient(slit: SlitSpec, y, t: float):
    """d Psi / dy for the closed-form limit state, t != 0.

    The derivative of each erf term is a unit-modulus Gaussian of
    imaginary exponent, so this never overflows.
    """
    positions = _positions("evaluate_limit_gradient", y)
    t = _time("evaluate_limit_gradient", t)
    if t == 0:
        raise DomainError("evaluate_limit_gradient", "the gradient is singular at t=0")
    a = slit.width_a
    spread = 2.0 * slit.hbar_over_m * t
    width = sqrt_i_times(spread)
    offsets = positions - slit.center_y0
    upper = np.exp(1j * (offsets + 0.5 * a) ** 2 / spread)
    lower = np.exp(1j * (offsets - 0.5 * a) ** 2 / spread)
    values = (upper - lower) / (width * math.sqrt(math.pi * a))
    return _like_input(y, values)


def chirp_integral(s: np.ndarray, beta: float, km: float) -> np.ndarray:
    """G(s) = int_{-km}^{km} exp(i(k s - beta k^2)) dk, beta != 0, in closed form."""
    root = sqrt_i_times(beta)
    centre = s / (2.0 * beta)
    prefactor = math.sqrt(math.pi) / (2.0 * root)
    difference = erf_difference(root * (km - centre), root * (-km - centre))
    return prefactor * np.exp(1j * s * s / (4.0 * beta)) * difference


def _sine_integral_state(state: FreeLocationState, offsets: np.ndarray) -> np.ndarray:
    a = state.slit.width_a
    km = state.cutoff_km
    si_hi, _ = special.sici(km * (offsets + 0.5 * a))
    si_lo, _ = special.sici(km * (offsets - 0.5 * a))
    return ((si_hi - si_lo) / (math.pi * math.sqrt(a))).astype(complex)


def _slit_quadrature(
    state: FreeLocationState, offsets: np.ndarray, beta: float, order: int
) -> np.ndarray:
    a = state.slit.width_a
    rule = gauss_legendre(order)
    s = offsets[:, np.newaxis] + 0.5 * a * rule.nodes[np.newaxis, :]
    kernel = chirp_integral(s, beta, state.cutoff_km)
    return (kernel * (0.5 * a * rule.weights)).sum(axis=1) / (2 * math.pi * math.sqrt(a))


def _adaptive_slit_quadrature(
    state: FreeLocationState, offsets: np.ndarray, beta: float, max_order: int
) -> np.ndarray:
    """Integrate G over the slit, doubling the order per point until it settles."""
    floor = 1.0 / math.sqrt(state.slit.width_a)
    order = OUTER_ORDER_START
    result = _slit_quadrature(state, offsets, beta, order)
    pending = np.arange(offsets.size)
    while pending.size and order < max_order:
        order *= 2
        refined = _slit_quadrature(state, offsets[pending], beta, order)
        change = np.abs(refined - result[pending])
        settled = change <= OUTER_TOLERANCE * np.maximum(np.abs(refined), floor)
        result[pending] = refined
        pending = pending[~settled]
    if pending.size:
        LOGGER.warning(
            f"Slit quadrature did not settle at order {order} for {pending.size} "
            f"position(s) (k_m={state.cutoff_km!r}, t={2 * beta / state.slit.hbar_over_m!r})."
        )
    else:
        LOGGER.debug(f"Slit quadrature settled by order {order}.")
    return result


def _edge_correction(state: FreeLocationState, offsets: np.ndarray, beta: float) -> np.ndarray:
    """Contribution of the plane waves with |k| > k_m, for beta > 0.

    The chirp integral over |k| > k_m is exp(+-i k_m s) times a Faddeeva
    function that varies slowly in s, so its integral over the slit is
    taken by integrating by parts to third order.
    """
    a = state.slit.width_a
    km = state.cutoff_km
    root = sqrt_i_times(beta)
    prefactor = math.sqrt(math.pi) / (2.0 * root) * np.exp(-1j * beta * km * km)
    total = np.zeros(offsets.shape, dtype=complex)
    for sign in (1.0, -1.0):
        omega = sign * km
        dzeta = -sign * 1j * root / (2.0 * beta)
        for s, weight in ((offsets + 0.5 * a, 1.0), (offsets - 0.5 * a, -1.0)):
            zeta = 1j * root * (km - sign * s / (2.0 * beta))
            w = special.wofz(zeta)
            dw = -2.0 * zeta * w + 2j / math.sqrt(math.pi)
            d2w = -2.0 * w - 2.0 * zeta * dw
            h = prefactor * w
            dh = prefactor * dw * dzeta
            d2h = prefactor * d2w * dzeta * dzeta
            antiderivative = np.exp(1j * omega * s) * (
                h / (1j * omega) + dh / omega**2 + 1j * d2h / omega**3
            )
            total += weight * antiderivative
    return total / (2 * math.pi * math.sqrt(a))


def _edge_expansion_valid(state: FreeLocationState, offsets: np.ndarray, beta: float):
    a = state.slit.width_a
    root_beta = math.sqrt(beta)
    km = state.cutoff_km
    upper = root_beta * (km - (offsets + 0.5 * a) / (2.0 * beta))
    lower = root_beta * (km + (offsets - 0.5 * a) / (2.0 * beta))
    return np.minimum(upper, lower) >= EDGE_EXPANSION_MIN_ARGUMENT


def _truncated_chunk(state: FreeLocationState, offsets: np.ndarray, t: float) -> np.ndarray:
    if t == 0:
        return _sine_integral_state(state, offsets)
    beta = 0.5 * state.slit.hbar_over_m * t
    if state.cutoff_km * state.slit.width_a <= DIRECT_QUADRATURE_MAX_KA:
        return _adaptive_slit_quadrature(state, offsets, beta, OUTER_ORDER_CAP)
    slit = state.slit
    result = np.asarray(
        evaluate_limit(slit, offsets + slit.center_y0, t), dtype=complex
    ).copy()
    valid = _edge_expansion_valid(state, offsets, beta)
    result[valid] -= _edge_correction(state, offsets[valid], beta)
    if not np.all(valid):
        LOGGER.warning(
            f"k_m={state.cutoff_km!r} is too small for the edge expansion at t={t!r} "
            f"for {np.count_nonzero(~valid)} position(s); falling back to slit "
            f"quadrature of order up to {MAX_QUADRATURE_ORDER}, whose accuracy is not guaranteed."
        )
        result[~valid] = _adaptive_slit_quadrature(
            state, offsets[~valid], beta, MAX_QUADRATURE_ORDER
        )
    return result


def evaluate_truncated(state: FreeLocationState, y, t: float):
    """Psi(y, t) for the location state with finite cutoff k_m.

    The k integral is swapped with the integral over the slit: the inner
    chirp integral over k has a closed form in erf, and the outer
    integral over the slit is smooth. At t=0 the result reduces to sine
    integrals, and for large k_m a the truncation is expressed as a
    correction to the closed-form limit. Negative t uses the
    conjugation symmetry of the real initial state.
    """
    positions = _positions("evaluate_truncated", y)
    t = _time("evaluate_truncated", t)
    if t < 0:
        return np.conj(evaluate_truncated(state, y, -t))
    offsets = np.atleast_1d(positions - state.slit.center_y0).astype(float)
    chunks = [
        _truncated_chunk(state, offsets[i : i + CHUNK_SIZE], t)
        for i in range(0, offsets.size, CHUNK_SIZE)
    ]
    values = np.concatenate(chunks).reshape(positions.shape)
    if not np.all(np.isfinite(values)):
        raise NonFiniteResult("evaluate_truncated")
    return _like_input(y, values)


def mean_energy(state: FreeLocationState) -> float:
    """Mean energy of the truncated location state, in units of hbar.

    Returns <E>/hbar = <(hbar/m) k^2 / 2>; with hbar = 1 this is the
    energy itself. It grows linearly in k_m for large cutoffs.
    """
    a = state.slit.width_a
    km = state.cutoff_km
    si, _ = special.sici(a * km)
    numerator = km - math.sin(km * a) / a
    denominator = a * si - 2.0 * math.sin(0.5 * a * km) ** 2 / km
    return 0.5 * state.slit.hbar_over_m * numerator / denominator


def truncated_norm(state: FreeLocationState) -> float:
    """The squared norm of the truncated state, slightly below 1."""
    a = state.slit.width_a
    km = state.cutoff_km
    si, _ = special.sici(a * km)
    return 2.0 / math.pi * si - 4.0 * math.sin(0.5 * a * km) ** 2 / (math.pi * a * km)


def truncation_deficit(state: FreeLocationState) -> float:
    return 1.0 - truncated_norm(state)


def default_grid(slit: SlitSpec, t: float, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """A uniform grid wide enough for the pattern at time t never to clip."""
    a = slit.width_a
    half_width = max(4 * a, 8 * slit.hbar_over_m * abs(t) * 2 * math.pi / a)
    return uniform_grid(slit.center_y0 - half_width, slit.center_y0 + half_width, points)


def density_profile(
    evaluator: Evaluator,
    grid_y,
    t: float,
    normalize: bool = True,
    threads: Optional[int] = None,
) -> SampledDensity:
    """|Psi|^2 of the evaluator on grid_y at time t.

    Grid points are evaluated in fixed chunks, possibly in parallel; with
    normalize the density is divided by its trapezoidal integral.
    """
    grid = check_grid(grid_y)
    values = map_chunks(lambda chunk: np.asarray(evaluator(chunk, t)), grid, threads=threads)
    density = np.abs(values) ** 2
    if not np.all(np.isfinite(density)):
        raise NonFiniteResult("density_profile")
    if normalize:
        area = trapezoid(density, grid)
        if not area > 0:
            raise NumericalError("density_profile", "the density vanishes on the grid")
        density = density / area
    return SampledDensity(grid_y=grid, density=density, time_t=float(t), normalized=normalize)
