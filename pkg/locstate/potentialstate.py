"""
Location states of a particle in a potential with a discrete spectrum.

The collapsed rectangle is expanded over the eigenfunctions u_n of the
potential through the closure relation, and each term is evolved with its
own phase exp(-i E_n t / hbar). Only the harmonic oscillator ships, but
anything implementing `BaseEigenbasis` can be projected and evolved.
"""

import math
from functools import partial
from typing import Iterator, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from locstate.constants import (
    CLOSURE_ENVELOPE,
    COEFFICIENT_ORDER_START,
    COEFFICIENT_TOLERANCE,
    DEFAULT_GRID_POINTS,
    MAX_QUADRATURE_ORDER,
)
from locstate.exceptions import DomainError, NonFiniteResult
from locstate.freestate import PhysicalConstants, SlitSpec, density_profile
from locstate.log import LOGGER
from locstate.numerics import gauss_legendre, hermite_function, iter_hermite_functions
from locstate.shared_types import BaseEigenbasis, SampledDensity
from locstate.utils import uniform_grid

PARSEVAL_WARNING_THRESHOLD = 0.95


class OscillatorBasis(BaseModel, BaseEigenbasis):
    """Harmonic-oscillator eigenfunctions up to n_max.

    Give either omega or sigma; the other follows from sigma^2 omega = hbar/m.
    With neither, omega defaults to 1 (a period of 2 pi).
    """

    omega: float = Field(1.0, gt=0)
    """Angular frequency"""

    sigma: float = Field(1.0, gt=0)
    """Oscillator length sqrt(hbar / (m omega))"""

    n_max: int = Field(ge=0)
    """Highest eigenstate kept in the expansion"""

    constants: PhysicalConstants = PhysicalConstants()

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    @model_validator(mode="before")
    @classmethod
    def derive_length_or_frequency(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        constants = data.get("constants") or PhysicalConstants()
        if isinstance(constants, dict):
            constants = PhysicalConstants(**constants)
        hbar_over_m = constants.hbar_over_m
        omega, sigma = data.get("omega"), data.get("sigma")
        if omega is None and sigma is None:
            omega = 1.0
        if sigma is None and omega is not None and omega > 0:
            data["sigma"] = math.sqrt(hbar_over_m / omega)
        if omega is None and sigma is not None and sigma > 0:
            data["omega"] = hbar_over_m / sigma**2
        if data.get("omega") is None:
            data["omega"] = omega
        return data

    @model_validator(mode="after")
    def check_consistency(self):
        hbar_over_m = self.constants.hbar_over_m
        if abs(self.sigma**2 * self.omega - hbar_over_m) > 1e-12 * hbar_over_m:
            raise ValueError(
                f"sigma={self.sigma!r} and omega={self.omega!r} do not satisfy "
                f"sigma^2 omega = hbar/m = {hbar_over_m!r}"
            )
        return self

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    def energy(self, n: int) -> float:
        return self.omega * (n + 0.5)

    def eval(self, n: int, y):
        return hermite_function(n, np.asarray(y, dtype=float) / self.sigma) / math.sqrt(
            self.sigma
        )

    def iter_eval(self, n_max: int, y) -> Iterator[np.ndarray]:
        scale = 1.0 / math.sqrt(self.sigma)
        for phi in iter_hermite_functions(n_max, np.asarray(y, dtype=float) / self.sigma):
            yield phi * scale


class OscillatorLocationState(BaseModel):
    """A location state as coefficients c_n over an eigenbasis."""

    basis: OscillatorBasis
    slit: SlitSpec
    coefficients: np.ndarray
    """Real expansion coefficients c_0 .. c_{n_max}"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def check_coefficients(self):
        c = self.coefficients
        if c.shape != (self.basis.n_max + 1,):
            raise ValueError(
                f"expected {self.basis.n_max + 1} coefficients, got shape {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if self.capture > 1 + 1e-9:
            raise ValueError(f"sum of c_n^2 is {self.capture!r}, above 1")
        return self

    @property
    def capture(self) -> float:
        """Sum of c_n^2, the part of the rectangle represented by the basis."""
        return math.fsum((self.coefficients**2).tolist())

    def tail_capture(self, n_from: int) -> float:
        """Sum of c_n^2 for n > n_from."""
        return math.fsum((self.coefficients[n_from + 1 :] ** 2).tolist())


def closure_check(basis: OscillatorBasis, y, y_prime):
    """Partial closure sum K(y, y') = sum_{n <= n_max} u_n(y') u_n(y).

    As n_max grows it tends to delta(y - y'). Positions must lie inside
    the envelope |y| <= 5 sigma sqrt(n_max) of the included states.
    """
    y_arr = np.asarray(y, dtype=float)
    y_prime_arr = np.asarray(y_prime, dtype=float)
    envelope = CLOSURE_ENVELOPE * basis.sigma * math.sqrt(max(basis.n_max, 1))
    for name, values in (("y", y_arr), ("y_prime", y_prime_arr)):
        if not np.all(np.isfinite(values)) or np.any(np.abs(values) > envelope):
            raise DomainError(
                "closure_check", f"{name} must lie within |{name}| <= {envelope!r}"
            )
    y_arr, y_prime_arr = np.broadcast_arrays(y_arr, y_prime_arr)
    total = np.zeros(y_arr.shape)
    for u, u_prime in zip(
        basis.iter_eval(basis.n_max, y_arr), basis.iter_eval(basis.n_max, y_prime_arr)
    ):
        total += u * u_prime
    if total.ndim == 0:
        return float(total)
    return total


def _projection(basis: OscillatorBasis, slit: SlitSpec, order: int) -> np.ndarray:
    lo = slit.center_y0 - 0.5 * slit.width_a
    hi = slit.center_y0 + 0.5 * slit.width_a
    nodes, weights = gauss_legendre(order).scaled(lo, hi)
    scale = 1.0 / math.sqrt(slit.width_a)
    return np.array([scale * (weights * u).sum() for u in basis.iter_eval(basis.n_max, nodes)])


def project_coefficients(basis: OscillatorBasis, slit: SlitSpec) -> OscillatorLocationState:
    """c_n = (1/sqrt(a)) int_slit u_n(y') dy', by Gauss-Legendre over the slit.

    The order starts at 96 and doubles until no coefficient moves by more
    than 1e-12.
    """
    order = COEFFICIENT_ORDER_START
    coefficients = _projection(basis, slit, order)
    while order * 2 <= MAX_QUADRATURE_ORDER:
        order *= 2
        refined = _projection(basis, slit, order)
        change = np.max(np.abs(refined - coefficients))
        coefficients = refined
        if change <= COEFFICIENT_TOLERANCE:
            break
    else:
        LOGGER.warning(
            f"Oscillator coefficients still moved by {change:.3g} at quadrature order {order}."
        )
    LOGGER.debug(f"Projected {basis.n_max + 1} coefficients with order {order}.")
    if not np.all(np.isfinite(coefficients)):
        raise NonFiniteResult("project_coefficients")
    state = OscillatorLocationState(basis=basis, slit=slit, coefficients=coefficients)
    if state.capture < PARSEVAL_WARNING_THRESHOLD:
        LOGGER.warning(
            f"The first {basis.n_max + 1} eigenstates capture only {state.capture:.4f} "
            "of the collapsed state; consider raising n_max."
        )
    return state


def evolve(state: OscillatorLocationState, y, t: float):
    """Psi(y, t) = sum_n c_n u_n(y) exp(-i E_n t / hbar), in one pass over n."""
    positions = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(positions)) or not math.isfinite(t):
        raise DomainError("evolve", "positions and time must be finite")
    basis = state.basis
    levels = np.arange(basis.n_max + 1)
    phases = np.exp(-1j * np.array([basis.energy(n) for n in levels]) * t)
    weights = state.coefficients * phases
    total = np.zeros(positions.shape, dtype=complex)
    for weight, u in zip(weights, basis.iter_eval(basis.n_max, positions)):
        total += weight * u
    if total.ndim == 0:
        return complex(total)
    return total


def oscillator_density_profile(
    state: OscillatorLocationState,
    grid_y,
    t: float,
    normalize: bool = True,
    threads: Optional[int] = None,
) -> SampledDensity:
    return density_profile(partial(evolve, state), grid_y, t, normalize, threads=threads)


def oscillator_default_grid(state: OscillatorLocationState, points: int = DEFAULT_GRID_POINTS):
    """A symmetric grid covering the classical envelope of every included state."""
    basis = state.basis
    reach = basis.sigma * math.sqrt(2 * basis.n_max + 1) + 2 * basis.sigma
    half_width = max(reach, abs(state.slit.center_y0) + state.slit.width_a)
    return uniform_grid(-half_width, half_width, points)
