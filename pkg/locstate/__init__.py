"""

Basic init file for the locstate module

A location state is the wave function right after a slit of width a has
localized a particle: a rectangle of height 1/sqrt(a). The main entry
points are:
 - make_free_state() for free evolution with a plane-wave cutoff k_m
 - make_oscillator_state() for evolution in a harmonic oscillator

Basic Usage:
    from locstate import make_free_state
    from locstate.freestate import evaluate_truncated
    state = make_free_state(a=0.1, cutoff_km=200.0)
    psi = evaluate_truncated(state, [0.0, 0.05], t=1e-3)

    from locstate import make_oscillator_state
    from locstate.potentialstate import evolve
    state = make_oscillator_state(a=2.0, y0=10.0, n_max=250)
    psi = evolve(state, [-10.0, 10.0], t=3.0)

Experiments with file output are run from the command line:
    locstate run --preset fig4
"""

import sys

from locstate.freestate import FreeLocationState, PhysicalConstants, SlitSpec
from locstate.potentialstate import (
    OscillatorBasis,
    OscillatorLocationState,
    project_coefficients,
)

if sys.version_info < (3, 8):  # pragma: no cover
    sys.exit(
        "Python 3.8 or more recent is required by locstate.\n"
        f"You are using Python {sys.version}.\n"
        "Please use a newer version of Python."
    )


def make_free_state(
    a: float, cutoff_km: float, *, y0: float = 0.0, hbar_over_m: float = 1.0
) -> FreeLocationState:
    """Make a free location state for a slit of width a centred on y0.

    Args:
        a (float): slit width
        cutoff_km (float): plane-wave cutoff k_m
        y0 (float): slit centre
        hbar_over_m (float): the ratio hbar/m

    Raises:
        pydantic.ValidationError: if a or cutoff_km is not positive and finite
    """
    slit = SlitSpec(
        width_a=a, center_y0=y0, constants=PhysicalConstants(hbar_over_m=hbar_over_m)
    )
    return FreeLocationState(slit=slit, cutoff_km=cutoff_km)


def make_oscillator_state(
    a: float,
    n_max: int,
    *,
    y0: float = 0.0,
    omega: float = 1.0,
    hbar_over_m: float = 1.0,
) -> OscillatorLocationState:
    """Project the collapsed rectangle onto the first n_max + 1 eigenstates
    of a harmonic oscillator of angular frequency omega."""
    constants = PhysicalConstants(hbar_over_m=hbar_over_m)
    slit = SlitSpec(width_a=a, center_y0=y0, constants=constants)
    basis = OscillatorBasis(omega=omega, n_max=n_max, constants=constants)
    return project_coefficients(basis, slit)
