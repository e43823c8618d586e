"""
Special functions and quadrature shared by every evaluator.

Everything here is a pure function of its inputs: same input bits give
the same output bits, no matter which thread calls it or in which order.
Scalars and numpy arrays are accepted wherever it makes sense.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Tuple, Union

import numpy as np
from scipy import special

from locstate.constants import MAX_HERMITE_DEGREE, MAX_QUADRATURE_ORDER
from locstate.exceptions import DomainError, NonFiniteResult, QuadratureOrderError

ArrayLike = Union[float, complex, np.ndarray]

# sqrt(i) on the principal branch, phase +pi/4
SQRT_I = np.exp(0.25j * np.pi)


def _require_finite(operation: str, value) -> np.ndarray:
    array = np.asarray(value)
    if not np.all(np.isfinite(array)):
        raise DomainError(operation, "argument is not finite")
    return array


def _check_result(operation: str, result):
    if not np.all(np.isfinite(result)):
        raise NonFiniteResult(operation)
    return result


def sqrt_i_times(beta: float) -> complex:
    """Return sqrt(i*beta) on the principal branch (phase +pi/4 for beta > 0)."""
    if beta >= 0:
        return complex(SQRT_I * math.sqrt(beta))
    return complex(np.conj(SQRT_I) * math.sqrt(-beta))


def complex_erf(z: ArrayLike) -> ArrayLike:
    """The error function of a complex argument.

    Evaluated through the Faddeeva function, so arguments on the
    exp(+-i pi/4) rays that appear in chirp integrals keep full relative
    accuracy. For |z| past the saturation radius the function tends to
    +-1 inside the sectors |arg(+-z)| < pi/4; outside those sectors it
    grows like exp(-z^2) and a non-finite value is reported as an error.

    >>> complex_erf(0j)
    0j
    >>> round(complex_erf(1.0).real, 15)
    0.842700792949715
    """
    array = _require_finite("complex_erf", z).astype(complex)
    result = special.erf(array)
    _check_result("complex_erf", result)
    if np.ndim(z) == 0:
        return complex(result)
    return result


def erf_difference(upper: ArrayLike, lower: ArrayLike) -> np.ndarray:
    """Return erf(upper) - erf(lower) without catastrophic cancellation.

    When both arguments sit in the same half plane the difference is
    taken between complementary error functions, whose values there are
    small.
    """
    upper = np.asarray(_require_finite("erf_difference", upper), dtype=complex)
    lower = np.asarray(_require_finite("erf_difference", lower), dtype=complex)
    upper, lower = np.broadcast_arrays(upper, lower)
    result = np.empty(upper.shape, dtype=complex)
    right = (upper.real >= 0) & (lower.real >= 0)
    left = (upper.real < 0) & (lower.real < 0)
    mixed = ~(right | left)
    result[right] = special.erfc(lower[right]) - special.erfc(upper[right])
    result[left] = special.erfc(-upper[left]) - special.erfc(-lower[left])
    result[mixed] = special.erf(upper[mixed]) - special.erf(lower[mixed])
    return _check_result("erf_difference", result)


def fresnel_cs(u: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """Fresnel integrals C(u) and S(u) with the pi t^2 / 2 convention.

    >>> c, s = fresnel_cs(1.0)
    >>> round(float(c), 13), round(float(s), 13)
    (0.7798934003768, 0.4382591473904)
    """
    array = _require_finite("fresnel_cs", u).astype(float)
    s, c = special.fresnel(array)
    if np.ndim(u) == 0:
        return float(c), float(s)
    return c, s


def iter_hermite_functions(n_max: int, x: ArrayLike) -> Iterator[np.ndarray]:
    """Yield the orthonormal Hermite functions phi_0(x) .. phi_{n_max}(x).

    Uses the normalized three-term recurrence. The recurrence runs on a
    rescaled value with the logarithm of the scale carried separately,
    so neither exp(-x^2/2) underflowing nor the growth of the
    recurrence in the classically forbidden region lose the result.
    """
    if not 0 <= n_max <= MAX_HERMITE_DEGREE:
        raise DomainError(
            "hermite_function", f"degree {n_max} is outside 0..{MAX_HERMITE_DEGREE}"
        )
    x = _require_finite("hermite_function", x).astype(float)
    log_scale = -0.5 * x * x - 0.25 * math.log(math.pi)
    prev = np.zeros_like(x)
    curr = np.ones_like(x)
    yield curr * np.exp(log_scale)
    for n in range(n_max):
        nxt = x * math.sqrt(2.0 / (n + 1)) * curr - math.sqrt(n / (n + 1)) * prev
        prev, curr = curr, nxt
        magnitude = np.abs(curr)
        large = magnitude > 1e150
        if np.any(large):
            factor = np.where(large, magnitude, 1.0)
            curr = curr / factor
            prev = prev / factor
            log_scale = log_scale + np.log(factor)
        yield curr * np.exp(log_scale)


def hermite_function(n: int, x: ArrayLike) -> ArrayLike:
    """The orthonormal Hermite function phi_n(x) (sigma = 1).

    >>> round(hermite_function(0, 0.0), 12)
    0.751125544465
    >>> hermite_function(1, 0.0)
    0.0
    """
    if n < 0:
        raise DomainError("hermite_function", f"degree {n} is negative")
    value = None
    for value in iter_hermite_functions(n, x):
        pass
    if np.ndim(x) == 0:
        return float(value)
    return value


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def scaled(self, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes and weights mapped affinely onto [lo, hi]."""
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        return mid + half * self.nodes, half * self.weights

    def integrate(self, func, lo: float, hi: float):
        """Apply the rule to func over [lo, hi]; func must accept an array."""
        nodes, weights = self.scaled(lo, hi)
        return np.dot(weights, func(nodes))


def legendre_with_derivative(order: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """P_order(x) and its derivative by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p_curr = x.copy()
    for k in range(1, order):
        p_prev, p_curr = p_curr, ((2 * k + 1) * x * p_curr - k * p_prev) / (k + 1)
    derivative = order * (x * p_curr - p_prev) / (x * x - 1.0)
    return p_curr, derivative


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule with `order` nodes, found by Newton iteration.

    >>> gauss_legendre(1).nodes.tolist(), gauss_legendre(1).weights.tolist()
    ([0.0], [2.0])
    >>> [round(float(x), 12) for x in gauss_legendre(2).nodes]
    [-0.57735026919, 0.57735026919]
    """
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_QUADRATURE_ORDER:
        raise QuadratureOrderError(order, MAX_QUADRATURE_ORDER)
    i = np.arange(1, order + 1)
    x = np.cos(np.pi * (i - 0.25) / (order + 0.5))
    for _ in range(50):
        p, dp = legendre_with_derivative(order, x)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    # one more step after convergence settles the last bit
    p, dp = legendre_with_derivative(order, x)
    x = x - p / dp
    p, dp = legendre_with_derivative(order, x)
    weights = 2.0 / ((1.0 - x * x) * dp * dp)

    # cos() guesses run from +1 down to -1
    x = x[::-1]
    weights = weights[::-1]
    x = 0.5 * (x - x[::-1])
    weights = 0.5 * (weights + weights[::-1])
    x.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order=int(order), nodes=x, weights=weights)
