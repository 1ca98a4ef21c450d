"""Explicit witness sequences for the counterexample sets."""
import math

import numpy as np

from conelab.exceptions import InvalidParameterError
from conelab.models import NormKind
from conelab.services.spaces import norm


def _need(index: int, N: int):
    if index > N:
        raise InvalidParameterError(f"witness needs coordinate {index} but N = {N}")


def flat_witness(n: int, N: int) -> np.ndarray:
    """z^n = (-1/(sqrt(2) n), 1/sqrt(2n) repeated n times, 0, ...)"""
    _need(n + 1, N)
    z = np.zeros(N)
    z[0] = -1.0 / (math.sqrt(2.0) * n)
    z[1:n + 1] = 1.0 / math.sqrt(2.0 * n)
    return z


def saturated_flat_witness(N: int, epsilon: float, radius: float = 1.0) -> np.ndarray:
    """(-t, sqrt(t), ..., sqrt(t)) with norm epsilon; t is the least |x_1| reaching that norm"""
    m = N - 1
    t = 0.5 * (-m + math.sqrt(m * m + 4.0 * epsilon * epsilon))
    if t * t + m * t > radius * radius:
        raise InvalidParameterError("epsilon exceeds the ball radius")
    z = np.full(N, math.sqrt(t))
    z[0] = -t
    return z


def minus_slanted_witness(n: int, N: int) -> np.ndarray:
    """z^n = (-1/(2(n+1)), 0, ..., 1/2 at slot n+1, ...)"""
    _need(n + 1, N)
    z = np.zeros(N)
    z[0] = -1.0 / (2.0 * (n + 1))
    z[n] = 0.5
    return z


def slanted_partner(n: int, N: int) -> np.ndarray:
    """w^n = (1/(2(n+1)), 0, ..., 1/2 at slot n+1, ...), a cone point at distance 1/(n+1) from z^n"""
    w = minus_slanted_witness(n, N)
    w[0] = -w[0]
    return w


def saturated_minus_slanted_witness(N: int, epsilon: float) -> np.ndarray:
    """-s (1, 2, ..., N) scaled to norm epsilon, on every face of -S at once"""
    ramp = np.arange(1, N + 1, dtype=float)
    return -epsilon * ramp / np.linalg.norm(ramp)


def slab_witness(n: int, N: int) -> np.ndarray:
    """x^n = e_n - (1/n) e_1"""
    if n < 2:
        raise InvalidParameterError("slab witnesses start at n = 2")
    _need(n, N)
    x = np.zeros(N)
    x[0] = -1.0 / n
    x[n - 1] = 1.0
    return x


def triple_witness(x: np.ndarray, n: int, alpha: float):
    """Push x along p_n = e_n / (2 alpha) and renormalize onto the unit sphere.

    Returns (z_n, x + p_n, beta_n).
    """
    _need(n, x.size)
    shifted = x.copy()
    shifted[n - 1] += 1.0 / (2.0 * alpha)
    beta = norm(shifted, NormKind.TRIPLE)
    return shifted / beta, shifted, beta


def triple_start_index(x: np.ndarray, alpha: float) -> int:
    """First n0 with |x_n| <= 1/(2 alpha) for every n >= n0 (1-based)"""
    large = np.nonzero(np.abs(x) > 1.0 / (2.0 * alpha))[0]
    return int(large[-1]) + 2 if large.size else 1


def flat_support_witness(f: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """(-a, sqrt(a), 0, ...) with a = (f_2 / (2 f_1))^2, where f(x) = f_2^2 / (4 f_1) > 0.

    ``a`` is clamped so the point stays in the ball.
    """
    if f.size < 2 or f[0] <= 0 or f[1] <= 0:
        raise InvalidParameterError("flat support witness needs f_1 > 0 and f_2 > 0")
    a = (f[1] / (2.0 * f[0])) ** 2
    a_max = 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * radius * radius))
    a = min(a, a_max)
    x = np.zeros(f.size)
    x[0], x[1] = -a, math.sqrt(a)
    return x
