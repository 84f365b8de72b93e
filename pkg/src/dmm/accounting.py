"""Privacy accounting for the distributed matrix mechanism.

Computes the concentrated-DP parameter of a run with summed discrete
Gaussian noise, converts it to approximate DP, and plans ``(gamma, beta,
sigma)`` for a target epsilon.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


class InfeasibleModulus(ValueError):
    pass


@dataclass(frozen=True)
class AccountantInputs:
    sensitivity: float  # sens^1 of C for unit-norm contributions
    clip_norm: float
    granularity: float
    rounding_bias: float
    noise_scale: float  # sigma, in gradient units
    n: int
    dimension: int
    delta: float = 1e-6
    dishonest_fraction: float = 0.0

    def __post_init__(self):
        if self.sensitivity <= 0 or self.clip_norm <= 0 or self.granularity <= 0:
            raise ValueError("sensitivity, clip norm and granularity must be positive")
        if self.noise_scale <= 0 or self.n < 1 or self.dimension < 1:
            raise ValueError("noise scale, n and dimension must be positive")
        if not 0 <= self.dishonest_fraction < 0.5:
            raise ValueError("dishonest fraction must lie in [0, 1/2)")


def tau(sigma: float, gamma: float, n: int) -> float:
    """Divergence slack between a sum of ``n`` discrete Gaussians and one wide one."""
    s2 = (sigma / gamma) ** 2
    return 10.0 * sum(math.exp(-2 * math.pi**2 * s2 * k / (k + 1)) for k in range(1, n))


def c_hat(c: float, gamma: float, d: int, beta: float) -> float:
    """Norm bound on a clipped gradient after conditional rounding."""
    loose = (c + gamma * math.sqrt(d)) ** 2
    if beta <= 0:
        return math.sqrt(loose)
    tight = c * c + gamma * gamma * d / 4 + math.sqrt(2 * math.log(1 / beta)) * gamma * (
        c + gamma * math.sqrt(d) / 2
    )
    return math.sqrt(min(tight, loose))


def epsilon_cdp(inputs: AccountantInputs) -> float:
    """``eps`` such that the run is ``eps^2 / 2``-concentrated DP."""
    a = inputs
    ch = c_hat(a.clip_norm, a.granularity, a.dimension, a.rounding_bias)
    t = tau(a.noise_scale, a.granularity, a.n)
    main = a.sensitivity * ch / (math.sqrt(a.n) * a.noise_scale)
    eps = min(math.sqrt(main * main + 2 * t * a.dimension), main + t * math.sqrt(a.dimension))
    if a.dishonest_fraction > 0:
        eps /= 1 - a.dishonest_fraction
    return eps


def _adp_objective(log_alpha: np.ndarray | float, eps: float, delta: float):
    alpha = np.exp(log_alpha)
    am1 = np.expm1(log_alpha)
    return 0.5 * eps * eps * alpha + (-np.log(delta) - log_alpha) / am1 + np.log1p(-1 / alpha)


def cdp_to_adp(eps: float, delta: float, tol: float = 1e-10, alpha_max: float = 1e6) -> float:
    """Approximate-DP epsilon at ``delta`` for an ``eps^2/2``-CDP mechanism.

    Minimizes over the Renyi order on a log grid, then refines the bracket
    around the grid minimum by golden-section search.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    lo, hi = math.log1p(1e-12), math.log(alpha_max)
    grid = np.linspace(lo, hi, 2049)
    vals = _adp_objective(grid, eps, delta)
    i = int(np.nanargmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    invphi = (math.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = _adp_objective(c, eps, delta), _adp_objective(d, eps, delta)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _adp_objective(c, eps, delta)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _adp_objective(d, eps, delta)
    best = min(float(fc), float(fd), float(vals[i]))
    return max(best, 0.0)


def adp_upper_bound(eps: float, delta: float) -> float:
    return eps * (math.sqrt(2 * math.log(1 / delta)) + eps / 2)


@dataclass(frozen=True)
class PlannedParameters:
    granularity: float
    rounding_bias: float
    noise_scale: float
    epsilon_cdp: float


def required_modulus(
    n: int, d: int, iterations: int, a_norm: float, b_norm: float, sensitivity: float, epsilon: float
) -> float:
    """Smallest modulus meeting the accuracy lower bound, hidden constants set to 1.

    Solves ``m = X * sqrt(log(1 + m^2/n))`` by fixed-point iteration, where
    ``X = max ||A_T|| sqrt(n T) + max ||B_T|| sqrt(d) Delta / eps``.
    """
    x = a_norm * math.sqrt(n * iterations) + b_norm * math.sqrt(d) * sensitivity / epsilon
    m = x
    for _ in range(100):
        m_new = x * math.sqrt(math.log1p(m * m / n))
        if abs(m_new - m) <= 1e-9 * m_new:
            break
        m = m_new
    return m_new


def plan_parameters(
    n: int,
    d: int,
    iterations: int,
    clip_norm: float,
    epsilon: float,
    a_norm: float,
    b_norm: float,
    sensitivity: float,
    modulus: int,
    rho: float = 1.0,
) -> PlannedParameters:
    """Choose granularity, rounding bias and noise scale for a target epsilon.

    ``a_norm``/``b_norm`` are the largest row norms of the workload and of
    the left factor.  Constants hidden in the asymptotic statements are 1.
    """
    need = required_modulus(n, d, iterations, a_norm, b_norm, sensitivity, epsilon)
    if modulus < need:
        bits = math.ceil(math.log2(need))
        raise InfeasibleModulus(
            f"modulus {modulus} below the required {need:.4g}; use a field of at least {bits} bits"
        )
    beta = min(1 / n, 0.5)
    logf = math.log1p(modulus**2 / n)
    gamma2 = (
        rho * a_norm**2 * clip_norm**2 * n * iterations / d
        + b_norm**2 * clip_norm**2 * sensitivity**2 / epsilon**2
    ) * logf / modulus**2
    gamma = math.sqrt(gamma2)
    sigma = max(
        2 * clip_norm * sensitivity / (epsilon * math.sqrt(n)),
        gamma * sensitivity * math.sqrt(8 * d) / (epsilon * math.sqrt(n)),
        gamma / math.pi**2 * math.log(80 * n * d / epsilon**2),
        gamma / 2,
    )

    def eps_of(sig: float) -> float:
        return epsilon_cdp(AccountantInputs(sensitivity, clip_norm, gamma, beta, sig, n, d))

    eps = eps_of(sigma)
    # the closed-form choice can fall short when log(80 n d / eps^2) < pi^2
    while eps > epsilon:
        log.warning("planned sigma %.6g misses the target (eps=%.6g); increasing", sigma, eps)
        sigma *= 1.01
        eps = eps_of(sigma)
    return PlannedParameters(gamma, beta, sigma, eps)
