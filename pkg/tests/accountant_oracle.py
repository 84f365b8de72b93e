"""High-precision reference evaluations for the accountant, written against mpmath."""

import mpmath as mp

mp.mp.dps = 50


def eps_cdp_ref(sens, c, gamma, beta, sigma, n, d, mu_prime=0):
    sens, c, gamma, beta, sigma = (mp.mpf(x) for x in (sens, c, gamma, beta, sigma))
    s2 = (sigma / gamma) ** 2
    tau = 10 * mp.fsum(mp.e ** (-2 * mp.pi**2 * s2 * k / (k + 1)) for k in range(1, n))
    b1 = c**2 + gamma**2 * d / 4 + mp.sqrt(2 * mp.log(1 / beta)) * gamma * (c + gamma * mp.sqrt(d) / 2)
    b2 = (c + gamma * mp.sqrt(d)) ** 2
    ch = mp.sqrt(min(b1, b2))
    main = sens * ch / (mp.sqrt(n) * sigma)
    eps = min(mp.sqrt(main**2 + 2 * tau * d), main + tau * mp.sqrt(d))
    return eps / (1 - mp.mpf(mu_prime))


def adp_objective(alpha, eps, delta):
    alpha = mp.mpf(alpha)
    return eps**2 * alpha / 2 + mp.log(1 / (alpha * delta)) / (alpha - 1) + mp.log(1 - 1 / alpha)


def adp_grid(eps, delta, points=200_000, refine=20_000):
    """Dense log-grid search over alpha in (1, 1e6], then a dense grid around the best point."""
    import numpy as np

    la = np.linspace(np.log(1 + 1e-9), np.log(1e6), points)
    a = np.exp(la)
    vals = 0.5 * eps**2 * a + (np.log(1 / delta) - la) / np.expm1(la) + np.log1p(-1 / a)
    i = int(np.argmin(vals))
    lo, hi = la[max(i - 2, 0)], la[min(i + 2, points - 1)]
    la2 = np.linspace(lo, hi, refine)
    a2 = np.exp(la2)
    vals2 = 0.5 * eps**2 * a2 + (np.log(1 / delta) - la2) / np.expm1(la2) + np.log1p(-1 / a2)
    return max(float(min(vals.min(), vals2.min())), 0.0)
