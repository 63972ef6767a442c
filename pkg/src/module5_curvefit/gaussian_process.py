"""
Gaussian Process Regression of x = f(y)

Half-integer Matern kernel (nu = p + 1/2) in closed form, fixed
hyperparameters, a constant prior mean equal to the target mean, and a
Cholesky factorization whose jitter escalates by factors of 10 until it
succeeds or passes MAX_JITTER.
"""

from dataclasses import dataclass
from typing import List, Tuple
import logging
import math

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_triangular

logger = logging.getLogger(__name__)

MAX_JITTER = 1e-4
CI_Z = 1.96


@dataclass
class GPRConfig:
    nu: float = 9.5
    lengthscale: float = 10.0
    signal_variance: float = 4.0
    noise_variance: float = 0.04
    jitter: float = 1e-8

    def validate(self) -> Tuple[bool, List[str]]:
        errors = []
        for name in ("lengthscale", "signal_variance", "noise_variance", "jitter"):
            if getattr(self, name) <= 0:
                errors.append(f"{name} must be > 0")
        if self.nu <= 0 or not float(self.nu - 0.5).is_integer():
            errors.append("nu must be a positive half-integer")
        return len(errors) == 0, errors


def _matern_coefficients(p: int) -> np.ndarray:
    scale = math.factorial(p) / math.factorial(2 * p)
    return np.array([
        scale * math.factorial(p + i) / (math.factorial(i) * math.factorial(p - i))
        for i in range(p + 1)
    ])


def matern_kernel(y1: np.ndarray, y2: np.ndarray, cfg: GPRConfig = GPRConfig()) -> np.ndarray:
    """
    Covariance between every y1 and every y2.

        k(r) = s2 exp(-sqrt(2 nu) r / l) * sum_i c_i (2 sqrt(2 nu) r / l)^(p - i)

    Returns:
        Array of shape (len(y1), len(y2)); 0-d for two scalars
    """
    p = int(round(cfg.nu - 0.5))
    r = np.abs(np.subtract.outer(np.asarray(y1, dtype=float), np.asarray(y2, dtype=float)))
    scaled = math.sqrt(2.0 * cfg.nu) * r / cfg.lengthscale
    poly = np.polynomial.polynomial.polyval(2.0 * scaled, _matern_coefficients(p)[::-1])
    return cfg.signal_variance * np.exp(-scaled) * poly


def jittered_cholesky(K: np.ndarray, jitter: float) -> Tuple[Tuple[np.ndarray, bool], float]:
    """
    Lower Cholesky factor of K + jitter*I, escalating jitter x10 on failure.

    Returns:
        (cho_factor result, jitter used)

    Raises:
        ValueError: "ill-conditioned kernel" once jitter would exceed MAX_JITTER
    """
    eye = np.eye(len(K))
    while jitter <= MAX_JITTER * (1 + 1e-9):
        try:
            return cho_factor(K + jitter * eye, lower=True), jitter
        except LinAlgError:
            logger.debug("cholesky failed at jitter %.1e", jitter)
            jitter *= 10.0
    raise ValueError("ill-conditioned kernel")


@dataclass
class GPPosterior:
    """Fitted GP over training inputs y_train."""
    y_train: np.ndarray
    x_train: np.ndarray
    prior_mean: float
    alpha: np.ndarray
    chol: Tuple[np.ndarray, bool]
    cfg: GPRConfig
    jitter: float
    observation_variance: float = 0.0

    @classmethod
    def fit(cls, y: np.ndarray, x: np.ndarray, cfg: GPRConfig = GPRConfig()) -> "GPPosterior":
        y = np.asarray(y, dtype=float)
        x = np.asarray(x, dtype=float)
        prior_mean = float(np.mean(x))
        K = matern_kernel(y, y, cfg) + cfg.noise_variance * np.eye(len(y))
        chol, jitter = jittered_cholesky(K, cfg.jitter)
        posterior = cls(y, x, prior_mean, cho_solve(chol, x - prior_mean), chol, cfg, jitter)
        residual = x - posterior.latent(y)[0]
        posterior.observation_variance = max(cfg.noise_variance, float(np.mean(residual ** 2)))
        return posterior

    def latent(self, y_query: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Posterior mean and noise-free variance of f at y_query."""
        y_query = np.atleast_1d(np.asarray(y_query, dtype=float))
        Ks = matern_kernel(y_query, self.y_train, self.cfg)
        mean = self.prior_mean + Ks @ self.alpha
        v = solve_triangular(self.chol[0], Ks.T, lower=True)
        var = np.maximum(self.cfg.signal_variance - np.sum(v * v, axis=0), 0.0)
        return mean, var

    def predict(self, y_query: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Returns:
            (mean, ci_half_width): 95% interval half-width from the latent
            variance plus the observation variance
        """
        mean, var = self.latent(y_query)
        return mean, CI_Z * np.sqrt(var + self.observation_variance)
