"""Linear and tanh echo-state reservoirs: x' = f(W x + drive + noise).

Injection support is the full state, so ``n_in == N`` and the observation is
the state itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ConfigError, Reservoir, STREAM_STRUCTURE, make_rng


def make_random_internal_matrix(N: int, spectral_radius_target: float,
                                density: float = 1.0, seed: int = 0) -> np.ndarray:
    """Sparse random Gaussian matrix rescaled to an exact spectral radius.

    Entries are standard normal, independently zeroed with probability
    1 - density, then rescaled so the spectral radius (computed exactly from
    the eigenvalues) equals the target within 1e-6.  An all-zero draw (likely
    only at tiny density) is retried up to 8 times.
    """
    if N < 1:
        raise ConfigError("N must be >= 1")
    if not (0.0 < spectral_radius_target < 1.0):
        raise ConfigError("spectral radius target must lie in (0, 1)")
    if not (0.0 < density <= 1.0):
        raise ConfigError("density must lie in (0, 1]")
    for attempt in range(8):
        rng = make_rng(seed, STREAM_STRUCTURE, attempt)
        W = rng.standard_normal((N, N))
        if density < 1.0:
            W *= rng.random((N, N)) < density
        radius = np.max(np.abs(np.linalg.eigvals(W)))
        if radius > 0:
            return W * (spectral_radius_target / radius)
    raise ConfigError("failed to draw a nonzero internal matrix in 8 attempts")


@dataclass
class LinearReservoirParams:
    N: int = 100
    spectral_radius_target: float = 0.9
    density: float = 0.1
    noise_sigma: float = 0.05
    seed: int = 0
    W: np.ndarray | None = None  # explicit matrix overrides the random draw


class LinearReservoir(Reservoir):
    """x_{t+1} = W x_t + drive_t + sigma * eta_t, observation = state."""

    def __init__(self, params: LinearReservoirParams, noise_key: int = 0):
        super().__init__(params.seed, noise_key)
        self.params = params
        if params.W is not None:
            self.W = np.asarray(params.W, dtype=float)
            if self.W.shape != (params.N, params.N):
                raise ConfigError(f"W shape {self.W.shape} != ({params.N}, {params.N})")
        else:
            self.W = make_random_internal_matrix(
                params.N, params.spectral_radius_target, params.density, params.seed)
        if not np.isfinite(params.noise_sigma) or params.noise_sigma < 0:
            raise ConfigError("noise_sigma must be finite and >= 0")
        self.obs_dim = params.N
        self.n_in = params.N
        self.x = np.zeros(params.N)

    def _update(self, pre: np.ndarray) -> np.ndarray:
        return pre

    def _advance(self, drive: np.ndarray) -> None:
        pre = self.W @ self.x + drive
        if self.params.noise_sigma > 0:
            pre = pre + self.params.noise_sigma * self._rng.standard_normal(self.params.N)
        self.x = self._update(pre)
        self._check_finite(self.x)

    def _observe(self) -> np.ndarray:
        return self.x.copy()

    def _state_vars(self) -> dict:
        return {"x": self.x}

    def _set_state_vars(self, state: dict) -> None:
        self.x = state["x"]

    def set_state(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.params.N,):
            raise ValueError(f"state must have shape ({self.params.N},)")
        self.x = x.copy()

    def clone(self, noise_key: int | None = None):
        key = self.noise_key if noise_key is None else noise_key
        # pass the realized W so clones never re-draw structure
        p = LinearReservoirParams(**{**self.params.__dict__, "W": self.W})
        return type(self)(p, noise_key=key)


class EsnReservoir(LinearReservoir):
    """x_{t+1} = tanh(W x_t + drive_t + sigma * eta_t), observation = state."""

    def _update(self, pre: np.ndarray) -> np.ndarray:
        return np.tanh(pre)


# conventional aliases used by tests and docs
EsnParams = LinearReservoirParams


def linear_step(state: np.ndarray, W: np.ndarray, drive: np.ndarray,
                noise_sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Single linear update; functional form of LinearReservoir._advance."""
    pre = W @ state + drive
    if noise_sigma > 0:
        pre = pre + noise_sigma * rng.standard_normal(state.shape[0])
    return pre


def esn_step(state: np.ndarray, W: np.ndarray, drive: np.ndarray,
             noise_sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Single tanh update; functional form of EsnReservoir._advance."""
    return np.tanh(linear_step(state, W, drive, noise_sigma, rng))
