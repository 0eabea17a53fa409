"""Working-point measurements: steady-state fluctuations and linear response.

Both estimators run the reservoir at zero input.  The response kernel is
probed with impulsive perturbations along each injection coordinate, using
common random numbers: the perturbed and unperturbed branches restart from
one snapshot (state plus RNG state), so intrinsic noise cancels in the
difference.  Lag ``k`` means the input was applied ``k`` symbols before the
observation; the first observation after the impulse step is lag 1.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import solve_discrete_lyapunov
from .reservoirs import Reservoir

# noise keys for probe trials live far away from eval seed keys
_PROBE_TRIAL_KEY_BASE = 0x9000_0000


class WorkingPointWarning(UserWarning):
    """Zero-input run looks non-stationary; the working point may drift."""


class NonlinearResponseWarning(UserWarning):
    """Perturbed response is suspiciously large; reduce the probe amplitude."""


@dataclass
class FluctuationEstimate:
    """Mean and centered covariance of observations at zero input."""

    mean: np.ndarray
    sigma_ref: np.ndarray
    sample_count: float  # math.inf for analytic results

    def validate(self) -> "FluctuationEstimate":
        S = self.sigma_ref
        if not np.allclose(S, S.T, atol=1e-10 * max(1.0, float(np.abs(S).max()))):
            raise ValueError("sigma_ref is not symmetric")
        vals = np.linalg.eigvalsh(0.5 * (S + S.T))
        if vals.min() < -1e-10 * max(np.trace(S), 1e-300):
            raise ValueError("sigma_ref has a significantly negative eigenvalue")
        return self


@dataclass
class ResponseKernel:
    """Blocks R(k), k = 1..k_max, each of shape (obs_dim, n_in)."""

    blocks: np.ndarray  # (k_max, obs_dim, n_in)
    probe_amplitude: float
    trials: int

    @property
    def k_max(self) -> int:
        return self.blocks.shape[0]

    @property
    def obs_dim(self) -> int:
        return self.blocks.shape[1]

    @property
    def n_in(self) -> int:
        return self.blocks.shape[2]

    def block(self, k: int) -> np.ndarray:
        """R(k) for 1-based lag k."""
        if not 1 <= k <= self.k_max:
            raise ValueError(f"lag {k} outside 1..{self.k_max}")
        return self.blocks[k - 1]


def _halves_stationarity_check(obs: np.ndarray) -> None:
    """Warn when first/second-half means differ by > 5 SE in > 10% of coords.

    Standard errors use batch means (16 batches per half) so the check stays
    calibrated for autocorrelated series.
    """
    T = obs.shape[0]
    if T < 64:
        return
    half = T // 2
    n_batch = 16
    a, b = obs[:half], obs[half:2 * half]
    ba = a[:(half // n_batch) * n_batch].reshape(n_batch, -1, obs.shape[1]).mean(axis=1)
    bb = b[:(half // n_batch) * n_batch].reshape(n_batch, -1, obs.shape[1]).mean(axis=1)
    se = np.sqrt(ba.var(axis=0, ddof=1) / n_batch + bb.var(axis=0, ddof=1) / n_batch)
    diff = np.abs(a.mean(axis=0) - b.mean(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.where(se > 0, diff / se, 0.0)
    flags = int(np.sum(z > 5.0))
    if flags > 0.1 * obs.shape[1]:
        warnings.warn(
            f"possible non-stationarity: {flags}/{obs.shape[1]} coordinates moved "
            f"by > 5 standard errors between run halves", WorkingPointWarning)


def estimate_fluctuations(reservoir: Reservoir, T: int, burn_in: int = 200) -> FluctuationEstimate:
    """Zero-input mean and covariance over T symbols after a burn-in."""
    if T < 10 * reservoir.obs_dim:
        raise ValueError(f"T={T} too short; need at least 10*obs_dim={10 * reservoir.obs_dim}")
    reservoir.run(None, burn_in)
    obs = reservoir.run(None, T)
    _halves_stationarity_check(obs)
    mean = obs.mean(axis=0)
    D = obs - mean
    cov = D.T @ D / (T - 1)
    return FluctuationEstimate(mean=mean, sigma_ref=0.5 * (cov + cov.T),
                               sample_count=T).validate()


def analytic_fluctuations(W: np.ndarray, noise_sigma: float) -> FluctuationEstimate:
    """Exact stationary covariance of x' = Wx + sigma*eta via the Lyapunov solve."""
    W = np.asarray(W, dtype=float)
    N = W.shape[0]
    sigma = solve_discrete_lyapunov(W, noise_sigma ** 2 * np.eye(N))
    return FluctuationEstimate(mean=np.zeros(N), sigma_ref=sigma, sample_count=math.inf)


def analytic_response(W: np.ndarray, k_max: int) -> ResponseKernel:
    """R(k) = W^(k-1) for the linear model (injection on all coordinates)."""
    W = np.asarray(W, dtype=float)
    N = W.shape[0]
    blocks = np.empty((k_max, N, N))
    acc = np.eye(N)
    for k in range(k_max):
        blocks[k] = acc
        acc = W @ acc
    return ResponseKernel(blocks=blocks, probe_amplitude=0.0, trials=0)


def estimate_response(reservoir: Reservoir, k_max: int,
                      probe_amplitude: float | None = None, trials: int = 1,
                      burn_in: int = 200) -> ResponseKernel:
    """Impulse-probe the response kernel with common random numbers.

    For each trial: burn in at zero input, snapshot, run an unperturbed
    branch, then for each injection coordinate restore the snapshot, apply an
    impulse of ``probe_amplitude`` for one symbol, and record the observation
    differences at lags 1..k_max.  Trials are averaged in index order.
    """
    eps = probe_amplitude if probe_amplitude is not None else reservoir.suggest_probe_amplitude()
    if eps <= 0:
        raise ValueError("probe amplitude must be positive")
    if trials < 1:
        raise ValueError("need at least one trial")
    obs_dim, n_in = reservoir.obs_dim, reservoir.n_in
    acc = np.zeros((k_max, obs_dim, n_in))
    warned = False
    for trial in range(trials):
        r = reservoir.clone(noise_key=_PROBE_TRIAL_KEY_BASE + trial)
        r.run(None, burn_in)
        snap = r.snapshot()
        unpert = r.run(None, k_max)
        for j in range(n_in):
            r.restore(snap)
            impulse = np.zeros(n_in)
            impulse[j] = eps
            first = r.step(impulse)
            rest = r.run(None, k_max - 1) if k_max > 1 else np.empty((0, obs_dim))
            pert = np.vstack([first[None, :], rest])
            diff = pert - unpert
            if not warned and np.abs(diff).max() > 1e3 * eps:
                warnings.warn(
                    "response exceeds 1000x the probe amplitude; the probe may have "
                    "left the linear regime -- consider a smaller amplitude",
                    NonlinearResponseWarning)
                warned = True
            acc[:, :, j] += diff / eps
    return ResponseKernel(blocks=acc / trials, probe_amplitude=float(eps), trials=trials)


# ---------------------------------------------------------------------------
# serialization (versioned JSON artifact)

def stable_json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, allow_nan=False,
                      separators=(",", ":"))


def sha256_of(obj) -> str:
    return hashlib.sha256(stable_json_dumps(obj).encode("utf-8")).hexdigest()


def probe_to_dict(fluct: FluctuationEstimate, kernel: ResponseKernel,
                  metadata: dict | None = None) -> dict:
    if fluct.sigma_ref.shape[0] != kernel.obs_dim:
        raise ValueError("fluctuation and kernel observation dimensions differ")
    return {
        "version": 1,
        "obs_dim": kernel.obs_dim,
        "n_in": kernel.n_in,
        "k_max": kernel.k_max,
        "mean": fluct.mean.tolist(),
        "sigma_ref": fluct.sigma_ref.ravel().tolist(),
        "sample_count": None if math.isinf(fluct.sample_count) else int(fluct.sample_count),
        "blocks": [b.ravel().tolist() for b in kernel.blocks],
        "probe_amplitude": kernel.probe_amplitude,
        "trials": kernel.trials,
        "metadata": metadata or {},
    }


def probe_from_dict(d: dict) -> tuple[FluctuationEstimate, ResponseKernel]:
    if d.get("version") != 1:
        raise ValueError(f"unsupported probe artifact version {d.get('version')}")
    obs_dim, n_in, k_max = d["obs_dim"], d["n_in"], d["k_max"]
    fluct = FluctuationEstimate(
        mean=np.asarray(d["mean"], dtype=float),
        sigma_ref=np.asarray(d["sigma_ref"], dtype=float).reshape(obs_dim, obs_dim),
        sample_count=math.inf if d["sample_count"] is None else d["sample_count"])
    blocks = np.asarray(d["blocks"], dtype=float).reshape(k_max, obs_dim, n_in)
    kernel = ResponseKernel(blocks=blocks, probe_amplitude=d["probe_amplitude"],
                            trials=d["trials"])
    return fluct, kernel
