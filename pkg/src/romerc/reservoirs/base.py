"""Common simulation contract for all reservoir models.

A reservoir is a stateful system advanced one input symbol at a time.  Each
``step(drive)`` consumes a forcing vector expressed in the model's injection
coordinates (length ``n_in``) and returns one observation vector (length
``obs_dim``).  Continuous models subcycle internally; delays are always
counted in symbols.

Randomness is split into named streams derived from the structure seed with
``numpy.random.SeedSequence([seed, stream_tag, *keys])`` over PCG64, so that

* the network structure is identical across clones,
* the dynamics-noise stream can be re-keyed per trial (``clone(noise_key)``),
* snapshot/restore reproduces the exact noise sequence, which is what the
  common-random-numbers response probing relies on.
"""

from __future__ import annotations

import copy

import numpy as np

# stream tags for SeedSequence([seed, tag, *keys])
STREAM_STRUCTURE = 0xA1
STREAM_INIT = 0xB2
STREAM_NOISE = 0xC3
STREAM_INPUT = 0xD4
STREAM_ENCODER = 0xE5


def make_rng(seed: int, stream: int, *keys: int) -> np.random.Generator:
    """Deterministic PCG64 generator for a named stream of a root seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream, *keys])))


class NumericalBlowupError(RuntimeError):
    """State became NaN/Inf during simulation; message carries the step index."""


class ConfigError(ValueError):
    """Model parameters violate a construction-time invariant."""


class Reservoir:
    """Base class; subclasses implement ``_advance`` and ``_observe``.

    Attributes
    ----------
    obs_dim : int
        Length of the observation vector.
    n_in : int
        Number of allowed input-injection coordinates.
    step_duration : float
        Physical time units per symbol (1.0 for discrete-time models).
    """

    obs_dim: int
    n_in: int
    step_duration: float = 1.0

    def __init__(self, seed: int, noise_key: int = 0):
        self.seed = int(seed)
        self.noise_key = int(noise_key)
        self._rng = make_rng(self.seed, STREAM_NOISE, self.noise_key)
        self._step_count = 0

    # -- subclass hooks -------------------------------------------------
    def _advance(self, drive: np.ndarray) -> None:
        raise NotImplementedError

    def _observe(self) -> np.ndarray:
        raise NotImplementedError

    def _state_vars(self) -> dict:
        """Mutable state arrays to include in snapshots (beyond RNG)."""
        raise NotImplementedError

    def _set_state_vars(self, state: dict) -> None:
        raise NotImplementedError

    # -- public contract -------------------------------------------------
    def step(self, drive: np.ndarray | None = None) -> np.ndarray:
        """Advance one symbol under the given injection forcing; observe."""
        if drive is None:
            drive = np.zeros(self.n_in)
        drive = np.asarray(drive, dtype=float)
        if drive.shape != (self.n_in,):
            raise ValueError(f"drive must have shape ({self.n_in},), got {drive.shape}")
        self._advance(drive)
        self._step_count += 1
        return self._observe()

    def run(self, drives: np.ndarray | None, n_steps: int | None = None) -> np.ndarray:
        """Step through a (T, n_in) drive array (or T zero-input steps)."""
        if drives is None:
            assert n_steps is not None
            drives = np.zeros((n_steps, self.n_in))
        drives = np.asarray(drives, dtype=float)
        out = np.empty((drives.shape[0], self.obs_dim))
        for t in range(drives.shape[0]):
            out[t] = self.step(drives[t])
        return out

    def snapshot(self) -> dict:
        """Copy of dynamic state plus RNG state; restore() resumes exactly."""
        return {
            "vars": copy.deepcopy(self._state_vars()),
            "rng": self._rng.bit_generator.state,
            "step_count": self._step_count,
        }

    def restore(self, snap: dict) -> None:
        self._set_state_vars(copy.deepcopy(snap["vars"]))
        self._rng.bit_generator.state = snap["rng"]
        self._step_count = snap["step_count"]

    def clone(self, noise_key: int | None = None) -> "Reservoir":
        """Fresh instance: identical structure, reset state, re-keyed noise."""
        raise NotImplementedError

    def suggest_probe_amplitude(self) -> float:
        """Model-scale default perturbation amplitude for response probing."""
        return 1e-3

    def _check_finite(self, arr: np.ndarray) -> None:
        if not np.all(np.isfinite(arr)):
            raise NumericalBlowupError(f"non-finite state at step {self._step_count}")
