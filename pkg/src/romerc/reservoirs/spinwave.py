"""1-D traveling-wave envelope reservoir on a finite waveguide.

Complex field ``psi`` on ``Nx`` cells, advanced by explicit substeps:

* advection at group velocity ``v_g`` by first-order upwind differences
  (backward difference for ``v_g > 0``),
* dispersion ``i D d^2/dx^2`` by central second differences,
* damping and carrier rotation applied exactly per substep via
  ``exp((-Gamma + i Omega0) dt)``,
* forcing and complex Gaussian noise added per substep.

Boundaries: zero-inflow ghost on the left, copy-out ghost on the right, plus
a linear absorbing ramp (damping rising to 10x Gamma) over the last
``absorb_ramp`` cells so outgoing waves do not reflect.

Injection degrees of freedom are the real and imaginary parts of the forcing
coefficient on each of the first ``w_in`` cells (``n_in = 2 * w_in``); the
observation is the amplitude ``|psi|`` on the readout window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import ConfigError, Reservoir


@dataclass
class SpinWaveParams:
    Nx: int = 200
    dx: float = 1.0
    dt: float = 0.1
    substeps_per_symbol: int = 10
    Gamma: float = 0.05
    Omega0: float = 1.0
    v_g: float = 5.0
    D: float = 0.5
    noise_sigma: float = 0.02
    w_in: int = 10
    w_out: tuple[int, int] = (120, 40)  # (start cell, cell count)
    absorb_ramp: int = 20
    seed: int = 0


def _check_cfl(p: SpinWaveParams) -> None:
    bounds = []
    if p.v_g > 0:
        bounds.append(p.dx / p.v_g)
    if p.D > 0:
        bounds.append(p.dx ** 2 / (2.0 * p.D))
    if p.Gamma > 0:
        bounds.append(1.0 / p.Gamma)
    if bounds and p.dt > 0.5 * min(bounds) * (1 + 1e-12):
        raise ConfigError(
            f"dt={p.dt} violates stability bound 0.5*min(dx/v_g, dx^2/2D, 1/Gamma)"
            f"={0.5 * min(bounds):.6g}")


class SpinWaveReservoir(Reservoir):
    def __init__(self, params: SpinWaveParams, noise_key: int = 0):
        super().__init__(params.seed, noise_key)
        p = params
        if p.Nx < 4 or p.dx <= 0 or p.dt <= 0 or p.substeps_per_symbol < 1:
            raise ConfigError("grid/time parameters must be positive")
        if p.v_g < 0 or p.D < 0 or p.Gamma < 0 or p.noise_sigma < 0:
            raise ConfigError("rates must be nonnegative")
        _check_cfl(p)
        start, count = p.w_out
        if p.w_in < 1 or count < 1:
            raise ConfigError("input/readout windows must be nonempty")
        if p.w_in + count > p.Nx or start + count > p.Nx or start < 0:
            raise ConfigError("input plus readout windows must fit inside the grid")
        if not p.absorb_ramp < p.Nx / 4:
            raise ConfigError("absorb_ramp must be below Nx/4")
        self.params = p
        self.obs_dim = count
        self.n_in = 2 * p.w_in
        self.step_duration = p.dt * p.substeps_per_symbol

        # per-cell damping, ramped linearly up to 10x Gamma at the right edge
        gamma = np.full(p.Nx, p.Gamma)
        if p.absorb_ramp > 0:
            ramp = 1.0 + 9.0 * np.arange(1, p.absorb_ramp + 1) / p.absorb_ramp
            gamma[p.Nx - p.absorb_ramp:] = p.Gamma * ramp
        self._decay = np.exp((-gamma + 1j * p.Omega0) * p.dt)
        self.psi = np.zeros(p.Nx, dtype=complex)

    def suggest_probe_amplitude(self) -> float:
        # 1% of the stationary field scale sigma/sqrt(2*Gamma)
        p = self.params
        if p.noise_sigma > 0 and p.Gamma > 0:
            return 0.01 * p.noise_sigma / np.sqrt(2.0 * p.Gamma)
        return 1e-3

    def _substep(self, forcing: np.ndarray, noise_std: float) -> None:
        p = self.params
        psi = self.psi
        # ghost cells: zero inflow left, copy-out right
        left = np.concatenate(([0.0 + 0.0j], psi[:-1]))
        right = np.concatenate((psi[1:], psi[-1:]))
        adv = -p.v_g * (psi - left) / p.dx
        disp = 1j * p.D * (right - 2.0 * psi + left) / p.dx ** 2
        psi = psi + p.dt * (adv + disp)
        psi = psi * self._decay
        if forcing is not None:
            psi[:p.w_in] = psi[:p.w_in] + p.dt * forcing
        if noise_std > 0:
            eta = self._rng.standard_normal((2, p.Nx))
            psi = psi + noise_std * (eta[0] + 1j * eta[1])
        self.psi = psi

    def _advance(self, drive: np.ndarray) -> None:
        p = self.params
        forcing = drive[:p.w_in] + 1j * drive[p.w_in:]
        if not np.any(forcing):
            forcing = None
        # complex noise of total std sigma*sqrt(dt): each component gets /sqrt(2)
        noise_std = p.noise_sigma * np.sqrt(p.dt / 2.0)
        for _ in range(p.substeps_per_symbol):
            self._substep(forcing, noise_std)
        self._check_finite(self.psi)

    def _observe(self) -> np.ndarray:
        start, count = self.params.w_out
        return np.abs(self.psi[start:start + count])

    def _state_vars(self) -> dict:
        return {"psi": self.psi}

    def _set_state_vars(self, state: dict) -> None:
        self.psi = state["psi"]

    def clone(self, noise_key: int | None = None):
        key = self.noise_key if noise_key is None else noise_key
        return SpinWaveReservoir(self.params, noise_key=key)
