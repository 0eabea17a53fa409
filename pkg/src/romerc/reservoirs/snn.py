"""Heterogeneous excitatory/inhibitory LIF network reservoir.

Forward-Euler membrane integration with per-neuron time constants and
thresholds, exponential synaptic traces feeding a signed weight matrix that
obeys Dale's law, hard reset plus an absolute refractory period, and an
exponential spike filter that defines the observation on a readout subset.

Input currents are injected on a distinct input subset and held constant
over the substeps of one symbol; the observation (filtered spike trains of
the readout subset) is sampled once per symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import ConfigError, Reservoir, STREAM_STRUCTURE, make_rng


@dataclass
class LifSnnParams:
    N: int = 200
    frac_excitatory: float = 0.8
    tau_m_range: tuple[float, float] = (10.0, 30.0)   # ms
    v_rest: float = -65.0                             # mV
    v_reset: float = -65.0
    v_th_range: tuple[float, float] = (-55.0, -50.0)
    t_ref: float = 2.0                                # ms
    tau_syn: float = 5.0
    tau_filter: float = 20.0
    weight_scale_E: float = 2.0
    weight_scale_I: float = 8.0
    connection_prob: float = 0.1
    noise_current_sigma: float = 25.0
    input_subset: tuple[int, ...] = tuple(range(20))
    readout_subset: tuple[int, ...] = tuple(range(100, 200))
    dt: float = 0.1                                   # ms
    substeps_per_symbol: int = 200
    seed: int = 0


class LifSnnReservoir(Reservoir):
    def __init__(self, params: LifSnnParams, noise_key: int = 0):
        super().__init__(params.seed, noise_key)
        p = params
        if p.N < 1 or not (0.0 < p.frac_excitatory < 1.0):
            raise ConfigError("need N >= 1 and frac_excitatory in (0, 1)")
        if not (0.0 < p.connection_prob <= 1.0):
            raise ConfigError("connection_prob must lie in (0, 1]")
        if len(p.input_subset) == 0 or len(p.readout_subset) == 0:
            raise ConfigError("input and readout subsets must be nonempty")
        if max(p.input_subset) >= p.N or max(p.readout_subset) >= p.N:
            raise ConfigError("subset indices out of range")
        ref_steps = p.t_ref / p.dt
        if abs(ref_steps - round(ref_steps)) > 1e-9:
            raise ConfigError("t_ref must be an integer multiple of dt")
        self.params = p
        self._ref_steps = int(round(ref_steps))
        self.obs_dim = len(p.readout_subset)
        self.n_in = len(p.input_subset)
        self.step_duration = p.dt * p.substeps_per_symbol
        self._input_idx = np.asarray(p.input_subset, dtype=int)
        self._readout_idx = np.asarray(p.readout_subset, dtype=int)

        rng = make_rng(p.seed, STREAM_STRUCTURE)
        self.n_exc = int(round(p.frac_excitatory * p.N))
        self.is_excitatory = np.zeros(p.N, dtype=bool)
        self.is_excitatory[:self.n_exc] = True
        self.tau_m = rng.uniform(*p.tau_m_range, size=p.N)
        self.v_th = rng.uniform(*p.v_th_range, size=p.N)
        # Dale's law: column j (outgoing weights of neuron j) carries one sign
        mask = rng.random((p.N, p.N)) < p.connection_prob
        np.fill_diagonal(mask, False)
        mag = np.abs(rng.standard_normal((p.N, p.N)))
        sign = np.where(self.is_excitatory, 1.0, -1.0)[None, :]
        scale = np.where(self.is_excitatory, p.weight_scale_E, p.weight_scale_I)[None, :]
        self.W = mask * mag * sign * scale

        self._syn_decay = np.exp(-p.dt / p.tau_syn)
        self._filt_decay = np.exp(-p.dt / p.tau_filter)
        self.V = np.full(p.N, p.v_rest)
        self.syn = np.zeros(p.N)
        self.filt = np.zeros(p.N)
        self.ref_count = np.zeros(p.N, dtype=int)
        self._last_spike_step = np.full(p.N, -10 ** 9)
        self._substep_count = 0

    def suggest_probe_amplitude(self) -> float:
        # 5% of the mean rheobase current v_th - v_rest
        return 0.05 * float(np.mean(self.v_th - self.params.v_rest))

    def _advance(self, drive: np.ndarray) -> None:
        p = self.params
        I_in = np.zeros(p.N)
        I_in[self._input_idx] = drive
        sqrt_dt = np.sqrt(p.dt)
        for _ in range(p.substeps_per_symbol):
            self.syn *= self._syn_decay
            self.filt *= self._filt_decay
            I_syn = self.W @ self.syn
            eta = self._rng.standard_normal(p.N)
            dV = (p.dt * (-(self.V - p.v_rest) + I_syn + I_in)
                  + p.noise_current_sigma * sqrt_dt * eta) / self.tau_m
            refractory = self.ref_count > 0
            self.V = np.where(refractory, p.v_reset, self.V + dV)
            self.ref_count[refractory] -= 1
            spiked = self.V >= self.v_th
            if np.any(spiked):
                self.V[spiked] = p.v_reset
                self.ref_count[spiked] = self._ref_steps
                self.syn[spiked] += 1.0
                self.filt[spiked] += 1.0
                self._last_spike_step[spiked] = self._substep_count
            self._substep_count += 1
        self._check_finite(self.V)

    def _observe(self) -> np.ndarray:
        return self.filt[self._readout_idx].copy()

    def _state_vars(self) -> dict:
        return {"V": self.V, "syn": self.syn, "filt": self.filt,
                "ref_count": self.ref_count,
                "last_spike": self._last_spike_step,
                "substeps": self._substep_count}

    def _set_state_vars(self, state: dict) -> None:
        self.V = state["V"]
        self.syn = state["syn"]
        self.filt = state["filt"]
        self.ref_count = state["ref_count"]
        self._last_spike_step = state["last_spike"]
        self._substep_count = state["substeps"]

    def clone(self, noise_key: int | None = None):
        key = self.noise_key if noise_key is None else noise_key
        return LifSnnReservoir(self.params, noise_key=key)
