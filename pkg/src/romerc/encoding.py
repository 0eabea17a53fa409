"""Task-weighted memory operator and power-constrained encoder construction.

The operator ``M_w = sum_k w(k) R(k)^T inv(Sigma_ref + eps I) R(k)`` scores
injection directions by how much delayed-input information a linear readout
can recover per unit of (whitened) input power.  The best encoder under a
fixed power budget is built from its leading eigenvectors.

Whitening convention: the power constraint applies to
``G_white = G @ sqrtm(Sigma_sig)``; the encoder stores the raw ``G`` used to
drive the reservoir together with the input covariance it was built for.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .numerics import DimensionError, SymEigResult, regularized_inverse, sym_eig
from .probe import FluctuationEstimate, ResponseKernel
from .reservoirs import STREAM_ENCODER, make_rng


@dataclass
class TaskWeights:
    """Nonnegative weights over discrete delays k >= 1."""

    entries: dict[int, float]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("task weights must contain at least one delay")
        for k, w in self.entries.items():
            if k < 1:
                raise ValueError(f"delay {k} must be >= 1")
            if w < 0:
                raise ValueError(f"weight for delay {k} must be >= 0")
        if not any(w > 0 for w in self.entries.values()):
            raise ValueError("at least one weight must be positive")

    @classmethod
    def single_delay(cls, k: int) -> "TaskWeights":
        return cls({int(k): 1.0})

    @classmethod
    def uniform(cls, k_max: int) -> "TaskWeights":
        return cls({k: 1.0 for k in range(1, k_max + 1)})

    def max_delay(self) -> int:
        return max(self.entries)


def _sigma_sig_matrix(sigma_sig, m: int) -> np.ndarray:
    S = np.asarray(sigma_sig, dtype=float)
    if S.ndim == 0:
        S = float(S) * np.eye(m)
    if S.shape != (m, m):
        raise DimensionError(f"input covariance must be {m}x{m}, got {S.shape}")
    return S


def _sqrtm_psd(S: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (S + S.T))
    if vals.min() < -1e-12 * max(vals.max(), 1.0):
        raise ValueError("input covariance must be PSD")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


@dataclass
class Encoder:
    """Input matrix with a whitened-power budget.

    ``G`` has shape (n_in, m); the drive applied to the reservoir at symbol t
    is ``G @ u_t``.  ``power`` is the squared Frobenius norm of the whitened
    matrix ``G @ sqrtm(sigma_sig)``.
    """

    G: np.ndarray
    power: float
    sigma_sig: float | np.ndarray = 1.0
    active_directions: int = 1
    power_split: tuple[float, ...] = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.G = np.atleast_2d(np.asarray(self.G, dtype=float))
        got = float(np.sum(self.whitened() ** 2))
        if abs(got - self.power) > 1e-10 * max(self.power, 1e-300):
            raise ValueError(f"whitened power {got!r} != declared {self.power!r}")

    @property
    def n_in(self) -> int:
        return self.G.shape[0]

    @property
    def m(self) -> int:
        return self.G.shape[1]

    def whitened(self) -> np.ndarray:
        S = _sigma_sig_matrix(self.sigma_sig, self.m)
        return self.G @ _sqrtm_psd(S)

    def drive(self, u) -> np.ndarray:
        """Forcing vector for one input sample (scalar or length-m)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return self.G @ u

    def to_dict(self, provenance: dict | None = None) -> dict:
        return {
            "version": 1,
            "n_in": self.n_in,
            "m": self.m,
            "P": self.power,
            "r": self.active_directions,
            "power_split": list(self.power_split),
            "sigma_sig": (self.sigma_sig if np.isscalar(self.sigma_sig)
                          else np.asarray(self.sigma_sig).ravel().tolist()),
            "G": self.G.ravel().tolist(),
            "provenance": provenance or self.meta.get("provenance", {}),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Encoder":
        if d.get("version") != 1:
            raise ValueError(f"unsupported encoder version {d.get('version')}")
        sigma_sig = d["sigma_sig"]
        if isinstance(sigma_sig, list):
            sigma_sig = np.asarray(sigma_sig, dtype=float).reshape(d["m"], d["m"])
        return cls(G=np.asarray(d["G"], dtype=float).reshape(d["n_in"], d["m"]),
                   power=d["P"], sigma_sig=sigma_sig,
                   active_directions=d["r"], power_split=tuple(d["power_split"]),
                   meta={"provenance": d.get("provenance", {})})


@dataclass
class MemoryOperator:
    """Symmetric PSD operator over injection coordinates plus its spectrum."""

    M_w: np.ndarray
    eigen: SymEigResult
    weights_used: TaskWeights

    @property
    def n_in(self) -> int:
        return self.M_w.shape[0]

    def top_eigenvalue(self) -> float:
        return float(self.eigen.eigenvalues[0])

    def operator_hash(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.M_w).tobytes()).hexdigest()


def build_memory_operator(kernel: ResponseKernel, fluct: FluctuationEstimate,
                          weights: TaskWeights, eps_rel: float = 1e-6) -> MemoryOperator:
    """Assemble and eigendecompose the delay-weighted response/noise operator."""
    if fluct.sigma_ref.shape[0] != kernel.obs_dim:
        raise DimensionError("kernel and fluctuation dimensions disagree")
    if weights.max_delay() > kernel.k_max:
        raise ValueError(f"weights reference delay {weights.max_delay()} beyond "
                         f"kernel k_max={kernel.k_max}")
    inv_sigma = regularized_inverse(fluct.sigma_ref, eps_rel)
    M = np.zeros((kernel.n_in, kernel.n_in))
    for k in sorted(weights.entries):
        w = weights.entries[k]
        if w == 0.0:
            continue
        R = kernel.block(k)
        M += w * (R.T @ inv_sigma @ R)
    M = 0.5 * (M + M.T)
    return MemoryOperator(M_w=M, eigen=sym_eig(M), weights_used=weights)


def optimal_encoder(op: MemoryOperator, P: float, r: int = 1, m: int = 1,
                    power_split=None, sigma_sig=1.0) -> Encoder:
    """Leading-eigenvector encoder at whitened power P.

    Directions are the r top eigenvectors of the operator, one per input
    channel, with the power split uniformly unless given.  The predicted
    objective ``sum_i p_i * lambda_i`` is stored in ``meta['predicted_objective']``.
    """
    if P <= 0:
        raise ValueError("power must be positive")
    if not 1 <= r <= min(op.n_in, m):
        raise ValueError(f"r={r} must lie in 1..min(n_in={op.n_in}, m={m})")
    if power_split is None:
        split = np.full(r, P / r)
    else:
        split = np.asarray(power_split, dtype=float)
        if split.shape != (r,) or np.any(split < 0) or abs(split.sum() - P) > 1e-10 * P:
            raise ValueError("power_split must be r nonnegative values summing to P")
    lam = op.eigen.eigenvalues
    degenerate = bool(lam.size > 1 and lam[0] - lam[1] < 1e-8 * abs(lam[0]))
    if lam[r - 1] <= 1e-12 * max(lam[0], 0.0):
        import warnings
        warnings.warn(f"direction {r} is numerically degenerate (rank of operator "
                      f"below r)", UserWarning)
    G_white = np.zeros((op.n_in, m))
    for i in range(r):
        G_white[:, i] = np.sqrt(split[i]) * op.eigen.eigenvectors[:, i]
    S = _sigma_sig_matrix(sigma_sig, m)
    inv_sqrt = np.linalg.inv(_sqrtm_psd(S))
    return Encoder(G=G_white @ inv_sqrt, power=float(P), sigma_sig=sigma_sig,
                   active_directions=r, power_split=tuple(split.tolist()),
                   meta={"predicted_objective": float(np.dot(split, lam[:r])),
                         "degenerate_top": degenerate,
                         "operator_hash": op.operator_hash()})


def random_encoder(P: float, n_in: int, m: int = 1, seed: int = 0,
                   sigma_sig=1.0) -> Encoder:
    """Gaussian encoder rescaled to exact whitened power P (baseline)."""
    if P <= 0:
        raise ValueError("power must be positive")
    rng = make_rng(seed, STREAM_ENCODER)
    G_white = rng.standard_normal((n_in, m))
    G_white *= np.sqrt(P) / np.linalg.norm(G_white)
    S = _sigma_sig_matrix(sigma_sig, m)
    inv_sqrt = np.linalg.inv(_sqrtm_psd(S))
    return Encoder(G=G_white @ inv_sqrt, power=float(P), sigma_sig=sigma_sig,
                   active_directions=min(n_in, m), power_split=(),
                   meta={"kind": "random", "seed": seed})


def predicted_objective(op: MemoryOperator, enc: Encoder) -> float:
    """Tr(G_white^T M_w G_white): the operator's score for this encoder."""
    Gw = enc.whitened()
    if Gw.shape[0] != op.n_in:
        raise DimensionError(f"encoder n_in={Gw.shape[0]} != operator n_in={op.n_in}")
    return float(np.trace(Gw.T @ op.M_w @ Gw))


def alignment(enc_a: Encoder, enc_b: Encoder) -> float:
    """|cos| between two encoders viewed as flat vectors (sign-invariant)."""
    a = enc_a.G.ravel()
    b = enc_b.G.ravel()
    if a.shape != b.shape:
        raise DimensionError("encoders have different shapes")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("alignment undefined for a zero encoder")
    return float(min(abs(a @ b) / (na * nb), 1.0))
