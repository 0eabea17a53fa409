"""Dense linear-algebra and statistics kernels shared by the rest of the package.

Everything here is a pure function of its arguments; no global state, no RNG.
Matrices are plain ``numpy.ndarray`` (float64, row-major).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Shapes of the inputs are inconsistent with the operation."""


class InvalidInputError(ValueError):
    """Input contains NaN/Inf or violates a documented precondition."""


class DivergenceError(RuntimeError):
    """Iteration cannot converge because the problem is unstable."""


class ConvergenceError(RuntimeError):
    """Iteration failed to reach the requested tolerance."""


class SingularityError(RuntimeError):
    """Matrix is singular and no regularization was requested."""


class InsufficientDataError(ValueError):
    """Not enough samples for the requested estimator."""


class UndefinedTargetError(ValueError):
    """Target series has zero variance; the metric is undefined."""


@dataclass
class SymEigResult:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    ``eigenvectors`` holds orthonormal eigenvectors as columns, with the sign
    of each column fixed so its largest-magnitude component is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(A: np.ndarray, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} contains NaN/Inf entries")
    return A


def sym_eig(A: np.ndarray) -> SymEigResult:
    """Eigendecomposition of a symmetric matrix with deterministic output.

    The input is symmetrized as (A + A^T)/2 first; asymmetry beyond 1e-10
    relative is rejected.  Eigenpairs are returned in descending eigenvalue
    order and each eigenvector's sign is fixed so that its largest-magnitude
    component is positive.
    """
    A = _as_square(A, "A")
    scale = np.linalg.norm(A)
    if scale > 0 and np.linalg.norm(A - A.T) > 1e-10 * scale:
        raise InvalidInputError("matrix is not symmetric within 1e-10 relative")
    A = 0.5 * (A + A.T)
    vals, vecs = np.linalg.eigh(A)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    # sign convention: largest-|.| component of each eigenvector positive
    for j in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[i, j] < 0:
            vecs[:, j] = -vecs[:, j]
    return SymEigResult(eigenvalues=vals, eigenvectors=vecs)


def spectral_radius_estimate(W: np.ndarray, iters: int = 200, tol: float = 1e-6,
                             seed: int = 0) -> float:
    """Estimate the spectral radius of a square matrix by power iteration.

    Tracks the geometric-mean growth rate of ``||W^k v||`` which converges to
    the spectral radius even when the dominant eigenvalues form a complex
    pair.  Cheap guard, not a high-accuracy eigensolver.
    """
    W = _as_square(W, "W")
    n = W.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    # warm-up to wash out non-dominant components
    warm = min(20, iters // 4)
    for _ in range(warm):
        w = W @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    log_growth = 0.0
    prev_est = None
    k = 0
    for k in range(1, iters + 1):
        w = W @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        log_growth += np.log(nw)
        v = w / nw
        est = np.exp(log_growth / k)
        if prev_est is not None and abs(est - prev_est) < tol * max(est, 1e-300):
            return float(est)
        prev_est = est
    return float(np.exp(log_growth / k))


def solve_discrete_lyapunov(W: np.ndarray, Q: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Solve ``S = W S W^T + Q`` by the doubling (Smith) iteration.

    Requires the spectral radius of ``W`` strictly below 1 (estimates >= 0.999
    are rejected).  The returned solution satisfies
    ``||S - W S W^T - Q||_F <= tol * ||Q||_F``.
    """
    W = _as_square(W, "W")
    Q = _as_square(Q, "Q")
    if W.shape != Q.shape:
        raise DimensionError(f"W {W.shape} and Q {Q.shape} differ")
    rho = spectral_radius_estimate(W)
    if rho >= 0.999:
        raise DivergenceError(f"spectral radius estimate {rho:.6f} >= 0.999")
    S = Q.copy()
    A = W.copy()
    q_norm = np.linalg.norm(Q)
    if q_norm == 0.0:
        return np.zeros_like(Q)
    for _ in range(64):
        resid = np.linalg.norm(S - W @ S @ W.T - Q)
        if resid <= tol * q_norm:
            S = 0.5 * (S + S.T)
            return S
        S = S + A @ S @ A.T
        A = A @ A
    raise ConvergenceError("doubling iteration did not reach tolerance in 64 steps")


def regularized_inverse(S: np.ndarray, eps_rel: float = 0.0) -> np.ndarray:
    """Symmetric inverse of a PSD matrix with relative Tikhonov regularization.

    Computes ``(S + eps I)^{-1}`` with ``eps = eps_rel * trace(S) / dim``.
    """
    S = _as_square(S, "S")
    if eps_rel < 0:
        raise InvalidInputError("eps_rel must be >= 0")
    n = S.shape[0]
    eps = eps_rel * np.trace(S) / n
    A = 0.5 * (S + S.T) + eps * np.eye(n)
    if np.allclose(A, 0.0):
        raise SingularityError("all-zero matrix with eps_rel = 0")
    try:
        L = np.linalg.cholesky(A)
        inv = np.linalg.inv(L)
        out = inv.T @ inv
    except np.linalg.LinAlgError:
        # PSD up to rounding: fall back to eigen-based pseudo-ish inverse
        vals, vecs = np.linalg.eigh(A)
        if np.max(vals) <= 0:
            raise SingularityError("matrix is singular; increase eps_rel") from None
        floor = np.max(vals) * 1e-14
        if np.min(vals) < floor:
            raise SingularityError("matrix is singular; increase eps_rel") from None
        out = (vecs / vals) @ vecs.T
    return 0.5 * (out + out.T)


def centered_covariance(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and unbiased (n-1 divisor) covariance of row samples."""
    X = np.asarray(samples, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2:
        raise InsufficientDataError("need at least 2 samples")
    mean = X.mean(axis=0)
    D = X - mean
    cov = D.T @ D / (X.shape[0] - 1)
    return mean, 0.5 * (cov + cov.T)


def pearson_corr_sq(y: np.ndarray, target: np.ndarray) -> float:
    """Squared Pearson correlation between two scalar series.

    Returns 0 when ``y`` has zero variance (conventional); a zero-variance
    target is an error.
    """
    y = np.asarray(y, dtype=float).ravel()
    t = np.asarray(target, dtype=float).ravel()
    if y.shape != t.shape:
        raise DimensionError(f"series lengths differ: {y.shape} vs {t.shape}")
    if y.size < 2:
        raise InsufficientDataError("need at least 2 points")
    ty = t - t.mean()
    vt = float(ty @ ty)
    if vt == 0.0:
        raise UndefinedTargetError("target series has zero variance")
    yy = y - y.mean()
    vy = float(yy @ yy)
    if vy == 0.0:
        return 0.0
    c = float(yy @ ty)
    r2 = c * c / (vy * vt)
    return min(r2, 1.0)


def coeff_determination(prediction: np.ndarray, target: np.ndarray) -> float:
    """Coefficient of determination 1 - SSE/SST (may be negative)."""
    p = np.asarray(prediction, dtype=float).ravel()
    t = np.asarray(target, dtype=float).ravel()
    if p.shape != t.shape:
        raise DimensionError(f"series lengths differ: {p.shape} vs {t.shape}")
    if p.size < 2:
        raise InsufficientDataError("need at least 2 points")
    sst = float(np.sum((t - t.mean()) ** 2))
    if sst == 0.0:
        raise UndefinedTargetError("target series has zero variance")
    sse = float(np.sum((p - t) ** 2))
    return 1.0 - sse / sst
