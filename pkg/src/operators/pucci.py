import numpy as np

from common.exceptions import DomainError


def _symmetric_eigenvalues(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != X.shape[-2]:
        raise DomainError('Pucci operators take square matrices')
    if not np.allclose(X, np.swapaxes(X, -1, -2), rtol=0, atol=1e-12):
        raise DomainError('Pucci operators take symmetric matrices')
    return np.linalg.eigvalsh(X)


def pucci_apply(X: np.ndarray, lam: float, Lam: float, sign: int = 1) -> np.ndarray:
    """
    M⁺(X) = Λ·Σ_{μ>0} μ + λ·Σ_{μ<0} μ and M⁻(X) = λ·Σ_{μ>0} μ + Λ·Σ_{μ<0} μ
    over the eigenvalues μ of X; stacked matrices give one value each.
    """
    if not 0 < lam <= Lam:
        raise DomainError('ellipticity bounds must satisfy 0 < λ ≤ Λ')

    mu = _symmetric_eigenvalues(X)
    positive = np.where(mu > 0, mu, 0.0).sum(axis=-1)
    negative = np.where(mu < 0, mu, 0.0).sum(axis=-1)
    if sign > 0:
        return Lam * positive + lam * negative
    return lam * positive + Lam * negative


def pucci_dual(X: np.ndarray, lam: float, Lam: float, sign: int = 1) -> np.ndarray:
    """M∓(X) computed as −M±(−X)."""
    return -pucci_apply(-np.asarray(X, dtype=float), lam, Lam, sign)


def frozen_pucci_coefficients(
    hessian: np.ndarray,
    gradient: np.ndarray,
    ellipticity: tuple,
    drift_magnitude: np.ndarray,
    sign: int,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Linear coefficients reproducing M±(H) ± |b||G| at the given Hessians and
    gradients: Ã = V diag(θ) Vᵀ with θ = Λ or λ per eigenvalue sign of H, and
    drift ±|b|·G/|G| (zero where G vanishes).
    """
    lam, Lam = ellipticity
    mu, vectors = np.linalg.eigh(hessian)
    if sign > 0:
        theta = np.where(mu > 0, Lam, lam)
    else:
        theta = np.where(mu > 0, lam, Lam)
    matrices = np.einsum('nik,nk,njk->nij', vectors, theta, vectors)

    size = np.linalg.norm(gradient, axis=1)
    direction = np.zeros_like(gradient)
    moving = size > 0
    direction[moving] = gradient[moving] / size[moving, None]
    drift = sign * drift_magnitude[:, None] * direction

    return matrices, drift
