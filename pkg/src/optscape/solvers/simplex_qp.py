"""Simplex-constrained quadratic program for portfolio selection.

Minimizes ``alpha * x' G x - mu' x`` over the probability simplex with
projected gradient descent (fixed step 1/L, L from the largest eigenvalue
of G by power iteration), followed by an active-set refinement that solves
the reduced KKT system exactly once the support has settled. Convergence
is certified by the natural-map KKT residual ``||x - P(x - grad)||_inf``,
which is zero exactly at KKT points.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, NumericalError
from ..problems.types import Solution


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort algorithm)."""
    v = np.asarray(v, dtype=np.float64)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.flatnonzero(u * np.arange(1, v.size + 1) > css)[-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def kkt_residual(x: np.ndarray, mu_hat: np.ndarray, G: np.ndarray, alpha: float) -> float:
    """Natural-map KKT residual of the simplex QP at x."""
    grad = 2.0 * alpha * (G @ x) - mu_hat
    return float(np.max(np.abs(x - project_to_simplex(x - grad))))


def _power_lambda_max(G: np.ndarray, iters: int = 100) -> float:
    k = G.shape[0]
    v = 1.0 + 1e-3 * np.arange(k)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = G @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        lam = norm
    return float(lam)


def _polish(x, mu_hat, G, alpha, support_tol=1e-9):
    """Solve the reduced KKT system on the current support; None if invalid."""
    support = np.flatnonzero(x > support_tol)
    s = support.size
    if s == 0:
        return None
    k = x.size
    sub = 2.0 * alpha * G[np.ix_(support, support)]
    system = np.zeros((s + 1, s + 1))
    system[:s, :s] = sub
    system[:s, s] = 1.0
    system[s, :s] = 1.0
    rhs = np.concatenate([mu_hat[support], [1.0]])
    try:
        sol = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    x_sup, nu = sol[:s], sol[s]
    if np.any(x_sup < -1e-12) or abs(x_sup.sum() - 1.0) > 1e-9:
        return None
    polished = np.zeros(k)
    polished[support] = np.maximum(x_sup, 0.0)
    polished /= polished.sum()
    grad = 2.0 * alpha * (G @ polished) - mu_hat
    off = np.setdiff1d(np.arange(k), support)
    if off.size and np.any(grad[off] < nu - 1e-9):
        return None
    return polished


def solve_portfolio_qp(
    mu_hat,
    G,
    alpha: float,
    tol: float = 1e-8,
    max_iter: int = 50_000,
) -> Solution:
    """Exact-to-tolerance simplex QP solve; deterministic given inputs."""
    mu_hat = np.asarray(mu_hat, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    k = mu_hat.size
    if G.shape != (k, k):
        raise ConfigError(f"G must be ({k},{k}), got {G.shape}")
    if alpha < 0:
        raise ConfigError("alpha must be nonnegative")
    if not np.allclose(G, G.T, atol=1e-9):
        raise ConfigError("G must be symmetric")
    if k == 0:
        raise ConfigError("empty problem")
    if np.linalg.eigvalsh(G).min() < -1e-8:
        raise ConfigError("G is not positive semidefinite (beyond -1e-8 tolerance)")

    lam_max = _power_lambda_max(G)
    curvature = 2.0 * alpha * lam_max
    if curvature <= 1e-14:
        # objective is linear over the simplex: vertex at the largest return,
        # ties resolved to the lowest index by argmax
        x = np.zeros(k)
        x[int(np.argmax(mu_hat))] = 1.0
        obj = float(alpha * (x @ G @ x) - mu_hat @ x)
        return Solution(x=x, v=np.zeros(0, dtype=np.int8), objective_surrogate=obj)

    step = 1.0 / (1.1 * curvature + 1e-12)
    x = np.full(k, 1.0 / k)
    final = None
    for it in range(1, max_iter + 1):
        grad = 2.0 * alpha * (G @ x) - mu_hat
        x = project_to_simplex(x - step * grad)
        if it % 25 == 0 or it == max_iter:
            res = kkt_residual(x, mu_hat, G, alpha)
            if res <= 1e-4:
                polished = _polish(x, mu_hat, G, alpha)
                if polished is not None and kkt_residual(polished, mu_hat, G, alpha) <= tol:
                    final = polished
                    break
            if res <= tol:
                final = x
                break
    if final is None:
        raise NumericalError(
            f"projected gradient did not reach tol={tol} in {max_iter} iterations",
            best=x,
        )
    obj = float(alpha * (final @ G @ final) - mu_hat @ final)
    return Solution(x=final, v=np.zeros(0, dtype=np.int8), objective_surrogate=obj)
