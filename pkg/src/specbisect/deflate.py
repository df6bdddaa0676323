"""Randomized rank-revealing factorization and projector deflation.

RURV factors A = U R V with V a Haar unitary, U near-unitary and R upper
triangular; a Haar rotation makes the trailing block of R reveal the
(r+1)-th singular value with high probability. DEFLATE extracts an
orthonormal basis for the range of a rank-k projector from the leading
columns of the U factor of its RURV.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DeflationError, PreconditionError
from .kernels import UNIT_ROUNDOFF, as_cmatrix, op_norm, qr_factor
from .randmat import Rng, sample_ginibre


@dataclass(frozen=True)
class RurvResult:
    u: np.ndarray
    r: np.ndarray
    v_used: np.ndarray

    def reconstruction(self) -> np.ndarray:
        return self.u @ self.r @ self.v_used


def rurv(a, rng: Rng) -> RurvResult:
    """A = U R V with V Haar unitary.

    For every 1 <= r <= n-1 and theta > 0, the trailing block R22 (rows
    and columns past r) satisfies
    ||R22|| <= sqrt(r(n-r))/theta * sigma_{r+1}(A)
    with probability at least 1 - theta^2.
    """
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise PreconditionError("rurv needs a square matrix")
    n = a.shape[0]
    g = sample_ginibre(n, rng)
    v, _ = qr_factor(g)
    b = a @ v.conj().T
    u, r = qr_factor(b)
    return RurvResult(u, r, v)


def deflate(p_tilde, k: int, beta: float, eta: float, rng: Rng) -> np.ndarray:
    """n x k orthonormal basis approximately spanning range(P).

    The caller guarantees ||p_tilde - P|| <= beta <= 1/4 for some rank-k
    spectral projector P; then with high probability (failure at most
    (20n)^3 sqrt(beta)/eta^2, or the alternative bookkeeping
    6000 n^3 sqrt(beta)/eta^2) there is an exact orthonormal basis Q of
    range(P) with ||Q_tilde - Q|| <= eta. Probabilistic failure is not
    detectable here; only orthonormality of the output is checked.
    """
    p_tilde = as_cmatrix(p_tilde)
    n = p_tilde.shape[0]
    if p_tilde.shape[0] != p_tilde.shape[1]:
        raise PreconditionError("deflate needs a square projector")
    if not 1 <= k < n:
        raise PreconditionError(f"need 1 <= k < n, got k={k}, n={n}")
    if not 0.0 < beta <= 0.25:
        raise PreconditionError("beta must lie in (0, 1/4]")
    if not 0.0 < eta < 1.0:
        raise PreconditionError("eta must lie in (0, 1)")
    q = rurv(p_tilde, rng).u[:, :k]
    resid = op_norm(q.conj().T @ q - np.eye(k))
    if resid > 10.0 * n * UNIT_ROUNDOFF:
        raise DeflationError(
            f"deflated basis not orthonormal (residual {resid:.3e})")
    return q
