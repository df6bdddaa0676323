"""Recursive spectral-bisection eigensolver.

Each level splits the spectrum along a balanced grid line, deflates the
two approximate spectral projectors to orthonormal bases, compresses the
matrix onto each basis and recurses with slightly relaxed accuracy and
shattering parameters. The top-level driver shatters the input first so
the recursion's preconditions hold with high probability.

lg denotes log base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .deflate import deflate
from .errors import DeflationError, EigFailureError, PreconditionError
from .grids import Grid, kappa_v_upper, min_gap
from .kernels import (DEFAULT_PROFILE, BackendProfile, as_cmatrix, mat_inv,
                      normalize_columns, op_norm)
from .randmat import Rng
from .shatter import ShatterParams, shatter
from .split import split

#: accuracy constant delta' = delta^3/(1536 n^2.5) of the backward driver
BACKWARD_ACCURACY_DENOM = 1536

#: floor keeping the per-call failure budget beta representable in doubles
_BETA_FLOOR = 1e-300


@dataclass(frozen=True)
class EigParams:
    delta: float
    theta: float
    mode: str = "empirical"
    retry_budget: int = 2

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")
        if self.mode not in ("theoretical", "empirical"):
            raise ValueError("mode must be 'theoretical' or 'empirical'")
        if self.retry_budget < 0:
            raise ValueError("retry_budget must be >= 0")


@dataclass
class EigResult:
    v: np.ndarray
    d: np.ndarray
    residual: float
    kappa_v: float
    square_assignment: list
    depth: int

    def to_json(self) -> dict:
        return {
            "eigenvalues": [[z.real, z.imag] for z in self.d],
            "residual": self.residual,
            "kappa_v": self.kappa_v,
            "depth": self.depth,
            "square_assignment": [list(s) if s is not None else None
                                  for s in self.square_assignment],
        }


def _measure(a, v, d) -> tuple[float, float]:
    vinv = mat_inv(v)
    residual = op_norm(a - v @ np.diag(d) @ vinv)
    kv = op_norm(v) * op_norm(vinv)
    return residual, kv


def eig_shattered(a, delta: float, g: Grid, eps: float, theta: float,
                  n_global: int, rng: Rng, retry_budget: int = 2) -> EigResult:
    """Diagonalize a matrix whose eps-pseudospectrum is shattered w.r.t. g.

    With probability at least 1 - theta, each returned eigenvalue shares
    its grid square with exactly one true eigenvalue and each returned
    unit eigenvector is delta-close to an exact one.
    """
    a = as_cmatrix(a)
    m = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise PreconditionError("eig_shattered needs a square matrix")
    if m > n_global:
        raise PreconditionError("block size exceeds the global dimension")

    if m == 1:
        lam = complex(a[0, 0])
        return EigResult(np.eye(1, dtype=np.complex128),
                         np.array([lam]), 0.0, 1.0,
                         [g.square_index(lam)], 0)

    eta = delta * eps * eps / 200.0
    beta = eta**4 / (20.0 * m) ** 6 * theta**2 / (4.0 * m**8)
    beta = min(max(beta, _BETA_FLOOR), 0.05 / m)

    sr = split(a, eps, g, beta)

    q_plus = q_minus = None
    last_err: DeflationError | None = None
    for attempt in range(1 + retry_budget):
        r = rng.child(attempt)
        try:
            q_plus = deflate(sr.p_plus, sr.n_plus, beta, eta, r.child(0))
            q_minus = deflate(sr.p_minus, sr.n_minus, beta, eta, r.child(1))
            break
        except DeflationError as err:
            last_err = err
            q_plus = q_minus = None
    if q_plus is None or q_minus is None:
        raise EigFailureError(f"deflation failed after retries: {last_err}")

    a_plus = q_plus.conj().T @ a @ q_plus
    a_minus = q_minus.conj().T @ a @ q_minus
    sub_delta = 4.0 * delta / 5.0
    sub_eps = 4.0 * eps / 5.0
    res_plus = eig_shattered(a_plus, sub_delta, sr.g_plus, sub_eps, theta,
                             n_global, rng.child(0x51), retry_budget)
    res_minus = eig_shattered(a_minus, sub_delta, sr.g_minus, sub_eps, theta,
                              n_global, rng.child(0x52), retry_budget)

    v = np.hstack([q_plus @ res_plus.v, q_minus @ res_minus.v])
    v = normalize_columns(v)
    d = np.concatenate([res_plus.d, res_minus.d])
    residual, kv = _measure(a, v, d)
    assignment = [g.square_index(complex(lam)) for lam in d]
    depth = 1 + max(res_plus.depth, res_minus.depth)
    return EigResult(v, d, residual, kv, assignment, depth)


def eig_backward(a, delta: float, params: EigParams, rng: Rng) -> EigResult:
    """Backward-approximate diagonalization of any ||A|| <= 1 matrix.

    Shatters A at gamma = delta/8 and solves the perturbed problem to
    accuracy delta' = delta^3/(1536 n^2.5). Success contract (probability
    at least 1 - 1/n - 12/n^2): ||A - V D V^-1|| <= delta and
    kappa(V) <= 32 n^2.5 / delta, both measured on the returned result.
    """
    a = as_cmatrix(a)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise PreconditionError("eig_backward needs a square matrix")
    if op_norm(a) > 1.0 + 1e-12:
        raise PreconditionError("eig_backward requires ||A|| <= 1")
    if n == 1:
        return EigResult(np.eye(1, dtype=np.complex128),
                         np.array([complex(a[0, 0])]), 0.0, 1.0, [None], 0)

    cert = shatter(a, ShatterParams(gamma=delta / 8.0, mode=params.mode),
                   rng.child(0))
    delta_p = delta**3 / (BACKWARD_ACCURACY_DENOM * n**2.5)
    theta = min(params.theta, 1.0 / n) if params.theta else 1.0 / n
    res = eig_shattered(cert.matrix, delta_p, cert.grid, cert.epsilon,
                        theta, n, rng.child(1), params.retry_budget)
    residual, kv = _measure(a, res.v, res.d)
    return EigResult(res.v, res.d, residual, kv, res.square_assignment,
                     res.depth)


def eig_forward(a, delta: float, kappa_eig_bound: float, params: EigParams,
                rng: Rng) -> EigResult:
    """Forward-approximate eigenpairs given an a priori bound on kappa_eig.

    Runs the backward solver at accuracy delta/(6 n K); when K really
    bounds kappa_eig(A), eigenvalues and (phase-aligned) eigenvectors are
    within delta of the true ones. A K below the true kappa_eig voids the
    contract without raising.
    """
    a = as_cmatrix(a)
    n = a.shape[0]
    if kappa_eig_bound < 1.0:
        raise PreconditionError("kappa_eig_bound must be >= 1")
    inner = delta / (6.0 * n * kappa_eig_bound)
    return eig_backward(a, inner, params, rng)


def kappa_eig_measure(a) -> float:
    """kappa_eig(A) = kappa_V(A)/gap(A) from the dense oracle."""
    a = as_cmatrix(a)
    gap = min_gap(a)
    scale = max(op_norm(a), 1.0)
    if gap < 1e3 * np.finfo(float).eps * scale:
        raise PreconditionError("eigenvalue gap below working precision; "
                                "kappa_eig is ill-posed")
    return kappa_v_upper(a) / gap


def eig_iteration_budget(n: int, eps: float, delta: float, theta: float) -> float:
    """N_EIG = lg(256n/eps) + 3 lg lg(256n/eps) + lg lg((5n)^26/(theta^2 delta^4 eps^9))."""
    if n < 1 or not 0.0 < eps < 1.0 or not 0.0 < delta < 1.0 \
            or not 0.0 < theta < 1.0:
        raise ValueError("invalid parameter ranges")
    t1 = math.log2(256.0 * n / eps)
    # log of the big ratio computed additively to dodge overflow
    lg_ratio = (26.0 * math.log2(5.0 * n) - 2.0 * math.log2(theta)
                - 4.0 * math.log2(delta) - 9.0 * math.log2(eps))
    return t1 + 3.0 * math.log2(t1) + math.log2(lg_ratio)


def eig_precision_requirement(n: int, eps: float, delta: float, theta: float,
                              profile: BackendProfile = DEFAULT_PROFILE
                              ) -> float:
    """Sufficient bits lg(1/u) for the full recursion's guarantee.

    max of the iteration term
    lg^3(n/eps) * lg((5n)^26/(theta^2 delta^4 eps^8)) * 2^14.83 *
    (c_inv lg n + 3) + lg N_EIG
    and the bookkeeping term
    lg((5n)^30/(theta^2 delta^4 eps^8)) + lg max(mu_mm, mu_qr, n).
    Values far exceeding 53 flag that hardware doubles cannot honor the
    worst-case analysis (practice behaves far better).
    """
    n_eig = eig_iteration_budget(n, eps, delta, theta)
    lg_ratio8 = (26.0 * math.log2(5.0 * n) - 2.0 * math.log2(theta)
                 - 4.0 * math.log2(delta) - 8.0 * math.log2(eps))
    term1 = (math.log2(n / eps) ** 3 * lg_ratio8 * 2.0**14.83
             * (profile.c_inv * math.log2(max(n, 2)) + 3.0)
             + math.log2(n_eig))
    lg_ratio30 = (30.0 * math.log2(5.0 * n) - 2.0 * math.log2(theta)
                  - 4.0 * math.log2(delta) - 8.0 * math.log2(eps))
    term2 = lg_ratio30 + math.log2(max(profile.mu_mm(n), profile.mu_qr(n), n))
    return max(term1, term2)
