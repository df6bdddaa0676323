"""Matrix sign function via Newton iteration, with explicit iteration counts.

The scalar Newton map g(z) = (z + 1/z)/2 squares the Apollonius modulus
|m(z)| with m(z) = (1-z)/(1+z), so pseudospectra trapped in the Apollonius
region C_alpha contract toward {-1, +1} at a doubly exponential rate. The
iteration count and precision formulas here are closed forms derived from
that geometry; sgn() runs the matrix iteration for exactly that many steps.

lg denotes log base 2 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .kernels import (DEFAULT_PROFILE, BackendProfile, UNIT_ROUNDOFF,
                      as_cmatrix, lu_pivot_extremes, mat_inv, op_norm)


def _lg(x: float) -> float:
    return math.log2(x)


@dataclass(frozen=True)
class SgnParams:
    """Inputs of the sign-function iteration.

    eps0 is the initial pseudospectral parameter, alpha0 the initial
    Apollonius parameter (Lambda_eps0(A) must lie in C_alpha0), beta the
    target accuracy of the returned sign.
    """

    eps0: float
    alpha0: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.eps0 < 1.0:
            raise ValueError("eps0 must lie in (0, 1)")
        if not 0.0 < self.alpha0 < 1.0:
            raise ValueError("alpha0 must lie in (0, 1)")
        if not 0.0 < self.beta < 1.0 / 12.0:
            raise ValueError("beta must lie in (0, 1/12)")

    @property
    def s(self) -> float:
        return 1.0 - self.alpha0


@dataclass
class SgnTrace:
    """Per-step diagnostics of one sgn() run."""

    iterate_norms: list[tuple[float, float]]
    n_steps: int
    predicted_alpha: list[float]
    predicted_eps_floor: list[float]
    converged_early: bool = False
    required_bits: float = math.nan
    hardware_bits: float = -_lg(UNIT_ROUNDOFF)

    def to_json(self) -> dict:
        return {
            "n_steps": self.n_steps,
            "iterate_norms": [list(t) for t in self.iterate_norms],
            "predicted_alpha": self.predicted_alpha,
            "predicted_eps_floor": self.predicted_eps_floor,
            "converged_early": self.converged_early,
            "required_bits": self.required_bits,
            "hardware_bits": self.hardware_bits,
        }


def mobius(z: complex) -> complex:
    """m(z) = (1 - z)/(1 + z), mapping the right half-plane to the unit disk."""
    if z == -1:
        raise ZeroDivisionError("mobius has a pole at z = -1")
    return (1 - z) / (1 + z)


def newton_map(z: complex) -> complex:
    """g(z) = (z + 1/z)/2, one scalar Newton step toward sign(Re z)."""
    if z == 0:
        raise ZeroDivisionError("newton_map has a pole at z = 0")
    return (z + 1 / z) / 2


def apollonius_contains(alpha: float, z: complex) -> bool:
    """Membership in C_alpha, the union of the two Apollonius disks |m(z)|^{+-1} <= alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if z == -1 or z == 1:
        return True
    m = abs(mobius(z))
    return m <= alpha or 1.0 / m <= alpha


def sgn_iteration_count(alpha0: float, eps0: float, beta: float,
                        s: float | None = None) -> int:
    """Number of Newton steps guaranteeing ||A_N - sgn(A)|| <= beta.

    N = ceil(lg 1/(1-a0) + 3 lg lg 1/(1-a0) + lg lg 1/(beta*eps0) + 7.59).
    The formula's derivation assumes 1 - alpha0 < 1/100; outside that
    regime it still evaluates (and stays an upper bound in practice).
    Passing s = 1 - alpha0 directly (with alpha0 = None) sidesteps the
    roundoff of 1 - alpha0 when alpha0 is closer to 1 than one ulp.
    """
    if s is None:
        if not 0.0 < alpha0 < 1.0:
            raise ValueError("alpha0 must lie in (0, 1)")
        s = 1.0 - alpha0
    if not 0.0 < s < 1.0:
        raise ValueError("s = 1 - alpha0 must lie in (0, 1)")
    if not (eps0 > 0.0 and beta > 0.0 and beta * eps0 < 1.0):
        raise ValueError("need eps0, beta > 0 with beta*eps0 < 1")
    raw = (_lg(1.0 / s) + 3.0 * _lg(max(_lg(1.0 / s), 1.0 + 1e-12))
           + _lg(_lg(1.0 / (beta * eps0))) + 7.59)
    return max(1, math.ceil(raw))


def alpha_sequence(alpha0: float, n_steps: int) -> list[float]:
    """alpha_k with alpha_{k+1} = (1 + s/4) alpha_k^2, s = 1 - alpha0."""
    s = 1.0 - alpha0
    out = [alpha0]
    for _ in range(n_steps):
        out.append((1.0 + s / 4.0) * out[-1] ** 2)
    return out


def eps_floor_sequence(eps0: float, alpha0: float, n_steps: int) -> list[float]:
    """e_k = eps0 (s^2/50)^k alpha_k, the pseudospectral floor per step."""
    s = 1.0 - alpha0
    alphas = alpha_sequence(alpha0, n_steps)
    return [eps0 * (s * s / 50.0) ** k * alphas[k] for k in range(n_steps + 1)]


def sgn_params_from_shattering(eps: float, grid_diag) -> tuple[float, float]:
    """(eps0, alpha0) for a matrix shattered at level eps whose grid has a
    line on the imaginary axis (after shifting): eps0 = eps/2,
    alpha0 = 1 - eps/diag^2. Accepts a Grid or its diagonal length.
    """
    grid_diag = getattr(grid_diag, "diag", grid_diag)
    if eps <= 0.0 or grid_diag <= 0.0:
        raise ValueError("eps and grid_diag must be positive")
    s = eps / grid_diag**2
    if s >= 1.0:
        raise PreconditionError("eps too large for this grid diagonal")
    alpha0 = 1.0 - s
    if alpha0 == 1.0:
        raise PreconditionError(
            "alpha0 = 1 - eps/diag^2 rounds to 1 in doubles; pass "
            "s = eps/diag^2 to the s-keyword forms of the sgn calculators")
    return eps / 2.0, alpha0


def sgn_error_bound(alpha_n: float, eps_n: float) -> float:
    """||A_N - sgn(A)|| <= 8 alpha_N^2 / ((1-alpha_N)^2 (1+alpha_N) eps_N)."""
    if not 0.0 < alpha_n < 1.0:
        raise ValueError("alpha_n must lie in (0, 1)")
    if eps_n <= 0.0:
        raise ValueError("eps_n must be positive")
    return 8.0 * alpha_n**2 / ((1.0 - alpha_n) ** 2 * (1.0 + alpha_n) * eps_n)


def pseudospectral_step(alpha: float, alpha_next: float, eps: float) -> float:
    """eps' = eps (alpha' - alpha^2)(1 - alpha^2)/(8 alpha): one Newton step
    maps Lambda_eps(A) inside C_alpha into Lambda_eps'(g(A)) inside C_alpha'.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if alpha_next < alpha * alpha:
        raise ValueError("alpha_next must be >= alpha^2")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return eps * (alpha_next - alpha * alpha) * (1.0 - alpha * alpha) / (8.0 * alpha)


def required_precision_sgn(n: int, alpha0: float, eps0: float, beta: float,
                           profile: BackendProfile = DEFAULT_PROFILE,
                           s: float | None = None) -> tuple[float, float]:
    """(u_max, bits) sufficient for the sgn guarantee.

    u <= alpha0^(2^(N+1) (c_inv lg n + 3)) / (2 mu_inv(n) sqrt(n) N),
    evaluated in log-space since the numerator underflows; bits = lg(1/u).
    u_max is returned as 0.0 when it underflows double precision.
    Passing s = 1 - alpha0 (with alpha0 = None) keeps the formula exact
    when alpha0 rounds to 1.0 in doubles.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if s is None:
        s = 1.0 - alpha0
    n_steps = sgn_iteration_count(None, eps0, beta, s=s)
    expo = 2.0 ** (n_steps + 1) * (profile.c_inv * _lg(max(n, 2)) + 3.0)
    lg_alpha0 = math.log1p(-s) / math.log(2.0)  # lg(alpha0), exact for tiny s
    log2_u = expo * lg_alpha0 - _lg(2.0 * profile.mu_inv(n) * math.sqrt(n) * n_steps)
    bits = -log2_u
    u_max = 2.0**log2_u if log2_u > -1074 else 0.0
    return u_max, bits


def condition_bounds_from_pseudospectrum(alpha: float, eps: float
                                         ) -> tuple[float, float]:
    """(||A^-1|| bound, ||A|| bound) for Lambda_eps(A) inside C_alpha:
    (1/eps, 4 alpha / ((1-alpha)^2 eps)).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return 1.0 / eps, 4.0 * alpha / ((1.0 - alpha) ** 2 * eps)


def sgn(a, params: SgnParams, early_stop: bool = False
        ) -> tuple[np.ndarray, SgnTrace]:
    """Newton iteration A <- (A + A^-1)/2 for exactly N steps.

    The caller guarantees Lambda_eps0(A) lies in C_alpha0; under that
    contract (and sufficient precision) the result is within beta of
    sgn(A). A numerically singular iterate signals that the contract was
    violated (the pseudospectrum touched the imaginary axis).
    """
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise PreconditionError("sgn needs a square matrix")
    n = a.shape[0]
    n_steps = sgn_iteration_count(params.alpha0, params.eps0, params.beta)
    _, bits = required_precision_sgn(n, params.alpha0, params.eps0, params.beta)

    trace = SgnTrace(iterate_norms=[], n_steps=n_steps,
                     predicted_alpha=alpha_sequence(params.alpha0, n_steps),
                     predicted_eps_floor=eps_floor_sequence(
                         params.eps0, params.alpha0, n_steps),
                     required_bits=bits)

    x = a.copy()
    kappa_cap = 1.0 / (10.0 * UNIT_ROUNDOFF)
    for k in range(n_steps):
        lo, hi = lu_pivot_extremes(x)
        if lo == 0.0 or hi / lo > kappa_cap:
            raise PreconditionError(
                f"iterate {k} is singular to working precision; the "
                f"pseudospectrum likely touches the imaginary axis")
        xinv = mat_inv(x)
        x_next = 0.5 * (x + xinv)
        if not (np.all(np.isfinite(x_next.real))
                and np.all(np.isfinite(x_next.imag))):
            raise PreconditionError(f"non-finite entries at iterate {k + 1}")
        trace.iterate_norms.append((op_norm(x_next), op_norm_inv_safe(x_next)))
        if early_stop and op_norm(x_next - x) <= params.beta / 4.0:
            trace.converged_early = True
            x = x_next
            break
        x = x_next
    trace.n_steps = len(trace.iterate_norms)
    return x, trace


def op_norm_inv_safe(x) -> float:
    """||X^-1|| via singular values, inf when singular to precision."""
    svals = np.linalg.svd(np.asarray(x, dtype=np.complex128), compute_uv=False)
    smin = float(svals[-1])
    return math.inf if smin == 0.0 else 1.0 / smin
