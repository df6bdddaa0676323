"""Complex-plane grids, the shattering predicate, and spectral conditioning.

A grid is an s1 x s2 lattice of omega-sized squares with lower-left corner
z0. A matrix is shattered with respect to a grid (at level eps) when every
square holds at most one eigenvalue and the eps-pseudospectrum avoids all
grid lines. Certification here is brute force: a dense eigensolve plus a
mesh of smallest-singular-value evaluations along the grid lines, which
gives ground truth independent of the solver pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import PreconditionError
from .kernels import as_cmatrix, sigma_min_shifted, sigma_min_shifted_batch

_BATCH = 8192


@dataclass(frozen=True)
class Grid:
    """Rectangular lattice of omega x omega squares cornered at z0."""

    z0: complex
    omega: float
    s1: int
    s2: int

    def __post_init__(self):
        if self.omega <= 0.0:
            raise ValueError("omega must be positive")
        if self.s1 < 1 or self.s2 < 1:
            raise ValueError("s1 and s2 must be >= 1")

    @property
    def diag(self) -> float:
        return self.omega * math.hypot(self.s1, self.s2)

    @property
    def x0(self) -> float:
        return self.z0.real

    @property
    def y0(self) -> float:
        return self.z0.imag

    def vertical_line_xs(self) -> np.ndarray:
        return self.x0 + self.omega * np.arange(self.s1 + 1)

    def horizontal_line_ys(self) -> np.ndarray:
        return self.y0 + self.omega * np.arange(self.s2 + 1)

    def square_index(self, z: complex):
        """Square containing z under the half-open convention, or None."""
        i = math.floor((z.real - self.x0) / self.omega)
        j = math.floor((z.imag - self.y0) / self.omega)
        if 0 <= i < self.s1 and 0 <= j < self.s2:
            return (i, j)
        return None

    def split_vertical(self, k: int) -> tuple["Grid", "Grid"]:
        """Subgrids left/right of the k-th vertical line (0 < k < s1)."""
        if not 0 < k < self.s1:
            raise ValueError("interior line index required")
        left = Grid(self.z0, self.omega, k, self.s2)
        right = Grid(self.z0 + k * self.omega, self.omega, self.s1 - k, self.s2)
        return left, right

    def split_horizontal(self, k: int) -> tuple["Grid", "Grid"]:
        """Subgrids below/above the k-th horizontal line (0 < k < s2)."""
        if not 0 < k < self.s2:
            raise ValueError("interior line index required")
        bottom = Grid(self.z0, self.omega, self.s1, k)
        top = Grid(self.z0 + 1j * k * self.omega, self.omega, self.s1, self.s2 - k)
        return bottom, top

    def rotated(self) -> "Grid":
        """Image of this grid under multiplication by i.

        Horizontal lines become vertical lines of the rotated grid, which
        is how horizontal bisections are reduced to vertical ones.
        """
        z0p = complex(-(self.y0 + self.s2 * self.omega), self.x0)
        return Grid(z0p, self.omega, self.s2, self.s1)

    def rotated_back(self) -> "Grid":
        """Image of this grid under multiplication by -i (inverse of rotated)."""
        z0p = complex(self.y0, -(self.x0 + self.s1 * self.omega))
        return Grid(z0p, self.omega, self.s2, self.s1)

    def line_mesh(self, mesh_per_segment: int = 64) -> np.ndarray:
        """Mesh points covering every grid line, endpoints included."""
        m = int(mesh_per_segment)
        if m < 1:
            raise ValueError("mesh_per_segment must be >= 1")
        ys = self.y0 + self.omega * np.linspace(0.0, self.s2, self.s2 * m + 1)
        xs = self.x0 + self.omega * np.linspace(0.0, self.s1, self.s1 * m + 1)
        vert = (self.vertical_line_xs()[:, None] + 1j * ys[None, :]).ravel()
        horiz = (xs[None, :] + 1j * self.horizontal_line_ys()[:, None]).ravel()
        return np.concatenate([vert, horiz])

    def to_json(self) -> dict:
        return {
            "re_z0": self.z0.real,
            "im_z0": self.z0.imag,
            "omega": self.omega,
            "s1": self.s1,
            "s2": self.s2,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Grid":
        return cls(complex(d["re_z0"], d["im_z0"]), d["omega"], d["s1"], d["s2"])


@dataclass(frozen=True)
class ShatterCert:
    """Perturbed matrix, grid and shattering parameter produced by shatter()."""

    matrix: np.ndarray
    grid: Grid
    epsilon: float
    gamma: float
    certified: bool = True
    below_hardware_precision: bool = False

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.epsilon > self.grid.omega / 2 + 1e-15 * self.grid.omega:
            raise ValueError("shattering requires epsilon <= omega/2")

    def to_json(self) -> dict:
        return {
            "grid": self.grid.to_json(),
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "certified": self.certified,
            "below_hardware_precision": self.below_hardware_precision,
        }


@dataclass(frozen=True)
class CertResult:
    """Outcome of brute-force shattering certification."""

    ok: bool
    line_margin: float
    eigenvalues: np.ndarray = field(repr=False)
    violation: str | None = None
    violating_point: complex | None = None
    violating_square: tuple[int, int] | None = None


def pseudospectrum_member(a, eps: float, z: complex) -> bool:
    """True iff z lies in the eps-pseudospectrum of a."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return sigma_min_shifted(z, a) < eps


def min_line_sigma(a, g: Grid, mesh_per_segment: int = 64):
    """(min, argmin point) of sigma_min(z*I - A) over the meshed grid lines."""
    a = as_cmatrix(a)
    pts = g.line_mesh(mesh_per_segment)
    best = math.inf
    best_z = pts[0]
    for lo in range(0, pts.size, _BATCH):
        chunk = pts[lo:lo + _BATCH]
        svals = sigma_min_shifted_batch(chunk, a)
        k = int(np.argmin(svals))
        if svals[k] < best:
            best = float(svals[k])
            best_z = complex(chunk[k])
    return best, best_z


def certify_shattered(a, g: Grid, eps: float,
                      mesh_per_segment: int = 64) -> CertResult:
    """Check shattering by dense eigensolve plus a grid-line sigma_min mesh.

    The line check is a sampled lower bound: the reported margin makes
    under-resolution visible (re-run with a denser mesh to tighten it).
    """
    a = as_cmatrix(a)
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    evals = np.linalg.eigvals(a)

    seen: dict[tuple[int, int], complex] = {}
    for lam in evals:
        sq = g.square_index(complex(lam))
        if sq is None:
            return CertResult(False, math.nan, evals,
                              violation=f"eigenvalue {lam:.6g} outside grid region")
        if sq in seen:
            return CertResult(False, math.nan, evals,
                              violation=f"two eigenvalues share square {sq}",
                              violating_square=sq)
        seen[sq] = complex(lam)

    margin, zmin = min_line_sigma(a, g, mesh_per_segment)
    if margin < eps:
        return CertResult(False, margin, evals,
                          violation=f"pseudospectrum touches grid line near {zmin:.6g}"
                                    f" (sigma_min {margin:.3e} < eps {eps:.3e})",
                          violating_point=zmin)
    return CertResult(True, margin, evals)


def eig_pairs(a):
    """Right/left eigenvector pairs with w_i* v_i = 1 and unit right vectors.

    Returns (eigenvalues, V, W) with columns paired; raises if some pair is
    defective to working precision.
    """
    a = as_cmatrix(a)
    evals, vl, vr = scipy.linalg.eig(a, left=True, right=True,
                                     check_finite=False)
    vr = vr / np.linalg.norm(vr, axis=0)[np.newaxis, :]
    overlaps = np.sum(np.conj(vl) * vr, axis=0)
    n = a.shape[0]
    tiny = n * 1e3 * np.finfo(float).eps
    if np.any(np.abs(overlaps) < tiny * np.max(np.linalg.norm(vl, axis=0))):
        raise PreconditionError("matrix is defective to working precision")
    w = vl / np.conj(overlaps)[np.newaxis, :]
    return evals, vr, w


def kappa_v_upper(a) -> float:
    """Upper bound sqrt(n * sum kappa(lambda_i)^2) on the eigenvector condition number."""
    a = as_cmatrix(a)
    n = a.shape[0]
    _, vr, w = eig_pairs(a)
    kappas = np.linalg.norm(w, axis=0)  # right vectors are unit
    return float(math.sqrt(n * float(np.sum(kappas**2))))


def min_gap(a) -> float:
    """Minimum pairwise distance between eigenvalues."""
    a = as_cmatrix(a)
    if a.shape[0] < 2:
        raise PreconditionError("min_gap needs n >= 2")
    evals = np.linalg.eigvals(a)
    diffs = np.abs(evals[:, None] - evals[None, :])
    np.fill_diagonal(diffs, np.inf)
    return float(diffs.min())
