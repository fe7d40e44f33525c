"""Symmetric-matrix kernel: PSD cone tests, operator norms, square roots.

Everything here is small and dense (d <= 8), so eigenvalues are computed
with a cyclic Jacobi iteration rather than a general-purpose solver.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, InvalidInput

MAX_DIM = 8
DEFAULT_CONE_TOL = 1e-9
JACOBI_OFFDIAG_TOL = 1e-14


class PsdStatus(enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    BOUNDARY = "PositiveSemidefiniteBoundary"
    NOT_PSD = "NotPSD"


class MinkowskiClass(enum.Enum):
    FUTURE_TIMELIKE = "FutureTimelike"
    PAST_TIMELIKE = "PastTimelike"
    LIGHTLIKE = "Lightlike"
    SPACELIKE = "Spacelike"
    ZERO = "Zero"


def _packed_size(dim):
    return dim * (dim + 1) // 2


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric d x d matrix stored as its packed upper triangle.

    The packed layout is row-major over the upper triangle:
    (0,0), (0,1), ..., (0,d-1), (1,1), ..., (d-1,d-1).
    """

    dim: int
    packed: tuple = field(repr=False)

    def __post_init__(self):
        if not (1 <= self.dim <= MAX_DIM):
            raise InvalidInput(f"dim must be in 1..{MAX_DIM}, got {self.dim}")
        if len(self.packed) != _packed_size(self.dim):
            raise InvalidInput("packed entry count does not match dim")
        if not all(np.isfinite(x) for x in self.packed):
            raise InvalidInput("non-finite entry in symmetric matrix")

    @staticmethod
    def from_matrix(a, tol=1e-9) -> "SymMatrix":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.abs(a).max()) if a.size else 0.0)
        if not np.isfinite(a).all():
            raise InvalidInput("non-finite entry in symmetric matrix")
        if np.abs(a - a.T).max(initial=0.0) > tol * scale:
            raise InvalidInput("matrix is not symmetric within tolerance")
        d = a.shape[0]
        sym = 0.5 * (a + a.T)
        packed = tuple(float(sym[i, j]) for i in range(d) for j in range(i, d))
        return SymMatrix(d, packed)

    @staticmethod
    def identity(dim) -> "SymMatrix":
        return SymMatrix.from_matrix(np.eye(dim))

    @staticmethod
    def zero(dim) -> "SymMatrix":
        return SymMatrix(dim, (0.0,) * _packed_size(dim))

    @staticmethod
    def diagonal(values) -> "SymMatrix":
        return SymMatrix.from_matrix(np.diag(np.asarray(values, dtype=float)))

    @property
    def matrix(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim))
        k = 0
        for i in range(self.dim):
            for j in range(i, self.dim):
                a[i, j] = self.packed[k]
                a[j, i] = self.packed[k]
                k += 1
        return a

    def entry(self, i, j) -> float:
        if j < i:
            i, j = j, i
        k = i * self.dim - i * (i - 1) // 2 + (j - i)
        return self.packed[k]

    def __add__(self, other):
        return SymMatrix(self.dim, tuple(a + b for a, b in zip(self.packed, other.packed)))

    def __sub__(self, other):
        return SymMatrix(self.dim, tuple(a - b for a, b in zip(self.packed, other.packed)))

    def __mul__(self, scalar):
        return SymMatrix(self.dim, tuple(float(scalar) * a for a in self.packed))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


@dataclass(frozen=True)
class LinearMap:
    """Linear operator on R^d, stored as a dense d x d matrix."""

    dim: int
    entries: tuple = field(repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInput("dim must be positive")
        if len(self.entries) != self.dim * self.dim:
            raise InvalidInput("entry count does not match dim")
        if not all(np.isfinite(x) for x in self.entries):
            raise InvalidInput("non-finite entry in linear map")

    @staticmethod
    def from_matrix(a) -> "LinearMap":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
        return LinearMap(a.shape[0], tuple(float(x) for x in a.ravel()))

    @staticmethod
    def identity(dim) -> "LinearMap":
        return LinearMap.from_matrix(np.eye(dim))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=float).reshape(self.dim, self.dim)


def jacobi_eigh(a: np.ndarray):
    """Eigendecomposition of a small symmetric matrix by cyclic Jacobi sweeps.

    Returns (w, V) with eigenvalues w ascending and eigenvectors in the
    columns of V. Convergence: off-diagonal Frobenius norm below
    JACOBI_OFFDIAG_TOL relative to the matrix scale.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a[0, :1].copy(), v
    thresh = JACOBI_OFFDIAG_TOL * max(1.0, np.linalg.norm(a))
    for _ in range(64):
        # computed entrywise: the sum-of-squares difference cancels
        # catastrophically once the off-diagonal mass is tiny
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh / (n * n):
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = 0.0
                a[q, p] = 0.0
                v = v @ rot
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_sym(m: SymMatrix):
    """Eigenvalues of a symmetric matrix, ascending."""
    w, _ = jacobi_eigh(m.matrix)
    return tuple(float(x) for x in w)


def psd_status(m: SymMatrix, tol: float = DEFAULT_CONE_TOL) -> PsdStatus:
    """Cone position of m: definite, on the boundary, or outside.

    The zero matrix counts as boundary-PSD.
    """
    if tol < 0:
        raise InvalidInput("tol must be nonnegative")
    wmin = eig_sym(m)[0]
    if wmin > tol:
        return PsdStatus.POSITIVE_DEFINITE
    if wmin >= -tol:
        return PsdStatus.BOUNDARY
    return PsdStatus.NOT_PSD


def operator_norm(t: LinearMap) -> float:
    """Largest singular value of t (the sup of |Tx| over the unit ball)."""
    a = t.matrix
    w, _ = jacobi_eigh(a.T @ a)
    return float(np.sqrt(max(0.0, w[-1])))


def is_contraction(t: LinearMap, tol: float = DEFAULT_CONE_TOL) -> bool:
    if tol < 0:
        raise InvalidInput("tol must be nonnegative")
    return operator_norm(t) <= 1.0 + tol


def psd_sqrt(m: SymMatrix, tol: float = DEFAULT_CONE_TOL) -> SymMatrix:
    """Unique PSD square root of a PSD matrix.

    Eigenvalues within tol of zero are clipped to zero before the root.
    """
    w, v = jacobi_eigh(m.matrix)
    if w[0] < -tol:
        raise DomainError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    root = v @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return SymMatrix.from_matrix(0.5 * (root + root.T))


def minkowski_classify(m: SymMatrix, tol: float = 1e-12) -> MinkowskiClass:
    """Position of a 2x2 symmetric matrix relative to the determinant cone.

    The determinant form a11*a22 - a12^2 has signature (2,1); positive
    definite matrices are exactly the future-oriented timelike vectors.
    """
    if m.dim != 2:
        raise DimensionError(f"Minkowski classification requires d=2, got d={m.dim}")
    a11, a12, a22 = m.packed
    scale = max(abs(a11), abs(a12), abs(a22))
    if scale == 0.0:
        return MinkowskiClass.ZERO
    det = a11 * a22 - a12 * a12
    det_tol = tol * max(1.0, scale * scale)
    if det > det_tol:
        return MinkowskiClass.FUTURE_TIMELIKE if a11 > 0 else MinkowskiClass.PAST_TIMELIKE
    if det >= -det_tol:
        return MinkowskiClass.LIGHTLIKE
    return MinkowskiClass.SPACELIKE
