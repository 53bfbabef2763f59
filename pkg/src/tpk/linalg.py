"""Dense complex matrix primitives and the rank policy shared by every module.

Matrices are plain 2-D ``complex128`` numpy arrays. Functions here never
mutate their inputs; arrays stored on the value types of this package are
marked read-only.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonOrthonormalBasis

__all__ = [
    "RankPolicy",
    "DEFAULT_POLICY",
    "SubspaceBasis",
    "as_cmatrix",
    "adjoint",
    "spectral_norm",
    "pinv",
    "penrose_residuals",
    "numerical_rank",
    "range_basis",
    "null_basis",
    "orthonormal_columns",
    "gap",
]


@dataclass(frozen=True)
class RankPolicy:
    """Decides which singular values count toward numerical rank.

    A singular value ``s`` counts iff
    ``s > max(absolute_floor, relative_threshold * s_max)``.
    """

    relative_threshold: float = 1e-10
    absolute_floor: float = 1e-14

    def __post_init__(self):
        if self.relative_threshold < 0 or self.absolute_floor < 0:
            raise ValueError("rank policy thresholds must be nonnegative")

    def threshold(self, svals):
        smax = float(svals[0]) if len(svals) else 0.0
        return max(self.absolute_floor, self.relative_threshold * smax)

    def rank(self, svals):
        svals = np.asarray(svals)
        return int(np.count_nonzero(svals > self.threshold(svals)))


DEFAULT_POLICY = RankPolicy()


def _frozen(a):
    a = np.array(a, dtype=np.complex128, copy=True)
    a.flags.writeable = False
    return a


def as_cmatrix(a):
    """Return ``a`` as a 2-D complex128 array, rejecting NaN/Inf."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of C^ambient_dim.

    Zero-rank bases (shape ``(d, 0)``) are valid and represent ``{0}``.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128)
        if b.ndim != 2:
            raise ValueError("basis must be 2-D")
        object.__setattr__(self, "basis", _frozen(b))

    @classmethod
    def checked(cls, basis, tol=1e-8):
        b = cls(basis)
        res = b.orthonormality_residual()
        if res > tol:
            raise NonOrthonormalBasis(f"||B*B - I|| = {res:.3e} exceeds {tol:g}")
        return b

    @classmethod
    def empty(cls, dim):
        return cls(np.zeros((dim, 0), dtype=np.complex128))

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def rank(self):
        return self.basis.shape[1]

    def orthonormality_residual(self):
        if self.rank == 0:
            return 0.0
        b = self.basis
        return spectral_norm(b.conj().T @ b - np.eye(self.rank))

    def projector_matrix(self):
        b = self.basis
        return b @ b.conj().T

    def __repr__(self):
        return f"SubspaceBasis(ambient_dim={self.ambient_dim}, rank={self.rank})"


def adjoint(a):
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def spectral_norm(a):
    """Largest singular value; 0 for empty matrices."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def _svd(t):
    t = as_cmatrix(t)
    return np.linalg.svd(t, full_matrices=True)


def numerical_rank(t, policy=DEFAULT_POLICY):
    t = as_cmatrix(t)
    if t.size == 0:
        return 0
    return policy.rank(np.linalg.svd(t, compute_uv=False))


def pinv(t, policy=DEFAULT_POLICY):
    """Moore-Penrose pseudoinverse with rank decided by ``policy``.

    Singular values at or below the policy threshold are treated as exact
    zeros, so ``pinv(pinv(t))`` recovers ``t`` only up to that truncation.
    """
    t = as_cmatrix(t)
    m, n = t.shape
    if t.size == 0:
        return np.zeros((n, m), dtype=np.complex128)
    u, s, vh = np.linalg.svd(t, full_matrices=False)
    r = policy.rank(s)
    return (vh[:r].conj().T / s[:r]) @ u[:, :r].conj().T


def penrose_residuals(t, x):
    """The four Penrose-equation residuals, each divided by ``max(||t||, ||x||, 1)``.

    Order: ``TXT - T``, ``XTX - X``, ``(TX)* - TX``, ``(XT)* - XT``.
    """
    t = as_cmatrix(t)
    x = as_cmatrix(x)
    tx = t @ x
    xt = x @ t
    scale = max(spectral_norm(t), spectral_norm(x), 1.0)
    return (
        spectral_norm(tx @ t - t) / scale,
        spectral_norm(xt @ x - x) / scale,
        spectral_norm(tx.conj().T - tx) / scale,
        spectral_norm(xt.conj().T - xt) / scale,
    )


def range_basis(t, policy=DEFAULT_POLICY):
    """Orthonormal basis of the column space at the policy's numerical rank.

    Columns come out in order of descending singular value.
    """
    t = as_cmatrix(t)
    m = t.shape[0]
    if t.size == 0:
        return SubspaceBasis.empty(m)
    u, s, _ = _svd(t)
    r = policy.rank(s)
    return SubspaceBasis(u[:, :r])


def null_basis(t, policy=DEFAULT_POLICY):
    """Orthonormal basis of the kernel at the policy's numerical rank."""
    t = as_cmatrix(t)
    n = t.shape[1]
    if t.size == 0:
        return SubspaceBasis(np.eye(n, dtype=np.complex128))
    _, s, vh = _svd(t)
    r = policy.rank(s)
    return SubspaceBasis(vh[r:].conj().T)


def orthonormal_columns(a, policy=DEFAULT_POLICY):
    """Orthonormalize the columns of ``a`` (rank-revealing, via SVD)."""
    return range_basis(a, policy)


def _as_projector_matrix(x):
    if isinstance(x, SubspaceBasis):
        return x.projector_matrix()
    m = getattr(x, "matrix", None)
    if m is not None:
        return m
    return as_cmatrix(x)


def gap(a, b):
    """Gap metric ``||P_A - P_B||`` between two subspaces.

    Accepts ``SubspaceBasis`` values, projectors, or raw projector matrices.
    """
    pa = _as_projector_matrix(a)
    pb = _as_projector_matrix(b)
    if pa.shape != pb.shape:
        raise DimensionMismatch(f"ambient dims differ: {pa.shape} vs {pb.shape}")
    return spectral_norm(pa - pb)
