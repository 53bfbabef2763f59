"""Projectors and the lattice generated by the ranges and kernels of two of them."""

from dataclasses import dataclass

import numpy as np

from .errors import CertificateFailure, DimensionMismatch
from .linalg import (
    DEFAULT_POLICY,
    SubspaceBasis,
    _frozen,
    as_cmatrix,
    gap,
    null_basis,
    range_basis,
    spectral_norm,
)

__all__ = [
    "Projector",
    "SubspaceBasis",
    "SixSpaceDecomposition",
    "project_onto",
    "range_sum",
    "intersect_ranges",
    "intersect_ranges_svd",
    "six_space_decomposition",
    "projection_onto_range_qp",
    "range_qp_orthogonal_split",
    "harmonious_ranges",
    "CERT_TOL",
    "REPAIR_TOL",
]

CERT_TOL = 1e-10
REPAIR_TOL = 1e-8


def _certificate(m):
    return spectral_norm(m - m.conj().T), spectral_norm(m @ m - m)


def _spectral_range(m):
    """Eigenvectors of the Hermitian part of ``m`` with eigenvalue above 1/2."""
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    return v[:, w > 0.5]


def _spectral_round(m):
    keep = _spectral_range(m)
    return keep @ keep.conj().T


@dataclass(frozen=True, eq=False)
class Projector:
    """Hermitian idempotent matrix carrying its own residual certificate.

    Build with :meth:`from_matrix`, which checks the certificate and, for
    marginal inputs, repairs by spectral rounding (``repaired`` is then True).
    """

    matrix: np.ndarray
    hermitian_residual: float
    idempotent_residual: float
    repaired: bool = False

    @classmethod
    def from_matrix(cls, m, tol=CERT_TOL, repair_tol=REPAIR_TOL):
        m = as_cmatrix(m)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"projector must be square, got {m.shape}")
        herm, idem = _certificate(m)
        repaired = False
        if herm > tol or idem > tol:
            if herm > repair_tol or idem > repair_tol:
                raise CertificateFailure(
                    f"not a projector: ||P-P*||={herm:.3e}, ||P^2-P||={idem:.3e}"
                )
            m = _spectral_round(m)
            herm, idem = _certificate(m)
            repaired = True
        return cls(_frozen(m), herm, idem, repaired)

    @classmethod
    def identity(cls, dim):
        return cls(_frozen(np.eye(dim)), 0.0, 0.0)

    @classmethod
    def zero(cls, dim):
        return cls(_frozen(np.zeros((dim, dim))), 0.0, 0.0)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def certificate(self):
        return (self.hermitian_residual, self.idempotent_residual)

    def complement(self):
        """The projector ``I - P`` onto the kernel."""
        m = np.eye(self.dim) - self.matrix
        return Projector(_frozen(m), *_certificate(m), self.repaired)

    def range(self, policy=DEFAULT_POLICY):
        return range_basis(self.matrix, policy)

    def kernel(self, policy=DEFAULT_POLICY):
        return null_basis(self.matrix, policy)

    def rank(self):
        # trace is exact for a projector up to rounding
        return int(round(np.trace(self.matrix).real))

    def __repr__(self):
        return (
            f"Projector(dim={self.dim}, rank={self.rank()}, "
            f"certificate=({self.hermitian_residual:.1e}, "
            f"{self.idempotent_residual:.1e}), repaired={self.repaired})"
        )


def _check_pair(p, q):
    if p.dim != q.dim:
        raise DimensionMismatch(f"projector dims differ: {p.dim} vs {q.dim}")


def project_onto(b):
    """``B B*`` as a certified projector. Raises NonOrthonormalBasis if needed."""
    b = SubspaceBasis.checked(b.basis if isinstance(b, SubspaceBasis) else b)
    return Projector.from_matrix(b.projector_matrix())


def range_sum(p, q, policy=DEFAULT_POLICY, check_tol=1e-9):
    """Basis of ``R(P) + R(Q)``, taken as the range of ``P + Q``.

    The result is compared against the orthonormalized concatenation of the
    two ranges; disagreement beyond ``check_tol`` raises CertificateFailure.
    """
    _check_pair(p, q)
    via_sum = range_basis(p.matrix + q.matrix, policy)
    via_cols = range_basis(np.hstack([p.matrix, q.matrix]), policy)
    if via_sum.rank != via_cols.rank or gap(via_sum, via_cols) > check_tol:
        raise CertificateFailure(
            "range of P+Q disagrees with span of the two ranges "
            f"(ranks {via_sum.rank} vs {via_cols.rank})"
        )
    return via_sum


def intersect_ranges(p, q, policy=DEFAULT_POLICY):
    """Basis of ``R(P) ∩ R(Q)``: the kernel of ``2I - P - Q``."""
    _check_pair(p, q)
    return null_basis(2.0 * np.eye(p.dim) - p.matrix - q.matrix, policy)


def intersect_ranges_svd(p, q, policy=DEFAULT_POLICY, cos_tol=1e-8):
    """Reference route: principal vectors of two range bases with cosine ~ 1.

    Kept independent of :func:`intersect_ranges` so the two can check each other.
    """
    _check_pair(p, q)
    bp = p.range(policy).basis
    bq = q.range(policy).basis
    if bp.shape[1] == 0 or bq.shape[1] == 0:
        return SubspaceBasis.empty(p.dim)
    u, s, _ = np.linalg.svd(bp.conj().T @ bq)
    k = int(np.count_nonzero(s >= 1.0 - cos_tol))
    return SubspaceBasis(bp @ u[:, :k])


def harmonious_ranges(p, q, policy=DEFAULT_POLICY):
    """Range bases of P+Q, P+I-Q, I-P+Q and 2I-P-Q.

    Two projections are harmonious when all four range closures are
    orthogonally complemented, which holds for every pair of matrices. The
    four ranges are returned for inspection only.
    """
    _check_pair(p, q)
    i = np.eye(p.dim)
    P, Q = p.matrix, q.matrix
    return (
        range_basis(P + Q, policy),
        range_basis(P + i - Q, policy),
        range_basis(i - P + Q, policy),
        range_basis(2 * i - P - Q, policy),
    )


@dataclass(frozen=True, eq=False)
class SixSpaceDecomposition:
    """``H = H1 ⊕ ... ⊕ H6`` for a pair of projections.

    H1..H4 are the four range/kernel intersections (R∩R, R∩N, N∩R, N∩N);
    H5 and H6 are what is left of R(P) and N(P), respectively.
    """

    bases: tuple
    projectors: tuple

    @property
    def ranks(self):
        return tuple(b.rank for b in self.bases)

    @property
    def dim(self):
        return self.bases[0].ambient_dim

    def stacked_basis(self):
        return np.hstack([b.basis for b in self.bases])

    def residuals(self, p):
        """Named residuals for the decomposition invariants."""
        mats = [pr.matrix for pr in self.projectors]
        i = np.eye(self.dim)
        cross = 0.0
        for a in range(6):
            for b in range(a + 1, 6):
                cross = max(cross, spectral_norm(mats[a] @ mats[b]))
        return {
            "resolution_of_identity": spectral_norm(sum(mats) - i),
            "mutual_orthogonality": cross,
            "p_split": spectral_norm(p.matrix - mats[0] - mats[1] - mats[4]),
            "complement_split": spectral_norm(i - p.matrix - mats[2] - mats[3] - mats[5]),
        }


def six_space_decomposition(p, q, policy=DEFAULT_POLICY, tol=1e-9):
    _check_pair(p, q)
    pc, qc = p.complement(), q.complement()
    b1 = intersect_ranges(p, q, policy)
    b2 = intersect_ranges(p, qc, policy)
    b3 = intersect_ranges(pc, q, policy)
    b4 = intersect_ranges(pc, qc, policy)
    p1, p2, p3, p4 = (Projector.from_matrix(b.projector_matrix()) for b in (b1, b2, b3, b4))
    p5 = Projector.from_matrix(p.matrix - p1.matrix - p2.matrix)
    p6 = Projector.from_matrix(pc.matrix - p3.matrix - p4.matrix)
    # a certified projector's range is its eigenvalue-1 cluster; an SVD rank
    # cut would count rounding noise when the generic part is empty
    b5 = SubspaceBasis(_spectral_range(p5.matrix))
    b6 = SubspaceBasis(_spectral_range(p6.matrix))
    dec = SixSpaceDecomposition((b1, b2, b3, b4, b5, b6), (p1, p2, p3, p4, p5, p6))
    if b5.rank != b6.rank:
        raise CertificateFailure(f"generic part ranks differ: r5={b5.rank}, r6={b6.rank}")
    worst = max(dec.residuals(p).values())
    if worst > tol:
        raise CertificateFailure(f"six-space invariants violated (max residual {worst:.3e})")
    return dec


def projection_onto_range_qp(p, q, policy=DEFAULT_POLICY):
    """Projector onto the range of ``QP``, as ``Q - P_{R(Q) ∩ N(P)}``."""
    _check_pair(p, q)
    inter = intersect_ranges(q, p.complement(), policy)
    return Projector.from_matrix(q.matrix - inter.projector_matrix())


def range_qp_orthogonal_split(p, q, policy=DEFAULT_POLICY):
    """``(basis of R(QP(I-Q)), basis of R(P) ∩ R(Q))``; together they span R(QP)."""
    _check_pair(p, q)
    P, Q = p.matrix, q.matrix
    first = range_basis(Q @ P @ (np.eye(p.dim) - Q), policy)
    return first, intersect_ranges(p, q, policy)
