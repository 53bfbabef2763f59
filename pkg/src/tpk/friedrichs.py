"""Friedrichs angle between subspaces and the two-sided norm identity.

The cosine of the Friedrichs angle is ``c(M, N) = ||P_M P_N (I - P_{M∩N})||``.
For projections ``P`` and ``Q`` the identity

    ||PQ(I - P_{R(P)∩R(Q)})|| = ||(I-P)(I-Q)(I - P_{N(P)∩N(Q)})||

says ``c(M, N) = c(M⊥, N⊥)``.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import CertificateFailure, DimensionMismatch
from .linalg import DEFAULT_POLICY, spectral_norm
from .subspaces import Projector, intersect_ranges

__all__ = [
    "AngleReport",
    "PQPredicates",
    "friedrichs_c",
    "friedrichs_c_oracle",
    "friedrichs_angle",
    "verify_norm_equation",
    "pq_norm_predicates",
    "clamp_unit",
    "COS_TOL",
]

# cosines this close to 1 are intersection directions in the oracle
COS_TOL = 1e-8
CLAMP_TOL = 1e-12


def clamp_unit(x, tol=CLAMP_TOL):
    """Clamp ``x`` into ``[0, 1]`` if it is within ``tol`` outside; else raise."""
    if x < -tol or x > 1 + tol:
        raise CertificateFailure(f"value {x!r} is outside [0, 1] beyond rounding")
    return min(max(x, 0.0), 1.0)


def _check_bases(m, n):
    if m.ambient_dim != n.ambient_dim:
        raise DimensionMismatch(f"ambient dims differ: {m.ambient_dim} vs {n.ambient_dim}")


def friedrichs_c(m, n, policy=DEFAULT_POLICY):
    """``||P_M P_N (I - P_{M∩N})||`` for orthonormal bases ``m`` and ``n``."""
    _check_bases(m, n)
    pm = Projector.from_matrix(m.projector_matrix())
    pn = Projector.from_matrix(n.projector_matrix())
    omega = intersect_ranges(pm, pn, policy).projector_matrix()
    d = m.ambient_dim
    return clamp_unit(spectral_norm(pm.matrix @ pn.matrix @ (np.eye(d) - omega)))


def friedrichs_c_oracle(m, n, cos_tol=COS_TOL):
    """Largest principal-angle cosine strictly below 1, or 0.

    Principal cosines are the singular values of ``M* N``; those within
    ``cos_tol`` of 1 belong to ``M ∩ N`` and are dropped.
    """
    _check_bases(m, n)
    if m.rank == 0 or n.rank == 0:
        return 0.0
    cos = np.linalg.svd(m.basis.conj().T @ n.basis, compute_uv=False)
    rest = cos[cos < 1.0 - cos_tol]
    return clamp_unit(float(rest.max())) if rest.size else 0.0


def friedrichs_angle(m, n, policy=DEFAULT_POLICY):
    """The angle in ``[0, pi/2]`` whose cosine is ``c(M, N)``."""
    return float(np.arccos(friedrichs_c(m, n, policy)))


@dataclass(frozen=True)
class AngleReport:
    c_value: float
    c_oracle: float
    lhs_norm: float
    rhs_norm: float
    duality_gap: float
    intersection_rank: int
    kernel_intersection_rank: int

    def residuals(self):
        return {
            "oracle": abs(self.c_value - self.c_oracle),
            "norm_equation": abs(self.lhs_norm - self.rhs_norm),
            "duality": self.duality_gap,
        }

    def ok(self, tol=1e-9):
        return all(v <= tol for v in self.residuals().values())

    def to_dict(self):
        return asdict(self)


def verify_norm_equation(p, q, policy=DEFAULT_POLICY):
    """Evaluate both sides of the norm identity and the angle duality for ``(p, q)``."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"projector dims differ: {p.dim} vs {q.dim}")
    d = p.dim
    i = np.eye(d)
    P, Q = p.matrix, q.matrix
    pc, qc = p.complement(), q.complement()
    omega = intersect_ranges(p, q, policy)
    omega_k = intersect_ranges(pc, qc, policy)
    lhs = spectral_norm(P @ Q @ (i - omega.projector_matrix()))
    rhs = spectral_norm((i - P) @ (i - Q) @ (i - omega_k.projector_matrix()))

    m, n = p.range(policy), q.range(policy)
    m_perp, n_perp = p.kernel(policy), q.kernel(policy)
    c = friedrichs_c(m, n, policy)
    c_perp = friedrichs_c(m_perp, n_perp, policy)
    return AngleReport(
        c_value=c,
        c_oracle=friedrichs_c_oracle(m, n),
        lhs_norm=lhs,
        rhs_norm=rhs,
        duality_gap=abs(c - c_perp),
        intersection_rank=omega.rank,
        kernel_intersection_rank=omega_k.rank,
    )


@dataclass(frozen=True)
class PQPredicates:
    norm_pq: float
    trivial_intersection: bool
    gap_norm: float

    def consistent(self, margin=1e-9):
        """``||PQ|| < 1`` iff the intersection is trivial, and ``||PQ - P_Ω|| < 1``."""
        return ((self.norm_pq < 1 - margin) == self.trivial_intersection) and (
            self.gap_norm < 1 - margin
        )


def pq_norm_predicates(p, q, policy=DEFAULT_POLICY):
    if p.dim != q.dim:
        raise DimensionMismatch(f"projector dims differ: {p.dim} vs {q.dim}")
    pq = p.matrix @ q.matrix
    omega = intersect_ranges(p, q, policy)
    return PQPredicates(
        norm_pq=spectral_norm(pq),
        trivial_intersection=omega.rank == 0,
        gap_norm=spectral_norm(pq - omega.projector_matrix()),
    )

