"""Reference routes and frozen values the tests compare against.

The routes here avoid the package's own intersection and angle code: they
work from explicit orthonormal bases with textbook SVD formulas, so that an
error in the library cannot be mirrored in the check.
"""

import numpy as np

# Frozen from the first trusted run. Friedrichs cosines of seeded pairs and
# the Halmos rank profile, compared at 1e-12.
FROZEN_PAIRS = [
    # (dim, rank_p, rank_q, shared_rank, seed), c(M, N), ranks r1..r6
    ((16, 5, 7, 0, 42), 0.8682919001955635, (0, 0, 2, 4, 5, 5)),
    ((8, 3, 4, 1, 7), 0.8839554697474002, (1, 0, 1, 2, 2, 2)),
    ((12, 6, 5, 2, 2024), 0.7985115060103681, (2, 1, 0, 3, 3, 3)),
]

# q0 of the line pair at angle theta is the 1x1 matrix cos(theta)^2
THETA_Q0 = {
    np.pi / 6: 0.75,
    np.pi / 4: 0.5,
    np.pi / 3: 0.25,
}

# bump ratio of the hat element on the counterexample grids; it scales like
# sin(pi t_1 / 2) / 4 with t_1 the first grid spacing
FROZEN_BUMP = {65: 0.006135675988219215, 257: 0.0015339548097253266, 1025: 0.00038348926200847285}


def line_projector(theta):
    """Projector onto span((cos theta, sin theta)) in C^2."""
    v = np.array([np.cos(theta), np.sin(theta)], dtype=complex)
    return np.outer(v, v.conj())


def orth(a, tol=1e-10):
    """Orthonormal basis of the column space of ``a`` by QR with an SVD cut."""
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0])]


def principal_cosines(a, b):
    """Cosines of the principal angles between the column spaces of ``a`` and ``b``."""
    qa, qb = orth(a), orth(b)
    if qa.shape[1] == 0 or qb.shape[1] == 0:
        return np.zeros(0)
    return np.clip(np.linalg.svd(qa.conj().T @ qb, compute_uv=False), 0.0, 1.0)


def intersection_dim(p, q, tol=1e-8):
    return int(np.count_nonzero(principal_cosines(p, q) > 1 - tol))


def friedrichs_reference(p, q, tol=1e-8):
    cos = principal_cosines(p, q)
    rest = cos[cos <= 1 - tol]
    return float(rest.max()) if rest.size else 0.0


def projector_gap(a, b):
    """``||P_A - P_B||`` for column spaces ``a`` and ``b``."""
    qa, qb = orth(a), orth(b)
    return float(np.linalg.norm(qa @ qa.conj().T - qb @ qb.conj().T, 2))


def random_projector(rng, dim, rank):
    z = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    q, _ = np.linalg.qr(z)
    return q @ q.conj().T
