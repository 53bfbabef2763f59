"""Halmos canonical form of a pair of projections.

After the six-space split, ``P`` is ``I ⊕ I ⊕ 0 ⊕ 0 ⊕ I ⊕ 0`` and ``Q`` is
``I ⊕ 0 ⊕ I ⊕ 0 ⊕ T`` where the generic block ``T`` on ``H5 ⊕ H6`` is
determined by a Hermitian contraction ``Q0`` on H5 and a unitary
``U0: H6 -> H5``.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .errors import CertificateFailure, DegenerateGenericPart, InvalidForm
from .linalg import DEFAULT_POLICY, _frozen, as_cmatrix, spectral_norm
from .subspaces import Projector, six_space_decomposition

__all__ = [
    "HalmosForm",
    "halmos_decompose",
    "reconstruct",
    "polar_partial_isometry",
    "build_intertwiner",
    "hermitian_sqrt",
    "generic_block",
]

EIG_MARGIN = 1e-9


def hermitian_sqrt(h, lo=0.0, hi=1.0):
    """Square root via eigh, clamping eigenvalues to ``[lo, hi]`` first."""
    h = as_cmatrix(h)
    if h.shape[0] == 0:
        return h.copy()
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    w = np.sqrt(np.clip(w, lo, hi))
    return (v * w) @ v.conj().T


def polar_partial_isometry(t, policy=DEFAULT_POLICY):
    """Partial isometry ``U`` with ``T = U (T*T)^{1/2} = (TT*)^{1/2} U``.

    ``U*U`` and ``UU*`` are the projectors onto the ranges of ``T*`` and
    ``T``; ``U`` vanishes on the kernel of ``T``.
    """
    t = as_cmatrix(t)
    if t.size == 0:
        return np.zeros(t.shape, dtype=np.complex128)
    w, s, vh = np.linalg.svd(t, full_matrices=False)
    r = policy.rank(s)
    return w[:, :r] @ vh[:r]


@dataclass(frozen=True, eq=False)
class HalmosForm:
    """Output of :func:`halmos_decompose`.

    ``u_pq`` is the unitary whose rows are the stacked conjugated bases of
    H1..H6, so ``u_pq @ P @ u_pq.conj().T`` is block diagonal. The classical
    angle operators are ``C = sqrt(q0)``, ``D = sqrt(I - q0)`` and ``W ~ u0*``.
    """

    decomposition: object
    u_pq: np.ndarray
    q0: np.ndarray
    u0: np.ndarray
    tol: float = 1e-9

    @property
    def ranks(self):
        return self.decomposition.ranks

    @property
    def generic_rank(self):
        return self.ranks[4]

    @property
    def degenerate(self):
        return self.generic_rank == 0

    def q0_eigenvalues(self):
        if self.generic_rank == 0:
            return np.zeros(0)
        return np.linalg.eigvalsh(self.q0)

    def angles(self):
        """Principal angles of the generic part, ``arccos(sqrt(eig(q0)))``."""
        return np.arccos(np.sqrt(np.clip(self.q0_eigenvalues(), 0.0, 1.0)))

    def validate(self):
        d = self.u_pq.shape[0]
        r5 = self.generic_rank
        problems = []
        if self.u_pq.shape != (d, d):
            problems.append("u_pq is not square")
        elif spectral_norm(self.u_pq.conj().T @ self.u_pq - np.eye(d)) > self.tol:
            problems.append("u_pq is not unitary")
        if self.q0.shape != (r5, r5) or self.u0.shape != (r5, self.ranks[5]):
            problems.append("generic block shapes disagree with ranks")
        elif r5:
            if spectral_norm(self.q0 - self.q0.conj().T) > self.tol:
                problems.append("q0 is not Hermitian")
            if spectral_norm(self.u0.conj().T @ self.u0 - np.eye(r5)) > self.tol:
                problems.append("u0 is not unitary")
            ev = np.linalg.eigvalsh(0.5 * (self.q0 + self.q0.conj().T))
            if ev.min() <= EIG_MARGIN or ev.max() >= 1 - EIG_MARGIN:
                problems.append("q0 spectrum touches {0, 1}")
        if problems:
            raise InvalidForm("; ".join(problems))


def halmos_decompose(p, q, policy=DEFAULT_POLICY, tol=1e-9):
    """Compute the Halmos form of the pair ``(p, q)``.

    An empty generic part is allowed and reported with a
    ``DegenerateGenericPart`` warning. A ``q0`` eigenvalue within ``1e-9`` of
    0 or 1 raises CertificateFailure: it means the rank policy has put an
    intersection direction into the generic part.
    """
    dec = six_space_decomposition(p, q, policy, tol=tol)
    b5, b6 = dec.bases[4].basis, dec.bases[5].basis
    r5 = b5.shape[1]
    Q = q.matrix
    u_pq = dec.stacked_basis().conj().T
    if r5 == 0:
        warnings.warn(DegenerateGenericPart("generic part H5 (+) H6 is empty"), stacklevel=2)
        empty = np.zeros((0, 0), dtype=np.complex128)
        return HalmosForm(dec, _frozen(u_pq), _frozen(empty), _frozen(empty), tol)
    q0 = b5.conj().T @ Q @ b5
    q0 = 0.5 * (q0 + q0.conj().T)
    ev = np.linalg.eigvalsh(q0)
    if ev[0] <= EIG_MARGIN or ev[-1] >= 1.0 - EIG_MARGIN:
        raise CertificateFailure(
            f"q0 spectrum [{ev[0]:.3e}, {ev[-1]:.3e}] touches {{0, 1}}: "
            "an intersection direction leaked into the generic part"
        )
    # off-diagonal block equals q0^{1/2} U0 q1^{1/2}, whose unitary polar factor is U0
    off = b5.conj().T @ Q @ b6
    u0 = polar_partial_isometry(off, policy)
    form = HalmosForm(dec, _frozen(u_pq), _frozen(q0), _frozen(u0), tol)
    form.validate()
    return form


def generic_block(q0, u0):
    """The ``H5 ⊕ H6`` block of ``Q`` in canonical coordinates."""
    r5 = q0.shape[0]
    i = np.eye(r5)
    c = hermitian_sqrt(q0)
    s = hermitian_sqrt(i - q0)
    cs = c @ s
    return np.block(
        [
            [q0, cs @ u0],
            [u0.conj().T @ cs, u0.conj().T @ (i - q0) @ u0],
        ]
    )


def _canonical(form):
    r1, r2, r3, r4, r5, r6 = form.ranks
    eye = np.eye
    z = lambda k: np.zeros((k, k))  # noqa: E731
    p_c = block_diag(eye(r1), eye(r2), z(r3), z(r4), eye(r5), z(r6))
    if r5:
        t = generic_block(np.asarray(form.q0), np.asarray(form.u0))
    else:
        t = z(0)
    q_c = block_diag(eye(r1), z(r2), eye(r3), z(r4), t)
    return p_c.astype(np.complex128), q_c.astype(np.complex128)


def reconstruct(form):
    """Rebuild ``(P, Q)`` from the canonical blocks of a HalmosForm."""
    form.validate()
    p_c, q_c = _canonical(form)
    u = np.asarray(form.u_pq)
    uh = u.conj().T
    return Projector.from_matrix(uh @ p_c @ u), Projector.from_matrix(uh @ q_c @ u)


def build_intertwiner(form):
    """Unitary ``U`` with ``U A_n U* = B_n`` for every ``n``, in original coordinates.

    In canonical coordinates it is the identity on H1..H4 and
    ``[[0, U0], [-U0*, 0]]`` on ``H5 ⊕ H6``.
    """
    form.validate()
    r1, r2, r3, r4, r5, r6 = form.ranks
    u0 = np.asarray(form.u0)
    gen = np.block(
        [
            [np.zeros((r5, r5)), u0],
            [-u0.conj().T, np.zeros((r6, r6))],
        ]
    ) if r5 else np.zeros((0, 0))
    inner = block_diag(np.eye(r1 + r2 + r3 + r4), gen).astype(np.complex128)
    u = np.asarray(form.u_pq)
    return u.conj().T @ inner @ u
