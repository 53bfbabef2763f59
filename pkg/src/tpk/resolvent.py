"""Resolvent sequences of a pair of projections.

With ``T_n = (P + Q + I/n)^{-1}`` the sequences

    A_n = P - P T_n P,   B_n = P T_n Q,   C_n = Q - Q T_n Q

share a limit, and twice that limit is the projector onto ``R(P) ∩ R(Q)``.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionMismatch, NoConvergence, NotPositive
from .linalg import DEFAULT_POLICY, as_cmatrix, range_basis, spectral_norm
from .subspaces import Projector, _spectral_round, intersect_ranges

__all__ = [
    "resolvent_tn",
    "abc_sequences",
    "angle_operators",
    "TraceRecord",
    "ResolventTrace",
    "intersection_projector_iterative",
    "StrictLimit",
    "strict_limit_norm_check",
    "geometric_schedule",
    "N_MAX",
]

N_MAX = 2**20
TRACE_COLUMNS = ("n", "err_to_oracle", "diff_ab", "diff_bc", "norm_b")


def _check_pair(p, q):
    if p.dim != q.dim:
        raise DimensionMismatch(f"projector dims differ: {p.dim} vs {q.dim}")


def geometric_schedule(n_max):
    """``[1, 2, 4, ..., 2**ceil(log2(n_max))]``."""
    kmax = max(0, math.ceil(math.log2(n_max)))
    return [2**k for k in range(kmax + 1)]


def resolvent_tn(p, q, n):
    """``(P + Q + I/n)^{-1}`` by Cholesky factorization."""
    _check_pair(p, q)
    if n < 1:
        raise ValueError("n must be a positive integer")
    m = p.matrix + q.matrix + np.eye(p.dim) / n
    t = cho_solve(cho_factor(m, lower=True), np.eye(p.dim, dtype=np.complex128))
    return 0.5 * (t + t.conj().T)


def abc_sequences(p, q, n):
    _check_pair(p, q)
    P, Q = p.matrix, q.matrix
    t = resolvent_tn(p, q, n)
    a = P - P @ t @ P
    c = Q - Q @ t @ Q
    b = P @ t @ Q
    return 0.5 * (a + a.conj().T), b, 0.5 * (c + c.conj().T)


def _right_resolve(x, n):
    # x (x + I/n)^{-1} for Hermitian PSD x; the two factors commute
    i = np.eye(x.shape[0])
    f = cho_factor(x + i / n, lower=True)
    return cho_solve(f, x)


def angle_operators(p, q, n):
    """The pair ``(A_n, B_n)`` used to compare the two sides of the angle identity.

    ``A_n = PQ(2I-P-Q)(2I-P-Q+I/n)^{-1}`` and
    ``B_n = (I-P)(I-Q)(P+Q)(P+Q+I/n)^{-1}``, in original coordinates.
    """
    _check_pair(p, q)
    P, Q = p.matrix, q.matrix
    i = np.eye(p.dim)
    a = P @ Q @ _right_resolve(2 * i - P - Q, n)
    b = (i - P) @ (i - Q) @ _right_resolve(P + Q, n)
    return a, b


@dataclass(frozen=True)
class TraceRecord:
    n: int
    err_to_oracle: float
    diff_ab: float
    diff_bc: float
    norm_b: float


@dataclass
class ResolventTrace:
    schedule: list
    records: list = field(default_factory=list)
    converged: bool = False
    final_projector: Projector = None

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_COLUMNS)
            for r in self.records:
                w.writerow([r.n] + [format(getattr(r, c), ".17g") for c in TRACE_COLUMNS[1:]])

    def errors(self):
        return np.array([r.err_to_oracle for r in self.records])

    def max_norm_b(self):
        return max((r.norm_b for r in self.records), default=0.0)

    def error_monotone(self, slack=1e-12):
        e = self.errors()
        return bool(np.all(np.diff(e) <= slack))


def intersection_projector_iterative(p, q, tol=1e-2, n_max=N_MAX, policy=DEFAULT_POLICY):
    """Projector onto ``R(P) ∩ R(Q)`` as the limit of ``2 B_n``.

    Runs ``n = 1, 2, 4, ...`` up to ``n_max`` and stops once successive
    iterates of ``2 B_n`` differ by less than ``tol / 2`` and every eigenvalue
    of ``2 A_n`` lies within ``tol`` of 0 or 1. The iterate is then
    rounded to an exact projector (eigenvalues snapped at 1/2).

    The error of ``2 B_n`` decays like ``1/n`` with a constant that grows as
    the smallest nonzero principal angle shrinks, so tight ``tol`` values can
    exhaust the schedule on nearly-touching pairs; the rounding step only
    needs the error below 1/2.

    Returns ``(projector, trace)``. Raises NoConvergence (carrying the trace,
    whose ``final_projector`` is still set) when the schedule is exhausted.
    """
    _check_pair(p, q)
    if tol <= 0:
        raise ValueError("tol must be positive")
    oracle = intersect_ranges(p, q, policy).projector_matrix()
    trace = ResolventTrace(schedule=geometric_schedule(n_max))
    prev = None
    two_b = None
    for n in trace.schedule:
        a, b, c = abc_sequences(p, q, n)
        two_b = 2.0 * b
        trace.records.append(
            TraceRecord(
                n=n,
                err_to_oracle=spectral_norm(two_b - oracle),
                diff_ab=spectral_norm(a - b),
                diff_bc=spectral_norm(b - c),
                norm_b=spectral_norm(b),
            )
        )
        # small steps alone can be a plateau, so the spectrum of 2 A_n must
        # also have settled near {0, 1}
        ev = np.linalg.eigvalsh(2.0 * a)
        spread = float(np.max(np.minimum(np.abs(ev), np.abs(ev - 1.0)))) if ev.size else 0.0
        if prev is not None and spectral_norm(two_b - prev) < tol / 2 and spread < tol:
            trace.converged = True
            break
        prev = two_b
    trace.final_projector = Projector.from_matrix(_spectral_round(two_b))
    if not trace.converged:
        raise NoConvergence(
            f"successive iterates still differ by >= {tol / 2:g} at n = {trace.schedule[-1]}",
            trace,
        )
    return trace.final_projector, trace


@dataclass(frozen=True)
class StrictLimit:
    limit_estimate: float
    target: float
    schedule: tuple
    norms: tuple

    @property
    def error(self):
        return abs(self.limit_estimate - self.target)

    def monotone(self, slack=1e-12):
        return bool(np.all(np.diff(self.norms) >= -slack))


def strict_limit_norm_check(s, t, policy=DEFAULT_POLICY, n_max=N_MAX, pos_tol=1e-10):
    """Compare ``||S T_n||`` with ``||S P_{R(T)}||`` where ``T_n = (T + I/n)^{-1} T``.

    ``t`` must be Hermitian positive semidefinite (within ``pos_tol``).
    ``norms`` holds ``||S T_n||`` along the geometric schedule; the sequence
    is non-decreasing and ``limit_estimate`` is its last entry.
    """
    s = as_cmatrix(s)
    t = as_cmatrix(t)
    d = t.shape[0]
    if t.shape != (d, d) or s.shape[1] != d:
        raise DimensionMismatch(f"incompatible shapes {s.shape} and {t.shape}")
    if spectral_norm(t - t.conj().T) > pos_tol:
        raise NotPositive("T is not Hermitian")
    th = 0.5 * (t + t.conj().T)
    if d and np.linalg.eigvalsh(th)[0] < -pos_tol:
        raise NotPositive("T has a negative eigenvalue")
    target = spectral_norm(s @ range_basis(th, policy).projector_matrix())
    schedule = tuple(geometric_schedule(n_max))
    norms = []
    for n in schedule:
        tn = _right_resolve(th, n)
        norms.append(spectral_norm(s @ tn))
    return StrictLimit(norms[-1], target, schedule, tuple(norms))
