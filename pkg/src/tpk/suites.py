"""Named verification suites run over seeded random projector pairs.

Each suite reduces its trials to the maximum residual per named invariant
and passes iff every maximum is strictly below its tolerance. Because the
reduction is a max, the report does not depend on trial order or threading.
"""

import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cstar import (
    COMBINATIONS,
    build_example,
    distance_to_unit,
    distance_to_unit_batch,
    kernel_probe,
    least_squares_adversary,
    refinement_levels,
)
from .errors import NoConvergence, TPKError, UnknownSuite
from .friedrichs import pq_norm_predicates, verify_norm_equation
from .halmos import build_intertwiner, halmos_decompose, hermitian_sqrt, reconstruct
from .linalg import DEFAULT_POLICY, gap, range_basis, spectral_norm
from .resolvent import N_MAX, abc_sequences, angle_operators, intersection_projector_iterative
from .sampling import child_seeds, generate_pair, random_pair_specs
from .subspaces import (
    intersect_ranges,
    projection_onto_range_qp,
    range_qp_orthogonal_split,
)

__all__ = ["SuiteReport", "SUITES", "run_suite", "thread_count", "Tolerance"]


@dataclass(frozen=True)
class Tolerance:
    value: float
    scalable: bool = True


@dataclass
class SuiteReport:
    suite: str
    trials: int
    max_residual: dict
    tolerances: dict
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.max_residual[k] < self.tolerances[k] for k in self.tolerances)

    def failures(self):
        return [k for k in self.tolerances if not self.max_residual[k] < self.tolerances[k]]

    def to_dict(self, include_time=True):
        out = {
            "suite": self.suite,
            "trials": self.trials,
            "passed": self.passed,
            "max_residual": {k: _finite(v) for k, v in self.max_residual.items()},
            "tolerances": dict(self.tolerances),
        }
        if self.details:
            out["details"] = self.details
        if include_time:
            out["wall_time"] = self.wall_time
        return out


def _finite(x):
    # JSON has no infinity; a failed trial reports as a huge residual
    return x if math.isfinite(x) else 1e308


def thread_count():
    try:
        return max(1, int(os.environ.get("TPK_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items):
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _merge(rows, keys):
    out = dict.fromkeys(keys, 0.0)
    for row in rows:
        # keys missing from a row do not apply to that pair (e.g. no generic part)
        for k in keys:
            if k in row:
                out[k] = max(out[k], row[k])
    return out


def _guard(check, keys):
    """Wrap a per-pair check so package errors become infinite residuals."""

    def run(pair):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return check(*pair)
        except (TPKError, np.linalg.LinAlgError):
            return dict.fromkeys(keys, math.inf)

    return run


# --- per-pair checks -------------------------------------------------------


def _check_norm_eq(p, q, policy=DEFAULT_POLICY):
    r = verify_norm_equation(p, q, policy)
    return {"norm_equation": abs(r.lhs_norm - r.rhs_norm)}


def _check_duality(p, q, policy=DEFAULT_POLICY):
    r = verify_norm_equation(p, q, policy)
    return {"duality": r.duality_gap, "oracle": abs(r.c_value - r.c_oracle)}


def _check_lattice(p, q, policy=DEFAULT_POLICY):
    d = p.dim
    i = np.eye(d)
    P, Q = p.matrix, q.matrix
    pc, qc = p.complement(), q.complement()

    # R(P) + R(Q) as range of P+Q versus span of both column spaces
    sum_gap = gap(range_basis(P + Q, policy), range_basis(np.hstack([P, Q]), policy))

    qp_formula = projection_onto_range_qp(p, q, policy)
    qp_gap = gap(qp_formula, range_basis(Q @ P, policy))

    first, inter = range_qp_orthogonal_split(p, q, policy)
    split_orth = spectral_norm(first.basis.conj().T @ inter.basis) if first.rank and inter.rank else 0.0
    union = first.projector_matrix() + inter.projector_matrix()
    split_span = gap(union, range_basis(Q @ P, policy))

    q_cap_np = intersect_ranges(q, pc, policy).projector_matrix()
    q_cap_rp = intersect_ranges(q, p, policy).projector_matrix()
    corollary = gap(range_basis(Q @ P @ (i - Q), policy), Q - q_cap_np - q_cap_rp)

    comp_sum = range_basis(pc.matrix + qc.matrix, policy)
    closed_sum = gap(comp_sum, i - intersect_ranges(p, q, policy).projector_matrix())
    return {
        "range_sum": sum_gap,
        "qp_projection": qp_gap,
        "qp_split_orthogonality": split_orth,
        "qp_split_span": split_span,
        "corollary_qp_complement": corollary,
        "complement_sum": closed_sum,
    }


def _check_halmos(p, q, policy=DEFAULT_POLICY, ns=(1, 10, 100, 10**4)):
    form = halmos_decompose(p, q, policy)
    pp, qq = reconstruct(form)
    out = {"round_trip": max(gap(pp, p), gap(qq, q))}
    u = build_intertwiner(form)
    inter = 0.0
    for n in ns:
        a, b = angle_operators(p, q, n)
        inter = max(inter, spectral_norm(u @ a @ u.conj().T - b))
    out["intertwiner"] = inter
    r5 = form.generic_rank
    if r5:
        ev = form.q0_eigenvalues()
        out["q0_margin_violations"] = float(np.count_nonzero(np.minimum(ev, 1 - ev) <= 1e-9))
        b5 = form.decomposition.bases[4].basis
        b6 = form.decomposition.bases[5].basis
        Q = q.matrix
        q0 = np.asarray(form.q0)
        u0 = np.asarray(form.u0)
        q1 = b6.conj().T @ Q @ b6
        out["q1_relation"] = spectral_norm(q1 - u0.conj().T @ (np.eye(r5) - q0) @ u0)
        off = b5.conj().T @ Q @ b6
        out["off_diagonal"] = spectral_norm(off - hermitian_sqrt(q0) @ u0 @ hermitian_sqrt(q1))
        out["spectrum_symmetry"] = float(
            np.max(np.abs(np.sort(np.linalg.eigvalsh(q0)) - np.sort(np.linalg.eigvalsh(np.eye(r5) - q1))))
        )
        p5 = form.decomposition.projectors[4].matrix
        p6 = form.decomposition.projectors[5].matrix
        target = range_basis(Q @ p.matrix @ (np.eye(p.dim) - Q), policy)
        out["generic_ranges"] = max(
            gap(range_basis(p5 @ Q, policy), p5),
            gap(range_basis(p6 @ Q, policy), p6),
            gap(range_basis(Q @ p5, policy), target),
            gap(range_basis(Q @ p6, policy), target),
        )
    return out


# The relative error of the computed ||2B_n x - x|| grows like n^2 * eps, so
# the ratio is only resolvable to 1e-9 up to about n = 2**10.
SCALAR_LAW_NS = (1, 2**5, 2**10)


def _check_resolvent(p, q, policy=DEFAULT_POLICY, n_max=N_MAX, tol=1e-2):
    oracle = intersect_ranges(p, q, policy)
    try:
        proj, trace = intersection_projector_iterative(p, q, tol=tol, n_max=n_max, policy=policy)
        converged = True
    except NoConvergence as exc:
        trace, proj, converged = exc.trace, exc.trace.final_projector, False
    out = {
        "limit_gap": gap(proj, oracle) if converged else math.inf,
        "max_norm_b": trace.max_norm_b(),
    }
    scalar = 0.0
    if oracle.rank:
        x = oracle.basis
        for n in SCALAR_LAW_NS:
            _, b, _ = abc_sequences(p, q, n)
            err = np.linalg.norm(2 * b @ x - x, axis=0) * (2 * n + 1) / np.linalg.norm(x, axis=0)
            scalar = max(scalar, float(np.max(np.abs(err - 1.0))))
    out["scalar_law"] = scalar
    return out


def _check_predicates(p, q, policy=DEFAULT_POLICY, margin=1e-9):
    r = pq_norm_predicates(p, q, policy)
    mismatch = (r.norm_pq < 1 - margin) != r.trivial_intersection
    return {"biconditional_violations": float(mismatch), "gap_norm": r.gap_norm}


SUITES = {
    "norm-eq": (_check_norm_eq, {"norm_equation": Tolerance(1e-10)}),
    "duality": (_check_duality, {"duality": Tolerance(1e-9), "oracle": Tolerance(1e-9)}),
    "lattice": (
        _check_lattice,
        {
            "range_sum": Tolerance(1e-9),
            "qp_projection": Tolerance(1e-9),
            "qp_split_orthogonality": Tolerance(1e-9),
            "qp_split_span": Tolerance(1e-9),
            "corollary_qp_complement": Tolerance(1e-9),
            "complement_sum": Tolerance(1e-9),
        },
    ),
    "halmos": (
        _check_halmos,
        {
            "round_trip": Tolerance(1e-8),
            "intertwiner": Tolerance(1e-9),
            "q0_margin_violations": Tolerance(0.5, scalable=False),
            "q1_relation": Tolerance(1e-9),
            "off_diagonal": Tolerance(1e-9),
            "spectrum_symmetry": Tolerance(1e-9),
            "generic_ranges": Tolerance(1e-9),
        },
    ),
    "resolvent": (
        _check_resolvent,
        {
            "limit_gap": Tolerance(1e-8),
            "max_norm_b": Tolerance(1.0, scalable=False),
            "scalar_law": Tolerance(1e-9),
        },
    ),
    "predicates": (
        _check_predicates,
        {
            "biconditional_violations": Tolerance(0.5, scalable=False),
            "gap_norm": Tolerance(1 - 1e-9, scalable=False),
        },
    ),
}

DEFAULT_SHARED = {"resolvent": (0, 2)}

COUNTEREXAMPLE_GRIDS = (65, 257, 1025)


def _tolerances(table, scale):
    return {k: (t.value * scale if t.scalable else t.value) for k, t in table.items()}


def run_suite(name, dim=16, trials=100, seed=0, tol_scale=1.0, pairs=None, shared_ranks=None, grids=None):
    """Run the named suite and return a :class:`SuiteReport`.

    ``pairs`` (a list of ``(P, Q)`` projector tuples) replaces the random
    population when given. The ``counterexample`` suite ignores ``dim`` and
    uses ``grids`` (default 65, 257 and 1025 nodes) with ``trials`` random
    grid functions per grid and combination.
    """
    start = time.perf_counter()
    if name == "counterexample":
        report = _run_counterexample(trials, seed, tol_scale, grids or COUNTEREXAMPLE_GRIDS)
    elif name in SUITES:
        check, table = SUITES[name]
        keys = list(table)
        if pairs is None:
            shared = shared_ranks or DEFAULT_SHARED.get(name, (0, 1, 3))
            specs = random_pair_specs(dim, trials, seed, shared)
            rows = _map(_guard(lambda spec: check(*generate_pair(spec)), keys), [(s,) for s in specs])
            n = len(specs)
        else:
            rows = _map(_guard(check, keys), list(pairs))
            n = len(pairs)
        report = SuiteReport(name, n, _merge(rows, keys), _tolerances(table, tol_scale))
    else:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(list(SUITES) + ['counterexample'])}")
    report.wall_time = time.perf_counter() - start
    return report


def random_grid_values(rng, batch, n_nodes, ex=None, combo=None):
    """Random node values: Gaussian with per-trial log-uniform scale.

    Every third trial perturbs the least-squares adversary instead, so the
    population also probes the neighbourhood of the best node-wise fit.
    """
    scale = 10.0 ** rng.uniform(-3, 3, size=(batch, 1, 1, 1))
    z = rng.standard_normal((batch, n_nodes, 2, 2)) + 1j * rng.standard_normal((batch, n_nodes, 2, 2))
    vals = scale * z
    if ex is not None:
        adv = least_squares_adversary(ex, combo).values
        near = np.arange(batch) % 3 == 2
        vals[near] = adv + 1e-3 * scale[near] * z[near]
    return vals


def counterexample_study(n_nodes, trials, seed, batch=500):
    """Minimum ``distance_to_unit`` per combination over random and adversarial elements."""
    ex = build_example(n_nodes)
    mins = {}
    for combo, child in zip(COMBINATIONS, child_seeds(seed, len(COMBINATIONS))):
        rng = np.random.default_rng(child)
        best = distance_to_unit(ex, least_squares_adversary(ex, combo), combo)
        done = 0
        while done < trials:
            k = min(batch, trials - done)
            d = distance_to_unit_batch(ex, random_grid_values(rng, k, n_nodes, ex, combo), combo)
            best = min(best, float(d.min()))
            done += k
        mins[combo] = best
    return mins


def _run_counterexample(trials, seed, tol_scale, grids):
    mins_by_grid = {}
    for n_nodes, child in zip(grids, child_seeds(seed, len(grids))):
        mins_by_grid[n_nodes] = counterexample_study(n_nodes, trials, child)
    worst = min(min(m.values()) for m in mins_by_grid.values())

    levels = sorted(set(grids)) if len(grids) > 1 else refinement_levels(grids[0])
    ratios = [kernel_probe(build_example(n)).bump_ratio for n in levels]
    increasing_steps = sum(1 for a, b in zip(ratios, ratios[1:]) if not b < a)
    kernel_dims = {n: kernel_probe(build_example(n)).pointwise_kernel_dims for n in levels}

    table = {
        "unit_distance_deficit": Tolerance(1e-12),
        "bump_non_decreasing_steps": Tolerance(0.5, scalable=False),
        "bump_ratio_finest": Tolerance(0.05, scalable=False),
    }
    residual = {
        "unit_distance_deficit": max(0.0, 1.0 - worst),
        "bump_non_decreasing_steps": float(increasing_steps),
        "bump_ratio_finest": ratios[-1],
    }
    details = {
        "min_distance_to_unit": {str(n): m for n, m in mins_by_grid.items()},
        "bump_ratio": {str(n): r for n, r in zip(levels, ratios)},
        "pointwise_kernel_dims": {
            str(n): {"nodes_with_kernel": [i for i, k in enumerate(d) if k], "max_dim": max(d)}
            for n, d in kernel_dims.items()
        },
    }
    return SuiteReport("counterexample", trials, residual, _tolerances(table, tol_scale), details=details)
