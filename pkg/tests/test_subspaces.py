import numpy as np
import pytest
from hypothesis import given

from tpk import PairSpec, generate_pair
from tpk.errors import CertificateFailure, DimensionMismatch, NonOrthonormalBasis
from tpk.linalg import SubspaceBasis, gap, range_basis, spectral_norm
from tpk.subspaces import (
    Projector,
    harmonious_ranges,
    intersect_ranges,
    intersect_ranges_svd,
    project_onto,
    projection_onto_range_qp,
    range_qp_orthogonal_split,
    range_sum,
    six_space_decomposition,
)

from .conftest import projector_pairs, theta_pair
from .oracles import intersection_dim, orth, projector_gap, random_projector

E1 = np.diag([1.0, 0.0])
E2 = np.diag([0.0, 1.0])


def P(m):
    return Projector.from_matrix(m)


def block_diag_pair(*pairs):
    from scipy.linalg import block_diag

    return (
        P(block_diag(*[p.matrix for p, _ in pairs])),
        P(block_diag(*[q.matrix for _, q in pairs])),
    )


# --- Projector ----------------------------------------------------------------


def test_projector_certificate_exact():
    p = P(E1)
    assert p.certificate == (0.0, 0.0)
    assert not p.repaired
    assert p.rank() == 1


def test_projector_repair_marginal():
    m = E1 + 1e-9 * np.array([[0.0, 1.0], [0.0, 0.0]])
    p = P(m)
    assert p.repaired
    assert max(p.certificate) < 1e-12
    assert gap(p, E1) < 1e-8


def test_projector_rejects_non_projector():
    with pytest.raises(CertificateFailure):
        P(np.diag([1.0, 0.5]))


def test_projector_rejects_rectangular():
    with pytest.raises(DimensionMismatch):
        P(np.ones((2, 3)))


def test_projector_is_read_only():
    p = P(E1)
    with pytest.raises(ValueError):
        p.matrix[0, 0] = 0


def test_projector_complement_and_kernel():
    p = P(E1)
    assert gap(p.complement(), E2) == 0.0
    assert gap(p.kernel(), E2) < 1e-15
    assert gap(p.range(), E1) < 1e-15


@given(projector_pairs())
def test_generated_projectors_satisfy_invariants(case):
    _, p, q = case
    for x in (p, q):
        assert max(x.certificate) <= 1e-10
        ev = np.linalg.eigvalsh(x.matrix)
        assert np.all(np.minimum(np.abs(ev), np.abs(ev - 1)) < 1e-9)


# --- project_onto -------------------------------------------------------------


@pytest.mark.parametrize(
    "basis, expected",
    [
        (np.array([[1.0], [0.0]]), E1),
        (np.zeros((2, 0)), np.zeros((2, 2))),
        (np.array([[1.0], [1.0]]) / np.sqrt(2), np.full((2, 2), 0.5)),
    ],
)
def test_project_onto_examples(basis, expected):
    np.testing.assert_allclose(project_onto(SubspaceBasis(basis)).matrix, expected, atol=1e-15)


def test_project_onto_rejects_non_orthonormal():
    with pytest.raises(NonOrthonormalBasis):
        project_onto(np.array([[1.0], [1.0]]))


# --- range_sum / intersect_ranges ---------------------------------------------


def test_range_sum_equal():
    s = range_sum(P(E1), P(E1))
    assert s.rank == 1 and gap(s, E1) < 1e-15


def test_range_sum_orthogonal():
    s = range_sum(P(E1), P(E2))
    assert s.rank == 2 and gap(s, np.eye(2)) < 1e-15


def test_range_sum_random_two_routes(rng):
    p, q = P(random_projector(rng, 16, 5)), P(random_projector(rng, 16, 6))
    s = range_sum(p, q)
    assert gap(s, range_basis(np.hstack([p.matrix, q.matrix]))) < 1e-9
    assert s.rank == 11


def test_range_sum_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        range_sum(P(E1), P(np.eye(3)))


def test_intersect_equal():
    b = intersect_ranges(P(E1), P(E1))
    assert b.rank == 1 and gap(b, E1) < 1e-15


def test_intersect_distinct_lines(pi4_pair):
    assert intersect_ranges(*pi4_pair).rank == 0


def test_intersect_planted_block(rng):
    # R(P) and R(Q) share exactly span(e1, e2) in C^8
    e12 = np.eye(8)[:, :2]
    rest = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))[0]
    bp = np.hstack([e12, np.vstack([np.zeros((2, 2)), rest[:, :2]])])
    bq = np.hstack([e12, np.vstack([np.zeros((2, 3)), rest[:, 2:5]])])
    b = intersect_ranges(P(bp @ bp.conj().T), P(bq @ bq.conj().T))
    assert b.rank == 2
    assert gap(b, e12 @ e12.T) < 1e-9


def test_intersect_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        intersect_ranges(P(E1), P(np.eye(3)))


@given(projector_pairs())
def test_intersection_matches_oracles(case):
    spec, p, q = case
    b = intersect_ranges(p, q)
    assert b.rank == spec.shared_rank == intersection_dim(p.matrix, q.matrix)
    assert gap(b, intersect_ranges_svd(p, q)) < 1e-9


@given(projector_pairs())
def test_intersection_complements_range_of_2i_minus_sum(case):
    _, p, q = case
    b = intersect_ranges(p, q)
    r = range_basis(2 * np.eye(p.dim) - p.matrix - q.matrix)
    if b.rank and r.rank:
        assert spectral_norm(b.basis.conj().T @ r.basis) < 1e-9
    assert b.rank + r.rank == p.dim
    assert spectral_norm(b.projector_matrix() + r.projector_matrix() - np.eye(p.dim)) < 1e-9


def test_harmonious_ranges_shapes(pi4_pair):
    ranges = harmonious_ranges(*pi4_pair)
    assert [r.rank for r in ranges] == [2, 2, 2, 2]


# --- six-space decomposition ----------------------------------------------------


def test_six_space_equal():
    assert six_space_decomposition(P(E1), P(E1)).ranks == (1, 0, 0, 1, 0, 0)


def test_six_space_generic_line_pair(pi4_pair):
    assert six_space_decomposition(*pi4_pair).ranks == (0, 0, 0, 0, 1, 1)


def test_six_space_block_assembly(pi4_pair):
    p, q = block_diag_pair((P(E1), P(E1)), pi4_pair)
    assert six_space_decomposition(p, q).ranks == (1, 0, 0, 1, 1, 1)


@given(projector_pairs())
def test_six_space_invariants(case):
    _, p, q = case
    dec = six_space_decomposition(p, q)
    r = dec.ranks
    assert max(dec.residuals(p).values()) < 1e-9
    assert r[4] == r[5]
    assert r[0] + r[1] + r[4] == p.rank()
    assert r[2] + r[3] + r[5] == p.dim - p.rank()
    assert dec.stacked_basis().shape == (p.dim, p.dim)


def test_six_space_empty_generic_part_with_noise():
    # R(Q) inside R(P): P - P1 - P2 is pure rounding noise and must count as rank 0
    p, q = generate_pair(PairSpec(16, 8, 1, 1, 1058462416362651303))
    assert six_space_decomposition(p, q).ranks == (1, 7, 0, 8, 0, 0)


# --- range of QP ----------------------------------------------------------------


def test_qp_projection_p_identity(rng):
    q = P(random_projector(rng, 5, 2))
    np.testing.assert_allclose(projection_onto_range_qp(Projector.identity(5), q).matrix, q.matrix, atol=1e-12)


def test_qp_projection_p_zero(rng):
    q = P(random_projector(rng, 5, 2))
    assert spectral_norm(projection_onto_range_qp(Projector.zero(5), q).matrix) < 1e-12


def test_qp_projection_two_routes(rng):
    p, q = P(random_projector(rng, 12, 5)), P(random_projector(rng, 12, 4))
    assert projector_gap(projection_onto_range_qp(p, q).matrix, q.matrix @ p.matrix) < 1e-9


def test_qp_split_equal_projections():
    first, second = range_qp_orthogonal_split(P(E1), P(E1))
    assert first.rank == 0
    assert gap(second, E1) < 1e-15


def test_qp_split_generic_line_pair():
    first, second = range_qp_orthogonal_split(*theta_pair(np.pi / 3))
    assert (first.rank, second.rank) == (1, 0)


def test_qp_split_random(rng):
    p, q = P(random_projector(rng, 10, 4)), P(random_projector(rng, 10, 5))
    first, second = range_qp_orthogonal_split(p, q)
    if first.rank and second.rank:
        assert spectral_norm(first.basis.conj().T @ second.basis) < 1e-9
    union = first.projector_matrix() + second.projector_matrix()
    assert projector_gap(orth(union), q.matrix @ p.matrix) < 1e-9


@given(projector_pairs())
def test_corollary_qp_complement(case):
    _, p, q = case
    target = q.matrix - intersect_ranges(q, p.complement()).projector_matrix() - intersect_ranges(q, p).projector_matrix()
    lhs = range_basis(q.matrix @ p.matrix @ (np.eye(p.dim) - q.matrix))
    assert gap(lhs, target) < 1e-9
