import warnings

import numpy as np
import pytest
from hypothesis import given

from tpk import PairSpec, generate_pair
from tpk.errors import CertificateFailure, DegenerateGenericPart, InvalidForm
from tpk.halmos import (
    HalmosForm,
    build_intertwiner,
    generic_block,
    halmos_decompose,
    hermitian_sqrt,
    polar_partial_isometry,
    reconstruct,
)
from tpk.linalg import gap, range_basis, spectral_norm
from tpk.resolvent import angle_operators
from tpk.sampling import haar_unitary
from tpk.subspaces import Projector

from .conftest import projector_pairs, theta_pair
from .oracles import FROZEN_PAIRS, THETA_Q0


def decompose_quiet(p, q):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateGenericPart)
        return halmos_decompose(p, q)


# --- the theta family -----------------------------------------------------------


@pytest.mark.parametrize("theta", sorted(THETA_Q0))
def test_theta_family_q0(theta):
    form = halmos_decompose(*theta_pair(theta))
    assert form.ranks == (0, 0, 0, 0, 1, 1)
    assert abs(form.q0[0, 0] - THETA_Q0[theta]) < 1e-12
    assert abs(form.angles()[0] - theta) < 1e-7


def test_pi4_round_trip(pi4_pair):
    p, q = pi4_pair
    pp, qq = reconstruct(halmos_decompose(p, q))
    assert max(gap(pp, p), gap(qq, q)) < 1e-10


def test_equal_projections_are_degenerate():
    p = Projector.from_matrix(np.diag([1.0, 0.0]))
    with pytest.warns(DegenerateGenericPart):
        form = halmos_decompose(p, p)
    assert form.degenerate
    assert form.q0.shape == (0, 0) and form.u0.shape == (0, 0)
    pp, qq = reconstruct(form)
    assert gap(pp, p) < 1e-15 and gap(qq, p) < 1e-15
    # in canonical coordinates both are the pattern I (+) 0
    u = form.u_pq
    np.testing.assert_allclose(u @ pp.matrix @ u.conj().T, np.diag([1.0, 0.0]), atol=1e-15)


@pytest.mark.parametrize("dims, c, ranks", FROZEN_PAIRS)
def test_frozen_rank_profiles(dims, c, ranks):
    form = decompose_quiet(*generate_pair(PairSpec(*dims)))
    assert form.ranks == ranks


# --- invariants on random pairs ------------------------------------------------------


@given(projector_pairs())
def test_form_invariants(case):
    _, p, q = case
    form = decompose_quiet(p, q)
    d = p.dim
    assert spectral_norm(form.u_pq.conj().T @ form.u_pq - np.eye(d)) <= 1e-9
    r5 = form.generic_rank
    assert form.ranks[4] == form.ranks[5]
    if r5:
        ev = form.q0_eigenvalues()
        assert ev.min() > 1e-9 and ev.max() < 1 - 1e-9
        assert spectral_norm(form.u0.conj().T @ form.u0 - np.eye(r5)) <= 1e-9
    pp, qq = reconstruct(form)
    assert max(gap(pp, p), gap(qq, q)) < 1e-8


@given(projector_pairs())
def test_generic_block_relations(case):
    _, p, q = case
    form = decompose_quiet(p, q)
    r5 = form.generic_rank
    if not r5:
        return
    b5 = form.decomposition.bases[4].basis
    b6 = form.decomposition.bases[5].basis
    Q = q.matrix
    q0, u0 = form.q0, form.u0
    q1 = b6.conj().T @ Q @ b6
    i = np.eye(r5)
    assert spectral_norm(q1 - u0.conj().T @ (i - q0) @ u0) < 1e-9
    assert spectral_norm(b5.conj().T @ Q @ b6 - hermitian_sqrt(q0) @ u0 @ hermitian_sqrt(q1)) < 1e-9
    ev0 = np.sort(np.linalg.eigvalsh(q0))
    ev1 = np.sort(np.linalg.eigvalsh(i - q1))
    assert np.max(np.abs(ev0 - ev1)) < 1e-9
    # C^2 + D^2 = I and CD = DC for C = sqrt(q0), D = sqrt(I - q0)
    c, dd = hermitian_sqrt(q0), hermitian_sqrt(i - q0)
    assert spectral_norm(c @ c + dd @ dd - i) < 1e-12
    assert spectral_norm(c @ dd - dd @ c) < 1e-12


@given(projector_pairs())
def test_generic_ranges(case):
    _, p, q = case
    form = decompose_quiet(p, q)
    if not form.generic_rank:
        return
    Q = q.matrix
    p5 = form.decomposition.projectors[4].matrix
    p6 = form.decomposition.projectors[5].matrix
    target = range_basis(Q @ p.matrix @ (np.eye(p.dim) - Q))
    assert gap(range_basis(p5 @ Q), p5) < 1e-9
    assert gap(range_basis(p6 @ Q), p6) < 1e-9
    assert gap(range_basis(Q @ p5), target) < 1e-9
    assert gap(range_basis(Q @ p6), target) < 1e-9


def test_round_trip_statistical():
    rng = np.random.default_rng(16)
    worst = 0.0
    for seed in rng.integers(0, 2**63, size=200):
        dims = rng.integers(0, 17, size=2)
        rp = int(dims[0])
        rq = int(rng.integers(0, 16 - rp + 1))
        p, q = generate_pair(PairSpec(16, rp, rq, 0, int(seed)))
        pp, qq = reconstruct(decompose_quiet(p, q))
        worst = max(worst, gap(pp, p), gap(qq, q))
    assert worst < 1e-8


def test_near_touching_spectrum_raises():
    # lines at angle 1e-6 have q0 = cos^2 within 1e-12 of 1, below the margin
    with pytest.raises(CertificateFailure):
        halmos_decompose(*theta_pair(1e-6))


def test_validate_rejects_bad_form(pi4_pair):
    form = halmos_decompose(*pi4_pair)
    bad = HalmosForm(form.decomposition, form.u_pq, np.array([[1.5]]), form.u0)
    with pytest.raises(InvalidForm):
        reconstruct(bad)
    with pytest.raises(InvalidForm):
        build_intertwiner(bad)


def test_generic_block_is_projector():
    q0 = np.diag([0.2, 0.7])
    u0 = haar_unitary(2, 3)
    t = generic_block(q0, u0)
    assert spectral_norm(t @ t - t) < 1e-12
    assert spectral_norm(t - t.conj().T) < 1e-12


# --- polar factor -------------------------------------------------------------------


def test_polar_of_unitary():
    u = haar_unitary(4, 1)
    np.testing.assert_allclose(polar_partial_isometry(u), u, atol=1e-12)


def test_polar_of_diagonal():
    np.testing.assert_allclose(polar_partial_isometry(np.diag([3.0, 0.0])), np.diag([1.0, 0.0]), atol=1e-15)


def test_polar_rank_deficient(rng):
    t = (rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))) @ (
        rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    )
    u = polar_partial_isometry(t)
    abs_t = hermitian_sqrt(t.conj().T @ t, hi=np.inf)
    abs_ts = hermitian_sqrt(t @ t.conj().T, hi=np.inf)
    scale = spectral_norm(t)
    assert spectral_norm(t - u @ abs_t) < 1e-9 * scale
    assert spectral_norm(t - abs_ts @ u) < 1e-9 * scale
    assert spectral_norm(u @ u.conj().T @ u - u) < 1e-9


# --- intertwiner ----------------------------------------------------------------------


def test_intertwiner_trivial_for_equal_projections():
    p = Projector.from_matrix(np.diag([1.0, 0.0, 1.0]))
    form = decompose_quiet(p, p)
    np.testing.assert_allclose(build_intertwiner(form), np.eye(3), atol=1e-15)
    for n in (1, 10):
        a, b = angle_operators(p, p, n)
        assert spectral_norm(a) < 1e-15 and spectral_norm(b) < 1e-15


def test_intertwiner_pi4(pi4_pair):
    p, q = pi4_pair
    u = build_intertwiner(halmos_decompose(p, q))
    a, b = angle_operators(p, q, 10)
    assert spectral_norm(u @ a @ u.conj().T - b) < 1e-12


@pytest.mark.parametrize("n", [1, 10, 100, 10**4])
def test_intertwiner_random(n):
    p, q = generate_pair(PairSpec(16, 6, 7, 1, 99))
    form = halmos_decompose(p, q)
    u = build_intertwiner(form)
    assert spectral_norm(u.conj().T @ u - np.eye(16)) < 1e-12
    a, b = angle_operators(p, q, n)
    assert spectral_norm(u @ a @ u.conj().T - b) < 1e-9
