"""Finite-point RKHS construction, membership, inclusion, and feature maps."""
import numpy as np
import pytest

import mercerkit as mk
from mercerkit import rkhs


def _host(seed=0, m=12, spec=None):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, size=(m, 2))
    return mk.build(spec or mk.Gaussian(1.0), pts), pts


def test_build_caches_gram_and_rank():
    h, pts = _host()
    assert h.m == 12
    assert h.gram.entries.shape == (12, 12)
    assert 1 <= h.rank <= 12
    assert np.array_equal(h.points, pts)


def test_build_rejects_indefinite_tables():
    pts = np.array([[0.0], [1.0]])
    spec = mk.Tabulated(pts, [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(mk.NotPositiveSemidefiniteError):
        mk.build(spec, pts)


def test_unit_elements_reproduce_gram_columns():
    h, _ = _host(1)
    for j in (0, 5, 11):
        assert np.array_equal(h.unit(j).values, h.gram.entries[:, j])
    with pytest.raises(IndexError):
        h.unit(12)


def test_reproducing_property():
    """<f, K_x> recovers f(x) for arbitrary coefficient vectors."""
    h, _ = _host(2)
    rng = np.random.default_rng(3)
    f = h.element(rng.normal(size=h.m))
    for j in range(h.m):
        assert mk.reproduce(f, j) == pytest.approx(f.values[j], abs=1e-10)


def test_inner_is_coefficient_quadratic_form():
    h, _ = _host(4)
    rng = np.random.default_rng(5)
    a, b = rng.normal(size=h.m), rng.normal(size=h.m)
    f, g = h.element(a), h.element(b)
    expected = a @ h.gram.entries @ b
    assert mk.inner(f, g) == pytest.approx(expected, rel=1e-12)
    assert mk.inner(f, f) >= -1e-12


def test_inner_rejects_foreign_hosts():
    h1, _ = _host(6)
    h2, _ = _host(7)
    with pytest.raises(mk.HostMismatchError):
        mk.inner(h1.element(np.ones(h1.m)), h2.element(np.ones(h2.m)))


def test_membership_of_kernel_sections():
    h, _ = _host(8)
    for j in (0, 3, 7):
        col = h.gram.entries[:, j]
        res = mk.membership(h, col)
        assert res.member
        # ||K_x||^2 = K(x,x) and the certificate is that squared norm.
        assert res.norm**2 == pytest.approx(h.gram.entries[j, j], rel=1e-9)
        assert res.certificate == pytest.approx(res.norm**2, rel=1e-12)


def test_membership_rejects_outside_range():
    """Rank-one host: anything not parallel to phi is not a member."""
    pts = np.array([[0.0], [1.0], [2.0]])
    phi = np.array([1.0, 2.0, 3.0])
    h = mk.build(mk.RankOne(points=pts, values=phi), pts)
    assert h.rank == 1
    res = mk.membership(h, [1.0, 2.0, 3.1])
    assert not res.member
    assert res.norm == float("inf") and res.certificate == float("inf")
    # For K = phi phi^T the norm of a*phi is exactly |a|.
    ok = mk.membership(h, 0.25 * phi)
    assert ok.member
    assert ok.norm == pytest.approx(0.25, rel=1e-10)


def test_membership_norm_equals_pinv_quadratic_form():
    h, _ = _host(9, m=10)
    rng = np.random.default_rng(10)
    phi = h.gram.entries @ rng.normal(size=10)
    res = mk.membership(h, phi)
    assert res.member
    via_pinv = float(phi @ mk.pinv(h.gram.entries) @ phi)
    assert res.norm**2 == pytest.approx(via_pinv, rel=1e-8)


def test_minimal_linearisation_reproduces_gram():
    h, _ = _host(11)
    fmap = mk.minimal_linearisation(h)
    assert fmap.matrix.shape == (h.rank, h.m)
    gap = np.max(np.abs(fmap.gram_entries - h.gram.entries))
    assert gap < 1e-10 * max(1.0, np.linalg.norm(h.gram.entries, np.inf))


def test_connect_linearisations_maps_features():
    """Two linearisations of one kernel differ by a unitary on the support."""
    h, _ = _host(12, m=8)
    f1 = mk.minimal_linearisation(h)
    # Second map: Cholesky-style factor from the PSD square root.
    root = mk.psd_sqrt(h.gram.entries)
    f2 = rkhs.FeatureMap(root)
    U = mk.connect_linearisations(f1, f2)
    assert np.max(np.abs(U @ f1.matrix - f2.matrix)) < 1e-8
    # U preserves inner products on the feature span.
    back = f1.matrix.conj().T @ (U.conj().T @ U) @ f1.matrix
    assert np.max(np.abs(back - f1.gram_entries)) < 1e-8


def test_connect_linearisations_rejects_different_kernels():
    h1, pts = _host(13, m=6)
    h2 = mk.build(mk.Weyl(2), pts)
    with pytest.raises(mk.FactorizationError):
        mk.connect_linearisations(mk.minimal_linearisation(h1), mk.minimal_linearisation(h2))


def test_aronszajn_inclusion_scaling():
    h, pts = _host(14, m=9)
    h2 = mk.build(mk.Scaled(2.0, mk.Gaussian(1.0)), pts)
    res = mk.aronszajn_inclusion(h, h2)
    assert res.included
    assert res.c == pytest.approx(0.5, rel=1e-6)
    rev = mk.aronszajn_inclusion(h2, h)
    assert rev.included
    assert rev.c == pytest.approx(2.0, rel=1e-6)


def test_aronszajn_inclusion_into_identity_host():
    """Every kernel dominates into the identity host with c = lambda_max."""
    rng = np.random.default_rng(15)
    pts = rng.uniform(-1.0, 1.0, size=(8, 1))
    hK = mk.build(mk.Gaussian(1.0), pts)
    hI = mk.build(mk.Identity(), pts)
    res = mk.aronszajn_inclusion(hK, hI)
    assert res.included
    top = mk.eigh(hK.gram.entries).eigenvalues[0]
    assert res.c == pytest.approx(top, rel=1e-10)


def test_aronszajn_inclusion_fails_off_range():
    """Identity has full range, the rank-one host does not."""
    pts = np.array([[0.0], [1.0], [2.0]])
    h1 = mk.build(mk.RankOne(points=pts, values=np.array([1.0, 1.0, 1.0])), pts)
    hI = mk.build(mk.Identity(), pts)
    res = mk.aronszajn_inclusion(hI, h1)
    assert not res.included
    assert res.c == float("inf")


def test_aronszajn_inclusion_requires_shared_points():
    h1, _ = _host(16, m=5)
    h2, _ = _host(17, m=5)
    with pytest.raises(mk.HostMismatchError):
        mk.aronszajn_inclusion(h1, h2)


def test_recover_from_onb_round_trip():
    h, pts = _host(18, m=10)
    E = mk.minimal_linearisation(h).matrix
    back = mk.recover_from_onb(pts, E)
    assert np.max(np.abs(back.entries - h.gram.entries)) < 1e-9


def test_feature_map_requires_matrix():
    with pytest.raises(mk.DimensionMismatchError):
        rkhs.FeatureMap(np.ones(3))
