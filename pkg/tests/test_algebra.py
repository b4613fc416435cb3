import numpy as np
import pytest

from weylforge import algebra as alg


def test_hodge_star_involution_and_eigenspaces():
    s = alg.hodge_star_matrix()
    assert np.allclose(s @ s, np.eye(6))
    vals = np.sort(np.linalg.eigvalsh(s))
    assert np.allclose(vals, [-1, -1, -1, 1, 1, 1])


@pytest.mark.parametrize("sector", [1, -1])
def test_seed_triples_are_quaternionic(sector):
    seeds = alg.sector_seed(sector)
    w, e, t = (alg.two_form(r) for r in seeds)
    eye = np.eye(4)
    for f in (w, e, t):
        assert np.array_equal(f @ f, -eye)
        assert 0.5 * (f * f).sum() == 2.0  # pair-bundle norm sqrt(2)
    assert np.array_equal(w @ e, t)
    assert np.array_equal(e @ t, w)
    assert np.array_equal(t @ w, e)
    star = alg.hodge_star_matrix()
    for r in seeds:
        assert np.array_equal(star @ r, sector * r)


def test_jacobi_against_lapack(rng):
    for _ in range(200):
        m = rng.normal(size=(3, 3))
        m = m + m.T
        vals, vecs = alg.jacobi_eigh_3x3(m)
        ref = np.sort(np.linalg.eigvalsh(m))
        assert np.abs(vals - ref).max() <= 1e-12 * max(np.abs(ref).max(), 1.0)
        recon = vecs @ np.diag(vals) @ vecs.T
        assert np.abs(recon - m).max() <= 1e-12 * max(np.abs(m).max(), 1.0)
        assert np.abs(vecs @ vecs.T - np.eye(3)).max() < 1e-12


def test_frame_reconstruction_random_blocks(rng):
    """Eigen-reconstruction: trace-free random block -> frame -> tensor."""
    for _ in range(50):
        m = rng.normal(size=(3, 3))
        m = m + m.T
        m -= np.trace(m) / 3.0 * np.eye(3)
        blocks = alg.CurvatureOperatorBlocks(
            w_plus=m, w_minus=np.zeros((3, 3)), ric0_block=np.zeros((3, 3)),
            scalar=0.0)
        frame = alg.derdzinski_frame(blocks, "plus")
        lam = frame.eigenvalues
        assert lam[0] <= lam[1] <= lam[2]
        assert abs(lam.sum()) <= 1e-10 * max(np.abs(lam).sum(), 1e-30)
        assert alg.quaternionic_residual(frame) < 1e-12
        w = frame.reconstruct()
        back = alg.lambda_split(w)
        assert np.abs(back.w_plus - m).max() <= 1e-12 * max(np.abs(m).max(), 1)
        assert np.abs(back.w_minus).max() <= 1e-12 * np.abs(m).max()


def test_degenerate_block_is_flagged():
    m = np.diag([1.0, 1.0, -2.0])
    blocks = alg.CurvatureOperatorBlocks(m, np.zeros((3, 3)),
                                         np.zeros((3, 3)), 0.0)
    frame = alg.derdzinski_frame(blocks, "plus")
    assert frame.degenerate
    # the triple is still an honest quaternionic frame
    assert alg.quaternionic_residual(frame) < 1e-12


def test_zero_weyl_frame_accepted():
    blocks = alg.CurvatureOperatorBlocks(np.zeros((3, 3)), np.zeros((3, 3)),
                                         np.zeros((3, 3)), 12.0)
    frame = alg.derdzinski_frame(blocks, "plus")
    assert np.abs(frame.eigenvalues).max() == 0.0
    assert alg.quaternionic_residual(frame) < 1e-12


def test_lambda_split_constant_curvature():
    k = 0.7
    d = np.eye(4)
    riem = k * (np.einsum("ik,jl->ijkl", d, d) - np.einsum("il,jk->ijkl", d, d))
    blocks = alg.lambda_split(riem)
    assert blocks.scalar == pytest.approx(12.0 * k)
    assert np.abs(blocks.w_plus).max() < 1e-12
    assert np.abs(blocks.w_minus).max() < 1e-12
    assert np.abs(blocks.ric0_block).max() < 1e-12


def test_lambda_split_rejects_asymmetric_input(rng):
    bad = rng.normal(size=(4, 4, 4, 4))
    with pytest.raises(ValueError, match="violates Riemann symmetries"):
        alg.lambda_split(bad)


def test_lambda_split_rejects_bad_orientation(rng):
    w, _, _ = alg.random_sector_tensor(rng, 1)
    with pytest.raises(ValueError, match="orientation"):
        alg.lambda_split(w, orientation=0)


def test_reassembled_operator_acts_like_half_riemann(rng, cp_s2xs2_unequal):
    """Blocks + R/12 + trace-free Ricci reproduce the two-form action."""
    cp = cp_s2xs2_unequal
    blocks = alg.lambda_split(cp.riem, orientation=cp.orientation)
    m6 = blocks.reassemble()
    for _ in range(50):
        v = rng.normal(size=6)
        omega = alg.two_form(v)
        action = 0.5 * np.einsum("ijkl,ij->kl", cp.riem, omega)
        want = alg.two_form(m6.T @ v)
        assert np.abs(action - want).max() <= 1e-10 * max(
            np.abs(action).max(), 1e-30)
    assert np.abs(blocks.ric0_block).max() > 1e-3  # non-Einstein entry


@pytest.fixture(scope="module")
def cp_s2xs2_unequal():
    from weylforge import charts
    cat = charts.build_catalog()
    return charts.curvature_at(cat["s2xs2-unequal"], [0.9, 1.1, 1.3, 0.7],
                               depth=1)


def test_einstein_input_has_zero_ric0_block(cp_sds):
    blocks = alg.lambda_split(cp_sds.riem, orientation=cp_sds.orientation)
    assert np.abs(blocks.ric0_block).max() <= 1e-12 * np.abs(cp_sds.riem).max()
    assert abs(np.trace(blocks.w_plus)) <= 1e-10 * max(
        np.abs(blocks.w_plus).max(), 1e-30)


def test_random_sector_tensors_satisfy_identities(rng):
    for sector in (1, -1):
        for _ in range(50):
            w, frame, lam = alg.random_sector_tensor(rng, sector)
            assert alg.quaternionic_residual(frame) < 1e-13
            r, s = alg.quadratic_identity_residual(w)
            assert r <= 1e-13 * max(s, 1e-30)
            r, s = alg.cubic_identity_residual(w)
            assert r <= 1e-13 * max(s, 1e-30)
            r, s = alg.quartic_identity_residual(w)
            assert r <= 1e-13 * max(s, 1e-30)


def test_quadratic_cubic_hold_for_sector_sums(rng):
    """Both identities hold for W = W+ + W- and for each part alone."""
    for _ in range(25):
        wp, _, _ = alg.random_sector_tensor(rng, 1)
        wm, _, _ = alg.random_sector_tensor(rng, -1)
        for w in (wp + wm, wp, wm):
            r, s = alg.quadratic_identity_residual(w)
            assert r <= 1e-13 * max(s, 1e-30)
            r, s = alg.cubic_identity_residual(w)
            assert r <= 1e-13 * max(s, 1e-30)


def test_sector_projection_orthogonality(rng):
    wp, _, _ = alg.random_sector_tensor(rng, 1)
    wm, _, _ = alg.random_sector_tensor(rng, -1)
    total = wp + wm
    assert np.abs(alg.project_sector(total, 1) - wp).max() < 1e-13
    assert np.abs(alg.project_sector(total, -1) - wm).max() < 1e-13
    # plus-sector data is blind to minus-sector modifications
    perturbed = total + 3.0 * wm
    assert np.abs(alg.project_sector(perturbed, 1) - wp).max() < 1e-13


def test_orientation_flip_swaps_sectors(rng):
    w, _, _ = alg.random_sector_tensor(rng, 1)
    assert np.abs(alg.project_sector(w, 1, orientation=-1)).max() < 1e-14
    assert np.abs(alg.project_sector(w, -1, orientation=-1) - w).max() < 1e-14


def test_cotton_from_synthetic_ricci_data(rng):
    ric_deriv = rng.normal(size=(4, 4, 4))
    ric_deriv = 0.5 * (ric_deriv + np.einsum("jik->ijk", ric_deriv))
    d_scalar = rng.normal(size=4)
    c = alg.cotton_from_ricci(ric_deriv, d_scalar)
    assert np.abs(c + np.einsum("ikj->ijk", c)).max() < 1e-14
