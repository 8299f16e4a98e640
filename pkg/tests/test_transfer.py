import cmath
import itertools
import math

import numpy as np
import pytest

import juliarand as jr

H = 1.00735


def full_enumeration_oracle(c, z, h, n):
    """Transfer value by brute force over all 2^n branch words."""
    total = 0.0
    for bits in itertools.product((1.0, -1.0), repeat=n):
        y = complex(z)
        prod = 1.0
        for s in bits:
            y = s * cmath.sqrt(y - c)
            prod *= abs(y)
        total += prod ** (-h)
    return 2.0 ** (-h * n) * total


def test_transfer_matches_full_enumeration(qmap18, z018):
    pts = [z018, 0.8356, -0.62 + 0.33j]
    for z in pts:
        for h in (0.9, H, 1.1):
            for n in (1, 2, 5, 8):
                got = jr.transfer_iterate(qmap18, z, h, n)
                want = full_enumeration_oracle(0.125, z, h, n)
                assert got == pytest.approx(want, rel=1e-12)


def test_transfer_halved_equals_two_branch_sum(qmap18, z018):
    for n in (1, 3, 7, 12):
        a = jr.transfer_iterate(qmap18, z018, H, n)
        b = jr.transfer_iterate(qmap18, z018, H, n, full_sum=True)
        assert a == pytest.approx(b, rel=1e-15)


def test_transfer_unit_circle_identity(qmap0):
    for z in (1.0, cmath.exp(0.7j), cmath.exp(2.1j)):
        for n in (1, 5, 12, 20):
            assert abs(jr.transfer_iterate(qmap0, z, 1.0, n) - 1.0) <= 1e-14


def test_transfer_unit_circle_scaling(qmap0):
    # With c = 0 every derivative modulus is 1, so f_n = 2^(n (1 - h)).
    for h in (0.8, 1.3):
        for n in (4, 10):
            got = jr.transfer_iterate(qmap0, 1.0, h, n)
            assert got == pytest.approx(2.0 ** (n * (1 - h)), rel=1e-12)


def test_transfer_validation(qmap18, z018):
    with pytest.raises(ValueError):
        jr.transfer_iterate(qmap18, z018, -1.0, 3)
    with pytest.raises(ValueError):
        jr.transfer_iterate(qmap18, z018, H, 0)
    with pytest.raises(jr.ResourceLimitError):
        jr.transfer_iterate(qmap18, z018, H, 26)
    with pytest.raises(jr.DomainError):
        # The tree immediately hits the critical point 0.
        jr.transfer_iterate(qmap18, 0.125, H, 2)


def test_density_converges_at_the_right_exponent(qmap18, z018):
    res = jr.density(qmap18, z018, H)
    assert res.converged
    # Frozen regression value for tol=1e-4 (stabilizes at level 13).
    assert res.value == pytest.approx(1.3891442337318938, abs=1e-12)
    assert len(res.levels) == 13
    ns = [n for n, _, _ in res.levels]
    assert ns == list(range(1, 14))
    assert math.isnan(res.levels[0][2])
    n, val, ratio = res.levels[-1]
    assert val == res.value
    assert abs(val - res.levels[-2][1]) <= res.tol
    assert ratio == pytest.approx(val / res.levels[-2][1], rel=1e-15)


def test_density_probe_point_value(qmap18):
    res = jr.density(qmap18, 0.8356, H)
    assert res.converged
    assert res.value == pytest.approx(1.4257383270212587, abs=1e-12)
    assert abs(res.value - 1.4258) < 5e-3


def test_density_wrong_exponent_drifts(qmap18, z018):
    res = jr.density(qmap18, z018, 1.0, max_level=16)
    assert not res.converged
    assert len(res.levels) == 16
    # The tail ratio parks near the geometric drift rate, well away from 1.
    assert 1.004 <= res.levels[-1][2] <= 1.006


def test_density_trivial_cases(qmap0):
    res = jr.density(qmap0, 1.0, 1.0)
    assert res.converged
    assert res.value == 1.0
    assert len(res.levels) <= 2
    loose = jr.density(jr.QuadraticMap(0.125), 0.9, H, tol=10.0)
    assert loose.converged and len(loose.levels) == 2


def test_density_validation(qmap18, z018):
    with pytest.raises(ValueError):
        jr.density(qmap18, z018, H, tol=0.0)
    with pytest.raises(ValueError):
        jr.density(qmap18, z018, 0.0)


def test_estimate_dimension_eighth(qmap18, z018):
    est = jr.estimate_dimension(qmap18, z018, 1.0, 1.01)
    assert 1.0068 <= est.h <= 1.0079
    lo, hi = est.bracket
    assert lo <= est.h <= hi
    assert hi - lo <= 1e-4
    # Two endpoints plus one trace per bisection step.
    assert len(est.candidates) == 2 + math.ceil(math.log2(0.01 / 1e-4))
    for cand in est.candidates:
        assert [n for n, _, _ in cand.levels] == list(range(1, 19))
        assert cand.ratio == cand.levels[-1][2]


def test_estimate_dimension_unit_circle(qmap0):
    est = jr.estimate_dimension(qmap0, 1.0, 0.9, 1.1)
    assert abs(est.h - 1.0) <= 1e-4


def test_estimate_dimension_discriminator(qmap18, z018):
    est = jr.estimate_dimension(qmap18, z018, 1.0, 1.01)
    assert est.candidates[0].ratio > 1.0
    assert est.candidates[1].ratio < 1.0


def test_estimate_dimension_errors(qmap18, z018):
    with pytest.raises(jr.BracketError):
        jr.estimate_dimension(qmap18, z018, 1.02, 1.05)
    with pytest.raises(ValueError):
        jr.estimate_dimension(qmap18, z018, 1.01, 1.0)
    with pytest.raises(jr.ResourceLimitError):
        jr.estimate_dimension(qmap18, z018, 1.0, 1.01, n_probe=30)
    with pytest.raises(ValueError):
        jr.estimate_dimension(qmap18, z018, 1.0, 1.01, tol_h=0.0)


def test_density_cache_matches_direct_calls(qmap18, cover5, cache5):
    assert cache5.f_center.shape == (32,)
    assert cache5.f_image.shape == (32,)
    for i in (0, 1, 7, 30, 31):
        direct = jr.density(qmap18, complex(cover5.centers[i]), H)
        assert cache5.f_center[i] == direct.value
    for k in (0, 9):
        img = jr.forward(qmap18, complex(cover5.centers[2 * k]))
        direct = jr.density(qmap18, img, H)
        assert cache5.f_image[2 * k] == direct.value


def test_density_cache_pairs_share_image_value(cache5):
    np.testing.assert_array_equal(cache5.f_image[0::2], cache5.f_image[1::2])


def test_density_cache_thread_count_irrelevant(cover5):
    a = jr.density_cache(cover5, H, threads=1)
    b = jr.density_cache(cover5, H, threads=3)
    np.testing.assert_array_equal(a.f_center, b.f_center)
    np.testing.assert_array_equal(a.f_image, b.f_image)


def test_density_cache_single_center(qmap18, z018):
    cov = jr.borel_centers(qmap18, 0)
    cache = jr.density_cache(cov, H)
    direct = jr.density(qmap18, z018, H)
    assert cache.f_center[0] == direct.value
    assert cache.f_image[0] == direct.value
    assert cache.pair(0) == (direct.value, direct.value)


def test_density_cache_unit_circle_constant(qmap0):
    cov = jr.borel_centers(qmap0, 3)
    cache = jr.density_cache(cov, 1.0)
    np.testing.assert_allclose(cache.f_center, 1.0, atol=1e-14)
    np.testing.assert_allclose(cache.f_image, 1.0, atol=1e-14)


def test_density_cache_nonconvergence_names_center(cover5):
    with pytest.raises(jr.ConvergenceError, match="center"):
        jr.density_cache(cover5, 1.0, max_level=10)
