import numpy as np
import pytest

import juliarand as jr
from juliarand.ergodic import trial_seed

H = 1.00735


def ones_cache(cover):
    n = len(cover.centers)
    return jr.DensityCache(
        cover=cover,
        h=1.0,
        tol=1e-4,
        f_center=np.ones(n),
        f_image=np.ones(n),
    )


def per_ball_residuals(traj, params):
    """Pure-python mirror of the objective, one residual per cover ball."""
    cache = params.densities
    cover = cache.cover
    qmap = cover.qmap
    n = params.n_sum
    out = []
    for j, z in enumerate(cover.centers):
        z = complex(z)
        lhs = 0.0
        rhs = 0.0
        for k in range(n):
            w = complex(traj[k])
            t = complex(traj[k + 1]) if params.shift_weights else w
            lhs += jr.indicator_ta(t, z, cover.radius, qmap)
            rhs += jr.indicator_a(w, z, cover.radius) * (2.0 * abs(w)) ** cache.h
        out.append(
            lhs / (n * float(cache.f_image[j]))
            - rhs / (n * float(cache.f_center[j]))
        )
    return out


def test_indicator_a_strict_boundary():
    assert jr.indicator_a(1.0 + 0j, 0.0, 1.0) == 0
    assert jr.indicator_a(0.999999 + 0j, 0.0, 1.0) == 1
    assert jr.indicator_a(3.0, 0.0, 1.0) == 0
    with pytest.raises(ValueError):
        jr.indicator_a(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        jr.indicator_a(0.0, 0.0, -0.5)


def test_indicator_ta_hits_image_ball(qmap18, z018):
    center = 0.3 + 0.4j
    image = jr.forward(qmap18, center)
    assert jr.indicator_ta(image, center, 1e-6, qmap18) == 1
    assert jr.indicator_ta(z018, z018, 1e-6, qmap18) == 1
    assert jr.indicator_ta(100.0 + 0j, center, 1e-6, qmap18) == 0
    with pytest.raises(ValueError):
        jr.indicator_ta(1.0, 0.0, 0.0, qmap18)


def test_indicator_ta_is_ball_image_membership(qmap18):
    # z lands in T(ball) exactly when some preimage of z lands in the ball.
    rng = np.random.default_rng(99)
    center = 0.55 + 0.1j
    radius = 0.2
    for _ in range(200):
        w = center + radius * 1.4 * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
        z = jr.forward(qmap18, w)
        got = jr.indicator_ta(z, center, radius, qmap18)
        plus, minus = jr.inverse_branches(qmap18, z)
        want = 1 if (abs(plus - center) < radius or abs(minus - center) < radius) else 0
        assert got == want
        if abs(w - center) < radius:
            assert got == 1


def test_objective_matches_python_oracle(cover5, cache5):
    lat = jr.make_lattice(cover5, ell=1, depth=40, seed=31)
    traj = jr.forward_window(lat, 32)[0]
    for shift in (False, True):
        params = jr.ObjectiveParams(n_sum=32, densities=cache5, shift_weights=shift)
        got = jr.objective(traj, params)
        res = per_ball_residuals(traj, params)
        want = sum(r * r for r in res)
        assert got == pytest.approx(want, rel=1e-12)


def test_objective_counting_form_on_the_circle(qmap0):
    # With c = 0 and h = 1 the weight is 2|w| with |w| = 1, so the objective
    # collapses to the count mismatch |#TA-hits - 2 #A-hits|^2 / n^2 per ball.
    cover = jr.borel_centers(qmap0, 4)
    cache = ones_cache(cover)
    n = 64
    # Angle doubling keeps every point on the circle; the squared-modulus
    # drift of a literal forward orbit would overflow long before step 64.
    theta = np.empty(n + 1)
    theta[0] = 0.37
    for k in range(n):
        theta[k + 1] = (2.0 * theta[k]) % (2.0 * np.pi)
    traj = np.exp(1j * theta)
    params = jr.ObjectiveParams(n_sum=n, densities=cache)
    got = jr.objective(traj, params)
    want = 0.0
    for z in cover.centers:
        c_ta = sum(
            jr.indicator_ta(complex(w), complex(z), cover.radius, qmap0)
            for w in traj[:n]
        )
        c_a = sum(
            jr.indicator_a(complex(w), complex(z), cover.radius) for w in traj[:n]
        )
        want += (c_ta - 2.0 * c_a) ** 2 / n**2
    assert got == pytest.approx(want, abs=1e-10)


def test_objective_zero_residual_witness(qmap0):
    # A rotation-symmetric grid on the circle hits every ball and its image
    # ball in the exactly balanced proportion, so every residual vanishes.
    cover = jr.borel_centers(qmap0, 5)
    cache = ones_cache(cover)
    n = 4096
    k = np.arange(n + 1)
    traj = np.exp(2j * np.pi * (k + 0.5) / n)
    params = jr.ObjectiveParams(n_sum=n, densities=cache)
    res = per_ball_residuals(traj, params)
    assert max(abs(r) for r in res) <= 4.0 / n
    got = jr.objective(traj, params)
    want = sum(r * r for r in res)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-24)


def test_objective_validation(cache5):
    params = jr.ObjectiveParams(n_sum=8, densities=cache5)
    with pytest.raises(ValueError):
        jr.objective(np.ones(8, dtype=complex), params)
    with pytest.raises(ValueError):
        jr.objective(np.ones((2, 9), dtype=complex), params)
    with pytest.raises(ValueError):
        jr.ObjectiveParams(n_sum=0, densities=cache5)


def test_select_is_argmin_of_objective(cover5, cache5):
    lat = jr.make_lattice(cover5, ell=12, depth=50, seed=7)
    params = jr.ObjectiveParams(n_sum=40, densities=cache5)
    point = jr.select_pseudorandom(lat, params)
    vals = [
        jr.objective(jr.forward_window(lat, 40)[i], params) for i in range(12)
    ]
    assert point.lattice_row == int(np.argmin(vals))
    assert point.normalized == pytest.approx(min(vals), rel=1e-12)
    assert point.beta_sq == point.normalized * 40 * 40
    assert point.trajectory.shape == (41,)
    step = np.abs(point.trajectory[1:] - point.trajectory[:-1] ** 2 - 0.125)
    assert step.max() < 1e-12


def test_select_tie_breaks_to_first_row(cover5, cache5):
    base = jr.make_lattice(cover5, ell=1, depth=30, seed=5)
    rows = np.tile(base.rows, (4, 1))
    clone = jr.Lattice(
        cover=cover5,
        ell=4,
        depth=30,
        seed=5,
        rows=rows,
        anchor_index=np.repeat(base.anchor_index, 4),
    )
    params = jr.ObjectiveParams(n_sum=20, densities=cache5)
    assert jr.select_pseudorandom(clone, params).lattice_row == 0


def test_select_scale_invariance_of_argmin(cover5, cache5):
    # Scaling both density tables scales every residual by the same factor,
    # so the argmin holds and the minimum scales by the square.
    lat = jr.make_lattice(cover5, ell=10, depth=40, seed=13)
    params = jr.ObjectiveParams(n_sum=30, densities=cache5)
    scaled_cache = jr.DensityCache(
        cover=cache5.cover,
        h=cache5.h,
        tol=cache5.tol,
        f_center=cache5.f_center * 3.7,
        f_image=cache5.f_image * 3.7,
    )
    scaled = jr.ObjectiveParams(n_sum=30, densities=scaled_cache)
    a = jr.select_pseudorandom(lat, params)
    b = jr.select_pseudorandom(lat, scaled)
    assert a.lattice_row == b.lattice_row
    assert b.normalized == pytest.approx(a.normalized / 3.7**2, rel=1e-12)


def test_adaptive_select_immediate_and_capped(cover5, cache5):
    lat = jr.make_lattice(cover5, ell=6, depth=60, seed=3)
    params = jr.ObjectiveParams(n_sum=20, densities=cache5)
    res = jr.adaptive_select(lat, params, threshold=np.inf, p_max=40)
    assert res.attained and res.p_used == 20
    assert res.point.trajectory.shape == (21,)
    res = jr.adaptive_select(lat, params, threshold=0.0, p_max=24)
    assert not res.attained and res.p_used == 24
    assert res.point.trajectory.shape == (25,)


def test_adaptive_select_accepts_factory(cover5, cache5):
    params = jr.ObjectiveParams(n_sum=10, densities=cache5)
    calls = []

    def factory():
        calls.append(1)
        return jr.make_lattice(cover5, ell=4, depth=30, seed=77)

    res = jr.adaptive_select(factory, params, threshold=np.inf, p_max=30)
    assert len(calls) == 1
    assert res.p_used == 10


def test_adaptive_select_validation(cover5, cache5):
    lat = jr.make_lattice(cover5, ell=2, depth=20, seed=1)
    params = jr.ObjectiveParams(n_sum=10, densities=cache5)
    with pytest.raises(ValueError):
        jr.adaptive_select(lat, params, threshold=-1.0, p_max=15)
    with pytest.raises(ValueError):
        jr.adaptive_select(lat, params, threshold=1.0, p_max=5)
    with pytest.raises(ValueError):
        jr.adaptive_select(lat, params, threshold=1.0, p_max=25)


def test_longer_sums_drive_the_minimum_down(cover8, cache8):
    # The selected minimum should shrink as the Birkhoff sum lengthens;
    # check the trend over ten independent lattices.
    depths = [100, 200, 400, 800]
    mins = {p: [] for p in depths}
    for s in range(10):
        lat = jr.make_lattice(cover8, ell=100, depth=1600, seed=trial_seed(555, s))
        for p in depths:
            params = jr.ObjectiveParams(n_sum=p, densities=cache8)
            mins[p].append(jr.select_pseudorandom(lat, params).normalized)
    med = {p: float(np.median(mins[p])) for p in depths}
    assert med[800] < med[100]
    drops = sum(1 for a, b in zip(mins[100], mins[800]) if b < a)
    assert drops >= 8


def matlab_style_opteval(rows, centers, radius, f_center, f_image, h):
    """Row-at-a-time transcription of the reference selection routine."""
    ell, width = rows.shape
    depth = width - 1
    n = 40
    best_row, best = 0, np.inf
    for i in range(ell):
        a_win = rows[i, depth - n - 1:depth]
        ta_win = rows[i, depth - n:depth + 1]
        acc = 0.0
        for j, z in enumerate(centers):
            in_a = np.abs(a_win - z) < radius
            rhs = 2.0 * ((in_a * np.abs(a_win)) ** h).sum()
            lhs = ((ta_win - z).real < radius).sum() + (
                (-ta_win - z).real < radius
            ).sum()
            acc += (lhs / f_image[j] - rhs / f_center[j]) ** 2
        score = acc / depth
        if score < best:
            best_row, best = i, score
    return best_row, best


def test_opteval_compat_matches_transcription(cover5, cache5):
    lat = jr.make_lattice(cover5, ell=30, depth=300, seed=424242)
    got_row, got_score = jr.opteval_compat(lat, 40, cache5)
    want_row, want_score = matlab_style_opteval(
        lat.rows,
        cover5.centers,
        cover5.radius,
        cache5.f_center,
        cache5.f_image,
        cache5.h,
    )
    assert got_row == want_row
    assert got_score == want_score


def test_opteval_compat_validation(cover5, cache5):
    lat = jr.make_lattice(cover5, ell=3, depth=10, seed=2)
    with pytest.raises(ValueError):
        jr.opteval_compat(lat, 0, cache5)
    with pytest.raises(ValueError):
        jr.opteval_compat(lat, 10, cache5)
