"""Tests for the barycenter GP ensemble."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from wbgpbo.ensemble import (
    GPEnsemble,
    barycenter_posterior,
    build_pool,
    ensemble_lcb,
    ensemble_predict,
    fit_ensemble,
    refit,
    sample_ensemble_hyperparams,
)
from wbgpbo.gp import Dataset, GPFitError, KernelHyperparams, fit_gp
from wbgpbo.wasserstein import BarycenterWeights


@pytest.fixture
def small_dataset():
    locations = np.array([0.05, 0.3, 0.5, 0.75, 0.9])
    return Dataset(locations, np.sin(8.0 * locations))


def test_pool_corners_and_size():
    pool = build_pool()
    assert len(pool) == 64
    assert pool.pairs[0] == (0.01, 0.01)
    assert pool.pairs[-1] == (0.5, 0.5)
    assert len(set(pool.pairs)) == 64


def test_pool_axis_values_and_spacing():
    pool = build_pool()
    sf2_axis = sorted({sf2 for sf2, _ in pool.pairs})
    ell_axis = sorted({ell for _, ell in pool.pairs})
    expected = [0.01, 0.08, 0.15, 0.22, 0.29, 0.36, 0.43, 0.50]
    np.testing.assert_allclose(sf2_axis, expected, atol=1e-15)
    np.testing.assert_allclose(ell_axis, expected, atol=1e-15)
    np.testing.assert_allclose(np.diff(sf2_axis), 0.07, atol=1e-15)


def test_pool_row_major_order():
    pool = build_pool()
    # Second pair advances the length scale, the ninth the signal variance.
    assert pool.pairs[1][0] == 0.01
    assert pool.pairs[1][1] == pytest.approx(0.08, abs=1e-15)
    assert pool.pairs[8][0] == pytest.approx(0.08, abs=1e-15)
    assert pool.pairs[8][1] == 0.01


def test_sampling_whole_pool():
    pool = build_pool()
    drawn = sample_ensemble_hyperparams(pool, 64, seed=1)
    assert sorted((h.signal_variance, h.length_scale) for h in drawn) == sorted(
        pool.pairs
    )


def test_sampling_deterministic_per_seed():
    pool = build_pool()
    a = sample_ensemble_hyperparams(pool, 16, seed=7)
    b = sample_ensemble_hyperparams(pool, 16, seed=7)
    assert a == b


def test_sampling_differs_across_seeds():
    """At least 95 of 100 seed pairs give different selections."""
    pool = build_pool()
    differing = 0
    for base in range(100):
        a = sample_ensemble_hyperparams(pool, 16, seed=1000 + 2 * base)
        b = sample_ensemble_hyperparams(pool, 16, seed=1001 + 2 * base)
        if a != b:
            differing += 1
    assert differing >= 95


def test_sampling_rejects_oversized_draw():
    with pytest.raises(ValueError):
        sample_ensemble_hyperparams(build_pool(), 65, seed=0)


def test_sampled_pairs_are_distinct():
    drawn = sample_ensemble_hyperparams(build_pool(), 32, seed=3)
    pairs = {(h.signal_variance, h.length_scale) for h in drawn}
    assert len(pairs) == 32


def test_refit_identical_data_is_idempotent(small_dataset):
    hyperparams = sample_ensemble_hyperparams(build_pool(), 8, seed=5)
    e1 = fit_ensemble(hyperparams, small_dataset)
    e2 = refit(e1, small_dataset)
    xs = np.linspace(0.0, 1.0, 21)
    np.testing.assert_array_equal(
        ensemble_predict(e1, xs)[0], ensemble_predict(e2, xs)[0]
    )
    np.testing.assert_array_equal(
        ensemble_predict(e1, xs)[1], ensemble_predict(e2, xs)[1]
    )


def test_refit_interpolates_appended_point(small_dataset):
    """The posterior mean misses an observation by exactly jitter * alpha.

    mu(x_i) - y_i = -jitter * alpha_i, so interpolation quality is set by the
    Gram conditioning: ill-conditioned members (large length scale) can miss
    by more than 1e-4 even at jitter 1e-6, well-conditioned ones cannot.
    """
    hyperparams = sample_ensemble_hyperparams(build_pool(), 16, seed=11)
    e = fit_ensemble(hyperparams, small_dataset)
    x_new, y_new = 0.62, -0.4
    grown = small_dataset.append(x_new, y_new)
    e = refit(e, grown)
    for member in e.members:
        mean, _ = member.predict(np.array([x_new]))
        gap = float(mean[0]) - y_new
        jitter_limit = member.hyperparams.jitter * abs(float(member.alpha[-1]))
        assert abs(gap) <= jitter_limit + 1e-9
        if member.hyperparams.length_scale <= 0.15:
            assert abs(gap) <= 1e-4


def test_refit_keeps_hyperparameters_bitwise(small_dataset):
    hyperparams = sample_ensemble_hyperparams(build_pool(), 8, seed=13)
    e = fit_ensemble(hyperparams, small_dataset)
    before = [(m.hyperparams.signal_variance, m.hyperparams.length_scale)
              for m in e.members]
    for step in range(3):
        e = refit(e, small_dataset.append(0.1 + 0.2 * step, float(step)))
    after = [(m.hyperparams.signal_variance, m.hyperparams.length_scale)
             for m in e.members]
    assert before == after


def test_singleton_ensemble_equals_its_member(small_dataset):
    h = KernelHyperparams(0.22, 0.15)
    e = fit_ensemble([h], small_dataset)
    member = fit_gp(h, small_dataset)
    xs = np.linspace(0.0, 1.0, 31)
    mean_m, std_m = member.predict(xs)
    mean_e, std_e = ensemble_predict(e, xs)
    np.testing.assert_array_equal(mean_e, mean_m)
    np.testing.assert_array_equal(std_e, std_m)


def test_barycenter_posterior_of_identical_members(small_dataset):
    h = KernelHyperparams(0.3, 0.2)
    members = tuple(fit_gp(h, small_dataset) for _ in range(4))
    e = GPEnsemble(members=members, weights=BarycenterWeights.equal(4))
    common = members[0].predict(np.array([0.42]))
    p = barycenter_posterior(e, 0.42)
    assert p.mean == pytest.approx(float(common[0][0]), abs=1e-15)
    assert p.std == pytest.approx(float(common[1][0]), abs=1e-15)


def test_barycenter_posterior_is_member_average(small_dataset):
    hyperparams = sample_ensemble_hyperparams(build_pool(), 16, seed=21)
    e = fit_ensemble(hyperparams, small_dataset)
    x = 0.37
    member_stats = [m.predict(np.array([x])) for m in e.members]
    means = np.array([float(s[0][0]) for s in member_stats])
    stds = np.array([float(s[1][0]) for s in member_stats])
    p = barycenter_posterior(e, x)
    assert p.mean == pytest.approx(means.mean(), abs=1e-14)
    assert p.std == pytest.approx(stds.mean(), abs=1e-14)
    # Convex-combination bounds.
    assert means.min() - 1e-15 <= p.mean <= means.max() + 1e-15
    assert stds.min() - 1e-15 <= p.std <= stds.max() + 1e-15


def test_lcb_identity_on_random_ensemble(small_dataset):
    """Mean of member LCBs equals the barycenter LCB, both orders, 1e-12."""
    hyperparams = sample_ensemble_hyperparams(build_pool(), 32, seed=2)
    e = fit_ensemble(hyperparams, small_dataset)
    rng = np.random.default_rng(8)
    xs = rng.random(50)
    member_means = np.array([m.predict(xs)[0] for m in e.members])
    member_stds = np.array([m.predict(xs)[1] for m in e.members])
    xi = 2.0
    averaged = np.mean(member_means - xi * member_stds, axis=0)
    for k, x in enumerate(xs):
        assert abs(ensemble_lcb(e, float(x), xi) - averaged[k]) <= 1e-12


def test_lcb_small_xi_approaches_barycenter_mean(small_dataset):
    hyperparams = sample_ensemble_hyperparams(build_pool(), 8, seed=4)
    e = fit_ensemble(hyperparams, small_dataset)
    p = barycenter_posterior(e, 0.5)
    assert abs(ensemble_lcb(e, 0.5, 1e-12) - p.mean) <= 1e-11


def test_lcb_rejects_nonpositive_xi(small_dataset):
    e = fit_ensemble([KernelHyperparams(0.1, 0.1)], small_dataset)
    with pytest.raises(ValueError):
        ensemble_lcb(e, 0.5, 0.0)


def test_total_predict_dominates_barycenter_std(small_dataset):
    """Total std >= barycenter std pointwise (Cauchy-Schwarz plus Var >= 0)."""
    from wbgpbo.ensemble import ensemble_total_predict

    hyperparams = sample_ensemble_hyperparams(build_pool(), 16, seed=23)
    e = fit_ensemble(hyperparams, small_dataset)
    xs = np.linspace(0.0, 1.0, 101)
    bary_mean, bary_std = ensemble_predict(e, xs)
    total_mean, total_std = ensemble_total_predict(e, xs)
    np.testing.assert_array_equal(total_mean, bary_mean)
    assert np.all(total_std >= bary_std - 1e-12)


def test_total_predict_identical_members_equals_common_posterior(small_dataset):
    from wbgpbo.ensemble import ensemble_total_predict

    h = KernelHyperparams(0.3, 0.2)
    members = tuple(fit_gp(h, small_dataset) for _ in range(4))
    e = GPEnsemble(members=members, weights=BarycenterWeights.equal(4))
    xs = np.linspace(0.0, 1.0, 41)
    common_mean, common_std = members[0].predict(xs)
    mean, std = ensemble_total_predict(e, xs)
    np.testing.assert_allclose(mean, common_mean, atol=1e-15)
    np.testing.assert_allclose(std, common_std, atol=1e-8)


def test_total_predict_one_hot_weights_select_member(small_dataset):
    from wbgpbo.ensemble import ensemble_total_predict

    hyperparams = sample_ensemble_hyperparams(build_pool(), 8, seed=29)
    base = fit_ensemble(hyperparams, small_dataset)
    xs = np.linspace(0.0, 1.0, 21)
    e = GPEnsemble(members=base.members, weights=BarycenterWeights.one_hot(8, 2))
    mean_m, std_m = base.members[2].predict(xs)
    mean, std = ensemble_total_predict(e, xs)
    np.testing.assert_allclose(mean, mean_m, atol=1e-15)
    np.testing.assert_allclose(std, std_m, atol=1e-8)


def test_total_variance_decomposition_matches_direct_mixture(small_dataset):
    """Oracle: total variance equals the variance of the stacked mixture."""
    from wbgpbo.ensemble import ensemble_total_predict

    hyperparams = sample_ensemble_hyperparams(build_pool(), 16, seed=31)
    e = fit_ensemble(hyperparams, small_dataset)
    xs = np.array([0.17, 0.52, 0.88])
    member_means = np.array([m.predict(xs)[0] for m in e.members])
    member_stds = np.array([m.predict(xs)[1] for m in e.members])
    _, std = ensemble_total_predict(e, xs)
    within = np.mean(member_stds**2, axis=0)
    between = np.var(member_means, axis=0)
    np.testing.assert_allclose(std, np.sqrt(within + between), atol=1e-12)


def test_one_hot_weights_reproduce_member_exactly(small_dataset):
    hyperparams = sample_ensemble_hyperparams(build_pool(), 8, seed=17)
    base = fit_ensemble(hyperparams, small_dataset)
    xs = np.linspace(0.0, 1.0, 11)
    for k in (0, 3, 7):
        e = GPEnsemble(
            members=base.members, weights=BarycenterWeights.one_hot(8, k)
        )
        mean_m, std_m = base.members[k].predict(xs)
        mean_e, std_e = ensemble_predict(e, xs)
        np.testing.assert_array_equal(mean_e, mean_m)
        np.testing.assert_array_equal(std_e, std_m)
        assert ensemble_lcb(e, 0.33, 2.0) == float(
            base.members[k].predict(np.array([0.33]))[0][0]
            - 2.0 * base.members[k].predict(np.array([0.33]))[1][0]
        )


def test_member_drop_renormalizes_weights(small_dataset, monkeypatch, caplog):
    import wbgpbo.ensemble as ensemble_mod

    hyperparams = sample_ensemble_hyperparams(build_pool(), 4, seed=19)
    real_fit = ensemble_mod.fit_gp_escalating
    doomed = hyperparams[1]

    def flaky_fit(h, d):
        if h is doomed:
            raise GPFitError("synthetic failure")
        return real_fit(h, d)

    monkeypatch.setattr(ensemble_mod, "fit_gp_escalating", flaky_fit)
    with caplog.at_level(logging.WARNING):
        e = fit_ensemble(hyperparams, small_dataset)
    assert e.n_members == 3
    assert e.weights.weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert any("dropping ensemble member" in r.message for r in caplog.records)


def test_all_members_failing_raises(small_dataset, monkeypatch):
    import wbgpbo.ensemble as ensemble_mod

    def always_fail(h, d):
        raise GPFitError("synthetic failure")

    monkeypatch.setattr(ensemble_mod, "fit_gp_escalating", always_fail)
    with pytest.raises(GPFitError):
        fit_ensemble([KernelHyperparams(0.1, 0.1)], small_dataset)


def test_ensemble_rejects_mismatched_datasets(small_dataset):
    h = KernelHyperparams(0.2, 0.2)
    other = small_dataset.append(0.99, 1.0)
    members = (fit_gp(h, small_dataset), fit_gp(h, other))
    with pytest.raises(ValueError):
        GPEnsemble(members=members, weights=BarycenterWeights.equal(2))


def test_mle_grid_matches_pool_pairs(small_dataset):
    """The MLE coarse grid and the ensemble pool span the same 64 pairs."""
    pool_pairs = set(build_pool().pairs)
    axis = np.linspace(0.01, 0.5, 8)
    mle_pairs = {(float(a), float(b)) for a in axis for b in axis}
    assert mle_pairs == pool_pairs
