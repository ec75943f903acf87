import math

import numpy as np
import pytest
from scipy.special import expit, gammaln

from cdd.bayesian import (
    BayesianFit,
    McmcConfig,
    PriorSpec,
    decide_direction_bayesian,
    effective_sample_size,
    estimate_bayesian,
    log_posterior,
    read_chain_dump,
    run_chain,
    write_chain_dump,
)
from cdd.betareg import Direction
from cdd.frequentist import Decision
from cdd.oracle import FGM, AsymmetricBeta, generate_directed, sample
from cdd.transform import PseudoSample, to_pseudo_observations

LINK = PriorSpec(kappa_mode="link")
GAMMA = PriorSpec(kappa_mode="gamma")
SHORT = McmcConfig(n_iter=3000, burn_in=1000, seed=1)


def twenty_point_sample():
    u = np.arange(1, 21) / 21
    v = np.array([3, 17, 14, 2, 10, 5, 1, 15, 11, 8, 19, 20, 6, 13, 16, 9, 4, 7, 18, 12]) / 21
    return PseudoSample(u, v)


def asymmetric_sample(n=300, seed=0):
    return to_pseudo_observations(generate_directed(AsymmetricBeta(-1.5, 3, 8), n, seed=seed))


class TestLogPosterior:
    def test_independence_point(self):
        ps = twenty_point_sample()
        lp = log_posterior(ps, Direction.U_TO_V, (0.0, 0.0, 2.0), LINK)
        assert lp == pytest.approx(-math.log(2 * math.pi * 100), abs=1e-12)

    def test_gamma_prior_term(self):
        ps = twenty_point_sample()
        a = log_posterior(ps, Direction.U_TO_V, (0.0, 0.0, 2.0), GAMMA, use_likelihood=False)
        b = log_posterior(ps, Direction.U_TO_V, (0.0, 0.0, 3.0), GAMMA, use_likelihood=False)
        assert a - b == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("prior,expected", [
        (GAMMA, -0.2511487221411078401399066),
        (LINK, -0.3096893358182831689010991),
    ])
    def test_difference_matches_high_precision(self, prior, expected):
        # reference values from a 40-digit mpmath evaluation of priors and likelihood
        ps = twenty_point_sample()
        a = log_posterior(ps, Direction.U_TO_V, (0.3, -0.7, 4.5), prior)
        b = log_posterior(ps, Direction.U_TO_V, (-1.2, 2.1, 0.8), prior)
        assert a - b == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("kappa", [0.0, -1.0, np.nan])
    def test_out_of_support(self, kappa):
        lp = log_posterior(twenty_point_sample(), Direction.U_TO_V, (0.1, 0.2, kappa), GAMMA)
        assert lp == -np.inf

    def test_link_mode_ignores_kappa(self):
        ps = twenty_point_sample()
        a = log_posterior(ps, Direction.V_TO_U, (0.1, 0.2, 5.0), LINK)
        b = log_posterior(ps, Direction.V_TO_U, (0.1, 0.2, -3.0), LINK)
        assert a == b

    def test_extreme_state_is_finite_or_minus_inf(self):
        lp = log_posterior(twenty_point_sample(), Direction.U_TO_V, (400.0, 400.0, 1e300), GAMMA)
        assert lp == -np.inf or np.isfinite(lp)


class TestConfig:
    def test_defaults(self):
        cfg = McmcConfig()
        assert (cfg.n_iter, cfg.burn_in, cfg.thin, cfg.adapt) == (10000, 2000, 1, True)
        prior = PriorSpec()
        assert (prior.sigma0, prior.sigma1, prior.gamma_a, prior.gamma_b) == (10, 10, 1, 1)

    def test_length_accounting(self):
        assert McmcConfig(n_iter=1000, burn_in=200, thin=4).n_keep == 200
        with pytest.raises(ValueError, match="multiple"):
            McmcConfig(n_iter=1000, burn_in=200, thin=3)

    @pytest.mark.parametrize("kw", [dict(burn_in=10000), dict(thin=0), dict(proposal_scales=(0.1, 0.0, 0.1))])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            McmcConfig(**kw)

    @pytest.mark.parametrize("kw", [dict(sigma0=0), dict(gamma_b=-1), dict(kappa_mode="fixed")])
    def test_invalid_prior(self, kw):
        with pytest.raises(ValueError):
            PriorSpec(**kw)

    def test_mirrored_seeds(self):
        a, b = McmcConfig(seed=3).chain_seeds()
        assert McmcConfig(seed=3).chain_seeds(mirror=True) == (b, a)
        assert a != b


class TestRunChain:
    def test_deterministic(self):
        ps = asymmetric_sample()
        a = run_chain(ps, Direction.U_TO_V, GAMMA, SHORT)
        b = run_chain(ps, Direction.U_TO_V, GAMMA, SHORT)
        np.testing.assert_array_equal(a.states, b.states)
        assert a.accept_rate == b.accept_rate

    def test_thinning(self):
        cfg = McmcConfig(n_iter=2000, burn_in=500, thin=5, seed=2)
        res = run_chain(asymmetric_sample(), Direction.V_TO_U, LINK, cfg)
        assert res.states.shape == (300, 3)
        np.testing.assert_array_equal(res.iterations, np.arange(500, 2000, 5))

    def test_kappa_positive(self):
        for prior in (LINK, GAMMA):
            res = run_chain(asymmetric_sample(), Direction.U_TO_V, prior, SHORT)
            assert np.all(res.states[:, 2] > 0)

    def test_acceptance_in_target_band(self):
        res = run_chain(asymmetric_sample(), Direction.U_TO_V, GAMMA, McmcConfig(seed=4))
        assert 0.15 <= res.accept_rate <= 0.5
        assert res.warning is None

    def test_poor_acceptance_reported_not_raised(self):
        cfg = McmcConfig(n_iter=1000, burn_in=100, proposal_scales=(50, 50, 50), adapt=False)
        res = run_chain(asymmetric_sample(), Direction.U_TO_V, GAMMA, cfg)
        assert res.accept_rate < 0.05
        assert "acceptance" in res.warning

    def test_prior_recovery(self):
        cfg = McmcConfig(n_iter=40000, burn_in=5000, seed=8)
        res = run_chain(asymmetric_sample(), Direction.U_TO_V, LINK, cfg, use_likelihood=False)
        b0 = res.states[:, 0]
        ess = effective_sample_size(b0)
        assert abs(b0.mean()) < 3 * 10 / math.sqrt(ess)
        assert b0.std() == pytest.approx(10, rel=0.1)

    def test_calibration_single_design_point(self):
        rng = np.random.default_rng(12)
        u = rng.uniform(0.001, 0.999, 500)
        v = np.clip(rng.beta(np.exp(-1 + 2 * u), 1.0), 1e-12, 1 - 1e-12)
        res = run_chain(PseudoSample(u, v), Direction.U_TO_V, LINK, McmcConfig(seed=5))
        for j, truth in ((0, -1.0), (1, 2.0)):
            draws = res.states[:, j]
            assert abs(draws.mean() - truth) < 2 * draws.std()


def _quadrature_moments(ps, prior):
    # dense grid over (beta0, beta1, log kappa); the log kappa measure needs
    # the Jacobian kappa on top of the kappa-scale posterior
    b = np.linspace(-8, 8, 161)
    lk = np.linspace(-9, 5, 141)
    B0, B1, LK = np.meshgrid(b, b, lk, indexing="ij")
    K = np.exp(LK)
    logp = (-0.5 * (B0 / prior.sigma0) ** 2 - 0.5 * (B1 / prior.sigma1) ** 2
            + (prior.gamma_a - 1) * LK - prior.gamma_b * K + LK)
    for y, x in zip(ps.v, ps.u):
        mu = expit(B0 + B1 * x)
        logp += (gammaln(K) - gammaln(mu * K) - gammaln((1 - mu) * K)
                 + (mu * K - 1) * np.log(y) + ((1 - mu) * K - 1) * np.log1p(-y))
    w = np.exp(logp - logp.max())
    w /= w.sum()
    m1 = float(np.sum(w * B0))
    return m1, float(np.sum(w * (B0 - m1) ** 2))


@pytest.mark.slow
def test_detailed_balance_two_points():
    ps = PseudoSample([0.3, 0.7], [0.6, 0.2])
    prior = PriorSpec(sigma0=2.0, sigma1=2.0, kappa_mode="gamma")
    mean, var = _quadrature_moments(ps, prior)
    res = run_chain(ps, Direction.U_TO_V, prior, McmcConfig(n_iter=200_000, burn_in=10_000, seed=21))
    b0 = res.states[:, 0]
    ess = effective_sample_size(b0)
    assert abs(b0.mean() - mean) < 3 * math.sqrt(var / ess)
    sq = (b0 - mean) ** 2
    assert abs(sq.mean() - var) < 3 * sq.std() / math.sqrt(effective_sample_size(sq))


class TestEffectiveSampleSize:
    def test_iid(self):
        x = np.random.default_rng(0).normal(size=20000)
        assert effective_sample_size(x) == pytest.approx(20000, rel=0.1)

    def test_ar1(self):
        rng = np.random.default_rng(1)
        phi, n = 0.9, 100_000
        e = rng.normal(size=n)
        x = np.empty(n)
        x[0] = e[0]
        for t in range(1, n):
            x[t] = phi * x[t - 1] + e[t]
        assert effective_sample_size(x) == pytest.approx(n * (1 - phi) / (1 + phi), rel=0.15)

    def test_constant(self):
        assert effective_sample_size(np.ones(50)) == 50


class TestDecision:
    @pytest.mark.parametrize("prob,expected", [(0.79, Decision.U_TO_V), (0.5, Decision.V_TO_U),
                                               (0.001, Decision.V_TO_U), (0.5000001, Decision.U_TO_V)])
    def test_threshold(self, prob, expected):
        assert decide_direction_bayesian(prob) is expected

    def test_custom_threshold(self):
        assert decide_direction_bayesian(0.79, threshold=0.8) is Decision.V_TO_U

    def test_accepts_fit(self):
        fit = BayesianFit(0.1, 0.05, 0.05, (0, 1, 0.95), (0, 1, 0.95), (0, 1, 0.95), 0.9, Decision.U_TO_V, {})
        assert decide_direction_bayesian(fit) is Decision.U_TO_V
        assert fit.prob_v_to_u == pytest.approx(0.1)


@pytest.fixture(scope="module")
def result():
    return estimate_bayesian(asymmetric_sample(), GAMMA, SHORT)


class TestEstimateBayesian:
    def test_shapes(self, result):
        draws, fit = result
        n = SHORT.n_keep
        for arr in (draws.draws_uv, draws.draws_vu):
            assert arr.shape == (n, 3)
        assert draws.rho2_uv_draws.shape == draws.rho2_vu_draws.shape == (n,)
        assert fit.diagnostics["n_draws"] == n

    def test_draw_support(self, result):
        draws, _ = result
        for r in (draws.rho2_uv_draws, draws.rho2_vu_draws):
            assert np.all(np.isfinite(r)) and np.all(r >= 0)

    def test_probability_identity(self, result):
        draws, fit = result
        assert fit.prob_u_to_v == 1 - np.mean(draws.rho2_vu_draws >= draws.rho2_uv_draws)
        assert fit.prob_u_to_v + fit.prob_v_to_u == 1

    def test_summaries(self, result):
        draws, fit = result
        assert fit.mean_rho2_uv == np.mean(draws.rho2_uv_draws)
        assert fit.mean_delta == pytest.approx(fit.mean_rho2_uv - fit.mean_rho2_vu, abs=1e-15)
        for lo, hi, level in (fit.cred_uv, fit.cred_vu, fit.cred_delta):
            assert lo <= hi and level == 0.95
        assert fit.decision is decide_direction_bayesian(fit.prob_u_to_v)
        assert set(fit.diagnostics) >= {"accept_rate_uv", "accept_rate_vu", "ess_rho2_uv", "ess_rho2_vu"}

    def test_mirrored_swap(self, result):
        ps = asymmetric_sample()
        draws, fit = result
        sw_draws, sw_fit = estimate_bayesian(ps.swapped(), GAMMA, SHORT, mirror_seeds=True)
        np.testing.assert_array_equal(sw_draws.rho2_uv_draws, draws.rho2_vu_draws)
        np.testing.assert_array_equal(sw_draws.rho2_vu_draws, draws.rho2_uv_draws)
        assert sw_fit.prob_u_to_v == np.mean(draws.rho2_vu_draws > draws.rho2_uv_draws)
        if 0.5 not in (fit.prob_u_to_v, sw_fit.prob_u_to_v):
            assert sw_fit.decision is not fit.decision

    def test_fgm_not_decisive(self):
        _, fit = estimate_bayesian(sample(FGM(0.9), 500, seed=3), GAMMA, McmcConfig(seed=3))
        assert 0.2 <= fit.prob_u_to_v <= 0.8

    def test_chain_dump_roundtrip(self, result, tmp_path):
        draws, _ = result
        path = tmp_path / "chain.csv"
        write_chain_dump(draws, path)
        rows = read_chain_dump(path)
        assert len(rows) == 2 * SHORT.n_keep
        uv = [r for r in rows if r["direction"] == "U_to_V"]
        assert uv[0]["iter"] == SHORT.burn_in
        np.testing.assert_array_equal([r["rho2"] for r in uv], draws.rho2_uv_draws)
        np.testing.assert_array_equal([r["kappa"] for r in uv], draws.draws_uv[:, 2])

    def test_bad_level(self):
        with pytest.raises(ValueError):
            estimate_bayesian(asymmetric_sample(), GAMMA, SHORT, level=0)
