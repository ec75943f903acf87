import numpy as np
import pytest
from scipy.stats import spearmanr

from cdd.betareg import Direction
from cdd.frequentist import _point_estimate
from cdd.oracle import (
    FGM,
    AsymmetricBeta,
    GaussianCopula,
    Independence,
    conditional_mean_numeric,
    generate_directed,
    rho2_numeric,
    sample,
    spearman_numeric,
)
from cdd.transform import PairedSample, to_pseudo_observations

FAMILIES = [Independence(), FGM(0.9), FGM(-0.4), GaussianCopula(0.5), GaussianCopula(-0.7)]


@pytest.mark.parametrize("spec,expected", [
    (Independence(), 0.0),
    (GaussianCopula(0.5), 6 / np.pi * np.arcsin(0.25)),
    (FGM(1.0), 1 / 3),
])
def test_sample_spearman(spec, expected):
    ps = sample(spec, 100_000, seed=11)
    assert abs(spearmanr(ps.u, ps.v)[0] - expected) < 0.01


def test_gaussian_spearman_constant():
    assert GaussianCopula(0.5).spearman() == pytest.approx(0.4825837395309974, abs=1e-12)


def test_sampler_deterministic():
    a = sample(FGM(0.5), 100, seed=3)
    b = sample(FGM(0.5), 100, seed=3)
    np.testing.assert_array_equal(a.u, b.u)
    np.testing.assert_array_equal(a.v, b.v)


def test_uniform_margins():
    ps = sample(FGM(-0.8), 50_000, seed=5)
    for w in (ps.u, ps.v):
        counts = np.histogram(w, bins=10, range=(0, 1))[0]
        assert np.all(np.abs(counts - 5000) < 5 * np.sqrt(5000))


class TestConditionalMean:
    def test_independence(self):
        for u in (0.1, 0.5, 0.93):
            assert conditional_mean_numeric(Independence(), u) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("theta", [-1.0, -0.3, 0.5, 0.9])
    @pytest.mark.parametrize("u", [0.01, 0.25, 0.5, 0.8])
    def test_fgm_closed_form(self, theta, u):
        got = conditional_mean_numeric(FGM(theta), u)
        assert got == pytest.approx(0.5 - theta * (1 - 2 * u) / 6, abs=1e-8)

    def test_fgm_endpoints(self):
        assert conditional_mean_numeric(FGM(0.9), 0.5) == pytest.approx(0.5, abs=1e-12)
        assert conditional_mean_numeric(FGM(0.9), 1e-12) == pytest.approx(0.35, abs=1e-8)

    @pytest.mark.parametrize("spec", FAMILIES)
    def test_reflection_symmetry(self, spec):
        for u in (0.05, 0.3, 0.45):
            total = conditional_mean_numeric(spec, u) + conditional_mean_numeric(spec, 1 - u)
            assert total / 2 == pytest.approx(0.5, abs=1e-8)

    @pytest.mark.parametrize("spec", FAMILIES)
    def test_total_expectation(self, spec):
        from scipy import integrate
        val, _ = integrate.quad(lambda u: conditional_mean_numeric(spec, u), 0, 1, epsabs=1e-11)
        assert val == pytest.approx(0.5, abs=1e-8)

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.1])
    def test_boundary_rejected(self, u):
        with pytest.raises(ValueError):
            conditional_mean_numeric(FGM(0.5), u)

    def test_gaussian_against_monte_carlo(self):
        # E[V | U = u] for the Gaussian copula is E[Phi(rho z + sqrt(1-rho^2) e)]
        from scipy.special import ndtr, ndtri
        rho, u = 0.6, 0.8
        e = np.random.default_rng(0).standard_normal(2_000_000)
        mc = ndtr(rho * ndtri(u) + np.sqrt(1 - rho ** 2) * e).mean()
        assert conditional_mean_numeric(GaussianCopula(rho), u) == pytest.approx(mc, abs=1e-3)


class TestRho2Numeric:
    def test_independence(self):
        for d in Direction:
            assert abs(rho2_numeric(Independence(), d)) < 1e-9

    @pytest.mark.parametrize("theta", [0.3, 0.6, 0.9, -0.9])
    def test_fgm(self, theta):
        uv = rho2_numeric(FGM(theta), Direction.U_TO_V)
        vu = rho2_numeric(FGM(theta), Direction.V_TO_U)
        assert uv == pytest.approx(theta ** 2 / 9, abs=1e-6)
        assert uv == pytest.approx(vu, abs=1e-9)

    @pytest.mark.parametrize("spec", FAMILIES)
    def test_two_forms_agree(self, spec):
        for d in Direction:
            a = rho2_numeric(spec, d, form="second_moment")
            b = rho2_numeric(spec, d, form="variance")
            assert a == pytest.approx(b, abs=1e-9)
            assert a >= -1e-12

    def test_rejects_generator(self):
        with pytest.raises(TypeError):
            rho2_numeric(AsymmetricBeta(0, 1, 2))


class TestSpearmanNumeric:
    @pytest.mark.parametrize("spec", FAMILIES)
    def test_closed_form(self, spec):
        assert spearman_numeric(spec) == pytest.approx(spec.spearman(), abs=1e-6)

    @pytest.mark.parametrize("spec", FAMILIES)
    def test_matches_large_sample(self, spec):
        ps = sample(spec, 1_000_000, seed=2024)
        assert abs(spearman_numeric(spec) - spearmanr(ps.u, ps.v)[0]) < 0.005


class TestGenerateDirected:
    def test_labels_and_orientation(self):
        fwd = generate_directed(AsymmetricBeta(-1, 2, 5, Direction.U_TO_V), 50, seed=1)
        rev = generate_directed(AsymmetricBeta(-1, 2, 5, Direction.V_TO_U), 50, seed=1)
        assert fwd.labels == ("cause", "effect")
        assert rev.labels == ("effect", "cause")
        np.testing.assert_array_equal(fwd.x1, rev.x2)

    def test_no_dependence_when_slope_zero(self):
        deltas = []
        for seed in range(20):
            ps = to_pseudo_observations(generate_directed(AsymmetricBeta(-0.5, 0, 6), 300, seed=seed))
            _, _, r_uv, r_vu = _point_estimate(ps)
            deltas.append(r_uv - r_vu)
        assert abs(np.mean(deltas)) < 0.005
        assert max(abs(d) for d in deltas) < 0.05

    def test_monotone_transform_robust(self):
        raw = generate_directed(AsymmetricBeta(-1.5, 3, 8), 300, seed=4)
        moved = PairedSample(np.exp(raw.x1), raw.x2, raw.labels)
        a = _point_estimate(to_pseudo_observations(raw))
        b = _point_estimate(to_pseudo_observations(moved))
        assert a[2:] == b[2:]

    def test_rejects_copula_spec(self):
        with pytest.raises(TypeError):
            generate_directed(FGM(0.5), 10)
