"""Maximum-likelihood copula directional dependence with bootstrap intervals."""

import enum
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .betareg import (
    BetaRegCoefficients,
    Direction,
    direction_log_likelihood,
    direction_score,
    inv_logit_mean,
    rho_squared_from_means,
    split_direction,
)
from .transform import PairedSample, PseudoSample, pseudo_observations, to_pseudo_observations

log = logging.getLogger(__name__)

_RESTART_STARTS = ((0.5, -0.5), (-0.5, 0.5), (1.0, 1.0))
_MAX_BOOT_FAILURE = 0.10


class NonConvergence(RuntimeError):
    """Raised when the likelihood maximisation fails from every start."""


class Decision(str, enum.Enum):
    U_TO_V = "U_to_V"
    V_TO_U = "V_to_U"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class FrequentistFit:
    coef_uv: BetaRegCoefficients
    coef_vu: BetaRegCoefficients
    rho2_uv: float
    rho2_vu: float
    delta_rho2: float
    ci_lower: float
    ci_upper: float
    level: float
    n_boot: int
    boot_failures: int
    converged_uv: bool = True
    converged_vu: bool = True

    @property
    def ci_delta(self):
        return (self.ci_lower, self.ci_upper, self.level)


def _newton_link_derived(y, x, start, max_iter=100, tol=1e-10):
    # With kappa = 1 + exp(eta) the density is Beta(exp(eta), 1), so
    # loglik = sum(eta + (exp(eta) - 1) * log y), strictly concave in beta.
    log_y = np.log(y)
    X = np.column_stack([np.ones_like(x), x])
    beta = np.asarray(start, dtype=float)

    def objective(b):
        eta = X @ b
        if np.max(eta) > 700:
            return -np.inf
        return np.sum(eta + np.expm1(eta) * log_y)

    ll = objective(beta)
    for _ in range(max_iter):
        w = np.exp(X @ beta) * log_y
        grad = X.T @ (1.0 + w)
        hess = (X * w[:, None]).T @ X
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            return beta, False
        t = 1.0
        while t > 1e-12:
            trial = beta + t * step
            ll_trial = objective(trial)
            if ll_trial >= ll - 1e-12 * abs(ll):
                break
            t *= 0.5
        else:
            return beta, False
        beta, ll = trial, ll_trial
        if np.max(np.abs(t * step)) < tol * (1.0 + np.max(np.abs(beta))):
            return beta, bool(np.isfinite(ll))
    return beta, False


def _quasi_newton(ps, direction, start, free_kappa=False):
    # free kappa is optimised on the log scale
    def negll(p):
        if free_kappa and abs(p[2]) > 700:
            return np.inf, np.zeros_like(p)
        coef = BetaRegCoefficients(p[0], p[1], np.exp(p[2]) if free_kappa else None)
        try:
            val = direction_log_likelihood(ps, direction, coef)
        except ValueError:
            return np.inf, np.zeros_like(p)
        grad = direction_score(ps, direction, coef)
        if free_kappa:
            grad[2] *= coef.kappa
        return -val, -grad

    res = minimize(negll, np.asarray(start, dtype=float), jac=True, method="BFGS",
                   options={"gtol": 1e-6 * ps.n})
    return res.x, bool(res.success and np.isfinite(res.fun))


def _moment_kappa(y, x, beta):
    mu = expit(beta[0] + beta[1] * x)
    resid = np.mean((y - mu) ** 2)
    return max(np.mean(mu * (1.0 - mu)) / max(resid, 1e-12) - 1.0, 0.5)


def fit_direction_mle(ps, direction, kappa="link"):
    """Maximise the beta regression likelihood for one direction.

    With ``kappa="link"`` (the default) the precision is link-derived and a
    Newton solver starts at the independence point ``(0, 0)``; if it fails,
    BFGS is restarted from a fixed list of perturbed starts. With
    ``kappa="free"`` a constant precision is estimated jointly by BFGS,
    started from the link-derived fit and a moment estimate of kappa.

    Raises
    ------
    NonConvergence
        If no start yields a converged optimum.
    """
    direction = Direction(direction)
    if kappa not in ("link", "free"):
        raise ValueError(f"kappa must be 'link' or 'free', got {kappa!r}")
    y, x = split_direction(ps, direction)

    beta, ok = _newton_link_derived(y, x, (0.0, 0.0))
    attempts = 1
    for start in _RESTART_STARTS:
        if ok:
            break
        log.debug("restarting %s fit from %s", direction.value, start)
        beta, ok = _quasi_newton(ps, direction, start)
        attempts += 1

    if kappa == "link":
        ll0 = direction_log_likelihood(ps, direction, BetaRegCoefficients(0.0, 0.0))
        if ok:
            coef = BetaRegCoefficients(float(beta[0]), float(beta[1]))
            if direction_log_likelihood(ps, direction, coef) >= ll0 - 1e-9:
                return coef
        raise NonConvergence(f"beta regression for {direction.value} failed after "
                             f"{attempts} attempts")

    base = beta if ok else np.zeros(2)
    starts = [(base[0], base[1], np.log(_moment_kappa(y, x, base)))]
    starts += [(b0, b1, 0.0) for b0, b1 in _RESTART_STARTS]
    for start in starts:
        p, ok = _quasi_newton(ps, direction, start, free_kappa=True)
        if ok:
            return BetaRegCoefficients(float(p[0]), float(p[1]), float(np.exp(p[2])))
    raise NonConvergence(f"free-precision beta regression for {direction.value} failed")


def _point_estimate(ps, kappa="link"):
    coef_uv = fit_direction_mle(ps, Direction.U_TO_V, kappa)
    coef_vu = fit_direction_mle(ps, Direction.V_TO_U, kappa)
    rho2_uv = rho_squared_from_means(inv_logit_mean(coef_uv, ps.u))
    rho2_vu = rho_squared_from_means(inv_logit_mean(coef_vu, ps.v))
    return coef_uv, coef_vu, rho2_uv, rho2_vu


def bootstrap_deltas(ps, n_boot, seed, kappa="link"):
    """Bootstrap replicates of ``rho2_uv - rho2_vu``.

    Pairs are resampled with replacement and re-ranked in every replicate.
    Ranks of pseudo-observations coincide with ranks of the raw values, so
    resampling `ps` is equivalent to resampling the raw pairs.

    Returns
    -------
    deltas : ndarray
        Successful replicates in replicate order.
    failures : int
        Replicates dropped because a fit did not converge.
    """
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, ps.n, size=(n_boot, ps.n))
    deltas = np.full(n_boot, np.nan)
    failures = 0
    for b in range(n_boot):
        boot = PseudoSample(pseudo_observations(ps.u[idx[b]]),
                            pseudo_observations(ps.v[idx[b]]))
        try:
            _, _, r_uv, r_vu = _point_estimate(boot, kappa)
        except NonConvergence:
            failures += 1
            continue
        deltas[b] = r_uv - r_vu
    if failures > _MAX_BOOT_FAILURE * n_boot:
        raise NonConvergence(f"{failures} of {n_boot} bootstrap replicates failed")
    return deltas[np.isfinite(deltas)], failures


def estimate_frequentist(sample, n_boot=1000, level=0.95, seed=0, kappa="link"):
    """Point estimates of both directional dependences and a bootstrap
    percentile interval for their difference.

    Parameters
    ----------
    sample : PairedSample or PseudoSample
        Raw pairs are rank transformed first.
    n_boot : int
        Bootstrap replicates, at least 200.
    level : float
        Interval coverage in (0, 1).
    seed : int
        Seed for the resampling indices.
    kappa : {"link", "free"}
        Precision treatment passed to :func:`fit_direction_mle`.

    Returns
    -------
    FrequentistFit
    """
    if isinstance(sample, PairedSample):
        ps = to_pseudo_observations(sample)
    elif isinstance(sample, PseudoSample):
        ps = sample
    else:
        raise TypeError("expected a PairedSample or PseudoSample")
    if int(n_boot) < 200:
        raise ValueError(f"n_boot must be at least 200, got {n_boot}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")

    coef_uv, coef_vu, rho2_uv, rho2_vu = _point_estimate(ps, kappa)
    deltas, failures = bootstrap_deltas(ps, int(n_boot), seed, kappa)
    alpha = 1.0 - level
    lower, upper = np.quantile(deltas, [alpha / 2.0, 1.0 - alpha / 2.0])
    return FrequentistFit(
        coef_uv=coef_uv,
        coef_vu=coef_vu,
        rho2_uv=rho2_uv,
        rho2_vu=rho2_vu,
        delta_rho2=rho2_uv - rho2_vu,
        ci_lower=float(lower),
        ci_upper=float(upper),
        level=float(level),
        n_boot=int(n_boot),
        boot_failures=failures,
    )


def decide_direction_frequentist(fit):
    """Stronger direction if the interval for the difference excludes zero."""
    if fit.delta_rho2 > 0 and fit.ci_lower > 0:
        return Decision.U_TO_V
    if fit.delta_rho2 < 0 and fit.ci_upper < 0:
        return Decision.V_TO_U
    return Decision.INCONCLUSIVE
