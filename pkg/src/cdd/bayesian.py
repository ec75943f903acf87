"""Random-walk Metropolis-Hastings for Bayesian copula directional dependence.

Each conditional direction gets its own chain over ``(beta0, beta1)`` and,
when the precision carries a Gamma prior, ``log kappa``. Posterior draws of
the coefficients induce draws of ``rho2 = 12 Var(mu)`` for both directions,
which are compared iteration by iteration.
"""

import csv
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, gammaln

from .betareg import KAPPA_MAX, Direction, rho_squared_from_means, split_direction
from .frequentist import Decision, NonConvergence, _moment_kappa, _newton_link_derived

log = logging.getLogger(__name__)

LINK = "link"
GAMMA = "gamma"
_TARGET_ACCEPT = 0.3
_KAPPA_MIN = np.nextafter(1.0, 2.0)


@dataclass(frozen=True)
class PriorSpec:
    """Normal priors on the coefficients (standard deviations `sigma0`,
    `sigma1`) and the precision treatment.

    ``kappa_mode="link"`` ties the precision to the linear predictor;
    ``kappa_mode="gamma"`` gives it a ``Gamma(gamma_a, gamma_b)`` prior
    (shape, rate).
    """

    sigma0: float = 10.0
    sigma1: float = 10.0
    kappa_mode: str = GAMMA
    gamma_a: float = 1.0
    gamma_b: float = 1.0

    def __post_init__(self):
        if self.kappa_mode not in (LINK, GAMMA):
            raise ValueError(f"kappa_mode must be {LINK!r} or {GAMMA!r}")
        for name in ("sigma0", "sigma1", "gamma_a", "gamma_b"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def free_kappa(self):
        return self.kappa_mode == GAMMA


@dataclass(frozen=True)
class McmcConfig:
    n_iter: int = 10000
    burn_in: int = 2000
    thin: int = 1
    proposal_scales: tuple = (0.1, 0.1, 0.1)
    adapt: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_iter < 1 or self.thin < 1:
            raise ValueError("n_iter and thin must be positive")
        if not 0 <= self.burn_in < self.n_iter:
            raise ValueError("burn_in must satisfy 0 <= burn_in < n_iter")
        if (self.n_iter - self.burn_in) % self.thin:
            raise ValueError("n_iter - burn_in must be a multiple of thin")
        if len(self.proposal_scales) != 3 or min(self.proposal_scales) <= 0:
            raise ValueError("proposal_scales needs three positive values")
        object.__setattr__(self, "proposal_scales", tuple(float(s) for s in self.proposal_scales))

    @property
    def n_keep(self):
        return (self.n_iter - self.burn_in) // self.thin

    def chain_seeds(self, mirror=False):
        """Independent seeds for the (U->V, V->U) chains; `mirror` swaps them."""
        a, b = (int(s.generate_state(1)[0]) for s in np.random.SeedSequence(self.seed).spawn(2))
        return (b, a) if mirror else (a, b)


@dataclass
class ChainResult:
    """Retained states of one chain.

    `states` has columns ``beta0, beta1, kappa``. Under a link-derived
    precision the kappa column holds ``1 + exp(beta0 + beta1 / 2)``, the
    precision at the centre of the covariate range.
    """

    states: np.ndarray
    accept_rate: float
    iterations: np.ndarray
    proposal_chol: np.ndarray
    warning: str | None = None


@dataclass
class PosteriorDraws:
    draws_uv: np.ndarray
    draws_vu: np.ndarray
    rho2_uv_draws: np.ndarray
    rho2_vu_draws: np.ndarray
    accept_rate_uv: float
    accept_rate_vu: float
    iterations: np.ndarray = field(default=None)


@dataclass(frozen=True)
class BayesianFit:
    mean_rho2_uv: float
    mean_rho2_vu: float
    mean_delta: float
    cred_uv: tuple
    cred_vu: tuple
    cred_delta: tuple
    prob_u_to_v: float
    decision: Decision
    diagnostics: dict

    @property
    def prob_v_to_u(self):
        return 1.0 - self.prob_u_to_v


class _LogPosterior:
    """Unnormalised log posterior on the sampler scale.

    The sampler works on ``(beta0, beta1[, log kappa])``; for a free
    precision the log-Jacobian ``log kappa`` is added so that a symmetric
    step on ``log kappa`` targets the posterior of ``kappa``.
    """

    def __init__(self, y, x, prior, use_likelihood=True):
        self.x = np.asarray(x, dtype=float)
        self.log_y = np.log(y)
        self.log_1my = np.log1p(-np.asarray(y, dtype=float))
        self.prior = prior
        self.use_likelihood = use_likelihood

    def log_prior(self, b0, b1, kappa):
        p = self.prior
        out = (-0.5 * (b0 / p.sigma0) ** 2 - 0.5 * (b1 / p.sigma1) ** 2
               - np.log(2.0 * np.pi * p.sigma0 * p.sigma1))
        if p.free_kappa:
            out += (p.gamma_a * np.log(p.gamma_b) - gammaln(p.gamma_a)
                    + (p.gamma_a - 1.0) * np.log(kappa) - p.gamma_b * kappa)
        return out

    def log_likelihood(self, b0, b1, kappa):
        eta = b0 + b1 * self.x
        mu = expit(eta)
        if kappa is None:
            kappa = np.clip(1.0 + np.exp(np.minimum(eta, 700.0)), _KAPPA_MIN, KAPPA_MAX)
        a = mu * kappa
        b = (1.0 - mu) * kappa
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = (gammaln(kappa) - gammaln(a) - gammaln(b)
                     + (a - 1.0) * self.log_y + (b - 1.0) * self.log_1my)
        out = float(np.sum(terms))
        return out if np.isfinite(out) else -np.inf

    def log_posterior(self, b0, b1, kappa):
        if self.prior.free_kappa and not (kappa > 0 and np.isfinite(kappa)):
            return -np.inf
        kappa = kappa if self.prior.free_kappa else None
        out = self.log_prior(b0, b1, kappa)
        if self.use_likelihood:
            out += self.log_likelihood(b0, b1, kappa)
        return out

    def __call__(self, theta):
        if self.prior.free_kappa:
            if not np.isfinite(theta[2]) or abs(theta[2]) > 700:
                return -np.inf
            kappa = np.exp(theta[2])
            return self.log_posterior(theta[0], theta[1], kappa) + theta[2]
        return self.log_posterior(theta[0], theta[1], None)


def log_posterior(ps, direction, state, prior, use_likelihood=True):
    """Log posterior of ``state = (beta0, beta1, kappa)`` for one direction.

    Normal and Gamma prior terms carry their normalising constants; the
    posterior normaliser is omitted. `kappa` is ignored for a link-derived
    precision. Out-of-support states give ``-inf``.
    """
    y, x = split_direction(ps, direction)
    b0, b1, kappa = state
    return _LogPosterior(y, x, prior, use_likelihood).log_posterior(b0, b1, kappa)


def _initial_theta(y, x, prior, use_likelihood):
    if not use_likelihood:
        return np.array([0.0, 0.0, 0.0][: 3 if prior.free_kappa else 2])
    beta, ok = _newton_link_derived(y, x, (0.0, 0.0))
    if not (ok and np.all(np.isfinite(beta))):
        beta = np.zeros(2)
    if not prior.free_kappa:
        return beta
    return np.array([beta[0], beta[1], np.log(_moment_kappa(y, x, beta))])


def run_chain(ps, direction, prior=None, cfg=None, use_likelihood=True, init=None):
    """Run one random-walk Metropolis-Hastings chain.

    Parameters
    ----------
    ps : PseudoSample
    direction : Direction
    prior : PriorSpec, optional
    cfg : McmcConfig, optional
    use_likelihood : bool
        ``False`` drops the data term so the chain targets the prior.
    init : array_like, optional
        Starting ``(beta0, beta1[, log kappa])``. Defaults to the link-derived
        maximum-likelihood coefficients (zeros without a likelihood).

    Returns
    -------
    ChainResult

    Notes
    -----
    With ``cfg.adapt`` the proposal is tuned during burn-in only: a
    Robbins-Monro update of a global log-scale toward 30% acceptance, and
    the proposal shape is replaced by the burn-in sample covariance at 1/2
    and 3/4 of the burn-in. The kernel is frozen afterwards.
    """
    prior = prior or PriorSpec()
    cfg = cfg or McmcConfig()
    direction = Direction(direction)
    y, x = split_direction(ps, direction)
    target = _LogPosterior(y, x, prior, use_likelihood)
    d = 3 if prior.free_kappa else 2

    theta = (np.asarray(init, dtype=float)[:d].copy() if init is not None
             else _initial_theta(y, x, prior, use_likelihood))
    lp = target(theta)
    if not np.isfinite(lp):
        raise NonConvergence(f"initial state {theta} has zero posterior density")

    rng = np.random.default_rng(cfg.seed)
    steps = rng.standard_normal((cfg.n_iter, d))
    log_u = np.log(rng.random(cfg.n_iter))

    chol = np.diag(cfg.proposal_scales[:d])
    log_scale = 0.0
    reshape_at = {cfg.burn_in // 2, (3 * cfg.burn_in) // 4} if cfg.adapt and cfg.burn_in >= 200 else set()
    history = np.empty((cfg.burn_in, d)) if reshape_at else None

    keep_states = np.empty((cfg.n_keep, d))
    keep_iter = np.empty(cfg.n_keep, dtype=int)
    k = 0
    n_accept = 0
    for t in range(cfg.n_iter):
        proposal = theta + np.exp(log_scale) * (chol @ steps[t])
        lp_prop = target(proposal)
        log_alpha = lp_prop - lp
        if log_u[t] < log_alpha:
            theta, lp = proposal, lp_prop
            if t >= cfg.burn_in:
                n_accept += 1
        if t < cfg.burn_in:
            if history is not None:
                history[t] = theta
            if cfg.adapt:
                alpha = np.exp(min(log_alpha, 0.0)) if np.isfinite(log_alpha) else 0.0
                log_scale += (t + 1.0) ** -0.6 * (alpha - _TARGET_ACCEPT)
                if t in reshape_at:
                    window = history[cfg.burn_in // 4: t + 1]
                    cov = np.atleast_2d(np.cov(window, rowvar=False))
                    try:
                        new_chol = np.linalg.cholesky(2.38 ** 2 / d * cov + 1e-10 * np.eye(d))
                    except np.linalg.LinAlgError:
                        new_chol = None
                    if new_chol is not None and np.all(np.isfinite(new_chol)):
                        chol, log_scale = new_chol, 0.0
        elif (t - cfg.burn_in) % cfg.thin == 0:
            keep_states[k] = theta
            keep_iter[k] = t
            k += 1

    states = np.empty((cfg.n_keep, 3))
    states[:, :2] = keep_states[:, :2]
    if prior.free_kappa:
        states[:, 2] = np.exp(keep_states[:, 2])
    else:
        states[:, 2] = np.clip(1.0 + np.exp(np.minimum(states[:, 0] + 0.5 * states[:, 1], 700.0)),
                               _KAPPA_MIN, KAPPA_MAX)
    accept_rate = n_accept / (cfg.n_iter - cfg.burn_in)
    warning = None
    if not 0.05 <= accept_rate <= 0.95:
        warning = f"acceptance rate {accept_rate:.3f} outside [0.05, 0.95]"
        log.warning("%s chain: %s", direction.value, warning)
    return ChainResult(states, accept_rate, keep_iter, np.exp(log_scale) * chol, warning)


def rho2_draws(states, covariate, chunk=2000):
    """``12 Var(mu)`` over the observed covariates for every retained state."""
    covariate = np.asarray(covariate, dtype=float)
    out = np.empty(len(states))
    for i in range(0, len(states), chunk):
        s = states[i:i + chunk]
        mu = expit(s[:, :1] + s[:, 1:2] * covariate[None, :])
        out[i:i + chunk] = rho_squared_from_means(mu, axis=1)
    return out


def effective_sample_size(x):
    """Effective sample size from the initial positive sequence of
    autocorrelation pairs."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4 or np.var(x) == 0:
        return float(n)
    xc = x - x.mean()
    f = np.fft.rfft(xc, n=2 * n)
    acov = np.fft.irfft(f * np.conj(f))[:n] / n
    rho = acov / acov[0]
    tau = -1.0
    for m in range(0, n - 1, 2):
        pair = rho[m] + rho[m + 1]
        if pair <= 0:
            break
        tau += 2.0 * pair
    return float(n / max(tau, 1e-12))


def _interval(draws, level):
    lo, hi = np.quantile(draws, [(1.0 - level) / 2.0, (1.0 + level) / 2.0])
    return (float(lo), float(hi), float(level))


def decide_direction_bayesian(fit, threshold=0.5):
    """U->V iff the posterior direction probability exceeds `threshold`;
    a tie at the threshold resolves to V->U."""
    prob = fit.prob_u_to_v if isinstance(fit, BayesianFit) else float(fit)
    return Decision.U_TO_V if prob > threshold else Decision.V_TO_U


def estimate_bayesian(ps, prior=None, cfg=None, level=0.95, threshold=0.5, mirror_seeds=False):
    """Posterior summaries of both directional dependences.

    Parameters
    ----------
    ps : PseudoSample
    prior : PriorSpec, optional
    cfg : McmcConfig, optional
    level : float
        Equal-tailed credible level.
    threshold : float
        Decision threshold on ``Pr(rho2_uv > rho2_vu)``.
    mirror_seeds : bool
        Swap the per-direction chain seeds. Running with swapped inputs
        and mirrored seeds reproduces the original chains with directions
        exchanged.

    Returns
    -------
    (PosteriorDraws, BayesianFit)
    """
    prior = prior or PriorSpec()
    cfg = cfg or McmcConfig()
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    seed_uv, seed_vu = cfg.chain_seeds(mirror=mirror_seeds)
    chain_uv = run_chain(ps, Direction.U_TO_V, prior, _with_seed(cfg, seed_uv))
    chain_vu = run_chain(ps, Direction.V_TO_U, prior, _with_seed(cfg, seed_vu))

    r_uv = rho2_draws(chain_uv.states, ps.u)
    r_vu = rho2_draws(chain_vu.states, ps.v)
    delta = r_uv - r_vu
    draws = PosteriorDraws(chain_uv.states, chain_vu.states, r_uv, r_vu,
                           chain_uv.accept_rate, chain_vu.accept_rate, chain_uv.iterations)

    prob = float(np.mean(r_uv > r_vu))
    diagnostics = {
        "accept_rate_uv": chain_uv.accept_rate,
        "accept_rate_vu": chain_vu.accept_rate,
        "ess_rho2_uv": effective_sample_size(r_uv),
        "ess_rho2_vu": effective_sample_size(r_vu),
        "ess_beta1_uv": effective_sample_size(chain_uv.states[:, 1]),
        "ess_beta1_vu": effective_sample_size(chain_vu.states[:, 1]),
        "n_draws": int(cfg.n_keep),
        "warnings": [w for w in (chain_uv.warning, chain_vu.warning) if w],
    }
    fit = BayesianFit(
        mean_rho2_uv=float(np.mean(r_uv)),
        mean_rho2_vu=float(np.mean(r_vu)),
        mean_delta=float(np.mean(delta)),
        cred_uv=_interval(r_uv, level),
        cred_vu=_interval(r_vu, level),
        cred_delta=_interval(delta, level),
        prob_u_to_v=prob,
        decision=decide_direction_bayesian(prob, threshold),
        diagnostics=diagnostics,
    )
    return draws, fit


def _with_seed(cfg, seed):
    return McmcConfig(cfg.n_iter, cfg.burn_in, cfg.thin, cfg.proposal_scales, cfg.adapt, seed)


def write_chain_dump(draws, path):
    """Write one delimited record per retained iteration and direction."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "direction", "beta0", "beta1", "kappa", "rho2"])
        iters = draws.iterations if draws.iterations is not None else range(len(draws.rho2_uv_draws))
        for tag, states, rho2 in ((Direction.U_TO_V, draws.draws_uv, draws.rho2_uv_draws),
                                  (Direction.V_TO_U, draws.draws_vu, draws.rho2_vu_draws)):
            for it, s, r in zip(iters, states, rho2):
                writer.writerow([int(it), tag.value, repr(float(s[0])), repr(float(s[1])),
                                 repr(float(s[2])), repr(float(r))])


def read_chain_dump(path):
    """Parse a file written by :func:`write_chain_dump` into a list of dicts."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["iter"] = int(row["iter"])
        for key in ("beta0", "beta1", "kappa", "rho2"):
            row[key] = float(row[key])
    return rows
