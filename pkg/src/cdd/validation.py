"""Oracle-equivalence checks: quadrature functionals against closed forms,
the beta kernel against scipy, and the MLE against a grid search."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as beta_dist

from .betareg import Direction, beta_log_density, direction_log_likelihood
from .frequentist import fit_direction_mle
from .oracle import FGM, GaussianCopula, Independence, rho2_numeric, spearman_numeric
from .transform import PseudoSample


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def grid_search_loglik(y, x, lo=-5.0, hi=5.0, step=0.01):
    """Maximum of the link-derived log-likelihood over a square grid, using
    scipy's Beta(a, b) log density on ``a = mu kappa``, ``b = (1 - mu) kappa``."""
    grid = np.arange(lo, hi + step / 2, step)
    best = -np.inf
    arg = None
    for b0 in grid:
        eta = b0 + grid[:, None] * x[None, :]
        mu = 1.0 / (1.0 + np.exp(-eta))
        kappa = 1.0 + np.exp(eta)
        ll = beta_dist.logpdf(y[None, :], mu * kappa, (1.0 - mu) * kappa).sum(axis=1)
        i = int(np.argmax(ll))
        if ll[i] > best:
            best, arg = float(ll[i]), (float(b0), float(grid[i]))
    return best, arg


def check_rho2_fgm(tol=1e-6):
    out = []
    for theta in (0.3, 0.6, 0.9):
        for d in Direction:
            got = rho2_numeric(FGM(theta), d)
            err = abs(got - theta ** 2 / 9)
            out.append(Check(f"rho2 FGM({theta}) {d.value}", err <= tol, f"|err| = {err:.2e}"))
    got = rho2_numeric(Independence())
    out.append(Check("rho2 Independence", abs(got) <= 1e-9, f"value = {got:.2e}"))
    return out


def check_spearman(tol=1e-6):
    specs = [Independence(), FGM(0.5), FGM(-1.0), GaussianCopula(0.5), GaussianCopula(-0.8)]
    out = []
    for spec in specs:
        err = abs(spearman_numeric(spec) - spec.spearman())
        out.append(Check(f"spearman {spec}", err <= tol, f"|err| = {err:.2e}"))
    return out


def check_beta_kernel(n=1000, seed=0, tol=1e-12):
    rng = np.random.default_rng(seed)
    y = rng.uniform(0.001, 0.999, n)
    mu = rng.uniform(0.01, 0.99, n)
    kappa = rng.uniform(0.1, 200.0, n)
    err = np.max(np.abs(beta_log_density(y, mu, kappa) - beta_dist.logpdf(y, mu * kappa, (1 - mu) * kappa)))
    return [Check("beta log density vs scipy", err <= tol, f"max |err| = {err:.2e}")]


def check_mle_grid(n=50, seed=0, tol=1e-3):
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.02, 0.98, n)
    eta = -1.0 + 2.0 * u
    v = rng.beta(np.exp(eta), 1.0)
    v = np.clip(v, 1e-6, 1 - 1e-6)
    ps = PseudoSample(u, v)
    coef = fit_direction_mle(ps, Direction.U_TO_V)
    ll = direction_log_likelihood(ps, Direction.U_TO_V, coef)
    best, _ = grid_search_loglik(v, u)
    diff = ll - best
    return [Check("MLE vs grid search", abs(diff) <= tol,
                  f"loglik {ll:.6f} vs grid {best:.6f}")]


def run_oracle_checks(quick=False):
    """Run every check; `quick` skips the grid search."""
    checks = check_rho2_fgm() + check_spearman() + check_beta_kernel()
    if not quick:
        checks += check_mle_grid()
    return checks
