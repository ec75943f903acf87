"""
Bayesian directional dependence
===============================

Random-walk Metropolis-Hastings for both directions, then the share of
posterior draws in which U->V dominates V->U.
"""

import numpy as np

from cdd import McmcConfig, PriorSpec, estimate_bayesian
from cdd.oracle import FGM, AsymmetricBeta, generate_directed, sample
from cdd.transform import to_pseudo_observations

ps = to_pseudo_observations(generate_directed(AsymmetricBeta(-1.5, 3.0, 8.0), n=500, seed=4))
cfg = McmcConfig(n_iter=10000, burn_in=2000, seed=0)

for prior in (PriorSpec(kappa_mode="gamma"), PriorSpec(kappa_mode="link")):
    draws, fit = estimate_bayesian(ps, prior, cfg)
    lo, hi, _ = fit.cred_delta
    print(f"kappa {prior.kappa_mode}: mean rho2 U->V {fit.mean_rho2_uv:.5f}  V->U {fit.mean_rho2_vu:.5f}  "
          f"delta 95% ({lo:+.5f}, {hi:+.5f})  P(U->V) {fit.prob_u_to_v:.3f} -> {fit.decision.value}")
    d = fit.diagnostics
    print(f"    acceptance {d['accept_rate_uv']:.2f}/{d['accept_rate_vu']:.2f}  "
          f"ESS rho2 {d['ess_rho2_uv']:.0f}/{d['ess_rho2_vu']:.0f}")

# posterior of kappa under the Gamma(1, 1) prior
draws, _ = estimate_bayesian(ps, PriorSpec(), cfg)
print("kappa quantiles (U->V):", np.round(np.quantile(draws.draws_uv[:, 2], [0.025, 0.5, 0.975]), 2))

# exchangeable data gives heavily overlapping posteriors
_, fgm = estimate_bayesian(sample(FGM(0.9), 500, seed=3), PriorSpec(), cfg)
print(f"FGM(0.9): P(U->V) = {fgm.prob_u_to_v:.3f}")

# with swapped columns and mirrored seeds the chains are exchanged exactly
_, mirrored = estimate_bayesian(ps.swapped(), PriorSpec(), cfg, mirror_seeds=True)
print(f"mirrored: P(U->V) = {mirrored.prob_u_to_v:.3f}")
