"""Frequentist and Bayesian copula directional dependence."""

__version__ = "0.1.0"

from .betareg import (  # noqa: E402
    BetaRegCoefficients,
    Direction,
    beta_log_density,
    direction_log_likelihood,
    direction_score,
    inv_logit_mean,
    link_precision,
    rho_squared_from_means,
)
from .bayesian import (  # noqa: E402
    BayesianFit,
    McmcConfig,
    PosteriorDraws,
    PriorSpec,
    decide_direction_bayesian,
    estimate_bayesian,
    log_posterior,
    run_chain,
)
from .frequentist import (  # noqa: E402
    Decision,
    FrequentistFit,
    NonConvergence,
    decide_direction_frequentist,
    estimate_frequentist,
    fit_direction_mle,
)
from .transform import PairedSample, PseudoSample, to_pseudo_observations  # noqa: E402
