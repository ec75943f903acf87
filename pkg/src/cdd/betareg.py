"""Beta regression kernel in mean/precision form with a logit mean link.

The response of one conditional direction is modelled as
``Beta(mu * kappa, (1 - mu) * kappa)`` with ``mu = logistic(beta0 + beta1 * x)``.
The precision is either a free positive constant or derived from the same
linear predictor as ``kappa = 1 + exp(beta0 + beta1 * x)``.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, expit, gammaln

# Link-derived precision ceiling; past this the density is numerically a point mass.
KAPPA_MAX = 1e8
_ETA_CLIP = 700.0
_KAPPA_MIN = np.nextafter(1.0, 2.0)


class Direction(str, enum.Enum):
    """Which variable acts as covariate in a conditional model."""

    U_TO_V = "U_to_V"  # V | U, covariate u
    V_TO_U = "V_to_U"  # U | V, covariate v

    @property
    def reverse(self):
        return Direction.V_TO_U if self is Direction.U_TO_V else Direction.U_TO_V


@dataclass(frozen=True)
class BetaRegCoefficients:
    """Intercept, slope and precision specification of one conditional model.

    ``kappa=None`` means the precision is link-derived; a positive float
    fixes a free precision shared by every observation.
    """

    beta0: float
    beta1: float
    kappa: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.beta0) and np.isfinite(self.beta1)):
            raise ValueError("beta0 and beta1 must be finite")
        if self.kappa is not None and not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"free kappa must be positive, got {self.kappa}")

    @property
    def link_derived(self):
        return self.kappa is None


def split_direction(ps, direction):
    """Return ``(response, covariate)`` arrays for `direction`."""
    direction = Direction(direction)
    if direction is Direction.U_TO_V:
        return ps.v, ps.u
    return ps.u, ps.v


def _linear_predictor(coef, covariate):
    return coef.beta0 + coef.beta1 * np.asarray(covariate, dtype=float)


def inv_logit_mean(coef, covariate):
    """Conditional mean ``logistic(beta0 + beta1 * covariate)``."""
    return expit(_linear_predictor(coef, covariate))


def link_precision(coef, covariate):
    """Link-derived precision ``1 + exp(beta0 + beta1 * covariate)``.

    Clamped to ``(1, KAPPA_MAX]``.
    """
    if not coef.link_derived:
        raise ValueError("coefficients carry a free kappa; use coef.kappa")
    eta = np.minimum(_linear_predictor(coef, covariate), _ETA_CLIP)
    return np.clip(1.0 + np.exp(eta), _KAPPA_MIN, KAPPA_MAX)


def precision(coef, covariate):
    """Per-observation precision for either kappa specification."""
    if coef.link_derived:
        return link_precision(coef, covariate)
    return np.full(np.shape(covariate), float(coef.kappa))


def _beta_logpdf(y, a, b, log_y, log_1my):
    return gammaln(a + b) - gammaln(a) - gammaln(b) + (a - 1.0) * log_y + (b - 1.0) * log_1my


def beta_log_density(y, mu, kappa):
    """Log density of the mean/precision beta distribution.

    Parameters
    ----------
    y : float or array_like
        Points in (0, 1).
    mu : float or array_like
        Means in (0, 1).
    kappa : float or array_like
        Positive precisions.

    Returns
    -------
    float or ndarray
        ``log Gamma(kappa) - log Gamma(mu kappa) - log Gamma((1-mu) kappa)
        + (mu kappa - 1) log y + ((1-mu) kappa - 1) log(1-y)``.
    """
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    if not np.all((y > 0) & (y < 1)):
        raise ValueError("y must lie strictly inside (0, 1)")
    if not np.all((mu > 0) & (mu < 1)):
        raise ValueError("mu must lie strictly inside (0, 1)")
    if not np.all(kappa > 0):
        raise ValueError("kappa must be positive")
    a = mu * kappa
    b = (1.0 - mu) * kappa
    out = _beta_logpdf(y, a, b, np.log(y), np.log1p(-y))
    return out[()] if out.ndim == 0 else out


def direction_log_likelihood(ps, direction, coef):
    """Log-likelihood of one conditional beta regression on `ps`."""
    y, x = split_direction(ps, direction)
    return float(np.sum(beta_log_density(y, inv_logit_mean(coef, x), precision(coef, x))))


def direction_score(ps, direction, coef):
    """Analytic gradient of :func:`direction_log_likelihood`.

    Returns the derivative with respect to ``(beta0, beta1)`` and, for a
    free precision, additionally with respect to ``kappa``.
    """
    y, x = split_direction(ps, direction)
    eta = _linear_predictor(coef, x)
    mu = expit(eta)
    kappa = precision(coef, x)
    a = mu * kappa
    b = (1.0 - mu) * kappa
    psi_ab = digamma(kappa)
    d_a = psi_ab - digamma(a) + np.log(y)
    d_b = psi_ab - digamma(b) + np.log1p(-y)
    dmu = mu * (1.0 - mu)
    if coef.link_derived:
        raw = 1.0 + np.exp(np.minimum(eta, _ETA_CLIP))
        dkappa = np.where((raw > _KAPPA_MIN) & (raw < KAPPA_MAX), raw - 1.0, 0.0)
    else:
        dkappa = np.zeros_like(eta)
    d_eta = d_a * (dmu * kappa + mu * dkappa) + d_b * (-dmu * kappa + (1.0 - mu) * dkappa)
    grad = [np.sum(d_eta), np.sum(d_eta * x)]
    if not coef.link_derived:
        grad.append(np.sum(d_a * mu + d_b * (1.0 - mu)))
    return np.array(grad)


def rho_squared_from_means(fitted_means, axis=-1):
    """Directional dependence ``12 * Var(fitted_means)`` (population variance).

    The value is reported raw; it is not clipped to [0, 1].
    """
    m = np.asarray(fitted_means, dtype=float)
    if m.size == 0:
        raise ValueError("fitted_means is empty")
    out = 12.0 * np.var(m, axis=axis)
    # the rounded mean of identical values can leave a spurious variance
    out = np.where(np.ptp(m, axis=axis) == 0, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out
