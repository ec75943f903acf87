"""Copula families with known dependence functionals, used as ground truth.

Independence, Farlie-Gumbel-Morgenstern and Gaussian copulas have closed
forms for Spearman's rho, and the first two also for the conditional mean
``E[V | U = u]``. :class:`AsymmetricBeta` is a generator (not a copula)
that draws the response from the beta regression model itself, so the
generating direction is known.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import expit, ndtr, ndtri

from .betareg import Direction
from .transform import PairedSample, PseudoSample

_EPSABS = 1e-11
_EPSREL = 1e-11


@dataclass(frozen=True)
class Independence:
    def cdf(self, u, v):
        return u * v

    def h_u(self, u, v):
        """P(V <= v | U = u)."""
        return np.asarray(v, dtype=float) + 0.0 * u

    def h_v(self, u, v):
        """P(U <= u | V = v)."""
        return np.asarray(u, dtype=float) + 0.0 * v

    def spearman(self):
        return 0.0


@dataclass(frozen=True)
class FGM:
    """``C(u, v) = uv[1 + theta (1 - u)(1 - v)]`` with theta in [-1, 1]."""

    theta: float

    def __post_init__(self):
        if not -1.0 <= self.theta <= 1.0:
            raise ValueError(f"FGM theta must lie in [-1, 1], got {self.theta}")

    def cdf(self, u, v):
        return u * v * (1.0 + self.theta * (1.0 - u) * (1.0 - v))

    def h_u(self, u, v):
        return v * (1.0 + self.theta * (1.0 - 2.0 * u) * (1.0 - v))

    def h_v(self, u, v):
        return self.h_u(v, u)

    def spearman(self):
        return self.theta / 3.0

    def conditional_mean(self, u):
        return 0.5 - self.theta * (1.0 - 2.0 * u) / 6.0


@dataclass(frozen=True)
class GaussianCopula:
    rho: float

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"Gaussian copula rho must lie in (-1, 1), got {self.rho}")

    def h_u(self, u, v):
        s = np.sqrt(1.0 - self.rho ** 2)
        return ndtr((ndtri(v) - self.rho * ndtri(u)) / s)

    def h_v(self, u, v):
        return self.h_u(v, u)

    def spearman(self):
        return 6.0 / np.pi * np.arcsin(self.rho / 2.0)


@dataclass(frozen=True)
class AsymmetricBeta:
    """Covariate uniform, response ``Beta(mu kappa, (1 - mu) kappa)`` with
    ``mu = logistic(beta0 + beta1 * covariate)``.

    `direction` names the generating direction: ``U_TO_V`` makes the first
    variable the covariate.
    """

    beta0: float
    beta1: float
    kappa: float
    direction: Direction = Direction.U_TO_V

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        object.__setattr__(self, "direction", Direction(self.direction))


COPULA_FAMILIES = (Independence, FGM, GaussianCopula)


def _draw_pair(spec, n, rng):
    if isinstance(spec, Independence):
        return rng.random(n), rng.random(n)
    if isinstance(spec, FGM):
        u, w = rng.random(n), rng.random(n)
        # invert h_u(u, .) = w: A v^2 - (1 + A) v + w = 0 with A = theta(1 - 2u)
        A = spec.theta * (1.0 - 2.0 * u)
        disc = np.sqrt((1.0 + A) ** 2 - 4.0 * A * w)
        return u, 2.0 * w / (1.0 + A + disc)
    if isinstance(spec, GaussianCopula):
        z = rng.standard_normal((n, 2))
        z[:, 1] = spec.rho * z[:, 0] + np.sqrt(1.0 - spec.rho ** 2) * z[:, 1]
        return ndtr(z[:, 0]), ndtr(z[:, 1])
    if isinstance(spec, AsymmetricBeta):
        x = rng.random(n)
        mu = expit(spec.beta0 + spec.beta1 * x)
        y = rng.beta(mu * spec.kappa, (1.0 - mu) * spec.kappa)
        # beta draws can round to the boundary at small shape parameters
        y = np.clip(y, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
        if spec.direction is Direction.U_TO_V:
            return x, y
        return y, x
    raise TypeError(f"unsupported spec {spec!r}")


def sample(spec, n, seed=None):
    """Draw `n` iid pairs from `spec` as a :class:`PseudoSample`.

    For :class:`AsymmetricBeta` the response margin is only approximately
    uniform.
    """
    u, v = _draw_pair(spec, int(n), np.random.default_rng(seed))
    return PseudoSample(u, v)


def generate_directed(spec, n, seed=None):
    """Raw :class:`PairedSample` from an :class:`AsymmetricBeta` generator.

    Labels record the ground truth: ``("cause", "effect")`` when the first
    variable drives the second, ``("effect", "cause")`` otherwise.
    """
    if not isinstance(spec, AsymmetricBeta):
        raise TypeError("generate_directed needs an AsymmetricBeta spec")
    u, v = _draw_pair(spec, int(n), np.random.default_rng(seed))
    labels = ("cause", "effect") if spec.direction is Direction.U_TO_V else ("effect", "cause")
    return PairedSample(u, v, labels)


def _check_copula(spec):
    if not isinstance(spec, COPULA_FAMILIES):
        raise TypeError(f"{type(spec).__name__} has no copula function")


def conditional_mean_numeric(spec, x, direction=Direction.U_TO_V):
    """``1 - integral_0^1 C_x(t) dt``: the mean of the response given the
    covariate equals `x`, by quadrature of the conditional distribution.
    """
    _check_copula(spec)
    if not 0.0 < x < 1.0:
        raise ValueError(f"covariate must lie strictly inside (0, 1), got {x}")
    if Direction(direction) is Direction.U_TO_V:
        h = lambda t: spec.h_u(x, t)
    else:
        h = lambda t: spec.h_v(t, x)
    val, _ = integrate.quad(h, 0.0, 1.0, epsabs=_EPSABS, epsrel=_EPSREL, limit=200)
    return 1.0 - val


def _moments_of_conditional_mean(spec, direction):
    r = lambda x: conditional_mean_numeric(spec, x, direction)
    m1, _ = integrate.quad(r, 0.0, 1.0, epsabs=1e-10, epsrel=1e-10, limit=200)
    m2, _ = integrate.quad(lambda x: r(x) ** 2, 0.0, 1.0, epsabs=1e-10, epsrel=1e-10, limit=200)
    return m1, m2


def rho2_numeric(spec, direction=Direction.U_TO_V, form="second_moment"):
    """Directional dependence of a copula by quadrature.

    ``form="second_moment"`` evaluates ``12 E[r^2] - 3`` and
    ``form="variance"`` evaluates ``12 Var(r)``, where ``r`` is the
    conditional mean of the response given the covariate.
    """
    _check_copula(spec)
    m1, m2 = _moments_of_conditional_mean(spec, direction)
    if form == "second_moment":
        return 12.0 * m2 - 3.0
    if form == "variance":
        return 12.0 * (m2 - m1 ** 2)
    raise ValueError(f"unknown form {form!r}")


def spearman_numeric(spec):
    """Spearman's rho ``12 * integral C(u, v) du dv - 3`` by quadrature.

    Families without a cheap closed-form ``C`` use
    ``integral C du dv = integral (1 - u) C_u(v) du dv``.
    """
    _check_copula(spec)
    if hasattr(spec, "cdf"):
        f = lambda v, u: spec.cdf(u, v)
    else:
        f = lambda v, u: (1.0 - u) * spec.h_u(u, v)
    val, _ = integrate.dblquad(f, 0.0, 1.0, 0.0, 1.0, epsabs=1e-10, epsrel=1e-10)
    return 12.0 * val - 3.0
