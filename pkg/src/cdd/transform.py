"""Rank transform of paired measurements onto the open unit square."""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

MIN_OBSERVATIONS = 10


@dataclass(frozen=True)
class PairedSample:
    """Raw paired measurements of two variables.

    Parameters
    ----------
    x1, x2 : array_like
        Observations of the first and second variable, equal length n >= 10.
    labels : tuple of str
        Short identifiers for the two variables (e.g. gene names).
    """

    x1: np.ndarray
    x2: np.ndarray
    labels: tuple = ("X1", "X2")

    def __post_init__(self):
        x1 = np.asarray(self.x1, dtype=float).ravel()
        x2 = np.asarray(self.x2, dtype=float).ravel()
        if x1.shape != x2.shape:
            raise ValueError(f"x1 and x2 differ in length ({x1.size} vs {x2.size})")
        if x1.size < MIN_OBSERVATIONS:
            raise ValueError(
                f"at least {MIN_OBSERVATIONS} observations are required, got {x1.size}")
        if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
            raise ValueError("paired sample contains non-finite values")
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if len(self.labels) != 2:
            raise ValueError("labels must hold exactly two identifiers")

    @property
    def n(self):
        return self.x1.size

    def swapped(self):
        """Return the same sample with the two variables exchanged."""
        return PairedSample(self.x2, self.x1, self.labels[::-1])


@dataclass(frozen=True)
class PseudoSample:
    """Pseudo-observations (u, v), every element strictly inside (0, 1)."""

    u: np.ndarray
    v: np.ndarray
    labels: tuple = field(default=("U", "V"))

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).ravel()
        v = np.asarray(self.v, dtype=float).ravel()
        if u.shape != v.shape:
            raise ValueError(f"u and v differ in length ({u.size} vs {v.size})")
        if u.size == 0:
            raise ValueError("pseudo sample is empty")
        for name, arr in (("u", u), ("v", v)):
            if not np.all((arr > 0.0) & (arr < 1.0)):
                raise ValueError(f"{name} must lie strictly inside (0, 1)")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def n(self):
        return self.u.size

    def swapped(self):
        return PseudoSample(self.v, self.u, self.labels[::-1])


def pseudo_observations(x):
    """Mid-ranks of `x` divided by ``len(x) + 1``.

    No minimum length is enforced here; see :func:`to_pseudo_observations`.
    """
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite values")
    return rankdata(x, method="average") / (x.size + 1.0)


def to_pseudo_observations(sample):
    """Map a :class:`PairedSample` to its :class:`PseudoSample`.

    Each coordinate becomes ``rank / (n + 1)`` with tied values sharing
    their average rank, so outputs stay in ``[1/(n+1), n/(n+1)]``.
    """
    if not isinstance(sample, PairedSample):
        raise TypeError("expected a PairedSample")
    return PseudoSample(pseudo_observations(sample.x1),
                        pseudo_observations(sample.x2),
                        sample.labels)
