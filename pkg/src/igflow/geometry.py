"""Metrics from vielbein fields, eikonal defects, Hessian metrics, arc lengths.

A vielbein ``e_i^mu(q)`` (orthogonal-frame row index ``i``, coordinate column
index ``mu``) together with a positive diagonal scale tensor ``eta`` defines
the inverse metric and the metric

    g^{mu nu}(q) = sum_i  eta_upper[i] * e_i^mu * e_i^nu
    g_{mu nu}(q) = sum_i  eta_lower[i] * einv_mu^i * einv_nu^i

where ``einv`` is the matrix inverse of ``e``.  Because both are Gram
matrices of an invertible factor they are symmetric positive definite and
exact mutual inverses wherever the vielbein is invertible.

The other operations here evaluate the quadratic defect
``g^{mu nu} p_mu p_nu - E^2`` of the equation-of-state system, Hessian
(negentropy) metrics by central second differences, and discrete arc lengths
``sum sqrt(dq . g . dq)`` along trajectories.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError

#: Determinant magnitude below which a vielbein is treated as singular.
SINGULAR_EPS = 1e-12

#: Mixed-partial asymmetry above which a warning is emitted (never an error).
MIXED_PARTIAL_WARN = 1e-5


@dataclass(frozen=True)
class VielbeinField:
    """An invertible matrix field ``q -> e_i^mu(q)``.

    Parameters
    ----------
    dim : int
        Number of coordinates N (matrix is N x N).
    matrix_fn : callable
        Maps a length-N coordinate array to the N x N vielbein matrix with
        orthogonal-frame rows and coordinate columns.
    name : str
        Optional label used in error messages.
    """

    dim: int
    matrix_fn: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigError(f"vielbein dimension must be >= 1, got {self.dim}")

    def at(self, q: np.ndarray) -> np.ndarray:
        """Evaluate the vielbein, rejecting singular or non-finite results."""
        q = np.asarray(q, dtype=float)
        if q.shape != (self.dim,):
            raise ConfigError(
                f"vielbein {self.name!r} expects {self.dim} coordinates, got shape {q.shape}"
            )
        e = np.asarray(self.matrix_fn(q), dtype=float)
        if e.shape != (self.dim, self.dim):
            raise ConfigError(
                f"vielbein {self.name!r} returned shape {e.shape}, expected {(self.dim, self.dim)}"
            )
        if not np.all(np.isfinite(e)):
            raise DomainError(f"vielbein {self.name!r} is not finite at q={q.tolist()}")
        if abs(np.linalg.det(e)) <= SINGULAR_EPS:
            raise DomainError(f"singular vielbein at q={q.tolist()}")
        return e

    def inverse_at(self, q: np.ndarray) -> np.ndarray:
        return np.linalg.inv(self.at(q))


@dataclass(frozen=True)
class DiagonalScale:
    """Positive diagonal scale tensor; inverse is the entrywise reciprocal.

    ``values`` holds the lower-index entries (alpha^2, beta^2, ...); the
    upper-index tensor is ``1 / values``.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ConfigError("diagonal scale must be a 1-d vector")
        if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
            raise ConfigError(f"diagonal scale entries must be positive, got {v.tolist()}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def pair(cls, alpha2: float, beta2: float) -> "DiagonalScale":
        return cls(np.array([alpha2, beta2], dtype=float))

    @property
    def dim(self) -> int:
        return self.values.size

    @property
    def upper(self) -> np.ndarray:
        return 1.0 / self.values

    @property
    def alpha2(self) -> float:
        return float(self.values[0])

    @property
    def beta2(self) -> float:
        if self.dim < 2:
            raise ConfigError("beta2 undefined for a 1-d scale")
        return float(self.values[1])


@dataclass(frozen=True)
class MetricAt:
    """Metric and inverse metric at one point, validated on construction."""

    g: np.ndarray
    g_inv: np.ndarray
    #: tolerance for |g.g_inv - I|, scaled by the matrix magnitudes
    product_tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        gi = np.asarray(self.g_inv, dtype=float)
        n = g.shape[0]
        if g.shape != (n, n) or gi.shape != (n, n):
            raise ConfigError("metric and inverse must be square and same shape")
        scale = max(1.0, float(np.max(np.abs(g))), float(np.max(np.abs(gi))))
        if np.max(np.abs(g - g.T)) > 1e-12 * scale or np.max(np.abs(gi - gi.T)) > 1e-12 * scale:
            raise DomainError("metric is not symmetric")
        if np.max(np.abs(g @ gi - np.eye(n))) > self.product_tol * scale:
            raise DomainError("metric and inverse are not consistent")
        if np.min(np.linalg.eigvalsh(g)) <= 0.0:
            raise DomainError("metric is not positive definite")
        g = g.copy()
        gi = gi.copy()
        g.setflags(write=False)
        gi.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "g_inv", gi)

    @property
    def dim(self) -> int:
        return self.g.shape[0]


def metric_from_vielbein(e: np.ndarray, eta: DiagonalScale, q: np.ndarray | None = None) -> MetricAt:
    """Build the metric pair from an evaluated vielbein matrix.

    Parameters
    ----------
    e : ndarray
        The N x N vielbein matrix at one point (frame rows, coordinate
        columns).
    eta : DiagonalScale
        Diagonal scale tensor of matching dimension.
    q : ndarray, optional
        The evaluation point, used only to make error messages name the
        offending state.

    Returns
    -------
    MetricAt
        Both ``g_{mu nu}`` and ``g^{mu nu}``; their product is the identity
        to within the validation tolerance.
    """
    e = np.asarray(e, dtype=float)
    n = e.shape[0]
    if e.shape != (n, n):
        raise ConfigError("vielbein matrix must be square")
    if eta.dim != n:
        raise ConfigError(f"scale dimension {eta.dim} does not match vielbein dimension {n}")
    where = f" at q={np.asarray(q, dtype=float).tolist()}" if q is not None else ""
    if not np.all(np.isfinite(e)):
        raise DomainError(f"vielbein is not finite{where}")
    if abs(np.linalg.det(e)) <= SINGULAR_EPS:
        raise DomainError(f"singular vielbein{where}")
    e_inv = np.linalg.inv(e)
    g_inv = e.T @ (eta.upper[:, None] * e)
    g = e_inv @ (eta.values[:, None] * e_inv.T)
    # symmetrize away the rounding of the two matrix products
    g_inv = 0.5 * (g_inv + g_inv.T)
    g = 0.5 * (g + g.T)
    return MetricAt(g=g, g_inv=g_inv)


def metric_at(field_: VielbeinField, eta: DiagonalScale, q: np.ndarray) -> MetricAt:
    """Evaluate a vielbein field and build the metric pair at ``q``."""
    q = np.asarray(q, dtype=float)
    return metric_from_vielbein(field_.at(q), eta, q=q)


def eikonal_residual(g_inv, p: np.ndarray, energy: float) -> float:
    """Quadratic defect ``g^{mu nu} p_mu p_nu - E^2``.

    Zero exactly when the equation-of-state system (the generalized eikonal
    relation) holds at this point.  ``g_inv`` may be a :class:`MetricAt` or a
    raw inverse-metric matrix.
    """
    gi = g_inv.g_inv if isinstance(g_inv, MetricAt) else np.asarray(g_inv, dtype=float)
    p = np.asarray(p, dtype=float)
    if gi.shape != (p.size, p.size):
        raise ConfigError("momentum dimension does not match metric dimension")
    return float(p @ gi @ p - energy * energy)


def ruppeiner_metric(entropy: Callable[[np.ndarray], float], q: np.ndarray, h=None) -> np.ndarray:
    """Hessian of the negentropy ``-s`` by central second differences.

    Parameters
    ----------
    entropy : callable
        Maps a length-N coordinate array to the scalar entropy.  Domain
        guards inside the callable propagate, so points closer than the
        stencil width to the domain boundary fail as domain errors.
    q : ndarray
        Evaluation point, interior to the admissible domain.
    h : float or ndarray, optional
        Per-coordinate step; defaults to ``1e-4 * max(1, |q_i|)``.

    Returns
    -------
    ndarray
        Symmetric N x N matrix.  The two finite-difference orderings of each
        mixed partial are averaged; an asymmetry beyond 1e-5 is reported as a
        warning, not an error.
    """
    q = np.asarray(q, dtype=float)
    n = q.size
    if h is None:
        hs = 1e-4 * np.maximum(1.0, np.abs(q))
    else:
        hs = np.broadcast_to(np.asarray(h, dtype=float), (n,)).copy()
    if np.any(hs <= 0.0):
        raise ConfigError("finite-difference step must be positive")

    def f(x):
        return -float(entropy(x))

    hess = np.empty((n, n))
    f0 = f(q)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = hs[i]
        hess[i, i] = (f(q + ei) - 2.0 * f0 + f(q - ei)) / (hs[i] * hs[i])
    for i in range(n):
        for j in range(i + 1, n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = hs[i]
            ej[j] = hs[j]
            fpp = f(q + ei + ej)
            fpm = f(q + ei - ej)
            fmp = f(q - ei + ej)
            fmm = f(q - ei - ej)
            denom = 4.0 * hs[i] * hs[j]
            m_ij = ((fpp - fmp) - (fpm - fmm)) / denom
            m_ji = ((fpp - fpm) - (fmp - fmm)) / denom
            if abs(m_ij - m_ji) > MIXED_PARTIAL_WARN:
                warnings.warn(
                    f"mixed-partial asymmetry {abs(m_ij - m_ji):.3e} at q={q.tolist()} "
                    f"exceeds {MIXED_PARTIAL_WARN:g}",
                    RuntimeWarning,
                    stacklevel=2,
                )
            hess[i, j] = hess[j, i] = 0.5 * (m_ij + m_ji)
    return hess


def arc_length(traj, metric_field: Callable[[np.ndarray], MetricAt]) -> float:
    """Discrete arc length ``sum sqrt(dq . g(q_mid) . dq)`` along a trajectory.

    For an on-shell Hamilton-flow trajectory this equals the elapsed flow
    parameter.  Additive over concatenation; converges as the sampling is
    refined.
    """
    qs = traj.qs
    if len(qs) < 2:
        return 0.0
    total = 0.0
    for k in range(len(qs) - 1):
        dq = qs[k + 1] - qs[k]
        mid = 0.5 * (qs[k + 1] + qs[k])
        g = metric_field(mid).g
        quad = float(dq @ g @ dq)
        if quad < 0.0:
            raise DomainError(f"metric not positive along segment {k}")
        total += np.sqrt(quad)
    return total
