"""Discrete-ensemble dynamics: canonical distributions and the KL gradient flow.

The flow

    d q_i / dt = q_i ( -ln(q_i / q2_i) + D(q || q2) )

relaxes a distribution toward ``q2`` while its Kullback-Leibler divergence
decreases; its closed-form solution interpolates log-linearly,

    q_i(t) ∝ exp( e^{-t} ln q0_i + (1 - e^{-t}) ln q2_i ).

Canonical ensembles ``p_i(beta) = e^{-beta E_i} / Z`` trace exactly this flow
under ``beta = e^{-t}`` with ``q0 = p(beta=1)`` and ``q2`` uniform, which is
where the double-exponential time dependence (and the Gompertz structure of
the un-normalized solution) comes from.

All probability arithmetic runs in log space with max-shift normalization so
large ``beta`` does not underflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, DomainError
from .integrate import IntegratorConfig, output_times, resolve_steps

#: probabilities below this abort a flow instead of silently renormalizing
MIN_PROBABILITY = 1e-300


def _as_levels(levels) -> np.ndarray:
    levels = np.asarray(levels, dtype=float)
    if levels.ndim != 1 or levels.size == 0:
        raise ConfigError("energy levels must be a nonempty vector")
    if not np.all(np.isfinite(levels)):
        raise ConfigError("energy levels must be finite")
    return levels


def _as_distribution(p, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ConfigError(f"{name} must be a nonempty vector")
    if not np.all(np.isfinite(p)) or np.any(p <= 0.0):
        raise DomainError(f"{name} must be strictly positive, got {p.tolist()}")
    total = float(np.sum(p))
    if abs(total - 1.0) > 1e-9:
        raise DomainError(f"{name} must sum to 1 within 1e-9, got {total!r}")
    return p / total


@dataclass(frozen=True)
class DiscreteEnsemble:
    """A canonical ensemble: probabilities, energy levels, and coldness."""

    probs: np.ndarray
    levels: np.ndarray
    beta: float

    def __post_init__(self):
        probs = _as_distribution(self.probs, "probs")
        levels = _as_levels(self.levels)
        if probs.size != levels.size:
            raise ConfigError("probs and levels must have equal length")
        if levels.size > 1 and not np.all(np.diff(levels) > 0.0):
            raise ConfigError("energy levels must be strictly increasing")
        if self.beta < 0.0:
            raise ConfigError(f"ensemble coldness must be nonnegative, got {self.beta}")
        probs.setflags(write=False)
        levels.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "levels", levels)

    @classmethod
    def canonical(cls, levels, beta: float) -> "DiscreteEnsemble":
        levels = _as_levels(levels)
        return cls(probs=canonical_distribution(levels, beta), levels=levels, beta=beta)


@dataclass(frozen=True)
class FlowEndpoints:
    """Start and target distributions of one KL flow (identical support)."""

    q0: np.ndarray
    q2: np.ndarray

    def __post_init__(self):
        q0 = _as_distribution(self.q0, "q0")
        q2 = _as_distribution(self.q2, "q2")
        if q0.size != q2.size:
            raise DomainError("endpoint supports differ in size")
        q0.setflags(write=False)
        q2.setflags(write=False)
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "q2", q2)

    @property
    def size(self) -> int:
        return self.q0.size


def _warn_negative_beta(beta: float):
    if beta < 0.0:
        warnings.warn(
            f"beta={beta} < 0: outside the coldness range the ensemble assumes",
            RuntimeWarning,
            stacklevel=3,
        )


def log_partition_function(levels, beta: float) -> float:
    """``ln Z`` via max-shifted summation (stable at large beta)."""
    levels = _as_levels(levels)
    _warn_negative_beta(beta)
    x = -beta * levels
    shift = float(np.max(x))
    return shift + math.log(float(np.sum(np.exp(x - shift))))


def partition_function(levels, beta: float) -> float:
    """``Z = sum_i exp(-beta E_i)``."""
    return math.exp(log_partition_function(levels, beta))


def canonical_distribution(levels, beta: float) -> np.ndarray:
    """``p_i = exp(-beta E_i) / Z``; uniform in the high-temperature limit."""
    levels = _as_levels(levels)
    _warn_negative_beta(beta)
    x = -beta * levels
    x -= np.max(x)
    w = np.exp(x)
    return w / np.sum(w)


def average_energy(levels, beta: float) -> float:
    """``U = sum_i p_i E_i``, which equals ``-d ln Z / d beta``."""
    levels = _as_levels(levels)
    return float(np.dot(canonical_distribution(levels, beta), levels))


def kl_divergence(p, q) -> float:
    """``D(p || q) = sum_i p_i ln(p_i / q_i)``; nonnegative, zero iff equal."""
    p = _as_distribution(p, "p")
    q = _as_distribution(q, "q")
    if p.size != q.size:
        raise DomainError("KL divergence needs identical supports")
    return float(np.dot(p, np.log(p) - np.log(q)))


def kl_flow_rhs(q, endpoints: FlowEndpoints) -> np.ndarray:
    """Right-hand side ``q_i (-ln(q_i/q2_i) + D(q || q2))``.

    The components sum to zero, so normalization is preserved by the flow.
    """
    q = _as_distribution(q, "q")
    if q.size != endpoints.size:
        raise DomainError("distribution does not match the endpoint support")
    log_ratio = np.log(q) - np.log(endpoints.q2)
    div = float(np.dot(q, log_ratio))
    return q * (-log_ratio + div)


def unnormalized_flow(t: float, endpoints: FlowEndpoints) -> np.ndarray:
    """``Q_i(t) = exp(e^{-t} ln q0_i + (1 - e^{-t}) ln q2_i)`` (no normalization)."""
    w = math.exp(-t)
    return np.exp(w * np.log(endpoints.q0) + (1.0 - w) * np.log(endpoints.q2))


def flow_log_normalizer(t: float, endpoints: FlowEndpoints) -> float:
    """Normalization exponent of the closed-form solution (max-shifted)."""
    w = math.exp(-t)
    x = w * np.log(endpoints.q0) + (1.0 - w) * np.log(endpoints.q2)
    shift = float(np.max(x))
    return shift + math.log(float(np.sum(np.exp(x - shift))))


def closed_form_q(t: float, endpoints: FlowEndpoints) -> np.ndarray:
    """Closed-form flow distribution at parameter ``t``.

    Interpolates from ``q0`` at ``t = 0`` to ``q2`` as ``t -> inf``; negative
    ``t`` is allowed (the formula stays normalizable).
    """
    w = math.exp(-t)
    x = w * np.log(endpoints.q0) + (1.0 - w) * np.log(endpoints.q2)
    x -= np.max(x)
    e = np.exp(x)
    return e / np.sum(e)


def integrate_discrete_flow(
    endpoints: FlowEndpoints,
    t_span,
    cfg: IntegratorConfig | None = None,
) -> list[tuple[float, np.ndarray]]:
    """RK4 integration of the KL flow with per-step renormalization.

    Returns ``(t, distribution)`` samples.  A probability that underflows
    ``1e-300`` or a normalization drift beyond the guard tolerance aborts
    with an integration error rather than renormalizing silently.
    """
    cfg = cfg or IntegratorConfig()
    if cfg.method != "rk4":
        raise ConfigError("the discrete flow integrates with fixed-step rk4 only")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (math.isfinite(t0) and math.isfinite(t1)):
        raise ConfigError(f"span must be finite, got {t_span}")
    if t1 < t0:
        raise ConfigError("discrete flow spans must be nondecreasing")
    step, out = resolve_steps(cfg, (t0, t1), default_step=1e-3)
    times = output_times(t0, t1, out)
    qs = kernels.run_rk4(
        kernels.KL, endpoints.q0, np.log(endpoints.q2), t0, t1, step, times
    )
    return [(float(times[i]), qs[i]) for i in range(times.size)]


def canonical_flow_residual(levels, t: float) -> np.ndarray:
    """Componentwise defect of the canonical-ensemble flow identity.

    Left side: the analytic derivative ``d/dt ln(p_i(e^{-t}) / p0_i)``, which
    equals ``beta (E_i - U(beta))`` at ``beta = e^{-t}``.  Right side:
    ``-(ln(p_i/p0_i) - sum_j p_j ln(p_j/p0_j))`` with ``p0`` uniform.  The
    two agree identically, so the residual is pure rounding.
    """
    levels = _as_levels(levels)
    beta = math.exp(-t)
    p = canonical_distribution(levels, beta)
    u = float(np.dot(p, levels))
    lhs = beta * (levels - u)
    log_ratio = np.log(p) + math.log(levels.size)  # ln(p_i / (1/N))
    rhs = -(log_ratio - float(np.dot(p, log_ratio)))
    return lhs - rhs


def gompertz(t, K: float, c: float):
    """Gompertz function ``K exp(c e^{-t})``; tends to ``K`` as ``t -> inf``."""
    if not K > 0.0:
        raise ConfigError(f"Gompertz asymptote K must be positive, got {K}")
    return K * np.exp(c * np.exp(-np.asarray(t, dtype=float)))


def gompertz_residual(t: float, K: float, c: float) -> float:
    """Defect ``f'(t) + f ln(f/K)`` with the analytic derivative; identically 0."""
    f = float(gompertz(t, K, c))
    fprime = -c * math.exp(-t) * f
    return fprime + f * math.log(f / K)
