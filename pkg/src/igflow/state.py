"""Phase states and sampled trajectories.

Both types are immutable after construction: arrays are copied and marked
read-only, so values are safe to share between concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


def _frozen_array(values, name: str) -> np.ndarray:
    a = np.array(values, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ConfigError(f"{name} must be finite, got {a.tolist()}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PhaseState:
    """Extensive coordinates ``q`` paired with intensive momenta ``p``.

    For the gas models ``q = (u, v)`` (energy and volume per molecule) and
    ``p = (1/T, P/T)``.  Off-shell momenta are permitted; on-shell states are
    the ones satisfying ``e(q) . p = r`` for their model.
    """

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen_array(self.q, "q"))
        object.__setattr__(self, "p", _frozen_array(self.p, "p"))
        if self.q.ndim != 1 or self.q.shape != self.p.shape:
            raise ConfigError(
                f"q and p must be 1-d vectors of equal length, got {self.q.shape} and {self.p.shape}"
            )

    @property
    def dim(self) -> int:
        return self.q.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_vector(cls, y: np.ndarray) -> "PhaseState":
        y = np.asarray(y, dtype=float)
        if y.size % 2:
            raise ConfigError("phase vector length must be even")
        n = y.size // 2
        return cls(q=y[:n], p=y[n:])


class Trajectory:
    """Ordered samples from one integration run.

    Attributes
    ----------
    parameter_kind : str
        ``"tau"`` for Hamilton flows, ``"t"`` for gradient flows.
    params : ndarray, shape (n,)
        Strictly increasing parameter values.
    qs, ps : ndarray, shape (n, N)
        Coordinates and momenta at each sample.
    eikonal_residuals : ndarray or None
        Per-sample quadratic defect ``g^{uv} p_u p_v - E^2`` (Hamilton runs).
    metadata : dict
        Model name, conserved energy, config hash, and similar run info.
    """

    __slots__ = ("parameter_kind", "params", "qs", "ps", "eikonal_residuals", "metadata")

    def __init__(self, parameter_kind, params, qs, ps, eikonal_residuals=None, metadata=None):
        if parameter_kind not in ("tau", "t"):
            raise ConfigError(f"parameter_kind must be 'tau' or 't', got {parameter_kind!r}")
        params = _frozen_array(params, "params")
        qs = _frozen_array(qs, "qs")
        ps = _frozen_array(ps, "ps")
        if params.ndim != 1 or qs.ndim != 2 or qs.shape != ps.shape or qs.shape[0] != params.size:
            raise ConfigError("trajectory arrays have inconsistent shapes")
        if params.size == 0:
            raise ConfigError("trajectory must hold at least one sample")
        if params.size > 1 and not np.all(np.diff(params) > 0.0):
            raise ConfigError("trajectory parameter values must be strictly increasing")
        self.parameter_kind = parameter_kind
        self.params = params
        self.qs = qs
        self.ps = ps
        if eikonal_residuals is not None:
            eikonal_residuals = _frozen_array(eikonal_residuals, "eikonal_residuals")
            if eikonal_residuals.shape != params.shape:
                raise ConfigError("eikonal residual array must match the sample count")
        self.eikonal_residuals = eikonal_residuals
        self.metadata = dict(metadata or {})

    def __len__(self) -> int:
        return self.params.size

    def state(self, i: int) -> PhaseState:
        return PhaseState(q=self.qs[i], p=self.ps[i])

    @property
    def samples(self):
        """List of ``(parameter value, PhaseState)`` pairs."""
        return [(float(self.params[i]), self.state(i)) for i in range(len(self))]

    @property
    def first_state(self) -> PhaseState:
        return self.state(0)

    @property
    def last_state(self) -> PhaseState:
        return self.state(len(self) - 1)

    def restrict(self, i0: int, i1: int) -> "Trajectory":
        """Sub-trajectory over the sample index range ``[i0, i1)``."""
        return Trajectory(
            self.parameter_kind,
            self.params[i0:i1],
            self.qs[i0:i1],
            self.ps[i0:i1],
            None if self.eikonal_residuals is None else self.eikonal_residuals[i0:i1],
            self.metadata,
        )

    def with_parameter(self, params, parameter_kind: str) -> "Trajectory":
        """Same samples under a rescaled parameter (used by reparametrization)."""
        return Trajectory(
            parameter_kind, params, self.qs, self.ps, self.eikonal_residuals, self.metadata
        )
