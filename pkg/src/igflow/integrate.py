"""Shared explicit ODE integration.

Two methods are provided behind one entry point:

* ``rk4``  -- classical fixed-step 4th-order Runge-Kutta (the default);
* ``rk45`` -- adaptive Dormand-Prince 5(4) with step-size control.

Dense output at multiples of ``output_step`` (plus the span endpoints) is
produced by cubic Hermite interpolation between accepted steps, which has the
same O(h^4) accuracy as the RK4 march itself.  All flows in this package are
smooth non-stiff exponentials, so explicit methods are sufficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, IntegrationError

_METHODS = ("rk4", "rk45")


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration controls.

    ``step`` is the fixed RK4 step (flows pick a model-dependent default when
    it is None).  The adaptive method uses ``rtol``/``atol`` with step size
    clipped to ``[min_step, max_step]``.  Samples are emitted every
    ``output_step`` (defaults to span/200, never finer than the step).
    """

    method: str = "rk4"
    step: float | None = None
    output_step: float | None = None
    rtol: float = 1e-9
    atol: float = 1e-12
    min_step: float = 1e-12
    max_step: float = math.inf

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {_METHODS}")
        if self.step is not None and not self.step > 0.0:
            raise ConfigError(f"step must be positive, got {self.step}")
        if self.output_step is not None and not self.output_step > 0.0:
            raise ConfigError(f"output_step must be positive, got {self.output_step}")
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ConfigError("rtol and atol must be positive")
        if not (0.0 < self.min_step < self.max_step):
            raise ConfigError("step bounds must be positive and ordered")
        lower = self.step if self.method == "rk4" and self.step is not None else self.min_step
        if self.output_step is not None and self.output_step < lower:
            raise ConfigError(
                f"output_step {self.output_step} is finer than the integration step {lower}"
            )


def resolve_steps(cfg: IntegratorConfig, span: tuple[float, float], default_step: float):
    """Fill in the step and output step for a concrete run."""
    width = abs(span[1] - span[0])
    step = cfg.step if cfg.step is not None else default_step
    if cfg.output_step is not None:
        out = cfg.output_step
    else:
        out = max(step, width / 200.0) if width > 0.0 else step
    if out < step:
        raise ConfigError(f"output_step {out} is finer than the integration step {step}")
    return step, out


def output_times(t0: float, t1: float, dt_out: float) -> np.ndarray:
    """Multiples of ``dt_out`` from ``t0`` within the span, plus both endpoints."""
    if t1 == t0:
        return np.array([t0], dtype=float)
    direction = 1.0 if t1 > t0 else -1.0
    snap = 1e-9 * max(1.0, abs(t0), abs(t1))
    times = [t0]
    k = 1
    while True:
        tk = t0 + direction * k * dt_out
        if (t1 - tk) * direction <= snap:
            break
        times.append(tk)
        k += 1
    times.append(t1)
    return np.array(times, dtype=float)


def hermite_interpolate(y0, f0, y1, f1, h: float, theta: float) -> np.ndarray:
    """Cubic Hermite value at fraction ``theta`` of a step of width ``h``."""
    t2 = theta * theta
    t3 = t2 * theta
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + theta
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: Sequence[float],
    span: tuple[float, float],
    cfg: IntegratorConfig | None = None,
) -> list[tuple[float, np.ndarray]]:
    """Integrate ``dy/dt = rhs(t, y)`` over ``span`` and sample densely.

    Returns a list of ``(parameter, state vector)`` pairs at multiples of the
    output step plus the endpoints.  A NaN or Inf produced by the right-hand
    side raises :class:`IntegrationError` carrying the last valid sample;
    adaptive step underflow does the same.
    """
    cfg = cfg or IntegratorConfig()
    y0 = np.array(y0, dtype=float)
    t0, t1 = float(span[0]), float(span[1])
    if not (math.isfinite(t0) and math.isfinite(t1)):
        raise ConfigError(f"span must be finite, got {span}")
    if not np.all(np.isfinite(y0)):
        raise ConfigError("initial state must be finite")

    if t1 == t0:
        return [(t0, y0)]

    if cfg.method == "rk4":
        step, out = resolve_steps(cfg, (t0, t1), default_step=abs(t1 - t0) / 1000.0)
        times = output_times(t0, t1, out)
        return _rk4(rhs, y0, t0, t1, step, times)
    step0 = cfg.step if cfg.step is not None else abs(t1 - t0) / 100.0
    _, out = resolve_steps(cfg, (t0, t1), default_step=cfg.min_step)
    times = output_times(t0, t1, out)
    return _rk45(rhs, y0, t0, t1, step0, times, cfg)


def _emit(samples, times, oi, t_prev, t_next, y_prev, f_prev, y_next, f_next, direction):
    """Record every requested output time that falls inside the current step."""
    hh = t_next - t_prev
    snap = 1e-7 * abs(hh)
    while oi < times.size and (times[oi] - t_next) * direction <= snap:
        target = times[oi]
        if abs(target - t_next) <= snap:
            samples.append((t_next, y_next.copy()))
        elif abs(target - t_prev) <= snap:
            samples.append((t_prev, y_prev.copy()))
        else:
            theta = (target - t_prev) / hh
            samples.append((target, hermite_interpolate(y_prev, f_prev, y_next, f_next, hh, theta)))
        oi += 1
    return oi


def _rk4(rhs, y0, t0, t1, step, times):
    direction = 1.0 if t1 > t0 else -1.0
    h = direction * abs(step)
    n_steps = max(1, int(math.ceil(abs(t1 - t0) / abs(h) - 1e-9)))
    samples: list[tuple[float, np.ndarray]] = [(t0, y0.copy())]
    oi = 1  # times[0] == t0 already emitted
    y = y0
    f0 = np.asarray(rhs(t0, y), dtype=float)
    last_t, last_y = t0, y0
    for n in range(n_steps):
        t_prev = t0 + n * h
        t_next = t1 if n == n_steps - 1 else t0 + (n + 1) * h
        hh = t_next - t_prev
        k1 = f0
        k2 = np.asarray(rhs(t_prev + 0.5 * hh, y + 0.5 * hh * k1), dtype=float)
        k3 = np.asarray(rhs(t_prev + 0.5 * hh, y + 0.5 * hh * k2), dtype=float)
        k4 = np.asarray(rhs(t_next, y + hh * k3), dtype=float)
        y_next = y + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y_next)):
            raise IntegrationError(
                f"non-finite state at parameter {t_next:.6g}", last_param=last_t, last_state=last_y
            )
        f1 = np.asarray(rhs(t_next, y_next), dtype=float)
        if not np.all(np.isfinite(f1)):
            raise IntegrationError(
                f"non-finite derivative at parameter {t_next:.6g}",
                last_param=last_t,
                last_state=last_y,
            )
        oi = _emit(samples, times, oi, t_prev, t_next, y, f0, y_next, f1, direction)
        y, f0 = y_next, f1
        last_t, last_y = t_next, y_next
    return samples


# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _rk45(rhs, y0, t0, t1, step0, times, cfg: IntegratorConfig):
    direction = 1.0 if t1 > t0 else -1.0
    h = direction * min(max(abs(step0), cfg.min_step), cfg.max_step)
    samples: list[tuple[float, np.ndarray]] = [(t0, y0.copy())]
    oi = 1
    t, y = t0, y0
    f_first = np.asarray(rhs(t, y), dtype=float)
    while (t1 - t) * direction > 1e-12 * max(1.0, abs(t1)):
        if abs(h) > abs(t1 - t):
            h = t1 - t
        ks = np.empty((7, y.size))
        ks[0] = f_first
        for s in range(1, 7):
            ys = y + h * (_DP_A[s] @ ks[:s])
            ks[s] = np.asarray(rhs(t + _DP_C[s] * h, ys), dtype=float)
        y5 = y + h * (_DP_B5 @ ks)
        y4 = y + h * (_DP_B4 @ ks)
        if not np.all(np.isfinite(y5)):
            raise IntegrationError(
                f"non-finite state near parameter {t:.6g}", last_param=t, last_state=y
            )
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y5))
        err = math.sqrt(float(np.mean(((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            t_next = t + h
            f_next = ks[6]  # FSAL: stage 7 is rhs at (t+h, y5)
            oi = _emit(samples, times, oi, t, t_next, y, ks[0], y5, f_next, direction)
            t, y, f_first = t_next, y5, f_next
        factor = 0.9 * (err ** -0.2) if err > 0.0 else 5.0
        h *= min(5.0, max(0.2, factor))
        if abs(h) > cfg.max_step:
            h = direction * cfg.max_step
        if abs(h) < cfg.min_step:
            raise IntegrationError(
                f"adaptive step underflow near parameter {t:.6g}", last_param=t, last_state=y
            )
    return samples
