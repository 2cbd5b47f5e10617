"""Hot fixed-step RK4 loops for the built-in flows.

Each built-in right-hand side is written once in nopython-compatible NumPy
and driven by a single sampling RK4 loop.  Under the numba backend (see
:mod:`igflow.backend`) these compile to machine code; under the numpy
backend the identical source runs uncompiled.

State layouts and parameter packs per kind:

==============  =======================  ====================================
kind            state vector             params
==============  =======================  ====================================
HAM_DIAG        [q_1..q_m, p_1..p_m]     [E, s_1..s_m]        (s = eta lower)
HAM_VDW         [u, v, p_u, p_v]         [E, a, b, alpha2, beta2]
GRAD_DIAG       [q_1..q_m]               [r_1..r_m, s_1..s_m]
GRAD_VDW        [u, v]                   [a, b, alpha2, beta2, P_u, P_v]
KL              [q_1..q_N]               [ln q2_1 .. ln q2_N]
==============  =======================  ====================================

The KL kind renormalizes after every step and aborts when a probability
underflows 1e-300 or normalization drifts beyond 1e-6.
"""

from __future__ import annotations

import numpy as np

from .backend import njit
from .errors import IntegrationError

HAM_DIAG = 0
HAM_VDW = 1
GRAD_DIAG = 2
GRAD_VDW = 3
KL = 4

_STATUS_MESSAGES = {
    1: "non-finite state produced by the flow",
    2: "probability left the open simplex beyond the guard tolerance",
}


@njit(cache=True)
def _rhs(kind, y, params, out):  # pragma: no cover - exercised via the driver
    if kind == HAM_DIAG:
        m = y.shape[0] // 2
        energy = params[0]
        for i in range(m):
            q = y[i]
            p = y[m + i]
            s = params[1 + i]
            out[i] = q * q * p / (s * energy)
            out[m + i] = -q * p * p / (s * energy)
    elif kind == HAM_VDW:
        energy = params[0]
        a = params[1]
        b = params[2]
        a2 = params[3]
        b2 = params[4]
        u = y[0]
        v = y[1]
        pu = y[2]
        pv = y[3]
        big_a = u + a / v
        big_b = v - b
        guu = big_a * big_a / a2 + a * a * big_b * big_b / (b2 * v**4)
        guv = a * big_b * big_b / (b2 * v * v)
        gvv = big_b * big_b / b2
        out[0] = (guu * pu + guv * pv) / energy
        out[1] = (guv * pu + gvv * pv) / energy
        dguu_du = 2.0 * big_a / a2
        dguu_dv = -2.0 * a * big_a / (a2 * v * v) + (a * a / b2) * (
            2.0 * big_b / v**4 - 4.0 * big_b * big_b / v**5
        )
        dguv_dv = 2.0 * a * b * big_b / (b2 * v**3)
        dgvv_dv = 2.0 * big_b / b2
        out[2] = -(0.5 / energy) * dguu_du * pu * pu
        out[3] = -(0.5 / energy) * (
            dguu_dv * pu * pu + 2.0 * dguv_dv * pu * pv + dgvv_dv * pv * pv
        )
    elif kind == GRAD_DIAG:
        m = y.shape[0]
        for i in range(m):
            out[i] = params[i] * y[i] / params[m + i]
    elif kind == GRAD_VDW:
        a = params[0]
        b = params[1]
        a2 = params[2]
        b2 = params[3]
        pu = params[4]
        pv = params[5]
        u = y[0]
        v = y[1]
        big_a = u + a / v
        big_b = v - b
        out[0] = (pu / a2) * big_a + (pv / b2) * (a / (v * v)) * big_b
        out[1] = (pv / b2) * big_b
    else:  # KL
        n = y.shape[0]
        div = 0.0
        for i in range(n):
            div += y[i] * (np.log(y[i]) - params[i])
        for i in range(n):
            out[i] = y[i] * (-(np.log(y[i]) - params[i]) + div)


@njit(cache=True)
def rk4_sampled(kind, y0, params, t0, t1, h_abs, out_times):
    """Fixed-step RK4 with cubic Hermite sampling at ``out_times``.

    Returns ``(status, n_filled, samples)`` where status 0 means success and
    ``samples[:n_filled]`` are valid rows.
    """
    dim = y0.shape[0]
    n_out = out_times.shape[0]
    ys = np.empty((n_out, dim))
    start_snap = 1e-7 * max(h_abs, 1e-300)
    oi = 0
    while oi < n_out and abs(out_times[oi] - t0) <= start_snap:
        for d in range(dim):
            ys[oi, d] = y0[d]
        oi += 1
    if t1 == t0:
        return 0, oi, ys

    direction = 1.0 if t1 > t0 else -1.0
    h = direction * h_abs
    n_steps = int(np.ceil(abs(t1 - t0) / h_abs - 1e-9))
    if n_steps < 1:
        n_steps = 1

    y = y0.copy()
    y_new = np.empty(dim)
    f0 = np.empty(dim)
    f1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    ytmp = np.empty(dim)
    _rhs(kind, y, params, f0)

    for n in range(n_steps):
        t_prev = t0 + n * h
        t_next = t1 if n == n_steps - 1 else t0 + (n + 1) * h
        hh = t_next - t_prev
        for d in range(dim):
            ytmp[d] = y[d] + 0.5 * hh * f0[d]
        _rhs(kind, ytmp, params, k2)
        for d in range(dim):
            ytmp[d] = y[d] + 0.5 * hh * k2[d]
        _rhs(kind, ytmp, params, k3)
        for d in range(dim):
            ytmp[d] = y[d] + hh * k3[d]
        _rhs(kind, ytmp, params, k4)
        for d in range(dim):
            y_new[d] = y[d] + (hh / 6.0) * (f0[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d])

        for d in range(dim):
            if not np.isfinite(y_new[d]):
                return 1, oi, ys
        if kind == KL:
            total = 0.0
            smallest = y_new[0]
            for d in range(dim):
                total += y_new[d]
                if y_new[d] < smallest:
                    smallest = y_new[d]
            if smallest < 1e-300 or abs(total - 1.0) > 1e-6:
                return 2, oi, ys
            for d in range(dim):
                y_new[d] /= total

        _rhs(kind, y_new, params, f1)
        snap = 1e-7 * abs(hh)
        while oi < n_out and (out_times[oi] - t_next) * direction <= snap:
            target = out_times[oi]
            if abs(target - t_next) <= snap:
                for d in range(dim):
                    ys[oi, d] = y_new[d]
            elif abs(target - t_prev) <= snap:
                for d in range(dim):
                    ys[oi, d] = y[d]
            else:
                theta = (target - t_prev) / hh
                th2 = theta * theta
                th3 = th2 * theta
                h00 = 2.0 * th3 - 3.0 * th2 + 1.0
                h10 = th3 - 2.0 * th2 + theta
                h01 = -2.0 * th3 + 3.0 * th2
                h11 = th3 - th2
                for d in range(dim):
                    ys[oi, d] = (
                        h00 * y[d] + h10 * hh * f0[d] + h01 * y_new[d] + h11 * hh * f1[d]
                    )
            oi += 1
        for d in range(dim):
            y[d] = y_new[d]
            f0[d] = f1[d]
    return 0, oi, ys


def run_rk4(kind, y0, params, t0, t1, step, out_times):
    """Drive :func:`rk4_sampled` and raise on failure.

    Returns the filled ``(n_out, dim)`` sample array aligned with
    ``out_times``.
    """
    y0 = np.ascontiguousarray(y0, dtype=float)
    params = np.ascontiguousarray(params, dtype=float)
    out_times = np.ascontiguousarray(out_times, dtype=float)
    with np.errstate(all="ignore"):
        status, filled, ys = rk4_sampled(
            int(kind), y0, params, float(t0), float(t1), float(abs(step)), out_times
        )
    if status != 0:
        last_param = float(out_times[filled - 1]) if filled > 0 else float(t0)
        last_state = ys[filled - 1].copy() if filled > 0 else y0.copy()
        raise IntegrationError(
            f"{_STATUS_MESSAGES[status]} (last sampled parameter {last_param:.6g})",
            last_param=last_param,
            last_state=last_state,
        )
    return ys
