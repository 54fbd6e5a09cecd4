"""
Event-driven step loop for the line-model walks, compiled with numba.

The kernel works on a materialised environment window and a batch of
pre-drawn uniforms. It stops *before* consuming anything whenever it needs
the driver (window exit, uniforms exhausted, trajectory buffer full), so
the driver can grow the resource and resume with bit-identical results.
"""
from numba import njit
import numpy as np

__all__ = [
    "KIND_CODES",
    "STATUS_HORIZON",
    "STATUS_JUMP_LIMIT",
    "STATUS_WINDOW",
    "STATUS_REFILL",
    "STATUS_BUFFER",
    "rates",
    "monomial",
    "advance",
]

KIND_CODES = {"VSRW": 0, "CSRW": 1, "Y": 2, "XSTAR": 3}

STATUS_HORIZON = 0
STATUS_JUMP_LIMIT = 1
STATUS_WINDOW = 2
STATUS_REFILL = 3
STATUS_BUFFER = 4

# Layout of the integer state vector
X1, X2, JUMPS, U_INDEX, N_RECORDED = 0, 1, 2, 3, 4


@njit(cache=True)
def rates(kind, h, v, a1m, a2m):
    """Per-direction (horizontal, vertical) rates at a site with rates h, v."""
    if kind == 0:
        return h, v
    elif kind == 1:
        s = h + v
        return h / s, v / s
    elif kind == 2:
        return h / v, 1.0
    return h ** (1.0 - a1m) * v ** (-a2m), h ** (-a1m) * v ** (1.0 - a2m)


@njit(cache=True)
def monomial(h, v, p, q):
    """h**p * v**q, exact for the exponents 0 and +-1."""
    if p == 0.0:
        out = 1.0
    elif p == 1.0:
        out = h
    else:
        out = h ** p
    if q == 1.0:
        out = out * v
    elif q == -1.0:
        out = out / v
    elif q != 0.0:
        out = out * v ** q
    return out


@njit(cache=True)
def advance(kind, a1m, a2m, h_win, v_win, radius, state, clock, horizon, jump_limit,
            uniforms, powers, integrals, max_abs, record, times_out, pos_out):
    """Runs the Gillespie loop until a stop condition; returns a status code.

    Two uniforms are consumed per jump, in a fixed order: the holding time
    first, then the direction.
    """
    x1 = state[X1]
    x2 = state[X2]
    jumps = state[JUMPS]
    ui = state[U_INDEX]
    n_rec = state[N_RECORDED]
    t = clock[0]
    n_uniforms = uniforms.shape[0]
    n_powers = powers.shape[0]
    capacity = times_out.shape[0]
    status = STATUS_HORIZON

    while True:
        if jumps >= jump_limit:
            status = STATUS_JUMP_LIMIT
            break
        if x1 < -radius or x1 > radius or x2 < -radius or x2 > radius:
            status = STATUS_WINDOW
            break
        if ui + 2 > n_uniforms:
            status = STATUS_REFILL
            break
        if record and n_rec >= capacity:
            status = STATUS_BUFFER
            break

        h = h_win[x2 + radius]
        v = v_win[x1 + radius]
        rh, rv = rates(kind, h, v, a1m, a2m)
        total = 2.0 * (rh + rv)
        hold = -np.log(uniforms[ui]) / total

        if t + hold >= horizon:
            dt = horizon - t
            for j in range(n_powers):
                integrals[j] += monomial(h, v, powers[j, 0], powers[j, 1]) * dt
            t = horizon
            ui += 1
            status = STATUS_HORIZON
            break

        for j in range(n_powers):
            integrals[j] += monomial(h, v, powers[j, 0], powers[j, 1]) * hold
        t += hold
        pick = uniforms[ui + 1] * total
        ui += 2

        if pick < rh:
            x1 += 1
        elif pick < 2.0 * rh:
            x1 -= 1
        elif pick < 2.0 * rh + rv:
            x2 += 1
        else:
            x2 -= 1
        jumps += 1

        if abs(x1) > max_abs[0]:
            max_abs[0] = abs(x1)
        if abs(x2) > max_abs[1]:
            max_abs[1] = abs(x2)
        if record:
            times_out[n_rec] = t
            pos_out[n_rec, 0] = x1
            pos_out[n_rec, 1] = x2
            n_rec += 1

    state[X1] = x1
    state[X2] = x2
    state[JUMPS] = jumps
    state[U_INDEX] = ui
    state[N_RECORDED] = n_rec
    clock[0] = t
    return status
