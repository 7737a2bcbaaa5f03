"""Boundary-layer sliding-mode pose controller.

Errors are formed in the Earth frame,

    e = eta_d - eta,   e_dot = eta_d_dot - J(psi) nu,   s = e_dot + Lambda e,

and the control is mapped back to the body frame:

    tau = J(psi)^T K tanh(s / phi) + C(nu) nu + D nu.

The model-compensation term can be switched off to get a pure switching law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from shipnn.dynamics import GeneralizedForce, ShipState, VesselParams


@dataclass(frozen=True)
class SmcGains:
    Lambda: tuple[float, float, float] = (0.1, 0.3, 0.8)  # 1/s
    K: tuple[float, float, float] = (3.8, 0.4, 0.2)  # N, N, N m
    phi: tuple[float, float, float] = (0.5, 0.5, 0.01)
    compensate_model: bool = True

    def __post_init__(self):
        for name in ("Lambda", "K", "phi"):
            vals = tuple(float(x) for x in getattr(self, name))
            if len(vals) != 3:
                raise ValueError(f"{name} needs one value per axis, got {vals}")
            if any(not (x > 0.0 and math.isfinite(x)) for x in vals):
                raise ValueError(f"{name} entries must be finite and positive, got {vals}")
            object.__setattr__(self, name, vals)


def sliding_surface(state: ShipState, eta_d, eta_d_dot, gains: SmcGains) -> tuple[float, float, float]:
    u, v, r = state.nu
    x, y, psi = state.eta
    c, s = math.cos(psi), math.sin(psi)
    e = (eta_d[0] - x, eta_d[1] - y, eta_d[2] - psi)
    e_dot = (
        eta_d_dot[0] - (c * u - s * v),
        eta_d_dot[1] - (s * u + c * v),
        eta_d_dot[2] - r,
    )
    lam = gains.Lambda
    return tuple(ed + l * ei for ed, l, ei in zip(e_dot, lam, e))


def smc_control(
    state: ShipState,
    eta_d,
    eta_d_dot,
    gains: SmcGains = SmcGains(),
    p: VesselParams = VesselParams(),
) -> GeneralizedForce:
    s = sliding_surface(state, eta_d, eta_d_dot, gains)
    wx, wy, wn = (k * math.tanh(si / ph) for k, si, ph in zip(gains.K, s, gains.phi))
    c, sn = math.cos(state.eta.psi), math.sin(state.eta.psi)
    tx = c * wx + sn * wy
    ty = -sn * wx + c * wy
    tn = wn
    if gains.compensate_model:
        u, v, r = state.nu
        m11, m22 = p.coriolis_coefficients
        d = p.damping_diag
        tx += -m22 * v * r + d[0] * u
        ty += m11 * u * r + d[1] * v
        tn += (m22 - m11) * u * v + d[2] * r
    return GeneralizedForce(tx, ty, tn)
