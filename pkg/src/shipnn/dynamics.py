"""3-DOF surge/sway/yaw model of a small four-thruster vessel.

Rigid-body equations in the body frame with linear damping,

    M nu_dot + C(nu) nu + D nu = tau
    eta_dot = J(psi) nu

integrated with fixed-step classical RK4. The third generalized force
component is the yaw moment about the vertical axis (named ``tau_n``).

The hot path works on plain floats: for 3-vectors it is several times
faster than small numpy arrays, which matters for closed-loop runs of
10^4 steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

MAX_LINEAR_SPEED = 5.0  # m/s, plausibility bound for a 1.17 m model
MAX_YAW_RATE = 2.0 * math.pi  # rad/s


class DivergenceError(RuntimeError):
    """Simulation left the physically plausible envelope or went non-finite."""


class BodyVelocity(NamedTuple):
    u: float = 0.0  # surge, m/s
    v: float = 0.0  # sway, m/s
    r: float = 0.0  # yaw rate, rad/s


class EarthPose(NamedTuple):
    x: float = 0.0  # north, m
    y: float = 0.0  # east, m
    psi: float = 0.0  # heading, rad (unwrapped)


class GeneralizedForce(NamedTuple):
    tau_x: float = 0.0  # surge force, N
    tau_y: float = 0.0  # sway force, N
    tau_n: float = 0.0  # yaw moment, N m


@dataclass(frozen=True)
class VesselParams:
    M: np.ndarray = field(default_factory=lambda: np.diag([19.0, 35.2, 20.0]))
    D: np.ndarray = field(default_factory=lambda: np.diag([6.3, 7.0, 2.0]))
    # (m11, m22) as they enter C(nu)
    coriolis_coefficients: tuple[float, float] = (19.0, 35.2)

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        D = np.asarray(self.D, dtype=float)
        for name, mat in (("M", M), ("D", D)):
            if mat.shape != (3, 3):
                raise ValueError(f"{name} must be 3x3, got shape {mat.shape}")
            if np.any(mat - np.diag(np.diag(mat))):
                raise ValueError(f"{name} must be diagonal")
            if np.any(np.diag(mat) <= 0.0):
                raise ValueError(f"{name} diagonal must be strictly positive")
        m11, m22 = self.coriolis_coefficients
        if not (np.isfinite(m11) and np.isfinite(m22)):
            raise ValueError("coriolis coefficients must be finite")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "coriolis_coefficients", (float(m11), float(m22)))

    @property
    def mass_diag(self) -> tuple[float, float, float]:
        return tuple(float(m) for m in np.diag(self.M))

    @property
    def damping_diag(self) -> tuple[float, float, float]:
        return tuple(float(d) for d in np.diag(self.D))

    def kinetic_energy(self, nu) -> float:
        nu = np.asarray(nu, dtype=float)
        return 0.5 * float(nu @ self.M @ nu)


@dataclass(frozen=True)
class ShipState:
    nu: BodyVelocity = BodyVelocity()
    eta: EarthPose = EarthPose()
    t: float = 0.0

    def __post_init__(self):
        if self.t < 0.0:
            raise ValueError(f"simulation time must be non-negative, got {self.t}")
        object.__setattr__(self, "nu", BodyVelocity(*map(float, self.nu)))
        object.__setattr__(self, "eta", EarthPose(*map(float, self.eta)))

    def as_vector(self) -> np.ndarray:
        """Stacked state [u, v, r, x, y, psi]."""
        return np.array([*self.nu, *self.eta])


def coriolis_matrix(nu, p: VesselParams) -> np.ndarray:
    u, v, _ = nu
    m11, m22 = p.coriolis_coefficients
    return np.array(
        [
            [0.0, 0.0, -m22 * v],
            [0.0, 0.0, m11 * u],
            [m22 * v, -m11 * u, 0.0],
        ]
    )


def rotation(psi: float) -> np.ndarray:
    """J(psi): body-frame velocities to Earth-frame pose rates."""
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rates(u, v, r, psi, tx, ty, tn, m, d, m11, m22):
    # C(nu) nu written out: (-m22 v r, m11 u r, m22 v u - m11 u v)
    du = (tx + m22 * v * r - d[0] * u) / m[0]
    dv = (ty - m11 * u * r - d[1] * v) / m[1]
    dr = (tn - (m22 - m11) * u * v - d[2] * r) / m[2]
    c, s = math.cos(psi), math.sin(psi)
    return du, dv, dr, c * u - s * v, s * u + c * v, r


def derivative(state: ShipState, tau, p: VesselParams) -> tuple[np.ndarray, np.ndarray]:
    """Return (nu_dot, eta_dot) for the given state and generalized force."""
    u, v, r = state.nu
    m11, m22 = p.coriolis_coefficients
    out = _rates(u, v, r, state.eta.psi, *tau, p.mass_diag, p.damping_diag, m11, m22)
    return np.array(out[:3]), np.array(out[3:])


def check_state(state: ShipState) -> None:
    values = (*state.nu, *state.eta)
    if not all(math.isfinite(x) for x in values):
        raise DivergenceError(f"non-finite state at t={state.t:.3f}s: {values}")
    u, v, r = state.nu
    if abs(u) > MAX_LINEAR_SPEED or abs(v) > MAX_LINEAR_SPEED or abs(r) > MAX_YAW_RATE:
        raise DivergenceError(
            f"velocity out of plausible range at t={state.t:.3f}s: "
            f"u={u:.3g} m/s, v={v:.3g} m/s, r={r:.3g} rad/s"
        )


def step_rk4(state: ShipState, tau, p: VesselParams, h: float) -> ShipState:
    """Advance one RK4 step with tau held constant over the step."""
    if not h > 0.0:
        raise ValueError(f"timestep must be positive, got {h}")
    tx, ty, tn = (float(x) for x in tau)
    if not all(math.isfinite(x) for x in (tx, ty, tn)):
        raise DivergenceError(f"non-finite force at t={state.t:.3f}s: {(tx, ty, tn)}")
    m, d = p.mass_diag, p.damping_diag
    m11, m22 = p.coriolis_coefficients
    y0 = (*state.nu, *state.eta)

    def f(y):
        return _rates(y[0], y[1], y[2], y[5], tx, ty, tn, m, d, m11, m22)

    k1 = f(y0)
    k2 = f([a + 0.5 * h * b for a, b in zip(y0, k1)])
    k3 = f([a + 0.5 * h * b for a, b in zip(y0, k2)])
    k4 = f([a + h * b for a, b in zip(y0, k3)])
    y1 = [
        a + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(y0, k1, k2, k3, k4)
    ]
    new = ShipState(BodyVelocity(*y1[:3]), EarthPose(*y1[3:]), state.t + h)
    check_state(new)
    return new
