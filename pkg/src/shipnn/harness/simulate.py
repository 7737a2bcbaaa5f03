"""Closed-loop scenario runner.

Per step: reference model -> controller -> allocation (clip + slew) ->
thrust back to generalized force -> RK4 plant step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np

from shipnn.allocation import DEFAULT_ALPHA, ThrusterLayout, allocation_matrix, build_H, limit_forces
from shipnn.dynamics import BodyVelocity, EarthPose, GeneralizedForce, ShipState, VesselParams, step_rk4
from shipnn.reference import ReferenceModel
from shipnn.teacher.law import SmcGains, smc_control

ControllerName = Literal["teacher", "neural", "none"]
Controller = Callable[[ShipState, tuple, tuple], GeneralizedForce]


class ScenarioError(ValueError):
    """Invalid scenario definition or missing controller artifacts."""


@dataclass(frozen=True)
class Command:
    t: float  # s
    heading: float  # rad
    x: float = 0.0  # m, ignored in cruise mode
    y: float = 0.0  # m, ignored in cruise mode


@dataclass(frozen=True)
class ReferenceSettings:
    omega_n: float = 0.15  # rad/s, heading filter
    zeta: float = 1.0
    position_omega_n: float = 0.1  # rad/s, x and y filters


@dataclass(frozen=True)
class Scenario:
    name: str
    initial: ShipState = ShipState()
    schedule: tuple[Command, ...] = ()
    controller: ControllerName = "teacher"
    duration: float = 100.0
    timestep: float = 0.01
    seed: int = 0
    # > 0: desired position is a target moving at this speed along psi_d
    cruise_speed: float = 0.0

    def __post_init__(self):
        if not self.duration > 0.0:
            raise ScenarioError(f"{self.name}: duration must be positive, got {self.duration}")
        if not self.timestep > 0.0:
            raise ScenarioError(f"{self.name}: timestep must be positive, got {self.timestep}")
        if self.controller not in ("teacher", "neural", "none"):
            raise ScenarioError(f"{self.name}: unknown controller {self.controller!r}")
        times = [c.t for c in self.schedule]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ScenarioError(f"{self.name}: schedule times must be strictly increasing, got {times}")
        if self.cruise_speed < 0.0:
            raise ScenarioError(f"{self.name}: cruise speed must be non-negative")
        object.__setattr__(self, "schedule", tuple(self.schedule))

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.timestep))


@dataclass
class RunRecord:
    name: str
    t: np.ndarray
    eta: np.ndarray  # (n, 3) x, y, psi  [m, m, rad]
    nu: np.ndarray  # (n, 3) u, v, r
    eta_d: np.ndarray  # (n, 3) desired pose
    eta_d_dot: np.ndarray  # (n, 3)
    tau: np.ndarray  # (n, 3) commanded by the controller
    f: np.ndarray  # (n, 4) thrust after limits
    saturated: np.ndarray  # (n,) bool
    f_max: float = 2.0

    def __post_init__(self):
        n = len(self.t)
        for name in ("eta", "nu", "eta_d", "eta_d_dot", "tau", "f", "saturated"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"record field {name} has length {len(getattr(self, name))}, expected {n}")

    def __len__(self):
        return len(self.t)

    @property
    def psi_d(self) -> np.ndarray:
        return self.eta_d[:, 2]

    @property
    def heading_error_deg(self) -> np.ndarray:
        return np.degrees(self.eta[:, 2] - self.eta_d[:, 2])

    @property
    def heading_rate_error_deg_s(self) -> np.ndarray:
        return np.degrees(self.nu[:, 2] - self.eta_d_dot[:, 2])


def teacher_controller(gains: SmcGains, params: VesselParams) -> Controller:
    def ctrl(state, eta_d, eta_d_dot):
        return smc_control(state, eta_d, eta_d_dot, gains, params)

    return ctrl


def neural_controller(net) -> Controller:
    from shipnn.neurocontrol.mlp import control

    def ctrl(state, eta_d, eta_d_dot):
        return control(net, state, eta_d, eta_d_dot)

    return ctrl


def _zero_controller(state, eta_d, eta_d_dot):
    return GeneralizedForce()


def _active_command(schedule: Sequence[Command], t: float, fallback: Command) -> Command:
    active = fallback
    for cmd in schedule:
        if cmd.t <= t + 1e-12:
            active = cmd
        else:
            break
    return active


def run_scenario(
    scenario: Scenario,
    *,
    params: VesselParams = VesselParams(),
    layout: ThrusterLayout = ThrusterLayout(),
    alpha=DEFAULT_ALPHA,
    reference: ReferenceSettings = ReferenceSettings(),
    gains: SmcGains = SmcGains(),
    net=None,
    weights_path: str | Path | None = None,
    controller: Controller | None = None,
) -> RunRecord:
    """Simulate one scenario. ``controller`` overrides the scenario's selection."""
    if controller is None:
        if scenario.controller == "teacher":
            controller = teacher_controller(gains, params)
        elif scenario.controller == "neural":
            if net is None:
                if weights_path is None:
                    raise ScenarioError(f"{scenario.name}: neural controller needs a weight file")
                from shipnn.neurocontrol.weights import load_weights

                net = load_weights(weights_path)
            controller = neural_controller(net)
        else:
            controller = _zero_controller

    h = scenario.timestep
    n = scenario.n_steps
    H = build_H(alpha, layout)
    H_pinv = allocation_matrix(alpha, layout)

    state = scenario.initial
    x0, y0, psi0 = state.eta
    fallback = Command(0.0, psi0, x0, y0)
    heading_ref = ReferenceModel(reference.omega_n, reference.zeta, psi_d=psi0)
    cruise = scenario.cruise_speed
    if cruise > 0.0:
        pos_ref = None
        xd, yd = x0, y0
    else:
        pos_ref = (
            ReferenceModel(reference.position_omega_n, reference.zeta, psi_d=x0),
            ReferenceModel(reference.position_omega_n, reference.zeta, psi_d=y0),
        )

    t_arr = np.empty(n + 1)
    eta = np.empty((n + 1, 3))
    nu = np.empty((n + 1, 3))
    eta_d = np.empty((n + 1, 3))
    eta_d_dot = np.empty((n + 1, 3))
    tau_log = np.empty((n + 1, 3))
    f_log = np.empty((n + 1, 4))
    sat = np.zeros(n + 1, dtype=bool)

    f_prev = None
    for k in range(n + 1):
        psi_d, psi_d_dot = heading_ref.psi_d, heading_ref.psi_d_dot
        if pos_ref is None:
            xd_dot, yd_dot = cruise * math.cos(psi_d), cruise * math.sin(psi_d)
        else:
            xd, xd_dot = pos_ref[0].psi_d, pos_ref[0].psi_d_dot
            yd, yd_dot = pos_ref[1].psi_d, pos_ref[1].psi_d_dot
        des = (xd, yd, psi_d)
        des_dot = (xd_dot, yd_dot, psi_d_dot)

        tau = controller(state, des, des_dot)
        f_raw = H_pinv @ np.asarray(tau, dtype=float)
        # the first step has no history: thrusters are taken to be already
        # running at whatever the opening demand is, within magnitude limits
        f, saturated = limit_forces(f_raw, layout, f_prev, h if f_prev is not None else None)
        f_prev = f

        t_arr[k] = k * h
        eta[k] = state.eta
        nu[k] = state.nu
        eta_d[k] = des
        eta_d_dot[k] = des_dot
        tau_log[k] = tau
        f_log[k] = f
        sat[k] = saturated
        if k == n:
            break

        tau_applied = H @ f
        state = step_rk4(state, tau_applied, params, h)
        state = ShipState(state.nu, state.eta, (k + 1) * h)

        cmd = _active_command(scenario.schedule, k * h, fallback)
        heading_ref.step(cmd.heading, h)
        if pos_ref is None:
            psi_next = heading_ref.psi_d
            xd += 0.5 * h * cruise * (math.cos(psi_d) + math.cos(psi_next))
            yd += 0.5 * h * cruise * (math.sin(psi_d) + math.sin(psi_next))
        else:
            pos_ref[0].step(cmd.x, h)
            pos_ref[1].step(cmd.y, h)

    return RunRecord(
        name=scenario.name,
        t=t_arr,
        eta=eta,
        nu=nu,
        eta_d=eta_d,
        eta_d_dot=eta_d_dot,
        tau=tau_log,
        f=f_log,
        saturated=sat,
        f_max=layout.f_max,
    )


def heading_step(
    step_deg: float = 20.0,
    controller: ControllerName = "teacher",
    duration: float = 100.0,
    timestep: float = 0.01,
    cruise_speed: float = 0.2,
    initial: ShipState | None = None,
    name: str | None = None,
) -> Scenario:
    """Course change from cruise on heading 0 to ``step_deg`` at t = 0."""
    if initial is None:
        initial = ShipState(BodyVelocity(cruise_speed, 0.0, 0.0), EarthPose())
    psi_r = initial.eta.psi + math.radians(step_deg)
    return Scenario(
        name=name or f"step_{step_deg:+g}deg_{controller}",
        initial=initial,
        schedule=(Command(0.0, psi_r),),
        controller=controller,
        duration=duration,
        timestep=timestep,
        cruise_speed=cruise_speed,
    )


def station_keeping(
    offset=(1.0, 0.0),
    controller: ControllerName = "teacher",
    duration: float = 100.0,
    timestep: float = 0.01,
    initial_nu=(0.0, 0.0, 0.0),
    name: str | None = None,
) -> Scenario:
    """Hold the origin at heading 0 starting ``offset`` metres away."""
    initial = ShipState(BodyVelocity(*initial_nu), EarthPose(offset[0], offset[1], 0.0))
    return Scenario(
        name=name or f"station_{offset[0]:+.3g}_{offset[1]:+.3g}_{controller}",
        initial=initial,
        schedule=(Command(0.0, 0.0, 0.0, 0.0),),
        controller=controller,
        duration=duration,
        timestep=timestep,
    )
