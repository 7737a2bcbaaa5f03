"""Teacher rollouts turned into (features, thrust demand) training pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from shipnn.dynamics import BodyVelocity, EarthPose, GeneralizedForce, ShipState
from shipnn.harness.simulate import Scenario, heading_step, run_scenario, station_keeping
from shipnn.neurocontrol.mlp import features

DEFAULT_STEPS_DEG = (5.0, -5.0, 10.0, -10.0, 20.0, -20.0, 30.0, -30.0, 40.0, -40.0)


class TrainingSample(NamedTuple):
    features: np.ndarray  # raw, pre-normalization
    target: GeneralizedForce
    # where the sample came from, so the teacher can be replayed on it
    state: ShipState
    eta_d: tuple[float, float, float]
    eta_d_dot: tuple[float, float, float]


@dataclass(frozen=True)
class Battery:
    scenarios: tuple[Scenario, ...] = ()

    def __len__(self):
        return len(self.scenarios)


def default_battery(
    seed: int = 0,
    steps_deg: Sequence[float] = DEFAULT_STEPS_DEG,
    n_station: int = 6,
    max_offset: float = 2.0,
    n_perturbed: int = 4,
    duration: float = 100.0,
    timestep: float = 0.01,
    cruise_speed: float = 0.2,
) -> Battery:
    """Heading steps from cruise, station keeping from random offsets, and
    heading steps from randomly perturbed initial velocities."""
    rng = np.random.default_rng(seed)
    scenarios = [
        heading_step(s, duration=duration, timestep=timestep, cruise_speed=cruise_speed)
        for s in steps_deg
    ]
    for i in range(n_station):
        radius = max_offset * math.sqrt(rng.uniform())
        bearing = rng.uniform(-math.pi, math.pi)
        nu0 = (rng.uniform(-0.05, 0.05), rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02))
        scenarios.append(
            station_keeping(
                (radius * math.cos(bearing), radius * math.sin(bearing)),
                duration=duration,
                timestep=timestep,
                initial_nu=nu0,
                name=f"station_{i}",
            )
        )
    for i in range(n_perturbed):
        step = float(rng.choice(steps_deg))
        nu0 = BodyVelocity(
            cruise_speed + rng.uniform(-0.05, 0.05), rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02)
        )
        scenarios.append(
            heading_step(
                step,
                duration=duration,
                timestep=timestep,
                cruise_speed=cruise_speed,
                initial=ShipState(nu0, EarthPose()),
                name=f"perturbed_{i}_{step:+g}deg",
            )
        )
    return Battery(tuple(scenarios))


def generate_dataset(
    gains,
    battery: Battery | Sequence[Scenario],
    sampling_period: float = 0.1,
    seed: int = 0,
    **run_kwargs,
) -> list[TrainingSample]:
    """Run the teacher over every scenario, logging every ``sampling_period``
    seconds on [0, duration). The pooled samples are shuffled with ``seed``."""
    scenarios = battery.scenarios if isinstance(battery, Battery) else tuple(battery)
    samples: list[TrainingSample] = []
    for sc in scenarios:
        sc_teacher = Scenario(**{**vars(sc), "controller": "teacher"})
        stride = int(round(sampling_period / sc.timestep))
        if stride < 1 or not math.isclose(stride * sc.timestep, sampling_period, rel_tol=1e-9):
            raise ValueError(
                f"sampling period {sampling_period}s is not a multiple of timestep {sc.timestep}s"
            )
        rec = run_scenario(sc_teacher, gains=gains, **run_kwargs)
        for k in range(0, sc.n_steps, stride):
            state = ShipState(BodyVelocity(*rec.nu[k]), EarthPose(*rec.eta[k]), float(rec.t[k]))
            eta_d = tuple(float(x) for x in rec.eta_d[k])
            eta_d_dot = tuple(float(x) for x in rec.eta_d_dot[k])
            samples.append(
                TrainingSample(
                    features(state, eta_d, eta_d_dot),
                    GeneralizedForce(*(float(x) for x in rec.tau[k])),
                    state,
                    eta_d,
                    eta_d_dot,
                )
            )
    order = np.random.default_rng(seed).permutation(len(samples))
    return [samples[i] for i in order]


def to_arrays(samples: Sequence[TrainingSample]) -> tuple[np.ndarray, np.ndarray]:
    if not samples:
        return np.empty((0, 7)), np.empty((0, 3))
    X = np.stack([s.features for s in samples])
    Y = np.array([tuple(s.target) for s in samples], dtype=float)
    return X, Y
