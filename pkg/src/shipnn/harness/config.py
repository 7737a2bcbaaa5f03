"""YAML configuration and scenario files.

Every key carries its unit; unknown keys are rejected. Angles are given in
degrees and converted to radians here.
"""

from __future__ import annotations

import math
import os
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from shipnn.allocation import ThrusterLayout
from shipnn.dynamics import BodyVelocity, EarthPose, ShipState, VesselParams
from shipnn.harness.simulate import Command, ReferenceSettings, Scenario
from shipnn.neurocontrol.training import TrainParams
from shipnn.teacher.law import SmcGains
from shipnn.teacher.tuning import SearchSpace

CONFIG_ENV_VAR = "SHIPNN_CONFIG"

Triple = tuple[float, float, float]


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class VesselConfig(_Strict):
    mass_diag_kg_kg_kgm2: Triple = (19.0, 35.2, 20.0)
    damping_diag_ns_m_ns_m_nms: Triple = (6.3, 7.0, 2.0)
    coriolis_m11_kg: float = 19.0
    coriolis_m22_kg: float = 35.2

    def build(self) -> VesselParams:
        return VesselParams(
            np.diag(self.mass_diag_kg_kg_kgm2),
            np.diag(self.damping_diag_ns_m_ns_m_nms),
            (self.coriolis_m11_kg, self.coriolis_m22_kg),
        )


class ThrusterConfig(_Strict):
    moment_arms_m: tuple[float, float, float, float] = (0.497, 0.497, 0.407, 0.527)
    phase_shifts_deg: tuple[float, float] = (0.0, 0.0)
    azimuth_deg: tuple[float, float, float, float] = (180.0, 180.0, 90.0, 90.0)
    f_max_n: float = Field(2.0, gt=0)
    f_rate_max_n_s: float = Field(10.0, gt=0)

    def layout(self) -> ThrusterLayout:
        return ThrusterLayout(
            self.moment_arms_m,
            tuple(math.radians(a) for a in self.phase_shifts_deg),
            self.f_max_n,
            self.f_rate_max_n_s,
        )

    def alpha(self) -> tuple[float, ...]:
        return tuple(math.radians(a) for a in self.azimuth_deg)


class ReferenceConfig(_Strict):
    omega_n_rad_s: float = Field(0.15, gt=0)
    zeta: float = Field(1.0, ge=1.0 - 1e-9)
    position_omega_n_rad_s: float = Field(0.1, gt=0)

    def build(self) -> ReferenceSettings:
        return ReferenceSettings(self.omega_n_rad_s, self.zeta, self.position_omega_n_rad_s)


class SearchConfig(_Strict):
    lambda_psi_per_s: list[float] = [0.2, 0.4, 0.8]
    k_psi_nm: list[float] = [0.1, 0.2]
    phi_psi_rad_s: list[float] = [0.01, 0.02, 0.04]
    effort_weight: float = Field(1e-2, ge=0)
    n_samples: Optional[int] = Field(None, gt=0)


class TeacherConfig(_Strict):
    lambda_per_s: Triple = (0.1, 0.3, 0.8)
    k_n_n_nm: Triple = (3.8, 0.4, 0.2)
    phi_m_s_m_s_rad_s: Triple = (0.5, 0.5, 0.01)
    compensate_model: bool = True
    search: SearchConfig = SearchConfig()

    def gains(self) -> SmcGains:
        return SmcGains(self.lambda_per_s, self.k_n_n_nm, self.phi_m_s_m_s_rad_s, self.compensate_model)

    def search_space(self) -> SearchSpace:
        lx, ly, _ = self.lambda_per_s
        kx, ky, _ = self.k_n_n_nm
        px, py, _ = self.phi_m_s_m_s_rad_s
        s = self.search
        return SearchSpace(
            Lambda=[(lx, ly, v) for v in s.lambda_psi_per_s],
            K=[(kx, ky, v) for v in s.k_psi_nm],
            phi=[(px, py, v) for v in s.phi_psi_rad_s],
            compensate_model=self.compensate_model,
        )


class DatasetConfig(_Strict):
    sampling_period_s: float = Field(0.1, gt=0)
    heading_steps_deg: list[float] = [5.0, -5.0, 10.0, -10.0, 20.0, -20.0, 30.0, -30.0, 40.0, -40.0]
    n_station_keeping: int = Field(6, ge=0)
    max_offset_m: float = Field(2.0, ge=0)
    n_perturbed: int = Field(4, ge=0)
    duration_s: float = Field(100.0, gt=0)


class TrainingConfig(_Strict):
    n_hidden: int = Field(10, gt=0)
    learning_rate: float = Field(0.05, gt=0)
    momentum: float = Field(0.9, ge=0, lt=1)
    lr_decay: float = Field(0.995, gt=0, le=1)
    batch_size: int = Field(16, gt=0)
    max_epochs: int = Field(600, gt=0)
    validation_fraction: float = Field(0.2, gt=0, lt=1)
    rmse_threshold: float = Field(0.05, gt=0)

    def build(self, seed: int) -> TrainParams:
        return TrainParams(seed=seed, **self.model_dump())


class SimulationConfig(_Strict):
    timestep_s: float = Field(0.01, gt=0)
    step_duration_s: float = Field(100.0, gt=0)
    step_heading_deg: float = 20.0
    cruise_speed_m_s: float = Field(0.2, ge=0)


class Config(_Strict):
    seed: int = 0
    vessel: VesselConfig = VesselConfig()
    thrusters: ThrusterConfig = ThrusterConfig()
    reference: ReferenceConfig = ReferenceConfig()
    teacher: TeacherConfig = TeacherConfig()
    dataset: DatasetConfig = DatasetConfig()
    training: TrainingConfig = TrainingConfig()
    simulation: SimulationConfig = SimulationConfig()

    def run_kwargs(self) -> dict:
        """Keyword arguments shared by every ``run_scenario`` call."""
        return dict(
            params=self.vessel.build(),
            layout=self.thrusters.layout(),
            alpha=self.thrusters.alpha(),
            reference=self.reference.build(),
        )


class InitialConfig(_Strict):
    u_m_s: float = 0.0
    v_m_s: float = 0.0
    r_deg_s: float = 0.0
    x_m: float = 0.0
    y_m: float = 0.0
    psi_deg: float = 0.0


class CommandConfig(_Strict):
    t_s: float = Field(ge=0)
    heading_deg: float
    x_m: float = 0.0
    y_m: float = 0.0


class ScenarioConfig(_Strict):
    name: str
    controller: Literal["teacher", "neural", "none"] = "teacher"
    duration_s: float = Field(gt=0)
    timestep_s: float = Field(0.01, gt=0)
    seed: int = 0
    cruise_speed_m_s: float = Field(0.0, ge=0)
    initial: InitialConfig = InitialConfig()
    schedule: list[CommandConfig] = []
    weights_file: Optional[str] = None

    @field_validator("schedule")
    @classmethod
    def _increasing(cls, v):
        times = [c.t_s for c in v]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"schedule times must be strictly increasing, got {times}")
        return v

    def build(self) -> Scenario:
        i = self.initial
        initial = ShipState(
            BodyVelocity(i.u_m_s, i.v_m_s, math.radians(i.r_deg_s)),
            EarthPose(i.x_m, i.y_m, math.radians(i.psi_deg)),
        )
        return Scenario(
            name=self.name,
            initial=initial,
            schedule=tuple(Command(c.t_s, math.radians(c.heading_deg), c.x_m, c.y_m) for c in self.schedule),
            controller=self.controller,
            duration=self.duration_s,
            timestep=self.timestep_s,
            seed=self.seed,
            cruise_speed=self.cruise_speed_m_s,
        )


def _format_errors(path, exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"  {loc}: {err['msg']}")
    return f"invalid {path}:\n" + "\n".join(parts)


def _read_yaml(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def load_config(path: str | Path | None = None) -> Config:
    """Load ``path``, else $SHIPNN_CONFIG, else built-in defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is None:
        return Config()
    try:
        return Config.model_validate(_read_yaml(path))
    except ValidationError as exc:
        raise ConfigError(_format_errors(path, exc)) from None


def load_scenario(path: str | Path) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(_read_yaml(path))
    except ValidationError as exc:
        raise ConfigError(_format_errors(path, exc)) from None


def dump_config(cfg: Config) -> str:
    return yaml.safe_dump(cfg.model_dump(mode="json"), sort_keys=False)
