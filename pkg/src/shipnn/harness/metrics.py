"""Scalar performance metrics of a run record."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class Metrics:
    max_heading_error_deg: float
    final_heading_error_deg: float
    max_heading_rate_error_deg_s: float
    final_heading_rate_error_deg_s: float
    # over the trailing window
    steady_state_error_deg: float
    steady_state_yaw_rate_deg_s: float
    overshoot_deg: float
    overshoot_pct: float
    settling_time_s: float
    max_thrust_ratio: float
    saturation_count: int
    track_angle_deg: float

    def as_dict(self) -> dict:
        return asdict(self)


def _wrap_deg(a: float) -> float:
    return (a + 180.0) % 360.0 - 180.0


def evaluate(record, final_window: float = 10.0, track_fraction: float = 0.2) -> Metrics:
    """Metrics of one run.

    Overshoot and settling are measured against the final desired heading;
    the track angle is the direction of the (x, y) displacement over the
    last ``track_fraction`` of the run relative to the final desired heading
    (NaN when the vessel barely moves).
    """
    if len(record) == 0:
        raise ValueError("cannot evaluate an empty record")
    t = record.t
    psi = record.eta[:, 2]
    psi_d = record.eta_d[:, 2]
    he = np.degrees(psi - psi_d)
    hre = np.degrees(record.nu[:, 2] - record.eta_d_dot[:, 2])

    psi_final = psi_d[-1]
    window = t >= t[-1] - final_window - 1e-9
    ss_err = float(np.degrees(np.max(np.abs(psi[window] - psi_final))))
    ss_rate = float(np.degrees(np.max(np.abs(record.nu[window, 2]))))

    step = psi_final - psi[0]
    if abs(step) > 1e-12:
        direction = math.copysign(1.0, step)
        overshoot = max(0.0, float(np.degrees(np.max(direction * (psi - psi_final)))))
        overshoot_pct = 100.0 * overshoot / abs(math.degrees(step))
        outside = np.nonzero(np.abs(psi - psi_final) > 0.02 * abs(step))[0]
        if len(outside) == 0:
            settling = 0.0
        elif outside[-1] == len(t) - 1:
            settling = math.inf
        else:
            settling = float(t[outside[-1] + 1] - t[0])
    else:
        overshoot = overshoot_pct = settling = 0.0

    n_track = max(2, int(round(track_fraction * len(t))))
    seg = record.eta[-1, :2] - record.eta[-n_track, :2]
    if float(np.hypot(*seg)) < 1e-9:
        track = math.nan
    else:
        track = _wrap_deg(math.degrees(math.atan2(seg[1], seg[0]) - psi_final))

    return Metrics(
        max_heading_error_deg=float(np.max(np.abs(he))),
        final_heading_error_deg=float(abs(he[-1])),
        max_heading_rate_error_deg_s=float(np.max(np.abs(hre))),
        final_heading_rate_error_deg_s=float(abs(hre[-1])),
        steady_state_error_deg=ss_err,
        steady_state_yaw_rate_deg_s=ss_rate,
        overshoot_deg=overshoot,
        overshoot_pct=overshoot_pct,
        settling_time_s=settling,
        max_thrust_ratio=float(np.max(np.abs(record.f)) / record.f_max),
        saturation_count=int(np.count_nonzero(record.saturated)),
        track_angle_deg=track,
    )
