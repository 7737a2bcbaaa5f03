"""Thruster configuration matrix and force allocation.

Four azimuth thrusters, two at the stern (1, 2) and two at the bow (3, 4).
Thrusters 3 and 4 share one azimuth angle. At the operating angles
(pi, pi, pi/2, pi/2) surge is produced by 1 and 2 only, sway and yaw by 3
and 4 only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from shipnn.dynamics import GeneralizedForce

# operating azimuth angles, rad
DEFAULT_ALPHA = (math.pi, math.pi, math.pi / 2, math.pi / 2)


class AngleConstraintError(ValueError):
    """Bow thrusters 3 and 4 were given different azimuth angles."""


class RankDeficiencyError(ValueError):
    """The configuration matrix cannot realize an arbitrary 3-DOF force."""


@dataclass(frozen=True)
class ThrusterLayout:
    moment_arms: tuple[float, float, float, float] = (0.497, 0.497, 0.407, 0.527)
    phase_shifts: tuple[float, float] = (0.0, 0.0)
    f_max: float = 2.0  # N
    f_rate_max: float = 10.0  # N/s

    def __post_init__(self):
        if len(self.moment_arms) != 4 or any(a <= 0.0 for a in self.moment_arms):
            raise ValueError(f"need four strictly positive moment arms, got {self.moment_arms}")
        if len(self.phase_shifts) != 2:
            raise ValueError(f"need two phase shifts, got {self.phase_shifts}")
        if not self.f_max > 0.0:
            raise ValueError(f"f_max must be positive, got {self.f_max}")
        if not self.f_rate_max > 0.0:
            raise ValueError(f"f_rate_max must be positive, got {self.f_rate_max}")


class ThrusterCommand(NamedTuple):
    f: np.ndarray  # thrust magnitudes, N
    alpha: tuple[float, float, float, float]  # azimuth angles, rad


def build_H(alpha, layout: ThrusterLayout = ThrusterLayout()) -> np.ndarray:
    """3x4 configuration matrix with tau = H(alpha) f."""
    a1, a2, a3, a4 = (float(a) for a in alpha)
    if abs(a3 - a4) > 1e-12:
        raise AngleConstraintError(f"alpha3 must equal alpha4, got {a3} and {a4}")
    l1, l2, l3, l4 = layout.moment_arms
    th1, th2 = layout.phase_shifts
    H = np.array(
        [
            [math.cos(a1), math.cos(a2), math.cos(a3), math.cos(a4)],
            [math.sin(a1), math.sin(a2), math.sin(a3), math.sin(a4)],
            [
                l1 * math.sin(a1 - th1),
                l2 * math.sin(a2 - th2),
                l3 * math.sin(a3),
                l4 * math.sin(a4),
            ],
        ]
    )
    # cos(pi/2) and sin(pi) come out as ~1e-16; snap them so the operating
    # point reproduces the integer entries exactly
    H[np.abs(H) < 1e-15] = 0.0
    return H


def forces_to_tau(cmd: ThrusterCommand, layout: ThrusterLayout = ThrusterLayout()) -> GeneralizedForce:
    return GeneralizedForce(*(build_H(cmd.alpha, layout) @ np.asarray(cmd.f, dtype=float)))


def allocation_matrix(alpha, layout: ThrusterLayout = ThrusterLayout()) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of H(alpha); raises if H is rank deficient."""
    H = build_H(alpha, layout)
    if np.linalg.matrix_rank(H) < 3:
        raise RankDeficiencyError(f"H(alpha) has rank < 3 at alpha={tuple(alpha)}")
    return np.linalg.pinv(H)


def limit_forces(f, layout: ThrusterLayout, previous=None, h: float | None = None):
    """Clip to +-f_max, then to the slew window around ``previous``.

    Returns (limited forces, saturated flag).
    """
    f = np.asarray(f, dtype=float)
    limited = np.clip(f, -layout.f_max, layout.f_max)
    if previous is not None:
        if h is None or not h > 0.0:
            raise ValueError("slew limiting needs a positive timestep")
        prev = np.asarray(previous, dtype=float)
        step = layout.f_rate_max * h
        limited = np.clip(limited, prev - step, prev + step)
    return limited, bool(np.any(limited != f))


def allocate(
    tau,
    alpha=DEFAULT_ALPHA,
    layout: ThrusterLayout = ThrusterLayout(),
    previous: ThrusterCommand | None = None,
    h: float | None = None,
) -> tuple[ThrusterCommand, bool]:
    """Minimum-norm thrust for ``tau`` at fixed angles, then actuator limits.

    With ``previous=None`` only the magnitude limit applies.
    """
    f = allocation_matrix(alpha, layout) @ np.asarray(tau, dtype=float)
    prev = None if previous is None else previous.f
    f, saturated = limit_forces(f, layout, prev, h)
    return ThrusterCommand(f, tuple(float(a) for a in alpha)), saturated
