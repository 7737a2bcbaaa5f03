"""Grid / random search for sliding-mode gains."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from shipnn.teacher.law import SmcGains

MAX_HEADING_ERROR_DEG = 1.0


class SearchFailure(RuntimeError):
    """No candidate met the heading-error bound."""


@dataclass(frozen=True)
class SearchSpace:
    Lambda: Sequence[tuple[float, float, float]]
    K: Sequence[tuple[float, float, float]]
    phi: Sequence[tuple[float, float, float]]
    compensate_model: bool = True

    def candidates(self) -> list[SmcGains]:
        return [
            SmcGains(lam, k, ph, self.compensate_model)
            for lam, k, ph in itertools.product(self.Lambda, self.K, self.phi)
        ]


@dataclass
class Evaluation:
    gains: SmcGains
    cost: float
    ise: float
    effort: float
    max_heading_error_deg: float
    saturations: int
    feasible: bool


@dataclass
class TuningResult:
    gains: SmcGains
    cost: float
    evaluations: list[Evaluation] = field(default_factory=list)


def default_search_space() -> SearchSpace:
    """Heading-axis grid around the shipped gains; x/y gains held fixed."""
    return SearchSpace(
        Lambda=[(0.1, 0.3, lam) for lam in (0.2, 0.4, 0.8)],
        K=[(3.8, 0.4, k) for k in (0.1, 0.2)],
        phi=[(0.5, 0.5, ph) for ph in (0.01, 0.02, 0.04)],
    )


def evaluate_candidate(gains: SmcGains, scenarios, effort_weight: float = 1e-2, **run_kwargs) -> Evaluation:
    from shipnn.harness.simulate import run_scenario

    ise = effort = 0.0
    max_err = 0.0
    saturations = 0
    for sc in scenarios:
        rec = run_scenario(sc, gains=gains, **run_kwargs)
        err = rec.eta[:, 2] - rec.eta_d[:, 2]
        h = sc.timestep
        ise += float(np.sum(err * err) * h)
        effort += float(np.sum(rec.tau * rec.tau) * h)
        max_err = max(max_err, float(np.degrees(np.max(np.abs(err)))))
        saturations += int(rec.saturated.sum())
    cost = ise + effort_weight * effort
    feasible = max_err <= MAX_HEADING_ERROR_DEG and saturations == 0
    return Evaluation(gains, cost, ise, effort, max_err, saturations, feasible)


def tune_smc(
    scenarios,
    space: SearchSpace | None = None,
    n_samples: int | None = None,
    seed: int = 0,
    effort_weight: float = 1e-2,
    **run_kwargs,
) -> TuningResult:
    """Pick the feasible candidate of lowest cost.

    Feasible means max heading error within 1 deg and no actuator saturation
    on every scenario. ``n_samples`` draws a seeded random subset of the grid
    instead of the full product.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ValueError("tuning needs at least one scenario")
    space = default_search_space() if space is None else space
    candidates = space.candidates()
    if n_samples is not None and n_samples < len(candidates):
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(len(candidates), size=n_samples, replace=False))
        candidates = [candidates[i] for i in idx]

    evaluations = [
        evaluate_candidate(g, scenarios, effort_weight=effort_weight, **run_kwargs) for g in candidates
    ]
    feasible = [e for e in evaluations if e.feasible]
    if not feasible:
        best_err = min(e.max_heading_error_deg for e in evaluations)
        raise SearchFailure(
            f"none of {len(evaluations)} candidates kept heading error within "
            f"{MAX_HEADING_ERROR_DEG} deg without saturating (best max error {best_err:.3f} deg)"
        )
    # first minimum wins, so ties resolve by grid order
    best = min(feasible, key=lambda e: e.cost)
    return TuningResult(best.gains, best.cost, evaluations)


def write_results_csv(result: TuningResult, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "lambda_x_per_s", "lambda_y_per_s", "lambda_psi_per_s",
                "k_x_n", "k_y_n", "k_psi_nm",
                "phi_x", "phi_y", "phi_psi",
                "cost", "ise_rad2_s", "effort", "max_heading_error_deg", "saturations", "feasible", "selected",
            ]
        )
        for e in result.evaluations:
            g = e.gains
            w.writerow(
                [*map(repr, g.Lambda), *map(repr, g.K), *map(repr, g.phi),
                 repr(e.cost), repr(e.ise), repr(e.effort), repr(e.max_heading_error_deg),
                 e.saturations, int(e.feasible), int(g == result.gains)]
            )
    tmp.replace(path)

