"""Acceptance suite. Each test reports one PASS/FAIL line, collected in the
terminal summary under "acceptance criteria"."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from shipnn.allocation import DEFAULT_ALPHA, allocate, build_H
from shipnn.dynamics import BodyVelocity, ShipState, VesselParams, coriolis_matrix, step_rk4
from shipnn.harness.config import Config
from shipnn.harness.pipeline import make_dataset, reproduce
from shipnn.harness.simulate import heading_step, run_scenario
from shipnn.neurocontrol.mlp import PARAM_NAMES, MlpController, backward, forward, loss

STEP = math.radians(20.0)
P = VesselParams()


def report(log, number, title, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number:2d}  {title}: {detail}"
    log.append(line)
    print(line)
    assert passed, line


def final_window(rec, seconds=10.0):
    return rec.t >= rec.t[-1] - seconds - 1e-9


@pytest.fixture(scope="module")
def runs(reproduced):
    return reproduced[0].records


def test_criterion_01_heading_error_bound(reproduced, runs, acceptance_log):
    net = reproduced[0].train_result.net
    t0 = time.perf_counter()
    rec = run_scenario(heading_step(20.0, controller="neural"), net=net)
    runtime = time.perf_counter() - t0
    np.testing.assert_array_equal(rec.eta, runs["step_+20_neural"].eta)
    worst = float(np.degrees(np.max(np.abs(rec.eta[:, 2] - rec.eta_d[:, 2]))))
    soft = "  [above soft target 0.6 deg]" if worst > 0.6 else ""
    report(
        acceptance_log, 1, "NN max heading error on 20 deg step",
        worst <= 1.0 and runtime < 5.0,
        f"{worst:.3f} deg (limit 1.0), run time {runtime:.2f} s (limit 5){soft}",
    )


def test_criterion_02_zero_steady_state_error(runs, acceptance_log):
    errs = {}
    for name in ("step_+20_teacher", "step_+20_neural"):
        rec = runs[name]
        w = final_window(rec)
        errs[name] = float(np.degrees(np.max(np.abs(rec.eta[w, 2] - STEP))))
    report(
        acceptance_log, 2, "steady-state heading error, final 10 s",
        all(e < 0.1 for e in errs.values()),
        ", ".join(f"{k.split('_')[-1]} {v:.4f} deg" for k, v in errs.items()) + " (limit 0.1)",
    )


def test_criterion_03_heading_rate(runs, acceptance_log):
    parts, ok = [], True
    for name in ("step_+20_teacher", "step_+20_neural"):
        rec = runs[name]
        final_rate = float(np.degrees(np.max(np.abs(rec.nu[final_window(rec), 2]))))
        peak_err = float(np.degrees(np.max(np.abs(rec.nu[:, 2] - rec.eta_d_dot[:, 2]))))
        ok &= final_rate < 0.05 and peak_err < 1.0
        parts.append(f"{name.split('_')[-1]} final |r| {final_rate:.4f} deg/s, peak rate error {peak_err:.3f} deg/s")
    report(acceptance_log, 3, "heading rate", ok, "; ".join(parts) + " (limits 0.05, 1.0)")


def test_criterion_04_critically_damped(runs, acceptance_log):
    overs = {}
    for name in ("step_+20_teacher", "step_+20_neural"):
        rec = runs[name]
        overs[name] = max(0.0, float(np.degrees(np.max(rec.eta[:, 2] - rec.eta_d[-1, 2]))))
    ref_over = max(0.0, float(np.max(runs["step_+20_teacher"].eta_d[:, 2]) - STEP))
    report(
        acceptance_log, 4, "no overshoot",
        all(v <= 0.5 for v in overs.values()) and ref_over <= 1e-9,
        ", ".join(f"{k.split('_')[-1]} {v:.4f} deg" for k, v in overs.items())
        + f" (limit 0.5); reference {ref_over:.1e} rad (limit 1e-9)",
    )


def test_criterion_05_no_saturation(runs, acceptance_log):
    count = sum(int(np.count_nonzero(r.saturated)) for r in runs.values())
    peak = max(float(np.max(np.abs(r.f))) for r in runs.values())
    report(
        acceptance_log, 5, "no thruster saturation", count == 0,
        f"{count} saturated steps over {len(runs)} runs, peak thrust {peak:.3f} N of 2.0",
    )


def test_criterion_06_parallel_track(runs, acceptance_log):
    angles = {}
    for name in ("step_+20_teacher", "step_+20_neural"):
        rec = runs[name]
        k = int(round(0.8 * (len(rec) - 1)))
        dx, dy = rec.eta[-1, :2] - rec.eta[k, :2]
        a = math.degrees(math.atan2(dy, dx) - rec.eta_d[-1, 2])
        angles[name] = (a + 180.0) % 360.0 - 180.0
    report(
        acceptance_log, 6, "track parallel to heading after turn",
        all(abs(a) < 1.0 for a in angles.values()),
        ", ".join(f"{k.split('_')[-1]} {v:+.3f} deg" for k, v in angles.items()) + " (limit 1.0)",
    )


def test_criterion_07_operating_point_matrix(acceptance_log):
    printed = np.array([[-1, -1, 0, 0], [0, 0, 1, 1], [0, 0, 0.407, 0.527]], dtype=float)
    H = build_H((math.pi, math.pi, math.pi / 2, math.pi / 2))
    report(
        acceptance_log, 7, "thrust matrix at operating angles", bool(np.array_equal(H, printed)),
        f"max entry difference {np.max(np.abs(H - printed)):.1e}",
    )


def test_criterion_08_allocation_round_trip(acceptance_log):
    rng = np.random.default_rng(8)
    H = build_H(DEFAULT_ALPHA)
    worst = 0.0
    for _ in range(1000):
        tau = H @ rng.uniform(-1.999, 1.999, size=4)
        cmd, _ = allocate(tau)
        worst = max(worst, float(np.max(np.abs(H @ cmd.f - tau))))
    report(acceptance_log, 8, "allocation round trip", worst < 1e-9, f"max residual {worst:.2e} (limit 1e-9)")


def _surge(h, duration):
    s = ShipState(BodyVelocity(1.0, 0.0, 0.0))
    for _ in range(int(round(duration / h))):
        s = step_rk4(s, (0.0, 0.0, 0.0), P, h)
    return s.nu.u


def test_criterion_09_dynamics_invariants(acceptance_log):
    rng = np.random.default_rng(9)
    exact = True
    for nu in rng.uniform(-5, 5, size=(1000, 3)):
        C = coriolis_matrix(nu, P)
        q = [Fraction(float(x)) for x in nu]
        exact &= sum(q[i] * Fraction(float(C[i, j])) * q[j] for i in range(3) for j in range(3)) == 0

    s = ShipState(BodyVelocity(0.8, -0.3, 0.4))
    energy = [P.kinetic_energy(s.nu)]
    for _ in range(2000):
        s = step_rk4(s, (0.0, 0.0, 0.0), P, 0.01)
        energy.append(P.kinetic_energy(s.nu))
    decreasing = bool(np.all(np.diff(energy) < 0))

    closed = math.exp(-6.3 / 19.0)
    order = math.log2(abs(_surge(0.01, 1.0) - closed) / abs(_surge(0.005, 1.0) - closed))
    fine = _surge(1e-5, 1.0)
    order_fine = math.log2(abs(_surge(0.1, 1.0) - fine) / abs(_surge(0.05, 1.0) - fine))
    decay_err = abs(_surge(0.01, 1.0) - closed)
    ok = exact and decreasing and 3.7 <= order <= 4.3 and 3.7 <= order_fine <= 4.3 and decay_err < 1e-6
    report(
        acceptance_log, 9, "dynamics invariants", ok,
        f"skew form exact {exact}, energy decreasing {decreasing}, RK4 order {order:.2f} "
        f"(fine reference {order_fine:.2f}), surge decay error {decay_err:.1e}",
    )


def test_criterion_10_gradient_oracle(acceptance_log):
    rng = np.random.default_rng(10)
    eps, worst = 1e-6, 0.0
    for _ in range(100):
        n_in, n_hidden = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        net = MlpController(
            W1=rng.normal(size=(n_hidden, n_in)), b1=rng.normal(size=n_hidden),
            W2=rng.normal(size=(3, n_hidden)), b2=rng.normal(size=3),
            input_mean=rng.normal(size=n_in), input_std=rng.uniform(0.5, 2, n_in),
            output_mean=rng.normal(size=3), output_std=rng.uniform(0.5, 2, 3),
        )
        x, y = rng.normal(size=n_in), rng.normal(size=3)
        g = backward(net, x, y)
        for name in PARAM_NAMES:
            arr = getattr(net, name)
            fd = np.zeros_like(arr)
            for idx in np.ndindex(arr.shape):
                old = arr[idx]
                arr[idx] = old + eps
                up = loss(net, x, y)
                arr[idx] = old - eps
                fd[idx] = (up - loss(net, x, y)) / (2 * eps)
                arr[idx] = old
            scale = max(np.max(np.abs(g[name])), np.max(np.abs(fd)), 1e-3)
            worst = max(worst, float(np.max(np.abs(g[name] - fd)) / scale))
    report(acceptance_log, 10, "backprop vs central differences", worst < 1e-6, f"max relative error {worst:.1e} (limit 1e-6)")


def test_criterion_11_cloning_fidelity(reproduced, runs, acceptance_log):
    result = reproduced[0]
    diff = float(np.degrees(np.max(np.abs(runs["step_+20_neural"].eta[:, 2] - runs["step_+20_teacher"].eta[:, 2]))))

    # rebuild the held-out split independently of the trainer
    cfg = Config()
    X, Y = make_dataset(cfg)
    order = np.random.default_rng(cfg.seed).permutation(len(X))
    val = order[: int(round(cfg.training.validation_fraction * len(X)))]
    err = forward(result.train_result.net, X[val]) - Y[val]
    ratio = np.sqrt(np.mean(err**2, axis=0)) / Y[val].std(axis=0)
    np.testing.assert_allclose(ratio, result.val_rmse_ratio, rtol=1e-9)
    report(
        acceptance_log, 11, "cloning fidelity",
        diff <= 0.5 and float(np.max(ratio)) < 0.05,
        f"closed-loop heading difference {diff:.4f} deg (limit 0.5), "
        f"validation RMSE/std {', '.join(f'{r:.4f}' for r in ratio)} (limit 0.05)",
    )


def test_criterion_12_determinism(reproduced, tmp_path, acceptance_log):
    first_dir = reproduced[1]
    reproduce(Config(), tmp_path)
    first = sorted(p.relative_to(first_dir) for p in first_dir.rglob("*") if p.is_file())
    second = sorted(p.relative_to(tmp_path) for p in tmp_path.rglob("*") if p.is_file())
    same = first == second and all((first_dir / p).read_bytes() == (tmp_path / p).read_bytes() for p in first)
    report(acceptance_log, 12, "byte-identical reruns", same, f"{len(first)} files compared")
