"""One-hidden-layer tanh perceptron mapping tracking errors to thrust demand."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from shipnn.dynamics import GeneralizedForce, ShipState

FEATURE_NAMES = ("e_x", "e_y", "e_psi", "e_psi_dot", "u", "v", "r")
N_IN = len(FEATURE_NAMES)
N_OUT = 3
N_HIDDEN = 10
PARAM_NAMES = ("W1", "b1", "W2", "b2")


def features(state: ShipState, eta_d, eta_d_dot) -> np.ndarray:
    """[e_x, e_y, e_psi, e_psi_dot, u, v, r]; position errors in the Earth frame."""
    u, v, r = state.nu
    x, y, psi = state.eta
    return np.array(
        [eta_d[0] - x, eta_d[1] - y, eta_d[2] - psi, eta_d_dot[2] - r, u, v, r]
    )


@dataclass
class MlpController:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    input_mean: np.ndarray
    input_std: np.ndarray
    output_mean: np.ndarray
    output_std: np.ndarray

    def __post_init__(self):
        for name in ("W1", "b1", "W2", "b2", "input_mean", "input_std", "output_mean", "output_std"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        n_hidden, n_in = self.W1.shape
        n_out = self.W2.shape[0]
        expected = {
            "b1": (n_hidden,),
            "W2": (n_out, n_hidden),
            "b2": (n_out,),
            "input_mean": (n_in,),
            "input_std": (n_in,),
            "output_mean": (n_out,),
            "output_std": (n_out,),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if np.any(self.input_std <= 0.0) or np.any(self.output_std <= 0.0):
            raise ValueError("normalization standard deviations must be strictly positive")

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.W1.shape[1], self.W1.shape[0], self.W2.shape[0]

    @classmethod
    def initialize(
        cls,
        n_in: int = N_IN,
        n_hidden: int = N_HIDDEN,
        n_out: int = N_OUT,
        rng: np.random.Generator | None = None,
        input_stats=None,
        output_stats=None,
    ) -> "MlpController":
        """Uniform +-1/sqrt(fan_in) weights; zero biases."""
        rng = np.random.default_rng(0) if rng is None else rng
        lim1, lim2 = 1.0 / math.sqrt(n_in), 1.0 / math.sqrt(n_hidden)
        in_mean, in_std = input_stats if input_stats is not None else (np.zeros(n_in), np.ones(n_in))
        out_mean, out_std = output_stats if output_stats is not None else (np.zeros(n_out), np.ones(n_out))
        return cls(
            W1=rng.uniform(-lim1, lim1, size=(n_hidden, n_in)),
            b1=np.zeros(n_hidden),
            W2=rng.uniform(-lim2, lim2, size=(n_out, n_hidden)),
            b2=np.zeros(n_out),
            input_mean=in_mean,
            input_std=in_std,
            output_mean=out_mean,
            output_std=out_std,
        )

    def params(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def copy(self) -> "MlpController":
        return MlpController(**{k: np.array(v, copy=True) for k, v in vars(self).items()})

    def normalize(self, x):
        return (np.asarray(x, dtype=float) - self.input_mean) / self.input_std

    def denormalize_input(self, xn):
        return np.asarray(xn, dtype=float) * self.input_std + self.input_mean

    def normalize_output(self, y):
        return (np.asarray(y, dtype=float) - self.output_mean) / self.output_std

    def denormalize(self, z):
        return np.asarray(z, dtype=float) * self.output_std + self.output_mean


def _forward_normalized(net: MlpController, xn: np.ndarray):
    a = np.tanh(xn @ net.W1.T + net.b1)
    return a, a @ net.W2.T + net.b2


def forward(net: MlpController, x) -> np.ndarray:
    """Network output in force units. Accepts one feature vector or a batch (rows)."""
    _, z = _forward_normalized(net, net.normalize(x))
    return net.denormalize(z)


def control(net: MlpController, state: ShipState, eta_d, eta_d_dot) -> GeneralizedForce:
    return GeneralizedForce(*(float(t) for t in forward(net, features(state, eta_d, eta_d_dot))))


def _gradients(net: MlpController, xn: np.ndarray, dz: np.ndarray) -> dict[str, np.ndarray]:
    # dz: loss gradient w.r.t. the normalized output, one row per sample
    a = np.tanh(xn @ net.W1.T + net.b1)
    da = (dz @ net.W2) * (1.0 - a * a)
    return {
        "W1": da.T @ xn,
        "b1": da.sum(axis=0),
        "W2": dz.T @ a,
        "b2": dz.sum(axis=0),
    }


def backward(net: MlpController, x, target) -> dict[str, np.ndarray]:
    """Gradients of 0.5 * ||forward(x) - target||^2, summed over samples if batched."""
    xn = np.atleast_2d(net.normalize(x))
    _, z = _forward_normalized(net, xn)
    err = net.denormalize(z) - np.atleast_2d(np.asarray(target, dtype=float))
    return _gradients(net, xn, err * net.output_std)


def loss(net: MlpController, x, target) -> float:
    err = np.atleast_2d(forward(net, x)) - np.atleast_2d(np.asarray(target, dtype=float))
    return 0.5 * float(np.sum(err * err))
