"""Mini-batch momentum SGD cloning of the teacher."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from shipnn.neurocontrol.mlp import N_HIDDEN, PARAM_NAMES, MlpController, _forward_normalized, _gradients


class NonConvergenceError(RuntimeError):
    """Validation error stayed above the acceptance threshold."""

    def __init__(self, message: str, result: "TrainResult | None" = None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class TrainParams:
    n_hidden: int = N_HIDDEN
    learning_rate: float = 0.05
    momentum: float = 0.9
    lr_decay: float = 0.995  # per-epoch multiplier
    batch_size: int = 16
    max_epochs: int = 600
    validation_fraction: float = 0.2
    # max over outputs of validation RMSE / validation target std
    rmse_threshold: float = 0.05
    seed: int = 0


@dataclass
class TrainResult:
    net: MlpController
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = 0
    val_rmse_ratio: np.ndarray | None = None  # per output

    @property
    def best_val_loss(self) -> float:
        return min(self.val_loss)


def _stats(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = a.mean(axis=0)
    std = a.std(axis=0)
    # constant columns: leave them unscaled
    std = np.where(std > 1e-12, std, 1.0)
    return mean, std


def rmse_ratio(net: MlpController, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Per-output RMSE divided by the target std (std floored to 1 for constant targets)."""
    from shipnn.neurocontrol.mlp import forward

    err = forward(net, X) - Y
    rmse = np.sqrt(np.mean(err * err, axis=0))
    _, std = _stats(Y)
    return rmse / std


def train(X, Y, hp: TrainParams = TrainParams()) -> TrainResult:
    """Fit an MLP to (X, Y); returns the parameters of the best validation epoch."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if len(X) < 100:
        raise ValueError(f"need at least 100 samples, got {len(X)}")
    if len(X) != len(Y):
        raise ValueError("features and targets differ in length")

    rng = np.random.default_rng(hp.seed)
    order = rng.permutation(len(X))
    n_val = int(round(hp.validation_fraction * len(X)))
    val_idx, tr_idx = order[:n_val], order[n_val:]
    Xtr, Ytr, Xval, Yval = X[tr_idx], Y[tr_idx], X[val_idx], Y[val_idx]

    net = MlpController.initialize(
        X.shape[1], hp.n_hidden, Y.shape[1], rng=rng, input_stats=_stats(Xtr), output_stats=_stats(Ytr)
    )
    xn_tr, zt_tr = net.normalize(Xtr), net.normalize_output(Ytr)
    xn_val, zt_val = net.normalize(Xval), net.normalize_output(Yval)

    velocity = {k: np.zeros_like(v) for k, v in net.params().items()}
    best = net.copy()
    result = TrainResult(best)
    best_val = np.inf

    for epoch in range(hp.max_epochs):
        lr = hp.learning_rate * hp.lr_decay**epoch
        perm = rng.permutation(len(xn_tr))
        for start in range(0, len(perm), hp.batch_size):
            b = perm[start : start + hp.batch_size]
            _, z = _forward_normalized(net, xn_tr[b])
            # mean squared error over the batch, normalized output space
            grads = _gradients(net, xn_tr[b], (z - zt_tr[b]) / len(b))
            for name in PARAM_NAMES:
                velocity[name] = hp.momentum * velocity[name] - lr * grads[name]
                setattr(net, name, getattr(net, name) + velocity[name])

        _, z_tr = _forward_normalized(net, xn_tr)
        _, z_val = _forward_normalized(net, xn_val)
        tr_loss = float(np.mean((z_tr - zt_tr) ** 2))
        val_loss = float(np.mean((z_val - zt_val) ** 2))
        if not np.isfinite(tr_loss):
            raise NonConvergenceError(f"training diverged at epoch {epoch}")
        result.train_loss.append(tr_loss)
        result.val_loss.append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best = net.copy()
            result.best_epoch = epoch

    result.net = best
    result.val_rmse_ratio = rmse_ratio(best, Xval, Yval)
    worst = float(np.max(result.val_rmse_ratio))
    if worst >= hp.rmse_threshold:
        raise NonConvergenceError(
            f"validation RMSE reached {worst:.4f} of target std after {hp.max_epochs} epochs; "
            f"threshold is {hp.rmse_threshold}",
            result,
        )
    return result
