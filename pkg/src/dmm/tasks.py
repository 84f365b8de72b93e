"""Synthetic federated tasks that drive the simulator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from dmm.simulator import Context, iterate_training


@dataclass
class MeanEstimation:
    """Every client holds a fixed vector of norm at most ``radius``; the goal is their mean."""

    universe: int
    dimension: int
    radius: float = 1.0
    seed: int = 0
    data: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        v = rng.normal(size=(self.universe, self.dimension)) + 0.5
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        self.data = v / np.maximum(norms, 1e-12) * self.radius * rng.random((self.universe, 1))

    def __call__(self, T: int, roster) -> np.ndarray:
        return self.data[list(roster)]

    def true_prefix_sums(self, rosters) -> np.ndarray:
        return np.cumsum([self.data[list(r)].sum(axis=0) for r in rosters], axis=0)


@dataclass
class LinearRegression:
    """Clients hold ``(x, y)`` pairs from a noisy linear model and send clipped gradients."""

    universe: int
    dimension: int
    learning_rate: float = 0.5
    noise: float = 0.1
    seed: int = 0
    weights: np.ndarray = field(init=False)
    truth: np.ndarray = field(init=False, repr=False)
    features: np.ndarray = field(init=False, repr=False)
    labels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        self.truth = rng.normal(size=self.dimension) / np.sqrt(self.dimension)
        self.features = rng.normal(size=(self.universe, self.dimension)) / np.sqrt(self.dimension)
        self.labels = self.features @ self.truth + self.noise * rng.normal(size=self.universe)
        self.weights = np.zeros(self.dimension)

    def __call__(self, T: int, roster) -> np.ndarray:
        x, y = self.features[list(roster)], self.labels[list(roster)]
        resid = x @ self.weights - y
        return resid[:, None] * x

    def loss(self, w=None) -> float:
        w = self.weights if w is None else w
        return float(np.mean((self.features @ w - self.labels) ** 2))


def run_mean_estimation(ctx: Context, task: MeanEstimation, adversary=None):
    """Released prefix sums, their noiseless counterparts and per-iteration squared errors."""
    cfg = ctx.config
    rosters = [cfg.roster(T) for T in range(1, cfg.iterations + 1)]
    truth = task.true_prefix_sums(rosters)
    outs, transcripts = [], []
    for out, tr in iterate_training(ctx, task, adversary):
        outs.append(out)
        transcripts.append(tr)
    outs = np.array(outs)
    return outs, truth, np.sum((outs - truth) ** 2, axis=1), transcripts


def run_linear_regression(ctx: Context, task: LinearRegression, adversary=None):
    """Gradient descent driven by released prefix sums: ``w_T = w_0 - lr * prefix_T / n``."""
    cfg = ctx.config
    losses, transcripts = [], []
    w0 = task.weights.copy()
    for out, tr in iterate_training(ctx, task, adversary):
        task.weights = w0 - task.learning_rate * out / cfg.n
        losses.append(task.loss())
        transcripts.append(tr)
    return np.array(losses), transcripts
