"""Tabular Q-learning with epsilon-greedy exploration and exponential
epsilon decay."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .env import VCSELEnv

MA_WINDOW = 50
POLICY_HEADER = ["height_m", "theta_deg", "coverage_pct"]
LOG_HEADER = ["episode", "epsilon", "mean_reward", "ma50"]


@dataclass
class QTable:
    q: np.ndarray
    alpha: float = 0.1
    gamma: float = 0.9

    @classmethod
    def zeros(cls, n_states: int, n_actions: int, alpha: float = 0.1, gamma: float = 0.9) -> "QTable":
        if not 0.0 <= gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        return cls(np.zeros((n_states, n_actions)), alpha, gamma)

    def greedy(self) -> np.ndarray:
        return np.argmax(self.q, axis=1)


@dataclass(frozen=True)
class ExplorationSchedule:
    eps_max: float = 1.0
    eps_min: float = 0.01
    lam: float = 0.005

    def __post_init__(self):
        if not 0.0 <= self.eps_min <= self.eps_max <= 1.0:
            raise ValueError("need 0 <= eps_min <= eps_max <= 1")
        if self.lam <= 0:
            raise ValueError("decay rate must be positive")


def epsilon(schedule: ExplorationSchedule, n_ep: int) -> float:
    return schedule.eps_min + (schedule.eps_max - schedule.eps_min) * math.exp(-schedule.lam * n_ep)


def select_action(q_row, eps: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy choice; exploitation breaks ties towards the lowest index."""
    if rng.random() < eps:
        return int(rng.integers(len(q_row)))
    return int(np.asarray(q_row).argmax())


def update(q: QTable, s: int, a: int, reward: float, s_next: int, done: bool) -> None:
    if done:
        target = reward
    else:
        target = reward + q.gamma * float(q.q[s_next].max())
    q.q[s, a] += q.alpha * (target - q.q[s, a])


@dataclass
class TrainLog:
    episode: list[int] = field(default_factory=list)
    epsilon: list[float] = field(default_factory=list)
    mean_reward: list[float] = field(default_factory=list)
    ma50: list[float] = field(default_factory=list)

    def append(self, n: int, eps: float, mean_reward: float) -> None:
        self.episode.append(n)
        self.epsilon.append(eps)
        self.mean_reward.append(mean_reward)
        window = self.mean_reward[-MA_WINDOW:]
        self.ma50.append(sum(window) / len(window))

    def __len__(self):
        return len(self.episode)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(LOG_HEADER)
            for row in zip(self.episode, self.epsilon, self.mean_reward, self.ma50):
                w.writerow([row[0]] + [f"{v:.10g}" for v in row[1:]])

    @classmethod
    def from_csv(cls, path: str | Path) -> "TrainLog":
        log = cls()
        with open(path, newline="") as fh:
            for r in csv.DictReader(fh):
                log.episode.append(int(r["episode"]))
                log.epsilon.append(float(r["epsilon"]))
                log.mean_reward.append(float(r["mean_reward"]))
                log.ma50.append(float(r["ma50"]))
        return log


@dataclass
class Policy:
    heights: list[float]
    action_idx: list[int]
    thetas: list[float]  # radians
    coverage: list[float]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(POLICY_HEADER)
            for h, t, c in zip(self.heights, self.thetas, self.coverage):
                w.writerow([f"{h:.10g}", f"{math.degrees(t):.10g}", f"{c:.10g}"])

    @staticmethod
    def read_rows(path: str | Path) -> list[tuple[float, float, float]]:
        """(height_m, theta_deg, coverage_pct) rows of a policy-schema CSV."""
        with open(path, newline="") as fh:
            return [
                (float(r["height_m"]), float(r["theta_deg"]), float(r["coverage_pct"]))
                for r in csv.DictReader(fh)
            ]


def policy_from_actions(env: VCSELEnv, actions) -> Policy:
    actions = [int(a) for a in actions]
    return Policy(
        heights=list(env.heights),
        action_idx=actions,
        thetas=[env.divergences[a] for a in actions],
        coverage=[env.reward_oracle(s, a) for s, a in enumerate(actions)],
    )


def train(
    env: VCSELEnv,
    q: QTable,
    schedule: ExplorationSchedule,
    n_episodes: int,
    rng_seed: int | None = 0,
    early_stop: bool = False,
    tol: float = 1e-6,
    patience: int = 100,
) -> tuple[Policy, TrainLog]:
    """Run epsilon-greedy Q-learning for ``n_episodes`` episodes.

    Episodes are numbered from 1 and epsilon is recomputed once per
    episode. With ``early_stop`` training ends once max |dQ| stays below
    ``tol`` for ``patience`` consecutive episodes.
    """
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    rng = np.random.default_rng(rng_seed)
    log = TrainLog()
    quiet = 0
    for n in range(1, n_episodes + 1):
        state = env.reset()
        eps = epsilon(schedule, n)
        before = q.q.copy() if early_stop else None
        total, steps = 0.0, 0
        done = False
        while not done:
            s = state.state_idx
            a = select_action(q.q[s], eps, rng)
            state, reward, done = env.step(a)
            update(q, s, a, reward, state.state_idx, done)
            total += reward
            steps += 1
        log.append(n, eps, total / steps)
        if early_stop:
            quiet = quiet + 1 if np.max(np.abs(q.q - before)) < tol else 0
            if quiet >= patience:
                break
    return policy_from_actions(env, q.greedy()), log
