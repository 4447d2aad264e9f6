"""Exhaustive search over the divergence actions of every state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .agent import Policy, policy_from_actions
from .env import VCSELEnv


@dataclass
class ExhaustiveResult:
    policy: Policy
    evaluations: int  # coverage computations actually run (0 on a warm cache)
    rewards: np.ndarray  # N_S x N_A


def exhaustive_policy(env: VCSELEnv) -> ExhaustiveResult:
    """Per-state argmax of coverage over every action (lowest index on ties).

    Shares ``env``'s reward cache, so a later RL run sees identical rewards.
    """
    if env.n_states == 0 or env.n_actions == 0:
        raise ValueError("state and action spaces must be non-empty")
    before = env.evaluations
    rewards = env.reward_table()
    spent = env.evaluations - before
    return ExhaustiveResult(policy_from_actions(env, np.argmax(rewards, axis=1)), spent, rewards)
