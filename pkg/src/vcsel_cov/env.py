"""MDP environment: one episode walks the receiver heights in order, each
step applies a divergence action and pays the resulting coverage."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .radio_map import coverage
from .scene import SceneConfig


@dataclass(frozen=True)
class EnvState:
    state_idx: int
    done: bool = False


class RewardCache:
    """N_S x N_A table of coverage rewards, filled on first touch."""

    def __init__(self, n_states: int, n_actions: int):
        self.values = np.zeros((n_states, n_actions))
        self.filled = np.zeros((n_states, n_actions), dtype=bool)

    def get(self, s: int, a: int) -> float | None:
        return float(self.values[s, a]) if self.filled[s, a] else None

    def put(self, s: int, a: int, value: float) -> None:
        if self.filled[s, a]:
            raise ContractError(f"cache entry ({s}, {a}) already filled")
        self.values[s, a] = value
        self.filled[s, a] = True


class VCSELEnv:
    def __init__(self, cfg: SceneConfig, use_cache: bool = True, seed: int | None = None):
        self.cfg = cfg
        self.heights = cfg.heights
        self.divergences = cfg.divergences
        self.n_states = len(self.heights)
        self.n_actions = len(self.divergences)
        self.use_cache = use_cache
        self.cache = RewardCache(self.n_states, self.n_actions)
        self.evaluations = 0
        self._rng = np.random.default_rng(seed)
        self._order = list(range(self.n_states))
        self._pos = 0
        self._done = True
        self._started = False

    def reset(self) -> EnvState:
        if self.cfg.traversal == "random":
            self._order = [int(i) for i in self._rng.permutation(self.n_states)]
        self._pos = 0
        self._done = False
        self._started = True
        return EnvState(self._order[0], False)

    @property
    def state(self) -> EnvState:
        return EnvState(self._order[self._pos], self._done)

    def reward_oracle(self, state_idx: int, action_idx: int) -> float:
        """Coverage reward for a (state, action) pair; never advances the episode."""
        if not 0 <= state_idx < self.n_states:
            raise IndexError(f"state index {state_idx} out of range")
        if not 0 <= action_idx < self.n_actions:
            raise IndexError(f"action index {action_idx} out of range")
        if self.use_cache:
            hit = self.cache.get(state_idx, action_idx)
            if hit is not None:
                return hit
        self.evaluations += 1
        value, _ = coverage(self.cfg, self.heights[state_idx], self.divergences[action_idx])
        if self.use_cache:
            self.cache.put(state_idx, action_idx, value)
        return value

    def step(self, action_idx: int) -> tuple[EnvState, float, bool]:
        if not self._started or self._done:
            raise ContractError("step() called on a finished episode; call reset()")
        if not 0 <= action_idx < self.n_actions:
            raise IndexError(f"action index {action_idx} out of range")
        s = self._order[self._pos]
        reward = self.reward_oracle(s, action_idx)
        if self._pos == self.n_states - 1:
            self._done = True
            return EnvState(s, True), reward, True
        self._pos += 1
        return EnvState(self._order[self._pos], False), reward, False

    def warm(self, max_workers: int = 1) -> None:
        """Fill every cache entry up front; the cache is read-only afterwards."""
        if not self.use_cache:
            raise ContractError("warm() needs the reward cache enabled")
        todo = [(s, a) for s in range(self.n_states) for a in range(self.n_actions)
                if not self.cache.filled[s, a]]
        if max_workers <= 1:
            for s, a in todo:
                self.reward_oracle(s, a)
            return
        def evaluate(pair):
            s, a = pair
            return coverage(self.cfg, self.heights[s], self.divergences[a])[0]
        with ThreadPoolExecutor(max_workers) as pool:
            values = list(pool.map(evaluate, todo))
        for (s, a), v in zip(todo, values):
            self.cache.put(s, a, v)
        self.evaluations += len(todo)

    def reward_table(self) -> np.ndarray:
        """Full N_S x N_A reward matrix (warms the cache)."""
        return np.array([[self.reward_oracle(s, a) for a in range(self.n_actions)]
                         for s in range(self.n_states)])
