import math

import numpy as np

from vcsel_cov.agent import ExplorationSchedule, QTable, train
from vcsel_cov.baseline import exhaustive_policy
from vcsel_cov.env import VCSELEnv


def test_argmax_per_state(warm_env):
    res = exhaustive_policy(warm_env)
    assert res.evaluations == 0  # cache already warm
    assert res.policy.action_idx == [int(np.argmax(r)) for r in res.rewards]
    assert res.policy.coverage == [float(r.max()) for r in res.rewards]


def test_cold_cache_counts_every_pair(cfg):
    res = exhaustive_policy(VCSELEnv(cfg))
    assert res.evaluations == 64


def test_upper_bounds_rl(warm_env):
    es = exhaustive_policy(warm_env).policy
    for seed in range(3):
        rl, _ = train(warm_env, QTable.zeros(4, 16), ExplorationSchedule(), 200, rng_seed=seed)
        assert all(e >= r for e, r in zip(es.coverage, rl.coverage))


def test_single_action_space(small_cfg):
    env = VCSELEnv(small_cfg.with_(divergences=(math.radians(9),)))
    res = exhaustive_policy(env)
    assert res.policy.action_idx == [0, 0, 0, 0]
    assert res.evaluations == 4


def test_consistent_with_oracle(warm_env):
    res = exhaustive_policy(warm_env)
    for s, a in enumerate(res.policy.action_idx):
        assert warm_env.reward_oracle(s, a) == res.policy.coverage[s]
