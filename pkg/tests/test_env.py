import math

import numpy as np
import pytest

from vcsel_cov.env import RewardCache, VCSELEnv
from vcsel_cov.errors import ContractError
from vcsel_cov.scene import SceneConfig


def tiny_cfg(**kw):
    base = dict(
        grid_step=2.0,
        n_tx_side=3,
        n0=1e-9,
        beam_width_scale=1.0,
        sinr_domain="optical",
        divergences=tuple(math.radians(t) for t in (8, 10, 12)),
    )
    base.update(kw)
    return SceneConfig(**base)


class TestEpisode:
    def test_fresh_reset(self):
        env = VCSELEnv(tiny_cfg())
        s = env.reset()
        assert s.state_idx == 0 and not s.done
        assert env.reset() == s

    def test_walks_heights_in_order(self):
        env = VCSELEnv(tiny_cfg())
        env.reset()
        seen = []
        done = False
        while not done:
            state, _, done = env.step(1)
            seen.append((state.state_idx, done))
        assert seen == [(1, False), (2, False), (3, False), (3, True)]

    def test_reset_after_trajectory(self):
        env = VCSELEnv(tiny_cfg())
        env.reset()
        env.step(0)
        env.step(2)
        assert env.reset().state_idx == 0

    def test_step_after_done(self):
        env = VCSELEnv(tiny_cfg(heights=(1.0,)))
        env.reset()
        _, _, done = env.step(0)
        assert done
        with pytest.raises(ContractError):
            env.step(0)

    def test_step_before_reset(self):
        with pytest.raises(ContractError):
            VCSELEnv(tiny_cfg()).step(0)

    @pytest.mark.parametrize("a", [-1, 3])
    def test_bad_action(self, a):
        env = VCSELEnv(tiny_cfg())
        env.reset()
        with pytest.raises(IndexError):
            env.step(a)

    def test_transitions_ignore_action(self):
        for s in range(4):
            nxt = set()
            for a in range(3):
                env = VCSELEnv(tiny_cfg())
                env.reset()
                for _ in range(s):
                    env.step(0)
                st, _, done = env.step(a)
                nxt.add((st.state_idx, done))
            assert len(nxt) == 1

    def test_episode_return_is_sum_of_rewards(self):
        env = VCSELEnv(tiny_cfg())
        actions = [2, 0, 1, 1]
        env.reset()
        total = sum(env.step(a)[1] for a in actions)
        assert total == sum(env.reward_oracle(s, a) for s, a in enumerate(actions))

    def test_random_traversal_visits_every_height(self):
        env = VCSELEnv(tiny_cfg(traversal="random"), seed=3)
        for _ in range(5):
            order = [env.reset().state_idx]
            done = False
            while not done:
                st, _, done = env.step(0)
                if not done:
                    order.append(st.state_idx)
            assert sorted(order) == [0, 1, 2, 3]


class TestRewardCache:
    def test_oracle_matches_step(self):
        env = VCSELEnv(tiny_cfg())
        env.reset()
        _, r, _ = env.step(2)
        assert r == env.reward_oracle(0, 2)

    def test_second_call_is_hit(self):
        env = VCSELEnv(tiny_cfg())
        env.reward_oracle(1, 1)
        env.reward_oracle(1, 1)
        assert env.evaluations == 1

    def test_full_default_sweep_counts_64(self, cfg):
        env = VCSELEnv(cfg)
        env.reward_table()
        assert env.evaluations == 64
        env.reward_table()
        assert env.evaluations == 64

    def test_cache_transparency(self):
        a = VCSELEnv(tiny_cfg()).reward_table()
        env = VCSELEnv(tiny_cfg(), use_cache=False)
        b = env.reward_table()
        assert a.tobytes() == b.tobytes()
        assert env.evaluations == 12

    def test_parallel_warm_matches_sequential(self):
        seq = VCSELEnv(tiny_cfg())
        seq.warm()
        par = VCSELEnv(tiny_cfg())
        par.warm(max_workers=4)
        assert seq.cache.values.tobytes() == par.cache.values.tobytes()
        assert par.evaluations == 12

    def test_warm_requires_cache(self):
        with pytest.raises(ContractError):
            VCSELEnv(tiny_cfg(), use_cache=False).warm()

    def test_entries_are_write_once(self):
        c = RewardCache(2, 2)
        c.put(0, 1, 50.0)
        with pytest.raises(ContractError):
            c.put(0, 1, 51.0)
        assert c.get(0, 1) == 50.0 and c.get(1, 1) is None

    @pytest.mark.parametrize("s, a", [(4, 0), (0, 16), (-1, 0)])
    def test_oracle_bounds(self, warm_env, s, a):
        with pytest.raises(IndexError):
            warm_env.reward_oracle(s, a)

    def test_rewards_are_percentages(self, warm_env):
        table = warm_env.reward_table()
        assert table.shape == (4, 16)
        assert np.all((table >= 0) & (table <= 100))
