"""Episode loop shared by SAC and DDPG, plus deterministic evaluation rollouts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channel import ChannelRealization
from ..env import BeamformingEnv, EnvConfig

LOSS_NAMES = ("v_loss", "q1_loss", "q2_loss", "pi_loss")


class DivergenceError(FloatingPointError):
    """A loss or reward became non-finite during training."""


@dataclass
class EpisodeStats:
    episode: int
    mean_reward: float
    losses: dict[str, float] = field(default_factory=dict)
    alpha: float = 0.0

    def row(self) -> dict[str, float]:
        out = {"episode": self.episode, "mean_reward": self.mean_reward}
        for name in LOSS_NAMES:
            out[name] = self.losses.get(name, float("nan"))
        out["alpha"] = self.alpha
        return out


def train(agent, env: BeamformingEnv, episodes: int, on_episode=None) -> list[EpisodeStats]:
    """Run ``episodes`` episodes, updating after every environment step.

    Per step: act stochastically, step the env, store the transition, then
    (once the buffer holds a batch) run ``updates_per_step`` update rounds.
    Returns one :class:`EpisodeStats` per episode; losses are episode means
    over the steps that performed an update.
    """
    cfg = agent.config
    trace: list[EpisodeStats] = []
    for ep in range(episodes):
        state = env.reset()
        rewards = []
        loss_sums: dict[str, float] = {}
        n_updates = 0
        while not env.episode_done:
            action = agent.act(state)
            next_state, reward = env.step(action)
            if not np.isfinite(reward):
                raise DivergenceError(f"non-finite reward at episode {ep}")
            agent.buffer.push(state, action, reward, next_state)
            rewards.append(reward)
            state = next_state
            for _ in range(cfg.updates_per_step):
                batch = agent.buffer.sample(cfg.batch_size, agent.rng)
                if batch is None:
                    break
                losses = agent.update(batch)
                for k, v in losses.items():
                    if not np.isfinite(v):
                        raise DivergenceError(f"{k} became non-finite at episode {ep}")
                    loss_sums[k] = loss_sums.get(k, 0.0) + v
                n_updates += 1
        losses = {k: v / n_updates for k, v in loss_sums.items()}
        stats = EpisodeStats(ep, float(np.mean(rewards)), losses, agent.alpha)
        trace.append(stats)
        if on_episode is not None:
            on_episode(stats)
    return trace


def evaluate_agent(
    agent, env_cfg: EnvConfig, channels: list[ChannelRealization], steps: int | None = None
) -> np.ndarray:
    """Mean sum-rate of a deterministic rollout on each given channel.

    Rollouts run in a private env pinned to each supplied realization, so no
    channel stream is consumed and training envs are left untouched.
    """
    env = BeamformingEnv(env_cfg, rng=None)
    steps = env_cfg.steps_per_episode if steps is None else steps
    rates = np.empty(len(channels))
    for i, chan in enumerate(channels):
        state = env.reset(channel=chan)
        total = 0.0
        for _ in range(steps):
            action = agent.act(state, deterministic=True)
            total += env.evaluate(action)
            state = np.concatenate([action, state[env.action_dim :]])
        rates[i] = total / steps
    return rates
