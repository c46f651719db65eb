"""Deterministic policy gradient baseline: tanh actor, single critic, target copies of both."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn import MLP, Adam
from .replay import Batch, ReplayBuffer


@dataclass(frozen=True)
class DdpgConfig:
    gamma: float = 0.95
    tau: float = 0.005
    batch_size: int = 64
    lr_actor: float = 1e-4
    lr_critic: float = 1e-4
    noise_std: float = 0.1
    updates_per_step: int = 1
    hidden: tuple[int, ...] = (256, 256)
    buffer_capacity: int = 1_000_000

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ValueError("; ".join(errors))

    def validate(self) -> list[str]:
        errors = []
        if not 0.0 < self.gamma < 1.0:
            errors.append(f"gamma must lie in (0, 1) (got {self.gamma})")
        if not 0.0 <= self.tau <= 1.0:
            errors.append(f"tau must lie in [0, 1] (got {self.tau})")
        if self.noise_std < 0:
            errors.append(f"noise_std must be >= 0 (got {self.noise_std})")
        if self.batch_size < 1 or self.updates_per_step < 1 or self.buffer_capacity < 1:
            errors.append("batch_size, updates_per_step and buffer_capacity must be >= 1")
        if min(self.lr_actor, self.lr_critic) < 0:
            errors.append("learning rates must be >= 0")
        if not self.hidden or min(self.hidden) < 1:
            errors.append(f"hidden must list positive widths (got {self.hidden})")
        return errors


class DdpgAgent:
    def __init__(self, state_dim: int, action_dim: int, config: DdpgConfig, rng: np.random.Generator):
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.config = config
        self.rng = rng
        h = list(config.hidden)
        self.actor = MLP([state_dim, *h, action_dim], rng)
        self.critic = MLP([state_dim + action_dim, *h, 1], rng)
        self.actor_target = self.actor.copy()
        self.critic_target = self.critic.copy()
        self.actor_opt = Adam([self.actor.flat], lr=config.lr_actor)
        self.critic_opt = Adam([self.critic.flat], lr=config.lr_critic)
        self.buffer = ReplayBuffer(config.buffer_capacity, state_dim, action_dim)
        self.n_updates = 0

    def act(self, state, deterministic: bool = False) -> np.ndarray:
        a = np.tanh(self.actor.forward(state))
        if deterministic or self.config.noise_std == 0.0:
            return a
        noise = self.config.noise_std * self.rng.standard_normal(a.shape)
        return np.clip(a + noise, -1.0, 1.0)

    def update_critic(self, batch: Batch) -> float:
        next_a = np.tanh(self.actor_target.forward(batch.next_states))
        q_next = self.critic_target.forward(np.concatenate([batch.next_states, next_a], axis=1))
        target = batch.rewards + self.config.gamma * q_next[:, 0]
        out, cache = self.critic.forward_cached(np.concatenate([batch.states, batch.actions], axis=1))
        diff = out[:, 0] - target
        grads, _ = self.critic.backward(cache, (diff / len(batch))[:, None])
        self.critic_opt.step([MLP.flatten(grads)])
        return 0.5 * float(np.mean(diff * diff))

    def update_actor(self, batch: Batch) -> float:
        n = len(batch)
        pre, a_cache = self.actor.forward_cached(batch.states)
        a = np.tanh(pre)
        q, c_cache = self.critic.forward_cached(np.concatenate([batch.states, a], axis=1))
        _, gx = self.critic.backward(c_cache, np.full((n, 1), -1.0 / n), params=False)
        grad_pre = gx[:, self.state_dim :] * (1.0 - a * a)
        grads, _ = self.actor.backward(a_cache, grad_pre)
        self.actor_opt.step([MLP.flatten(grads)])
        return -float(np.mean(q))

    def soft_update_targets(self) -> None:
        tau = self.config.tau
        for tgt_net, net in ((self.actor_target, self.actor), (self.critic_target, self.critic)):
            tgt_net.flat *= 1.0 - tau
            tgt_net.flat += tau * net.flat

    def update(self, batch: Batch) -> dict[str, float]:
        q_loss = self.update_critic(batch)
        pi_loss = self.update_actor(batch)
        self.soft_update_targets()
        self.n_updates += 1
        return {"q1_loss": q_loss, "pi_loss": pi_loss}

    @property
    def alpha(self) -> float:
        return 0.0

    def networks(self) -> dict[str, MLP]:
        return {
            "actor": self.actor,
            "critic": self.critic,
            "actor_target": self.actor_target,
            "critic_target": self.critic_target,
        }
