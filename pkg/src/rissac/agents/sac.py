"""Soft actor-critic with a separate state-value network and twin Q critics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn import MLP, Adam, GaussianHead, sample_squashed, squashed_backward
from .replay import Batch, ReplayBuffer


@dataclass(frozen=True)
class SacConfig:
    alpha: float = 0.2
    gamma: float = 0.95
    tau: float = 0.005
    batch_size: int = 64
    target_update_interval: int = 1
    lr_q: float = 1e-4
    lr_pi: float = 1e-4
    lr_v: float = 1e-4
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
        if self.alpha < 0:
            errors.append(f"alpha must be >= 0 (got {self.alpha})")
        if self.batch_size < 1:
            errors.append(f"batch_size must be >= 1 (got {self.batch_size})")
        if self.target_update_interval < 1:
            errors.append("target_update_interval must be >= 1")
        if self.updates_per_step < 1:
            errors.append("updates_per_step must be >= 1")
        if min(self.lr_q, self.lr_pi, self.lr_v) < 0:
            errors.append("learning rates must be >= 0")
        if not self.hidden or min(self.hidden) < 1:
            errors.append(f"hidden must list positive widths (got {self.hidden})")
        if self.buffer_capacity < 1:
            errors.append("buffer_capacity must be >= 1")
        return errors


class SacAgent:
    """Policy ``pi``, value ``V`` with target copy, and critics ``Q1``/``Q2``.

    ``rng`` initialises all five networks and afterwards drives every
    stochastic choice the agent makes (policy noise, replay sampling).
    """

    def __init__(self, state_dim: int, action_dim: int, config: SacConfig, rng: np.random.Generator):
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.config = config
        self.rng = rng
        h = list(config.hidden)
        self.policy = MLP([state_dim, *h, 2 * action_dim], rng)
        self.q1 = MLP([state_dim + action_dim, *h, 1], rng)
        self.q2 = MLP([state_dim + action_dim, *h, 1], rng)
        self.v = MLP([state_dim, *h, 1], rng)
        self.v_target = self.v.copy()
        self.pi_opt = Adam([self.policy.flat], lr=config.lr_pi)
        self.q1_opt = Adam([self.q1.flat], lr=config.lr_q)
        self.q2_opt = Adam([self.q2.flat], lr=config.lr_q)
        self.v_opt = Adam([self.v.flat], lr=config.lr_v)
        self.buffer = ReplayBuffer(config.buffer_capacity, state_dim, action_dim)
        self.n_updates = 0

    # acting

    def head(self, states) -> GaussianHead:
        return GaussianHead.from_output(self.policy.forward(states))

    def act(self, state, deterministic: bool = False) -> np.ndarray:
        head = self.head(state)
        if deterministic:
            return np.tanh(head.mean)
        return sample_squashed(head, self.rng).action

    # critics

    def _min_q(self, states, actions) -> tuple[np.ndarray, np.ndarray]:
        x = np.concatenate([states, actions], axis=1)
        q1 = self.q1.forward(x)[:, 0]
        q2 = self.q2.forward(x)[:, 0]
        return np.minimum(q1, q2), q1 <= q2

    def q_target(self, batch: Batch) -> np.ndarray:
        """Soft Bellman target ``r + gamma * V_target(s')``."""
        return batch.rewards + self.config.gamma * self.v_target.forward(batch.next_states)[:, 0]

    @staticmethod
    def critic_loss_and_grads(net: MLP, inputs: np.ndarray, target: np.ndarray):
        """``0.5 * mean((net(inputs) - target)^2)`` and its parameter gradient."""
        out, cache = net.forward_cached(inputs)
        diff = out[:, 0] - target
        grads, _ = net.backward(cache, (diff / len(target))[:, None])
        return 0.5 * float(np.mean(diff * diff)), grads

    def update_q(self, batch: Batch) -> tuple[float, float]:
        target = self.q_target(batch)
        x = np.concatenate([batch.states, batch.actions], axis=1)
        losses = []
        for net, opt in ((self.q1, self.q1_opt), (self.q2, self.q2_opt)):
            loss, grads = self.critic_loss_and_grads(net, x, target)
            opt.step([MLP.flatten(grads)])
            losses.append(loss)
        return losses[0], losses[1]

    def value_target(self, states: np.ndarray, eps=None) -> np.ndarray:
        """``min Q(s, a) - alpha * log pi(a|s)`` with ``a`` freshly drawn from the policy."""
        sample = sample_squashed(self.head(states), self.rng, eps=eps)
        min_q, _ = self._min_q(states, sample.action)
        return min_q - self.config.alpha * sample.log_prob

    def update_value(self, batch: Batch) -> float:
        target = self.value_target(batch.states)
        loss, grads = self.critic_loss_and_grads(self.v, batch.states, target)
        self.v_opt.step([MLP.flatten(grads)])
        return loss

    def policy_loss_and_grads(self, states: np.ndarray, eps=None):
        """Reparameterised policy loss ``mean(alpha*log pi - min Q)`` and its gradient.

        ``eps`` fixes the Gaussian noise; by default it is drawn from the
        agent's stream.
        """
        alpha = self.config.alpha
        n = states.shape[0]
        out, p_cache = self.policy.forward_cached(states)
        head = GaussianHead.from_output(out)
        sample = sample_squashed(head, self.rng, eps=eps)
        x = np.concatenate([states, sample.action], axis=1)
        q1, c1 = self.q1.forward_cached(x)
        q2, c2 = self.q2.forward_cached(x)
        use_q1 = q1[:, 0] <= q2[:, 0]
        min_q = np.where(use_q1, q1[:, 0], q2[:, 0])
        loss = float(np.mean(alpha * sample.log_prob - min_q))

        g = -1.0 / n
        _, gx1 = self.q1.backward(c1, np.where(use_q1, g, 0.0)[:, None], params=False)
        _, gx2 = self.q2.backward(c2, np.where(use_q1, 0.0, g)[:, None], params=False)
        grad_action = (gx1 + gx2)[:, self.state_dim :]
        grad_out = squashed_backward(head, sample, grad_action, np.full(n, alpha / n))
        grads, _ = self.policy.backward(p_cache, grad_out)
        return loss, grads

    def update_policy(self, batch: Batch) -> float:
        loss, grads = self.policy_loss_and_grads(batch.states)
        self.pi_opt.step([MLP.flatten(grads)])
        return loss

    def soft_update_target(self) -> None:
        tau = self.config.tau
        self.v_target.flat *= 1.0 - tau
        self.v_target.flat += tau * self.v.flat

    def update(self, batch: Batch) -> dict[str, float]:
        """One round in the order Q, policy, value, target."""
        q1_loss, q2_loss = self.update_q(batch)
        pi_loss = self.update_policy(batch)
        v_loss = self.update_value(batch)
        self.n_updates += 1
        if self.n_updates % self.config.target_update_interval == 0:
            self.soft_update_target()
        return {"v_loss": v_loss, "q1_loss": q1_loss, "q2_loss": q2_loss, "pi_loss": pi_loss}

    @property
    def alpha(self) -> float:
        return self.config.alpha

    def networks(self) -> dict[str, MLP]:
        return {
            "policy": self.policy,
            "v": self.v,
            "v_target": self.v_target,
            "q1": self.q1,
            "q2": self.q2,
        }
