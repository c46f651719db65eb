from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray


@dataclass(frozen=True)
class Batch:
    states: np.ndarray  # (B, state_dim)
    actions: np.ndarray  # (B, action_dim)
    rewards: np.ndarray  # (B,)
    next_states: np.ndarray  # (B, state_dim)

    def __len__(self) -> int:
        return len(self.rewards)

    def transitions(self) -> list[Transition]:
        return [
            Transition(s, a, float(r), s2)
            for s, a, r, s2 in zip(self.states, self.actions, self.rewards, self.next_states)
        ]

    @classmethod
    def from_transitions(cls, transitions) -> "Batch":
        transitions = list(transitions)
        return cls(
            np.stack([t.state for t in transitions]),
            np.stack([t.action for t in transitions]),
            np.array([t.reward for t in transitions], dtype=np.float64),
            np.stack([t.next_state for t in transitions]),
        )


class ReplayBuffer:
    """Fixed-capacity FIFO ring with uniform, with-replacement sampling.

    Storage grows geometrically up to ``capacity`` so a 10**6-slot buffer
    costs memory only for what has actually been pushed.
    """

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1 (got {capacity})")
        self.capacity = int(capacity)
        self.state_dim = state_dim
        self.action_dim = action_dim
        self._alloc = 0
        self._s = np.empty((0, state_dim))
        self._a = np.empty((0, action_dim))
        self._r = np.empty(0)
        self._s2 = np.empty((0, state_dim))
        self._next = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def _grow(self) -> None:
        new = min(self.capacity, max(1024, 2 * self._alloc))
        for name in ("_s", "_a", "_r", "_s2"):
            old = getattr(self, name)
            arr = np.empty((new, *old.shape[1:]))
            arr[: self._alloc] = old
            setattr(self, name, arr)
        self._alloc = new

    def push(self, state, action, reward: float, next_state) -> None:
        if self._next >= self._alloc:
            self._grow()
        i = self._next
        self._s[i] = state
        self._a[i] = action
        self._r[i] = reward
        self._s2[i] = next_state
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def push_transition(self, t: Transition) -> None:
        self.push(t.state, t.action, t.reward, t.next_state)

    def ready(self, batch_size: int) -> bool:
        return self.size >= batch_size

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch | None:
        """Uniform draw of ``batch_size`` transitions, or ``None`` if underfilled."""
        if not self.ready(batch_size):
            return None
        idx = rng.integers(0, self.size, batch_size)
        return Batch(self._s[idx], self._a[idx], self._r[idx], self._s2[idx])

    def contents(self) -> list[Transition]:
        """Stored transitions, oldest first."""
        if self.size < self.capacity:
            order = range(self.size)
        else:
            order = [(self._next + j) % self.capacity for j in range(self.size)]
        return [
            Transition(self._s[i].copy(), self._a[i].copy(), float(self._r[i]), self._s2[i].copy())
            for i in order
        ]
