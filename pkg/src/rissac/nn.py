"""Fully connected ReLU networks with hand-written backprop, Adam, and a
tanh-squashed Gaussian policy head.

Inputs are batched row-wise: ``x`` has shape ``(B, in)`` (a 1-D ``x`` is
treated as a batch of one and the output is squeezed back).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
SQUASH_EPS = 1e-6
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)

CHECKPOINT_FORMAT = "rissac-mlp"
CHECKPOINT_VERSION = 1


@dataclass
class ForwardCache:
    net_id: int
    inputs: list  # input to each layer
    preacts: list  # pre-activation of each hidden layer
    squeeze: bool


class MLP:
    """Affine -> ReLU -> ... -> affine network.

    Parameters are kept in ``self.params`` as ``[W0, b0, W1, b1, ...]`` with
    ``W`` of shape ``(fan_in, fan_out)``. They are views into one contiguous
    vector ``self.flat``, which is what optimizers and target averaging act
    on in place.
    """

    def __init__(self, layer_dims, rng: np.random.Generator | None = None):
        layer_dims = [int(d) for d in layer_dims]
        if len(layer_dims) < 2 or min(layer_dims) < 1:
            raise ValueError(f"invalid layer_dims {layer_dims}")
        self.layer_dims = layer_dims
        shapes = []
        for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
            shapes += [(fan_in, fan_out), (fan_out,)]
        self.flat = np.zeros(sum(int(np.prod(sh)) for sh in shapes))
        self.params = _views(self.flat, shapes)
        if rng is not None:
            for i, fan_in in enumerate(layer_dims[:-1]):
                bound = 1.0 / np.sqrt(fan_in)
                for p in self.params[2 * i : 2 * i + 2]:
                    p[...] = rng.uniform(-bound, bound, p.shape)

    @property
    def n_layers(self) -> int:
        return len(self.layer_dims) - 1

    def _check_input(self, x) -> tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        if x.ndim != 2 or x.shape[1] != self.layer_dims[0]:
            raise ValueError(
                f"input width {x.shape[-1]} does not match layer_dims[0]={self.layer_dims[0]}"
            )
        return x, squeeze

    def forward(self, x) -> np.ndarray:
        h, squeeze = self._check_input(x)
        last = self.n_layers - 1
        for i in range(self.n_layers):
            h = h @ self.params[2 * i] + self.params[2 * i + 1]
            if i < last:
                h = np.maximum(h, 0.0)
        return h[0] if squeeze else h

    __call__ = forward

    def forward_cached(self, x) -> tuple[np.ndarray, ForwardCache]:
        h, squeeze = self._check_input(x)
        inputs, preacts = [], []
        last = self.n_layers - 1
        for i in range(self.n_layers):
            inputs.append(h)
            h = h @ self.params[2 * i] + self.params[2 * i + 1]
            if i < last:
                preacts.append(h)
                h = np.maximum(h, 0.0)
        cache = ForwardCache(id(self), inputs, preacts, squeeze)
        return (h[0] if squeeze else h), cache

    def backward(
        self, cache: ForwardCache | None, grad_out, params: bool = True
    ) -> tuple[list[np.ndarray] | None, np.ndarray]:
        """Gradients of ``sum(grad_out * output)`` w.r.t. params and input.

        Gradients are summed over the batch, so callers fold any ``1/B`` of a
        mean loss into ``grad_out``. With ``params=False`` only the input
        gradient is formed and ``None`` is returned in place of the list.
        """
        if cache is None or cache.net_id != id(self):
            raise ValueError("backward() needs the cache from this net's forward_cached()")
        g = np.asarray(grad_out, dtype=np.float64)
        if cache.squeeze:
            g = g[None, :]
        grads: list[np.ndarray] = [None] * len(self.params)
        for i in reversed(range(self.n_layers)):
            if i < self.n_layers - 1:
                g = g * (cache.preacts[i] > 0.0)
            if params:
                grads[2 * i] = cache.inputs[i].T @ g
                grads[2 * i + 1] = g.sum(axis=0)
            g = g @ self.params[2 * i].T
        return (grads if params else None), (g[0] if cache.squeeze else g)

    def copy(self) -> "MLP":
        other = MLP.__new__(MLP)
        other.layer_dims = list(self.layer_dims)
        other.flat = self.flat.copy()
        other.params = _views(other.flat, [p.shape for p in self.params])
        return other

    @staticmethod
    def flatten(grads) -> np.ndarray:
        """Concatenate per-parameter gradients in the layout of ``flat``."""
        return np.concatenate([g.ravel() for g in grads])

    def load_params(self, params) -> None:
        if len(params) != len(self.params):
            raise ValueError("parameter count mismatch")
        for dst, src in zip(self.params, params):
            if dst.shape != np.shape(src):
                raise ValueError(f"shape mismatch {dst.shape} vs {np.shape(src)}")
            dst[...] = src


def _views(flat: np.ndarray, shapes) -> list[np.ndarray]:
    out, start = [], 0
    for sh in shapes:
        n = int(np.prod(sh))
        out.append(flat[start : start + n].reshape(sh))
        start += n
    return out


@numba.njit(cache=True)
def _adam_kernel(p, g, m, v, lr, b1, b2, c1, c2, eps):
    for i in range(p.size):
        gi = g[i]
        m[i] = b1 * m[i] + (1.0 - b1) * gi
        v[i] = b2 * v[i] + (1.0 - b2) * gi * gi
        p[i] -= lr * (m[i] / c1) / (np.sqrt(v[i] / c2) + eps)


class Adam:
    """Bias-corrected Adam acting in place on a list of arrays.

    Each array must be contiguous; the per-element update runs in a fused
    compiled loop.
    """

    def __init__(self, params, lr=1e-4, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads) -> None:
        if len(grads) != len(self.params):
            raise ValueError(f"got {len(grads)} gradients for {len(self.params)} parameters")
        for p, g in zip(self.params, grads):
            if p.shape != np.shape(g):
                raise ValueError(f"gradient shape {np.shape(g)} != parameter shape {p.shape}")
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1**self.t
        c2 = 1.0 - b2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            _adam_kernel(
                p.reshape(-1),
                np.ascontiguousarray(g, dtype=np.float64).reshape(-1),
                m.reshape(-1),
                v.reshape(-1),
                self.lr, b1, b2, c1, c2, self.eps,
            )


def adam_step(opt: Adam, grads) -> list[np.ndarray]:
    opt.step(grads)
    return opt.params


@dataclass
class GaussianHead:
    mean: np.ndarray
    log_std: np.ndarray
    # True where the raw log-std fell outside [LOG_STD_MIN, LOG_STD_MAX]
    clipped: np.ndarray

    @classmethod
    def from_output(cls, out: np.ndarray) -> "GaussianHead":
        """Split a policy-net output ``[mean | log_std]`` and clamp the log-std."""
        d = out.shape[-1] // 2
        raw = out[..., d:]
        log_std = np.clip(raw, LOG_STD_MIN, LOG_STD_MAX)
        return cls(out[..., :d], log_std, (raw < LOG_STD_MIN) | (raw > LOG_STD_MAX))

    @property
    def std(self) -> np.ndarray:
        return np.exp(self.log_std)


@dataclass
class SquashedSample:
    action: np.ndarray
    log_prob: np.ndarray
    eps: np.ndarray
    u: np.ndarray


def squashed_log_prob(u, mean, log_std) -> np.ndarray:
    """Log-density of ``tanh(u)`` for ``u ~ N(mean, exp(log_std)^2)``, summed over the last axis."""
    z = (u - mean) / np.exp(log_std)
    a = np.tanh(u)
    terms = -0.5 * z * z - log_std - _HALF_LOG_2PI - np.log(1.0 - a * a + SQUASH_EPS)
    return terms.sum(axis=-1)


def sample_squashed(head: GaussianHead, rng=None, eps=None) -> SquashedSample:
    """Reparameterised draw ``a = tanh(mean + std * eps)`` with its log-prob."""
    if eps is None:
        eps = rng.standard_normal(np.shape(head.mean))
    std = head.std
    u = head.mean + std * eps
    a = np.tanh(u)
    log_prob = (
        -0.5 * eps * eps - head.log_std - _HALF_LOG_2PI - np.log(1.0 - a * a + SQUASH_EPS)
    ).sum(axis=-1)
    return SquashedSample(a, log_prob, eps, u)


def squashed_backward(
    head: GaussianHead, sample: SquashedSample, grad_action, grad_log_prob
) -> np.ndarray:
    """Push gradients on (action, log_prob) back to the raw head output.

    Holds ``eps`` fixed (reparameterisation), so both the direct dependence
    of the log-prob on the parameters and the path through the sampled
    action are included. Returns the gradient w.r.t. ``[mean | raw_log_std]``.
    """
    a = sample.action
    std = head.std
    one_m_a2 = 1.0 - a * a
    glp = np.asarray(grad_log_prob, dtype=np.float64)[..., None]
    dlogp_du = 2.0 * a * one_m_a2 / (one_m_a2 + SQUASH_EPS)
    du_dlogstd = std * sample.eps
    g_u = grad_action * one_m_a2 + glp * dlogp_du
    g_mean = g_u
    g_log_std = g_u * du_dlogstd - glp
    g_log_std = np.where(head.clipped, 0.0, g_log_std)
    return np.concatenate([g_mean, g_log_std], axis=-1)


def save_mlp(net: MLP, path) -> None:
    """Write ``layer_dims`` and parameters (declaration order) to an ``.npz``."""
    header = json.dumps(
        {"format": CHECKPOINT_FORMAT, "version": CHECKPOINT_VERSION, "layer_dims": net.layer_dims}
    )
    arrays = {f"p{i:03d}": p for i, p in enumerate(net.params)}
    with Path(path).open("wb") as fh:
        np.savez(fh, header=np.array(header), **arrays)


def load_mlp(path) -> MLP:
    with np.load(Path(path), allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        if header.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"{path}: not an MLP checkpoint")
        if header.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {header.get('version')}")
        net = MLP(header["layer_dims"])
        net.load_params([data[f"p{i:03d}"] for i in range(len(net.params))])
    return net
