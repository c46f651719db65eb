import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rissac.nn import (
    LOG_STD_MAX,
    LOG_STD_MIN,
    MLP,
    Adam,
    GaussianHead,
    adam_step,
    load_mlp,
    sample_squashed,
    save_mlp,
    squashed_backward,
    squashed_log_prob,
)
from rissac.numerics import make_rng

H = 1e-5


def max_rel_err(analytic, numeric, floor=1e-6):
    analytic, numeric = np.ravel(analytic), np.ravel(numeric)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / scale))


def fd_flat(fn, flat, h=H):
    """Central differences of scalar ``fn()`` w.r.t. every entry of ``flat`` (in place)."""
    out = np.empty_like(flat)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        up = fn()
        flat[i] = old - h
        down = fn()
        flat[i] = old
        out[i] = (up - down) / (2 * h)
    return out


class TestMLP:
    def test_scalar_forward_oracle(self):
        net = MLP([2, 3, 1])
        w0, b0, w1, b1 = net.params
        w0[...] = [[1.0, -1.0, 0.5], [2.0, 0.0, -1.0]]
        b0[...] = [0.0, 0.5, 0.25]
        w1[...] = [[1.0], [2.0], [-3.0]]
        b1[...] = [0.1]
        x = [1.0, 2.0]
        # hidden pre-acts: 5, -0.5, -1.25 -> relu: 5, 0, 0
        assert net(x)[0] == pytest.approx(5.1, abs=1e-15)

    def test_batch_and_single_agree(self):
        net = MLP([4, 8, 3], make_rng(0))
        x = make_rng(1).standard_normal((5, 4))
        batch = net(x)
        for i in range(5):
            np.testing.assert_allclose(net(x[i]), batch[i], atol=1e-15)

    def test_init_bounds(self):
        net = MLP([16, 8, 2], make_rng(2))
        assert np.all(np.abs(net.params[0]) <= 0.25)
        assert np.all(np.abs(net.params[2]) <= 1 / np.sqrt(8))

    def test_params_are_views_of_flat(self):
        net = MLP([3, 4, 2], make_rng(3))
        net.flat[0] = 123.0
        assert net.params[0][0, 0] == 123.0
        assert net.flat.size == 3 * 4 + 4 + 4 * 2 + 2

    def test_input_width_checked(self):
        with pytest.raises(ValueError):
            MLP([3, 2])(np.zeros(4))

    def test_foreign_cache_rejected(self):
        a, b = MLP([2, 2], make_rng(0)), MLP([2, 2], make_rng(1))
        _, cache = a.forward_cached(np.ones(2))
        with pytest.raises(ValueError):
            b.backward(cache, np.ones(2))
        with pytest.raises(ValueError):
            a.backward(None, np.ones(2))

    @pytest.mark.parametrize("dims", [[10, 16, 16, 4], [3, 5, 1], [6, 7, 8, 9, 2]])
    def test_param_gradient_fd(self, dims):
        net = MLP(dims, make_rng(sum(dims)))
        x = make_rng(7).standard_normal((4, dims[0]))
        w = make_rng(8).standard_normal((4, dims[-1]))
        _, cache = net.forward_cached(x)
        grads, gx = net.backward(cache, w)
        numeric = fd_flat(lambda: float(np.sum(w * net(x))), net.flat)
        assert max_rel_err(MLP.flatten(grads), numeric) < 1e-4

    def test_input_gradient_fd(self):
        net = MLP([5, 9, 3], make_rng(9))
        x = make_rng(10).standard_normal((2, 5))
        w = make_rng(11).standard_normal((2, 3))
        _, cache = net.forward_cached(x)
        _, gx = net.backward(cache, w)
        numeric = fd_flat(lambda: float(np.sum(w * net(x))), x.reshape(-1))
        assert max_rel_err(gx, numeric.reshape(x.shape)) < 1e-4

    def test_input_only_backward(self):
        net = MLP([4, 6, 2], make_rng(12))
        x = make_rng(13).standard_normal((3, 4))
        _, cache = net.forward_cached(x)
        grads, gx = net.backward(cache, np.ones((3, 2)), params=False)
        assert grads is None
        np.testing.assert_allclose(gx, net.backward(cache, np.ones((3, 2)))[1])

    def test_copy_is_independent(self):
        net = MLP([3, 3], make_rng(0))
        other = net.copy()
        other.flat += 1.0
        assert not np.allclose(net.flat, other.flat)
        other.params[0][0, 0] = -7.0
        assert other.flat[0] == -7.0

    def test_checkpoint_roundtrip(self, tmp_path):
        net = MLP([4, 5, 2], make_rng(4))
        save_mlp(net, tmp_path / "net.npz")
        back = load_mlp(tmp_path / "net.npz")
        assert back.layer_dims == net.layer_dims
        assert np.array_equal(back.flat, net.flat)

    def test_checkpoint_rejects_foreign(self, tmp_path):
        np.savez(tmp_path / "x.npz", header=np.array('{"format": "other"}'))
        with pytest.raises(ValueError):
            load_mlp(tmp_path / "x.npz")


class TestAdam:
    def test_first_step_is_lr_times_sign(self):
        p = np.array([1.0, -2.0, 0.5])
        opt = Adam([p], lr=0.1)
        adam_step(opt, [np.array([3.0, -0.01, 0.0])])
        np.testing.assert_allclose(p, [0.9, -1.9, 0.5], atol=1e-6)

    def test_matches_reference_sequence(self):
        rng = make_rng(5)
        p = rng.standard_normal(6)
        ref = p.copy()
        m = np.zeros(6)
        v = np.zeros(6)
        opt = Adam([p], lr=0.01)
        for t in range(1, 6):
            g = rng.standard_normal(6)
            opt.step([g])
            m = 0.9 * m + 0.1 * g
            v = 0.999 * v + 0.001 * g * g
            ref -= 0.01 * (m / (1 - 0.9**t)) / (np.sqrt(v / (1 - 0.999**t)) + 1e-8)
        np.testing.assert_allclose(p, ref, rtol=1e-13)

    def test_minimises_quadratic(self):
        p = np.array([5.0, -3.0])
        opt = Adam([p], lr=0.05)
        for _ in range(2000):
            opt.step([2 * p])
        assert np.all(np.abs(p) < 1e-2)

    def test_shape_checked(self):
        opt = Adam([np.zeros(3)])
        with pytest.raises(ValueError):
            opt.step([np.zeros(4)])
        with pytest.raises(ValueError):
            opt.step([np.zeros(3), np.zeros(3)])


class TestSquashedGaussian:
    def test_log_std_clamped(self):
        head = GaussianHead.from_output(np.array([0.0, 0.0, -50.0, 9.0]))
        np.testing.assert_array_equal(head.log_std, [LOG_STD_MIN, LOG_STD_MAX])
        np.testing.assert_array_equal(head.clipped, [True, True])

    def test_sample_log_prob_matches_density(self):
        head = GaussianHead.from_output(make_rng(0).standard_normal((3, 8)))
        s = sample_squashed(head, make_rng(1))
        np.testing.assert_allclose(
            s.log_prob, squashed_log_prob(s.u, head.mean, head.log_std), atol=1e-12
        )
        assert np.all(np.abs(s.action) < 1)

    @pytest.mark.parametrize("mean,log_std", [(0.0, 0.0), (0.7, -0.5), (-1.2, 0.4)])
    def test_density_integrates_to_one(self, mean, log_std):
        # integrate over u (where the density is smooth): p_a(tanh u) * (1 - tanh^2 u)
        u = np.linspace(mean - 12 * np.exp(log_std), mean + 12 * np.exp(log_std), 200_001)
        logp = squashed_log_prob(u[:, None], np.array([mean]), np.array([log_std]))
        dens = np.exp(logp) * (1 - np.tanh(u) ** 2)
        total = np.sum((dens[1:] + dens[:-1]) / 2 * np.diff(u))
        assert abs(total - 1.0) < 1e-3

    def test_backward_fd(self):
        rng = make_rng(3)
        out = rng.standard_normal((4, 6))
        eps = rng.standard_normal((4, 3))
        ga = rng.standard_normal((4, 3))
        glp = rng.standard_normal(4)

        def objective():
            head = GaussianHead.from_output(out)
            s = sample_squashed(head, eps=eps)
            return float(np.sum(ga * s.action) + np.sum(glp * s.log_prob))

        head = GaussianHead.from_output(out)
        s = sample_squashed(head, eps=eps)
        analytic = squashed_backward(head, s, ga, glp)
        numeric = fd_flat(objective, out.reshape(-1)).reshape(out.shape)
        assert max_rel_err(analytic, numeric) < 1e-4

    def test_backward_zero_where_clipped(self):
        out = np.array([[0.3, 5.0]])
        head = GaussianHead.from_output(out)
        s = sample_squashed(head, eps=np.array([[0.4]]))
        g = squashed_backward(head, s, np.ones((1, 1)), np.ones(1))
        assert g[0, 1] == 0.0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_deterministic_given_eps(self, seed):
        rng = make_rng(seed)
        head = GaussianHead.from_output(rng.standard_normal((2, 4)))
        eps = rng.standard_normal((2, 2))
        a, b = sample_squashed(head, eps=eps), sample_squashed(head, eps=eps)
        assert np.array_equal(a.action, b.action) and np.array_equal(a.log_prob, b.log_prob)
