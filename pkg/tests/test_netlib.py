"""Networks, optimizer, target tracking, and the checkpoint container."""

import numpy as np
import pytest

from flame import netlib, numkit as nk
from flame.netlib import (INSTANTANEOUS, MEANFLOW, Adam, Mlp, MlpSpec,
                          TimeEmbedding, VectorFieldNet, polyak_update)


class TestMlp:
    def test_forward_shape(self):
        net = Mlp(MlpSpec(5, 3, hidden_layers=2, hidden_width=16), nk.Rng(0))
        x = np.zeros((7, 5))
        assert net.forward_array(x).shape == (7, 3)
        assert net.forward(nk.Tensor(x)).shape == (7, 3)

    def test_array_and_taped_forward_agree_bitwise(self):
        net = Mlp(MlpSpec(4, 2, hidden_layers=2, hidden_width=8), nk.Rng(1))
        x = nk.Rng(2).standard_normal((5, 4))
        np.testing.assert_array_equal(net.forward_array(x),
                                      net.forward(nk.Tensor(x)).data)

    def test_array_jvp_value_matches_forward_bitwise(self):
        net = Mlp(MlpSpec(4, 2, hidden_layers=2, hidden_width=8), nk.Rng(1))
        rng = nk.Rng(3)
        x = rng.standard_normal((5, 4))
        y, _ = net.forward_array_jvp(x, rng.standard_normal((5, 4)))
        np.testing.assert_array_equal(y, net.forward_array(x))

    def test_array_jvp_matches_tape_jvp(self):
        net = Mlp(MlpSpec(3, 2, hidden_layers=3, hidden_width=12), nk.Rng(4))
        rng = nk.Rng(5)
        x = rng.standard_normal((6, 3))
        v = rng.standard_normal((6, 3))
        _, want = nk.jvp(lambda z: net.forward(z), x, v)
        _, got = net.forward_array_jvp(x, v)
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)

    def test_invalid_spec_rejected(self):
        with pytest.raises(ValueError):
            MlpSpec(0, 1)
        with pytest.raises(ValueError):
            MlpSpec(1, 1, activation="gelu")

    def test_mish_identities(self):
        x = np.linspace(-10.0, 10.0, 201)
        y = nk.mish(nk.Tensor(x)).data
        np.testing.assert_allclose(y, x * np.tanh(np.logaddexp(0, x)),
                                   atol=1e-12)
        assert y[100] == 0.0  # Mish(0) = 0
        pos = y[x > 0]
        assert np.all(np.diff(pos) > 0)  # monotone for x > 0


class TestTimeEmbedding:
    def test_shape_and_range(self):
        emb = TimeEmbedding(dim=32)
        t = np.linspace(0.0, 1.0, 50)
        e = emb.embed_array(t)
        assert e.shape == (50, 32)
        assert np.all(np.abs(e) <= 1.0)

    def test_injective_on_training_grid(self):
        emb = TimeEmbedding(dim=64)
        t = np.linspace(0.0, 1.0, 1000)
        e = emb.embed_array(t)
        d2 = np.sum((e[:, None, :] - e[None, :, :]) ** 2, axis=-1)
        d2[np.diag_indices_from(d2)] = np.inf
        assert d2.min() > 0.0

    def test_odd_dim_rejected(self):
        with pytest.raises(ValueError):
            TimeEmbedding(dim=7)

    def test_taped_embed_matches_array(self):
        emb = TimeEmbedding(dim=16)
        t = np.array([0.1, 0.5, 0.9])
        np.testing.assert_array_equal(emb.embed(nk.Tensor(t)).data,
                                      emb.embed_array(t))


class TestVectorFieldNet:
    def test_zero_final_layer_gives_zero_field(self):
        net = VectorFieldNet(2, 3, INSTANTANEOUS, nk.Rng(0), hidden_width=16)
        a = nk.Rng(1).standard_normal((4, 2))
        s = nk.Rng(2).standard_normal((4, 3))
        np.testing.assert_array_equal(net.velocity_array(a, 0.3, s),
                                      np.zeros((4, 2)))

    def test_batch_shape_contract(self):
        net = VectorFieldNet(3, 2, MEANFLOW, nk.Rng(0), hidden_width=16,
                             zero_init_final=False)
        a = np.zeros((5, 3))
        s = np.zeros((5, 2))
        out = net.avg_velocity_array(a, 0.1, 0.7, s)
        assert out.shape == (5, 3)

    def test_mode_validation(self):
        inst = VectorFieldNet(2, 2, INSTANTANEOUS, nk.Rng(0), hidden_width=8)
        mf = VectorFieldNet(2, 2, MEANFLOW, nk.Rng(0), hidden_width=8)
        a, s = np.zeros((1, 2)), np.zeros((1, 2))
        with pytest.raises(ValueError):
            inst.forward_field(a, 0.5, s, zeta=0.1)
        with pytest.raises(ValueError):
            mf.forward_field(a, 0.5, s, zeta=0.5)
        with pytest.raises(ValueError):
            mf.forward_field(a, 0.5, s)  # zeta missing

    def test_jvp_against_finite_differences(self):
        net = VectorFieldNet(2, 2, INSTANTANEOUS, nk.Rng(9), hidden_width=16,
                             zero_init_final=False)
        rng = nk.Rng(10)
        a = rng.standard_normal((3, 2))
        s = rng.standard_normal((3, 2))
        t = np.array([0.2, 0.5, 0.8])
        da = rng.standard_normal((3, 2))
        dt = rng.standard_normal(3)
        _, got = net.velocity_jvp(a, da, t, dt, s)
        h = 1e-5
        hi = net.velocity_array(a + h * da, t + h * dt, s)
        lo = net.velocity_array(a - h * da, t - h * dt, s)
        fd = (hi - lo) / (2.0 * h)
        denom = max(np.abs(fd).max(), 1e-12)
        assert np.abs(got - fd).max() / denom < 1e-4

    def test_meanflow_jvp_against_finite_differences(self):
        net = VectorFieldNet(2, 1, MEANFLOW, nk.Rng(11), hidden_width=16,
                             zero_init_final=False)
        rng = nk.Rng(12)
        a = rng.standard_normal((3, 2))
        s = rng.standard_normal((3, 1))
        zeta = np.array([0.05, 0.1, 0.2])
        t = np.array([0.5, 0.6, 0.9])
        da = rng.standard_normal((3, 2))
        dt = np.ones(3)
        _, got = net.avg_velocity_jvp(a, da, zeta, t, dt, s)
        h = 1e-5
        hi = net.avg_velocity_array(a + h * da, zeta, t + h * dt, s)
        lo = net.avg_velocity_array(a - h * da, zeta, t - h * dt, s)
        fd = (hi - lo) / (2.0 * h)
        denom = max(np.abs(fd).max(), 1e-12)
        assert np.abs(got - fd).max() / denom < 1e-4


class TestAdam:
    def test_zero_gradients_leave_fresh_params_unchanged(self):
        p = nk.parameter(np.ones(4))
        opt = Adam({"p": p}, lr=0.1)
        p.grad = np.zeros(4)
        opt.step()
        np.testing.assert_array_equal(p.data, np.ones(4))

    def test_quadratic_convergence(self):
        w = nk.parameter([1.0])
        opt = Adam({"w": w}, lr=1e-1)
        for _ in range(500):
            opt.zero_grad()
            loss = nk.tsum(w * w)
            loss.backward()
            opt.step()
        assert abs(w.data[0]) < 1e-3

    def test_linear_annealing_endpoints_and_midpoint(self):
        opt = Adam({}, lr=3e-4, lr_end=3e-5, anneal_steps=200_000)
        assert opt.current_lr() == pytest.approx(3e-4)
        opt.step_count = 100_000
        assert opt.current_lr() == pytest.approx(1.65e-4)
        opt.step_count = 200_000
        assert opt.current_lr() == pytest.approx(3e-5)
        opt.step_count = 300_000  # clamps past the schedule end
        assert opt.current_lr() == pytest.approx(3e-5)

    def test_nan_gradient_names_parameter(self):
        p = nk.parameter(np.ones(2))
        opt = Adam({"layers.0.w": p})
        p.grad = np.array([1.0, np.nan])
        with pytest.raises(FloatingPointError, match="layers.0.w"):
            opt.step()


class TestPolyak:
    def test_tau_one_copies(self):
        t = {"w": nk.parameter([0.0, 0.0])}
        o = {"w": nk.parameter([1.0, 2.0])}
        polyak_update(t, o, 1.0)
        np.testing.assert_array_equal(t["w"].data, [1.0, 2.0])

    def test_small_tau_step(self):
        t = {"w": nk.parameter([0.0])}
        o = {"w": nk.parameter([1.0])}
        polyak_update(t, o, 0.005)
        np.testing.assert_allclose(t["w"].data, [0.005])

    def test_geometric_convergence(self):
        t = {"w": nk.parameter([0.0])}
        o = {"w": nk.parameter([1.0])}
        gap = 1.0
        for _ in range(50):
            polyak_update(t, o, 0.1)
            new_gap = abs(1.0 - t["w"].data[0])
            assert new_gap == pytest.approx(0.9 * gap, rel=1e-12)
            gap = new_gap

    def test_invalid_tau_rejected(self):
        with pytest.raises(ValueError):
            polyak_update({}, {}, 0.0)
        with pytest.raises(ValueError):
            polyak_update({}, {}, 1.5)


class TestCheckpoint:
    def test_roundtrip(self, tmp_path):
        rng = nk.Rng(0)
        arrays = {
            "actor/layers.0.w": rng.standard_normal((4, 3)),
            "alpha": np.array([0.2]),
            "scalar": np.array(3.5),
        }
        path = tmp_path / "ck.bin"
        netlib.save_arrays(path, arrays)
        out = netlib.load_arrays(path)
        assert set(out) == set(arrays)
        for k in arrays:
            np.testing.assert_array_equal(out[k], arrays[k])
            assert out[k].shape == np.asarray(arrays[k]).shape

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOTACKPT" + b"\x00" * 16)
        with pytest.raises(ValueError):
            netlib.load_arrays(path)

    def test_deterministic_bytes(self, tmp_path):
        arrays = {"b": np.arange(3.0), "a": np.ones((2, 2))}
        p1, p2 = tmp_path / "1.bin", tmp_path / "2.bin"
        netlib.save_arrays(p1, arrays)
        netlib.save_arrays(p2, dict(reversed(list(arrays.items()))))
        assert p1.read_bytes() == p2.read_bytes()

    def test_uint64_bit_packing(self):
        vec = np.array([0, 1, 2 ** 63, 2 ** 64 - 1], dtype=np.uint64)
        packed = netlib.pack_uint64(vec)
        np.testing.assert_array_equal(netlib.unpack_uint64(packed), vec)
