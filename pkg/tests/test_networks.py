"""Network construction, flat parameter views, LDA gating and reduction."""

import numpy as np
import pytest

from pinnjet.errors import ConfigurationError
from pinnjet.networks import (NetworkConfig, _block_shapes, forward, from_flat,
                              gating_weights, init_params, input_jet,
                              load_params, mlp_forward, param_count,
                              save_params, to_flat)
from pinnjet.problems import DEFAULT_HIDDEN, get_problem


def _count_by_hand(config):
    total = 0
    for _, out_w, in_w in _block_shapes(config):
        total += out_w * in_w + out_w
    return total


@pytest.mark.parametrize("arch", ["mlp", "lda"])
def test_param_count_matches_flat_length(arch):
    config = NetworkConfig(2, (7, 5, 3), 2, arch)
    flat = to_flat(init_params(config, 0))
    assert flat.size == param_count(config) == _count_by_hand(config)


def test_mlp_param_count_closed_form():
    # dense stack 2 -> 20 -> 20 -> 1: (2*20+20) + (20*20+20) + (20*1+1)
    config = NetworkConfig(2, (20, 20), 1, "mlp")
    assert param_count(config) == 60 + 420 + 21


def test_init_is_seed_deterministic():
    config = NetworkConfig(2, (10, 10), 1, "lda")
    a = to_flat(init_params(config, 1234))
    b = to_flat(init_params(config, 1234))
    c = to_flat(init_params(config, 1235))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_init_xavier_scale():
    # weight blocks should have variance near 2/(fan_in+fan_out); wide margins
    config = NetworkConfig(2, (64, 64, 64), 1, "mlp")
    params = init_params(config, 5)
    w = params.layers[1].weight
    var = float(w.var())
    want = 2.0 / (64 + 64)
    assert 0.5 * want < var < 2.0 * want


def test_from_flat_returns_views():
    config = NetworkConfig(2, (4, 4), 1, "mlp")
    flat = to_flat(init_params(config, 3))
    params = from_flat(config, flat)
    before = params.layers[0].weight[0, 0]
    flat[0] += 1.0
    assert params.layers[0].weight[0, 0] == pytest.approx(before + 1.0)


def test_flat_roundtrip_bitwise():
    config = NetworkConfig(2, (6, 6), 2, "lda")
    flat = to_flat(init_params(config, 9))
    again = to_flat(from_flat(config, flat))
    assert np.array_equal(flat, again)


@pytest.mark.parametrize("arch", ["mlp", "lda"])
def test_forward_output_shape(arch, rng):
    config = NetworkConfig(2, (5, 5), 3, arch)
    params = init_params(config, 2)
    pts = rng.uniform(-1, 1, size=(17, 2))
    out = forward(params, input_jet(pts, 2))
    assert out.jet.coeffs.shape == (3, 17, 6)


def test_forward_is_deterministic(rng):
    config = NetworkConfig(2, (8, 8), 1, "lda")
    params = init_params(config, 4)
    pts = rng.uniform(-1, 1, size=(9, 2))
    a = forward(params, input_jet(pts, 3)).jet.coeffs
    b = forward(params, input_jet(pts, 3)).jet.coeffs
    assert np.array_equal(a, b)


def _splice_backbone(cfg_mlp, cfg_lda, flat_mlp):
    """LDA flat vector carrying the MLP blocks, zeros elsewhere."""
    out = np.zeros(param_count(cfg_lda))
    sizes_m = [(o * i + o) for _, o, i in _block_shapes(cfg_mlp)]
    cuts = np.cumsum(sizes_m)[:-1]
    backbone = iter(np.split(flat_mlp, cuts))
    off = 0
    for name, o, i in _block_shapes(cfg_lda):
        n = o * i + o
        if name.endswith(".backbone") or name == "output":
            out[off:off + n] = next(backbone)
        off += n
    return out


def test_lda_with_zero_extras_equals_mlp_bitwise(rng):
    cfg_m = NetworkConfig(2, (9, 9, 9), 1, "mlp")
    cfg_l = NetworkConfig(2, (9, 9, 9), 1, "lda")
    flat_m = to_flat(init_params(cfg_m, 77))
    flat_l = _splice_backbone(cfg_m, cfg_l, flat_m)
    pts = rng.uniform(-1, 1, size=(40, 2))
    x = input_jet(pts, 3)
    om = forward(from_flat(cfg_m, flat_m), x).jet.coeffs
    ol = forward(from_flat(cfg_l, flat_l), x).jet.coeffs
    assert np.array_equal(om, ol)


def test_lda_reduction_at_benchmark_widths(rng):
    # zero encoders and gates collapse every benchmark-sized LDA to its MLP
    problem = get_problem("klein_gordon")
    hidden = DEFAULT_HIDDEN[problem.name]
    cfg_m = NetworkConfig(2, hidden, 1, "mlp")
    cfg_l = NetworkConfig(2, hidden, 1, "lda")
    flat_m = to_flat(init_params(cfg_m, 1234))
    flat_l = _splice_backbone(cfg_m, cfg_l, flat_m)
    pts = rng.uniform(0, 1, size=(100, 2))
    x = input_jet(pts, problem.order)
    om = forward(from_flat(cfg_m, flat_m), x).jet.coeffs
    ol = forward(from_flat(cfg_l, flat_l), x).jet.coeffs
    assert np.array_equal(om, ol)


def test_zero_gates_mix_branches_equally(rng):
    # with zero gate logits both encoder branches carry weight 1/2
    from pinnjet.networks import lda_layer

    cfg = NetworkConfig(2, (6,), 1, "lda")
    params = init_params(cfg, 8)
    layer = params.layers[0]
    layer.gate_hidden.weight[:] = 0.0
    layer.gate_hidden.bias[:] = 0.0
    layer.gate_out.weight[:] = 0.0
    layer.gate_out.bias[:] = 0.0
    pts = rng.uniform(-1, 1, size=(5, 2))
    x = input_jet(pts, 1)
    a = lda_layer(layer, x, x)
    e1 = np.tanh(layer.encoder1.weight @ pts.T + layer.encoder1.bias[:, None])
    e2 = np.tanh(layer.encoder2.weight @ pts.T + layer.encoder2.bias[:, None])
    backbone = np.tanh(layer.backbone.weight @ pts.T + layer.backbone.bias[:, None])
    want = backbone + 0.5 * e1 + 0.5 * e2
    assert np.allclose(a.value, want, rtol=1e-12, atol=1e-12)


def test_gating_weights_partition(rng):
    logits = rng.normal(size=(2, 30))
    w = gating_weights(logits)
    assert np.allclose(w.sum(axis=0), 1.0, atol=1e-14)
    assert np.all(w > 0) and np.all(w < 1)
    # two-way softmax is the sigmoid of the logit difference
    want = 1.0 / (1.0 + np.exp(-(logits[0] - logits[1])))
    assert np.allclose(w[0], want, rtol=1e-13)
    # shift invariance: adding a constant to both logits changes nothing
    assert np.allclose(gating_weights(logits + 3.7), w, rtol=1e-12)


def test_save_load_roundtrip(tmp_path):
    config = NetworkConfig(2, (5, 4), 2, "lda")
    params = init_params(config, 21)
    path = tmp_path / "params.json"
    save_params(params, path)
    loaded = load_params(path)
    assert loaded.config == config
    assert np.array_equal(to_flat(loaded), to_flat(params))


def test_config_validation():
    with pytest.raises(ConfigurationError):
        NetworkConfig(2, (), 1, "mlp")
    with pytest.raises(ConfigurationError):
        NetworkConfig(2, (4,), 1, "transformer")
    with pytest.raises(ConfigurationError):
        NetworkConfig(0, (4,), 1, "mlp")
    with pytest.raises(ConfigurationError):
        NetworkConfig(2, (4,), 1, "mlp", activation="relu")


def test_mlp_forward_guards_architecture():
    params = init_params(NetworkConfig(2, (4,), 1, "lda"), 0)
    with pytest.raises(ConfigurationError):
        mlp_forward(params, input_jet(np.zeros((1, 2)), 1))
