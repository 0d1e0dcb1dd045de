"""MLP backbone and the attention-gated (LDA) network over jet inputs.

An LDA layer augments the plain backbone activation a_MLP = tanh(W a + b)
with two re-encodings of the raw input, e(i) = tanh(E(i) x + c(i)), fused by
a per-channel two-branch softmax computed from a small gating MLP:

    z      = concat(a_MLP, e(1), e(2))          in R^{3h}
    logits = G2 tanh(G1 z + g1) + g2            in R^{2h}
    alpha  = softmax over the two branches, per channel
    out    = a_MLP + alpha(1)*e(1) + alpha(2)*e(2)

With zero encoder and gate parameters the modulation vanishes exactly
(tanh(0) = 0), reducing the LDA network to the backbone MLP bitwise.  The
output layer is always a plain affine.

Parameters live in per-layer blocks with a fixed flat ordering (backbone,
encoder1, encoder2, gate_hidden, gate_out per hidden layer, then the output
layer; weight before bias within each block), giving a lossless structured
<-> flat round trip for the optimizer and gradient arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from pinnjet.errors import ConfigurationError, ShapeError
from pinnjet.jets import Jet, seed_input
from pinnjet.rngs import STREAM_INIT, stream_generator
from pinnjet.tape import Tape, Var, affine, concat_rows, take_rows

ARCHITECTURES = ("mlp", "lda")


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int
    hidden: tuple[int, ...]
    output_dim: int
    architecture: str = "mlp"
    activation: str = "tanh"
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.input_dim < 1 or self.output_dim < 1 or not self.hidden:
            raise ConfigurationError("network dimensions must be positive")
        if any(h < 1 for h in self.hidden):
            raise ConfigurationError("zero-sized hidden layer")
        if self.architecture not in ARCHITECTURES:
            raise ConfigurationError(f"unknown architecture {self.architecture!r}")
        if self.activation != "tanh":
            raise ConfigurationError("only tanh activation is supported")


@dataclass
class LayerParams:
    weight: np.ndarray
    bias: np.ndarray


@dataclass
class LDALayerParams:
    backbone: LayerParams
    encoder1: LayerParams
    encoder2: LayerParams
    gate_hidden: LayerParams
    gate_out: LayerParams


@dataclass
class NetworkParams:
    config: NetworkConfig
    layers: list = field(default_factory=list)
    output: LayerParams | None = None


def _block_shapes(config: NetworkConfig):
    """(name, out_width, in_width) for every weight block, in flat order."""
    d = config.input_dim
    prev = d
    for li, h in enumerate(config.hidden):
        yield f"layer{li}.backbone", h, prev
        if config.architecture == "lda":
            yield f"layer{li}.encoder1", h, d
            yield f"layer{li}.encoder2", h, d
            yield f"layer{li}.gate_hidden", h, 3 * h
            yield f"layer{li}.gate_out", 2 * h, h
        prev = h
    yield "output", config.output_dim, prev


def _iter_blocks(params: NetworkParams):
    """LayerParams blocks in the same order as _block_shapes."""
    for layer in params.layers:
        if isinstance(layer, LDALayerParams):
            yield layer.backbone
            yield layer.encoder1
            yield layer.encoder2
            yield layer.gate_hidden
            yield layer.gate_out
        else:
            yield layer
    yield params.output


def param_count(config: NetworkConfig) -> int:
    return sum(o * i + o for _, o, i in _block_shapes(config))


def _assemble(config: NetworkConfig, blocks) -> NetworkParams:
    """Group a flat-ordered block iterator back into the layer structure."""
    blocks = iter(blocks)
    params = NetworkParams(config)
    for _ in config.hidden:
        if config.architecture == "lda":
            params.layers.append(LDALayerParams(*(next(blocks) for _ in range(5))))
        else:
            params.layers.append(next(blocks))
    params.output = next(blocks)
    return params


def init_params(config: NetworkConfig, seed: int | None = None) -> NetworkParams:
    """Xavier-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.

    Every weight matrix is drawn, encoders and gate layers included, from
    the init stream of the given seed, in flat block order; deterministic.
    """
    if seed is None:
        seed = config.seed
    if seed is None:
        raise ConfigurationError("init_params needs a seed (argument or config)")
    rng = stream_generator(seed, STREAM_INIT)
    blocks = []
    for _, out_w, in_w in _block_shapes(config):
        bound = np.sqrt(6.0 / (in_w + out_w))
        weight = rng.uniform(-bound, bound, size=(out_w, in_w))
        blocks.append(LayerParams(weight, np.zeros(out_w)))
    return _assemble(config, blocks)


def to_flat(params: NetworkParams) -> np.ndarray:
    """Contiguous parameter vector in the documented block order."""
    parts = []
    for blk in _iter_blocks(params):
        parts.append(blk.weight.ravel())
        parts.append(blk.bias)
    return np.concatenate(parts)


def from_flat(config: NetworkConfig, flat: np.ndarray) -> NetworkParams:
    """Structured view of a flat vector (blocks alias the vector's memory)."""
    flat = np.asarray(flat, dtype=np.float64)
    if flat.shape != (param_count(config),):
        raise ShapeError(
            f"flat vector length {flat.shape} != {param_count(config)} for {config}"
        )
    blocks = []
    off = 0
    for _, out_w, in_w in _block_shapes(config):
        weight = flat[off:off + out_w * in_w].reshape(out_w, in_w)
        off += out_w * in_w
        bias = flat[off:off + out_w]
        off += out_w
        blocks.append(LayerParams(weight, bias))
    return _assemble(config, blocks)


# ---------------------------------------------------------------------------
# Forward passes.  Inputs are channels-first jets (d, N, C); see tape module.
# ---------------------------------------------------------------------------

def input_jet(points: np.ndarray, order: int) -> Jet:
    """Seed a batch of points (n, d) into one channels-first jet (d, n, C)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    d = pts.shape[1]
    seeds = [seed_input(i, pts[:, i], d, order) for i in range(d)]
    return Jet(seeds[0].space, np.stack([s.coeffs for s in seeds], axis=0))


def _bind_params(tape: Tape, params: NetworkParams):
    bound = []
    off = 0
    for blk, (_, out_w, in_w) in zip(_iter_blocks(params), _block_shapes(params.config)):
        wv = tape.param(blk.weight, off)
        off += out_w * in_w
        bv = tape.param(blk.bias, off)
        off += out_w
        bound.append((wv, bv))
    return bound


def _lda_layer_vars(bound_blocks, a_prev: Var, raw: Var) -> Var:
    (w, b), (e1w, e1b), (e2w, e2b), (ghw, ghb), (gow, gob) = bound_blocks
    a_mlp = affine(w, b, a_prev).tanh()
    e1 = affine(e1w, e1b, raw).tanh()
    e2 = affine(e2w, e2b, raw).tanh()
    z = concat_rows([a_mlp, e1, e2])
    logits = affine(gow, gob, affine(ghw, ghb, z).tanh())
    h = a_mlp.jet.coeffs.shape[0]
    alpha1 = (take_rows(logits, 0, h) - take_rows(logits, h, 2 * h)).sigmoid()
    alpha2 = 1.0 - alpha1
    return a_mlp + (alpha1 * e1 + alpha2 * e2)


def forward(params: NetworkParams, x: Jet | Var, tape: Tape | None = None) -> Var:
    """Network output jets (output_dim, N, C); records on the given tape.

    Dispatches on config.architecture.  Pass a tape to take gradients
    afterwards; without one a private throwaway tape is used, which makes
    this a pure jet evaluation.
    """
    if tape is None:
        tape = Tape()
    xv = tape.input(x) if isinstance(x, Jet) else x
    bound = _bind_params(tape, params)
    pos = 0
    a = xv
    for layer in params.layers:
        if isinstance(layer, LDALayerParams):
            a = _lda_layer_vars(bound[pos:pos + 5], a, xv)
            pos += 5
        else:
            w, b = bound[pos]
            pos += 1
            a = affine(w, b, a).tanh()
    wo, bo = bound[pos]
    return affine(wo, bo, a)


def mlp_forward(params: NetworkParams, x: Jet | Var, tape: Tape | None = None) -> Var:
    """Plain backbone forward; requires an MLP-architecture params object."""
    if params.config.architecture != "mlp":
        raise ConfigurationError("mlp_forward needs architecture='mlp'")
    return forward(params, x, tape)


def lda_layer(layer: LDALayerParams, a_prev: Jet, raw_input: Jet) -> Jet:
    """One LDA layer as a pure jet computation (no surrounding network)."""
    tape = Tape()
    blocks = []
    off = 0
    for blk in (layer.backbone, layer.encoder1, layer.encoder2,
                layer.gate_hidden, layer.gate_out):
        wv = tape.param(blk.weight, off)
        off += blk.weight.size
        bv = tape.param(blk.bias, off)
        off += blk.bias.size
        blocks.append((wv, bv))
    out = _lda_layer_vars(blocks, tape.input(a_prev), tape.input(raw_input))
    return out.jet


def gating_weights(logits: np.ndarray) -> np.ndarray:
    """Two-branch softmax across axis 0 of a (2, ...) logit array.

    Computed as alpha1 = sigmoid(l1 - l2), alpha2 = 1 - alpha1, which is
    the two-way softmax in a shift-invariant form with the normalization
    alpha1 + alpha2 = 1 exact by construction.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if logits.shape[0] != 2:
        raise ShapeError("gating_weights expects a (2, ...) logit array")
    a1 = 1.0 / (1.0 + np.exp(logits[1] - logits[0]))
    return np.stack([a1, 1.0 - a1], axis=0)


# ---------------------------------------------------------------------------
# Parameter snapshots.
# ---------------------------------------------------------------------------

SNAPSHOT_FORMAT = "pinnjet-params-v1"


def save_params(params: NetworkParams, path) -> None:
    """JSON snapshot: config echo plus the flat float64 parameter vector."""
    cfg = params.config
    doc = {
        "format": SNAPSHOT_FORMAT,
        "config": {
            "input_dim": cfg.input_dim,
            "hidden": list(cfg.hidden),
            "output_dim": cfg.output_dim,
            "architecture": cfg.architecture,
            "activation": cfg.activation,
        },
        "values": to_flat(params).tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_params(path) -> NetworkParams:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != SNAPSHOT_FORMAT:
        raise ConfigurationError(f"unrecognized snapshot format in {path}")
    cfg = NetworkConfig(
        input_dim=doc["config"]["input_dim"],
        hidden=tuple(doc["config"]["hidden"]),
        output_dim=doc["config"]["output_dim"],
        architecture=doc["config"]["architecture"],
        activation=doc["config"]["activation"],
    )
    flat = np.array(doc["values"], dtype=np.float64)
    return from_flat(cfg, flat)
