"""The network: embedding, three stacked LSTM layers and a vocabulary softmax
head, trained as a next-token language model; the classifier variant keeps the
backbone, freezes the vocabulary head and appends a zero-initialized linear +
class-softmax head that reads the top layer's hidden states pooled over the
sentence's true positions.

Forward passes cache activations; ``backward_bptt`` consumes a cache and fills
``Parameter.grad`` by hand-derived backpropagation through time, truncated at
the configured window and global-norm clipped.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import kernels
from .errors import (
    CompatibilityError,
    ConfigError,
    DimensionError,
    FormatError,
    InputError,
    StateError,
    VersionError,
)
from .numkit import Parameter, global_norm_clip, softmax_rows

CHECKPOINT_VERSION = 1
_CHECKPOINT_MAGIC = b"BIASLENS-CKPT"
STACK_LAYERS = 3  # the architecture is fixed at three stacked LSTM layers


@dataclass
class ModelConfig:
    vocab_size: int
    embed_dim: int = 64
    hidden_dim: int = 128
    num_layers: int = STACK_LAYERS
    dropout_keep: float = 0.5
    bptt_window: int = 32
    num_classes: int = 0

    def __post_init__(self):
        if self.num_layers != STACK_LAYERS:
            raise ConfigError(f"num_layers is fixed at {STACK_LAYERS}, got {self.num_layers}")
        if self.vocab_size < 4:
            raise ConfigError(f"vocab_size must be >= 4 (specials), got {self.vocab_size}")
        if not (self.num_classes == 0 or 2 <= self.num_classes <= 64):
            raise ConfigError(f"num_classes must be 0 or in [2, 64], got {self.num_classes}")
        if not (0.0 < self.dropout_keep <= 1.0):
            raise ConfigError(f"dropout_keep must be in (0, 1], got {self.dropout_keep}")
        if self.bptt_window < 1:
            raise ConfigError(f"bptt_window must be >= 1, got {self.bptt_window}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)


@dataclass
class LstmLayer:
    w_in: Parameter  # (in_dim, 4H), gate order [input | forget | candidate | output]
    w_rec: Parameter  # (H, 4H)
    bias: Parameter  # (1, 4H)

    def params(self):
        return [self.w_in, self.w_rec, self.bias]


def _glorot(rng: np.random.Generator, shape, dtype) -> np.ndarray:
    r = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-r, r, size=shape).astype(dtype)


class LmNetwork:
    """Language model: embedding -> 3 x LSTM -> vocabulary softmax."""

    def __init__(self, config: ModelConfig, seed: int = 0, dtype=np.float32, vocab_hash: str = ""):
        self.config = config
        self.dtype = np.dtype(dtype)
        self.vocab_hash = vocab_hash
        v, e, h = config.vocab_size, config.embed_dim, config.hidden_dim
        rng = np.random.default_rng(seed)
        self.embedding = Parameter("embedding", _glorot(rng, (v, e), dtype))
        self.layers = []
        for i in range(STACK_LAYERS):
            in_dim = e if i == 0 else h
            w_in = Parameter(f"lstm{i}.w_in", _glorot(rng, (in_dim, 4 * h), dtype))
            w_rec = Parameter(f"lstm{i}.w_rec", _glorot(rng, (h, 4 * h), dtype))
            bias = Parameter(f"lstm{i}.bias", np.zeros((1, 4 * h), dtype))
            bias.value[0, h : 2 * h] = 1.0  # forget-gate bias offset stabilizes early training
            self.layers.append(LstmLayer(w_in, w_rec, bias))
        self.lm_head_w = Parameter("lm_head.w", _glorot(rng, (h, v), dtype))
        self.lm_head_b = Parameter("lm_head.b", np.zeros((1, v), dtype))

    def parameters(self) -> list:
        out = [self.embedding]
        for layer in self.layers:
            out.extend(layer.params())
        out.extend([self.lm_head_w, self.lm_head_b])
        return out

    def trainable_parameters(self) -> list:
        return self.parameters()

    def astype(self, dtype) -> "LmNetwork":
        """Deep copy at another precision (used by the gradient verifier)."""
        twin = LmNetwork(self.config, seed=0, dtype=dtype, vocab_hash=self.vocab_hash)
        for dst, src in zip(twin.parameters(), self.parameters()):
            dst.value[:] = src.value.astype(dtype)
            dst.grad[:] = src.grad.astype(dtype)
        return twin


class ClassifierNetwork:
    """The LM backbone plus a linear + class-softmax head; shares backbone Parameters."""

    def __init__(self, backbone: LmNetwork, num_classes: int, class_names=None, freeze_lm_head: bool = True):
        if num_classes < 2:
            raise ConfigError(f"num_classes must be >= 2 for a classifier, got {num_classes}")
        self.backbone = backbone
        self.config = replace(backbone.config, num_classes=num_classes)
        self.dtype = backbone.dtype
        self.vocab_hash = backbone.vocab_hash
        self.class_names = tuple(class_names) if class_names else tuple(str(i) for i in range(num_classes))
        if len(self.class_names) != num_classes:
            raise ConfigError("class_names length must equal num_classes")
        self.lm_head_frozen = freeze_lm_head
        h = backbone.config.hidden_dim
        # zero init: an untrained head yields an exactly uniform class distribution
        self.class_w = Parameter("class_head.w", np.zeros((h, num_classes), backbone.dtype))
        self.class_b = Parameter("class_head.b", np.zeros((1, num_classes), backbone.dtype))

    def parameters(self) -> list:
        return self.backbone.parameters() + [self.class_w, self.class_b]

    def trainable_parameters(self) -> list:
        out = []
        for p in self.backbone.parameters():
            if self.lm_head_frozen and p.name.startswith("lm_head."):
                continue
            out.append(p)
        out.extend([self.class_w, self.class_b])
        return out

    def astype(self, dtype) -> "ClassifierNetwork":
        twin = ClassifierNetwork(
            self.backbone.astype(dtype),
            self.config.num_classes,
            class_names=self.class_names,
            freeze_lm_head=self.lm_head_frozen,
        )
        for dst, src in ((twin.class_w, self.class_w), (twin.class_b, self.class_b)):
            dst.value[:] = src.value.astype(dtype)
            dst.grad[:] = src.grad.astype(dtype)
        return twin


def attach_classifier_head(lm: LmNetwork, num_classes: int, class_names=None,
                           freeze_lm_head: bool = True) -> ClassifierNetwork:
    """Augment a (pretrained or fresh) LM with the classification head.

    Backbone parameters are shared, not copied; the vocabulary head is frozen
    by default so fine-tuning cannot alter it.
    """
    return ClassifierNetwork(lm, num_classes, class_names=class_names, freeze_lm_head=freeze_lm_head)


def lstm_cell_forward(x_t: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray, layer: LstmLayer):
    """One LSTM cell step on 1-D vectors. Returns (h_t, c_t)."""
    x_t, h_prev, c_prev = (np.asarray(a) for a in (x_t, h_prev, c_prev))
    in_dim, four_h = layer.w_in.shape
    hd = four_h // 4
    if x_t.shape != (in_dim,) or h_prev.shape != (hd,) or c_prev.shape != (hd,):
        raise DimensionError(
            f"cell expects x ({in_dim},), h/c ({hd},); got {x_t.shape}, {h_prev.shape}, {c_prev.shape}"
        )
    pre = x_t[None, :] @ layer.w_in.value + h_prev[None, :] @ layer.w_rec.value + layer.bias.value
    gates = np.empty((1, 4 * hd), pre.dtype)
    c = np.empty((1, hd), pre.dtype)
    tanh_c = np.empty((1, hd), pre.dtype)
    h = np.empty((1, hd), pre.dtype)
    kernels.gates_forward(pre, c_prev[None, :].astype(pre.dtype), gates, c, tanh_c, h)
    return h[0], c[0]


class _LayerCache:
    __slots__ = ("x", "gates", "c", "tanh_c", "h", "mask", "h0", "c0")

    def __init__(self, x, gates, c, tanh_c, h, mask, h0, c0):
        self.x = x
        self.gates = gates
        self.c = c
        self.tanh_c = tanh_c
        self.h = h
        self.mask = mask  # inter-layer dropout mask, None in eval mode / top layer
        self.h0 = h0
        self.c0 = c0


class ForwardCache:
    """Activations retained by a train-mode forward for the matching backward."""

    def __init__(self, kind, mode, inputs, layer_caches, probs, lengths=None, features=None):
        self.kind = kind  # "lm" | "classifier"
        self.mode = mode
        self.inputs = inputs  # (B, T) int32
        self.layer_caches = layer_caches
        self.probs = probs  # lm: (T*B, V); classifier: (B, K)
        self.lengths = lengths
        self.features = features
        self.final_state = [(lc.h[-1].copy(), lc.c[-1].copy()) for lc in layer_caches]
        self.consumed = False


def _run_stack(net: LmNetwork, inputs: np.ndarray, train: bool, dropout_seed: int, init_state=None):
    """Run the 3-layer stack over inputs (B, T). Returns (top (T, B, H), layer caches)."""
    cfg = net.config
    b, t = inputs.shape
    hd = cfg.hidden_dim
    dtype = net.dtype
    rng = np.random.default_rng(dropout_seed) if train and cfg.dropout_keep < 1.0 else None

    x = np.ascontiguousarray(net.embedding.value[inputs].transpose(1, 0, 2))  # (T, B, E)
    caches = []
    for li, layer in enumerate(net.layers):
        if init_state is not None:
            h0, c0 = (s.astype(dtype, copy=True) for s in init_state[li])
        else:
            h0 = np.zeros((b, hd), dtype)
            c0 = np.zeros((b, hd), dtype)
        in_dim = x.shape[2]
        pre_x = (x.reshape(t * b, in_dim) @ layer.w_in.value).reshape(t, b, 4 * hd)
        pre_x += layer.bias.value
        gates = np.empty((t, b, 4 * hd), dtype)
        c_all = np.empty((t, b, hd), dtype)
        tanh_c = np.empty((t, b, hd), dtype)
        h_all = np.empty((t, b, hd), dtype)
        h, c = h0, c0
        for ti in range(t):
            pre = pre_x[ti] + h @ layer.w_rec.value
            kernels.gates_forward(pre, c, gates[ti], c_all[ti], tanh_c[ti], h_all[ti])
            h, c = h_all[ti], c_all[ti]
        mask = None
        out = h_all
        if li < STACK_LAYERS - 1 and rng is not None:
            # inverted dropout on the inter-layer feed only; the recurrent path stays intact
            keep = cfg.dropout_keep
            mask = (rng.random((t, b, hd)) < keep).astype(dtype) / dtype.type(keep)
            out = h_all * mask
        caches.append(_LayerCache(x, gates, c_all, tanh_c, h_all, mask, h0, c0))
        x = out
    return x, caches


def _check_tokens(net, tokens) -> np.ndarray:
    tokens = np.asarray(tokens, dtype=np.int32)
    if tokens.size and (tokens.min() < 0 or tokens.max() >= net.config.vocab_size):
        raise IndexError(
            f"token index out of range for vocab size {net.config.vocab_size}: "
            f"[{tokens.min()}, {tokens.max()}]"
        )
    return tokens


def forward_lm_batch(net: LmNetwork, inputs, mode: str = "eval", dropout_seed: int = 0, init_state=None):
    """Batched LM forward over inputs (B, T). Returns (probs (T*B, V), cache)."""
    inputs = np.atleast_2d(_check_tokens(net, inputs))
    train = mode == "train"
    top, caches = _run_stack(net, inputs, train, dropout_seed, init_state)
    t, b, hd = top.shape
    logits = top.reshape(t * b, hd) @ net.lm_head_w.value + net.lm_head_b.value
    probs = softmax_rows(logits)
    cache = ForwardCache("lm", mode, inputs, caches, probs)
    return probs, cache


def forward_lm(net: LmNetwork, tokens, mode: str = "eval", dropout_seed: int = 0):
    """LM forward on a single token sequence (T,). Returns (probs (T, V), cache)."""
    tokens = _check_tokens(net, tokens)
    if tokens.ndim != 1:
        raise DimensionError(f"expected a 1-D token sequence, got shape {tokens.shape}")
    probs, cache = forward_lm_batch(net, tokens[None, :], mode, dropout_seed)
    return probs, cache


def forward_classifier_batch(net: ClassifierNetwork, inputs, lengths, mode: str = "eval", dropout_seed: int = 0):
    """Classifier forward over a padded batch. Returns (probs (B, K), cache).

    The class head reads the top layer's hidden states averaged over each
    row's true positions, so padding cannot leak into the feature.
    """
    inputs = np.atleast_2d(_check_tokens(net.backbone, inputs))
    lengths = np.asarray(lengths, dtype=np.int64)
    b, t = inputs.shape
    if lengths.shape != (b,) or lengths.min() < 1 or lengths.max() > t:
        raise InputError(f"lengths must be in [1, {t}] and match batch size {b}")
    train = mode == "train"
    top, caches = _run_stack(net.backbone, inputs, train, dropout_seed)
    time_mask = (np.arange(t)[:, None] < lengths[None, :]).astype(net.dtype)  # (T, B)
    features = (top * time_mask[:, :, None]).sum(axis=0) / lengths[:, None].astype(net.dtype)
    logits = features @ net.class_w.value + net.class_b.value
    probs = softmax_rows(logits)
    cache = ForwardCache("classifier", mode, inputs, caches, probs, lengths=lengths, features=features)
    return probs, cache


def forward_classifier(net: ClassifierNetwork, tokens, mode: str = "eval", dropout_seed: int = 0):
    """Class distribution for a single token sequence."""
    tokens = np.asarray(tokens, dtype=np.int32)
    if tokens.size == 0:
        raise InputError("cannot classify an empty token sequence")
    probs, cache = forward_classifier_batch(net, tokens[None, :], [tokens.size], mode, dropout_seed)
    return probs[0], cache


def masked_mean_nll(probs: np.ndarray, targets_flat: np.ndarray, mask_flat=None):
    """Mean negative log-likelihood over (optionally masked) rows of probs.

    Returns a numpy scalar in the probs dtype so wide-precision verification
    losses are not quantized to float64.
    """
    picked = probs[np.arange(probs.shape[0]), targets_flat]
    nll = -np.log(np.maximum(picked, probs.dtype.type(1e-12)))
    if mask_flat is None:
        return nll.mean()
    denom = int(mask_flat.sum())
    if denom == 0:
        raise InputError("mask selects no target positions")
    return (nll * mask_flat).sum() / denom


def lm_loss(net: LmNetwork, inputs, targets, mode: str = "train", dropout_seed: int = 0):
    """Convenience forward-only mean next-token cross-entropy (no cache kept)."""
    inputs = np.atleast_2d(np.asarray(inputs, np.int32))
    targets = np.atleast_2d(np.asarray(targets, np.int64))
    probs, _ = forward_lm_batch(net, inputs, mode, dropout_seed)
    return masked_mean_nll(probs, targets.T.reshape(-1))


def classifier_loss(net: ClassifierNetwork, inputs, lengths, labels, mode: str = "train",
                    dropout_seed: int = 0):
    probs, _ = forward_classifier_batch(net, inputs, lengths, mode, dropout_seed)
    return masked_mean_nll(probs, np.asarray(labels, np.int64))


def backward_bptt(net, cache: ForwardCache, targets, mask=None, clip_norm: float = 5.0) -> list:
    """Gradients of the mean cross-entropy into every unfrozen Parameter.

    Overwrites ``.grad`` on the parameters it touches and returns them;
    gradients are truncated at the config's bptt window (LM) or cover the full
    sequence (classifier) and are jointly clipped at ``clip_norm``.
    """
    if cache is None:
        raise StateError("backward_bptt requires the cache from a train-mode forward")
    if cache.consumed:
        raise StateError("forward cache already consumed by a previous backward")
    if cache.mode != "train":
        raise StateError("backward_bptt requires a train-mode forward cache")
    cache.consumed = True

    if cache.kind == "lm":
        backbone = net
        b, t = cache.inputs.shape
        targets = np.atleast_2d(np.asarray(targets, np.int64))
        targets_flat = targets.T.reshape(-1)
        d_logits = cache.probs.copy()
        d_logits[np.arange(d_logits.shape[0]), targets_flat] -= 1.0
        if mask is not None:
            mask_flat = np.asarray(mask, bool).T.reshape(-1)
            d_logits[~mask_flat] = 0.0
            denom = int(mask_flat.sum())
        else:
            denom = targets_flat.size
        d_logits /= denom
        hd = net.config.hidden_dim
        top2d = cache.layer_caches[-1].h.reshape(t * b, hd)
        grads = {
            net.lm_head_w.name: top2d.T @ d_logits.astype(net.dtype),
            net.lm_head_b.name: d_logits.astype(net.dtype).sum(axis=0, keepdims=True),
        }
        d_top = (d_logits.astype(net.dtype) @ net.lm_head_w.value.T).reshape(t, b, hd)
        window = net.config.bptt_window
        params = net.trainable_parameters()
    else:
        backbone = net.backbone
        b, t = cache.inputs.shape
        labels = np.asarray(targets, np.int64)
        d_logits = cache.probs.copy()
        d_logits[np.arange(b), labels] -= 1.0
        d_logits /= b
        d_logits = d_logits.astype(net.dtype)
        grads = {
            net.class_w.name: cache.features.T @ d_logits,
            net.class_b.name: d_logits.sum(axis=0, keepdims=True),
        }
        d_feat = d_logits @ net.class_w.value.T
        hd = backbone.config.hidden_dim
        time_mask = (np.arange(t)[:, None] < cache.lengths[None, :]).astype(net.dtype)
        d_top = time_mask[:, :, None] * (d_feat / cache.lengths[:, None].astype(net.dtype))[None, :, :]
        window = t  # sentences are short: full-sequence backprop
        params = net.trainable_parameters()

    # stack backward
    d_h_level = d_top
    for li in range(STACK_LAYERS - 1, -1, -1):
        layer = backbone.layers[li]
        lc = cache.layer_caches[li]
        if li < STACK_LAYERS - 1 and lc.mask is not None:
            d_h_level = d_h_level * lc.mask
        hd = backbone.config.hidden_dim
        d_pre = np.empty((t, b, 4 * hd), backbone.dtype)
        dh_carry = np.zeros((b, hd), backbone.dtype)
        dc_carry = np.zeros((b, hd), backbone.dtype)
        dc_prev = np.empty((b, hd), backbone.dtype)
        w_rec_t = np.ascontiguousarray(layer.w_rec.value.T)
        for ti in range(t - 1, -1, -1):
            dh = d_h_level[ti] + dh_carry
            c_prev = lc.c[ti - 1] if ti > 0 else lc.c0
            kernels.gates_backward(lc.gates[ti], lc.tanh_c[ti], c_prev, dh, dc_carry, d_pre[ti], dc_prev)
            if ti % window == 0:
                dh_carry = np.zeros((b, hd), backbone.dtype)
                dc_carry = np.zeros((b, hd), backbone.dtype)
            else:
                dh_carry = d_pre[ti] @ w_rec_t
                dc_carry, dc_prev = dc_prev, dc_carry
        d_pre_flat = d_pre.reshape(t * b, 4 * hd)
        x_flat = lc.x.reshape(t * b, -1)
        h_prev_all = np.concatenate([lc.h0[None, :, :], lc.h[:-1]], axis=0).reshape(t * b, hd)
        grads[layer.w_in.name] = x_flat.T @ d_pre_flat
        grads[layer.w_rec.name] = h_prev_all.T @ d_pre_flat
        grads[layer.bias.name] = d_pre_flat.sum(axis=0, keepdims=True)
        d_h_level = (d_pre_flat @ layer.w_in.value.T).reshape(t, b, -1)

    d_emb = np.zeros_like(backbone.embedding.value)
    np.add.at(d_emb, cache.inputs.T.reshape(-1), d_h_level.reshape(t * b, -1))
    grads[backbone.embedding.name] = d_emb

    touched = []
    for p in params:
        if p.name in grads:
            p.grad[:] = grads[p.name]
            touched.append(p)
    global_norm_clip(touched, clip_norm)
    return touched


# --- checkpoint serialization -------------------------------------------------

def save_checkpoint(network, path) -> None:
    """Write the network as a structured text header plus raw little-endian
    32-bit blobs. Round trips are bit-exact for float32 networks."""
    is_classifier = isinstance(network, ClassifierNetwork)
    params = network.parameters()
    entries = []
    offset = 0
    blobs = []
    for p in params:
        raw = np.ascontiguousarray(p.value.astype("<f4")).tobytes()
        entries.append({"name": p.name, "rows": p.shape[0], "cols": p.shape[1], "offset": offset})
        offset += len(raw)
        blobs.append(raw)
    header = {
        "format_version": CHECKPOINT_VERSION,
        "kind": "classifier" if is_classifier else "lm",
        "config": network.config.to_dict(),
        "vocab_hash": network.vocab_hash,
        "params": entries,
        "blob_bytes": offset,
    }
    if is_classifier:
        header["lm_head_frozen"] = network.lm_head_frozen
        header["classes"] = list(network.class_names)
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(_CHECKPOINT_MAGIC + b" " + str(len(header_bytes)).encode() + b"\n")
        fh.write(header_bytes)
        fh.write(b"".join(blobs))


def _read_checkpoint(path):
    with open(path, "rb") as fh:
        first = fh.readline()
        if not first.startswith(_CHECKPOINT_MAGIC + b" "):
            raise FormatError(f"{path}: not a checkpoint file")
        try:
            header_len = int(first.split()[1])
        except (IndexError, ValueError) as exc:
            raise FormatError(f"{path}: malformed checkpoint preamble") from exc
        header_bytes = fh.read(header_len)
        if len(header_bytes) != header_len:
            raise FormatError(f"{path}: truncated header")
        try:
            header = json.loads(header_bytes)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: unreadable header") from exc
        blob = fh.read()
    if header.get("format_version") != CHECKPOINT_VERSION:
        raise VersionError(
            f"{path}: format version {header.get('format_version')} unsupported "
            f"(expected {CHECKPOINT_VERSION})"
        )
    if len(blob) != header["blob_bytes"]:
        raise FormatError(
            f"{path}: header declares {header['blob_bytes']} blob bytes, file has {len(blob)}"
        )
    return header, blob


def load_checkpoint(path, expected_vocab=None, dtype=np.float32):
    """Load a checkpoint; verifies format version and vocabulary compatibility.

    ``expected_vocab`` may be a Vocabulary (anything with a ``digest``
    attribute) or a digest string.
    """
    header, blob = _read_checkpoint(path)
    if expected_vocab is not None:
        expected = getattr(expected_vocab, "digest", expected_vocab)
        if expected != header["vocab_hash"]:
            raise CompatibilityError(
                f"{path}: checkpoint was trained with a different vocabulary "
                f"({header['vocab_hash'][:12]}.. != {str(expected)[:12]}..)"
            )
    config = ModelConfig.from_dict(header["config"])
    if header["kind"] == "classifier":
        backbone = LmNetwork(replace(config, num_classes=0), seed=0, dtype=dtype,
                             vocab_hash=header["vocab_hash"])
        network = ClassifierNetwork(backbone, config.num_classes,
                                    class_names=header.get("classes"),
                                    freeze_lm_head=header.get("lm_head_frozen", True))
    else:
        network = LmNetwork(replace(config, num_classes=0), seed=0, dtype=dtype,
                            vocab_hash=header["vocab_hash"])
    by_name = {p.name: p for p in network.parameters()}
    if set(by_name) != {e["name"] for e in header["params"]}:
        raise FormatError(f"{path}: parameter names do not match the declared architecture")
    for entry in header["params"]:
        p = by_name[entry["name"]]
        n = entry["rows"] * entry["cols"]
        raw = blob[entry["offset"] : entry["offset"] + 4 * n]
        if len(raw) != 4 * n:
            raise FormatError(f"{path}: blob for {entry['name']} is truncated")
        arr = np.frombuffer(raw, dtype="<f4").reshape(entry["rows"], entry["cols"])
        if p.shape != arr.shape:
            raise FormatError(f"{path}: {entry['name']} has shape {arr.shape}, expected {p.shape}")
        p.value[:] = arr.astype(dtype)
    return network


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
