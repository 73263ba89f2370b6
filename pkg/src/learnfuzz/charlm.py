"""Character-level recurrent language model, trained from scratch.

A stack of LSTM layers over one-hot characters with a softmax output head.
Everything is float64 numpy; training is plain SGD with per-tensor
gradient-norm clipping, fully deterministic for a fixed seed.  Gradients
are computed by backpropagation through time and are checked against
finite differences in the test suite.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

MAGIC = b"LFZCKPT1"
FORMAT_VERSION = 1

REQUIRED_CHARS = "obj endobj"


class UnknownCharError(Exception):
    pass


class DivergenceError(Exception):
    pass


class CorruptCheckpointError(Exception):
    pass


# ---------------------------------------------------------------------------
# Vocabulary
# ---------------------------------------------------------------------------

class Vocab:
    """Ordered set of characters with a bijective char <-> index map."""

    __slots__ = ("chars", "_index")

    def __init__(self, chars: Sequence[str]):
        self.chars = tuple(chars)
        if len(set(self.chars)) != len(self.chars):
            raise ValueError("vocabulary characters must be distinct")
        self._index = {ch: i for i, ch in enumerate(self.chars)}

    @classmethod
    def from_text(cls, text: str) -> "Vocab":
        return cls(sorted(set(text) | set(REQUIRED_CHARS)))

    @property
    def size(self) -> int:
        return len(self.chars)

    def index_of(self, ch: str) -> int:
        try:
            return self._index[ch]
        except KeyError:
            raise UnknownCharError(f"character {ch!r} not in vocabulary") from None

    def encode(self, text: str) -> np.ndarray:
        try:
            return np.array([self._index[ch] for ch in text], dtype=np.int64)
        except KeyError as e:
            raise UnknownCharError(f"character {e.args[0]!r} not in vocabulary") from None

    def __contains__(self, ch: str) -> bool:
        return ch in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocab) and self.chars == other.chars


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

@dataclass
class LayerWeights:
    # Gate rows are stacked [input, forget, output, candidate] along 4H.
    w_in: np.ndarray   # (4H, I)
    w_rec: np.ndarray  # (4H, H)
    bias: np.ndarray   # (4H,)


@dataclass
class ModelParams:
    vocab: Vocab
    num_layers: int
    hidden_size: int
    layers: list[LayerWeights]
    w_out: np.ndarray  # (V, H)
    b_out: np.ndarray  # (V,)

    def tensors(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend([layer.w_in, layer.w_rec, layer.bias])
        out.extend([self.w_out, self.b_out])
        return out

    def copy(self) -> "ModelParams":
        return ModelParams(
            self.vocab, self.num_layers, self.hidden_size,
            [LayerWeights(l.w_in.copy(), l.w_rec.copy(), l.bias.copy()) for l in self.layers],
            self.w_out.copy(), self.b_out.copy())

    def all_finite(self) -> bool:
        return all(np.isfinite(t).all() for t in self.tensors())


def init_params(vocab: Vocab, num_layers: int, hidden_size: int,
                rng: np.random.Generator, init_scale: float = 0.08) -> ModelParams:
    """Uniform [-init_scale, init_scale] weights, zero biases, forget-gate bias 1."""
    V, H = vocab.size, hidden_size
    layers = []
    for l in range(num_layers):
        size_in = V if l == 0 else H
        w_in = rng.uniform(-init_scale, init_scale, (4 * H, size_in))
        w_rec = rng.uniform(-init_scale, init_scale, (4 * H, H))
        bias = np.zeros(4 * H)
        bias[H:2 * H] = 1.0
        layers.append(LayerWeights(w_in, w_rec, bias))
    w_out = rng.uniform(-init_scale, init_scale, (V, H))
    b_out = np.zeros(V)
    return ModelParams(vocab, num_layers, hidden_size, layers, w_out, b_out)


def zero_params(vocab: Vocab, num_layers: int, hidden_size: int) -> ModelParams:
    V, H = vocab.size, hidden_size
    layers = [LayerWeights(np.zeros((4 * H, V if l == 0 else H)),
                           np.zeros((4 * H, H)), np.zeros(4 * H))
              for l in range(num_layers)]
    return ModelParams(vocab, num_layers, hidden_size, layers, np.zeros((V, H)), np.zeros(V))


# Recurrent state: one (h, c) pair per layer.
RecState = list[tuple[np.ndarray, np.ndarray]]


def _zero_state(params: ModelParams, batch: int) -> list[tuple[np.ndarray, np.ndarray]]:
    H = params.hidden_size
    return [(np.zeros((batch, H)), np.zeros((batch, H))) for _ in range(params.num_layers)]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _cell_step(layer: LayerWeights, x: np.ndarray, h_prev: np.ndarray,
               c_prev: np.ndarray, hidden: int):
    z = x @ layer.w_in.T + h_prev @ layer.w_rec.T + layer.bias
    gi = _sigmoid(z[:, :hidden])
    gf = _sigmoid(z[:, hidden:2 * hidden])
    go = _sigmoid(z[:, 2 * hidden:3 * hidden])
    gc = np.tanh(z[:, 3 * hidden:])
    c = gf * c_prev + gi * gc
    tc = np.tanh(c)
    h = go * tc
    return h, c, (gi, gf, go, gc, tc)


# ---------------------------------------------------------------------------
# Forward / loss / gradients
# ---------------------------------------------------------------------------

def forward(params: ModelParams, prefix: str,
            state: Optional[RecState] = None) -> tuple[np.ndarray, RecState]:
    """Next-character distribution after feeding ``prefix`` from ``state``.

    Pure function: the input state is not modified; the advanced state is
    returned alongside the probability vector over the vocabulary.
    """
    if not prefix:
        raise ValueError("prefix must be non-empty")
    idx = params.vocab.encode(prefix)
    H, V = params.hidden_size, params.vocab.size
    if state is None:
        hs = [(np.zeros((1, H)), np.zeros((1, H))) for _ in range(params.num_layers)]
    else:
        hs = [(h.reshape(1, H).copy(), c.reshape(1, H).copy()) for h, c in state]
    x = np.zeros((1, V))
    h = x
    for t in idx:
        x[:] = 0.0
        x[0, t] = 1.0
        h = x
        for l, layer in enumerate(params.layers):
            h, c, _ = _cell_step(layer, h, hs[l][0], hs[l][1], H)
            hs[l] = (h, c)
    logits = h @ params.w_out.T + params.b_out
    dist = _softmax(logits)[0]
    new_state: RecState = [(h[0].copy(), c[0].copy()) for h, c in hs]
    return dist, new_state


@dataclass
class Gradients:
    layers: list[LayerWeights]
    w_out: np.ndarray
    b_out: np.ndarray

    def tensors(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend([layer.w_in, layer.w_rec, layer.bias])
        out.extend([self.w_out, self.b_out])
        return out


def _forward_batch(params: ModelParams, X: np.ndarray):
    """Run the stack over index matrix X (B, T); cache activations for BPTT."""
    B, T = X.shape
    H, V, L = params.hidden_size, params.vocab.size, params.num_layers
    xo = np.zeros((T, B, V))
    xo[np.arange(T)[:, None], np.arange(B)[None, :], X.T] = 1.0
    h = [np.zeros((B, H)) for _ in range(L)]
    c = [np.zeros((B, H)) for _ in range(L)]
    cache = [[None] * T for _ in range(L)]
    tops = np.empty((T, B, H))
    for t in range(T):
        inp = xo[t]
        for l, layer in enumerate(params.layers):
            h_prev, c_prev = h[l], c[l]
            h[l], c[l], gates = _cell_step(layer, inp, h_prev, c_prev, H)
            cache[l][t] = (inp, h_prev, c_prev, gates, c[l])
            inp = h[l]
        tops[t] = h[l]
    logits = tops @ params.w_out.T + params.b_out  # (T, B, V)
    probs = _softmax(logits)
    return xo, cache, tops, probs


def _loss_from_probs(probs: np.ndarray, Y: np.ndarray) -> float:
    T, B, _ = probs.shape
    picked = probs[np.arange(T)[:, None], np.arange(B)[None, :], Y.T]
    return float(-np.log(picked).mean())


def _backward_batch(params: ModelParams, X: np.ndarray, Y: np.ndarray) -> tuple[float, Gradients]:
    B, T = X.shape
    H, V, L = params.hidden_size, params.vocab.size, params.num_layers
    xo, cache, tops, probs = _forward_batch(params, X)
    loss = _loss_from_probs(probs, Y)

    dlogits = probs.copy()
    dlogits[np.arange(T)[:, None], np.arange(B)[None, :], Y.T] -= 1.0
    dlogits /= T * B

    g_w_out = np.einsum("tbv,tbh->vh", dlogits, tops)
    g_b_out = dlogits.sum(axis=(0, 1))
    dh_above = dlogits @ params.w_out  # (T, B, H): gradient into top-layer h_t

    grads = [LayerWeights(np.zeros_like(l.w_in), np.zeros_like(l.w_rec), np.zeros_like(l.bias))
             for l in params.layers]
    for l in range(L - 1, -1, -1):
        layer = params.layers[l]
        g = grads[l]
        dh_next = np.zeros((B, H))
        dc_next = np.zeros((B, H))
        dx_all = np.empty((T, B, layer.w_in.shape[1]))
        for t in range(T - 1, -1, -1):
            inp, h_prev, c_prev, (gi, gf, go, gc, tc), _ = cache[l][t]
            dh = dh_above[t] + dh_next
            do = dh * tc
            dc = dh * go * (1.0 - tc * tc) + dc_next
            di = dc * gc
            dg = dc * gi
            df = dc * c_prev
            dc_next = dc * gf
            dz = np.concatenate([
                di * gi * (1.0 - gi),
                df * gf * (1.0 - gf),
                do * go * (1.0 - go),
                dg * (1.0 - gc * gc),
            ], axis=1)
            g.w_in += dz.T @ inp
            g.w_rec += dz.T @ h_prev
            g.bias += dz.sum(axis=0)
            dx_all[t] = dz @ layer.w_in
            dh_next = dz @ layer.w_rec
        dh_above = dx_all
    return loss, Gradients(grads, g_w_out, g_b_out)


def loss(params: ModelParams, window: tuple[str, str]) -> float:
    """Mean next-character cross-entropy of ``target`` given ``input``."""
    inp, target = window
    if len(inp) != len(target) or not inp:
        raise ValueError("window input and target must be non-empty and equal-length")
    X = params.vocab.encode(inp).reshape(1, -1)
    Y = params.vocab.encode(target).reshape(1, -1)
    _, _, _, probs = _forward_batch(params, X)
    return _loss_from_probs(probs, Y)


def grad(params: ModelParams, window: tuple[str, str]) -> Gradients:
    """Analytic gradient of :func:`loss` with respect to every parameter."""
    inp, target = window
    if len(inp) != len(target) or not inp:
        raise ValueError("window input and target must be non-empty and equal-length")
    X = params.vocab.encode(inp).reshape(1, -1)
    Y = params.vocab.encode(target).reshape(1, -1)
    _, g = _backward_batch(params, X, Y)
    return g


def clip_gradients(grads: Gradients, clip: float) -> Gradients:
    """Scale each tensor whose L2 norm exceeds ``clip`` down to that norm."""
    for t in grads.tensors():
        norm = float(np.sqrt((t * t).sum()))
        if norm > clip:
            t *= clip / norm
    return grads


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass
class TrainConfig:
    epochs: int
    window_size: int = 64
    batch_size: int = 1
    learning_rate: float = 0.003
    gradient_clip: float = 5.0
    rng_seed: int = 0
    checkpoint_epochs: Optional[set[int]] = None
    num_layers: int = 2
    hidden_size: int = 128
    lr_halving_epochs: int = 10

    def resolved_checkpoints(self) -> set[int]:
        cps = self.checkpoint_epochs if self.checkpoint_epochs is not None else {self.epochs}
        bad = [e for e in cps if e < 1 or e > self.epochs]
        if bad:
            raise ValueError(f"checkpoint epochs {bad} outside [1, {self.epochs}]")
        return set(cps)


TINY_PROFILE = {"num_layers": 1, "hidden_size": 32}


@dataclass
class Checkpoint:
    params: ModelParams
    epoch: int
    training_loss: float


def train(trainset, config: TrainConfig,
          log: Optional[callable] = None) -> list[Checkpoint]:
    """SGD over all windows, shuffled per epoch; checkpoints at the marked epochs."""
    checkpoints_at = config.resolved_checkpoints()
    if not trainset.windows:
        raise ValueError("training set has no windows")
    if trainset.window_size != config.window_size:
        raise ValueError(
            f"window size mismatch: trainset {trainset.window_size} vs config {config.window_size}")
    vocab = Vocab.from_text(trainset.text)
    rng = np.random.default_rng(config.rng_seed)
    params = init_params(vocab, config.num_layers, config.hidden_size, rng)

    N = len(trainset.windows)
    X = np.stack([vocab.encode(w[0]) for w in trainset.windows])
    Y = np.stack([vocab.encode(w[1]) for w in trainset.windows])

    checkpoints: list[Checkpoint] = []
    for epoch in range(1, config.epochs + 1):
        lr = config.learning_rate * 0.5 ** ((epoch - 1) // config.lr_halving_epochs)
        perm = rng.permutation(N)
        loss_sum = 0.0
        for lo in range(0, N, config.batch_size):
            sel = perm[lo:lo + config.batch_size]
            batch_loss, grads = _backward_batch(params, X[sel], Y[sel])
            loss_sum += batch_loss * len(sel)
            clip_gradients(grads, config.gradient_clip)
            for p, g in zip(params.tensors(), grads.tensors()):
                p -= lr * g
        training_loss = loss_sum / N
        if not np.isfinite(training_loss) or not params.all_finite():
            raise DivergenceError(f"training diverged at epoch {epoch}")
        if log is not None:
            log(epoch, training_loss)
        if epoch in checkpoints_at:
            checkpoints.append(Checkpoint(params.copy(), epoch, training_loss))
    return checkpoints


# ---------------------------------------------------------------------------
# Checkpoint container
# ---------------------------------------------------------------------------

def save_checkpoint(ckpt: Checkpoint, path) -> None:
    """Versioned binary container; weights are little-endian float64 in a
    fixed order (per layer: w_in, w_rec, bias; then w_out, b_out)."""
    p = ckpt.params
    head = struct.pack("<8sIIIIId", MAGIC, FORMAT_VERSION, p.num_layers,
                       p.hidden_size, p.vocab.size, ckpt.epoch, ckpt.training_loss)
    vocab_bytes = "".join(p.vocab.chars).encode("latin-1")
    blobs = [t.astype("<f8").tobytes(order="C") for t in p.tensors()]
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(vocab_bytes)
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        data = fh.read()
    head_size = struct.calcsize("<8sIIIIId")
    if len(data) < head_size:
        raise CorruptCheckpointError("file shorter than header")
    magic, version, num_layers, hidden, vsize, epoch, training_loss = struct.unpack(
        "<8sIIIIId", data[:head_size])
    if magic != MAGIC:
        raise CorruptCheckpointError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CorruptCheckpointError(f"unsupported version {version}")
    if num_layers < 1 or hidden < 1 or vsize < 1:
        raise CorruptCheckpointError("non-positive dimensions")
    pos = head_size
    if len(data) < pos + vsize:
        raise CorruptCheckpointError("truncated vocabulary table")
    vocab = Vocab(data[pos:pos + vsize].decode("latin-1"))
    pos += vsize

    shapes = []
    for l in range(num_layers):
        size_in = vsize if l == 0 else hidden
        shapes.extend([(4 * hidden, size_in), (4 * hidden, hidden), (4 * hidden,)])
    shapes.extend([(vsize, hidden), (vsize,)])
    expected = pos + sum(int(np.prod(s)) * 8 for s in shapes)
    if len(data) != expected:
        raise CorruptCheckpointError(f"expected {expected} bytes, got {len(data)}")

    tensors = []
    for shape in shapes:
        count = int(np.prod(shape))
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=pos).reshape(shape).copy()
        tensors.append(arr)
        pos += count * 8
    layers = [LayerWeights(tensors[3 * l], tensors[3 * l + 1], tensors[3 * l + 2])
              for l in range(num_layers)]
    params = ModelParams(vocab, num_layers, hidden, layers, tensors[-2], tensors[-1])
    if not params.all_finite():
        raise CorruptCheckpointError("non-finite weights")
    return Checkpoint(params, epoch, training_loss)
