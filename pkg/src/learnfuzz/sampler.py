"""Generate new objects from a trained model: four sampling strategies.

``nosample`` takes the argmax at every step, ``sample`` draws every
character from the learnt distribution, ``samplespace`` draws only after
whitespace, and ``samplefuzz`` draws every character but substitutes the
least-likely one where the model is confident.

RNG contract: character draws and fuzz coin tosses come from two
independent streams spawned from the config seed, and samplefuzz consumes
one draw from each stream at every step whether or not it fuzzes.  With
``t_fuzz = 1.0`` or ``p_t = 1.0`` the fuzz branch is unreachable and
samplefuzz is byte-identical to sample under the same seed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .charlm import ModelParams, forward

# PDF delimiting whitespace.
WHITESPACE_CHARS = frozenset("\x00\t\n\x0c\r ")


class NonTerminationError(Exception):
    pass


class GenMode(enum.Enum):
    NOSAMPLE = "nosample"
    SAMPLE = "sample"
    SAMPLESPACE = "samplespace"
    SAMPLEFUZZ = "samplefuzz"


@dataclass
class GenConfig:
    mode: GenMode = GenMode.SAMPLE
    prefix: str = "obj "
    stop_suffix: str = "endobj"
    max_len: int = 1500
    t_fuzz: float = 0.9
    p_t: float = 0.9
    rng_seed: int = 0
    max_restarts: int = 64

    def __post_init__(self):
        if isinstance(self.mode, str):
            self.mode = GenMode(self.mode)
        if not self.prefix:
            raise ValueError("prefix must be non-empty")
        if not self.stop_suffix:
            raise ValueError("stop_suffix must be non-empty")
        if self.max_len <= len(self.prefix):
            raise ValueError("max_len must exceed the prefix length")
        if not (0.0 <= self.t_fuzz <= 1.0 and 0.0 <= self.p_t <= 1.0):
            raise ValueError("t_fuzz and p_t must lie in [0, 1]")


@dataclass
class GeneratedObject:
    text: str
    mode: GenMode
    restarts: int = 0
    fuzzed_positions: list[int] = field(default_factory=list)


def _spawn_rngs(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    char_ss, fuzz_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(char_ss), np.random.default_rng(fuzz_ss)


def _draw(dist: np.ndarray, rng: np.random.Generator) -> int:
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(dist), u, side="right"))
    return min(idx, len(dist) - 1)


def generate(params: ModelParams, config: GenConfig) -> GeneratedObject:
    """Autoregressively extend the prefix until it ends with the stop suffix.

    Resets to the prefix whenever the text grows past max_len; fails with
    NonTerminationError after max_restarts resets.
    """
    if config.mode is GenMode.SAMPLEFUZZ:
        return sample_fuzz(params, config)
    char_rng, _ = _spawn_rngs(config.rng_seed)
    vocab = params.vocab

    text = config.prefix
    dist, state = forward(params, config.prefix)
    restarts = 0
    while not text.endswith(config.stop_suffix):
        if config.mode is GenMode.NOSAMPLE:
            idx = int(np.argmax(dist))
        elif config.mode is GenMode.SAMPLE:
            idx = _draw(dist, char_rng)
        else:  # SAMPLESPACE: draw after whitespace, argmax inside tokens
            if text[-1] in WHITESPACE_CHARS:
                idx = _draw(dist, char_rng)
            else:
                idx = int(np.argmax(dist))
        ch = vocab.chars[idx]
        text += ch
        if len(text) > config.max_len:
            restarts += 1
            if restarts > config.max_restarts:
                raise NonTerminationError(
                    f"no {config.stop_suffix!r} after {config.max_restarts} resets")
            text = config.prefix
            dist, state = forward(params, config.prefix)
            continue
        dist, state = forward(params, ch, state)
    return GeneratedObject(text, config.mode, restarts)


def sample_fuzz(params: ModelParams, config: GenConfig) -> GeneratedObject:
    """Sample each character; where the model is confident (p(c) > p_t) and
    the coin toss exceeds t_fuzz, substitute the least-likely character of
    the same distribution instead.  Positions of substitutions are recorded.
    """
    char_rng, fuzz_rng = _spawn_rngs(config.rng_seed)
    vocab = params.vocab

    text = config.prefix
    dist, state = forward(params, config.prefix)
    restarts = 0
    fuzzed: list[int] = []
    while not text.endswith(config.stop_suffix):
        idx = _draw(dist, char_rng)
        p_c = float(dist[idx])
        p_fuzz = fuzz_rng.random()
        if p_fuzz > config.t_fuzz and p_c > config.p_t:
            idx = int(np.argmin(dist))
            fuzzed.append(len(text))
        ch = vocab.chars[idx]
        text += ch
        if len(text) > config.max_len:
            restarts += 1
            if restarts > config.max_restarts:
                raise NonTerminationError(
                    f"no {config.stop_suffix!r} after {config.max_restarts} resets")
            text = config.prefix
            dist, state = forward(params, config.prefix)
            fuzzed.clear()
            continue
        dist, state = forward(params, ch, state)
    return GeneratedObject(text, GenMode.SAMPLEFUZZ, restarts, fuzzed)


def generate_many(params: ModelParams, config: GenConfig, n: int,
                  unique: bool = False, max_unique_tries: int = 20) -> list[GeneratedObject]:
    """Generate n objects with per-object seeds derived from the config seed.

    With ``unique`` set, re-draws (with fresh derived seeds) when a text was
    already produced, up to max_unique_tries per object.
    """
    out: list[GeneratedObject] = []
    seen: set[str] = set()
    attempt = 0
    for k in range(n):
        for _ in range(max_unique_tries):
            seed_k = _derived_seed(config.rng_seed, k, attempt)
            attempt += 1
            cfg = GenConfig(config.mode, config.prefix, config.stop_suffix,
                            config.max_len, config.t_fuzz, config.p_t,
                            seed_k, config.max_restarts)
            obj = generate(params, cfg)
            if not unique or obj.text not in seen:
                break
        seen.add(obj.text)
        out.append(obj)
    return out


def _derived_seed(master: int, k: int, attempt: int) -> int:
    return int(np.random.SeedSequence([master & 0xFFFFFFFF, k, attempt]).generate_state(1)[0])
