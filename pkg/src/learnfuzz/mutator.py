"""Blackbox random byte fuzzer with a configurable fuzz-factor.

Each byte is independently replaced with probability 1/fuzz_factor by a
uniform random byte in [0, 255] (which may equal the original), so the
expected number of fuzzed positions is len(data)/fuzz_factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EmptyInputError(Exception):
    pass


@dataclass
class FuzzConfig:
    fuzz_factor: float = 100.0
    rng_seed: int = 0
    variants: int = 10

    def __post_init__(self):
        if self.fuzz_factor < 1:
            raise ValueError(f"fuzz_factor must be >= 1, got {self.fuzz_factor}")
        if self.variants < 1:
            raise ValueError(f"variants must be >= 1, got {self.variants}")


def _fuzz_with_rng(data: bytes, fuzz_factor: float,
                   rng: np.random.Generator) -> tuple[bytes, list[int]]:
    n = len(data)
    mask = rng.random(n) < (1.0 / fuzz_factor)
    values = rng.integers(0, 256, n, dtype=np.uint8)
    out = np.frombuffer(data, dtype=np.uint8).copy()
    out[mask] = values[mask]
    return out.tobytes(), np.flatnonzero(mask).tolist()


def random_fuzz(data: bytes, config: FuzzConfig) -> bytes:
    """Length-preserving random byte replacement; deterministic given the seed."""
    out, _ = random_fuzz_with_positions(data, config)
    return out


def random_fuzz_with_positions(data: bytes, config: FuzzConfig) -> tuple[bytes, list[int]]:
    """As random_fuzz, also reporting which positions drew a replacement."""
    if not data:
        raise EmptyInputError("cannot fuzz empty input")
    rng = np.random.default_rng(config.rng_seed)
    return _fuzz_with_rng(data, config.fuzz_factor, rng)


def variant_seed(master: int, source_index: int, variant_index: int) -> int:
    return int(np.random.SeedSequence(
        [master & 0xFFFFFFFF, source_index, variant_index]).generate_state(1)[0])


def make_variants(objects: list[bytes], config: FuzzConfig) -> list[bytes]:
    """config.variants independent fuzzes of each input, source-major order."""
    if not objects:
        raise EmptyInputError("no objects to fuzz")
    out: list[bytes] = []
    for i, data in enumerate(objects):
        if not data:
            raise EmptyInputError(f"object {i} is empty")
        for v in range(config.variants):
            rng = np.random.default_rng(variant_seed(config.rng_seed, i, v))
            fuzzed, _ = _fuzz_with_rng(data, config.fuzz_factor, rng)
            out.append(fuzzed)
    return out
