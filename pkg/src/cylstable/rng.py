"""Deterministic seeding and schedule-independent parallel helpers.

All randomness in the package flows through :func:`substream`: a master
64-bit seed plus an integer tag path is hashed (via ``SeedSequence``) into
an independent counter-based Philox stream.  Streams depend only on
``(seed, *tags)``, never on draw order elsewhere, so row- or
replica-parallel generation is independent of the execution schedule.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

_T = TypeVar("_T")
_U = TypeVar("_U")

# Tag namespaces for derived streams.  Values are arbitrary but frozen:
# changing them changes every sampled path.
TAG_SCALAR = 0x5CA1A
TAG_POSITIVE = 0x9051
TAG_ISOTROPIC = 0x150
TAG_NOISE_ROW = 0x4E0153
TAG_REPLICA = 0x4E9
TAG_PIECE = 0x91ECE

_UNIFORM_LO = 1e-16
_UNIFORM_HI = 1.0 - 1e-16


def substream(seed: int, *tags: int) -> np.random.Generator:
    """Derive an independent Philox stream from a master seed and a tag path."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(t) for t in tags]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def open_uniform(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniforms clipped into the open interval (0, 1).

    The clip guards the measure-zero endpoints that would produce
    log(0)/division-by-zero in the stable transforms.
    """
    return np.clip(rng.random(shape), _UNIFORM_LO, _UNIFORM_HI)


def thread_count() -> int:
    """Parallelism cap: CYLSTABLE_THREADS if set, else machine parallelism."""
    raw = os.environ.get("CYLSTABLE_THREADS")
    if raw is not None:
        count = int(raw)
        if count < 1:
            raise ValueError(f"CYLSTABLE_THREADS must be >= 1, got {raw}")
        return count
    return os.cpu_count() or 1


def parallel_map(fn: Callable[[_T], _U], items: Sequence[_T]) -> list[_U]:
    """Map ``fn`` over ``items``, preserving order regardless of schedule.

    Uses a thread pool when more than one worker is allowed (numpy releases
    the GIL on array kernels); results are merged in input order, so the
    output is identical for any worker count.
    """
    workers = min(thread_count(), len(items)) if items else 1
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
