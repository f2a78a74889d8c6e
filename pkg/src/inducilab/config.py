"""Process-wide knobs: logarithm base and deterministic random substreams."""

from __future__ import annotations

import math
import os
import zlib

import numpy as np

LOG_BASES = {"e": math.e, "2": 2.0, "10": 10.0}

_log_base_name = "e"


def set_log_base(name: str) -> None:
    global _log_base_name
    if name not in LOG_BASES:
        raise ValueError(f"unknown log base {name!r}; choose from {sorted(LOG_BASES)}")
    _log_base_name = name


def log_base_name() -> str:
    return _log_base_name


def log(x: float) -> float:
    return math.log(x) / math.log(LOG_BASES[_log_base_name])


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("INDUCILAB_WORKERS", "1")))
    except ValueError:
        return 1


_MASK64 = (1 << 64) - 1


def _stream_id(name: str) -> int:
    return zlib.crc32(name.encode())


def substream(seed: int, name: str, index: int = 0) -> np.random.Generator:
    """Independent Philox generator for (seed, name, index).

    The key carries the seed and the stream name and the index sits in the
    high words of the counter, so substreams never overlap (draws advance the
    low word) and do not depend on the order in which they are used.
    """
    key = ((seed & _MASK64) << 64) | _stream_id(name)
    bg = np.random.Philox(key=key, counter=[0, 0, index & _MASK64, 0])
    return np.random.Generator(bg)


def substream_uniform(seed: int, name: str, index: int) -> float:
    return float(substream(seed, name, index).random())
