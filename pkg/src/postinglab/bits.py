"""Bit-sequence primitives shared by the whole package.

Bit sequences are plain Python strings over the characters '0' and '1'; the
empty string is a valid sequence. Positions are 0-indexed everywhere,
including in every file format and CLI surface. External serialization is
the ASCII string itself.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "validate_bits",
    "hamming_weight",
    "is_prefix",
    "circular_window",
    "bits_to_array",
    "array_to_bits",
]


def validate_bits(bits: str) -> str:
    """Check that *bits* contains only '0'/'1' characters and return it."""
    if not isinstance(bits, str):
        raise TypeError(f"bit sequence must be a str, got {type(bits).__name__}")
    if bits.strip("01"):
        bad = bits.strip("01")[0]
        raise ValueError(f"bit sequence may contain only '0' and '1', found {bad!r}")
    return bits


def hamming_weight(bits: str) -> int:
    """Number of '1' symbols in *bits*."""
    return bits.count("1")


def is_prefix(a: str, b: str) -> bool:
    """True iff *a* equals the first ``len(a)`` symbols of *b*."""
    return b.startswith(a)


def circular_window(x: str, start: int, length: int) -> str:
    """Read *length* symbols of *x* starting at *start*, wrapping around.

    The window may wrap any number of times; ``circular_window(x, 0, len(x))``
    is the identity.
    """
    n = len(x)
    if n == 0:
        raise ValueError("cannot take a window of an empty sequence")
    if not 0 <= start < n:
        raise ValueError(f"window start {start} out of range [0, {n})")
    if length < 0:
        raise ValueError("window length must be >= 0")
    stop = start + length
    if stop <= n:
        return x[start:stop]
    reps = -(-stop // n)
    return (x * reps)[start:stop]


def bits_to_array(bits: str) -> np.ndarray:
    """ASCII bit string to a uint8 array of 0/1 values."""
    return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")


def array_to_bits(values: np.ndarray) -> str:
    """Inverse of :func:`bits_to_array`."""
    arr = np.asarray(values, dtype=np.uint8)
    return (arr + ord("0")).tobytes().decode("ascii")
