import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from postinglab import (
    array_to_bits,
    bits_to_array,
    circular_window,
    hamming_weight,
    is_prefix,
    validate_bits,
)

bitstrings = st.text(alphabet="01", max_size=64)
nonempty_bits = st.text(alphabet="01", min_size=1, max_size=64)


def test_hamming_weight_examples():
    assert hamming_weight("0110") == 2
    assert hamming_weight("") == 0
    assert hamming_weight("111") == 3


def test_is_prefix_examples():
    assert is_prefix("01", "0110")
    assert is_prefix("", "0110")
    assert not is_prefix("11", "10")


def test_circular_window_examples():
    assert circular_window("0110", 3, 2) == "00"
    assert circular_window("0110", 0, 4) == "0110"
    assert circular_window("01", 1, 3) == "101"


def test_circular_window_rejects_empty_and_bad_start():
    with pytest.raises(ValueError):
        circular_window("", 0, 1)
    with pytest.raises(ValueError):
        circular_window("01", 2, 1)
    with pytest.raises(ValueError):
        circular_window("01", -1, 1)


def test_validate_bits():
    assert validate_bits("0101") == "0101"
    assert validate_bits("") == ""
    with pytest.raises(ValueError):
        validate_bits("01a1")
    with pytest.raises(TypeError):
        validate_bits(b"01")


def test_array_round_trip():
    arr = bits_to_array("01101")
    assert arr.dtype == np.uint8
    assert list(arr) == [0, 1, 1, 0, 1]
    assert array_to_bits(arr) == "01101"
    assert array_to_bits(np.array([], dtype=np.uint8)) == ""


@given(bitstrings, bitstrings)
def test_weight_is_additive_under_concatenation(a, b):
    assert hamming_weight(a + b) == hamming_weight(a) + hamming_weight(b)


@given(nonempty_bits, st.integers(min_value=0, max_value=63))
def test_full_window_is_a_rotation(x, start):
    start %= len(x)
    rotated = circular_window(x, start, len(x))
    assert sorted(rotated) == sorted(x)
    assert rotated == x[start:] + x[:start]


@given(bitstrings, bitstrings, bitstrings)
def test_prefix_partial_order(a, b, c):
    assert is_prefix(a, a)
    if is_prefix(a, b) and is_prefix(b, c):
        assert is_prefix(a, c)
