import math

import pytest

from postinglab import SourceSpec, sample_source


def test_spec_validation():
    with pytest.raises(ValueError):
        SourceSpec(p=0.0, n=10, seed=1)
    with pytest.raises(ValueError):
        SourceSpec(p=1.0, n=10, seed=1)
    with pytest.raises(ValueError):
        SourceSpec(p=0.5, n=0, seed=1)
    with pytest.raises(ValueError):
        SourceSpec(p=0.5, n=10, seed=-3)


def test_replay_determinism():
    spec = SourceSpec(p=0.3, n=5000, seed=77)
    assert sample_source(spec).bits == sample_source(spec).bits
    other = sample_source(SourceSpec(p=0.3, n=5000, seed=78))
    assert other.bits != sample_source(spec).bits


@pytest.mark.parametrize("p", [0.5, 0.7])
def test_empirical_mean_within_three_sigma(p):
    n = 10**6
    source = sample_source(SourceSpec(p=p, n=n, seed=11))
    ones = source.bits.count("1")
    bound = 3.0 * math.sqrt(p * (1.0 - p) / n)
    assert abs(ones / n - p) <= bound


def test_length_matches_spec():
    spec = SourceSpec(p=0.6, n=1234, seed=5)
    assert len(sample_source(spec)) == 1234
