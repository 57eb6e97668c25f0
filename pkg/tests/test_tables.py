import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from postinglab import (
    PostingTable,
    SourceSequence,
    SourceSpec,
    build_posting_table,
    from_codewords,
    kgram_code,
    list_size,
    naive_scan,
    parse_query,
    random_complete_code,
    retrieve_matches,
    rle_code,
    sample_source,
)


def _source(bits):
    return SourceSequence(bits, SourceSpec(p=0.5, n=len(bits), seed=0))


def test_unary_code_table():
    table = build_posting_table(from_codewords(["0", "1"]), _source("0110"))
    assert list(table.lists["0"]) == [0, 3]
    assert list(table.lists["1"]) == [1, 2]


def test_kgram_table_wraps_circularly():
    table = build_posting_table(kgram_code(2), _source("0110"))
    assert list(table.lists["01"]) == [0]
    assert list(table.lists["11"]) == [1]
    assert list(table.lists["10"]) == [2]
    assert list(table.lists["00"]) == [3]
    assert table.total_entries() == 4


def test_incomplete_code_rejected():
    with pytest.raises(ValueError):
        build_posting_table(from_codewords(["0", "11"]), _source("0101"))


def test_list_size_and_unknown_codeword():
    table = build_posting_table(from_codewords(["0", "1"]), _source("0110"))
    assert list_size(table, "0") == 2
    with pytest.raises(ValueError):
        table.list_size("01")


def test_source_shorter_than_max_len():
    # windows may wrap several times
    table = build_posting_table(kgram_code(3), _source("01"))
    assert table.total_entries() == 2
    assert list(table.lists["010"]) == [0]
    assert list(table.lists["101"]) == [1]


@given(st.integers(min_value=0, max_value=10**6))
def test_total_entries_equal_source_length(seed):
    rng = np.random.default_rng(seed)
    max_len = int(rng.integers(3, 8))
    m = int(rng.integers(2, min(32, 2**max_len) + 1))
    code = random_complete_code(m, max_len, seed)
    source = sample_source(SourceSpec(p=0.6, n=int(rng.integers(10, 2000)), seed=seed))
    table = build_posting_table(code, source)
    assert table.total_entries() == len(source)
    merged = np.sort(np.concatenate(list(table.lists.values())))
    assert np.array_equal(merged, np.arange(len(source)))


def test_flat_build_drops_crossing_positions():
    bits = "0110"
    table = build_posting_table(kgram_code(2), _source(bits), circular=False)
    assert table.total_entries() == 3  # position 3 would wrap
    assert list(table.lists["00"]) == []
    full = build_posting_table(kgram_code(2), _source(bits))
    assert full.total_entries() == 4


def test_vectorized_and_tree_walk_builds_agree(monkeypatch):
    import postinglab.codes as codes_module

    code = rle_code(5)
    source = sample_source(SourceSpec(p=0.4, n=3000, seed=9))
    fast = build_posting_table(code, source)
    monkeypatch.setattr(codes_module, "_LUT_MAX_BITS", 0)
    slow_code = rle_code(5)
    assert slow_code.lookup_table() is None
    slow = build_posting_table(slow_code, source)
    for word in code.codewords:
        assert np.array_equal(fast.lists[word], slow.lists[word])


def test_naive_scan_examples():
    assert list(naive_scan(_source("0110"), "11")) == [1]
    assert list(naive_scan(_source("0110"), "0")) == [0, 3]
    assert list(naive_scan(_source("0000"), "00")) == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        naive_scan(_source("01"), "011")
    with pytest.raises(ValueError):
        naive_scan(_source("01"), "")


def test_retrieve_examples():
    code = from_codewords(["0", "1"])
    source = _source("00101")
    table = build_posting_table(code, source)
    parsing = parse_query(code, "01")
    assert list(retrieve_matches(table, parsing)) == [1, 3]
    # query equal to the entire source matches at the origin
    whole = parse_query(code, "00101")
    assert list(retrieve_matches(table, whole)) == [0]


def test_retrieve_with_tail_only_query():
    code = kgram_code(3)
    source = _source("0110101")
    table = build_posting_table(code, source)
    parsing = parse_query(code, "01")
    assert parsing.body == ()
    got = retrieve_matches(table, parsing)
    assert np.array_equal(got, naive_scan(source, "01"))


def test_retrieve_requires_circular_table():
    code = from_codewords(["0", "1"])
    table = build_posting_table(code, _source("0110"), circular=False)
    with pytest.raises(ValueError):
        retrieve_matches(table, parse_query(code, "0"))


def test_dump_and_load_round_trip(tmp_path):
    code = rle_code(3)
    source = sample_source(SourceSpec(p=0.5, n=257, seed=3))
    table = build_posting_table(code, source)
    path = tmp_path / "table.tsv"
    table.dump(path)
    text = path.read_text()
    assert text.splitlines()[0].startswith("1\t")
    loaded = PostingTable.load(path, code)
    assert loaded.n == table.n
    for word in code.codewords:
        assert np.array_equal(loaded.lists[word], table.lists[word])
    with pytest.raises(ValueError):
        PostingTable.load(path, rle_code(4))
