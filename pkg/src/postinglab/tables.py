"""Posting tables: one sorted position list per codeword.

Building identifies, at every source position, the unique codeword that
starts there by walking the code tree over circular windows. A complete code
assigns exactly one codeword to each of the n positions, so the table always
holds n entries in total and the lists partition [0, n). A flat variant
(``circular=False``) drops positions whose codeword would cross the sequence
end; it exists for sensitivity checks only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._io import atomic_write_text
from .bits import bits_to_array, validate_bits
from .codes import PostingCode
from .sources import SourceSequence

__all__ = [
    "PostingTable",
    "build_posting_table",
    "list_size",
    "naive_scan",
    "retrieve_matches",
]


@dataclass
class PostingTable:
    code: PostingCode
    n: int
    circular: bool
    lists: dict[str, np.ndarray]

    def list_size(self, word: str) -> int:
        try:
            return int(self.lists[word].size)
        except KeyError:
            raise ValueError(f"codeword {word!r} is not in this table's code") from None

    def total_entries(self) -> int:
        return int(sum(arr.size for arr in self.lists.values()))

    def dump(self, path) -> None:
        """Write the debug format: ``codeword<TAB>comma-separated positions``."""
        lines = []
        for word in self.code.codewords:
            positions = ",".join(str(int(p)) for p in self.lists[word])
            lines.append(f"{word}\t{positions}\n")
        atomic_write_text(path, "".join(lines))

    @classmethod
    def load(cls, path, code: PostingCode, n: int | None = None) -> "PostingTable":
        """Read a dump written for *code*. Assumes a circular build, whose
        entry total equals the source length when *n* is not given."""
        lists: dict[str, np.ndarray] = {}
        for line in Path(path).read_text(encoding="ascii").splitlines():
            if not line:
                continue
            word, _, rest = line.partition("\t")
            values = [int(tok) for tok in rest.split(",") if tok]
            lists[word] = np.asarray(values, dtype=np.int64)
        if set(lists) != set(code.codewords):
            raise ValueError("table file does not match the given code")
        total = int(sum(arr.size for arr in lists.values()))
        return cls(code=code, n=n if n is not None else total, circular=True, lists=lists)


def build_posting_table(
    code: PostingCode, source: SourceSequence, *, circular: bool = True
) -> PostingTable:
    """Store every source position under the codeword that starts there."""
    if not code.complete:
        raise ValueError("table building requires a complete code")
    bits = source.bits
    n = len(bits)
    m = code.size
    lut = code.lookup_table()
    if lut is not None:
        width = code.max_len
        arr = bits_to_array(bits).astype(np.int64)
        reps = -(-(n + width - 1) // n)
        ext = np.tile(arr, reps)[: n + width - 1]
        vals = np.zeros(n, dtype=np.int64)
        for j in range(width):
            np.left_shift(vals, 1, out=vals)
            np.bitwise_or(vals, ext[j : j + n], out=vals)
        word_ids = lut.table[vals].astype(np.int64)
    else:
        reps = -(-(n + code.max_len - 1) // n)
        ext_s = (bits * reps)[: n + code.max_len - 1]
        tree = code.tree
        child0, child1, leaf = tree.child0, tree.child1, tree.leaf
        word_ids = np.empty(n, dtype=np.int64)
        for w in range(n):
            node = 0
            j = w
            while True:
                node = (child1 if ext_s[j] == "1" else child0)[node]
                j += 1
                if leaf[node] >= 0:
                    word_ids[w] = leaf[node]
                    break
    positions = np.arange(n, dtype=np.int64)
    if not circular:
        lens = np.asarray([len(w) for w in code.codewords], dtype=np.int64)[word_ids]
        keep = positions + lens <= n
        positions = positions[keep]
        word_ids = word_ids[keep]
    order = np.argsort(word_ids, kind="stable")
    sorted_positions = positions[order]
    counts = np.bincount(word_ids, minlength=m)
    chunks = np.split(sorted_positions, np.cumsum(counts)[:-1])
    lists = {word: chunks[i] for i, word in enumerate(code.codewords)}
    return PostingTable(code=code, n=n, circular=circular, lists=lists)


def list_size(table: PostingTable, word: str) -> int:
    return table.list_size(word)


def naive_scan(source: SourceSequence, query: str) -> np.ndarray:
    """All positions where *query* occurs in the circular source. Oracle for
    table-based retrieval; scans every window directly."""
    validate_bits(query)
    bits = source.bits
    n = len(bits)
    length = len(query)
    if length == 0:
        raise ValueError("query must be nonempty")
    if length > n:
        raise ValueError(f"query length {length} exceeds source length {n}")
    arr = bits_to_array(bits)
    reps = -(-(n + length - 1) // n)
    ext = np.tile(arr, reps)[: n + length - 1]
    q = bits_to_array(query)
    hit = np.ones(n, dtype=bool)
    for j in range(length):
        np.logical_and(hit, ext[j : j + n] == q[j], out=hit)
    return np.flatnonzero(hit).astype(np.int64)


def retrieve_matches(table: PostingTable, parsing) -> np.ndarray:
    """Join posting lists along a parsing to find every query occurrence.

    A position m matches when m + offset is in the posting list of every body
    segment, and m + tail_offset is in the list of at least one tail
    codeword, all modulo n. Returns a sorted array; empty means no matches.
    """
    if not table.circular:
        raise ValueError("retrieval requires a circular table")
    n = table.n
    lists = table.lists
    candidates: np.ndarray | None = None
    # Starting from the shortest list keeps the intersections small.
    for word, offset in sorted(parsing.body, key=lambda seg: lists[seg[0]].size):
        shifted = np.sort((lists[word] - offset) % n)
        if candidates is None:
            candidates = shifted
        else:
            candidates = np.intersect1d(candidates, shifted, assume_unique=True)
        if candidates.size == 0:
            return candidates
    if parsing.tail_codewords:
        parts = [(lists[w] - parsing.tail_offset) % n for w in parsing.tail_codewords]
        union = np.unique(np.concatenate(parts))
        if candidates is None:
            candidates = union
        else:
            candidates = np.intersect1d(candidates, union, assume_unique=True)
    if candidates is None:
        raise ValueError("parsing has neither body segments nor a tail")
    return candidates
