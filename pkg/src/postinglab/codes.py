"""Posting codes: ordered codeword sets with their binary code trees.

A code is prefix-free when no codeword is a proper prefix of another, and
complete when additionally its Kraft sum equals one exactly, which is the
same as every internal node of the code tree having both children. Complete
codes can parse any bit sequence, so table building and query parsing
require them.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .bits import validate_bits

__all__ = [
    "CodeTree",
    "PostingCode",
    "from_codewords",
    "kgram_code",
    "rle_code",
    "random_complete_code",
    "tail_expansion",
    "load_code",
    "save_code",
    "parse_code_spec",
    "MAX_KGRAM",
]

MAX_KGRAM = 24

# Lookup tables hold one entry per max_len-bit pattern; beyond this many bits
# the memory cost outweighs the speedup and tree walks are used instead.
_LUT_MAX_BITS = 20


class LookupTable(NamedTuple):
    """Maps every max_len-bit value to the codeword starting it."""

    table: np.ndarray
    lengths: tuple[int, ...]


class CodeTree:
    """Binary trie with integer node ids; the root is node 0.

    Children are stored in parallel lists, -1 marking an absent child, and
    ``leaf[v]`` holds the codeword index ending at node v (or -1). Nodes are
    created parents-first, which bottom-up aggregation passes rely on.
    """

    __slots__ = ("child0", "child1", "leaf")

    def __init__(self) -> None:
        self.child0: list[int] = [-1]
        self.child1: list[int] = [-1]
        self.leaf: list[int] = [-1]

    def __len__(self) -> int:
        return len(self.leaf)

    def _new_node(self) -> int:
        self.child0.append(-1)
        self.child1.append(-1)
        self.leaf.append(-1)
        return len(self.leaf) - 1

    def insert(self, word: str, index: int) -> bool:
        """Add *word* as leaf *index*; False if prefix-freeness is violated."""
        node = 0
        for ch in word:
            if self.leaf[node] >= 0:
                return False
            kids = self.child1 if ch == "1" else self.child0
            nxt = kids[node]
            if nxt < 0:
                nxt = self._new_node()
                kids[node] = nxt
            node = nxt
        if self.leaf[node] >= 0 or self.child0[node] >= 0 or self.child1[node] >= 0:
            return False
        self.leaf[node] = index
        return True

    def walk(self, node: int, symbol: str) -> int:
        return (self.child1 if symbol == "1" else self.child0)[node]

    def subtree_leaves(self, node: int) -> list[int]:
        """Codeword indices below *node*, in bit order ('0' branch first)."""
        out: list[int] = []
        stack = [node]
        child0, child1, leaf = self.child0, self.child1, self.leaf
        while stack:
            v = stack.pop()
            if v < 0:
                continue
            if leaf[v] >= 0:
                out.append(leaf[v])
                continue
            stack.append(child1[v])
            stack.append(child0[v])
        return out

    @classmethod
    def perfect(cls, depth: int) -> "CodeTree":
        """Tree of all ``2**depth`` words; leaf j holds codeword index j."""
        tree = cls.__new__(cls)
        n_internal = (1 << depth) - 1
        n_leaves = 1 << depth
        total = n_internal + n_leaves
        tree.child0 = [2 * i + 1 if i < n_internal else -1 for i in range(total)]
        tree.child1 = [2 * i + 2 if i < n_internal else -1 for i in range(total)]
        tree.leaf = [-1] * n_internal + list(range(n_leaves))
        return tree


class PostingCode:
    """A validated posting code. Instances are immutable by convention."""

    def __init__(
        self,
        codewords: tuple[str, ...],
        kind: str,
        prefix_free: bool,
        complete: bool,
        tree: CodeTree | None,
    ) -> None:
        self.codewords = codewords
        self.kind = kind
        self.prefix_free = prefix_free
        self.complete = complete
        self.tree = tree
        self.max_len = max(len(w) for w in codewords)
        self.word_ids = {w: i for i, w in enumerate(codewords)}
        self._lut: LookupTable | None = None

    @property
    def size(self) -> int:
        return len(self.codewords)

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2 ** len(w)) for w in self.codewords), Fraction(0))

    def lookup_table(self) -> LookupTable | None:
        """Pattern-to-codeword table, or None when the code is too deep."""
        if not self.complete or self.max_len > _LUT_MAX_BITS:
            return None
        if self._lut is None:
            width = self.max_len
            table = np.empty(1 << width, dtype=np.int32)
            for i, w in enumerate(self.codewords):
                lo = int(w, 2) << (width - len(w))
                table[lo : lo + (1 << (width - len(w)))] = i
            self._lut = LookupTable(table, tuple(len(w) for w in self.codewords))
        return self._lut

    def __repr__(self) -> str:
        return (
            f"PostingCode(kind={self.kind!r}, size={self.size}, "
            f"max_len={self.max_len}, complete={self.complete})"
        )


def from_codewords(words, kind: str = "explicit") -> PostingCode:
    """Validate *words* and build a code, with its tree when prefix-free."""
    codewords = tuple(words)
    if not codewords:
        raise ValueError("a posting code needs at least one codeword")
    for w in codewords:
        validate_bits(w)
        if not w:
            raise ValueError("codewords must be nonempty")
    if len(set(codewords)) != len(codewords):
        raise ValueError("codewords must be distinct")
    tree: CodeTree | None = CodeTree()
    prefix_free = True
    for i, w in enumerate(codewords):
        if not tree.insert(w, i):
            prefix_free = False
            tree = None
            break
    max_len = max(len(w) for w in codewords)
    complete = prefix_free and (
        sum(1 << (max_len - len(w)) for w in codewords) == 1 << max_len
    )
    return PostingCode(codewords, kind, prefix_free, complete, tree)


def kgram_code(k: int) -> PostingCode:
    """All ``2**k`` words of length k, in lexicographic order."""
    if not 1 <= k <= MAX_KGRAM:
        raise ValueError(f"k must be in [1, {MAX_KGRAM}], got {k}")
    words = tuple(format(i, f"0{k}b") for i in range(1 << k))
    return PostingCode(words, "kgram", True, True, CodeTree.perfect(k))


def rle_code(m: int) -> PostingCode:
    """Chain code {1, 01, 001, ...} closed by the all-zero word of length m-1."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    words = ["1"]
    for _ in range(m - 2):
        words.append("0" + words[-1])
    words.append("0" * (m - 1))
    return from_codewords(words, kind="rle")


def random_complete_code(m: int, max_len: int, seed: int) -> PostingCode:
    """Complete code grown by uniform random leaf splitting.

    Starts from {0, 1} and repeatedly splits a leaf chosen uniformly among
    those of depth < max_len until m leaves exist. Deterministic per seed;
    the codeword list comes out in tree (lexicographic) order.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if not 2 <= m <= (1 << max_len):
        raise ValueError(f"m must be in [2, 2**{max_len}], got {m}")
    rng = np.random.default_rng(seed)
    leaves = ["0", "1"]
    while len(leaves) < m:
        splittable = [i for i, w in enumerate(leaves) if len(w) < max_len]
        pick = splittable[int(rng.integers(len(splittable)))]
        word = leaves[pick]
        leaves[pick : pick + 1] = [word + "0", word + "1"]
    return from_codewords(leaves, kind="random")


def tail_expansion(code: PostingCode, tail: str) -> tuple[str, ...]:
    """All codewords having *tail* as a prefix, via the code tree."""
    if not code.complete:
        raise ValueError("tail expansion requires a complete code")
    validate_bits(tail)
    if not tail:
        raise ValueError("tail must be nonempty")
    tree = code.tree
    node = 0
    for ch in tail:
        if tree.leaf[node] >= 0:
            raise ValueError(
                "tail starts with a full codeword; parse further before expanding"
            )
        node = tree.walk(node, ch)
    if tree.leaf[node] >= 0:
        return (code.codewords[tree.leaf[node]],)
    return tuple(code.codewords[i] for i in tree.subtree_leaves(node))


def save_code(code: PostingCode, path) -> None:
    Path(path).write_text("".join(w + "\n" for w in code.codewords), encoding="ascii")


def load_code(path) -> PostingCode:
    """Read a code file: one ASCII codeword per line."""
    lines = [ln.strip() for ln in Path(path).read_text(encoding="ascii").splitlines()]
    return from_codewords([ln for ln in lines if ln], kind="explicit")


def parse_code_spec(spec: str, *, seed: int | None = None) -> PostingCode:
    """Build a code from a spec string.

    Accepted forms: ``kgram:<k>``, ``rle:<m>``, ``random:<m>,<max_len>``
    (requires *seed*), and ``file:<path>``.
    """
    head, _, rest = spec.partition(":")
    if not rest:
        raise ValueError(f"malformed code spec {spec!r}")
    if head == "kgram":
        return kgram_code(int(rest))
    if head == "rle":
        return rle_code(int(rest))
    if head == "random":
        parts = rest.split(",")
        if len(parts) != 2:
            raise ValueError(f"random code spec needs m,max_len: {spec!r}")
        if seed is None:
            raise ValueError("random code specs require a seed")
        return random_complete_code(int(parts[0]), int(parts[1]), seed)
    if head == "file":
        return load_code(rest)
    raise ValueError(f"unknown code spec kind {head!r}")
