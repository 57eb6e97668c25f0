"""Query distributions, unique parsing, and covering costs.

A parsing tiles the query with codewords from offset 0. Because the code is
complete, the tree walk either ends exactly on a codeword boundary or stops
mid-tree; in the latter case the unread suffix is the tail and every codeword
below the reached tree node covers it. The covering cost charges log2 of the
posting-list size of each covering codeword, tail codewords included, and is
infinite when any involved list is empty.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .bits import array_to_bits, validate_bits
from .codes import PostingCode
from .tables import PostingTable

__all__ = [
    "FixedLaw",
    "TruncatedGeometricLaw",
    "parse_law_spec",
    "QueryModel",
    "Parsing",
    "KgramParseSummary",
    "RleParseSummary",
    "CoveringSearch",
    "sample_query",
    "parse_query",
    "parse_summary",
    "covering_cost",
    "brute_force_min_covering",
]

# Queries longer than this use plain tree walks; the integer fast path would
# shift a bignum per segment.
_LUT_QUERY_LIMIT = 4096


@dataclass(frozen=True)
class FixedLaw:
    """Point mass on a single positive integer."""

    value: int

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValueError("law support must be positive integers")

    @property
    def max_value(self) -> int:
        return self.value

    def items(self) -> tuple[tuple[int, float], ...]:
        return ((self.value, 1.0),)

    def mean(self) -> float:
        return float(self.value)

    def sample(self, rng: np.random.Generator) -> int:
        return self.value


@dataclass(frozen=True)
class TruncatedGeometricLaw:
    """Geometric(p) on {1..max_value}, renormalized."""

    p: float
    max_value: int
    _cdf: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError("geometric parameter must lie in (0, 1)")
        if self.max_value < 1:
            raise ValueError("law support must be positive integers")
        weights = [self.p * (1.0 - self.p) ** (v - 1) for v in range(1, self.max_value + 1)]
        total = sum(weights)
        cdf = []
        acc = 0.0
        for w in weights:
            acc += w / total
            cdf.append(acc)
        cdf[-1] = 1.0
        object.__setattr__(self, "_cdf", tuple(cdf))

    def items(self) -> tuple[tuple[int, float], ...]:
        prev = 0.0
        out = []
        for v, c in enumerate(self._cdf, start=1):
            out.append((v, c - prev))
            prev = c
        return tuple(out)

    def mean(self) -> float:
        return sum(v * pr for v, pr in self.items())

    def sample(self, rng: np.random.Generator) -> int:
        return bisect.bisect_right(self._cdf, rng.random()) + 1


def parse_law_spec(spec: str):
    """Parse ``fixed:<v>`` or ``tgeom:<p>,<max>`` into a length law."""
    head, _, rest = spec.partition(":")
    if head == "fixed" and rest:
        return FixedLaw(int(rest))
    if head == "tgeom" and rest:
        parts = rest.split(",")
        if len(parts) == 2:
            return TruncatedGeometricLaw(float(parts[0]), int(parts[1]))
    raise ValueError(f"malformed law spec {spec!r}")


@dataclass(frozen=True)
class QueryModel:
    """Query distribution: i.i.d. Bernoulli bits with a random length, or a
    concatenation of runs (zeros closed by a one) with geometric lengths."""

    kind: str
    q: float
    length_law: object | None = None
    run_law: object | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("iid", "runlength"):
            raise ValueError(f"unknown query model kind {self.kind!r}")
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must lie strictly between 0 and 1")
        if self.kind == "iid" and self.length_law is None:
            raise ValueError("iid query models need a length law")
        if self.kind == "runlength" and self.run_law is None:
            raise ValueError("runlength query models need a run-count law")

    @classmethod
    def iid_bits(cls, q: float, length_law) -> "QueryModel":
        return cls("iid", q, length_law=length_law)

    @classmethod
    def run_structured(cls, q: float, run_law) -> "QueryModel":
        return cls("runlength", q, run_law=run_law)

    def sample(self, rng: np.random.Generator) -> str:
        if self.kind == "iid":
            length = self.length_law.sample(rng)
            draw = rng.random(length) < self.q
            return array_to_bits(draw.astype(np.uint8))
        runs = self.run_law.sample(rng)
        lengths = rng.geometric(self.q, size=runs)
        return "".join("0" * (int(k) - 1) + "1" for k in lengths)


def sample_query(model: QueryModel, rng) -> str:
    """Draw one query; *rng* may be a Generator or an integer seed."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    return model.sample(rng)


@dataclass(frozen=True)
class Parsing:
    """Non-overlapping tiling of a query plus the tail rule at its end.

    Body segments (codeword, offset) tile the query up to tail_offset; the
    tail, when present, is covered by every codeword extending it past the
    query end.
    """

    body: tuple[tuple[str, int], ...]
    tail_offset: int | None
    tail: str
    tail_codewords: tuple[str, ...]

    @property
    def codeword_count(self) -> int:
        return len(self.body) + len(self.tail_codewords)

    def reconstruct(self) -> str:
        return "".join(word for word, _ in self.body) + self.tail


def parse_query(code: PostingCode, query: str) -> Parsing:
    """The unique parsing of *query* under a complete code."""
    if not code.complete:
        raise ValueError("parsing requires a complete code")
    validate_bits(query)
    length = len(query)
    if length == 0:
        raise ValueError("query must be nonempty")
    words = code.codewords
    tree = code.tree
    body: list[tuple[str, int]] = []
    pos = 0
    lut = code.lookup_table()
    if lut is not None and code.max_len <= length <= _LUT_QUERY_LIMIT:
        width = code.max_len
        mask = (1 << width) - 1
        qint = int(query, 2)
        table, lengths = lut.table, lut.lengths
        while length - pos >= width:
            i = table[(qint >> (length - pos - width)) & mask]
            body.append((words[i], pos))
            pos += lengths[i]
    child0, child1, leaf = tree.child0, tree.child1, tree.leaf
    node = 0
    start = pos
    for j in range(pos, length):
        node = (child1 if query[j] == "1" else child0)[node]
        li = leaf[node]
        if li >= 0:
            body.append((words[li], start))
            start = j + 1
            node = 0
    if start == length:
        return Parsing(tuple(body), None, "", ())
    expansions = tuple(words[i] for i in tree.subtree_leaves(node))
    return Parsing(tuple(body), start, query[start:], expansions)


@dataclass(frozen=True)
class KgramParseSummary:
    z: int
    r: int


@dataclass(frozen=True)
class RleParseSummary:
    runs: tuple[tuple[int, int], ...]


def parse_summary(code: PostingCode, query: str):
    """Quotient/remainder view of a parse for fixed-length and run codes.

    For a k-gram code, len(query) = k*z + r with 0 <= r < k. For a run code of
    size m, each run of length l contributes (z_j, r_j) with l = z_j*(m-1) +
    r_j and r_j in [1, m-1]; a run whose length is an exact multiple of m-1
    therefore reports r_j = m-1, matching the tree parse.
    """
    validate_bits(query)
    if not query:
        raise ValueError("query must be nonempty")
    if code.kind == "kgram":
        z, r = divmod(len(query), code.max_len)
        return KgramParseSummary(z, r)
    if code.kind == "rle":
        if query[-1] != "1":
            raise ValueError("run-structured queries must end in '1'")
        m = code.size
        runs: list[tuple[int, int]] = []
        k = 0
        for ch in query:
            k += 1
            if ch == "1":
                z, r = divmod(k - 1, m - 1)
                runs.append((z, r + 1))
                k = 0
        return RleParseSummary(tuple(runs))
    raise ValueError("parse summaries are defined for kgram and rle codes only")


def covering_cost(table: PostingTable, parsing: Parsing) -> float:
    """Sum of log2 posting-list sizes over the covering; +inf on empty lists."""
    total = 0.0
    for word, _ in parsing.body:
        size = table.list_size(word)
        if size == 0:
            return math.inf
        total += math.log2(size)
    for word in parsing.tail_codewords:
        size = table.list_size(word)
        if size == 0:
            return math.inf
        total += math.log2(size)
    return total


@dataclass(frozen=True)
class CoveringSearch:
    cost: float
    covering: tuple[tuple[str, int], ...] | None
    tilings: int


def brute_force_min_covering(
    code: PostingCode,
    table: PostingTable,
    query: str,
    *,
    max_query_len: int = 12,
    max_code_size: int = 16,
) -> CoveringSearch:
    """Exhaustive search over exact tilings of *query* by codewords.

    Counts every tiling and returns the cheapest one, which makes it an
    independent optimality and uniqueness oracle for :func:`parse_query` on
    queries that parse without a tail. Works on incomplete codes too, where
    zero tilings may exist.
    """
    validate_bits(query)
    length = len(query)
    if not 1 <= length <= max_query_len:
        raise ValueError(f"query length must be in [1, {max_query_len}]")
    if code.size > max_code_size:
        raise ValueError(f"code size must be <= {max_code_size}")
    words = code.codewords
    log_sizes = []
    for w in words:
        size = table.list_size(w)
        log_sizes.append(math.log2(size) if size else math.inf)
    tilings = [0] * (length + 1)
    tilings[length] = 1
    best = [math.inf] * (length + 1)
    best[length] = 0.0
    pick: list[int | None] = [None] * (length + 1)
    for offset in range(length - 1, -1, -1):
        for i, w in enumerate(words):
            end = offset + len(w)
            if end <= length and query.startswith(w, offset):
                if tilings[end]:
                    tilings[offset] += tilings[end]
                    cost = log_sizes[i] + best[end]
                    if pick[offset] is None or cost < best[offset]:
                        best[offset] = cost
                        pick[offset] = i
    if tilings[0] == 0:
        return CoveringSearch(math.inf, None, 0)
    covering: list[tuple[str, int]] = []
    offset = 0
    while offset < length:
        i = pick[offset]
        covering.append((words[i], offset))
        offset += len(words[i])
    return CoveringSearch(best[0], tuple(covering), tilings[0])
