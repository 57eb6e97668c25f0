"""Monte Carlo estimation of retrieval efficiency and parameter sweeps.

Efficiency is the expected covering cost of a query divided by log2(n).
Two evaluation modes are supported:

- ``empirical``: materialize the source, build the posting table, and charge
  each covering codeword the log of its actual list size. Trials whose
  covering touches an empty list have infinite cost; they are counted
  separately and excluded from the mean.
- ``analytic_table``: replace every list size by its expectation
  n * f(c), where f(c) is the per-position probability that codeword c
  starts at a position. No source is materialized, so n is unbounded.

Cost accounting:

- ``per_codeword``: every codeword of the covering contributes the log of
  its list size. This is the covering-cost definition.
- ``per_run``: for run-structured queries on run-length codes, each run is
  charged as one table access: log2 of (n times the product of the run's
  codeword frequencies) instead of one log2(n) per codeword. Under this
  accounting the estimate tends to the expected number of runs per query as
  n grows.

Seeding rule: trials are processed in fixed blocks of 1024. Block b of a run
with master seed s draws from ``SeedSequence(entropy=s, spawn_key=(2, b))``,
so results are bit-identical for any worker count. Derived seeds for sources,
generated codes, and sweep cells use spawn-key domains 0, 1, and 3.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ._io import atomic_write_text
from .codes import PostingCode, from_codewords, parse_code_spec, random_complete_code
from .analytics import codeword_frequency
from .queries import QueryModel, parse_law_spec
from .sources import SourceSpec, sample_source
from .tables import build_posting_table

__all__ = [
    "TRIAL_BLOCK",
    "derive_rng",
    "derive_seed",
    "EfficiencyEstimate",
    "estimate_efficiency",
    "efficiency_curve",
    "best_random_code",
    "SweepConfig",
    "load_sweep_config",
    "build_query_model",
    "SWEEP_COLUMNS",
    "sweep_rows",
    "rows_to_csv",
    "sweep",
    "ConfigError",
]

TRIAL_BLOCK = 1024
_EMPIRICAL_MAX_N = 10**8

SOURCE_DOMAIN = 0
CODE_DOMAIN = 1
TRIAL_DOMAIN = 2
CELL_DOMAIN = 3

MODES = ("empirical", "analytic_table")
ACCOUNTINGS = ("per_codeword", "per_run")


def _seedseq(master_seed: int, domain: int, *index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(domain, *index))


def derive_rng(master_seed: int, domain: int, *index: int) -> np.random.Generator:
    return np.random.default_rng(_seedseq(master_seed, domain, *index))


def derive_seed(master_seed: int, domain: int, *index: int) -> int:
    return int(_seedseq(master_seed, domain, *index).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class EfficiencyEstimate:
    """Mean and standard error of covering cost / log2(n) over finite trials."""

    eta_mean: float
    eta_stderr: float
    trials: int
    infinite_cost_trials: int
    n: int
    mode: str
    accounting: str

    @property
    def finite_trials(self) -> int:
        return self.trials - self.infinite_cost_trials

    @property
    def defined(self) -> bool:
        return self.finite_trials > 0


class _CodeCosts:
    """Per-codeword log costs plus subtree aggregates for fast trial costs.

    ``measure`` mirrors the parse walk and returns the covering codeword
    count, the sum of per-codeword log costs, and whether any involved list
    is empty. Tail expansions are aggregated per tree node, so a trial costs
    O(segments), not O(expansion size).
    """

    __slots__ = (
        "word_logs",
        "word_empty",
        "word_lens",
        "node_count",
        "node_logsum",
        "node_empty",
        "child0",
        "child1",
        "leaf",
        "lut_table",
        "max_len",
    )

    def __init__(self, code: PostingCode, word_logs, word_empty) -> None:
        tree = code.tree
        size = len(tree)
        child0, child1, leaf = tree.child0, tree.child1, tree.leaf
        node_count = [0] * size
        node_logsum = [0.0] * size
        node_empty = [False] * size
        for v in range(size - 1, -1, -1):
            li = leaf[v]
            if li >= 0:
                node_count[v] = 1
                node_logsum[v] = word_logs[li]
                node_empty[v] = word_empty[li]
            else:
                a, b = child0[v], child1[v]
                node_count[v] = node_count[a] + node_count[b]
                node_logsum[v] = node_logsum[a] + node_logsum[b]
                node_empty[v] = node_empty[a] or node_empty[b]
        self.word_logs = word_logs
        self.word_empty = word_empty
        self.word_lens = tuple(len(w) for w in code.codewords)
        self.node_count = node_count
        self.node_logsum = node_logsum
        self.node_empty = node_empty
        self.child0 = child0
        self.child1 = child1
        self.leaf = leaf
        lut = code.lookup_table()
        self.lut_table = lut.table if lut is not None else None
        self.max_len = code.max_len

    def measure(self, query: str) -> tuple[int, float, bool]:
        length = len(query)
        count = 0
        total = 0.0
        empty = False
        pos = 0
        word_logs = self.word_logs
        word_empty = self.word_empty
        table = self.lut_table
        if table is not None and self.max_len <= length <= 4096:
            width = self.max_len
            mask = (1 << width) - 1
            qint = int(query, 2)
            lens = self.word_lens
            while length - pos >= width:
                i = table[(qint >> (length - pos - width)) & mask]
                count += 1
                total += word_logs[i]
                empty |= word_empty[i]
                pos += lens[i]
        child0, child1, leaf = self.child0, self.child1, self.leaf
        node = 0
        start = pos
        for j in range(pos, length):
            node = (child1 if query[j] == "1" else child0)[node]
            li = leaf[node]
            if li >= 0:
                count += 1
                total += word_logs[li]
                empty |= word_empty[li]
                node = 0
                start = j + 1
        if start < length:
            count += self.node_count[node]
            total += self.node_logsum[node]
            empty |= self.node_empty[node]
        return count, total, empty


def _analytic_costs(code: PostingCode, p: float) -> _CodeCosts:
    logs = [math.log2(codeword_frequency(w, p)) for w in code.codewords]
    return _CodeCosts(code, logs, [False] * code.size)


def _empirical_costs(table) -> _CodeCosts:
    logs = []
    empty = []
    for w in table.code.codewords:
        size = table.list_size(w)
        logs.append(math.log2(size) if size else 0.0)
        empty.append(size == 0)
    return _CodeCosts(table.code, logs, empty)


_AGG_ZERO = (0, 0, 0.0, 0.0, 0.0, 0.0, 0.0)


def _block_aggregates(costs, model, accounting, analytic, max_query_len, master_seed, trials, blocks):
    """Per-block sums of the (a, b) cost components, in block order.

    A trial's efficiency sample at length n is a + b / log2(n): analytic mode
    uses a = covering size (or run count) and b = summed log frequencies;
    empirical mode folds the actual table sizes into b.
    """
    out = []
    for block in blocks:
        lo = block * TRIAL_BLOCK
        if lo >= trials:
            break
        rng = derive_rng(master_seed, TRIAL_DOMAIN, block)
        n_fin = 0
        n_inf = 0
        sa = sb = saa = sbb = sab = 0.0
        for _ in range(min(TRIAL_BLOCK, trials - lo)):
            query = model.sample(rng)
            if max_query_len is not None and len(query) > max_query_len:
                raise ValueError(
                    f"sampled query of length {len(query)} exceeds the source length"
                )
            nseg, logsum, has_empty = costs.measure(query)
            if has_empty:
                n_inf += 1
                continue
            if accounting == "per_codeword":
                a = float(nseg) if analytic else 0.0
            else:
                runs = query.count("1")
                a = float(runs) if analytic else float(runs - nseg)
            n_fin += 1
            sa += a
            sb += logsum
            saa += a * a
            sbb += logsum * logsum
            sab += a * logsum
        out.append((n_fin, n_inf, sa, sb, saa, sbb, sab))
    return out


def _merge(rows) -> tuple:
    agg = list(_AGG_ZERO)
    for row in rows:
        for i, v in enumerate(row):
            agg[i] += v
    return tuple(agg)


def _estimate_at(agg, n, trials, mode, accounting) -> EfficiencyEstimate:
    n_fin, n_inf, sa, sb, saa, sbb, sab = agg
    if n_fin == 0:
        return EfficiencyEstimate(math.nan, math.nan, trials, n_inf, n, mode, accounting)
    c = math.log2(n)
    total = sa + sb / c
    mean = total / n_fin
    if n_fin > 1:
        sq = saa + 2.0 * sab / c + sbb / (c * c)
        var = max(0.0, (sq - total * total / n_fin) / (n_fin - 1))
        stderr = math.sqrt(var / n_fin)
    else:
        stderr = math.nan
    return EfficiencyEstimate(mean, stderr, trials, n_inf, n, mode, accounting)


def _code_payload(code: PostingCode) -> dict:
    return {"kind": code.kind, "words": code.codewords}


def _rebuild_code(payload: dict) -> PostingCode:
    return from_codewords(payload["words"], kind=payload["kind"])


def _chunk_worker(args) -> list:
    payload, model, accounting, mode, master_seed, trials, blocks = args
    code = _rebuild_code(payload["code"])
    if mode == "empirical":
        table = build_posting_table(code, sample_source(payload["source_spec"]))
        costs = _empirical_costs(table)
        max_query_len = payload["source_spec"].n
    else:
        costs = _analytic_costs(code, payload["p"])
        max_query_len = None
    return _block_aggregates(
        costs, model, accounting, mode == "analytic_table", max_query_len,
        master_seed, trials, blocks,
    )


def _collect_aggregates(code, source_spec, model, trials, mode, accounting, seed, workers):
    n_blocks = -(-trials // TRIAL_BLOCK)
    if workers <= 1:
        if mode == "empirical":
            table = build_posting_table(code, sample_source(source_spec))
            costs = _empirical_costs(table)
            max_query_len = source_spec.n
        else:
            costs = _analytic_costs(code, source_spec.p)
            max_query_len = None
        rows = _block_aggregates(
            costs, model, accounting, mode == "analytic_table", max_query_len,
            seed, trials, range(n_blocks),
        )
        return _merge(rows)
    payload = {"code": _code_payload(code), "p": source_spec.p, "source_spec": source_spec}
    block_lists = [list(range(w, n_blocks, workers)) for w in range(workers)]
    tasks = [
        (payload, model, accounting, mode, seed, trials, blocks)
        for blocks in block_lists
        if blocks
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_chunk_worker, tasks))
    # Reassemble per-block rows in block order so float sums never depend on
    # the worker count.
    by_block: dict[int, tuple] = {}
    for blocks, rows in zip([t[-1] for t in tasks], results):
        for block, row in zip(blocks, rows):
            by_block[block] = row
    return _merge(row for _, row in sorted(by_block.items()))


def _validate_estimate_args(code, source_spec, query_model, trials, mode, accounting):
    if not isinstance(code, PostingCode) or not code.complete:
        raise ValueError("efficiency estimation requires a complete code")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if accounting not in ACCOUNTINGS:
        raise ValueError(f"accounting must be one of {ACCOUNTINGS}")
    if accounting == "per_run" and (
        query_model.kind != "runlength" or code.kind != "rle"
    ):
        raise ValueError("per_run accounting needs run-structured queries on an rle code")
    if source_spec.n < 2:
        raise ValueError("efficiency normalizes by log2(n); n must be >= 2")
    if mode == "empirical":
        if source_spec.n > _EMPIRICAL_MAX_N:
            raise ValueError(f"empirical mode materializes the source; n <= {_EMPIRICAL_MAX_N}")
        if query_model.kind == "iid" and query_model.length_law.max_value > source_spec.n:
            raise ValueError("query length law exceeds the source length")


def estimate_efficiency(
    code: PostingCode,
    source_spec: SourceSpec,
    query_model: QueryModel,
    trials: int,
    mode: str = "analytic_table",
    seed: int = 0,
    *,
    accounting: str = "per_codeword",
    workers: int = 1,
) -> EfficiencyEstimate:
    """Estimate covering cost / log2(n) by sampling queries.

    Deterministic per seed and independent of *workers*. In analytic mode the
    source spec contributes only p and n.
    """
    _validate_estimate_args(code, source_spec, query_model, trials, mode, accounting)
    agg = _collect_aggregates(
        code, source_spec, query_model, trials, mode, accounting, seed, workers
    )
    return _estimate_at(agg, source_spec.n, trials, mode, accounting)


def efficiency_curve(
    code: PostingCode,
    p: float,
    n_values: Sequence[int],
    query_model: QueryModel,
    trials: int,
    seed: int = 0,
    *,
    accounting: str = "per_codeword",
    workers: int = 1,
) -> tuple[EfficiencyEstimate, ...]:
    """Analytic-mode estimates over several n from one shared query sample.

    Sharing the sample makes the n-dependence of the estimates exact, which
    is what convergence-in-n comparisons want.
    """
    spec = SourceSpec(p=p, n=int(min(n_values)), seed=0)
    _validate_estimate_args(code, spec, query_model, trials, "analytic_table", accounting)
    agg = _collect_aggregates(
        code, spec, query_model, trials, "analytic_table", accounting, seed, workers
    )
    return tuple(
        _estimate_at(agg, int(n), trials, "analytic_table", accounting) for n in n_values
    )


def best_random_code(
    m: int,
    max_len: int,
    candidates: int,
    p: float,
    n: int,
    query_model: QueryModel,
    seed: int,
    *,
    trials: int = 2048,
    workers: int = 1,
) -> tuple[PostingCode, EfficiencyEstimate]:
    """Generate candidate codes by random splitting and keep the cheapest.

    Candidate j is grown with seed ``derive_seed(seed, CODE_DOMAIN, j)``. All
    candidates are scored in analytic mode on the same query stream (master
    seed ``derive_seed(seed, TRIAL_DOMAIN)``), so comparisons share their
    randomness; ties keep the earliest candidate.
    """
    if candidates < 1:
        raise ValueError("candidates must be >= 1")
    estimate_seed = derive_seed(seed, TRIAL_DOMAIN)
    spec = SourceSpec(p=p, n=n, seed=0)
    best: tuple[PostingCode, EfficiencyEstimate] | None = None
    for j in range(candidates):
        code = random_complete_code(m, max_len, derive_seed(seed, CODE_DOMAIN, j))
        est = estimate_efficiency(
            code, spec, query_model, trials, "analytic_table", estimate_seed,
            workers=workers,
        )
        if best is None or est.eta_mean < best[1].eta_mean:
            best = (code, est)
    return best


class ConfigError(ValueError):
    """Raised for malformed experiment configuration files."""


@dataclass(frozen=True)
class SweepConfig:
    codes: tuple[str, ...]
    pq: tuple[tuple[float, float], ...]
    n_values: tuple[int, ...]
    query: Mapping[str, str]
    trials: int
    seed: int
    mode: str = "analytic_table"
    accounting: str = "per_codeword"
    out: str | None = None


def build_query_model(query_cfg: Mapping[str, str], q: float) -> QueryModel:
    kind = query_cfg.get("kind")
    if kind == "iid":
        return QueryModel.iid_bits(q, parse_law_spec(query_cfg["length_law"]))
    if kind == "runlength":
        return QueryModel.run_structured(q, parse_law_spec(query_cfg["run_law"]))
    raise ConfigError(f"unknown query kind {kind!r}")


def load_sweep_config(path) -> SweepConfig:
    """Parse and validate a sweep config JSON file."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    try:
        config = SweepConfig(
            codes=tuple(str(c) for c in raw["codes"]),
            pq=tuple((float(p), float(q)) for p, q in raw["pq"]),
            n_values=tuple(int(n) for n in raw["n"]),
            query=dict(raw["query"]),
            trials=int(raw["trials"]),
            seed=int(raw["seed"]),
            mode=str(raw.get("mode", "analytic_table")),
            accounting=str(raw.get("accounting", "per_codeword")),
            out=str(raw["out"]) if "out" in raw else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config field: {exc}") from None
    _validate_config(config)
    return config


def _validate_config(config: SweepConfig) -> None:
    if not config.codes:
        pass  # an empty grid is allowed and yields a header-only CSV
    if config.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    if config.accounting not in ACCOUNTINGS:
        raise ConfigError(f"accounting must be one of {ACCOUNTINGS}")
    if config.trials < 1:
        raise ConfigError("trials must be >= 1")
    if config.seed < 0:
        raise ConfigError("seed must be nonnegative")
    for p, q in config.pq:
        if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
            raise ConfigError("p and q must lie strictly between 0 and 1")
    for n in config.n_values:
        if n < 2:
            raise ConfigError("n must be >= 2")
    build_query_model(config.query, 0.5)  # shape check
    for spec in config.codes:
        if not any(spec.startswith(pre) for pre in ("kgram:", "rle:", "random:", "file:")):
            raise ConfigError(f"unknown code spec {spec!r}")


SWEEP_COLUMNS = (
    "code_type",
    "M",
    "k_or_maxlen",
    "N",
    "p",
    "q",
    "trials",
    "eta_mean",
    "eta_stderr",
    "infinite_cost_trials",
    "seed",
    "mode",
    "accounting",
)


def _cells(config: SweepConfig) -> list[dict]:
    cells = []
    index = 0
    for code_index, code_spec in enumerate(config.codes):
        code_seed = (
            derive_seed(config.seed, CODE_DOMAIN, code_index)
            if code_spec.startswith("random:")
            else None
        )
        for p, q in config.pq:
            for n in config.n_values:
                cells.append(
                    {
                        "code_spec": code_spec,
                        "code_seed": code_seed,
                        "p": p,
                        "q": q,
                        "n": int(n),
                        "trials": config.trials,
                        "mode": config.mode,
                        "accounting": config.accounting,
                        "master_seed": config.seed,
                        "cell_index": index,
                        "query": dict(config.query),
                    }
                )
                index += 1
    return cells


def _run_cell(cell: dict) -> dict:
    code = parse_code_spec(cell["code_spec"], seed=cell["code_seed"])
    model = build_query_model(cell["query"], cell["q"])
    source_seed = derive_seed(cell["master_seed"], SOURCE_DOMAIN, cell["cell_index"])
    spec = SourceSpec(p=cell["p"], n=cell["n"], seed=source_seed)
    est = estimate_efficiency(
        code,
        spec,
        model,
        cell["trials"],
        cell["mode"],
        derive_seed(cell["master_seed"], CELL_DOMAIN, cell["cell_index"]),
        accounting=cell["accounting"],
    )
    return {
        "code_type": code.kind,
        "M": code.size,
        "k_or_maxlen": code.max_len,
        "N": cell["n"],
        "p": cell["p"],
        "q": cell["q"],
        "trials": est.trials,
        "eta_mean": est.eta_mean,
        "eta_stderr": est.eta_stderr,
        "infinite_cost_trials": est.infinite_cost_trials,
        "seed": cell["master_seed"],
        "mode": est.mode,
        "accounting": est.accounting,
    }


def sweep_rows(config: SweepConfig, *, workers: int = 1) -> list[dict]:
    """One row per (code, p, q, n) cell, in grid order."""
    cells = _cells(config)
    if workers <= 1 or len(cells) <= 1:
        return [_run_cell(cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell, cells))


def _format_value(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def rows_to_csv(rows: Sequence[Mapping]) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_value(row[col]) for col in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"


def sweep(config: SweepConfig, out_path=None, *, workers: int = 1) -> list[dict]:
    """Run the grid and write its CSV atomically. Returns the rows."""
    rows = sweep_rows(config, workers=workers)
    target = out_path if out_path is not None else config.out
    if target is None:
        raise ConfigError("no output path: set 'out' in the config or pass one")
    atomic_write_text(target, rows_to_csv(rows))
    return rows
