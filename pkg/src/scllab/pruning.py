"""Path-pruning strategies and compare-exchange models of hardware sorters.

Candidate indexes are 1-based (candidates 2l-1 and 2l descend from path l);
the batch selection entry points used by the decoder engine work on 0-based
array indexes and convert at the boundary.

Tie rule everywhere: when two candidates carry equal metrics, the smaller
candidate index wins selection.  All strategies here implement that same
rule, so they agree on the survivor set even on degenerate inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, log2

import numpy as np

from .crossbar import parent_of


# ---------------------------------------------------------------------------
# compare-exchange networks


@dataclass(frozen=True)
class CompareExchangeNetwork:
    """Staged comparator network over ``width`` lanes.

    Each comparator is (lane_a, lane_b, ascending) with lane_a < lane_b;
    ascending means the smaller key ends up on lane_a.  Lanes within one
    stage are disjoint, so a stage is one parallel hardware step.
    """

    width: int
    stages: tuple[tuple[tuple[int, int, bool], ...], ...]

    def __post_init__(self):
        for stage in self.stages:
            seen = set()
            for a, b, _ in stage:
                if not 0 <= a < b < self.width:
                    raise ValueError(f"bad comparator lanes ({a}, {b}) for width {self.width}")
                if a in seen or b in seen:
                    raise ValueError("a lane appears twice within one stage")
                seen.update((a, b))

    @property
    def comparator_count(self) -> int:
        return sum(len(stage) for stage in self.stages)

    @property
    def depth(self) -> int:
        return len(self.stages)

    def dump(self) -> str:
        """One stage per line; "a<b" keeps the smaller key on lane a, "a>b" the larger."""
        lines = []
        for stage in self.stages:
            lines.append(" ".join(f"{a}{'<' if asc else '>'}{b}" for a, b, asc in stage))
        return "\n".join(lines)


def parse_network(text: str, width: int) -> CompareExchangeNetwork:
    """Parse the :meth:`CompareExchangeNetwork.dump` format."""
    stages = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        stage = []
        for token in line.split():
            asc = "<" in token
            a, b = token.split("<" if asc else ">")
            stage.append((int(a), int(b), asc))
        stages.append(tuple(stage))
    return CompareExchangeNetwork(width=width, stages=tuple(stages))


def build_bitonic(width: int) -> CompareExchangeNetwork:
    """Batcher's bitonic sorting network, ascending (smallest key to lane 0)."""
    if width < 2 or width & (width - 1):
        raise ValueError(f"bitonic width must be a power of two >= 2, got {width}")
    stages = []
    k = 2
    while k <= width:
        j = k // 2
        while j >= 1:
            stage = []
            for a in range(width):
                b = a ^ j
                if a < b:
                    stage.append((a, b, (a & k) == 0))
            stages.append(tuple(stage))
            j //= 2
        k *= 2
    return CompareExchangeNetwork(width=width, stages=tuple(stages))


def build_mvf(width: int) -> CompareExchangeNetwork:
    """Truncated bitonic selector: low lanes receive the width/2 smallest keys.

    Sorts lanes 0..L-1 ascending and lanes L..2L-1 descending in parallel,
    then one half-cleaner stage pairs lane j with lane j+L keeping the
    minimum on lane j.  Output low lanes carry the smallest keys as a
    multiset, in no particular order.
    """
    half = width // 2
    if width < 2 or width != 2 * half or half & (half - 1):
        raise ValueError(f"selector width must be twice a power of two, got {width}")
    stages: list[tuple] = []
    if half >= 2:
        base = build_bitonic(half)
        for stage in base.stages:
            merged = [(a, b, asc) for a, b, asc in stage]
            merged += [(a + half, b + half, not asc) for a, b, asc in stage]
            stages.append(tuple(merged))
    stages.append(tuple((j, j + half, True) for j in range(half)))
    return CompareExchangeNetwork(width=width, stages=tuple(stages))


@lru_cache(maxsize=None)
def _stage_arrays(net: CompareExchangeNetwork):
    out = []
    for stage in net.stages:
        a = np.array([c[0] for c in stage], dtype=np.intp)
        b = np.array([c[1] for c in stage], dtype=np.intp)
        asc = np.array([c[2] for c in stage], dtype=bool)
        out.append((a, b, asc))
    return out


def _run_network(net, keys, payload=None, tie_break_payload=False):
    """Run a network over (rows, width) keys; payload rows travel with keys."""
    keys = np.array(keys, copy=True)
    if payload is not None:
        payload = np.array(payload, copy=True)
    for a, b, asc in _stage_arrays(net):
        ka, kb = keys[:, a], keys[:, b]
        if tie_break_payload:
            pa, pb = payload[:, a], payload[:, b]
            out_of_order = (ka > kb) | ((ka == kb) & (pa > pb))
            reversed_order = (ka < kb) | ((ka == kb) & (pa < pb))
        else:
            out_of_order = ka > kb
            reversed_order = ka < kb
        swap = np.where(asc, out_of_order, reversed_order)
        keys[:, a] = np.where(swap, kb, ka)
        keys[:, b] = np.where(swap, ka, kb)
        if payload is not None:
            pa, pb = payload[:, a], payload[:, b]
            payload[:, a] = np.where(swap, pb, pa)
            payload[:, b] = np.where(swap, pa, pb)
    return keys, payload


def apply_network(net: CompareExchangeNetwork, keys, payload=None, tie_break_payload=False):
    """Execute the network on one lane vector or a (rows, width) batch.

    Returns the permuted keys, or (keys, payload) when a payload is given.
    With ``tie_break_payload`` the comparators order equal keys by payload.
    """
    keys = np.asarray(keys)
    single = keys.ndim == 1
    if single:
        keys = keys[None, :]
        payload = None if payload is None else np.asarray(payload)[None, :]
    if keys.shape[1] != net.width:
        raise ValueError(f"expected {net.width} lanes, got {keys.shape[1]}")
    out_keys, out_payload = _run_network(net, keys, payload, tie_break_payload)
    if single:
        out_keys = out_keys[0]
        out_payload = None if out_payload is None else out_payload[0]
    return out_keys if payload is None else (out_keys, out_payload)


def verify_zero_one(net: CompareExchangeNetwork, selector: bool = False) -> bool:
    """Exhaustive binary-input check (the 0-1 principle).

    Sorter mode: every binary input must emerge ascending.  Selector mode:
    the low width/2 lanes must carry the multiset of smallest values for
    every binary input.
    """
    w = net.width
    if w > 20:
        raise ValueError(f"exhaustive binary check limited to width <= 20, got {w}")
    count = 1 << w
    inputs = ((np.arange(count, dtype=np.uint32)[:, None] >> np.arange(w)) & 1).astype(np.uint8)
    out, _ = _run_network(net, inputs)
    if selector:
        half = w // 2
        ones_total = inputs.sum(axis=1)
        zeros_total = w - ones_total
        expect_low_ones = half - np.minimum(zeros_total, half)
        return bool(np.all(out[:, :half].sum(axis=1) == expect_low_ones))
    return bool(np.all(np.diff(out.astype(np.int16), axis=1) >= 0))


# ---------------------------------------------------------------------------
# rank-based (radix-style) selection, modeled behaviorally


@dataclass(frozen=True)
class RadixSelector:
    """Rank-by-pairwise-wins selector: n(n-1)/2 comparators, shallow delay.

    ``keep=None`` models a full sorter; otherwise the keep smallest items
    are extracted.  Costs are analytic; there is no gate-level structure.
    """

    width: int
    keep: int | None = None

    @property
    def comparator_count(self) -> int:
        return self.width * (self.width - 1) // 2

    @property
    def depth(self) -> int:
        # one parallel comparison stage plus the win-count aggregation tree
        return 1 + ceil(log2(self.width))


def _pairwise_ranks(keys: np.ndarray, chunk: int = 200_000) -> np.ndarray:
    """rank[i] = number of items strictly better than i under (key, position)."""
    rows, n = keys.shape
    pos_i = np.arange(n)[:, None]
    pos_j = np.arange(n)[None, :]
    ranks = np.empty((rows, n), dtype=np.int64)
    step = max(1, chunk // max(1, n * n))
    for lo in range(0, rows, step):
        seg = keys[lo : lo + step]
        ki = seg[:, :, None]
        kj = seg[:, None, :]
        better = (kj < ki) | ((kj == ki) & (pos_j < pos_i))
        ranks[lo : lo + step] = better.sum(axis=2)
    return ranks


def radix_select(keys, keep: int) -> list[int]:
    """Positions of the ``keep`` smallest keys, in rank order.

    Ranks every item by counting pairwise wins; equal keys rank by position
    (the candidate-index tie rule).
    """
    keys = np.asarray(keys, dtype=np.float64)
    if keys.ndim != 1:
        raise ValueError("radix_select expects a flat sequence of keys")
    if not 1 <= keep <= keys.size:
        raise ValueError(f"keep must lie in 1..{keys.size}, got {keep}")
    ranks = _pairwise_ranks(keys[None, :])[0]
    order = np.argsort(ranks, kind="stable")
    return [int(i) for i in order[:keep]]


def _radix_select_batch(keys: np.ndarray, keep: int) -> np.ndarray:
    ranks = _pairwise_ranks(keys)
    return np.argsort(ranks, axis=1, kind="stable")[:, :keep]


def _radix_sort_rows(vals: np.ndarray) -> np.ndarray:
    """Sort each row ascending by scattering items to their win-count rank."""
    ranks = _pairwise_ranks(vals.astype(np.float64))
    out = np.empty_like(vals)
    np.put_along_axis(out, ranks, vals, axis=1)
    return out


# ---------------------------------------------------------------------------
# pruning strategies


@dataclass(frozen=True)
class SurvivorAssignment:
    """L surviving candidate indexes (1-based) with their metrics.

    When ``sorted_by_index`` the indexes ascend strictly and satisfy
    k <= i_k <= L + k for every slot k.
    """

    indexes: tuple[int, ...]
    metrics: tuple[float, ...]
    sorted_by_index: bool

    def satisfies_index_bounds(self) -> bool:
        L = len(self.indexes)
        ascending = all(a < b for a, b in zip(self.indexes, self.indexes[1:]))
        bounded = all(k <= i <= L + k for k, i in enumerate(self.indexes, start=1))
        return ascending and bounded


def _metrics_by_index(candidates) -> np.ndarray:
    """Validate a full candidate set and return metrics addressed by index-1."""
    n = len(candidates)
    if n < 2 or n % 2 != 0:
        raise ValueError(f"candidate sets come in pairs per path, got {n}")
    arr = np.full(n, np.nan)
    seen = set()
    for c in candidates:
        if not 1 <= c.index <= n or c.index in seen:
            raise ValueError(f"candidate indexes must cover 1..{n} exactly once")
        if c.parent != parent_of(c.index) or c.bit != (c.index - 1) % 2:
            raise ValueError(f"candidate {c.index} is inconsistent with its parent/bit")
        seen.add(c.index)
        arr[c.index - 1] = c.metric
    return arr


class ConventionalPruner:
    """Keep the L smallest metrics; emit survivors in ascending metric order."""

    name = "conventional"
    sorted_by_index = False

    def select_batch(self, metrics: np.ndarray) -> np.ndarray:
        L = metrics.shape[1] // 2
        return np.argsort(metrics, axis=1, kind="stable")[:, :L]

    def select(self, candidates) -> SurvivorAssignment:
        arr = _metrics_by_index(candidates)
        sel = self.select_batch(arr[None, :])[0]
        return SurvivorAssignment(
            indexes=tuple(int(i) + 1 for i in sel),
            metrics=tuple(float(arr[i]) for i in sel),
            sorted_by_index=False,
        )


class ProposedPruner:
    """Same survivor set as the conventional pruner, emitted in index order."""

    name = "proposed"
    sorted_by_index = True

    def select_batch(self, metrics: np.ndarray) -> np.ndarray:
        L = metrics.shape[1] // 2
        sel = np.argsort(metrics, axis=1, kind="stable")[:, :L]
        return np.sort(sel, axis=1)

    def select(self, candidates) -> SurvivorAssignment:
        arr = _metrics_by_index(candidates)
        sel = self.select_batch(arr[None, :])[0]
        return SurvivorAssignment(
            indexes=tuple(int(i) + 1 for i in sel),
            metrics=tuple(float(arr[i]) for i in sel),
            sorted_by_index=True,
        )


def prune_conventional(candidates) -> SurvivorAssignment:
    return ConventionalPruner().select(candidates)


def prune_proposed(candidates) -> SurvivorAssignment:
    return ProposedPruner().select(candidates)


class DesignSorter:
    """Two-stage hardware sorter: a metric stage picks the L survivors, an
    index stage orders them by candidate index.

    Design 1: selector network + bitonic index sort (cheapest, deepest).
    Design 2: selector network + rank-based index sort.
    Design 3: rank-based metric select + rank-based index sort (shallowest).
    """

    sorted_by_index = True

    def __init__(self, design: int, list_size: int):
        if design not in (1, 2, 3):
            raise ValueError(f"unknown sorter design {design}")
        L = list_size
        if L < 2 or L & (L - 1):
            raise ValueError(f"design sorters need a power-of-two list size >= 2, got {L}")
        self.design = design
        self.list_size = L
        self.name = f"design{design}"
        if design in (1, 2):
            self.metric_sorter = build_mvf(2 * L)
        else:
            self.metric_sorter = RadixSelector(2 * L, keep=L)
        if design == 1:
            self.index_sorter = build_bitonic(L)
        else:
            self.index_sorter = RadixSelector(L)

    @property
    def comparator_count(self) -> int:
        return self.metric_sorter.comparator_count + self.index_sorter.comparator_count

    @property
    def depth(self) -> int:
        return self.metric_sorter.depth + self.index_sorter.depth

    def select_batch(self, metrics: np.ndarray) -> np.ndarray:
        rows, width = metrics.shape
        L = self.list_size
        if width != 2 * L:
            raise ValueError(f"expected {2 * L} candidates, got {width}")
        if isinstance(self.metric_sorter, CompareExchangeNetwork):
            lanes = np.broadcast_to(np.arange(width, dtype=np.int64), metrics.shape)
            _, payload = _run_network(
                self.metric_sorter, metrics, lanes, tie_break_payload=True
            )
            kept = payload[:, :L]
        else:
            kept = _radix_select_batch(metrics, L)
        if isinstance(self.index_sorter, CompareExchangeNetwork):
            sorted_idx, _ = _run_network(self.index_sorter, kept)
        else:
            sorted_idx = _radix_sort_rows(kept)
        return sorted_idx

    def select(self, candidates) -> SurvivorAssignment:
        arr = _metrics_by_index(candidates)
        sel = self.select_batch(arr[None, :])[0]
        return SurvivorAssignment(
            indexes=tuple(int(i) + 1 for i in sel),
            metrics=tuple(float(arr[i]) for i in sel),
            sorted_by_index=True,
        )


def make_design_sorter(design: int, list_size: int) -> DesignSorter:
    return DesignSorter(design, list_size)


_PRUNER_NAMES = ("conventional", "proposed", "design1", "design2", "design3")


def get_pruner(name: str, list_size: int):
    """Pruning strategy by name: conventional, proposed, or design1..design3."""
    if name == "conventional":
        return ConventionalPruner()
    if name == "proposed":
        return ProposedPruner()
    if name in ("design1", "design2", "design3"):
        return make_design_sorter(int(name[-1]), list_size)
    raise ValueError(f"unknown pruner {name!r}; choose from {_PRUNER_NAMES}")
