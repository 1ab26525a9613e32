"""Structural model of the post-pruning memory-copy crossbar.

Candidate and slot indexes are 1-based here, matching the hardware numbering
used everywhere else in this package's pruning layer; callers working in
array land convert at the boundary.

When survivors are ordered by candidate index, destination slot k can only
ever draw from a fixed interval of L/2+1 source paths; ``verify_proposition``
demonstrates that bound by brute force over every survivor subset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import cached_property
from math import comb

import numpy as np


class RoutingViolation(Exception):
    """A destination slot was asked to copy from a source outside its allowed set."""

    def __init__(self, slot: int, source: int, allowed, frame: int | None = None):
        self.slot = slot
        self.source = source
        self.allowed = frozenset(allowed)
        self.frame = frame
        where = f" (frame {frame})" if frame is not None else ""
        super().__init__(
            f"slot {slot} routed from path {source}, allowed sources "
            f"{sorted(self.allowed)}{where}"
        )


def parent_of(index: int) -> int:
    """Existing path that candidate ``index`` descends from."""
    if index < 1:
        raise ValueError(f"candidate index must be >= 1, got {index}")
    return (index - 1) // 2 + 1


def allowed_sources(k: int, L: int) -> frozenset[int]:
    """Source paths slot k may copy from when survivors are index-sorted.

    Defined for even L only; the interval always has L/2 + 1 elements.
    """
    if L < 2 or L % 2 != 0:
        raise ValueError(f"allowed-source sets are defined for even L >= 2, got {L}")
    if not 1 <= k <= L:
        raise ValueError(f"slot must lie in 1..{L}, got {k}")
    lo = (k - 1) // 2 + 1
    hi = (L + k - 1) // 2 + 1
    return frozenset(range(lo, hi + 1))


@dataclass(frozen=True)
class CrossbarSpec:
    """Per-slot allowed-source sets: the full L-to-1 bank or the reduced one."""

    L: int
    reduced: bool

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.reduced and self.L % 2 != 0:
            raise ValueError("the reduced crossbar is defined for even L only")

    def allowed(self, k: int) -> frozenset[int]:
        if not 1 <= k <= self.L:
            raise ValueError(f"slot must lie in 1..{self.L}, got {k}")
        if not self.reduced:
            return frozenset(range(1, self.L + 1))
        return allowed_sources(k, self.L)

    @cached_property
    def _bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """(lo, hi) inclusive 1-based source bounds per slot, for batch checks."""
        ks = np.arange(1, self.L + 1)
        if self.reduced:
            lo = (ks - 1) // 2 + 1
            hi = (self.L + ks - 1) // 2 + 1
        else:
            lo = np.ones(self.L, dtype=np.int64)
            hi = np.full(self.L, self.L, dtype=np.int64)
        return lo, hi


def route(assignment, spec: CrossbarSpec) -> tuple[int, ...]:
    """Map index-sorted survivors to their source paths, enforcing allowed sets.

    ``assignment`` is a SurvivorAssignment or any sequence of 1-based survivor
    candidate indexes.  Raises RoutingViolation on the first slot whose parent
    falls outside its allowed set.
    """
    survivors = getattr(assignment, "indexes", assignment)
    if len(survivors) != spec.L:
        raise ValueError(f"expected {spec.L} survivors, got {len(survivors)}")
    sources = []
    for k, idx in enumerate(survivors, start=1):
        src = parent_of(int(idx))
        if spec.reduced:
            allowed = allowed_sources(k, spec.L)
            if src not in allowed:
                raise RoutingViolation(k, src, allowed)
        sources.append(src)
    return tuple(sources)


def route_batch(survivors: np.ndarray, spec: CrossbarSpec) -> np.ndarray:
    """Vectorized :func:`route` over a (frames, L) array of 1-based survivors."""
    survivors = np.asarray(survivors)
    if survivors.ndim != 2 or survivors.shape[1] != spec.L:
        raise ValueError(f"expected shape (frames, {spec.L}), got {survivors.shape}")
    sources = (survivors - 1) // 2 + 1
    if spec.reduced:
        lo, hi = spec._bounds
        bad = (sources < lo) | (sources > hi)
        if bad.any():
            f, k = np.argwhere(bad)[0]
            raise RoutingViolation(
                int(k) + 1,
                int(sources[f, k]),
                allowed_sources(int(k) + 1, spec.L),
                frame=int(f),
            )
    return sources


def copy_memories(paths, sources, metrics=None):
    """Copy path memories into new slots: slot k receives a full copy of
    ``paths[sources[k]-1]``.

    Reads all sources before any destination is produced, so overlapping
    source/destination slots cannot corrupt data.  ``metrics``, when given,
    supplies the survivor candidates' metrics for the new slots.
    """
    paths = list(paths)
    snapshots = []
    for k, src in enumerate(sources, start=1):
        p = paths[src - 1]
        snapshots.append(
            replace(
                p,
                slot=k,
                metric=float(metrics[k - 1]) if metrics is not None else p.metric,
                decoded_bits=np.array(p.decoded_bits, copy=True),
                partial_sums=[np.array(a, copy=True) for a in p.partial_sums],
                llr_memory=[np.array(a, copy=True) for a in p.llr_memory],
            )
        )
    return snapshots


def mux_input_totals(L: int, reduced: bool) -> int:
    """Total multiplexer inputs across the L-slot crossbar."""
    if reduced:
        if L % 2 != 0:
            raise ValueError("the reduced crossbar is defined for even L only")
        return L * (L // 2 + 1)
    return L * L


@dataclass
class PropositionReport:
    """Outcome of brute-forcing the allowed-source bound over survivor subsets."""

    L: int
    mode: str  # "exhaustive" or "random"
    subsets_checked: int
    passed: bool
    sizes_ok: bool
    tightness_ok: bool
    counterexample: tuple | None
    source_counts: np.ndarray  # (L, L+1): counts[k-1, src] subsets routing slot k from src

    def to_text(self) -> str:
        lines = [
            f"L={self.L}: {self.mode} check over {self.subsets_checked} survivor subsets",
            f"  allowed-set sizes all L/2+1={self.L // 2 + 1}: {'yes' if self.sizes_ok else 'NO'}",
        ]
        for k in range(1, self.L + 1):
            allowed = sorted(allowed_sources(k, self.L))
            counts = {s: int(self.source_counts[k - 1, s]) for s in allowed}
            lines.append(f"  slot {k}: allowed {allowed} realized-counts {counts}")
        lines.append(
            f"  every allowed source realized: {'yes' if self.tightness_ok else 'NO'}"
        )
        if self.counterexample is not None:
            subset, k, src = self.counterexample
            lines.append(f"  COUNTEREXAMPLE: survivors {subset} route slot {k} from {src}")
        lines.append(f"  result: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _combination_blocks(values: np.ndarray, k: int, max_rows: int):
    """Yield all k-subsets of ``values`` (ascending rows) in bounded-size blocks."""
    n = len(values)
    total = comb(n, k)
    if total <= max_rows:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(values.tolist(), k)),
            dtype=np.int16,
            count=total * k,
        )
        yield flat.reshape(total, k)
        return
    for j in range(n - k + 1):
        head = values[j]
        for sub in _combination_blocks(values[j + 1 :], k - 1, max_rows):
            block = np.empty((sub.shape[0], k), dtype=np.int16)
            block[:, 0] = head
            block[:, 1:] = sub
            yield block


def _random_subset_blocks(L: int, samples: int, seed: int, max_rows: int):
    """Yield uniformly random L-subsets of 1..2L, sorted per row."""
    rng = np.random.default_rng(seed)
    remaining = samples
    while remaining > 0:
        c = min(remaining, max_rows)
        r = rng.random((c, 2 * L))
        picks = np.argpartition(r, L - 1, axis=1)[:, :L]
        yield np.sort(picks, axis=1).astype(np.int16) + 1
        remaining -= c


def tightness_witnesses(L: int) -> np.ndarray:
    """One survivor subset per (slot, allowed source) pair realizing that source.

    A run of L consecutive candidate indexes places index t at slot k when the
    run starts at t-k+1; choosing t in {2*src-1, 2*src} within [k, L+k] makes
    slot k copy from src.  Extreme pairs are hit by almost no random subsets,
    so sampled checks rely on these constructive witnesses for coverage.
    """
    rows = []
    for k in range(1, L + 1):
        for src in sorted(allowed_sources(k, L)):
            t = 2 * src - 1 if k <= 2 * src - 1 <= L + k else 2 * src
            rows.append(np.arange(t - k + 1, t - k + 1 + L, dtype=np.int16))
    return np.stack(rows)


def verify_proposition(
    L: int,
    samples: int | None = None,
    seed: int = 0,
    max_rows: int = 1_000_000,
) -> PropositionReport:
    """Check the allowed-source bound against every (or sampled) survivor subset.

    Enumerates subsets of {1..2L} of size L, sorts each ascending, and checks
    that slot k's source parent lies in allowed_sources(k, L), that each
    allowed set has exactly L/2+1 elements, and that every allowed source is
    realized by at least one subset.
    """
    if L < 2 or L % 2 != 0:
        raise ValueError(f"the bound is proved for even L >= 2, got {L}")
    lo = np.array([(k - 1) // 2 + 1 for k in range(1, L + 1)], dtype=np.int16)
    hi = np.array([(L + k - 1) // 2 + 1 for k in range(1, L + 1)], dtype=np.int16)
    sizes_ok = bool(np.all(hi - lo + 1 == L // 2 + 1))

    counts = np.zeros((L, L + 1), dtype=np.int64)
    checked = 0
    counterexample = None
    if samples is None:
        mode = "exhaustive"
        blocks = _combination_blocks(np.arange(1, 2 * L + 1, dtype=np.int16), L, max_rows)
    else:
        mode = "random"
        blocks = itertools.chain(
            [tightness_witnesses(L)], _random_subset_blocks(L, samples, seed, max_rows)
        )
    for block in blocks:
        parents = (block - 1) // 2 + 1
        ok = (parents >= lo) & (parents <= hi)
        if not ok.all():
            r, c = np.argwhere(~ok)[0]
            counterexample = (tuple(int(v) for v in block[r]), int(c) + 1, int(parents[r, c]))
        for k in range(L):
            counts[k] += np.bincount(parents[:, k], minlength=L + 1)
        checked += block.shape[0]

    tight = all(
        counts[k - 1, src] > 0
        for k in range(1, L + 1)
        for src in allowed_sources(k, L)
    )
    passed = sizes_ok and tight and counterexample is None
    return PropositionReport(
        L=L,
        mode=mode,
        subsets_checked=checked,
        passed=passed,
        sizes_ok=sizes_ok,
        tightness_ok=tight,
        counterexample=counterexample,
        source_counts=counts,
    )
