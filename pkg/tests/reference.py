"""Naive reference decoders used as oracles.

Deliberately shares no machinery with the package engine: channel LLRs for
each bit are recomputed from scratch by a recursive pass over the decided
prefix, and the path list is plain Python.  Slow, obviously correct.
"""

from __future__ import annotations

import numpy as np

from scllab.decoder import f_op, g_op, hard_decision
from scllab.polar import polar_transform


def prefix_llr(channel_llrs: np.ndarray, prefix: np.ndarray) -> float:
    """Decision LLR for bit len(prefix), given the decided prefix bits."""
    n = channel_llrs.size
    if n == 1:
        return float(channel_llrs[0])
    half = n // 2
    a, b = channel_llrs[:half], channel_llrs[half:]
    if len(prefix) < half:
        return prefix_llr(f_op(a, b), prefix)
    x_left = polar_transform(np.asarray(prefix[:half], dtype=np.uint8))
    return prefix_llr(g_op(a, b, x_left), prefix[half:])


def reference_scl(code, llrs, list_size, pruner="proposed"):
    """Plain-Python list decode; returns (info_bits, metric).

    Paths are (bits tuple, metric) kept in slot order.  Candidate 2l-1 / 2l
    (1-based) extends slot l with bit 0 / 1; selection keeps the smallest
    (metric, candidate index) pairs; survivors are arranged by metric
    (conventional) or candidate index (proposed).
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    paths = [((), 0.0)]
    for i in range(code.n):
        decisions = [prefix_llr(llrs, np.array(bits, dtype=np.uint8)) for bits, _ in paths]
        if code.frozen_mask[i]:
            u = int(code.u_template[i])
            paths = [
                (bits + (u,), pm + _penalty(d, u))
                for (bits, pm), d in zip(paths, decisions)
            ]
        elif len(paths) < list_size:
            grown = []
            for (bits, pm), d in zip(paths, decisions):
                grown.append((bits + (0,), pm + _penalty(d, 0)))
                grown.append((bits + (1,), pm + _penalty(d, 1)))
            paths = grown
        else:
            candidates = []  # (metric, candidate index 1..2L, bits)
            for slot, ((bits, pm), d) in enumerate(zip(paths, decisions), start=1):
                candidates.append((pm + _penalty(d, 0), 2 * slot - 1, bits + (0,)))
                candidates.append((pm + _penalty(d, 1), 2 * slot, bits + (1,)))
            keep = sorted(candidates, key=lambda c: (c[0], c[1]))[:list_size]
            if pruner == "proposed":
                keep = sorted(keep, key=lambda c: c[1])
            paths = [(bits, pm) for pm, _, bits in keep]
    best = min(paths, key=lambda p: (p[1], p[0]))
    u = np.array(best[0], dtype=np.uint8)
    return u[code.info_indices], best[1]


def _penalty(llr: float, u: int) -> float:
    return 0.0 if u == int(hard_decision(llr)) else abs(llr)
