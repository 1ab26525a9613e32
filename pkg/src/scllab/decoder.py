"""Successive-cancellation decoding, plain and list-based.

``decode_sc`` is a small recursive reference decoder.  ``SclDecoder`` is the
list engine: it keeps L hardware-style path slots, duplicates paths while the
list fills, and at every later information bit forms 2L candidates, asks a
pruning strategy for the L survivors, routes the survivors through a crossbar
spec, and copies path memories accordingly.  The engine is vectorized over a
batch of frames; decoding a single frame is a batch of one.

Path memories (per-stage LLRs, per-stage partial sums, decoded bits) live in
flat per-path rows, so a crossbar copy is one gather of whole rows - the
software analog of copying every dedicated register bank at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import crossbar as xbar
from . import pruning
from .polar import PolarCode


def f_op(a, b):
    """Check-node LLR combine: sign(a)sign(b)min(|a|,|b|), sign(0) = +1."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    sa = np.where(a < 0, -1.0, 1.0)
    sb = np.where(b < 0, -1.0, 1.0)
    return sa * sb * np.minimum(np.abs(a), np.abs(b))


def g_op(a, b, s):
    """Variable-node LLR combine with partial sum s: b + (1-2s)a."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return b + (1.0 - 2.0 * np.asarray(s, dtype=np.float64)) * a


def hard_decision(llr):
    """1 where llr < 0 else 0 (a zero LLR decodes to bit 0)."""
    return (np.asarray(llr) < 0).astype(np.uint8)


def metric_update(pm, llr, u):
    """Path-metric step: unchanged when u matches the hard decision,
    else penalized by |llr|."""
    penalty = np.where(np.asarray(u) == hard_decision(llr), 0.0, np.abs(llr))
    return pm + penalty


def metric_update_exact(pm, llr, u):
    """Exact-metric variant: adds ln(1+e^-|llr|) on agreement and
    |llr| + ln(1+e^-|llr|) on disagreement."""
    llr = np.asarray(llr, dtype=np.float64)
    base = np.log1p(np.exp(-np.abs(llr)))
    penalty = np.where(np.asarray(u) == hard_decision(llr), 0.0, np.abs(llr))
    return pm + base + penalty


@dataclass
class PathState:
    """Snapshot of one decoding path's dedicated memories."""

    slot: int  # hardware slot, 1..L
    metric: float
    decoded_bits: np.ndarray
    partial_sums: list  # per-stage bit arrays, stage s holds 2^s bits
    llr_memory: list  # per-stage LLR arrays, stage s holds 2^s values
    active: bool = True


@dataclass(frozen=True)
class Candidate:
    """One split of an existing path: (parent, bit) pairs carry index 2*parent-1+bit."""

    parent: int
    bit: int
    index: int
    metric: float


@dataclass(frozen=True)
class PruneEvent:
    bit_index: int
    survivors: tuple[int, ...]  # 1-based candidate indexes, as emitted by the pruner
    sources: tuple[int, ...]  # 1-based source slots chosen by the crossbar


@dataclass
class AuditRecord:
    """Per-decode log of pruning events for routing audits."""

    events: list[PruneEvent] = field(default_factory=list)

    def to_lines(self) -> list[str]:
        return [
            "bit={} survivors={} sources={}".format(
                e.bit_index,
                ",".join(str(i) for i in e.survivors),
                ",".join(str(s) for s in e.sources),
            )
            for e in self.events
        ]


def decode_sc(code: PolarCode, llrs) -> np.ndarray:
    """Reference successive-cancellation decode; returns the information bits."""
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape != (code.n,):
        raise ValueError(f"expected {code.n} channel LLRs, got {llrs.shape}")
    frozen = code.frozen_mask
    template = code.u_template

    def rec(seg: np.ndarray, lo: int):
        if seg.size == 1:
            u = template[lo] if frozen[lo] else hard_decision(seg[0])
            bit = np.array([u], dtype=np.uint8)
            return bit, bit
        half = seg.size // 2
        a, b = seg[:half], seg[half:]
        u_left, x_left = rec(f_op(a, b), lo)
        u_right, x_right = rec(g_op(a, b, x_left), lo + half)
        return (
            np.concatenate([u_left, u_right]),
            np.concatenate([x_left ^ x_right, x_right]),
        )

    u, _ = rec(llrs, 0)
    return u[code.info_indices]


@dataclass
class DecodeBatchResult:
    info_bits: np.ndarray  # (frames, k)
    metrics: np.ndarray  # (frames,)
    audit: AuditRecord | None = None
    state_trace: list | None = None


class SclDecoder:
    """List decoder over L hardware path slots.

    Parameters
    ----------
    code : PolarCode
    list_size : power of two (1 gives plain successive cancellation)
    pruner : strategy name ("conventional", "proposed", "design1".."design3")
        or an object with ``select_batch`` / ``sorted_by_index``
    crossbar_spec : CrossbarSpec or None; defaults to the reduced spec for
        index-sorted pruners (even L) and the full spec otherwise
    exact_metric : use the exact path-metric update instead of the
        hard-decision penalty approximation

    Instances hold only static configuration; decodes are independent, so
    one decoder may serve many frames concurrently.
    """

    def __init__(
        self,
        code: PolarCode,
        list_size: int,
        pruner="proposed",
        crossbar_spec: xbar.CrossbarSpec | None = None,
        exact_metric: bool = False,
    ):
        if list_size < 1 or list_size & (list_size - 1):
            raise ValueError(f"list size must be a power of two, got {list_size}")
        self.code = code
        self.list_size = list_size
        self.exact_metric = exact_metric
        if isinstance(pruner, str):
            pruner = pruning.get_pruner(pruner, list_size)
        self.pruner = pruner
        if crossbar_spec is None:
            reduced = bool(getattr(pruner, "sorted_by_index", False)) and list_size % 2 == 0
            crossbar_spec = xbar.CrossbarSpec(L=list_size, reduced=reduced)
        if crossbar_spec.L != list_size:
            raise ValueError(
                f"crossbar is sized for L={crossbar_spec.L}, decoder uses L={list_size}"
            )
        self.crossbar_spec = crossbar_spec

        n = code.n
        self._m = n.bit_length() - 1
        self._heap_width = n - 1  # stage s occupies columns 2^s-1 .. 2^(s+1)-2
        self._offset = [(1 << s) - 1 for s in range(self._m)]
        # per-bit schedule: stage receiving the g update, and trailing ones
        self._g_stage = [0] * n
        self._trailing_ones = [0] * n
        for i in range(n):
            self._g_stage[i] = (i & -i).bit_length() - 1 if i > 0 else -1
            self._trailing_ones[i] = ((i + 1) & ~i).bit_length() - 1

    # -- internal helpers -------------------------------------------------

    def _stage(self, heap, s, width, g):
        off = self._offset[s]
        return heap[:, :g, off : off + width]

    def _chain(self, ch, llr_heap, ps_heap, i, g):
        """Refresh LLR stages for bit i and return the decision values (F, g)."""
        m = self._m
        if m == 0:
            return np.repeat(ch, g, axis=1)
        half = self.code.n >> 1
        if i == 0:
            top = m - 1
            self._stage(llr_heap, top, half, g)[:] = f_op(
                ch[:, None, :half], ch[:, None, half:]
            )
            start = top - 1
        else:
            t = self._g_stage[i]
            w = 1 << t
            if t + 1 == m:
                a, b = ch[:, None, :half], ch[:, None, half:]
            else:
                src = self._stage(llr_heap, t + 1, 2 * w, g)
                a, b = src[..., :w], src[..., w:]
            ps_seg = self._stage(ps_heap, t, w, g)
            self._stage(llr_heap, t, w, g)[:] = g_op(a, b, ps_seg)
            start = t - 1
        for s in range(start, -1, -1):
            w = 1 << s
            src = self._stage(llr_heap, s + 1, 2 * w, g)
            self._stage(llr_heap, s, w, g)[:] = f_op(src[..., :w], src[..., w:])
        return self._stage(llr_heap, 0, 1, g)[..., 0]

    def _penalties(self, d):
        pen0 = np.maximum(-d, 0.0)
        pen1 = np.maximum(d, 0.0)
        if self.exact_metric:
            base = np.log1p(np.exp(-np.abs(d)))
            pen0 = pen0 + base
            pen1 = pen1 + base
        return pen0, pen1

    def _propagate_partial_sums(self, ps_heap, bits, i, g):
        t1 = self._trailing_ones[i]
        if self._m == 0:
            return
        beta = bits[:, :g, i, None]
        for s in range(t1):
            w = 1 << s
            seg = self._stage(ps_heap, s, w, g)
            beta = np.concatenate([seg ^ beta, beta], axis=2)
        if t1 < self._m:
            self._stage(ps_heap, t1, 1 << t1, g)[:] = beta

    # -- decoding ----------------------------------------------------------

    def decode_batch(
        self, llrs: np.ndarray, collect_audit: bool = False, capture_state: bool = False
    ) -> DecodeBatchResult:
        """Decode a (frames, n) block of channel LLRs.

        ``collect_audit`` (single-frame batches only) records survivors and
        crossbar sources per pruning event.  ``capture_state`` snapshots the
        complete path memories after every pruning event, for structural
        comparisons; it is meant for small blocks.
        """
        ch = np.ascontiguousarray(llrs, dtype=np.float64)
        if ch.ndim != 2 or ch.shape[1] != self.code.n:
            raise ValueError(f"expected shape (frames, {self.code.n}), got {ch.shape}")
        frames, n = ch.shape
        L, W = self.list_size, self._heap_width
        if collect_audit and frames != 1:
            raise ValueError("audit collection is defined for single-frame batches")

        llr_heap = np.zeros((frames, L, W), dtype=np.float64)
        ps_heap = np.zeros((frames, L, W), dtype=np.uint8)
        bits = np.zeros((frames, L, n), dtype=np.uint8)
        pm = np.full((frames, L), np.inf)
        pm[:, 0] = 0.0
        gamma = 1
        audit = AuditRecord() if collect_audit else None
        trace = [] if capture_state else None
        frozen = self.code.frozen_mask
        template = self.code.u_template

        for i in range(n):
            d = self._chain(ch, llr_heap, ps_heap, i, gamma)
            if frozen[i]:
                u = int(template[i])
                pen = np.maximum(d, 0.0) if u == 1 else np.maximum(-d, 0.0)
                if self.exact_metric:
                    pen = pen + np.log1p(np.exp(-np.abs(d)))
                pm[:, :gamma] += pen
                bits[:, :gamma, i] = u
            elif gamma < L:
                pen0, pen1 = self._penalties(d)
                g2 = gamma * 2
                llr_heap[:, :g2] = np.repeat(llr_heap[:, :gamma], 2, axis=1)
                ps_heap[:, :g2] = np.repeat(ps_heap[:, :gamma], 2, axis=1)
                bits[:, :g2] = np.repeat(bits[:, :gamma], 2, axis=1)
                new_pm = np.empty((frames, g2))
                new_pm[:, 0::2] = pm[:, :gamma] + pen0
                new_pm[:, 1::2] = pm[:, :gamma] + pen1
                pm[:, :g2] = new_pm
                bits[:, 0:g2:2, i] = 0
                bits[:, 1:g2:2, i] = 1
                gamma = g2
            else:
                pen0, pen1 = self._penalties(d)
                cand = np.empty((frames, 2 * L))
                cand[:, 0::2] = pm + pen0
                cand[:, 1::2] = pm + pen1
                survivors = self.pruner.select_batch(cand)
                sources = xbar.route_batch(survivors + 1, self.crossbar_spec) - 1
                rows = (np.arange(frames)[:, None] * L + sources).ravel()
                llr_heap = llr_heap.reshape(frames * L, W)[rows].reshape(frames, L, W)
                ps_heap = ps_heap.reshape(frames * L, W)[rows].reshape(frames, L, W)
                bits = bits.reshape(frames * L, n)[rows].reshape(frames, L, n)
                pm = np.take_along_axis(cand, survivors, axis=1)
                bits[:, :, i] = (survivors & 1).astype(np.uint8)
                if audit is not None:
                    audit.events.append(
                        PruneEvent(
                            bit_index=i,
                            survivors=tuple(int(v) + 1 for v in survivors[0]),
                            sources=tuple(int(v) + 1 for v in sources[0]),
                        )
                    )
                if trace is not None:
                    trace.append(
                        {
                            "bit_index": i,
                            "survivors": survivors + 1,
                            "sources": sources + 1,
                            "llr_heap": llr_heap.copy(),
                            "ps_heap": ps_heap.copy(),
                            "decoded_bits": bits.copy(),
                            "metrics": pm.copy(),
                        }
                    )
            self._propagate_partial_sums(ps_heap, bits, i, gamma)

        info, metrics = self._pick_winners(bits, pm, gamma)
        return DecodeBatchResult(info, metrics, audit, trace)

    def _pick_winners(self, bits, pm, gamma):
        frames = pm.shape[0]
        pm_act = pm[:, :gamma]
        best = np.argmin(pm_act, axis=1)
        best_pm = pm_act[np.arange(frames), best]
        # equal-metric paths: take the lexicographically smallest bit sequence,
        # which is independent of how survivors were arranged into slots
        tie_rows = np.nonzero((pm_act == best_pm[:, None]).sum(axis=1) > 1)[0]
        for f in tie_rows:
            contenders = np.nonzero(pm_act[f] == best_pm[f])[0]
            keys = [bits[f, c].tobytes() for c in contenders]
            best[f] = contenders[keys.index(min(keys))]
        info = bits[np.arange(frames), best][:, self.code.info_indices]
        return info.astype(np.uint8), best_pm

    def decode(self, llrs, collect_audit: bool = False):
        """Decode one frame; returns (info_bits, metric, audit or None)."""
        llrs = np.asarray(llrs, dtype=np.float64)
        res = self.decode_batch(llrs[None, :], collect_audit=collect_audit)
        audit = res.audit if collect_audit else None
        return res.info_bits[0], float(res.metrics[0]), audit

    def path_states(self, trace_entry, frame: int = 0, up_to_bit: int | None = None):
        """Rebuild PathState snapshots from a ``capture_state`` trace entry."""
        out = []
        n_bits = (trace_entry["bit_index"] + 1) if up_to_bit is None else up_to_bit
        for slot in range(self.list_size):
            heap_row = trace_entry["llr_heap"][frame, slot]
            ps_row = trace_entry["ps_heap"][frame, slot]
            out.append(
                PathState(
                    slot=slot + 1,
                    metric=float(trace_entry["metrics"][frame, slot]),
                    decoded_bits=trace_entry["decoded_bits"][frame, slot, :n_bits].copy(),
                    partial_sums=[
                        ps_row[(1 << s) - 1 : (1 << (s + 1)) - 1].copy()
                        for s in range(self._m)
                    ],
                    llr_memory=[
                        heap_row[(1 << s) - 1 : (1 << (s + 1)) - 1].copy()
                        for s in range(self._m)
                    ],
                )
            )
        return out


def decode_scl(
    code: PolarCode,
    llrs,
    list_size: int,
    pruner="proposed",
    crossbar_spec: xbar.CrossbarSpec | None = None,
    exact_metric: bool = False,
):
    """One-shot list decode; returns (info_bits, final_metric, audit_record)."""
    dec = SclDecoder(
        code,
        list_size,
        pruner=pruner,
        crossbar_spec=crossbar_spec,
        exact_metric=exact_metric,
    )
    info, metric, audit = dec.decode(np.asarray(llrs, dtype=np.float64), collect_audit=True)
    return info, metric, audit
