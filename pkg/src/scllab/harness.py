"""Monte Carlo simulation engine, equivalence auditor, and result emission.

Frames are processed in fixed-size batches in frame-index order; all
randomness is keyed per frame, and early stopping is decided only at batch
boundaries.  Results are therefore identical whether batches run inline or
on a worker pool (``SCLLAB_THREADS`` sets the pool size; unset means serial).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import plotting
from .channel import DATA_STREAM, ChannelConfig, frame_rng, transmit_batch
from .crossbar import verify_proposition
from .decoder import SclDecoder
from .polar import construct, encode_batch, is_power_of_two
from .pruning import _PRUNER_NAMES

BATCH_FRAMES = 512

CSV_HEADER = "snr_db,frames,frame_errors,bit_errors,fer,ber,ci_lo,ci_hi"


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: code, decoder, SNR sweep and stopping rules."""

    n: int
    k: int
    list_size: int
    pruner: str = "proposed"
    snr_points_db: tuple[float, ...] = (1.0, 1.5, 2.0, 2.5, 3.0)
    max_frames: int = 10_000
    min_frame_errors: int = 100
    seed: int = 1
    z0: float = 0.5
    exact_metric: bool = False
    output_path: str = "fer_results.csv"

    def validate(self) -> None:
        if self.max_frames < 1:
            raise ValueError(f"max_frames must be >= 1, got {self.max_frames}")
        if not self.snr_points_db:
            raise ValueError("snr_points_db must not be empty")
        if self.list_size < 1 or self.list_size & (self.list_size - 1):
            raise ValueError(f"list_size must be a power of two, got {self.list_size}")
        if self.pruner not in _PRUNER_NAMES:
            raise ValueError(f"unknown pruner {self.pruner!r}; choose from {_PRUNER_NAMES}")
        if self.min_frame_errors < 1:
            raise ValueError(f"min_frame_errors must be >= 1, got {self.min_frame_errors}")
        if not is_power_of_two(self.n) or not 1 <= self.k <= self.n:
            raise ValueError(f"invalid code dimensions n={self.n}, k={self.k}")
        if not 0.0 < self.z0 < 1.0:
            raise ValueError(f"z0 must lie in (0, 1), got {self.z0}")


_BOOL_WORDS = {"true": True, "false": False, "yes": True, "no": False, "1": True, "0": False}


def parse_config(text: str) -> SimConfig:
    """Parse ``key = value`` lines; '#' starts a comment, lists are comma-separated."""
    values: dict[str, object] = {}
    known = {f.name: f.type for f in fields(SimConfig)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key == "snr_points_db":
            values[key] = tuple(float(tok) for tok in val.split(",") if tok.strip())
        elif key == "exact_metric":
            if val.lower() not in _BOOL_WORDS:
                raise ValueError(f"line {lineno}: expected a boolean, got {val!r}")
            values[key] = _BOOL_WORDS[val.lower()]
        elif key in ("pruner", "output_path"):
            values[key] = val
        elif key == "z0":
            values[key] = float(val)
        else:
            values[key] = int(val)
    for required in ("n", "k", "list_size"):
        if required not in values:
            raise ValueError(f"missing required config key {required!r}")
    cfg = SimConfig(**values)  # type: ignore[arg-type]
    cfg.validate()
    return cfg


def load_config(path) -> SimConfig:
    return parse_config(Path(path).read_text())


@dataclass(frozen=True)
class PointResult:
    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    points: tuple[PointResult, ...]


def wilson_interval(errors: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# ---------------------------------------------------------------------------
# batch tasks (module-level so worker processes can import them)

_WORKER_CACHE: dict = {}


def _get_setup(key):
    if key not in _WORKER_CACHE:
        n, k, z0, list_size, pruner, exact = key
        code = construct(n, k, z0)
        if pruner == "both":
            decoders = (
                SclDecoder(code, list_size, pruner="conventional", exact_metric=exact),
                SclDecoder(code, list_size, pruner="proposed", exact_metric=exact),
            )
        else:
            decoders = (SclDecoder(code, list_size, pruner=pruner, exact_metric=exact),)
        _WORKER_CACHE[key] = (code, decoders)
    return _WORKER_CACHE[key]


def _frame_data(seed: int, frame_indices: np.ndarray, k: int) -> np.ndarray:
    rows = [
        frame_rng(seed, int(fi), DATA_STREAM).integers(0, 2, size=k, dtype=np.uint8)
        for fi in frame_indices
    ]
    return np.stack(rows)


def _sim_batch(args):
    """Decode frames [lo, hi) of one SNR point and count errors.

    args = (setup_key, seed, snr_db, lo, hi).  With setup_key pruner="both",
    every frame is decoded by the conventional and the index-ordered pruner
    on identical LLRs and mismatching outputs are counted as well.
    """
    key, seed, snr_db, lo, hi = args
    n, k, z0, list_size, pruner, exact = key
    code, decoders = _get_setup(key)
    frame_indices = np.arange(lo, hi)
    info = _frame_data(seed, frame_indices, k)
    codewords = encode_batch(code, info)
    cfg = ChannelConfig(ebn0_db=snr_db, rate=k / n, seed=seed)
    llrs = transmit_batch(codewords, cfg, frame_indices)
    outs = [dec.decode_batch(llrs).info_bits for dec in decoders]
    frame_err = [(out != info).any(axis=1) for out in outs]
    bit_err = [int((out != info).sum()) for out in outs]
    counters = {
        "frames": int(hi - lo),
        "frame_errors": [int(fe.sum()) for fe in frame_err],
        "bit_errors": bit_err,
    }
    if len(outs) == 2:
        counters["mismatched"] = int((outs[0] != outs[1]).any(axis=1).sum())
    return counters


def _resolve_workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("SCLLAB_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _batched_point_run(key, seed, snr_db, max_frames, stop_errors, workers, decoder_idx=0):
    """Run batches in frame order, accumulating counters; stop only at batch
    boundaries once ``stop_errors`` frame errors have been seen."""
    spans = [
        (lo, min(lo + BATCH_FRAMES, max_frames)) for lo in range(0, max_frames, BATCH_FRAMES)
    ]
    tasks = [(key, seed, snr_db, lo, hi) for lo, hi in spans]
    totals = {"frames": 0, "frame_errors": 0, "bit_errors": 0, "mismatched": 0}

    def fold(c):
        totals["frames"] += c["frames"]
        totals["frame_errors"] += c["frame_errors"][decoder_idx]
        totals["bit_errors"] += c["bit_errors"][decoder_idx]
        totals["mismatched"] += c.get("mismatched", 0)
        return stop_errors is not None and totals["frame_errors"] >= stop_errors

    if workers <= 1 or len(tasks) == 1:
        for t in tasks:
            if fold(_sim_batch(t)):
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pending = []
            it = iter(tasks)
            for t in it:
                pending.append(pool.submit(_sim_batch, t))
                if len(pending) >= workers + 1:
                    break
            stop = False
            while pending:
                done = pending.pop(0)
                if not stop:
                    stop = fold(done.result())
                else:
                    done.cancel()
                if not stop:
                    nxt = next(it, None)
                    if nxt is not None:
                        pending.append(pool.submit(_sim_batch, nxt))
    return totals


def run_fer(cfg: SimConfig, workers: int | None = None) -> SimResult:
    """Sweep the configured SNR points, decoding random frames until either
    ``max_frames`` or ``min_frame_errors`` is reached per point."""
    cfg.validate()
    w = _resolve_workers(workers)
    key = (cfg.n, cfg.k, cfg.z0, cfg.list_size, cfg.pruner, cfg.exact_metric)
    points = []
    for snr in cfg.snr_points_db:
        totals = _batched_point_run(
            key, cfg.seed, snr, cfg.max_frames, cfg.min_frame_errors, w
        )
        frames = totals["frames"]
        fe, be = totals["frame_errors"], totals["bit_errors"]
        lo, hi = wilson_interval(fe, frames)
        points.append(
            PointResult(
                snr_db=snr,
                frames=frames,
                frame_errors=fe,
                bit_errors=be,
                fer=fe / frames,
                ber=be / (frames * cfg.k),
                ci_lo=lo,
                ci_hi=hi,
            )
        )
    return SimResult(config=cfg, points=tuple(points))


@dataclass(frozen=True)
class EquivalencePoint:
    snr_db: float
    frames: int
    mismatched_frames: int
    frame_errors_conventional: int
    frame_errors_proposed: int

    @property
    def fer_conventional(self) -> float:
        return self.frame_errors_conventional / self.frames

    @property
    def fer_proposed(self) -> float:
        return self.frame_errors_proposed / self.frames


@dataclass(frozen=True)
class EquivalenceReport:
    config: SimConfig
    points: tuple[EquivalencePoint, ...]

    @property
    def total_mismatched(self) -> int:
        return sum(p.mismatched_frames for p in self.points)

    @property
    def ok(self) -> bool:
        return self.total_mismatched == 0

    def to_text(self) -> str:
        lines = [
            f"equivalence audit: n={self.config.n} k={self.config.k} "
            f"L={self.config.list_size} seed={self.config.seed}"
        ]
        for p in self.points:
            lines.append(
                f"  {p.snr_db:g} dB: frames={p.frames} mismatched={p.mismatched_frames} "
                f"fer_conventional={p.fer_conventional:.6g} fer_proposed={p.fer_proposed:.6g}"
            )
        lines.append(
            "result: "
            + ("decoders agree frame-for-frame" if self.ok else "DECODERS DIVERGED")
        )
        return "\n".join(lines)


def run_equivalence(cfg: SimConfig, workers: int | None = None) -> EquivalenceReport:
    """Decode every frame twice (conventional and index-ordered pruning) on
    identical LLRs and count frames whose decoded outputs differ."""
    cfg.validate()
    w = _resolve_workers(workers)
    key = (cfg.n, cfg.k, cfg.z0, cfg.list_size, "both", cfg.exact_metric)
    points = []
    for snr in cfg.snr_points_db:
        spans = [
            (lo, min(lo + BATCH_FRAMES, cfg.max_frames))
            for lo in range(0, cfg.max_frames, BATCH_FRAMES)
        ]
        tasks = [(key, cfg.seed, snr, lo, hi) for lo, hi in spans]
        frames = mism = fe_conv = fe_prop = 0
        if w <= 1 or len(tasks) == 1:
            results = map(_sim_batch, tasks)
            for c in results:
                frames += c["frames"]
                mism += c["mismatched"]
                fe_conv += c["frame_errors"][0]
                fe_prop += c["frame_errors"][1]
        else:
            with ProcessPoolExecutor(max_workers=w) as pool:
                for c in pool.map(_sim_batch, tasks):
                    frames += c["frames"]
                    mism += c["mismatched"]
                    fe_conv += c["frame_errors"][0]
                    fe_prop += c["frame_errors"][1]
        points.append(
            EquivalencePoint(
                snr_db=snr,
                frames=frames,
                mismatched_frames=mism,
                frame_errors_conventional=fe_conv,
                frame_errors_proposed=fe_prop,
            )
        )
    return EquivalenceReport(config=cfg, points=tuple(points))


def run_proposition_audit(l_values, exhaustive_limit: int = 20_000_000, samples: int = 10_000_000):
    """Brute-force the allowed-source bound for each list size.

    Subset counts above ``exhaustive_limit`` fall back to random sampling,
    which the report states explicitly.  Returns (report text, all passed).
    """
    sections = []
    all_ok = True
    for L in l_values:
        if math.comb(2 * L, L) <= exhaustive_limit:
            rep = verify_proposition(L)
        else:
            rep = verify_proposition(L, samples=samples)
        sections.append(rep.to_text())
        all_ok &= rep.passed
    text = "\n".join(sections)
    verdict = "all list sizes pass" if all_ok else "FAILURES found"
    return f"{text}\n{verdict}\n", all_ok


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def emit_csv(result: SimResult, path) -> None:
    """Write per-point results with the fixed eight-column header."""
    lines = [CSV_HEADER]
    for p in result.points:
        lines.append(
            ",".join(
                [
                    _fmt(p.snr_db),
                    str(p.frames),
                    str(p.frame_errors),
                    str(p.bit_errors),
                    _fmt(p.fer),
                    _fmt(p.ber),
                    _fmt(p.ci_lo),
                    _fmt(p.ci_hi),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def emit_plot_data(result: SimResult, path, svg_path=None) -> None:
    """Write two-column "snr_db fer" text; optionally render the SVG chart."""
    lines = [f"{_fmt(p.snr_db)} {_fmt(p.fer)}" for p in result.points]
    Path(path).write_text("\n".join(lines) + "\n")
    if svg_path is not None:
        cfg = result.config
        plotting.render_fer_curve(
            result.points,
            svg_path,
            title=f"n={cfg.n} k={cfg.k} L={cfg.list_size} ({cfg.pruner})",
        )
