"""Analytic hardware cost and latency relations for the list decoder.

LUT counts for conventional crossbars are shipped as measured constants in
``data/table2_crossbar_luts.csv`` (synthesis results, never recomputed);
the estimator derives the reduction obtained by index-ordered pruning from
the multiplexer input-count ratio alone.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

from .crossbar import mux_input_totals
from .polar import is_power_of_two
from .pruning import DesignSorter, make_design_sorter


def estimate_lut_gain(conv_crossbar_luts: int, L: int) -> int:
    """LUTs saved by shrinking every L-to-1 mux to (L/2+1)-to-1.

    The removed input fraction is 1 - (L/2+1)/L = (L-2)/(2L); the result is
    rounded half-up.  L=2 has no reduction, so L must be an even value >= 4.
    """
    if L < 4 or L % 2 != 0:
        raise ValueError(f"gain estimation needs even L >= 4, got {L}")
    if conv_crossbar_luts < 0:
        raise ValueError("LUT count must be non-negative")
    return (conv_crossbar_luts * (L - 2) + L) // (2 * L)


def gain_fraction(L: int) -> float:
    """Fraction of crossbar mux inputs removed: (L-2)/(2L)."""
    if L < 2 or L % 2 != 0:
        raise ValueError(f"even L >= 2 required, got {L}")
    return (L - 2) / (2 * L)


def sc_latency_cycles(N: int, P: int) -> int:
    """Semi-parallel successive-cancellation latency with P processing elements."""
    if not (is_power_of_two(N) and is_power_of_two(P)):
        raise ValueError("N and P must be powers of two")
    if P > N // 4:
        raise ValueError(f"P must not exceed N/4, got P={P}, N={N}")
    return 2 * N + (N // P) * ((N // (4 * P)).bit_length() - 1)


def latency_cycles(N: int, P: int) -> int:
    """Decoder latency: the semi-parallel schedule plus N cycles of path pruning."""
    return sc_latency_cycles(N, P) + N


@dataclass(frozen=True)
class WidthProfile:
    """Bit widths of the per-path memories a crossbar must copy."""

    decoded_bits_width: int
    partial_sum_parallel_width: int
    partial_sum_serial_width: int
    pointer_width: int
    metric_width: int
    index_width: int


def crossbar_widths(N: int, P: int, L: int, metric_width: int = 8, index_width: int | None = None) -> WidthProfile:
    """Memory widths for block length N, P processing elements, list size L.

    Decoded bits take N-bit registers; partial sums split into a P-bit
    parallel part and an N/2-bit serial part; LLR RAM pointers take
    (log2 N - 1) * log2 L bits per path.  Metric and index widths are
    quantization choices, defaulted here to 8 and log2(2L) bits.
    """
    if not (is_power_of_two(N) and is_power_of_two(P) and is_power_of_two(L)):
        raise ValueError("N, P and L must be powers of two")
    log2n = N.bit_length() - 1
    log2l = L.bit_length() - 1
    if index_width is None:
        index_width = log2l + 1  # candidate indexes run 1..2L
    return WidthProfile(
        decoded_bits_width=N,
        partial_sum_parallel_width=P,
        partial_sum_serial_width=N // 2,
        pointer_width=(log2n - 1) * log2l,
        metric_width=metric_width,
        index_width=index_width,
    )


def comparator_stats(net) -> tuple[int, int]:
    """(comparator count, stage depth) of a sorter model."""
    return net.comparator_count, net.depth


def load_table2(path=None) -> list[tuple[int, int, int]]:
    """Measured conventional-crossbar LUT counts as (L, N, luts) rows."""
    if path is None:
        text = resources.files("scllab").joinpath("data/table2_crossbar_luts.csv").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    rows = [(int(r["L"]), int(r["N"]), int(r["luts"])) for r in reader]
    if not rows:
        raise ValueError("empty crossbar LUT table")
    return rows


@dataclass
class CostReport:
    """Conventional-versus-reduced cost summary for one decoder configuration."""

    N: int
    P: int
    L: int
    widths: WidthProfile
    mux_inputs_conventional: int
    mux_inputs_reduced: int
    gain_fraction: float
    latency: int
    sc_latency: int
    sorter: DesignSorter | None
    lut_rows: list[tuple[int, int, int]]  # (block length, conventional LUTs, estimated gain)

    def rows(self) -> list[tuple[str, str, str, str]]:
        """(quantity, conventional, proposed, unit) rows for the CSV rendering."""
        w = self.widths
        out = [
            ("mux_inputs_per_slot", str(self.L), str(self.L // 2 + 1), "inputs"),
            (
                "mux_inputs_total",
                str(self.mux_inputs_conventional),
                str(self.mux_inputs_reduced),
                "inputs",
            ),
            ("gain_fraction", "0", f"{self.gain_fraction:.6g}", "ratio"),
            ("decoded_bits_crossbar", str(w.decoded_bits_width), str(w.decoded_bits_width), "bits"),
            (
                "partial_sum_crossbar",
                f"{w.partial_sum_parallel_width}+{w.partial_sum_serial_width}",
                f"{w.partial_sum_parallel_width}+{w.partial_sum_serial_width}",
                "bits",
            ),
            ("pointer_crossbar", str(w.pointer_width), str(w.pointer_width), "bits"),
            ("metric_width", str(w.metric_width), str(w.metric_width), "bits"),
            ("index_width", str(w.index_width), str(w.index_width), "bits"),
            ("latency", str(self.latency), str(self.latency), "cycles"),
            ("latency_sc_part", str(self.sc_latency), str(self.sc_latency), "cycles"),
            ("latency_pruning_part", str(self.N), str(self.N), "cycles"),
        ]
        for block_n, conv, gain in self.lut_rows:
            out.append(
                (f"crossbar_luts_n{block_n}", str(conv), str(conv - gain), "LUTs")
            )
        if self.sorter is not None:
            out.append(
                (
                    f"sorter_{self.sorter.name}_comparators",
                    "-",
                    str(self.sorter.comparator_count),
                    "comparators",
                )
            )
            out.append(
                (f"sorter_{self.sorter.name}_depth", "-", str(self.sorter.depth), "stages")
            )
        return out

    def to_csv(self) -> str:
        lines = ["quantity,conventional,proposed,unit"]
        lines += [",".join(row) for row in self.rows()]
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        header = f"cost model: N={self.N} P={self.P} L={self.L}"
        lines = [header, "-" * len(header)]
        lines.append(f"{'quantity':<32}{'conventional':>16}{'proposed':>16}  unit")
        for q, c, p, u in self.rows():
            lines.append(f"{q:<32}{c:>16}{p:>16}  {u}")
        lines.append(
            "note: LUT gains are the mux input-count ratio (L-2)/(2L) applied to "
            "measured conventional-crossbar LUTs, rounded half-up; sorter costs "
            "are comparator-network metadata, not synthesis results."
        )
        return "\n".join(lines)


def cost_report(
    N: int,
    P: int,
    L: int,
    metric_width: int = 8,
    index_width: int | None = None,
    design: int | None = None,
    table2_path=None,
) -> CostReport:
    """Assemble the cost/latency summary for one decoder configuration."""
    widths = crossbar_widths(N, P, L, metric_width=metric_width, index_width=index_width)
    sorter = make_design_sorter(design, L) if design is not None else None
    lut_rows = []
    if L >= 4:
        for row_l, row_n, luts in load_table2(table2_path):
            if row_l == L:
                lut_rows.append((row_n, luts, estimate_lut_gain(luts, L)))
    return CostReport(
        N=N,
        P=P,
        L=L,
        widths=widths,
        mux_inputs_conventional=mux_input_totals(L, reduced=False),
        mux_inputs_reduced=mux_input_totals(L, reduced=True) if L % 2 == 0 else mux_input_totals(L, False),
        gain_fraction=gain_fraction(L) if L % 2 == 0 else 0.0,
        latency=latency_cycles(N, P),
        sc_latency=sc_latency_cycles(N, P),
        sorter=sorter,
        lut_rows=lut_rows,
    )
