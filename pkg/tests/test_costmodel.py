import pytest

from scllab.costmodel import (
    comparator_stats,
    cost_report,
    crossbar_widths,
    estimate_lut_gain,
    gain_fraction,
    latency_cycles,
    load_table2,
    sc_latency_cycles,
)
from scllab.pruning import RadixSelector, build_bitonic

MEASURED_GAINS = {
    (4, 2048): 2535,
    (4, 4096): 4737,
    (4, 8192): 14778,
    (8, 2048): 18600,
    (8, 4096): 29675,
    (8, 8192): 107374,
    (16, 2048): 92125,
    (16, 4096): 186645,
    (16, 8192): 628805,
    (32, 2048): 399670,
    (32, 4096): 919793,
    (32, 8192): 3098781,
}


class TestLutGain:
    def test_all_twelve_cells_exact(self):
        rows = load_table2()
        assert len(rows) == 12
        for L, n, luts in rows:
            assert estimate_lut_gain(luts, L) == MEASURED_GAINS[(L, n)]

    @pytest.mark.parametrize(
        "luts,L,expected", [(10140, 4, 2535), (426616, 16, 186645), (1962224, 32, 919793)]
    )
    def test_named_cells(self, luts, L, expected):
        assert estimate_lut_gain(luts, L) == expected

    def test_half_values_round_up(self):
        # 426616 * 14/32 = 186644.5 and 1962224 * 30/64 = 919792.5
        assert estimate_lut_gain(426616, 16) == 186645
        assert estimate_lut_gain(1962224, 32) == 919793

    def test_fraction_strictly_increases(self):
        fracs = [gain_fraction(L) for L in (4, 8, 16, 32)]
        assert fracs == [0.25, 0.375, 0.4375, 0.46875]
        assert all(a < b for a, b in zip(fracs, fracs[1:]))

    def test_fraction_approaches_half(self):
        assert gain_fraction(1 << 20) == pytest.approx(0.5, abs=1e-5)

    @pytest.mark.parametrize("L", [2, 3, 5])
    def test_small_or_odd_l_rejected(self, L):
        with pytest.raises(ValueError):
            estimate_lut_gain(1000, L)


class TestLatency:
    def test_reference_point(self):
        assert latency_cycles(4096, 32) == 12928
        assert sc_latency_cycles(4096, 32) == 8832
        assert latency_cycles(4096, 32) == sc_latency_cycles(4096, 32) + 4096

    def test_derived_point(self):
        assert latency_cycles(1024, 64) == 2048 + 16 * 2 + 1024

    @pytest.mark.parametrize("n", [16, 64, 1024])
    def test_log_term_vanishes_at_quarter(self, n):
        assert latency_cycles(n, n // 4) == 3 * n

    def test_p_bound(self):
        with pytest.raises(ValueError):
            latency_cycles(1024, 512)
        with pytest.raises(ValueError):
            latency_cycles(1000, 32)


class TestWidths:
    def test_reference_profile(self):
        w = crossbar_widths(4096, 32, 8)
        assert w.decoded_bits_width == 4096
        assert w.partial_sum_parallel_width == 32
        assert w.partial_sum_serial_width == 2048
        assert w.pointer_width == 11 * 3

    def test_pointer_formula(self):
        assert crossbar_widths(1024, 64, 4).pointer_width == 9 * 2

    def test_degenerate_pointer(self):
        assert crossbar_widths(2, 1, 2).pointer_width == 0

    def test_index_width_default(self):
        assert crossbar_widths(1024, 64, 8).index_width == 4  # indexes 1..16


class TestStatsAndReport:
    def test_comparator_stats(self):
        assert comparator_stats(build_bitonic(8)) == (24, 6)
        assert comparator_stats(RadixSelector(16, keep=8)) == (120, 5)

    def test_report_rows_and_text(self):
        rep = cost_report(4096, 32, 8, design=3)
        text = rep.to_text()
        assert "12928" in text
        assert rep.mux_inputs_conventional == 64
        assert rep.mux_inputs_reduced == 40
        rows = {r[0]: r for r in rep.rows()}
        assert rows["mux_inputs_total"][1:3] == ("64", "40")
        assert rows["crossbar_luts_n4096"][1:3] == ("79133", str(79133 - 29675))
        assert rows["sorter_design3_comparators"][2] == str(120 + 28)

    def test_report_csv_header(self):
        rep = cost_report(1024, 32, 4)
        lines = rep.to_csv().splitlines()
        assert lines[0] == "quantity,conventional,proposed,unit"
        assert all(line.count(",") == 3 for line in lines[1:])

    def test_table_override(self, tmp_path):
        path = tmp_path / "t2.csv"
        path.write_text("L,N,luts\n4,1024,1000\n")
        rep = cost_report(1024, 32, 4, table2_path=path)
        assert rep.lut_rows == [(1024, 1000, 250)]
