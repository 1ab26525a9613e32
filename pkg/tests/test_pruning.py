import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scllab.crossbar import parent_of
from scllab.decoder import Candidate
from scllab.pruning import (
    CompareExchangeNetwork,
    ConventionalPruner,
    ProposedPruner,
    RadixSelector,
    apply_network,
    build_bitonic,
    build_mvf,
    get_pruner,
    make_design_sorter,
    parse_network,
    prune_conventional,
    prune_proposed,
    radix_select,
    verify_zero_one,
)


def candidates_from_metrics(metrics):
    """Full candidate set for metrics addressed by candidate index - 1."""
    out = []
    for idx0, m in enumerate(metrics):
        index = idx0 + 1
        out.append(
            Candidate(parent=parent_of(index), bit=(index - 1) % 2, index=index, metric=float(m))
        )
    return out


class TestPrunerBasics:
    def test_conventional_example(self):
        sel = prune_conventional(candidates_from_metrics([0.5, 1.2, 0.3, 0.9]))
        assert sel.indexes == (3, 1)
        assert sel.metrics == (0.3, 0.5)
        assert not sel.sorted_by_index

    def test_conventional_all_equal_tie(self):
        sel = prune_conventional(candidates_from_metrics([1.0] * 8))
        assert sel.indexes == (1, 2, 3, 4)

    def test_conventional_ascending_metrics(self):
        sel = prune_conventional(candidates_from_metrics([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]))
        assert sel.indexes == (1, 2, 3, 4)

    def test_proposed_example(self):
        sel = prune_proposed(candidates_from_metrics([0.5, 1.2, 0.3, 0.9]))
        assert sel.indexes == (1, 3)
        assert sel.sorted_by_index and sel.satisfies_index_bounds()

    def test_proposed_specific_survivor_set(self):
        metrics = [9, 0.1, 0.2, 9, 0.3, 9, 9, 0.4]
        sel = prune_proposed(candidates_from_metrics(metrics))
        assert sel.indexes == (2, 3, 5, 8)
        assert sel.satisfies_index_bounds()

    def test_proposed_all_equal_tie(self):
        sel = prune_proposed(candidates_from_metrics([2.0] * 4))
        assert sel.indexes == (1, 2)

    def test_same_survivor_set_both_pruners(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            metrics = rng.integers(0, 4, 16).astype(float)  # heavy ties
            conv = prune_conventional(candidates_from_metrics(metrics))
            prop = prune_proposed(candidates_from_metrics(metrics))
            assert set(conv.indexes) == set(prop.indexes)

    def test_malformed_candidate_sets(self):
        cands = candidates_from_metrics([0.1, 0.2, 0.3, 0.4])
        with pytest.raises(ValueError):
            prune_conventional(cands[:3])  # odd count
        dup = cands[:3] + [cands[2]]
        with pytest.raises(ValueError):
            prune_conventional(dup)  # duplicate index
        bad = cands[:3] + [Candidate(parent=1, bit=1, index=4, metric=0.4)]
        with pytest.raises(ValueError):
            prune_conventional(bad)  # wrong parent for index 4

    @given(st.lists(st.integers(0, 7), min_size=8, max_size=8))
    def test_index_bounds_hold_for_any_metrics(self, metrics):
        sel = prune_proposed(candidates_from_metrics([float(m) for m in metrics]))
        L = 4
        assert all(a < b for a, b in zip(sel.indexes, sel.indexes[1:]))
        assert all(k <= i <= L + k for k, i in enumerate(sel.indexes, start=1))


class TestBitonic:
    @pytest.mark.parametrize("width,comparators,depth", [(2, 1, 1), (4, 6, 3), (8, 24, 6)])
    def test_counts(self, width, comparators, depth):
        net = build_bitonic(width)
        assert net.comparator_count == comparators
        assert net.depth == depth

    @pytest.mark.parametrize("width", [2, 4, 8, 16])
    def test_count_formula(self, width):
        s = width.bit_length() - 1
        net = build_bitonic(width)
        assert net.comparator_count == (width // 2) * s * (s + 1) // 2
        assert net.depth == s * (s + 1) // 2

    @pytest.mark.parametrize("width", [2, 4, 8, 16])
    def test_zero_one_exhaustive(self, width):
        assert verify_zero_one(build_bitonic(width))

    def test_sorts_random_reals(self):
        net = build_bitonic(16)
        rng = np.random.default_rng(1)
        keys = rng.standard_normal((500, 16))
        out = apply_network(net, keys)
        assert np.array_equal(out, np.sort(keys, axis=1))

    def test_broken_network_fails_zero_one(self):
        net = build_bitonic(4)
        broken = CompareExchangeNetwork(width=4, stages=net.stages[:-1])
        assert not verify_zero_one(broken)

    @pytest.mark.parametrize("width", [0, 1, 3, 6])
    def test_invalid_width(self, width):
        with pytest.raises(ValueError):
            build_bitonic(width)


class TestSelector:
    def test_width4_counts(self):
        net = build_mvf(4)
        assert net.comparator_count == 4
        assert net.depth == 2

    def test_width16_counts(self):
        net = build_mvf(16)
        assert net.comparator_count == 56
        assert net.depth == 7

    def test_all_permutations_width4(self):
        from itertools import permutations

        net = build_mvf(4)
        for perm in permutations([0, 1, 2, 3]):
            out = apply_network(net, np.array(perm, dtype=float))
            assert set(out[:2]) == {0, 1}

    @pytest.mark.parametrize("width", [2, 4, 8, 16])
    def test_selector_zero_one_exhaustive(self, width):
        assert verify_zero_one(build_mvf(width), selector=True)

    def test_pure_sorter_fails_selector_semantics_inverse(self):
        # a selector is not a sorter: the exhaustive sort check must fail
        assert not verify_zero_one(build_mvf(8))

    @pytest.mark.parametrize("width", [32, 64])
    def test_matches_smallest_half_oracle(self, width):
        net = build_mvf(width)
        rng = np.random.default_rng(2)
        keys = rng.standard_normal((20_000, width))
        out = apply_network(net, keys)
        low = np.sort(out[:, : width // 2], axis=1)
        assert np.array_equal(low, np.sort(keys, axis=1)[:, : width // 2])

    @pytest.mark.parametrize("width", [6, 12, 0])
    def test_invalid_width(self, width):
        with pytest.raises(ValueError):
            build_mvf(width)


class TestApplyNetworkAndDump:
    def test_payload_travels(self):
        net = build_bitonic(4)
        keys = np.array([3.0, 1.0, 2.0, 0.0])
        out_keys, out_payload = apply_network(net, keys, payload=np.array([30, 10, 20, 0]))
        assert np.array_equal(out_keys, [0.0, 1.0, 2.0, 3.0])
        assert np.array_equal(out_payload, [0, 10, 20, 30])

    def test_descending_comparator(self):
        net = CompareExchangeNetwork(width=2, stages=(((0, 1, False),),))
        assert np.array_equal(apply_network(net, np.array([1.0, 5.0])), [5.0, 1.0])

    def test_dump_and_parse_round_trip(self):
        net = build_mvf(8)
        text = net.dump()
        assert text.splitlines()[0].count(" ") == len(net.stages[0]) - 1
        assert all(("<" in tok) or (">" in tok) for tok in text.split())
        back = parse_network(text, 8)
        assert back == net

    def test_stage_lane_reuse_rejected(self):
        with pytest.raises(ValueError):
            CompareExchangeNetwork(width=3, stages=(((0, 1, True), (1, 2, True)),))


class TestRadix:
    def test_distinct_keys_match_sorting(self):
        keys = [0.4, 0.1, 0.9, 0.2]
        assert radix_select(keys, 4) == [1, 3, 0, 2]

    def test_duplicate_keys_tie_by_position(self):
        assert radix_select([1.0, 1.0, 0.5, 1.0], 2) == [2, 0]

    def test_random_matches_sort_prefix(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            keys = rng.standard_normal(16)
            assert radix_select(list(keys), 4) == list(np.argsort(keys, kind="stable")[:4])

    def test_cost_metadata(self):
        sel = RadixSelector(8, keep=4)
        assert sel.comparator_count == 28
        assert sel.depth == 1 + 3

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            radix_select([1.0, 2.0], 3)


class TestDesignSorters:
    @pytest.mark.parametrize("design", [1, 2, 3])
    @pytest.mark.parametrize("list_size", [2, 4, 8])
    def test_matches_index_ordered_pruning(self, design, list_size):
        sorter = make_design_sorter(design, list_size)
        proposed = ProposedPruner()
        rng = np.random.default_rng(4)
        smooth = rng.standard_normal((400, 2 * list_size))
        ties = rng.integers(0, 3, (400, 2 * list_size)).astype(float)
        for metrics in (smooth, ties):
            assert np.array_equal(sorter.select_batch(metrics), proposed.select_batch(metrics))

    def test_candidate_api_contract(self):
        rng = np.random.default_rng(5)
        for design in (1, 2, 3):
            sorter = make_design_sorter(design, 4)
            metrics = rng.standard_normal(8)
            cands = candidates_from_metrics(metrics)
            assert sorter.select(cands) == prune_proposed(cands)

    def test_design1_l8_stage_costs(self):
        sorter = make_design_sorter(1, 8)
        assert sorter.metric_sorter.comparator_count == 56
        assert sorter.index_sorter.comparator_count == 24

    def test_design3_l4_metric_comparisons(self):
        sorter = make_design_sorter(3, 4)
        assert sorter.metric_sorter.comparator_count == 28

    def test_unknown_design(self):
        with pytest.raises(ValueError):
            make_design_sorter(4, 8)

    @pytest.mark.parametrize("list_size", [8, 16])
    def test_qualitative_cost_ordering(self, list_size):
        d1, d2, d3 = (make_design_sorter(d, list_size) for d in (1, 2, 3))
        assert d1.comparator_count <= d2.comparator_count <= d3.comparator_count
        assert d3.depth < d1.depth

    def test_five_strategies_same_survivor_set(self):
        rng = np.random.default_rng(6)
        for list_size in (2, 4, 8):
            strategies = [
                ConventionalPruner(),
                ProposedPruner(),
                make_design_sorter(1, list_size),
                make_design_sorter(2, list_size),
                make_design_sorter(3, list_size),
            ]
            metrics = np.concatenate(
                [
                    rng.standard_normal((300, 2 * list_size)),
                    rng.integers(0, 2, (300, 2 * list_size)).astype(float),
                ]
            )
            sets = [np.sort(s.select_batch(metrics), axis=1) for s in strategies]
            for got in sets[1:]:
                assert np.array_equal(got, sets[0])

    def test_get_pruner_names(self):
        assert get_pruner("conventional", 4).name == "conventional"
        assert get_pruner("design2", 4).name == "design2"
        with pytest.raises(ValueError):
            get_pruner("fastest", 4)
