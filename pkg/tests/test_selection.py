import pytest

from attnsyntax import (
    CountingPolicy,
    HeadMask,
    extract_tree,
    greedy_ablation,
    greedy_addition,
    layer_distribution,
    score,
)


class TestGreedyAddition:
    def test_planted_head_selected_first(self, two_head_fixture):
        dump, gold = two_head_fixture
        trace = greedy_addition([dump], [gold])
        assert trace.steps[0].head == (1, 1)
        assert trace.steps[0].score == 1.0
        assert trace.best_mask.heads == frozenset({(1, 1)})
        assert trace.best_score == 1.0
        assert len(trace.steps) == 2  # layers * heads

    def test_initial_point_is_left_chain_parse(self, two_head_fixture):
        dump, gold = two_head_fixture
        trace = greedy_addition([dump], [gold])
        assert trace.initial_mask_size == 0
        # left chain vs the flat reference: (1,3),(1,4),(1,5) countable,
        # (1,3) crosses (3,4) -> 3/4
        assert trace.initial_score == 0.75

    def test_final_step_equals_all_heads_eval(self, two_head_fixture):
        dump, gold = two_head_fixture
        trace = greedy_addition([dump], [gold])
        mask = HeadMask.all_heads(dump.layers, dump.heads)
        tree = extract_tree(dump, mask)
        assert trace.steps[-1].score == score(tree, gold).precision
        assert trace.steps[-1].mask_size == len(mask)

    def test_best_score_bounds_all_steps(self, two_head_fixture):
        dump, gold = two_head_fixture
        trace = greedy_addition([dump], [gold])
        assert all(trace.best_score >= s.score for s in trace.steps)

    def test_single_head_universe(self, identity_dump):
        from oracles import gold_from_span_tree
        from attnsyntax import lbal_tree

        gold = gold_from_span_tree(lbal_tree(3), tokens=identity_dump.subwords)
        trace = greedy_addition([identity_dump], [gold])
        assert len(trace.steps) == 1
        assert trace.steps[0].head == (1, 1)

    def test_deterministic_traces(self, two_head_fixture):
        dump, gold = two_head_fixture
        first = greedy_addition([dump], [gold]).to_text()
        second = greedy_addition([dump], [gold]).to_text()
        assert first == second

    def test_f1_objective(self, two_head_fixture):
        dump, gold = two_head_fixture
        trace = greedy_addition([dump], [gold], objective="f1")
        assert trace.objective == "f1"
        assert trace.best_score == 1.0

    def test_rejects_unknown_objective(self, two_head_fixture):
        dump, gold = two_head_fixture
        with pytest.raises(ValueError, match="objective"):
            greedy_addition([dump], [gold], objective="recall")

    def test_evaluation_count(self, two_head_fixture):
        dump, gold = two_head_fixture
        trace = greedy_addition([dump], [gold])
        total = dump.layers * dump.heads
        assert trace.evaluations == 1 + total * (total + 1) // 2


class TestGreedyAblation:
    def test_nonplanted_head_removed_first(self, two_head_fixture):
        dump, gold = two_head_fixture
        trace = greedy_ablation([dump], [gold])
        assert trace.steps[0].head == (1, 2)
        assert len(trace.steps) == 1  # layers * heads - 1
        assert trace.best_mask.heads == frozenset({(1, 1)})

    def test_initial_is_full_mask(self, two_head_fixture):
        dump, gold = two_head_fixture
        trace = greedy_ablation([dump], [gold])
        assert trace.initial_mask_size == 2
        assert trace.initial_score == 1.0

    def test_single_head_universe_has_no_steps(self, identity_dump):
        from oracles import gold_from_span_tree
        from attnsyntax import lbal_tree

        gold = gold_from_span_tree(lbal_tree(3), tokens=identity_dump.subwords)
        trace = greedy_ablation([identity_dump], [gold])
        assert trace.steps == ()
        assert trace.best_mask.heads == frozenset({(1, 1)})  # falls back to full

    def test_deterministic_traces(self, two_head_fixture):
        dump, gold = two_head_fixture
        assert greedy_ablation([dump], [gold]).to_text() == greedy_ablation([dump], [gold]).to_text()


class TestTraceMechanics:
    def test_mask_at_reconstruction(self, two_head_fixture):
        dump, gold = two_head_fixture
        trace = greedy_addition([dump], [gold])
        assert trace.mask_at(0).heads == frozenset()
        assert trace.mask_at(1).heads == {trace.steps[0].head}
        assert trace.mask_at(2).heads == {(1, 1), (1, 2)}
        with pytest.raises(ValueError):
            trace.mask_at(3)

    def test_mismatched_inputs_rejected(self, two_head_fixture):
        dump, gold = two_head_fixture
        with pytest.raises(ValueError, match="reference trees"):
            greedy_addition([dump], [gold, gold])
        with pytest.raises(ValueError, match="empty"):
            greedy_addition([], [])

    def test_counting_policy_changes_values(self, two_head_fixture):
        dump, gold = two_head_fixture
        nontrivial = greedy_addition([dump], [gold])
        allspans = greedy_addition([dump], [gold], counting=CountingPolicy.ALL)
        assert allspans.initial_score > nontrivial.initial_score  # trivia inflate


class TestLayerDistribution:
    def test_counting_example(self):
        mask = HeadMask(frozenset({(1, 1), (1, 2), (6, 3)}), (6, 16))
        dist = layer_distribution(mask)
        assert dist[1] == pytest.approx(2 / 3)
        assert dist[6] == pytest.approx(1 / 3)
        assert all(dist[layer] == 0.0 for layer in (2, 3, 4, 5))
        assert abs(sum(dist.values()) - 1.0) <= 1e-12

    def test_full_mask_uniform(self):
        dist = layer_distribution(HeadMask.all_heads(6, 16))
        assert all(v == pytest.approx(1 / 6) for v in dist.values())
        assert abs(sum(dist.values()) - 1.0) <= 1e-12

    def test_empty_mask_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            layer_distribution(HeadMask(frozenset(), (2, 2)))


class TestHeadMask:
    def test_from_spec_all(self):
        mask = HeadMask.from_spec("all", 2, 3)
        assert len(mask) == 6

    def test_from_spec_list(self):
        mask = HeadMask.from_spec("1:1, 2:3", 2, 3)
        assert mask.heads == {(1, 1), (2, 3)}
        assert mask.to_spec() == "1:1,2:3"

    def test_round_trip_full(self):
        assert HeadMask.all_heads(2, 3).to_spec() == "all"

    def test_out_of_universe(self):
        with pytest.raises(ValueError, match="universe"):
            HeadMask.from_spec("3:1", 2, 3)

    def test_bad_item(self):
        with pytest.raises(ValueError, match="layer:head"):
            HeadMask.from_spec("11", 2, 3)
