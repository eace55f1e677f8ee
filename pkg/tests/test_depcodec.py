import random

import pytest
from hypothesis import given, settings

from strategies import (
    all_valid_head_vectors,
    dep_trees,
    enumerate_projective_trees,
    oracle_is_projective,
    oracle_is_two_colorable,
    oracle_is_valid_tree,
    random_dep_tree,
    random_projective_heads,
    random_tree_heads,
)
from synprobe import depcodec as dc
from synprobe.depcodec import DepLabel
from synprobe.treebank import DepTree

PAINTING = DepTree.from_heads(
    [2, 3, 4, 0, 3],
    ["det", "nsubj", "cop", "root", "punct"],
    ["This", "painting", "is", "great", "."],
)


def same_structure(a: DepTree, b: DepTree) -> bool:
    return a.heads == b.heads and a.deprels == b.deprels


def replay_arc_hybrid(transitions: list[str], n: int) -> list[int]:
    """Independent replay oracle: arcs implied by a legal transition list."""
    heads = [0] * n
    stack: list[int] = []
    buffer_pos = 1
    for t in transitions:
        if t == "SH":
            stack.append(buffer_pos)
            buffer_pos += 1
        elif t == "LA":
            heads[stack.pop() - 1] = buffer_pos
        elif t == "RA":
            dep = stack.pop()
            heads[dep - 1] = stack[-1]
    assert stack == [next(i for i, h in enumerate(heads, 1) if h == 0)]
    return heads


class TestRelHead:
    def test_painting_offsets(self):
        offsets = [l.arc_part for l in dc.encode_rel_head(PAINTING)]
        assert offsets == ["+1", "+1", "+1", "-4", "-2"]

    def test_painting_round_trip(self):
        labels = dc.encode_rel_head(PAINTING)
        back = dc.decode_rel_head(labels, forms=PAINTING.forms, upos=PAINTING.upos)
        assert back == PAINTING

    def test_degenerate_offsets_all_before_start(self):
        labels = [DepLabel(str(-i), "dep") for i in range(1, 6)]
        tree = dc.decode_rel_head(labels)
        tree.validate()
        assert tree.heads.count(0) == 1
        root = tree.heads.index(0) + 1
        assert all(h == root for i, h in enumerate(tree.heads, 1) if i != root)

    @given(dep_trees())
    def test_round_trip_every_tree(self, tree):
        back = dc.decode_rel_head(dc.encode_rel_head(tree))
        assert back.heads == tree.heads and back.deprels == tree.deprels

    def test_fuzz_random_offsets_always_valid(self):
        rng = random.Random(11)
        for _ in range(1000):
            n = rng.randint(1, 12)
            labels = [
                DepLabel(dc._format_offset(rng.choice([o for o in range(-14, 15) if o])), "dep")
                for _ in range(n)
            ]
            tree = dc.decode_rel_head(labels)
            assert oracle_is_valid_tree(tree.heads)

    def test_zero_offset_rejected(self):
        with pytest.raises(dc.LabelFormatError):
            dc.decode_rel_head([DepLabel("0", "dep")])


class TestAssignPlanes:
    def test_projective_tree_all_plane_one(self):
        tree = DepTree.from_heads([2, 0, 2])
        assignment = dc.assign_planes(tree)
        assert not assignment.dropped
        assert set(assignment.plane.values()) == {1}

    def test_painting_crossing_arcs_split_planes(self):
        assignment = dc.assign_planes(PAINTING)
        assert assignment.plane[(0, 4)] == 1
        assert assignment.plane[(3, 5)] == 2
        assert not assignment.dropped

    def test_odd_crossing_cycle_drops_exactly_one(self):
        # Arcs (1,4), (3,6), (5,2) cross pairwise; the completion adds no
        # further crossings, so exactly one arc of the triangle must go.
        heads = [0, 5, 4, 1, 4, 3]
        assert not oracle_is_two_colorable(heads)
        tree = DepTree.from_heads(heads)
        assignment = dc.assign_planes(tree)
        assert len(assignment.dropped) == 1
        assert assignment.dropped < {(1, 4), (3, 6), (5, 2)}

    @given(dep_trees())
    def test_planes_never_contain_crossings(self, tree):
        assignment = dc.assign_planes(tree)
        for plane_id in (1, 2):
            arcs = [a for a, p in assignment.plane.items() if p == plane_id]
            for i, a in enumerate(arcs):
                for b in arcs[i + 1 :]:
                    assert not dc.arcs_cross(a, b)

    @given(dep_trees())
    def test_dropped_empty_iff_two_colorable(self, tree):
        assignment = dc.assign_planes(tree)
        assert (not assignment.dropped) == oracle_is_two_colorable(tree.heads)


class TestTwoPlanar:
    def test_painting_labels(self):
        arc_parts = [l.arc_part for l in dc.encode_2planar(PAINTING)]
        assert arc_parts[0] == ""
        assert arc_parts[1] == "<\\"
        assert "<" in arc_parts[1] and "\\" in arc_parts[1]
        assert arc_parts[3] == "<\\/*"
        assert arc_parts[4] == ">*"

    def test_single_token_sentence_empty_planes(self):
        tree = DepTree.from_heads([0], ["root"], ["hi"])
        (label,) = dc.encode_2planar(tree)
        assert label.arc_part == ""

    def test_painting_round_trip(self):
        labels = dc.encode_2planar(PAINTING)
        assert same_structure(dc.decode_2planar(labels), PAINTING)

    def test_all_empty_labels_decode_to_left_chain(self):
        labels = [DepLabel("", "dep")] * 4
        tree = dc.decode_2planar(labels)
        assert tree.heads == [0, 1, 1, 1]

    def test_exhaustive_small_trees(self):
        for n in range(1, 6):
            for heads in all_valid_head_vectors(n):
                tree = DepTree.from_heads(heads)
                labels = dc.encode_2planar(tree)
                back = dc.decode_2planar(labels)
                if oracle_is_two_colorable(heads):
                    assert back.heads == heads, heads
                else:
                    assert oracle_is_valid_tree(back.heads)

    def test_sampled_trees_up_to_nine_tokens(self):
        rng = random.Random(23)
        checked = 0
        while checked < 400:
            heads = random_tree_heads(rng, rng.randint(6, 9))
            if not oracle_is_two_colorable(heads):
                continue
            tree = DepTree.from_heads(heads)
            assert dc.decode_2planar(dc.encode_2planar(tree)).heads == heads
            checked += 1

    def test_fuzz_random_bracket_strings(self):
        rng = random.Random(5)
        for _ in range(1000):
            n = rng.randint(1, 10)
            labels = []
            for _ in range(n):
                planes = []
                for _ in range(2):
                    s = ""
                    if rng.random() < 0.4:
                        s += "<"
                    s += "\\" * rng.randint(0, 2)
                    s += "/" * rng.randint(0, 2)
                    if rng.random() < 0.4:
                        s += ">"
                    planes.append(s)
                labels.append(DepLabel(dc._render_bracket_arc(dc.BracketArc(*planes)), "dep"))
            tree = dc.decode_2planar(labels)
            assert oracle_is_valid_tree(tree.heads)

    def test_bad_bracket_string_rejected(self):
        with pytest.raises(dc.LabelFormatError):
            dc.decode_2planar([DepLabel(">>", "dep")])
        with pytest.raises(dc.LabelFormatError):
            dc.decode_2planar([DepLabel("x", "dep")])

    def test_star_rendering_round_trips(self):
        arc = dc.BracketArc(plane1="<\\\\", plane2="</>")
        rendered = dc._render_bracket_arc(arc)
        assert rendered == "<\\\\<*/*>*"
        assert dc.parse_bracket_arc(rendered) == arc

    def test_star_rendering_unambiguous_at_plane_seam(self):
        # plane 1 ending and plane 2 starting with the same symbol
        arc = dc.BracketArc(plane1="<\\", plane2="\\\\")
        rendered = dc._render_bracket_arc(arc)
        assert dc.parse_bracket_arc(rendered) == arc


class TestProjectivize:
    def test_projective_input_identity(self):
        tree = DepTree.from_heads([2, 0, 2], ["a", "root", "b"])
        assert dc.projectivize(tree) == tree

    def test_painting_lifts_final_punct(self):
        lifted = dc.projectivize(PAINTING)
        assert lifted.heads == [2, 3, 4, 0, 4]
        assert lifted.deprels == PAINTING.deprels
        assert oracle_is_projective(lifted.heads)

    def test_arc_off_root_token_is_never_lifted(self):
        # (3,1) crosses (4,2) but 3 is the root, so (4,2) lifts instead.
        tree = DepTree.from_heads([3, 4, 0, 3])
        lifted = dc.projectivize(tree)
        assert oracle_is_projective(lifted.heads)
        assert lifted.heads.count(0) == 1

    @given(dep_trees())
    def test_output_always_projective(self, tree):
        lifted = dc.projectivize(tree)
        assert oracle_is_projective(lifted.heads)
        assert oracle_is_valid_tree(lifted.heads)

    def test_five_hundred_random_trees(self):
        rng = random.Random(77)
        for _ in range(500):
            tree = random_dep_tree(rng, rng.randint(1, 12))
            assert oracle_is_projective(dc.projectivize(tree).heads)


class TestArcHybridOracle:
    def test_smallest_left_arc(self):
        assert dc.oracle_arc_hybrid(DepTree.from_heads([2, 0])) == ["SH", "LA", "SH"]

    def test_smallest_right_arc(self):
        assert dc.oracle_arc_hybrid(DepTree.from_heads([0, 1])) == ["SH", "SH", "RA"]

    def test_non_projective_input_rejected(self):
        with pytest.raises(ValueError):
            dc.oracle_arc_hybrid(PAINTING)

    def test_enumerated_projective_tree_counts(self):
        counts = [sum(1 for _ in enumerate_projective_trees(n)) for n in range(1, 5)]
        assert counts == [1, 2, 7, 30]

    @pytest.mark.parametrize("n", range(1, 7))
    def test_exhaustive_replay_reconstructs_tree(self, n):
        for heads in enumerate_projective_trees(n):
            transitions = dc.oracle_arc_hybrid(DepTree.from_heads(heads))
            assert replay_arc_hybrid(transitions, n) == heads

    def test_replay_on_larger_sampled_trees(self):
        rng = random.Random(9)
        for _ in range(300):
            n = rng.randint(7, 10)
            heads = random_projective_heads(rng, n)
            assert oracle_is_projective(heads)
            transitions = dc.oracle_arc_hybrid(DepTree.from_heads(heads))
            assert replay_arc_hybrid(transitions, n) == heads


class TestArcHybridCodec:
    def test_left_arc_labels(self):
        labels = dc.encode_arc_hybrid(DepTree.from_heads([2, 0], ["a", "root"]))
        assert [l.arc_part for l in labels] == ["SH_LA", "SH"]

    def test_right_arc_labels(self):
        labels = dc.encode_arc_hybrid(DepTree.from_heads([0, 1], ["root", "a"]))
        assert [l.arc_part for l in labels] == ["SH", "SH_RA"]

    def test_label_count_and_leading_shift(self):
        rng = random.Random(13)
        for _ in range(500):
            tree = random_dep_tree(rng, rng.randint(1, 12))
            labels = dc.encode_arc_hybrid(tree)
            assert len(labels) == len(tree)
            assert all(l.arc_part.split("_")[0] == "SH" for l in labels)
            assert all(l.arc_part.split("_").count("SH") == 1 for l in labels)

    def test_round_trip_projective_trees(self):
        rng = random.Random(17)
        for _ in range(400):
            heads = random_projective_heads(rng, rng.randint(1, 12))
            tree = DepTree.from_heads(heads)
            back = dc.decode_arc_hybrid(dc.encode_arc_hybrid(tree))
            assert back.heads == heads

    def test_rels_come_from_original_tree(self):
        labels = dc.encode_arc_hybrid(PAINTING)
        assert [l.rel_part for l in labels] == PAINTING.deprels

    def test_all_shift_labels_decode_to_left_chain(self):
        labels = [DepLabel("SH", "dep")] * 4
        tree = dc.decode_arc_hybrid(labels)
        assert tree.heads == [0, 1, 1, 1]

    def test_fuzz_transition_chunks(self):
        rng = random.Random(31)
        for _ in range(1000):
            n = rng.randint(1, 10)
            labels = [
                DepLabel("_".join(["SH"] + [rng.choice(["LA", "RA"]) for _ in range(rng.randint(0, 3))]), "dep")
                for _ in range(n)
            ]
            tree = dc.decode_arc_hybrid(labels)
            assert oracle_is_valid_tree(tree.heads)

    def test_bad_chunks_rejected(self):
        for bad in ("LA", "SH_SH", "", "SH_XX"):
            with pytest.raises(dc.LabelFormatError):
                dc.decode_arc_hybrid([DepLabel(bad, "dep")])


class TestRepairTree:
    def test_valid_tree_unchanged(self):
        tree = dc.repair_tree([2, 0, 2], ["a", "root", "b"])
        assert tree.heads == [2, 0, 2]
        assert tree.deprels == ["a", "root", "b"]

    def test_two_cycle_without_root(self):
        tree = dc.repair_tree([2, 1], ["a", "b"])
        assert tree.heads == [0, 1]

    def test_multiple_root_claims_keep_leftmost(self):
        tree = dc.repair_tree([0, 0, 0])
        assert tree.heads == [0, 1, 1]

    def test_headless_tokens_attach_to_root(self):
        tree = dc.repair_tree([None, 0, None])
        assert tree.heads == [2, 0, 2]

    def test_out_of_range_and_self_heads_discarded(self):
        tree = dc.repair_tree([9, 0, 3])
        assert tree.heads == [2, 0, 2]

    def test_missing_rel_defaults(self):
        tree = dc.repair_tree([0, None], [None, None], default_rel="obj")
        assert tree.deprels == ["obj", "obj"]

    def test_cycle_broken_nearest_to_root(self):
        # 4 claims root; the 1<->2 cycle is cut at 2 (closest to 4... tie
        # resolution favors the smaller distance first, then leftmost).
        tree = dc.repair_tree([2, 1, 4, 0])
        assert oracle_is_valid_tree(tree.heads)
        assert tree.heads[3] == 0

    def test_fuzz_ten_thousand_partial_maps(self):
        rng = random.Random(41)
        for _ in range(10_000):
            n = rng.randint(1, 10)
            heads = [
                rng.choice([None] + list(range(-2, n + 3)))
                for _ in range(n)
            ]
            tree = dc.repair_tree(heads)
            assert oracle_is_valid_tree(tree.heads)

    def test_idempotent_on_repaired_output(self):
        rng = random.Random(43)
        for _ in range(200):
            n = rng.randint(1, 8)
            heads = [rng.choice([None] + list(range(0, n + 1))) for _ in range(n)]
            once = dc.repair_tree(heads)
            twice = dc.repair_tree(once.heads, once.deprels)
            assert once.heads == twice.heads


class TestLosslessnessProperties:
    """Encoding-specific round trips over hypothesis-generated trees."""

    @given(dep_trees(max_n=15))
    @settings(max_examples=150)
    def test_relhead_lossless_everywhere(self, tree):
        back = dc.decode_rel_head(dc.encode_rel_head(tree), forms=tree.forms, upos=tree.upos)
        assert back == tree

    @given(dep_trees(max_n=15))
    @settings(max_examples=150)
    def test_two_planar_lossless_on_two_colorable(self, tree):
        back = dc.decode_2planar(dc.encode_2planar(tree))
        if oracle_is_two_colorable(tree.heads):
            assert same_structure(back, tree)
        else:
            assert oracle_is_valid_tree(back.heads)

    @given(dep_trees(max_n=15))
    @settings(max_examples=150)
    def test_arc_hybrid_lossless_on_projective(self, tree):
        back = dc.decode_arc_hybrid(dc.encode_arc_hybrid(tree))
        if oracle_is_projective(tree.heads):
            assert same_structure(back, tree)
        else:
            assert oracle_is_valid_tree(back.heads)

    @given(dep_trees(max_n=15))
    @settings(max_examples=100)
    def test_every_encoder_emits_n_labels(self, tree):
        for encoding in dc.DEP_ENCODINGS:
            assert len(dc.encode_dep_tree(tree, encoding)) == len(tree)


class TestLabelFiles:
    def test_round_trip(self):
        rng = random.Random(3)
        rows = []
        for _ in range(20):
            tree = random_dep_tree(rng, rng.randint(1, 9))
            rows.append((tree.forms, dc.encode_2planar(tree)))
        text = dc.write_dep_labels(rows)
        back = dc.read_dep_labels(text)
        assert [(list(f), list(l)) for f, l in back] == [(list(f), list(l)) for f, l in rows]

    def test_format_shape(self):
        text = dc.write_dep_labels([(PAINTING.forms, dc.encode_rel_head(PAINTING))])
        first = text.splitlines()[0]
        assert first == "This\t+1\tdet"

    def test_bad_column_count(self):
        with pytest.raises(dc.LabelFormatError):
            dc.read_dep_labels("onlyonecolumn\n")
