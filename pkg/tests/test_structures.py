import pytest
from hypothesis import given, settings, strategies as st

from symfold.errors import ParseError, StructureError
from symfold.strands import circular_permutations, ordering_from_names, parse_system
from symfold.structures import (
    SecondaryStructure,
    assert_unpseudoknotted,
    from_dotbracket,
    is_connected,
    is_unpseudoknotted,
    loop_decomposition,
    max_nicks_per_loop,
    parse_dotbracket,
    polymer_faces,
    rotational_symmetry,
    segment_length,
    serialize_dotbracket,
    shorter_arc,
)


def ordering(text, names=None):
    sys = parse_system(text)
    if names is None:
        return circular_permutations(sys)[0]
    return ordering_from_names(sys, names)


AT2 = ordering("a AT 2\n")  # two identical two-base strands, N=4


class TestSecondaryStructure:
    def test_normalization(self):
        s = SecondaryStructure(4, [(4, 1), (3, 2)])
        assert s.sorted_pairs() == [(1, 4), (2, 3)]
        assert s.partner(1) == 4 and s.partner(4) == 1
        assert s.partner(2) == 3

    def test_unpaired_partner_is_zero(self):
        s = SecondaryStructure(4, [(1, 4)])
        assert s.partner(2) == 0
        assert not s.is_paired(2)
        assert s.is_paired(4)

    def test_out_of_range(self):
        with pytest.raises(StructureError):
            SecondaryStructure(4, [(0, 3)])
        with pytest.raises(StructureError):
            SecondaryStructure(4, [(1, 5)])
        with pytest.raises(StructureError):
            SecondaryStructure(4, [(2, 2)])

    def test_double_occupancy(self):
        with pytest.raises(StructureError):
            SecondaryStructure(6, [(1, 4), (4, 6)])

    def test_equality_and_hash(self):
        a = SecondaryStructure(4, [(1, 4)])
        b = SecondaryStructure(4, [(4, 1)])
        assert a == b
        assert hash(a) == hash(b)
        assert a != SecondaryStructure(5, [(1, 4)])

    def test_len(self):
        assert len(SecondaryStructure(4, [(1, 4), (2, 3)])) == 2
        assert len(SecondaryStructure(4, [])) == 0


class TestPseudoknots:
    def test_nested_ok(self):
        assert_unpseudoknotted(SecondaryStructure(6, [(1, 6), (2, 5), (3, 4)]))

    def test_adjacent_ok(self):
        assert_unpseudoknotted(SecondaryStructure(6, [(1, 3), (4, 6)]))

    def test_crossing_detected(self):
        s = SecondaryStructure(4, [(1, 3), (2, 4)])
        assert not is_unpseudoknotted(s)
        with pytest.raises(StructureError):
            assert_unpseudoknotted(s)

    def test_empty_ok(self):
        assert is_unpseudoknotted(SecondaryStructure(5, []))


class TestConnectivity:
    def test_single_strand_always_connected(self):
        o = ordering("a ACGT 1\n")
        assert is_connected(o, SecondaryStructure(4, []))

    def test_bridging_pair(self):
        assert is_connected(AT2, SecondaryStructure(4, [(1, 4)]))
        assert is_connected(AT2, SecondaryStructure(4, [(2, 3)]))

    def test_no_bridge(self):
        assert not is_connected(AT2, SecondaryStructure(4, []))
        o = ordering("a ACGT 2\n")
        # pair entirely within strand 1
        assert not is_connected(o, SecondaryStructure(8, [(2, 3)]))

    def test_chain_of_three(self):
        o = ordering("a AC 3\n")
        assert is_connected(o, SecondaryStructure(6, [(2, 3), (4, 5)]))
        assert not is_connected(o, SecondaryStructure(6, [(2, 3)]))
        assert is_connected(o, SecondaryStructure(6, [(2, 3), (1, 6)]))


class TestLoopDecomposition:
    def test_duplex_with_nick(self):
        loops = loop_decomposition(AT2, SecondaryStructure(4, [(1, 4), (2, 3)]))
        assert len(loops) == 3
        by_closing = {l.closing: l for l in loops}
        root = by_closing[None]
        assert root.kind == "exterior" and root.nicks == 1
        assert by_closing[(1, 4)].kind == "stack"
        inner_face = by_closing[(2, 3)]
        assert inner_face.kind == "exterior" and inner_face.nicks == 1
        assert inner_face.unpaired == 0

    def test_all_six_kinds_on_one_strand(self):
        o = ordering("a GGGAAAACCAGAGGAAACACACAC 1\n")
        s = SecondaryStructure(24, [(1, 24), (2, 9), (3, 8), (11, 22),
                                    (13, 20), (14, 18)])
        kinds = {l.closing: l.kind for l in loop_decomposition(o, s)}
        assert kinds == {
            None: "exterior",
            (1, 24): "multiloop",
            (2, 9): "stack",
            (3, 8): "hairpin",
            (11, 22): "interior",
            (13, 20): "bulge",
            (14, 18): "hairpin",
        }

    def test_disconnected_rejected(self):
        with pytest.raises(StructureError):
            loop_decomposition(AT2, SecondaryStructure(4, []))

    def test_bare_strand_has_no_loops(self):
        o = ordering("a ACGT 1\n")
        assert loop_decomposition(o, SecondaryStructure(4, [])) == []

    def test_hairpin_stem(self):
        o = ordering("a GGGAAAACCC 1\n")
        s = SecondaryStructure(10, [(1, 10), (2, 9), (3, 8)])
        loops = loop_decomposition(o, s)
        kinds = sorted(l.kind for l in loops)
        assert kinds == ["exterior", "hairpin", "stack", "stack"]
        hp = next(l for l in loops if l.kind == "hairpin")
        assert hp.closing == (3, 8) and hp.unpaired == 4

    def test_multiloop_counts(self):
        o = ordering("a ACGTACGTACGTAC 1\n")
        s = SecondaryStructure(14, [(1, 14), (2, 5), (7, 10)])
        loops = loop_decomposition(o, s)
        ml = next(l for l in loops if l.closing == (1, 14))
        assert ml.kind == "multiloop"
        assert ml.pair_count == 3
        assert ml.unpaired == 4
        assert ml.inner == ((2, 5), (7, 10))

    def test_bulge_and_interior(self):
        o = ordering("a ACGTACGTAC 1\n")
        bulge = loop_decomposition(o, SecondaryStructure(10, [(1, 10), (3, 9)]))[1]
        assert bulge.kind == "bulge"
        assert bulge.interior_sides() == (1, 0)
        interior = loop_decomposition(o, SecondaryStructure(10, [(1, 10), (3, 8)]))[1]
        assert interior.kind == "interior"
        assert interior.interior_sides() == (1, 1)

    def test_empty_single_strand_face(self):
        o = ordering("a ACGT 1\n")
        loops = polymer_faces(o, SecondaryStructure(4, []))
        assert len(loops) == 1
        assert loops[0].kind == "exterior"
        assert loops[0].unpaired == 4 and loops[0].nicks == 1

    def test_pair_spanning_nick_is_exterior(self):
        loops = loop_decomposition(AT2, SecondaryStructure(4, [(1, 4)]))
        face = next(l for l in loops if l.closing == (1, 4))
        assert face.kind == "exterior"
        assert face.nicks == 1 and face.unpaired == 2

    def test_length_mismatch(self):
        with pytest.raises(StructureError):
            loop_decomposition(AT2, SecondaryStructure(6, []))

    def test_pseudoknot_rejected(self):
        o = ordering("a ACGT 1\n")
        with pytest.raises(StructureError):
            loop_decomposition(o, SecondaryStructure(4, [(1, 3), (2, 4)]))

    def test_interior_sides_wrong_kind(self):
        o = ordering("a ACGTA 1\n")
        loops = loop_decomposition(o, SecondaryStructure(5, [(1, 5)]))
        with pytest.raises(StructureError):
            loops[0].interior_sides()


def random_nested_pairs(draw, i, j):
    """Draw a uniform-ish random non-crossing pair set on [i, j]."""
    if i >= j:
        return []
    if draw(st.booleans()):
        return random_nested_pairs(draw, i + 1, j)
    d = draw(st.integers(i + 1, j))
    return ([(i, d)] + random_nested_pairs(draw, i + 1, d - 1)
            + random_nested_pairs(draw, d + 1, j))


@st.composite
def ordering_and_structure(draw):
    reps = draw(st.integers(1, 4))
    length = draw(st.integers(1, 5))
    seq = ("ACGTA" * 2)[:length]
    o = ordering(f"a {seq} {reps}\n", ["a"] * reps)
    pairs = random_nested_pairs(draw, 1, o.length)
    return o, SecondaryStructure(o.length, pairs)


class TestLoopInvariants:
    @given(ordering_and_structure())
    @settings(max_examples=200, deadline=None)
    def test_face_count_and_connectivity(self, case):
        o, s = case
        loops = polymer_faces(o, s)
        assert len(loops) == len(s.pairs) + 1
        # every nick lies on exactly one face
        assert sum(l.nicks for l in loops) == o.strand_count
        # connectivity criterion: no face carries two nicks
        assert is_connected(o, s) == (max_nicks_per_loop(o, s) <= 1)
        if is_connected(o, s):
            exterior = [l for l in loops if l.kind == "exterior"]
            assert len(exterior) == o.strand_count
            assert all(l.nicks == 1 for l in exterior)
            assert len(loops) - len(exterior) == len(s.pairs) - o.strand_count + 1

    @given(ordering_and_structure())
    @settings(max_examples=100, deadline=None)
    def test_each_base_on_some_face(self, case):
        o, s = case
        loops = polymer_faces(o, s)
        # every base appears either as a pair member (on two faces) or as
        # an unpaired base (on one face)
        unpaired_total = sum(l.unpaired for l in loops)
        assert unpaired_total == o.length - 2 * len(s.pairs)
        pair_mentions = sum(l.pair_count for l in loops)
        assert pair_mentions == 2 * len(s.pairs)


class TestRotationalSymmetry:
    def test_fourfold(self):
        o = ordering("a AT 4\n")
        s = SecondaryStructure(8, [(1, 8), (2, 3), (4, 5), (6, 7)])
        assert rotational_symmetry(o, s) == 4

    def test_twofold_not_fourfold(self):
        o = ordering("a AATT 4\n")
        s = SecondaryStructure(16, [(2, 15), (3, 6), (4, 5), (7, 10), (11, 14), (12, 13)])
        assert rotational_symmetry(o, s) == 2

    def test_duplex_palindrome(self):
        s = SecondaryStructure(4, [(1, 4), (2, 3)])
        assert rotational_symmetry(AT2, s) == 2

    def test_asymmetric_structure(self):
        o = ordering("a AT 2\n")
        # (1,4) rotates to (2,3), which is absent
        assert rotational_symmetry(o, SecondaryStructure(4, [(1, 4)])) == 1
        assert rotational_symmetry(o, SecondaryStructure(4, [(1, 2)])) == 1

    def test_pair_spanning_half_circle_maps_to_itself(self):
        o = ordering("a AT 2\n")
        assert rotational_symmetry(o, SecondaryStructure(4, [(2, 4)])) == 2

    def test_asymmetric_ordering_forces_one(self):
        o = ordering("a AT 1\nb CG 1\n", ["a", "b"])
        s = SecondaryStructure(4, [(1, 4), (2, 3)])
        assert rotational_symmetry(o, s) == 1

    def test_empty_structure_fully_symmetric(self):
        o = ordering("a AT 3\n")
        assert rotational_symmetry(o, SecondaryStructure(6, [])) == 3

    @given(ordering_and_structure())
    @settings(max_examples=100, deadline=None)
    def test_degree_divides_order_and_fixes_structure(self, case):
        o, s = case
        from symfold.strands import symmetry_profile
        v = symmetry_profile(o).order
        r = rotational_symmetry(o, s)
        assert v % r == 0
        shift = o.length // r
        rotated = {tuple(sorted(((a - 1 + shift) % o.length + 1,
                                 (b - 1 + shift) % o.length + 1)))
                   for a, b in s.pairs}
        assert rotated == {tuple(p) for p in s.pairs}


class TestArcGeometry:
    def test_segment_length_basics(self):
        assert segment_length(1, 1, 8) == 1
        assert segment_length(1, 8, 8) == 2
        assert segment_length(2, 5, 8) == 4
        assert segment_length(5, 2, 8) == 4

    def test_shorter_arc(self):
        assert shorter_arc(2, 4, 8) == (2, 3, 4)
        assert shorter_arc(2, 7, 8) == (7, 8, 1, 2)
        assert shorter_arc(1, 5, 8) == (1, 2, 3, 4, 5)  # tie: ascending wins

    def test_shorter_arc_bad_order(self):
        with pytest.raises(StructureError):
            shorter_arc(4, 2, 8)

    @given(st.integers(2, 20), st.data())
    def test_arc_length_consistent(self, n, data):
        i = data.draw(st.integers(1, n - 1))
        j = data.draw(st.integers(i + 1, n))
        arc = shorter_arc(i, j, n)
        assert len(arc) == segment_length(i, j, n)
        assert arc[0] in (i, j) and arc[-1] in (i, j)


class TestDotBracket:
    def test_render(self):
        s = SecondaryStructure(4, [(1, 4), (2, 3)])
        assert serialize_dotbracket(s, AT2) == "((+))"
        assert serialize_dotbracket(SecondaryStructure(4, [(1, 4)]), AT2) == "(.+.)"
        o = ordering("a GGGAAAACCC 1\n")
        s = SecondaryStructure(10, [(1, 10), (2, 9), (3, 8)])
        assert serialize_dotbracket(s, o) == "(((....)))"

    def test_render_with_energy(self):
        s = SecondaryStructure(4, [(1, 4), (2, 3)])
        text = serialize_dotbracket(s, AT2, energy=-4)
        assert text == "((+))  # energy=-4"
        assert parse_dotbracket(text, AT2) == s

    def test_parse(self):
        n, pairs, segs = from_dotbracket("((+))")
        assert n == 4 and sorted(pairs) == [(1, 4), (2, 3)] and segs == [2, 2]
        n, pairs, segs = from_dotbracket("..")
        assert n == 2 and pairs == [] and segs == [2]

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            from_dotbracket("(.")
        with pytest.raises(ParseError):
            from_dotbracket(".)")
        with pytest.raises(ParseError):
            from_dotbracket("+..")
        with pytest.raises(ParseError):
            from_dotbracket("..+")
        with pytest.raises(ParseError):
            from_dotbracket(".x.")

    def test_parse_against_ordering(self):
        s = parse_dotbracket("(.+.)", AT2)
        assert s == SecondaryStructure(4, [(1, 4)])
        with pytest.raises(ParseError):
            parse_dotbracket("(..+)", AT2)          # segment lengths 3,1
        with pytest.raises(ParseError):
            parse_dotbracket("(.)", ordering("a ACGT 1\n"))  # 3 bases for 4

    def test_parse_complement_check(self):
        from symfold.energy import complement_rule
        rule = complement_rule("DNA")
        assert parse_dotbracket("(.+.)", AT2, rule=rule).pairs  # A-T, fine
        o = ordering("a AATG 1\n")
        with pytest.raises(ParseError):
            parse_dotbracket("(..)", o, rule=rule)  # A-G mispair

    @given(ordering_and_structure())
    @settings(max_examples=100, deadline=None)
    def test_roundtrip(self, case):
        o, s = case
        assert parse_dotbracket(serialize_dotbracket(s, o), o) == s
