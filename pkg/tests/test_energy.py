import math

import pytest
from hypothesis import given, strategies as st

from symfold.energy import (
    INF,
    TEST_MODEL,
    ComplementRule,
    assert_compatible,
    complement_rule,
    free_energy,
    load_params,
    naive_free_energy,
    sat_add,
)
from symfold.errors import ParseError, StructureError
from symfold.strands import circular_permutations, parse_system
from symfold.structures import SecondaryStructure


def ordering(text):
    return circular_permutations(parse_system(text))[0]


AT2 = ordering("a AT 2\n")


class TestSatAdd:
    def test_plain(self):
        assert sat_add(1, 2, 3) == 6
        assert sat_add() == 0
        assert sat_add(-5, 2) == -3

    def test_absorbing(self):
        assert sat_add(INF, -10**9) == INF
        assert sat_add(5, INF, 5) == INF

    @given(st.lists(st.integers(-10**6, 10**6), max_size=6))
    def test_matches_sum_when_finite(self, xs):
        assert sat_add(*xs) == sum(xs)


class TestComplementRules:
    def test_dna(self):
        r = complement_rule("DNA")
        assert r.complementary("A", "T") and r.complementary("T", "A")
        assert r.complementary("C", "G")
        assert not r.complementary("A", "U")
        assert not r.complementary("G", "T")
        assert not r.complementary("A", "A")

    def test_rna(self):
        r = complement_rule("RNA")
        assert r.complementary("A", "U")
        assert not r.complementary("A", "T")
        assert not r.complementary("G", "U")

    def test_wobble(self):
        assert complement_rule("RNA", wobble=True).complementary("G", "U")
        assert complement_rule("DNA", wobble=True).complementary("G", "T")
        assert not complement_rule("DNA", wobble=True).complementary("G", "U")

    def test_unknown_alphabet(self):
        with pytest.raises(ValueError):
            complement_rule("PNA")

    def test_assert_compatible(self):
        s = SecondaryStructure(4, [(1, 4), (2, 3)])
        assert_compatible(AT2, s, complement_rule("DNA"))
        o = ordering("a AA 1\nb TG 1\n")  # sequence AATG
        with pytest.raises(StructureError):
            assert_compatible(o, SecondaryStructure(4, [(1, 4)]),
                              complement_rule("DNA"))


class TestLoopEnergies:
    def test_hairpin_sizes(self):
        assert TEST_MODEL.hairpin_energy(3, 7) == 330   # three unpaired
        assert TEST_MODEL.hairpin_energy(1, 6) == 340
        assert TEST_MODEL.hairpin_energy(1, 4) == INF   # too tight
        assert TEST_MODEL.hairpin_energy(1, 2) == INF

    def test_stack_vs_interior(self):
        assert TEST_MODEL.interior_energy(1, 2, 9, 10) == -200
        assert TEST_MODEL.interior_energy(1, 3, 8, 10) == 100 + 30 * 2
        assert TEST_MODEL.interior_energy(1, 3, 9, 10) == 100 + 30 * 1  # bulge

    def test_multiloop_value(self):
        assert TEST_MODEL.multiloop_energy(3, 4) == 500
        assert TEST_MODEL.multiloop_energy(2, 0) == 340 + 80

    def test_symmetry_term(self):
        assert TEST_MODEL.symmetry_term(1) == 0.0
        assert TEST_MODEL.symmetry_term(2) == pytest.approx(42.70, abs=0.01)
        assert TEST_MODEL.symmetry_term(4) == pytest.approx(2 * 61.6 * math.log(2))


class TestNaiveFreeEnergy:
    def test_hairpin_stem_total(self):
        o = ordering("a GGGAAAACCC 1\n")
        s = SecondaryStructure(10, [(1, 10), (2, 9), (3, 8)])
        # two stacks and a four-base hairpin
        assert naive_free_energy(o, s, TEST_MODEL) == -60

    def test_duplex_total(self):
        s = SecondaryStructure(4, [(1, 4), (2, 3)])
        assert naive_free_energy(AT2, s, TEST_MODEL) == -200 + 196

    def test_exterior_loops_free(self):
        # a single cross-nick pair leaves only the association penalty
        assert naive_free_energy(AT2, SecondaryStructure(4, [(1, 4)]), TEST_MODEL) == 196

    def test_empty_single_strand(self):
        o = ordering("a ACGT 1\n")
        assert naive_free_energy(o, SecondaryStructure(4, []), TEST_MODEL) == 0

    def test_association_scales_with_strands(self):
        o = ordering("a AC 3\n")
        s = SecondaryStructure(6, [(2, 3), (4, 5)])
        assert naive_free_energy(o, s, TEST_MODEL) == 2 * 196

    def test_tight_hairpin_is_forbidden(self):
        o = ordering("a ACGT 1\n")
        assert naive_free_energy(o, SecondaryStructure(4, [(1, 4)]), TEST_MODEL) == INF


class TestFreeEnergy:
    def test_symmetric_duplex(self):
        s = SecondaryStructure(4, [(1, 4), (2, 3)])
        bd = free_energy(AT2, s, TEST_MODEL)
        assert bd.loop_sum == -200
        assert bd.association == 196
        assert bd.naive == -4
        assert bd.symmetry_order == 2
        assert bd.symmetry_term == pytest.approx(61.6 * math.log(2))
        assert bd.total == pytest.approx(-4 + 61.6 * math.log(2))

    def test_asymmetric_no_penalty(self):
        bd = free_energy(AT2, SecondaryStructure(4, [(1, 4)]), TEST_MODEL)
        assert bd.symmetry_order == 1
        assert bd.symmetry_term == 0.0
        assert bd.total == float(bd.naive)

    def test_infinite_stays_infinite(self):
        o = ordering("a ACGT 1\n")
        bd = free_energy(o, SecondaryStructure(4, [(1, 4)]), TEST_MODEL)
        assert bd.naive == INF and bd.total == float(INF)


class TestLoadParams:
    def test_defaults(self):
        assert load_params("") == TEST_MODEL

    def test_override(self):
        m = load_params("stack -310\nkbt_centi 59.2\nmin_hairpin 4\n")
        assert m.stack == -310
        assert m.kbt_centi == 59.2
        assert m.min_hairpin == 4
        assert m.hairpin_base == TEST_MODEL.hairpin_base

    def test_comments(self):
        m = load_params("# comment\nstack -1   # inline\n\n")
        assert m.stack == -1

    def test_unknown_key(self):
        with pytest.raises(ParseError):
            load_params("stak -1\n")

    def test_bad_values(self):
        with pytest.raises(ParseError):
            load_params("stack x\n")
        with pytest.raises(ParseError):
            load_params("kbt_centi cold\n")
        with pytest.raises(ParseError):
            load_params("stack\n")

    def test_range_checks(self):
        with pytest.raises(ParseError):
            load_params("min_hairpin -1\n")
        with pytest.raises(ParseError):
            load_params("kbt_centi 0\n")
        with pytest.raises(ParseError):
            load_params("kbt_centi -2\n")

    def test_integer_keys_reject_floats(self):
        with pytest.raises(ParseError):
            load_params("stack -1.5\n")
