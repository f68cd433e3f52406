import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import P
from painted_moduli.core import (
    BLACK,
    WHITE,
    Color,
    Flag,
    PaintedSet,
    TwoPartition,
    VertexData,
    WeightData,
    allowed_quadruples,
    cluster_weighted_ok,
    enumerate_stable_partitions,
    epsilon,
    is_allowed_quadruple,
    is_stable_painted_set,
    is_stable_partition,
    random_star_weights,
    star_weights,
    vertex_painted_stable,
    vertex_weighted_stable,
    weighted_stability_sweep,
)

words = st.text(alphabet="wb", min_size=3, max_size=8)


def part(S, text):
    return TwoPartition(S, S.mask_of(text))


# -- painted sets ---------------------------------------------------------------

def test_from_word_names_and_colors():
    S = P("wwwb")
    assert S.names == ("1", "2", "3", "4")
    assert [lab.color for lab in S] == [WHITE, WHITE, WHITE, BLACK]
    assert (S.n_white, S.n_black) == (3, 1)


def test_duplicate_names_rejected():
    with pytest.raises(ValueError):
        PaintedSet.from_pairs([("a", "w"), ("a", "b")])


def test_color_parse():
    assert Color.parse("white") is WHITE and Color.parse("B") is BLACK
    with pytest.raises(ValueError):
        Color.parse("x")


@pytest.mark.parametrize("word, ok", [("wwb", True), ("wbb", False), ("ww", False), ("wwww", True)])
def test_is_stable_painted_set(word, ok):
    assert is_stable_painted_set(P(word)) is ok


# -- vertex stability -------------------------------------------------------------

def test_vertex_painted_stable_examples():
    assert vertex_painted_stable(VertexData.from_colors(0, 2, 1))
    assert not vertex_painted_stable(VertexData.from_colors(0, 1, 2))
    assert vertex_painted_stable(VertexData.from_colors(1, 0, 1))
    assert not vertex_painted_stable(VertexData.from_colors(1, 0, 0))
    assert vertex_painted_stable(VertexData(2, ()))


def test_edge_halves_are_white():
    with pytest.raises(ValueError):
        Flag(BLACK, None)
    assert Flag.edge_half().color is WHITE


def test_vertex_weighted_stable_examples():
    S = PaintedSet.from_pairs([("x", "w"), ("y", "w"), ("z", "b")])
    A = WeightData.from_mapping(S, {"x": 1, "y": 1, "z": Fraction(1, 4)})
    assert vertex_weighted_stable(VertexData(0, (Flag(WHITE, "x"), Flag(WHITE, "y"), Flag(BLACK, "z"))), A)
    assert not vertex_weighted_stable(VertexData(0, (Flag(WHITE, "x"), Flag(WHITE, "y"))), A)
    B = WeightData.from_mapping(S, {"x": 1, "y": 1, "z": Fraction(1, 3)})
    assert vertex_weighted_stable(VertexData(1, (Flag(BLACK, "z"),)), B)
    with pytest.raises(ValueError):
        vertex_weighted_stable(VertexData(0, (Flag(WHITE, "nope"),)), A)


def test_cluster_weighted_ok_examples():
    third = Fraction(1, 3)
    assert cluster_weighted_ok([third] * 3)
    assert not cluster_weighted_ok([Fraction(1), Fraction(1, 4)])
    assert cluster_weighted_ok([])


def test_weight_range_enforced():
    S = P("wb")
    with pytest.raises(ValueError):
        WeightData(S, (Fraction(1), Fraction(0)))
    with pytest.raises(ValueError):
        WeightData(S, (Fraction(1), Fraction(3, 2)))


@pytest.mark.parametrize("word, black", [("wwbb", Fraction(1, 3)), ("www", None), ("wwb", Fraction(1, 2))])
def test_star_weights(word, black):
    A = star_weights(P(word))
    assert A.satisfies_star()
    for i, lab in enumerate(A.pset):
        assert A.weights[i] == (1 if lab.color is WHITE else black)


@given(words, st.integers(0, 10 ** 6))
def test_random_star_weights_satisfy_condition(word, seed):
    assert random_star_weights(P(word), random.Random(seed)).satisfies_star()


def test_weighted_sweep_small():
    checked, bad = weighted_stability_sweep(trials=5, max_flags=6)
    assert checked > 0 and bad == []


# -- partitions ------------------------------------------------------------------

def test_two_partition_orientation():
    S = P("wwwww")
    a, b = part(S, "12"), part(S, "345")
    assert a == b and hash(a) == hash(b)
    assert str(a) == "12|345"
    assert a.part0 == (0, 1) and a.part1 == (2, 3, 4)
    with pytest.raises(ValueError):
        TwoPartition(S, 0)


@pytest.mark.parametrize("word, text, ok", [("wwwb", "12", True), ("wwbb", "12", False), ("wwwb", "1", False)])
def test_is_stable_partition(word, text, ok):
    assert is_stable_partition(part(P(word), text)) is ok


def test_enumerate_stable_partitions_examples():
    assert [str(p) for p in enumerate_stable_partitions(P("wwwb"))] == ["12|34", "13|24", "14|23"]
    assert [str(p) for p in enumerate_stable_partitions(P("wwbb"))] == ["13|24", "14|23"]
    assert len(enumerate_stable_partitions(P("wwwww"))) == 10
    with pytest.raises(ValueError):
        enumerate_stable_partitions(P("wbb"))


@given(words.filter(lambda w: w.count("w") >= 2))
def test_enumeration_matches_brute_force(word):
    S = P(word)
    got = enumerate_stable_partitions(S)
    assert len(set(got)) == len(got)
    n = len(S)
    brute = set()
    for k in range(1, n):
        for A in itertools.combinations(range(n), k):
            B = [i for i in range(n) if i not in A]
            if len(A) >= 2 and len(B) >= 2 and any(S.is_white(i) for i in A) and any(S.is_white(i) for i in B):
                brute.add(TwoPartition(S, S.mask_of(A)))
    assert set(got) == brute


@given(words, st.data())
def test_partition_stability_is_two_vertex_stability(word, data):
    S = P(word)
    mask = data.draw(st.integers(1, S.full - 1))
    sigma = TwoPartition(S, mask)
    swapped = TwoPartition(S, S.full ^ mask)
    assert is_stable_partition(sigma) == is_stable_partition(swapped)

    def vertex(m):
        return VertexData(0, tuple(Flag(S.color(i), S.labels[i].name) for i in range(len(S)) if m >> i & 1)
                          + (Flag.edge_half(),))
    both = vertex_painted_stable(vertex(mask)) and vertex_painted_stable(vertex(S.full ^ mask))
    assert is_stable_partition(sigma) == both


# -- quadruples -------------------------------------------------------------------

def test_allowed_quadruple_examples():
    assert is_allowed_quadruple(P("wwwb"), 0, 1, 2, 3)
    assert not is_allowed_quadruple(P("wwbb"), 0, 1, 2, 3)
    assert is_allowed_quadruple(P("wwbb"), 0, 2, 1, 3)
    with pytest.raises(ValueError):
        is_allowed_quadruple(P("wwww"), 0, 0, 1, 2)


def test_epsilon_examples():
    S = P("wwbb")
    assert epsilon(part(S, "13"), 0, 2, 1, 3) == 1
    assert epsilon(part(S, "14"), 0, 2, 1, 3) == -1
    assert epsilon(part(S, "13"), 0, 1, 2, 3) == 0


@given(words.filter(lambda w: w.count("w") >= 2), st.data())
def test_epsilon_antisymmetry(word, data):
    S = P(word)
    quads = allowed_quadruples(S)
    if not quads:
        return
    i, j, k, l = data.draw(st.sampled_from(quads))
    for sigma in enumerate_stable_partitions(S):
        assert epsilon(sigma, i, j, k, l) == -epsilon(sigma, k, j, i, l)
