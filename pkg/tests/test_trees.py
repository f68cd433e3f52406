import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import P, stable_words
from oracles import double_factorial, grow_trees
from painted_moduli.core import BLACK, PaintedSet, TwoPartition
from painted_moduli.trees import (
    ModularGraph,
    PaintedTree,
    canonical_key,
    check_tree,
    collapse_edge,
    critical_branch,
    enumerate_stable_trees,
    forget_and_stabilize,
    forget_by_restriction,
    graft,
    insert_edge,
    is_compatible,
    is_critical_vertex,
    partitions_of_tree,
    repaint_and_stabilize,
    stable_vertex_splits,
    tree_from_partitions,
)


def part(S, text):
    return TwoPartition(S, S.mask_of(text))


def tree(S, *texts):
    return tree_from_partitions([part(S, t) for t in texts], S)


def all_trees(S):
    return [t for d in range(len(S) - 2) for t in enumerate_stable_trees(S, d)]


def labels_at(tau, v):
    return sorted(tau.pset.labels[b.bit_length() - 1].name for b in v if b & (b - 1) == 0)


# -- compatibility and reconstruction ------------------------------------------

def test_is_compatible_examples():
    S = P("wwwwww")
    assert is_compatible(part(S, "12"), part(S, "123"))
    assert not is_compatible(part(S, "12"), part(S, "13"))
    assert is_compatible(part(S, "12"), part(S, "12"))
    with pytest.raises(ValueError):
        is_compatible(part(S, "12"), part(P("wwwwwb"), "12"))


def test_tree_from_partitions_examples():
    S = P("wwwww")
    one = tree_from_partitions([], S)
    assert one.n_edges == 0 and len(one.vertices) == 1
    t = tree(S, "12")
    assert sorted(labels_at(t, v) for v in t.vertices) == [["1", "2"], ["3", "4", "5"]]
    chain = tree(S, "12", "123")
    assert sorted(labels_at(chain, v) for v in chain.vertices) == [["1", "2"], ["3"], ["4", "5"]]
    assert {str(p) for p in partitions_of_tree(chain)} == {"12|345", "123|45"}


def test_check_tree_errors():
    S = P("wwwwww")
    with pytest.raises(ValueError):
        check_tree(S, [S.mask_of("12"), S.mask_of("3456")])
    with pytest.raises(ValueError):
        check_tree(S, [S.mask_of("12"), S.mask_of("13")])
    with pytest.raises(ValueError):
        check_tree(P("wwbbb"), [P("wwbbb").mask_of("12")])


def test_enumeration_examples():
    assert len(enumerate_stable_trees(P("wwwww"), 1)) == 10
    assert len(enumerate_stable_trees(P("wwwww"), 2)) == 15
    assert len(enumerate_stable_trees(P("wwwb"), 1)) == 3
    with pytest.raises(ValueError):
        enumerate_stable_trees(P("wwwww"), 3)
    with pytest.raises(ValueError):
        enumerate_stable_trees(P("wbb"), 0)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_top_degree_count_all_white(n):
    assert len(enumerate_stable_trees(P("w" * n), n - 3)) == double_factorial(2 * n - 5)


@pytest.mark.parametrize("word", stable_words(3, 6))
def test_enumeration_matches_graph_growth(word):
    S = P(word)
    grown = grow_trees(S)
    for d, expected in enumerate(grown):
        got = enumerate_stable_trees(S, d)
        assert {t.splits for t in got} == expected
        assert got == sorted(got)
        assert len({t.splits for t in got}) == len(got)


def test_canonical_key():
    S = P("wwwww")
    assert canonical_key(tree(S, "12")) == canonical_key(tree(S, "345"))
    assert canonical_key(tree(S, "12")) != canonical_key(tree(S, "13"))


# -- grafting, insertion, collapse ------------------------------------------------

def test_graft_minimal_clutch():
    S1 = PaintedSet.from_pairs([("a", "w"), ("b", "w"), ("s", "w")])
    S2 = PaintedSet.from_pairs([("t", "w"), ("c", "w"), ("d", "b")])
    out = graft(PaintedTree.one_vertex(S1), "s", PaintedTree.one_vertex(S2), "t")
    assert out.pset.names == ("a", "b", "c", "d")
    assert [str(p) for p in out.partitions()] == ["12|34"]


def test_graft_errors():
    S1 = PaintedSet.from_pairs([("a", "w"), ("b", "w"), ("s", "b")])
    S2 = PaintedSet.from_pairs([("t", "w"), ("c", "w"), ("d", "w")])
    with pytest.raises(ValueError):
        graft(PaintedTree.one_vertex(S1), "s", PaintedTree.one_vertex(S2), "t")
    S3 = PaintedSet.from_pairs([("t", "w"), ("a", "w"), ("d", "w")])
    S4 = PaintedSet.from_pairs([("a", "w"), ("b", "w"), ("s", "w")])
    with pytest.raises(ValueError):
        graft(PaintedTree.one_vertex(S4), "s", PaintedTree.one_vertex(S3), "t")


def _named(word, prefix):
    return PaintedSet.from_pairs((f"{prefix}{i}", c) for i, c in enumerate(word))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(stable_words(3, 5)), st.sampled_from(stable_words(3, 4)), st.data())
def test_graft_partitions(w1, w2, data):
    S1, S2 = _named(w1, "x"), _named(w2, "y")
    t1 = data.draw(st.sampled_from(all_trees(S1)))
    t2 = data.draw(st.sampled_from(all_trees(S2)))
    s = data.draw(st.sampled_from([i for i in range(len(S1)) if S1.is_white(i)]))
    t = data.draw(st.sampled_from([i for i in range(len(S2)) if S2.is_white(i)]))
    out = graft(t1, s, t2, t)
    assert out.n_edges == t1.n_edges + t2.n_edges + 1
    S = out.pset

    def lift(sigma, skip):
        side = sigma.part0 if skip not in sigma.part0 else sigma.part1
        names = {sigma.pset.labels[i].name for i in side}
        return TwoPartition(S, S.mask_of(names))
    expected = {lift(p, s) for p in t1.partitions()} | {lift(p, t) for p in t2.partitions()}
    expected.add(TwoPartition(S, S.mask_of(lab.name for k, lab in enumerate(S1.labels) if k != s)))
    assert partitions_of_tree(out) == expected


def test_insert_edge_examples():
    S = P("wwwww")
    one = PaintedTree.one_vertex(S)
    (v,) = one.vertices
    assert insert_edge(one, v, [1, 2]) == tree(S, "12")
    chain = tree(S, "12", "123")
    assert chain.n_edges == 2
    S6 = P("wwwwww")
    chain6 = tree(S6, "12", "1234")
    (mid,) = [u for u in chain6.vertices if len(u) == 4]
    four = insert_edge(chain6, mid, [mid[0], mid[1]])
    assert four.n_edges == 3 and len(four.vertices) == 4
    with pytest.raises(ValueError):
        insert_edge(PaintedTree.one_vertex(P("wwbb")), PaintedTree.one_vertex(P("wwbb")).vertices[0], [4, 8])


@pytest.mark.parametrize("word", stable_words(4, 6))
def test_insert_collapse_inverse(word):
    S = P(word)
    for tau in all_trees(S)[:-1]:
        for v in tau.vertices:
            for side in stable_vertex_splits(S, v):
                flags = [b for b in v if b & side]
                new = insert_edge(tau, v, flags)
                assert new.n_edges == tau.n_edges + 1
                (e,) = new.splits - tau.splits
                assert collapse_edge(new, e) == tau


def test_collapse_examples():
    S = P("wwwww")
    t = tree(S, "12")
    assert collapse_edge(t, part(S, "12")) == PaintedTree.one_vertex(S)
    with pytest.raises(ValueError):
        collapse_edge(t, part(S, "13"))


# -- forgetting and repainting --------------------------------------------------

def test_forget_examples():
    S = P("wwwww")
    assert str(forget_and_stabilize(tree(S, "12"), ["5"])) == "12|34"
    assert forget_and_stabilize(tree(S, "45"), ["5"]).n_edges == 0
    assert forget_and_stabilize(tree(S, "12"), []) == tree(S, "12")
    with pytest.raises(ValueError):
        forget_and_stabilize(tree(P("wwwbb"), "12"), ["1"] + ["2"])


@pytest.mark.parametrize("word", stable_words(5, 6, min_white=3))
def test_forget_composition_and_restriction(word):
    S = P(word)
    names = S.names
    rng = random.Random(word)
    for tau in all_trees(S):
        for A in ([names[0]], [names[-1]], [names[1]]):
            rest = [x for x in names if x not in A]
            for B in ([rest[0]], [rest[-1]]):
                target = [lab for lab in S.labels if lab.name not in A + B]
                if sum(lab.color.value == "w" for lab in target) < 2 or len(target) < 3:
                    continue
                mid = [lab for lab in S.labels if lab.name not in A]
                if sum(lab.color.value == "w" for lab in mid) < 2:
                    continue
                both = forget_and_stabilize(tau, A + B)
                assert forget_and_stabilize(forget_and_stabilize(tau, A), B) == both
                assert forget_by_restriction(tau, A + B) == both
                assert forget_and_stabilize(tau, A + B, rng) == both


def test_repaint_examples():
    S = P("wwwww")
    out = repaint_and_stabilize(tree(S, "12"), "1")
    assert out.pset.color(0) is BLACK and out.splits == tree(S, "12").splits
    S2 = P("wbwww")
    assert repaint_and_stabilize(tree(S2, "12"), "1").n_edges == 0
    S3 = P("wbbww")
    assert repaint_and_stabilize(tree(S3, "12", "123"), "1").n_edges == 0
    with pytest.raises(ValueError):
        repaint_and_stabilize(tree(P("wwbbb"), "13"), "1")


@pytest.mark.parametrize("word", stable_words(5, 6, min_white=3))
def test_stabilization_confluence(word):
    S = P(word)
    for tau in all_trees(S):
        for a in (i for i in range(len(S)) if S.is_white(i)):
            ref = repaint_and_stabilize(tau, a)
            for seed in range(3):
                assert repaint_and_stabilize(tau, a, random.Random(seed)) == ref


# -- critical branches -------------------------------------------------------------

def test_critical_branch_examples():
    S = P("wbwwb")
    cb = critical_branch(tree(S, "12"), "1")
    assert (cb.length, cb.terminal_type) == (1, "II")
    assert len(cb.path) == 2
    S2 = P("wbwbb")
    cb = critical_branch(tree(S2, "12"), "1")
    assert (cb.length, cb.terminal_type) == (1, "I")
    one = critical_branch(PaintedTree.one_vertex(P("wwwww")), "1")
    assert (one.length, one.terminal_type) == (0, "II")


def test_is_critical_vertex():
    S = P("wbwwb")
    t = tree(S, "12")
    crit = [v for v in t.vertices if is_critical_vertex(t, v)]
    assert len(crit) == 1 and labels_at(t, crit[0]) == ["1", "2"]
    S2 = P("wwwbb")
    t2 = tree(S2, "12")
    assert not any(is_critical_vertex(t2, v) for v in t2.vertices)


@pytest.mark.parametrize("word", stable_words(4, 6, min_white=3))
def test_critical_branch_shape(word):
    S = P(word)
    for tau in all_trees(S):
        for a in (i for i in range(len(S)) if S.is_white(i)):
            cb = critical_branch(tau, a)
            assert all(len(v) == 3 for v in cb.path[:-1])
            if len(tau.vertex_of_label(a)) >= 4:
                assert cb.length == 0
            whites = tau.n_white_flags(cb.path[-1])
            assert cb.terminal_type == ("I" if whites == 2 else "II")


# -- modular graphs ------------------------------------------------------------------

@pytest.mark.parametrize("word", ["wwwww", "wbwwb", "wwbbbw"])
def test_modular_graph_roundtrip(word):
    S = P(word)
    for tau in all_trees(S):
        g = ModularGraph.from_tree(tau)
        assert g.is_valid() and g.is_tree() and g.is_painted_stable()
        assert g.to_tree() == tau


def test_modular_graph_loop_and_genus():
    S = PaintedSet.from_pairs([("x", "b")])
    g = ModularGraph(S, (0,), {0: 0, 1: 0, 2: 0}, {0: 1, 1: 0, 2: 2}, {2: "x"})
    assert g.is_valid() and g.is_connected()
    assert g.first_betti() == 1 and g.total_genus() == 1 and not g.is_tree()
    assert g.is_painted_stable()
    with pytest.raises(ValueError):
        g.to_tree()
    bad = ModularGraph(S, (0,), {0: 0, 1: 0}, {0: 1, 1: 1}, {})
    assert not bad.is_valid()
