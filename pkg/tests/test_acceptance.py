"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``; the lines are also collected
into the "acceptance criteria" section of the terminal summary.
"""

import pytest

from conftest import P, stable_words
from oracles import compatible_sets, grow_trees
from painted_moduli.algebra import RingElement, graded_dimension_good, graded_dimension_oracle, ring
from painted_moduli.core import TwoPartition, enumerate_stable_partitions, weighted_stability_sweep
from painted_moduli.morphisms import RepaintContext, rho_divisor_pushforward
from painted_moduli.trees import enumerate_stable_trees, tree_from_partitions
from painted_moduli.verify import check_identities, check_relations_in_ideal, repaint_report

WORDS = stable_words(3, 6)


def test_criterion_1_backend_agreement(record):
    bad, pieces = [], 0
    for word in WORDS:
        S = P(word)
        for d in range(len(S) - 2):
            pieces += 1
            g, o = graded_dimension_good(S, d), graded_dimension_oracle(S, d)
            if g != o:
                bad.append((word, d, g, o))
    assert record(1, "backend agreement, 3 <= |S| <= 6", not bad,
                  f"{len(WORDS)} sets, {pieces} graded pieces, {len(bad)} mismatches")


@pytest.mark.slow
def test_criterion_1_backend_agreement_seven_white(record):
    S = P("wwwwwww")
    good = [graded_dimension_good(S, d) for d in range(5)]
    oracle = [graded_dimension_oracle(S, d) for d in range(5)]
    assert record(1, "backend agreement, wwwwwww (slow)", good == oracle, f"good {good}, oracle {oracle}")


CLASSICAL = {
    "wwww": [1, 1],
    "wwwww": [1, 5, 1],
    "wwwwww": [1, 16, 16, 1],
    "wwwb": [1, 1],
    "wwbb": [1, 1],
    "wwbbb": [1, 4, 1],
    "wwbbbb": [1, 11, 11, 1],
}


def test_criterion_2_classical_betti_values(record):
    got = {w: ring(P(w)).hilbert_series(check_oracle=True) for w in CLASSICAL}
    wrong = {w: h for w, h in got.items() if h != CLASSICAL[w]}
    assert record(2, "classical Betti values", not wrong,
                  "all 7 match" if not wrong else f"mismatches {wrong}")


def test_criterion_3_symmetry_and_normalization(record):
    bad = []
    for word in WORDS:
        h = ring(P(word)).hilbert_series(check_oracle=True)
        if h != h[::-1] or h[0] != 1 or h[-1] != 1 or len(h) != len(word) - 2:
            bad.append((word, h))
    assert record(3, "palindromic Hilbert series with h0 = hD = 1", not bad,
                  f"{len(WORDS)} sets, {len(bad)} failures")


def test_criterion_4_relation_identities(record):
    four = five = failures = 0
    for word in WORDS:
        rep = check_identities(P(word), "full")
        four += rep["four_flag"]
        five += rep["five_flag"]
        failures += rep["failures"]
    ok = failures == 0 and four > 0 and five > 0
    assert record(4, "relation identities, |S| <= 6", ok,
                  f"{four} four-flag and {five} five-flag instances, {failures} failures")


def test_criterion_5_standard_relations_in_ideal(record):
    checked = failures = 0
    for word in WORDS:
        rep = check_relations_in_ideal(P(word), "full")
        checked += rep["checked"]
        failures += rep["failures"]
    assert record(5, "standard relations lie in the ideal, |S| <= 6", failures == 0 and checked > 0,
                  f"{checked} relations, {failures} failures")


def test_criterion_6_repainting_contract(record):
    totals: dict = {}
    errors, runs, failing = [], 0, []
    for word in stable_words(4, 6, min_white=3):
        S = P(word)
        for a in range(len(S)):
            if not S.is_white(a):
                continue
            rep = repaint_report(S, a)
            runs += 1
            errors.extend(rep["contract_errors"])
            if not rep["pass"]:
                failing.append((word, a))
            for k, v in rep["checks"].items():
                c, f = totals.get(k, (0, 0))
                totals[k] = (c + v["checked"], f + v["failures"])
    detail = ", ".join(f"{k} {c}/{f}" for k, (c, f) in sorted(totals.items()))
    ok = not failing and not errors and all(c > 0 for c, _ in totals.values())
    assert record(6, "repainting contract (a)-(e), |S| <= 6", ok,
                  f"{runs} (S, a) pairs; checked/failed: {detail}; {len(errors)} descent assertions")


def test_criterion_7_divisor_specialization(record):
    S = P("wbwwb")
    ctx = RepaintContext(S, "1")
    T = ctx.target
    worked = rho_divisor_pushforward(TwoPartition(S, S.mask_of("12")), ctx)
    expected = ctx.target_ring.normal_form(
        RingElement.generator(TwoPartition(T, T.mask_of("23")))
        + RingElement.generator(TwoPartition(T, T.mask_of("235"))))
    worked_ok = worked == expected
    checked = failures = 0
    for word in stable_words(4, 6, min_white=3):
        S = P(word)
        for a in range(len(S)):
            if not S.is_white(a):
                continue
            ctx = RepaintContext(S, a)
            for sigma in enumerate_stable_partitions(S):
                checked += 1
                via_recursion = ctx.image(tree_from_partitions([sigma], S))
                failures += rho_divisor_pushforward(sigma, ctx) != via_recursion
    assert record(7, "divisor pushforward matches the recursion", worked_ok and failures == 0,
                  f"worked instance {'ok' if worked_ok else 'WRONG'}, {checked} partitions, {failures} failures")


def test_criterion_8_weighted_stability_sweep(record):
    checked, bad = weighted_stability_sweep(trials=100, max_flags=8, max_genus=2)
    assert record(8, "painted vs weighted stability sweep", not bad and checked > 0,
                  f"{checked} checks, {len(bad)} discrepancies")


def test_criterion_9_tree_layer(record):
    mismatched = []
    trees_seen = 0
    for word in stable_words(3, 7):
        S = P(word)
        enumerated = [enumerate_stable_trees(S, d) for d in range(len(S) - 2)]
        splits = [{t.splits for t in level} for level in enumerated]
        trees_seen += sum(map(len, splits))
        rebuilt = all(tree_from_partitions(t.partitions(), S) == t for level in enumerated for t in level)
        if not (rebuilt and splits == compatible_sets(S) == grow_trees(S)):
            mismatched.append(word)
    five = (len(enumerate_stable_trees(P("wwwww"), 1)), len(enumerate_stable_trees(P("wwwww"), 2)))
    ok = not mismatched and five == (10, 15)
    assert record(9, "tree reconstruction bijection, |S| <= 7", ok,
                  f"{trees_seen} trees, {len(mismatched)} mismatches, wwwww strata {five[0]}/{five[1]}")
