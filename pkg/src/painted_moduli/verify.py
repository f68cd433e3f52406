"""Verification driver: runs the invariant suites for one painted set and builds a report."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable

from .algebra import identity_arity, identity_holds, identity_instances, ring
from .core import PaintedSet, enumerate_stable_partitions, is_stable_painted_set, weighted_stability_sweep
from .morphisms import (
    RecursionContractError,
    RepaintContext,
    divisor_consistency_check,
    relation_transport_check,
    roundtrip_check,
    surjectivity_check,
    welldefinedness_check,
)
from .trees import critical_branch


class UnstableSet(ValueError):
    pass


def check_backends(S: PaintedSet, level: str) -> dict:
    R = ring(S)
    good = [R.graded_dimension_good(d) for d in range(R.top + 1)]
    oracle = [R.graded_dimension_oracle(d) for d in range(R.top + 1)]
    symmetric = good == good[::-1] and good[0] == 1
    return {"good": good, "oracle": oracle, "palindromic": symmetric,
            "pass": good == oracle and symmetric}


def check_identities(S: PaintedSet, level: str) -> dict:
    R = ring(S)
    degrees = range(R.top) if level == "full" else range(min(1, R.top))
    four = five = failures = 0
    for d in degrees:
        for tau in R.trees(d):
            for v in tau.vertices:
                for name, flags in identity_instances(tau, v):
                    if identity_arity(name) == 4:
                        four += 1
                    else:
                        five += 1
                    failures += not identity_holds(tau, v, name, flags)
    return {"four_flag": four, "five_flag": five, "failures": failures, "pass": failures == 0}


def check_relations_in_ideal(S: PaintedSet, level: str) -> dict:
    R = ring(S)
    checked = failures = 0
    for d in range(1, R.top + 1):
        for rel in R.standard_relations(d):
            checked += 1
            failures += not R.in_ideal(rel.element)
    return {"checked": checked, "failures": failures, "pass": failures == 0}


def repaint_report(S: PaintedSet, a: int) -> dict:
    """All repainting checks for one white label."""
    ctx = RepaintContext(S, a)
    counts = {k: [0, 0] for k in ("welldefined", "transport", "roundtrip", "surjective", "divisor")}
    contract_errors = []

    def run(name: str, fn: Callable[[], bool]):
        counts[name][0] += 1
        try:
            ok = fn()
        except RecursionContractError as exc:
            contract_errors.append(f"{name}: {exc}")
            ok = False
        counts[name][1] += not ok

    SR, TR = ctx.source_ring, ctx.target_ring
    for d in range(SR.top + 1):
        for tau in SR.trees(d):
            cb = critical_branch(tau, ctx.a)
            if cb.length >= 1 and cb.terminal_type == "II":
                run("welldefined", lambda: welldefinedness_check(tau, ctx))
    for d in range(1, SR.top + 1):
        for rel in SR.standard_relations(d):
            run("transport", lambda: relation_transport_check(rel, ctx))
    for d in range(TR.top + 1):
        for tau in TR.trees(d):
            run("roundtrip", lambda: roundtrip_check(tau, ctx))
        run("surjective", lambda: surjectivity_check(ctx, d))
    for sigma in enumerate_stable_partitions(S):
        run("divisor", lambda: divisor_consistency_check(sigma, ctx))
    failures = sum(f for _, f in counts.values())
    return {
        "label": S.labels[ctx.a].name,
        "checks": {k: {"checked": c, "failures": f} for k, (c, f) in counts.items()},
        "contract_errors": contract_errors,
        "pass": failures == 0 and not contract_errors,
    }


def check_weighted(S: PaintedSet, level: str) -> dict:
    trials = 100 if level == "full" else 10
    checked, bad = weighted_stability_sweep(trials=trials)
    return {"checked": checked, "discrepancies": len(bad), "examples": bad[:5], "pass": not bad}


SUITES = {
    "backends": check_backends,
    "identities": check_identities,
    "relations_in_ideal": check_relations_in_ideal,
    "weighted_stability": check_weighted,
}


def _run_item(item: tuple) -> dict:
    kind, S, arg = item
    if kind == "repaint":
        return repaint_report(S, arg)
    return SUITES[kind](S, arg)


def run_verify(S: PaintedSet, level: str = "fast", jobs: int = 1) -> dict:
    """Run every suite for S; the report's ``pass`` field is the overall verdict."""
    if level not in ("fast", "full"):
        raise ValueError(f"unknown level {level!r}")
    if not is_stable_painted_set(S):
        if S.n_white < 2:
            raise UnstableSet("fewer than two white labels")
        raise UnstableSet("fewer than three labels")
    items = [(name, S, level) for name in SUITES]
    whites = [i for i in range(len(S)) if S.is_white(i)]
    if S.n_white >= 3:
        for a in (whites if level == "full" else whites[:1]):
            items.append(("repaint", S, a))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_item, items))
    else:
        results = [_run_item(item) for item in items]
    report: dict = {"set": S.word, "level": level, "repaint": []}
    for (kind, _, _), res in zip(items, results):
        if kind == "repaint":
            report["repaint"].append(res)
        else:
            report[kind] = res
    report["dims"] = report["backends"]["good"]
    report["pass"] = all(r["pass"] for r in results)
    return report
