"""Command-line interface.

Exit codes: 0 success, 1 internal assertion (a contract check failed), 2 user error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .algebra import RingElement, monomial_text, ring
from .cache import cache_enumeration
from .core import PaintedSet, enumerate_stable_partitions, is_stable_painted_set
from .formats import (
    HilbertSeries,
    ParseError,
    element_from_json,
    element_to_json,
    export,
    is_default_named,
    painted_set_from_json,
    painted_set_text,
    parse_painted_set,
    parse_ring_element,
    parse_tree,
    tree_to_dot,
    tree_to_json,
)
from .morphisms import RepaintContext, rho_pushforward
from .trees import PaintedTree, forget_and_stabilize, graft, repaint_and_stabilize
from .verify import UnstableSet, run_verify


class UserError(Exception):
    pass


def _stable_set(text: str) -> PaintedSet:
    S = parse_painted_set(text)
    if not is_stable_painted_set(S):
        raise UserError("fewer than two white labels" if S.n_white < 2 else "fewer than three labels")
    return S


def _renumbered(tau: PaintedTree) -> PaintedTree:
    return PaintedTree(PaintedSet.from_word(tau.pset.word), tau.splits)


def _emit_tree(tau: PaintedTree, fmt: str | None) -> str:
    if fmt == "json":
        return export(tau, "json").decode()
    if fmt == "dot":
        return tree_to_dot(tau)
    if fmt is not None:
        raise UserError(f"format {fmt} is not available for trees")
    return f"set {painted_set_text(tau.pset)}\ntree {tau}\n"


def _emit_element(x: RingElement, fmt: str | None) -> str:
    if fmt == "json":
        return export(x, "json").decode()
    if fmt is not None:
        raise UserError(f"format {fmt} is not available for ring elements")
    return f"{x}\n"


def _degree(S: PaintedSet, d: int | None) -> int:
    if d is None:
        raise UserError("this command needs --degree")
    if not 0 <= d <= len(S) - 3:
        raise UserError(f"degree {d} outside 0..{len(S) - 3}")
    return d


# -- commands ----------------------------------------------------------------------

def cmd_partitions(args) -> str:
    S = _stable_set(args.set)
    parts = enumerate_stable_partitions(S)
    if args.format in ("json", "csv"):
        return export(parts, args.format).decode()
    if args.format is not None:
        raise UserError("partitions support json and csv output")
    return "".join(f"{p}\n" for p in parts)


def cmd_trees(args) -> str:
    S = _stable_set(args.set)
    d = _degree(S, args.degree)
    trees = cache_enumeration(S, d, args.cache_dir, use_cache=not args.no_cache)
    if args.format == "json":
        return export({"set": painted_set_text(S), "degree": d,
                       "trees": [tree_to_json(t)["partitions"] for t in trees]}, "json").decode()
    if args.format == "dot":
        return "".join(tree_to_dot(t) for t in trees)
    if args.format == "csv":
        return "tree\n" + "".join(f"{t}\n" for t in trees)
    return "".join(f"{t}\n" for t in trees)


def cmd_betti(args) -> str:
    S = _stable_set(args.set)
    R = ring(S)
    degrees = range(R.top + 1)
    good = [R.graded_dimension_good(d) for d in degrees] if args.backend in ("good", "both") else None
    oracle = [R.graded_dimension_oracle(d) for d in degrees] if args.backend in ("oracle", "both") else None
    if good is not None and oracle is not None and good != oracle:
        raise AssertionError(f"backends disagree: good {good}, oracle {oracle}")
    dims = good if good is not None else oracle
    h = HilbertSeries(S.word, tuple(dims))
    if args.format in ("json", "csv"):
        return export(h, args.format).decode()
    if args.format is not None:
        raise UserError("betti supports json and csv output")
    return " ".join(map(str, dims)) + "\n"


def _read_element(S: PaintedSet, text: str) -> RingElement:
    text = text.strip()
    x = element_from_json(json.loads(text), S) if text.startswith("{") else parse_ring_element(S, text)
    return x if x.good else ring(S).reduce_to_good_basis(x)


def cmd_multiply(args) -> str:
    S = _stable_set(args.set)
    x, y = (_read_element(S, t) for t in (args.x, args.y))
    return _emit_element(ring(S).multiply(x, y), args.format)


def _load_doc(text: str):
    if text == "-":
        text = sys.stdin.read()
    elif not text.lstrip().startswith("{") and Path(text).is_file():
        text = Path(text).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UserError(f"invalid JSON: {exc}") from None


def cmd_repaint_class(args) -> str:
    if args.request is not None:
        doc = _load_doc(args.request)
        try:
            source, label, cls = doc["source"], str(doc["repaint"]), doc["class"]
        except (KeyError, TypeError):
            raise UserError('request must have "source", "repaint" and "class"') from None
        S = painted_set_from_json(source)
    else:
        if args.set is None or args.repaint is None or args.element is None:
            raise UserError("give a JSON request, or --set, --repaint and --class")
        S, label, cls = parse_painted_set(args.set), args.repaint, args.element
    if not is_stable_painted_set(S):
        raise UserError("fewer than two white labels")
    try:
        ctx = RepaintContext(S, label, trace=args.trace)
    except KeyError as exc:
        raise UserError(str(exc)) from None
    x = element_from_json(cls, S) if isinstance(cls, dict) else _read_element(S, str(cls))
    y = rho_pushforward(x, ctx)
    out = _emit_element(y, args.format)
    if args.trace:
        for m, _ in x.sorted_terms():
            out += ctx.trace_of(PaintedTree(S, frozenset(m))).render() + "\n"
    return out


def cmd_repaint_tree(args) -> str:
    S = _stable_set(args.set)
    if args.repaint is None:
        raise UserError("repaint-tree needs --repaint")
    out = repaint_and_stabilize(parse_tree(S, args.tree), args.repaint)
    return _emit_tree(out, args.format)


def cmd_forget(args) -> str:
    S = _stable_set(args.set)
    drop = [x.strip() for x in args.drop.split(",") if x.strip()]
    out = forget_and_stabilize(parse_tree(S, args.tree), drop)
    if is_default_named(S):
        out = _renumbered(out)
    return _emit_tree(out, args.format)


def cmd_graft(args) -> str:
    S1, S2 = parse_painted_set(args.set1), parse_painted_set(args.set2)
    plain = is_default_named(S1) and is_default_named(S2)
    if plain:
        # word inputs share the names 1..n; give the second set fresh names
        S2 = PaintedSet.from_pairs((f"_{lab.name}", lab.color) for lab in S2)
    tau1, tau2 = parse_tree(S1, args.tree1), parse_tree(S2, args.tree2)
    t = f"_{args.t}" if plain else args.t
    out = graft(tau1, args.s, tau2, t)
    if plain:
        out = _renumbered(out)
    return _emit_tree(out, args.format)


def cmd_relations(args) -> str:
    S = _stable_set(args.set)
    d = args.degree
    if d is None or not 1 <= d <= len(S) - 3:
        raise UserError(f"relations need --degree in 1..{len(S) - 3}")
    rels = ring(S).standard_relations(d)
    flag = lambda b: S.mask_text(b) if b & (b - 1) else S.labels[b.bit_length() - 1].name  # noqa: E731
    if args.format == "json":
        return export([{"tree": str(r.tree), "vertex": [flag(b) for b in r.vertex],
                        "flags": [flag(b) for b in r.flags],
                        "expansion": element_to_json(r.element)["terms"]} for r in rels], "json").decode()
    if args.format is not None:
        raise UserError("relations support json output")
    lines = []
    for r in rels:
        lines.append(f"R({r.tree}; {','.join(flag(b) for b in r.flags)}) = "
                     + " ".join(f"{'+' if c > 0 else '-'}{monomial_text(S, m)}" for m, c in r.expansion))
    return "\n".join(lines) + ("\n" if lines else "")


def cmd_verify(args) -> str:
    S = parse_painted_set(args.set)
    try:
        report = run_verify(S, args.level, args.jobs)
    except UnstableSet as exc:
        raise UserError(str(exc)) from None
    args.exit_code = 0 if report["pass"] else 1
    return export(report, "json").decode()


def cmd_export(args) -> str:
    S = _stable_set(args.set)
    fmt = args.format or "json"
    kind = args.kind
    if kind == "tree":
        obj = parse_tree(S, args.arg or "*")
    elif kind == "partitions":
        obj = enumerate_stable_partitions(S)
    elif kind == "hilbert":
        obj = HilbertSeries(S.word, tuple(ring(S).hilbert_series()))
    else:
        if args.arg is None:
            raise UserError("export element needs the element text")
        obj = _read_element(S, args.arg)
    try:
        return export(obj, fmt).decode()
    except ValueError as exc:
        raise UserError(str(exc)) from None


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "dot", "csv"], default=None)
    common.add_argument("--cache-dir", default=None, help="tree enumeration cache directory")
    common.add_argument("--no-cache", action="store_true", help="bypass the enumeration cache")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="painted-moduli",
                                description="Rings of painted stable genus-zero curves.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("partitions", cmd_partitions, "list stable 2-partitions")
    sp.add_argument("set")
    sp = add("trees", cmd_trees, "list stable trees with a given number of edges")
    sp.add_argument("set")
    sp.add_argument("-d", "--degree", type=int)
    sp = add("betti", cmd_betti, "graded dimensions of the ring")
    sp.add_argument("set")
    sp.add_argument("--backend", choices=["good", "oracle", "both"], default="good")
    sp = add("multiply", cmd_multiply, "product of two classes")
    sp.add_argument("set")
    sp.add_argument("x")
    sp.add_argument("y")
    sp = add("repaint-class", cmd_repaint_class, "push a class forward along a repainting")
    sp.add_argument("request", nargs="?", help='JSON {"source","repaint","class"}, a file, or -')
    sp.add_argument("--set")
    sp.add_argument("--repaint")
    sp.add_argument("--class", dest="element")
    sp.add_argument("--trace", action="store_true", help="print the recursion tree")
    sp = add("repaint-tree", cmd_repaint_tree, "repaint a label black and stabilize a tree")
    sp.add_argument("set")
    sp.add_argument("tree")
    sp.add_argument("--repaint")
    sp = add("forget", cmd_forget, "forget labels and stabilize a tree")
    sp.add_argument("set")
    sp.add_argument("tree")
    sp.add_argument("--drop", required=True, help="comma separated label names")
    sp = add("graft", cmd_graft, "glue two trees along white tails")
    sp.add_argument("set1")
    sp.add_argument("tree1")
    sp.add_argument("s")
    sp.add_argument("set2")
    sp.add_argument("tree2")
    sp.add_argument("t")
    sp = add("relations", cmd_relations, "standard relations of a given degree")
    sp.add_argument("set")
    sp.add_argument("-d", "--degree", type=int)
    sp = add("verify", cmd_verify, "run the verification suites")
    sp.add_argument("set")
    sp.add_argument("--level", choices=["fast", "full"], default="fast")
    sp = add("export", cmd_export, "serialize a tree, partition list, Hilbert series or element")
    sp.add_argument("kind", choices=["tree", "partitions", "hilbert", "element"])
    sp.add_argument("set")
    sp.add_argument("arg", nargs="?")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.exit_code = 0
    try:
        out = args.func(args)
    except (UserError, ParseError, ValueError, KeyError, IndexError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return args.exit_code


if __name__ == "__main__":
    sys.exit(main())
