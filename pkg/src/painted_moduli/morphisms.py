"""Class-level maps: repainting pushforward and pullback, divisor pushforward, boundary pushforward.

The pushforward along "repaint the white label a black" is defined on good
monomials by recursion on the length of the critical branch of a:

* terminal vertex of type I: the class goes to zero;
* length 0, type II: the same tree over the repainted set;
* length n >= 1, type II: collapse the last edge of the critical branch to a
  vertex u, write the standard relation at u for the flags (I, J, K, L) and
  solve it for the original tree; every other term has a shorter branch.

All images are normal forms over the target ring, so "equal modulo the
ideal" becomes equality of normal forms.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Mapping

from .algebra import (
    RingElement,
    StandardRelation,
    monomial_of_tree,
    relation_expansion,
    ring,
)
from .core import (
    BLACK,
    WHITE,
    Label,
    PaintedSet,
    TwoPartition,
    bits,
    canonical_mask,
    is_stable_painted_set,
    lowest_bit,
    mask_is_stable,
    popcount,
)
from .linalg import RowReducer, add_scaled
from .trees import PaintedTree, Vertex, branch_is_white, check_tree, critical_branch


class RecursionContractError(AssertionError):
    """The repainting recursion left the expected case analysis."""


@dataclass
class TraceNode:
    tree: str
    tag: str                      # "typeI", "base" or "recurse"
    length: int
    flags: tuple = ()
    children: list = field(default_factory=list)

    def render(self, indent: int = 0) -> str:
        head = "  " * indent + f"{self.tree}  [{self.tag}, l={self.length}"
        head += f", IJKL={','.join(self.flags)}]" if self.flags else "]"
        return "\n".join([head] + [c.render(indent + 1) for c in self.children])


class RepaintContext:
    """Repainting of one white label: source and target sets, memo table and choice log."""

    def __init__(self, source: PaintedSet, a: str | int, trace: bool = False):
        self.source = source
        self.a = source.index(a)
        if not source.is_white(self.a):
            raise ValueError("the repainted label must be white")
        self.target = source.repainted(self.a, BLACK)
        if not is_stable_painted_set(self.target):
            raise ValueError(f"repainted set {self.target.word!r} is not stable "
                             "(at least three white labels are needed)")
        self.memo: dict = {}
        self.choices: list = []
        self.trace = trace
        self.traces: dict = {}
        self._lock = threading.Lock()

    @property
    def source_ring(self):
        return ring(self.source)

    @property
    def target_ring(self):
        return ring(self.target)

    def flag_text(self, branch: int) -> str:
        if popcount(branch) == 1:
            return self.source.labels[lowest_bit(branch)].name
        return "e" + self.source.mask_text(branch)

    # -- recursion data -----------------------------------------------------------

    def collapse_data(self, tau: PaintedTree):
        """Critical branch, collapsed tree, vertex u and the flags I, J and white candidates for K, L."""
        cb = critical_branch(tau, self.a)
        n = cb.length
        full = self.source.full
        v_last, w = cb.path[n - 1], cb.path[n]
        X = cb.edges[n - 1]
        I = (1 << self.a) if n == 1 else full ^ cb.edges[n - 2]
        (J,) = [b for b in v_last if b not in (I, X)]
        if branch_is_white(self.source, J):
            raise RecursionContractError("critical vertex without a black flag")
        candidates = sorted((b for b in w if b != full ^ X and branch_is_white(self.source, b)),
                            key=lowest_bit)
        sigma = PaintedTree(self.source, tau.splits - {canonical_mask(full, X)})
        u = tuple(sorted([b for b in v_last if b != X] + [b for b in w if b != full ^ X],
                         key=lowest_bit))
        if u not in sigma.vertices:
            raise RecursionContractError("collapsed vertex not found")
        return cb, sigma, u, I, J, candidates

    def image_vector(self, tau: PaintedTree, choice: tuple | None = None) -> dict:
        """Normal-form image of m(tau) as {monomial over the target: coefficient}."""
        if choice is None:
            hit = self.memo.get(tau.splits)
            if hit is not None:
                return hit
        out, node = self._compute(tau, choice)
        if choice is None:
            with self._lock:
                prev = self.memo.setdefault(tau.splits, out)
                if prev != out:
                    raise RecursionContractError("memo table holds two different images")
                if self.trace:
                    self.traces[tau.splits] = node
        return out

    def _compute(self, tau: PaintedTree, choice: tuple | None):
        cb = critical_branch(tau, self.a)
        node = TraceNode(str(tau), "", cb.length) if self.trace else None
        if cb.terminal_type == "I":
            if node:
                node.tag = "typeI"
            return {}, node
        if cb.length == 0:
            if node:
                node.tag = "base"
            image = RingElement(self.target, {monomial_of_tree(tau): 1}, good=True)
            return self.target_ring.normal_form(image).terms, node

        n = cb.length
        _, sigma, u, I, J, candidates = self.collapse_data(tau)
        if len(candidates) < 2:
            raise RecursionContractError("fewer than two white flags available for K, L")
        K, L = choice if choice is not None else candidates[:2]
        if choice is None:
            self.choices.append((tau.splits, (K, L)))
        if node:
            node.tag = "recurse"
            node.flags = tuple(self.flag_text(b) for b in (I, J, K, L))
        rel = relation_expansion(sigma, u, I, J, K, L)
        alpha0 = monomial_of_tree(tau)
        if rel.get(alpha0) != 1:
            raise RecursionContractError("the collapsed relation does not contain the tree with sign +1")
        out: dict = {}
        for m, sign in sorted(rel.items()):
            if m == alpha0:
                continue
            t = PaintedTree(self.source, frozenset(m))
            if critical_branch(t, self.a).length >= n:
                raise RecursionContractError(
                    f"critical branch length did not decrease: {t} from {tau}")
            add_scaled(out, self.image_vector(t), -sign)
            if node:
                node.children.append(self.traces.get(t.splits) or TraceNode(str(t), "memo", -1))
        return self.target_ring.normal_form(RingElement(self.target, out, good=True)).terms, node

    def image(self, tau: PaintedTree) -> RingElement:
        return RingElement(self.target, self.image_vector(tau), good=True)

    def trace_of(self, tau: PaintedTree) -> TraceNode:
        if not self.trace:
            raise ValueError("context was built without tracing")
        self.image_vector(tau)
        return self.traces[tau.splits]


def rho_pushforward(x: RingElement, ctx: RepaintContext) -> RingElement:
    if x.pset != ctx.source:
        raise ValueError("element does not live over the source painted set")
    if not x.good:
        x = ring(x.pset).reduce_to_good_basis(x)
    x.degree  # homogeneity
    out: dict = {}
    for m, c in x.terms.items():
        add_scaled(out, ctx.image_vector(PaintedTree(ctx.source, frozenset(m))), c)
    return ctx.target_ring.normal_form(RingElement(ctx.target, out, good=True))


def rho_pullback(x: RingElement, ctx: RepaintContext) -> RingElement:
    """Recolour the label a white on every tree; no normalisation."""
    if x.pset != ctx.target:
        raise ValueError("element does not live over the repainted set")
    if not x.good:
        x = ring(x.pset).reduce_to_good_basis(x)
    return RingElement(ctx.source, x.terms, good=True)


def rho_divisor_pushforward(sigma: TwoPartition, ctx: RepaintContext) -> RingElement:
    """Pushforward of a boundary divisor through the linear relation solved for it."""
    S, T = ctx.source, ctx.target
    if sigma.pset != S:
        raise ValueError("partition does not live over the source painted set")
    full, a = S.full, ctx.a
    TR = ctx.target_ring
    if _stable(T, sigma.mask):
        return TR.normal_form(RingElement(T, {(sigma.mask,): 1}, good=True))
    part = sigma.mask if sigma.mask >> a & 1 else full ^ sigma.mask
    rest = part & ~(1 << a)
    if rest & S.white_mask:
        raise RecursionContractError("unstable repaint with a white label beside a")
    if popcount(rest) >= 2:
        return RingElement.zero(T)
    b = lowest_bit(rest)
    other = full ^ part
    i, j = list(bits(other & S.white_mask))[:2]
    out: dict = {}
    for m in ctx.source_ring.generators:
        s_ij = (m >> i & 1) == (m >> j & 1)
        s_ab = (m >> a & 1) == (m >> b & 1)
        if s_ij and s_ab and (m >> i & 1) != (m >> a & 1):
            if m == sigma.mask:
                continue
            coeff = -1
        elif ((m >> a & 1) == (m >> j & 1) and (m >> i & 1) == (m >> b & 1)
              and (m >> a & 1) != (m >> i & 1)):
            coeff = 1
        else:
            continue
        term = TwoPartition(S, m)
        if not _stable(T, m):
            p = m if m >> a & 1 else full ^ m
            if popcount(p & ~(1 << a)) < 2 or p & S.white_mask & ~(1 << a):
                raise RecursionContractError(f"term {term} of the divisor relation is not resolved")
            continue
        add_scaled(out, {(m,): 1}, coeff)
    return TR.normal_form(RingElement(T, out, good=True))


def _stable(pset: PaintedSet, mask: int) -> bool:
    return mask_is_stable(pset.full, pset.white_mask, mask)


# -- boundary pushforward --------------------------------------------------------

def vertex_painted_set(tau: PaintedTree, v: Vertex) -> PaintedSet:
    """Flags at v as a painted set, in branch order: tails keep their names, edge-halves are white."""
    S = tau.pset
    labels = []
    for b in v:
        if popcount(b) == 1:
            labels.append(S.labels[lowest_bit(b)])
        else:
            labels.append(Label("e" + S.mask_text(b), WHITE))
    return PaintedSet(tuple(labels))


def _lift_vertex_split(v: Vertex, mask: int) -> int:
    return sum(v[k] for k in bits(mask))


def boundary_pushforward(trees: Mapping[Vertex, PaintedTree], tau: PaintedTree) -> RingElement:
    """Expand each vertex of tau into the given tree over its flags; good monomial of the result."""
    splits = set(tau.splits)
    full = tau.pset.full
    for v, sub in trees.items():
        if v not in tau.vertices:
            raise ValueError("not a vertex of the tree")
        if sub.pset != vertex_painted_set(tau, v):
            raise ValueError("vertex tree must live over the flags at the vertex")
        for m in sub.splits:
            splits.add(canonical_mask(full, _lift_vertex_split(v, m)))
    return RingElement.of_tree(check_tree(tau.pset, splits))


def push_vertex_class(x: RingElement, tau: PaintedTree, v: Vertex) -> RingElement:
    """Linear extension of :func:`boundary_pushforward` at one vertex (other vertices keep their fundamental class)."""
    F = vertex_painted_set(tau, v)
    if x.pset != F:
        raise ValueError("class must live over the flags at the vertex")
    out: dict = {}
    for m, c in x.terms.items():
        sub = PaintedTree(F, frozenset(m))
        add_scaled(out, boundary_pushforward({v: sub}, tau).terms, c)
    return RingElement(tau.pset, out, good=True)


# -- verification of the construction ------------------------------------------

def kl_choices(ctx: RepaintContext, tau: PaintedTree) -> list[tuple]:
    cb = critical_branch(tau, ctx.a)
    if cb.length == 0 or cb.terminal_type == "I":
        return []
    candidates = ctx.collapse_data(tau)[-1]
    return list(itertools.permutations(candidates, 2))


def welldefinedness_check(tau: PaintedTree, ctx: RepaintContext) -> bool:
    """Every admissible (K, L) gives the same class."""
    results = [ctx._compute(tau, c)[0] for c in kl_choices(ctx, tau)]
    return all(r == results[0] for r in results)


def relation_transport_check(R: StandardRelation, ctx: RepaintContext) -> bool:
    """The image of a standard relation over the source lies in the relation span over the target."""
    out: dict = {}
    for m, sign in R.expansion:
        add_scaled(out, ctx.image_vector(PaintedTree(ctx.source, frozenset(m))), sign)
    return ctx.target_ring.normal_form(RingElement(ctx.target, out, good=True)).is_zero()


def roundtrip_check(tau_target: PaintedTree, ctx: RepaintContext, normalize: bool = False) -> bool:
    x = RingElement.of_tree(tau_target)
    up = rho_pullback(x, ctx)
    if normalize:
        up = ctx.source_ring.normal_form(up)
    return rho_pushforward(up, ctx) == ctx.target_ring.normal_form(x)


def surjectivity_check(ctx: RepaintContext, d: int) -> bool:
    """Images of the degree-d good monomials span the degree-d piece over the target."""
    TR = ctx.target_ring
    if d > TR.top:
        return True
    idx = TR.tree_index(d)
    red = RowReducer()
    for tau in ctx.source_ring.trees(d):
        red.add({idx[m]: c for m, c in ctx.image_vector(tau).items()})
    return len(red) == TR.graded_dimension_good(d)


def divisor_consistency_check(sigma: TwoPartition, ctx: RepaintContext) -> bool:
    tau = PaintedTree(ctx.source, frozenset({sigma.mask}))
    return rho_divisor_pushforward(sigma, ctx) == ctx.image(tau)
