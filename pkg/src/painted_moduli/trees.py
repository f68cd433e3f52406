"""Painted modular graphs and genus-zero S-trees.

A genus-zero tree is stored as the set of 2-partitions cut out by its edges
(canonical masks, see :mod:`painted_moduli.core`).  Adjacency is rebuilt on
demand.  A vertex is described by its *branches*: for every flag at the
vertex, the set of labels reached by leaving the vertex through that flag.
A tail's branch is a singleton; an edge-half's branch has at least two
labels.  The branches of a vertex partition S, so the sorted branch tuple
identifies the vertex.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .core import (
    BLACK,
    WHITE,
    Color,
    Flag,
    PaintedSet,
    TwoPartition,
    VertexData,
    canonical_mask,
    is_stable_painted_set,
    lowest_bit,
    mask_is_stable,
    popcount,
    stable_partition_masks,
    vertex_painted_stable,
)

Vertex = tuple  # sorted tuple of branch masks


def masks_compatible(full: int, p: int, q: int) -> bool:
    """Two canonical split masks can coexist in one tree."""
    return (p & q) == p or (p & q) == q or (p | q) == full


def is_compatible(sigma: TwoPartition, other: TwoPartition) -> bool:
    if sigma.pset != other.pset:
        raise ValueError("partitions of different painted sets")
    return masks_compatible(sigma.pset.full, sigma.mask, other.mask)


def branch_is_white(pset: PaintedSet, branch: int) -> bool:
    return popcount(branch) >= 2 or bool(branch & pset.white_mask)


def _sort_branches(branches: Iterable[int]) -> Vertex:
    return tuple(sorted(branches, key=lowest_bit))


def build_vertices(full: int, splits: Iterable[int]) -> list[Vertex]:
    """Vertices of the tree with the given (compatible, canonical) splits."""
    clusters = sorted((full ^ m for m in splits), key=popcount)
    # parent of a cluster: the smallest split-cluster strictly containing it
    children: dict[int, list[int]] = {c: [] for c in clusters}
    root: list[int] = [1]
    leaves = [1 << i for i in range(1, full.bit_length())]
    for c in leaves + clusters:
        parent = None
        for d in clusters:
            if d != c and d & c == c:
                parent = d
                break
        (children[parent] if parent is not None else root).append(c)
    verts = [_sort_branches(root)]
    for c in clusters:
        verts.append(_sort_branches([full ^ c] + children[c]))
    return sorted(verts)


@dataclass(frozen=True)
class PaintedTree:
    """A painted stable genus-zero S-tree, up to S-isomorphism."""

    pset: PaintedSet
    splits: frozenset

    @classmethod
    def one_vertex(cls, pset: PaintedSet) -> "PaintedTree":
        return cls(pset, frozenset())

    @cached_property
    def vertices(self) -> list[Vertex]:
        return build_vertices(self.pset.full, self.splits)

    @cached_property
    def key(self) -> tuple:
        return (len(self.splits), tuple(sorted(self.splits)))

    @property
    def n_edges(self) -> int:
        return len(self.splits)

    @property
    def edges(self) -> list[int]:
        return sorted(self.splits)

    def __lt__(self, other: "PaintedTree") -> bool:
        return self.key < other.key

    def vertex_with_branch(self, branch: int) -> Vertex:
        for v in self.vertices:
            if branch in v:
                return v
        raise KeyError(branch)

    def vertex_of_label(self, i: int) -> Vertex:
        return self.vertex_with_branch(1 << i)

    def across(self, v: Vertex, branch: int) -> Vertex:
        """The neighbour of ``v`` reached through the edge-half ``branch``."""
        if popcount(branch) < 2:
            raise ValueError("a tail does not lead to another vertex")
        return self.vertex_with_branch(self.pset.full ^ branch)

    def flag_colors(self, v: Vertex) -> list[Color]:
        return [WHITE if branch_is_white(self.pset, b) else BLACK for b in v]

    def n_white_flags(self, v: Vertex) -> int:
        return sum(1 for b in v if branch_is_white(self.pset, b))

    def vertex_data(self, v: Vertex) -> VertexData:
        flags = []
        for b in v:
            if popcount(b) >= 2:
                flags.append(Flag.edge_half())
            else:
                i = lowest_bit(b)
                flags.append(Flag(self.pset.color(i), self.pset.labels[i].name))
        return VertexData(0, tuple(flags))

    def vertex_stable(self, v: Vertex) -> bool:
        return len(v) >= 3 and self.n_white_flags(v) >= 2

    def with_pset(self, pset: PaintedSet) -> "PaintedTree":
        return PaintedTree(pset, self.splits)

    def partitions(self) -> list[TwoPartition]:
        return [TwoPartition(self.pset, m) for m in self.edges]

    def __str__(self) -> str:
        if not self.splits:
            return "*"
        return ";".join(str(p) for p in self.partitions())


def canonical_key(tau: PaintedTree) -> tuple:
    return tau.key


def check_tree(pset: PaintedSet, splits: Iterable[int]) -> PaintedTree:
    """Validate a split set and return the tree it determines."""
    full, white = pset.full, pset.white_mask
    splits = list(splits)
    canon = [canonical_mask(full, m) for m in splits]
    if len(set(canon)) != len(canon):
        raise ValueError("duplicate partitions")
    for m in canon:
        if not 0 < m < full:
            raise ValueError("empty part in partition")
        if not mask_is_stable(full, white, m):
            raise ValueError(f"unstable partition {TwoPartition(pset, m)}")
    for p, q in itertools.combinations(canon, 2):
        if not masks_compatible(full, p, q):
            raise ValueError(f"incompatible partitions {TwoPartition(pset, p)} "
                             f"and {TwoPartition(pset, q)}")
    tau = PaintedTree(pset, frozenset(canon))
    for v in tau.vertices:
        if not tau.vertex_stable(v):
            raise ValueError(f"reconstructed tree has an unstable vertex {v}")
    return tau


def tree_from_partitions(parts: Iterable[TwoPartition], pset: PaintedSet | None = None) -> PaintedTree:
    parts = list(parts)
    if pset is None:
        if not parts:
            raise ValueError("painted set required for the empty partition set")
        pset = parts[0].pset
    if any(p.pset != pset for p in parts):
        raise ValueError("partitions over different painted sets")
    return check_tree(pset, [p.mask for p in parts])


def partitions_of_tree(tau: PaintedTree) -> set[TwoPartition]:
    return set(tau.partitions())


# -- enumeration ----------------------------------------------------------------

def _compatible_subsets(full: int, masks: Sequence[int], d: int):
    """d-element pairwise compatible subsets of ``masks``, lexicographic in index."""
    n = len(masks)
    compat = [[masks_compatible(full, masks[i], masks[j]) for j in range(n)] for i in range(n)]

    def extend(chosen: list[int], start: int):
        if len(chosen) == d:
            yield tuple(masks[i] for i in chosen)
            return
        for i in range(start, n - (d - len(chosen)) + 1):
            if all(compat[i][j] for j in chosen):
                chosen.append(i)
                yield from extend(chosen, i + 1)
                chosen.pop()

    yield from extend([], 0)


def enumerate_stable_trees(S: PaintedSet, d: int) -> list[PaintedTree]:
    if not is_stable_painted_set(S):
        raise ValueError(f"painted set {S.word!r} is not stable")
    if not 0 <= d <= len(S) - 3:
        raise ValueError(f"edge count {d} outside 0..{len(S) - 3}")
    out = []
    for subset in _compatible_subsets(S.full, stable_partition_masks(S), d):
        tau = PaintedTree(S, frozenset(subset))
        if all(tau.vertex_stable(v) for v in tau.vertices):
            out.append(tau)
    return sorted(out)


def stable_vertex_splits(pset: PaintedSet, v: Vertex) -> list[int]:
    """Unions of branches on the side containing ``v[0]``, one per stable 2-partition of the flags at v.

    Each side must keep at least two flags, one of them white; the new
    edge-half is white, so each new vertex is then stable.
    """
    k = len(v)
    white = [branch_is_white(pset, b) for b in v]
    out = []
    for sub in range(1, 1 << (k - 1)):
        group = (sub << 1) | 1          # flag 0 always on this side
        if group == (1 << k) - 1:
            continue
        side = [i for i in range(k) if group >> i & 1]
        rest = [i for i in range(k) if not group >> i & 1]
        if len(side) < 2 or len(rest) < 2:
            continue
        if not any(white[i] for i in side) or not any(white[i] for i in rest):
            continue
        out.append(sum(v[i] for i in side))
    return out


def insert_edge(tau: PaintedTree, v: Vertex, side: Iterable[int]) -> PaintedTree:
    """Split vertex ``v`` into two, the flags (branches) in ``side`` going to one new vertex."""
    side = set(side)
    if v not in tau.vertices:
        raise ValueError("vertex not in tree")
    if not side <= set(v):
        raise ValueError("side must consist of flags at the vertex")
    rest = [b for b in v if b not in side]
    for group in (side, rest):
        if len(group) < 2 or not any(branch_is_white(tau.pset, b) for b in group):
            raise ValueError("insertion creates an unstable vertex")
    new = canonical_mask(tau.pset.full, sum(side))
    return PaintedTree(tau.pset, tau.splits | {new})


def collapse_edge(tau: PaintedTree, e: int | TwoPartition) -> PaintedTree:
    m = e.mask if isinstance(e, TwoPartition) else canonical_mask(tau.pset.full, e)
    if m not in tau.splits:
        raise ValueError("edge not in tree")
    return PaintedTree(tau.pset, tau.splits - {m})


def graft(tau1: PaintedTree, s: str | int, tau2: PaintedTree, t: str | int) -> PaintedTree:
    """Clutch two trees by joining the white tails ``s`` of tau1 and ``t`` of tau2 into an edge.

    Labels of the result: those of tau1 without ``s`` followed by those of tau2
    without ``t``.
    """
    S1, S2 = tau1.pset, tau2.pset
    i, j = S1.index(s), S2.index(t)
    if not (S1.is_white(i) and S2.is_white(j)):
        raise ValueError("only white points can be glued")
    left = [lab for k, lab in enumerate(S1.labels) if k != i]
    right = [lab for k, lab in enumerate(S2.labels) if k != j]
    S = PaintedSet(tuple(left + right))  # raises on name collision
    nl = len(left)

    def lift1(mask: int) -> int:
        out = 0
        for pos, k in enumerate(k for k in range(len(S1)) if k != i):
            if mask >> k & 1:
                out |= 1 << pos
        return out

    def lift2(mask: int) -> int:
        out = 0
        for pos, k in enumerate(k for k in range(len(S2)) if k != j):
            if mask >> k & 1:
                out |= 1 << (nl + pos)
        return out

    right_all = S.full ^ ((1 << nl) - 1)
    splits = set()
    for m in tau1.splits:
        part = m if not m >> i & 1 else S1.full ^ m    # side without s
        splits.add(canonical_mask(S.full, lift1(part)))
    for m in tau2.splits:
        part = m if not m >> j & 1 else S2.full ^ m    # side without t
        splits.add(canonical_mask(S.full, lift2(part)))
    splits.add(canonical_mask(S.full, right_all))
    return check_tree(S, splits)


# -- stabilization ---------------------------------------------------------------

class _Graph:
    """Mutable adjacency form of a tree, used while contracting unstable vertices."""

    def __init__(self, tau: PaintedTree):
        self.pset = tau.pset
        verts = tau.vertices
        index = {v: n for n, v in enumerate(verts)}
        self.tails: dict[int, set[int]] = {n: set() for n in index.values()}
        self.nbrs: dict[int, set[int]] = {n: set() for n in index.values()}
        for v, n in index.items():
            for b in v:
                if popcount(b) == 1:
                    self.tails[n].add(lowest_bit(b))
                else:
                    other = index[tau.vertex_with_branch(tau.pset.full ^ b)]
                    self.nbrs[n].add(other)

    def side(self, n: int, avoid: int) -> int:
        """Labels reachable from n without passing through ``avoid``."""
        seen, stack, mask = {n, avoid}, [n], 0
        while stack:
            x = stack.pop()
            for t in self.tails[x]:
                mask |= 1 << t
            for y in self.nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return mask

    def branches(self, n: int) -> list[int]:
        return [1 << t for t in self.tails[n]] + [self.side(y, n) for y in self.nbrs[n]]

    def key(self, n: int) -> tuple:
        return tuple(sorted(lowest_bit(b) if b else -1 for b in self.branches(n)))

    def stable(self, n: int) -> bool:
        white = self.pset.white_mask
        n_flags = len(self.tails[n]) + len(self.nbrs[n])
        n_white = sum(1 for t in self.tails[n] if white >> t & 1) + len(self.nbrs[n])
        return n_flags >= 3 and n_white >= 2

    def contract(self, n: int, m: int):
        """Merge vertex m into n along their edge."""
        self.nbrs[n].discard(m)
        self.nbrs[m].discard(n)
        self.tails[n] |= self.tails.pop(m)
        for y in self.nbrs.pop(m):
            self.nbrs[y].discard(m)
            self.nbrs[y].add(n)
            self.nbrs[n].add(y)

    def stabilize(self, rng: random.Random | None = None):
        white = self.pset.white_mask
        while True:
            bad = [n for n in self.tails if not self.stable(n)]
            if not bad or len(self.tails) == 1:
                return
            if rng is None:
                n = min(bad, key=self.key)
                nbrs = sorted(self.nbrs[n],
                              key=lambda y: (-popcount(self.side(y, n) & white),
                                             lowest_bit(self.side(y, n))))
            else:
                n = rng.choice(sorted(bad))
                nbrs = sorted(self.nbrs[n])
                rng.shuffle(nbrs)
            self.contract(nbrs[0], n)

    def to_tree(self) -> PaintedTree:
        full = self.pset.full
        splits = set()
        for n in self.nbrs:
            for y in self.nbrs[n]:
                splits.add(canonical_mask(full, self.side(n, y)))
        return check_tree(self.pset, splits)


def _restrict(tau: PaintedTree, keep: list[int], target: PaintedSet) -> PaintedTree:
    """Re-index a tree's graph onto the kept labels (tails not kept are removed)."""
    g = _Graph(tau)
    pos = {old: new for new, old in enumerate(keep)}
    for n in g.tails:
        g.tails[n] = {pos[t] for t in g.tails[n] if t in pos}
    g.pset = target
    return g


def forget_and_stabilize(tau: PaintedTree, drop: Iterable[str | int],
                         rng: random.Random | None = None) -> PaintedTree:
    S = tau.pset
    dropped = {S.index(x) for x in drop}
    keep = [i for i in range(len(S)) if i not in dropped]
    target = PaintedSet(tuple(S.labels[i] for i in keep))
    if not is_stable_painted_set(target):
        raise ValueError(f"target painted set {target.word!r} is not stable")
    if not dropped:
        return tau
    g = _restrict(tau, keep, target)
    g.stabilize(rng)
    return g.to_tree()


def forget_by_restriction(tau: PaintedTree, drop: Iterable[str | int]) -> PaintedTree:
    """Forgetful map computed on edge partitions: restrict, discard unstable and duplicate cuts."""
    S = tau.pset
    dropped = {S.index(x) for x in drop}
    keep = [i for i in range(len(S)) if i not in dropped]
    target = PaintedSet(tuple(S.labels[i] for i in keep))
    if not is_stable_painted_set(target):
        raise ValueError(f"target painted set {target.word!r} is not stable")
    splits = set()
    for m in tau.splits:
        r = sum(1 << new for new, old in enumerate(keep) if m >> old & 1)
        if 0 < r < target.full:
            r = canonical_mask(target.full, r)
            if mask_is_stable(target.full, target.white_mask, r):
                splits.add(r)
    return check_tree(target, splits)


def repaint_and_stabilize(tau: PaintedTree, a: str | int,
                          rng: random.Random | None = None) -> PaintedTree:
    S = tau.pset
    i = S.index(a)
    if not S.is_white(i):
        raise ValueError("only a white label can be repainted")
    target = S.repainted(i, BLACK)
    if not is_stable_painted_set(target):
        raise ValueError(f"target painted set {target.word!r} is not stable")
    g = _restrict(tau, list(range(len(S))), target)
    g.stabilize(rng)
    return g.to_tree()


# -- critical branches ---------------------------------------------------------

def is_critical_vertex(tau: PaintedTree, v: Vertex) -> bool:
    return len(v) == 3 and tau.n_white_flags(v) == 2


@dataclass(frozen=True)
class CriticalBranch:
    length: int
    path: tuple            # vertices v_0 .. v_n
    edges: tuple           # branch at v_i pointing to v_{i+1}, for i < n
    terminal_type: str     # "I" or "II"


def critical_branch(tau: PaintedTree, a: str | int) -> CriticalBranch:
    S = tau.pset
    i = S.index(a)
    if not S.is_white(i):
        raise ValueError("the repainted label must be white")
    v = tau.vertex_of_label(i)
    incoming = 1 << i
    path, edges = [v], []
    while is_critical_vertex(tau, v):
        nxt = [b for b in v if b != incoming and branch_is_white(S, b)]
        (out,) = nxt
        if popcount(out) < 2:
            raise ValueError("critical branch does not terminate; "
                             "at least three white labels are required")
        edges.append(out)
        v = tau.across(v, out)
        incoming = S.full ^ out
        path.append(v)
    n_white = tau.n_white_flags(v)
    return CriticalBranch(len(edges), tuple(path), tuple(edges), "II" if n_white >= 3 else "I")


# -- general modular graphs -----------------------------------------------------

@dataclass(frozen=True)
class ModularGraph:
    """A painted modular graph (V, F, boundary, involution) with genus and tail labels.

    Only validity and stability checks live here; the algebra works with
    :class:`PaintedTree`.
    """

    pset: PaintedSet
    vertices: tuple
    boundary: Mapping           # flag -> vertex
    involution: Mapping         # flag -> flag
    tail_labels: Mapping        # tail flag -> label name
    genus: Mapping = field(default_factory=dict)   # vertex -> genus (default 0)

    @property
    def flags(self) -> tuple:
        return tuple(sorted(self.boundary))

    @property
    def tails(self) -> list:
        return [f for f in self.flags if self.involution[f] == f]

    @property
    def edges(self) -> list:
        return sorted({tuple(sorted((f, self.involution[f])))
                       for f in self.flags if self.involution[f] != f})

    def flags_at(self, v) -> list:
        return [f for f in self.flags if self.boundary[f] == v]

    def is_valid(self) -> bool:
        if set(self.involution) != set(self.boundary):
            return False
        if any(self.involution[self.involution[f]] != f for f in self.flags):
            return False
        if any(v not in self.vertices for v in self.boundary.values()):
            return False
        if set(self.tail_labels) != set(self.tails):
            return False
        names = sorted(self.tail_labels.values())
        return names == sorted(self.pset.names)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj = {v: set() for v in self.vertices}
        for f, g in self.edges:
            adj[self.boundary[f]].add(self.boundary[g])
            adj[self.boundary[g]].add(self.boundary[f])
        seen, stack = {self.vertices[0]}, [self.vertices[0]]
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)

    def first_betti(self) -> int:
        """rk H_1 of a connected graph."""
        return len(self.edges) - len(self.vertices) + 1

    def total_genus(self) -> int:
        return sum(self.genus.get(v, 0) for v in self.vertices) + self.first_betti()

    def is_tree(self) -> bool:
        return self.is_connected() and self.first_betti() == 0

    def vertex_data(self, v) -> VertexData:
        flags = []
        for f in self.flags_at(v):
            if f in self.tail_labels:
                name = self.tail_labels[f]
                flags.append(Flag(self.pset.color(self.pset.index(name)), name))
            else:
                flags.append(Flag.edge_half())
        return VertexData(self.genus.get(v, 0), tuple(flags))

    def is_painted_stable(self) -> bool:
        return (self.is_valid() and self.is_connected()
                and all(vertex_painted_stable(self.vertex_data(v)) for v in self.vertices))

    @classmethod
    def from_tree(cls, tau: PaintedTree) -> "ModularGraph":
        verts = tau.vertices
        vid = {v: n for n, v in enumerate(verts)}
        boundary, tail_labels, half = {}, {}, {}
        f = 0
        for v in verts:
            for b in v:
                boundary[f] = vid[v]
                if popcount(b) == 1:
                    tail_labels[f] = tau.pset.labels[lowest_bit(b)].name
                half[(vid[v], b)] = f
                f += 1
        involution = {}
        for (n, b), fl in half.items():
            if popcount(b) == 1:
                involution[fl] = fl
            else:
                other = vid[tau.vertex_with_branch(tau.pset.full ^ b)]
                involution[fl] = half[(other, tau.pset.full ^ b)]
        return cls(tau.pset, tuple(range(len(verts))), boundary, involution, tail_labels)

    def to_tree(self) -> PaintedTree:
        """Genus-zero trees only: cut every edge to recover the split set."""
        if not self.is_tree() or any(self.genus.get(v, 0) for v in self.vertices):
            raise ValueError("only genus-zero trees convert to PaintedTree")
        S = self.pset
        splits = []
        for f, g in self.edges:
            start, blocked = self.boundary[f], self.boundary[g]
            seen, stack, mask = {start, blocked}, [start], 0
            while stack:
                x = stack.pop()
                for fl in self.flags_at(x):
                    if fl in self.tail_labels:
                        mask |= 1 << S.index(self.tail_labels[fl])
                    elif (fl, self.involution[fl]) != (f, g) and (self.involution[fl], fl) != (f, g):
                        y = self.boundary[self.involution[fl]]
                        if y not in seen:
                            seen.add(y)
                            stack.append(y)
            splits.append(canonical_mask(S.full, mask))
        return check_tree(S, splits)
