"""The polynomial ring on boundary generators, its Keel-type ideal, and the quotient ring.

Two independent backends compute the graded pieces of the quotient:

* the *oracle* works in the polynomial ring itself: all monomials of degree
  d modulo the degree-d piece of the ideal generated by the linear and the
  quadratic relations;
* the *good* backend works with good monomials (one per stable tree) modulo
  the standard relations obtained by inserting one edge at a vertex.

A monomial is a sorted tuple of canonical split masks (repetition allowed).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb
from typing import Iterable, Mapping

from .core import (
    PaintedSet,
    TwoPartition,
    allowed_quadruples,
    epsilon_mask,
    is_allowed_quadruple,
    is_stable_painted_set,
    quadruple_allowed_colors,
    stable_partition_masks,
)
from .linalg import RowReducer, SparseMatrix, add_scaled, quotient_dimension
from .trees import (
    PaintedTree,
    Vertex,
    branch_is_white,
    enumerate_stable_trees,
    stable_vertex_splits,
)

log = logging.getLogger(__name__)

Monomial = tuple


class InconsistentReduction(AssertionError):
    """A membership system that should be solvable was not."""


def monomial_of_tree(tau: PaintedTree) -> Monomial:
    return tuple(sorted(tau.splits))


def monomial_text(pset: PaintedSet, m: Monomial) -> str:
    if not m:
        return "[]"
    out = []
    for mask, group in itertools.groupby(m):
        k = len(list(group))
        out.append(f"[{TwoPartition(pset, mask)}]" + (f"^{k}" if k > 1 else ""))
    return "".join(out)


def _fraction_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class RingElement:
    """A finite Q-linear combination of monomials over one painted set.

    ``good`` records that the monomials are good monomials (square-free,
    pairwise compatible), i.e. coordinates over stable trees.
    """

    __slots__ = ("pset", "terms", "good")

    def __init__(self, pset: PaintedSet, terms: Mapping[Monomial, object] | None = None,
                 good: bool = False):
        self.pset = pset
        clean = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[tuple(sorted(m))] = clean.get(tuple(sorted(m)), 0) + c
        self.terms = {m: c for m, c in clean.items() if c}
        self.good = good

    @classmethod
    def unit(cls, pset: PaintedSet) -> "RingElement":
        return cls(pset, {(): 1}, good=True)

    @classmethod
    def zero(cls, pset: PaintedSet, good: bool = True) -> "RingElement":
        return cls(pset, {}, good=good)

    @classmethod
    def of_tree(cls, tau: PaintedTree, coeff=1) -> "RingElement":
        return cls(tau.pset, {monomial_of_tree(tau): coeff}, good=True)

    @classmethod
    def generator(cls, sigma: TwoPartition) -> "RingElement":
        return cls(sigma.pset, {(sigma.mask,): 1}, good=True)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {len(m) for m in self.terms}

    @property
    def degree(self) -> int | None:
        """Degree of a homogeneous element; None for zero; raises if inhomogeneous."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError("element is not homogeneous")
        return ds.pop()

    def _check(self, other: "RingElement"):
        if self.pset != other.pset:
            raise ValueError("elements over different painted sets")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        t = dict(self.terms)
        add_scaled(t, other.terms, 1)
        return RingElement(self.pset, t, self.good and other.good)

    def __sub__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        t = dict(self.terms)
        add_scaled(t, other.terms, -1)
        return RingElement(self.pset, t, self.good and other.good)

    def __neg__(self) -> "RingElement":
        return RingElement(self.pset, {m: -c for m, c in self.terms.items()}, self.good)

    def scale(self, c) -> "RingElement":
        c = Fraction(c)
        return RingElement(self.pset, {m: c * x for m, x in self.terms.items()}, self.good)

    def __mul__(self, other):
        if isinstance(other, RingElement):
            return multiply(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.pset == other.pset and self.terms == other.terms

    def __hash__(self):
        return hash((self.pset, frozenset(self.terms.items())))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def trees(self) -> list[tuple[PaintedTree, Fraction]]:
        if not self.good:
            raise ValueError("element is not in good-monomial coordinates")
        return [(PaintedTree(self.pset, frozenset(m)), c) for m, c in self.sorted_terms()]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, (m, c) in enumerate(self.sorted_terms()):
            body = f"{_fraction_text(abs(c))} * {monomial_text(self.pset, m)}"
            if k == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(f" {'-' if c < 0 else '+'} {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"RingElement({self.pset.word!r}, {self})"


# -- relations ----------------------------------------------------------------

def keel_linear_relation(S: PaintedSet, i: int, j: int, k: int, l: int) -> RingElement:
    if not is_allowed_quadruple(S, i, j, k, l):
        raise ValueError("quadruple is not allowed")
    terms = {}
    for m in stable_partition_masks(S):
        e = epsilon_mask(m, i, j, k, l)
        if e:
            terms[(m,)] = e
    return RingElement(S, terms, good=True)


def keel_quadratic_pairs(S: PaintedSet) -> dict:
    """Unordered pairs of stable partitions killed by a quadratic relation.

    Maps ``(p, q)`` (canonical masks, p < q) to one witnessing allowed quadruple.
    """
    masks = stable_partition_masks(S)
    out: dict = {}
    for i, j, k, l in allowed_quadruples(S):
        first = [m for m in masks if epsilon_mask(m, i, j, k, l) == 1]
        second = [m for m in masks if epsilon_mask(m, i, j, k, l) == -1]
        for p in first:
            for q in second:
                key = (min(p, q), max(p, q))
                out.setdefault(key, (i, j, k, l))
    return out


@dataclass(frozen=True)
class StandardRelation:
    tree: PaintedTree
    vertex: Vertex
    flags: tuple                 # branches I, J, K, L at the vertex
    expansion: tuple             # sorted ((monomial, sign), ...)

    @property
    def element(self) -> RingElement:
        return RingElement(self.tree.pset, dict(self.expansion), good=True)

    @property
    def degree(self) -> int:
        return self.tree.n_edges + 1


def flags_allowed(pset: PaintedSet, I: int, J: int, K: int, L: int) -> bool:
    w = lambda b: branch_is_white(pset, b)  # noqa: E731
    return quadruple_allowed_colors(w(I), w(J), w(K), w(L))


def relation_expansion(tau: PaintedTree, v: Vertex, I: int, J: int, K: int, L: int) -> dict:
    """Signed good monomials of the relation obtained by inserting one edge at v."""
    S = tau.pset
    if len({I, J, K, L}) != 4 or not {I, J, K, L} <= set(v):
        raise ValueError("need four distinct flags at the vertex")
    if not flags_allowed(S, I, J, K, L):
        raise ValueError("flag quadruple is not allowed at the vertex")
    out = {}
    for side in stable_vertex_splits(S, v):
        inside = lambda b: bool(b & side)  # noqa: E731
        si, sj, sk, sl = inside(I), inside(J), inside(K), inside(L)
        if si == sj and sk == sl and si != sk:
            sign = 1
        elif sk == sj and si == sl and si != sk:
            sign = -1
        else:
            continue
        new = side if side & 1 else S.full ^ side
        out[tuple(sorted(tau.splits | {new}))] = sign
    return out


def standard_relation(tau: PaintedTree, v: Vertex, I: int, J: int, K: int, L: int) -> StandardRelation:
    exp = relation_expansion(tau, v, I, J, K, L)
    return StandardRelation(tau, v, (I, J, K, L), tuple(sorted(exp.items())))


def allowed_flag_quadruples(tau: PaintedTree, v: Vertex):
    for q in itertools.permutations(v, 4):
        if flags_allowed(tau.pset, *q):
            yield q


# -- the ring -------------------------------------------------------------------

class CohomologyRing:
    """Graded pieces of the quotient ring for one stable painted set, with caches."""

    def __init__(self, pset: PaintedSet):
        if not is_stable_painted_set(pset):
            raise ValueError(f"painted set {pset.word!r} is not stable")
        self.pset = pset
        self.top = len(pset) - 3
        self.generators = stable_partition_masks(pset)
        self._trees: dict = {}
        self._tree_index: dict = {}
        self._relations: dict = {}
        self._relation_reducer: dict = {}
        self._oracle: dict = {}
        self._oracle_reducer: dict = {}
        self._reduced_monomials: dict = {}

    # good backend ----------------------------------------------------------------

    def trees(self, d: int) -> list[PaintedTree]:
        if d not in self._trees:
            self._trees[d] = enumerate_stable_trees(self.pset, d) if 0 <= d <= self.top else []
            self._tree_index[d] = {monomial_of_tree(t): n for n, t in enumerate(self._trees[d])}
        return self._trees[d]

    def tree_index(self, d: int) -> dict:
        self.trees(d)
        return self._tree_index[d]

    def standard_relations(self, d: int) -> list[StandardRelation]:
        """Standard relations whose terms have degree d, deduplicated by expansion."""
        if d not in self._relations:
            seen, out = set(), []
            if 1 <= d <= self.top + 1:
                for tau in self.trees(d - 1):
                    for v in tau.vertices:
                        for q in allowed_flag_quadruples(tau, v):
                            rel = standard_relation(tau, v, *q)
                            if rel.expansion and rel.expansion not in seen:
                                seen.add(rel.expansion)
                                out.append(rel)
            self._relations[d] = out
        return self._relations[d]

    def relation_vector(self, expansion: Iterable) -> dict:
        items = list(expansion.items() if isinstance(expansion, Mapping) else expansion)
        if not items:
            return {}
        idx = self.tree_index(len(items[0][0]))
        return {idx[m]: Fraction(c) for m, c in items}

    def relation_reducer(self, d: int) -> RowReducer:
        """Reduced echelon form of the standard relations; columns in canonical tree order."""
        if d not in self._relation_reducer:
            red = RowReducer()
            for rel in self.standard_relations(d):
                red.add(self.relation_vector(rel.expansion))
            self._relation_reducer[d] = red
        return self._relation_reducer[d]

    def graded_dimension_good(self, d: int) -> int:
        if d < 0:
            raise ValueError("negative degree")
        if d > self.top:
            return 0
        return len(self.trees(d)) - len(self.relation_reducer(d))

    def normal_form(self, x: RingElement) -> RingElement:
        """Unique representative of a good-coordinate element, supported on non-pivot trees."""
        if not x.good:
            return reduce_to_good_basis(x)
        out: dict = {}
        by_degree: dict = {}
        for m, c in x.terms.items():
            by_degree.setdefault(len(m), {})[m] = c
        for d, terms in by_degree.items():
            if d > self.top:
                continue
            idx = self.tree_index(d)
            trees = self.trees(d)
            try:
                vec = {idx[m]: c for m, c in terms.items()}
            except KeyError as exc:
                raise ValueError(f"monomial {exc} is not good") from None
            for n, c in self.relation_reducer(d).reduce(vec).items():
                out[monomial_of_tree(trees[n])] = c
        return RingElement(self.pset, out, good=True)

    def is_relation(self, x: RingElement) -> bool:
        """Whether a good-coordinate element lies in the span of standard relations."""
        return self.normal_form(x).is_zero()

    def basis(self, d: int) -> list[PaintedTree]:
        """Trees whose classes form the normal-form basis in degree d (the non-pivot trees)."""
        piv = self.relation_reducer(d).pivots if 0 <= d <= self.top else set()
        return [t for n, t in enumerate(self.trees(d)) if n not in piv]

    # oracle backend ------------------------------------------------------------

    @cached_property
    def quadratic_pairs(self) -> dict:
        return keel_quadratic_pairs(self.pset)

    @cached_property
    def linear_relations(self) -> list[dict]:
        """Distinct degree-1 relations as {generator mask: coefficient}."""
        seen, out = set(), []
        for q in allowed_quadruples(self.pset):
            rel = keel_linear_relation(self.pset, *q)
            vec = {m[0]: c for m, c in rel.terms.items()}
            key = tuple(sorted(vec.items()))
            if vec and key not in seen:
                seen.add(key)
                out.append(vec)
        return out

    def is_killed(self, m: Monomial) -> bool:
        """Divisible by a product from a witnessed quadratic pair."""
        pairs = self.quadratic_pairs
        distinct = sorted(set(m))
        return any((p, q) in pairs for p, q in itertools.combinations(distinct, 2))

    def monomials(self, d: int, include_killed: bool = True) -> list[Monomial]:
        gens = self.generators
        if include_killed:
            return list(itertools.combinations_with_replacement(gens, d))
        out = []
        pairs = self.quadratic_pairs

        def extend(prefix: list, start: int):
            if len(prefix) == d:
                out.append(tuple(prefix))
                return
            for n in range(start, len(gens)):
                g = gens[n]
                if any((min(p, g), max(p, g)) in pairs for p in set(prefix) if p != g):
                    continue
                prefix.append(g)
                extend(prefix, n)
                prefix.pop()

        extend([], 0)
        return out

    def ideal_degree_piece(self, d: int) -> tuple[list[Monomial], SparseMatrix]:
        """All monomial multiples of the generators of the ideal in degree d, over the full monomial basis."""
        if d < 1:
            raise ValueError("ideal pieces start in degree 1")
        basis = self.monomials(d)
        col = {m: n for n, m in enumerate(basis)}
        rows = []
        for m in self.monomials(d - 1):
            for rel in self.linear_relations:
                rows.append({col[tuple(sorted(m + (g,)))]: c for g, c in rel.items()})
        if d >= 2:
            for (p, q) in sorted(self.quadratic_pairs):
                for m in self.monomials(d - 2):
                    rows.append({col[tuple(sorted(m + (p, q)))]: 1})
        return basis, SparseMatrix(rows, len(basis))

    def _projected_rows(self, d: int, col: Mapping[Monomial, int]) -> list[dict]:
        """Linear-relation multiples with killed monomials dropped (they span a coordinate subspace)."""
        rows, seen = [], set()
        for m in self.monomials(d - 1, include_killed=False):
            for rel in self.linear_relations:
                row = {}
                for g, c in rel.items():
                    n = col.get(tuple(sorted(m + (g,))))
                    if n is not None:
                        row[n] = c
                key = tuple(sorted(row.items()))
                if row and key not in seen:
                    seen.add(key)
                    rows.append(row)
        return rows

    def graded_dimension_oracle(self, d: int) -> int:
        if d < 0:
            raise ValueError("negative degree")
        if d not in self._oracle:
            if d == 0:
                self._oracle[d] = 1
            else:
                live = self.monomials(d, include_killed=False)
                col = {m: n for n, m in enumerate(live)}
                self._oracle[d] = quotient_dimension(len(live), self._projected_rows(d, col))
        return self._oracle[d]

    def _oracle_reduction(self, d: int):
        """Echelon form of the ideal in degree d with good monomials ordered last.

        Reducing a monomial then leaves a residue supported on good monomials,
        which gives its good-monomial coordinates.
        """
        if d not in self._oracle_reducer:
            good = set(self.tree_index(d))
            live = self.monomials(d, include_killed=False)
            live.sort(key=lambda m: (m in good, m))
            col = {m: n for n, m in enumerate(live)}
            red = RowReducer()
            for row in self._projected_rows(d, col):
                red.add(row)
            bad = [live[n] for n in range(len(live)) if live[n] not in good and n not in red.pivots]
            if bad:
                raise InconsistentReduction(
                    f"good monomials do not span degree {d} of {self.pset.word}: "
                    f"{monomial_text(self.pset, bad[0])} is independent")
            self._oracle_reducer[d] = (live, col, red)
        return self._oracle_reducer[d]

    def reduce_monomial(self, m: Monomial) -> dict:
        """Good-monomial coordinates (not yet normalised) of one monomial of the polynomial ring."""
        m = tuple(sorted(m))
        d = len(m)
        if d > self.top:
            if len(self.pset) > 6:
                log.debug("degree %d above top degree %d assumed zero for %s", d, self.top, self.pset.word)
            return {}
        if m in self.tree_index(d):
            return {m: Fraction(1)}
        if self.is_killed(m):
            return {}
        if m not in self._reduced_monomials:
            live, col, red = self._oracle_reduction(d)
            res = red.reduce({col[m]: 1})
            self._reduced_monomials[m] = {live[n]: c for n, c in res.items()}
        return self._reduced_monomials[m]

    def in_ideal(self, x: RingElement) -> bool:
        """Membership of a homogeneous element of the polynomial ring in the ideal."""
        d = x.degree
        if d is None or d > self.top:
            return True
        if d == 0:
            return x.is_zero()
        live, col, red = self._oracle_reduction(d)
        vec = {col[tuple(sorted(m))]: c for m, c in x.terms.items() if not self.is_killed(m)}
        return red.contains(vec)

    def reduce_to_good_basis(self, x: RingElement) -> RingElement:
        out: dict = {}
        for m, c in x.terms.items():
            add_scaled(out, self.reduce_monomial(m), c)
        return self.normal_form(RingElement(self.pset, out, good=True))

    def multiply(self, x: RingElement, y: RingElement) -> RingElement:
        x.degree, y.degree  # homogeneity check
        if not (x.good and y.good):
            raise ValueError("multiply expects good-monomial coordinates")
        good_part: dict = {}
        other: dict = {}
        for m1, c1 in x.terms.items():
            for m2, c2 in y.terms.items():
                m = tuple(sorted(m1 + m2))
                c = c1 * c2
                if len(m) > self.top:
                    continue
                if m in self.tree_index(len(m)):
                    good_part[m] = good_part.get(m, 0) + c
                elif self.is_killed(m):
                    continue
                else:
                    other[m] = other.get(m, 0) + c
        for m, c in other.items():
            add_scaled(good_part, self.reduce_monomial(m), c)
        return self.normal_form(RingElement(self.pset, good_part, good=True))

    def hilbert_series(self, check_oracle: bool = False) -> list[int]:
        h = [self.graded_dimension_good(d) for d in range(self.top + 1)]
        if check_oracle:
            o = [self.graded_dimension_oracle(d) for d in range(self.top + 1)]
            if o != h:
                raise AssertionError(f"backends disagree for {self.pset.word}: good {h}, oracle {o}")
        return h


@lru_cache(maxsize=None)
def ring(pset: PaintedSet) -> CohomologyRing:
    return CohomologyRing(pset)


def _ring_of(S: PaintedSet | str) -> CohomologyRing:
    return ring(PaintedSet.from_word(S) if isinstance(S, str) else S)


def ideal_degree_piece(S: PaintedSet, d: int) -> tuple[list[Monomial], SparseMatrix]:
    return _ring_of(S).ideal_degree_piece(d)


def graded_dimension_oracle(S: PaintedSet, d: int) -> int:
    return _ring_of(S).graded_dimension_oracle(d)


def graded_dimension_good(S: PaintedSet, d: int) -> int:
    return _ring_of(S).graded_dimension_good(d)


def enumerate_standard_relations(S: PaintedSet, d: int) -> list[StandardRelation]:
    if d < 1:
        raise ValueError("standard relations live in degree >= 1")
    return _ring_of(S).standard_relations(d)


def reduce_to_good_basis(x: RingElement) -> RingElement:
    return ring(x.pset).reduce_to_good_basis(x)


def normal_form(x: RingElement) -> RingElement:
    return ring(x.pset).normal_form(x)


def multiply(x: RingElement, y: RingElement) -> RingElement:
    x._check(y)
    return ring(x.pset).multiply(x, y)


def hilbert_series(S: PaintedSet, check_oracle: bool = False) -> list[int]:
    return _ring_of(S).hilbert_series(check_oracle)


def relation_vector_equal(a: Mapping, b: Mapping) -> bool:
    return {m: c for m, c in a.items() if c} == {m: c for m, c in b.items() if c}


def _combine(*pairs) -> dict:
    out: dict = {}
    for coeff, exp in pairs:
        add_scaled(out, exp, coeff)
    return out


# Identities between standard relations.  Each entry: name, left quadruple and
# the signed right-hand quadruples, as positions into the flag tuple (I, J, K, L, M).
IDENTITIES = (
    ("swap", (0, 1, 2, 3), ((1, (2, 3, 0, 1)),)),
    ("reverse", (0, 1, 2, 3), ((1, (1, 0, 3, 2)),)),
    ("antisymmetry", (0, 1, 2, 3), ((-1, (0, 3, 2, 1)),)),
    ("additivity", (0, 1, 2, 3), ((1, (0, 1, 3, 2)), (1, (0, 2, 1, 3)))),
    ("five-flag", (0, 1, 2, 3), ((1, (4, 2, 1, 0)), (1, (4, 0, 3, 2)))),
)


def identity_arity(name: str) -> int:
    return 5 if name == "five-flag" else 4


def identity_quadruples(name: str, flags: tuple) -> list[tuple]:
    (_, lhs, rhs), = [e for e in IDENTITIES if e[0] == name]
    return [tuple(flags[k] for k in lhs)] + [tuple(flags[k] for k in q) for _, q in rhs]


def identity_applies(pset: PaintedSet, name: str, flags: tuple) -> bool:
    return all(flags_allowed(pset, *q) for q in identity_quadruples(name, flags))


def identity_holds(tau: PaintedTree, v: Vertex, name: str, flags: tuple) -> bool:
    """Exact vector equality of the two sides of one identity."""
    (_, lhs, rhs), = [e for e in IDENTITIES if e[0] == name]
    R = lambda q: relation_expansion(tau, v, *(flags[k] for k in q))  # noqa: E731
    return relation_vector_equal(R(lhs), _combine(*((c, R(q)) for c, q in rhs)))


def identity_instances(tau: PaintedTree, v: Vertex):
    """Every (identity name, flag tuple) at v whose quadruples are all allowed."""
    for name, _, _ in IDENTITIES:
        for flags in itertools.permutations(v, identity_arity(name)):
            if identity_applies(tau.pset, name, flags):
                yield name, flags


def relation_identity_check(tau: PaintedTree, v: Vertex, *flags: int) -> bool:
    """Check every identity on these four (or five) flags whose quadruples are allowed."""
    if len(flags) not in (4, 5):
        raise ValueError("give four or five flags")
    if len(set(flags)) != len(flags) or not set(flags) <= set(v):
        raise ValueError("flags must be distinct flags at the vertex")
    names = [n for n, _, _ in IDENTITIES if identity_arity(n) == len(flags)
             and identity_applies(tau.pset, n, flags)]
    if not names:
        raise ValueError("an involved quadruple is not allowed")
    return all(identity_holds(tau, v, n, flags) for n in names)


def good_monomial_count(S: PaintedSet, d: int) -> int:
    return len(_ring_of(S).trees(d))


def monomial_count(S: PaintedSet, d: int) -> int:
    return comb(len(stable_partition_masks(S)) + d - 1, d)
