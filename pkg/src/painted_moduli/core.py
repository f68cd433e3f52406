"""Painted label sets, weight data, 2-partitions and stability predicates.

Labels of a painted set are addressed internally by their index, and subsets
of labels are stored as integer bitmasks (bit ``i`` set iff label ``i`` is in
the subset).  Everything here is immutable.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence


class Color(enum.Enum):
    WHITE = "w"
    BLACK = "b"

    @classmethod
    def parse(cls, text: str) -> "Color":
        t = text.strip().lower()
        if t in ("w", "white"):
            return cls.WHITE
        if t in ("b", "black"):
            return cls.BLACK
        raise ValueError(f"unknown color {text!r}")


WHITE = Color.WHITE
BLACK = Color.BLACK


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


@dataclass(frozen=True)
class Label:
    name: str
    color: Color


@dataclass(frozen=True)
class PaintedSet:
    """An ordered finite set of labels, each painted white or black."""

    labels: tuple[Label, ...]

    def __post_init__(self):
        names = [lab.name for lab in self.labels]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate label names in {names}")

    @classmethod
    def from_word(cls, word: str) -> "PaintedSet":
        """Build a painted set from a word over ``{w, b}``; labels are named 1..n."""
        return cls(tuple(Label(str(i + 1), Color.parse(c)) for i, c in enumerate(word)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Color | str]]) -> "PaintedSet":
        return cls(tuple(Label(str(name), c if isinstance(c, Color) else Color.parse(c))
                         for name, c in pairs))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    @cached_property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    @cached_property
    def white_mask(self) -> int:
        return sum(1 << i for i, lab in enumerate(self.labels) if lab.color is WHITE)

    @property
    def black_mask(self) -> int:
        return self.full & ~self.white_mask

    @property
    def n_white(self) -> int:
        return popcount(self.white_mask)

    @property
    def n_black(self) -> int:
        return len(self.labels) - self.n_white

    @property
    def word(self) -> str:
        return "".join(lab.color.value for lab in self.labels)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(lab.name for lab in self.labels)

    def index(self, name: str | int) -> int:
        """Index of a label given by name (or pass an index through)."""
        if isinstance(name, int):
            if not 0 <= name < len(self.labels):
                raise IndexError(name)
            return name
        for i, lab in enumerate(self.labels):
            if lab.name == name:
                return i
        raise KeyError(f"no label named {name!r}")

    def color(self, i: int) -> Color:
        return self.labels[i].color

    def is_white(self, i: int) -> bool:
        return bool(self.white_mask >> i & 1)

    def mask_of(self, names: Iterable[str | int]) -> int:
        m = 0
        for x in names:
            m |= 1 << self.index(x)
        return m

    def repainted(self, i: int, color: Color) -> "PaintedSet":
        labs = list(self.labels)
        labs[i] = Label(labs[i].name, color)
        return PaintedSet(tuple(labs))

    def mask_text(self, mask: int) -> str:
        """Render a subset as label indices (1-based); comma separated above 9 labels."""
        idx = [str(i + 1) for i in bits(mask)]
        return ("," if len(self.labels) > 9 else "").join(idx)


def is_stable_painted_set(S: PaintedSet) -> bool:
    return len(S) >= 3 and S.n_white >= 2


# -- weights -----------------------------------------------------------------

@dataclass(frozen=True)
class WeightData:
    """Rational weights ``0 < a_s <= 1`` on the labels of a painted set."""

    pset: PaintedSet
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.pset):
            raise ValueError("one weight per label is required")
        for w in self.weights:
            if not 0 < w <= 1:
                raise ValueError(f"weight {w} outside (0, 1]")

    @classmethod
    def from_mapping(cls, pset: PaintedSet, weights: Mapping[str, Fraction]) -> "WeightData":
        missing = [n for n in pset.names if n not in weights]
        if missing:
            raise ValueError(f"missing weights for {missing}")
        return cls(pset, tuple(Fraction(weights[n]) for n in pset.names))

    def __getitem__(self, name: str | int) -> Fraction:
        return self.weights[self.pset.index(name)]

    def satisfies_star(self) -> bool:
        """White weights equal 1 and black weights sum to at most 1."""
        S = self.pset
        whites_ok = all(w == 1 for i, w in enumerate(self.weights) if S.is_white(i))
        return whites_ok and sum((w for i, w in enumerate(self.weights) if not S.is_white(i)),
                                 Fraction(0)) <= 1


def star_weights(S: PaintedSet) -> WeightData:
    black = Fraction(1, S.n_black + 1)
    return WeightData(S, tuple(Fraction(1) if lab.color is WHITE else black for lab in S))


# -- vertices ----------------------------------------------------------------

@dataclass(frozen=True)
class Flag:
    """A flag at a vertex: a labelled tail, or an (always white) edge-half."""

    color: Color
    label: str | None = None

    @classmethod
    def edge_half(cls) -> "Flag":
        return cls(WHITE, None)

    @property
    def is_edge(self) -> bool:
        return self.label is None

    def __post_init__(self):
        if self.label is None and self.color is not WHITE:
            raise ValueError("halves of edges are white")


@dataclass(frozen=True)
class VertexData:
    genus: int
    flags: tuple[Flag, ...]

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be nonnegative")

    @classmethod
    def from_colors(cls, genus: int, n_white: int, n_black: int, n_edges: int = 0) -> "VertexData":
        flags = ([Flag.edge_half()] * n_edges
                 + [Flag(WHITE, f"w{i}") for i in range(n_white)]
                 + [Flag(BLACK, f"b{i}") for i in range(n_black)])
        return cls(genus, tuple(flags))

    @property
    def n_white(self) -> int:
        return sum(1 for f in self.flags if f.color is WHITE)


def vertex_painted_stable(v: VertexData) -> bool:
    if v.genus == 0:
        return len(v.flags) >= 3 and v.n_white >= 2
    if v.genus == 1:
        return len(v.flags) >= 1
    return True


def vertex_weighted_stable(v: VertexData, A: WeightData) -> bool:
    total = Fraction(2 * v.genus - 2)
    for f in v.flags:
        if f.is_edge:
            total += 1
            continue
        try:
            total += A[f.label]
        except KeyError:
            raise ValueError(f"no weight for tail {f.label!r}") from None
    return total > 0


def cluster_weighted_ok(cluster_weights: Sequence[Fraction]) -> bool:
    return sum(cluster_weights, Fraction(0)) <= 1


def random_star_weights(S: PaintedSet, rng: random.Random) -> WeightData:
    """Random rational weights with whites 1 and black total in (0, 1]."""
    total = Fraction(rng.randint(1, 12), 12)
    parts = [rng.randint(1, 9) for _ in range(S.n_black)]
    norm = sum(parts)
    it = iter(parts)
    return WeightData(S, tuple(Fraction(1) if lab.color is WHITE else total * next(it) / norm
                               for lab in S))


def white_distinct_cluster(n_white: int, n_black: int) -> bool:
    """A set of coinciding points is allowed iff it is a lone point or all black."""
    return n_white + n_black <= 1 or n_white == 0


def weighted_stability_sweep(trials: int = 100, max_flags: int = 8, max_genus: int = 2,
                             seed: int = 0) -> tuple[int, list[str]]:
    """Compare painted and weighted stability over all small vertex shapes and random weights.

    Returns the number of comparisons and a description of every discrepancy.
    """
    rng = random.Random(seed)
    checked, bad = 0, []
    for nw, nb in itertools.product(range(max_flags + 1), repeat=2):
        if nw + nb > max_flags:
            continue
        S = PaintedSet(tuple([Label(f"w{i}", WHITE) for i in range(nw)]
                             + [Label(f"b{i}", BLACK) for i in range(nb)]))
        for _ in range(trials):
            A = random_star_weights(S, rng)
            if not A.satisfies_star():
                bad.append(f"weights {A.weights} violate the white/black condition")
            for g in range(max_genus + 1):
                for ne in range(max_flags - nw - nb + 1):
                    v = VertexData.from_colors(g, nw, nb, ne)
                    checked += 1
                    if vertex_painted_stable(v) != vertex_weighted_stable(v, A):
                        bad.append(f"vertex g={g} w={nw} b={nb} e={ne} weights {A.weights}")
            for mask in range(1 << len(S)):
                members = list(bits(mask))
                cw = sum(1 for i in members if S.is_white(i))
                checked += 1
                if (cluster_weighted_ok([A.weights[i] for i in members])
                        != white_distinct_cluster(cw, len(members) - cw)):
                    bad.append(f"cluster {[S.labels[i].name for i in members]} weights {A.weights}")
    return checked, bad


# -- 2-partitions ---------------------------------------------------------------

def canonical_mask(full: int, part: int) -> int:
    """Orient a 2-partition so that the stored part contains label 0."""
    return part if part & 1 else full ^ part


def mask_is_stable(full: int, white: int, mask: int) -> bool:
    other = full ^ mask
    return (popcount(mask) >= 2 and popcount(other) >= 2
            and bool(mask & white) and bool(other & white))


@dataclass(frozen=True, order=True)
class TwoPartition:
    """An unordered 2-partition of a painted set.

    ``mask`` is the part containing the label of smallest index; equality and
    hashing are therefore independent of the orientation the caller used.
    """

    pset: PaintedSet
    mask: int

    def __post_init__(self):
        full = self.pset.full
        if not (0 < self.mask < full) or self.mask & ~full:
            raise ValueError("both parts of a 2-partition must be nonempty")
        if not self.mask & 1:
            object.__setattr__(self, "mask", full ^ self.mask)

    @classmethod
    def from_parts(cls, pset: PaintedSet, part: Iterable[str | int]) -> "TwoPartition":
        return cls(pset, pset.mask_of(part))

    @property
    def part0(self) -> tuple[int, ...]:
        return tuple(bits(self.mask))

    @property
    def part1(self) -> tuple[int, ...]:
        return tuple(bits(self.pset.full ^ self.mask))

    def together(self, i: int, j: int) -> bool:
        return (self.mask >> i & 1) == (self.mask >> j & 1)

    def __str__(self) -> str:
        S = self.pset
        return f"{S.mask_text(self.mask)}|{S.mask_text(S.full ^ self.mask)}"


def is_stable_partition(sigma: TwoPartition) -> bool:
    S = sigma.pset
    return mask_is_stable(S.full, S.white_mask, sigma.mask)


def stable_partition_masks(S: PaintedSet) -> list[int]:
    """Canonical masks of all stable 2-partitions, in increasing mask order."""
    full, white = S.full, S.white_mask
    # the part containing label 0 ranges over subsets of the remaining labels
    return [m for m in range(1, full, 2) if mask_is_stable(full, white, m)]


def enumerate_stable_partitions(S: PaintedSet) -> list[TwoPartition]:
    if not is_stable_painted_set(S):
        raise ValueError(f"painted set {S.word!r} is not stable")
    return [TwoPartition(S, m) for m in stable_partition_masks(S)]


def pair_has_white(white: int, *idx: int) -> bool:
    return any(white >> i & 1 for i in idx)


def quadruple_allowed_colors(wi: bool, wj: bool, wk: bool, wl: bool) -> bool:
    """Both ij|kl and kj|il have a white label on each side."""
    return (wi or wj) and (wk or wl) and (wk or wj) and (wi or wl)


def is_allowed_quadruple(S: PaintedSet, i: int, j: int, k: int, l: int) -> bool:
    if len({i, j, k, l}) != 4:
        raise ValueError("quadruple labels must be pairwise distinct")
    w = S.is_white
    return quadruple_allowed_colors(w(i), w(j), w(k), w(l))


def epsilon_mask(mask: int, i: int, j: int, k: int, l: int) -> int:
    """Sign of a split (given as a mask) against an ordered quadruple, allowedness assumed."""
    si, sj, sk, sl = (mask >> i & 1, mask >> j & 1, mask >> k & 1, mask >> l & 1)
    if si == sj and sk == sl and si != sk:
        return 1
    if sk == sj and si == sl and si != sk:
        return -1
    return 0


def epsilon(sigma: TwoPartition, i: int, j: int, k: int, l: int) -> int:
    if not is_allowed_quadruple(sigma.pset, i, j, k, l):
        return 0
    return epsilon_mask(sigma.mask, i, j, k, l)


def allowed_quadruples(S: PaintedSet) -> list[tuple[int, int, int, int]]:
    """All ordered allowed quadruples of label indices."""
    return [q for q in itertools.permutations(range(len(S)), 4) if is_allowed_quadruple(S, *q)]
