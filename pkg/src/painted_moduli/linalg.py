"""Exact sparse linear algebra over the rationals.

Vectors are dicts ``{column: coefficient}`` with no stored zeros.  Rank is
computed by fraction-free elimination on integer rows; row reduction to a
normal form (used by the ring backends) works over :class:`Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

SparseVector = dict


def clean(v: Mapping[int, object]) -> dict:
    return {c: x for c, x in v.items() if x}


def add_scaled(target: dict, v: Mapping[int, object], scale) -> None:
    """target += scale * v, in place, dropping cancelled entries."""
    for c, x in v.items():
        y = target.get(c, 0) + scale * x
        if y:
            target[c] = y
        else:
            target.pop(c, None)


@dataclass(frozen=True)
class SparseMatrix:
    ncols: int
    rows: tuple

    def __init__(self, rows: Iterable[Mapping[int, object]], ncols: int | None = None):
        rows = tuple(clean({int(c): Fraction(x) for c, x in r.items()}) for r in rows)
        width = max((max(r) + 1 for r in rows if r), default=0)
        if ncols is None:
            ncols = width
        if width > ncols or any(c < 0 for r in rows for c in r):
            raise ValueError("column index outside the declared column count")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def transpose(self) -> "SparseMatrix":
        cols: list[dict] = [dict() for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for c, x in r.items():
                cols[c][i] = x
        return SparseMatrix(cols, self.nrows)

    def dump(self) -> str:
        """Coordinate triples ``row col p/q``, one per line."""
        out = []
        for i, r in enumerate(self.rows):
            for c in sorted(r):
                x = r[c]
                out.append(f"{i} {c} {x.numerator}/{x.denominator}")
        return "\n".join(out) + ("\n" if out else "")

    @classmethod
    def load(cls, text: str, ncols: int | None = None) -> "SparseMatrix":
        rows: dict[int, dict] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            i, c, x = line.split()
            rows.setdefault(int(i), {})[int(c)] = Fraction(x)
        nrows = max(rows, default=-1) + 1
        return cls([rows.get(i, {}) for i in range(nrows)], ncols)


def _integer_row(r: Mapping[int, Fraction]) -> dict:
    den = 1
    for x in r.values():
        den = lcm(den, Fraction(x).denominator)
    row = {c: int(Fraction(x) * den) for c, x in r.items()}
    return _primitive(row)


def _primitive(row: dict) -> dict:
    g = 0
    for x in row.values():
        g = gcd(g, x)
        if g == 1:
            return row
    if g > 1:
        row = {c: x // g for c, x in row.items()}
    return row


def rank(M: SparseMatrix | Sequence[Mapping[int, object]]) -> int:
    """Rank over Q by fraction-free elimination.

    The pivot row is always the shortest remaining row; its pivot column is
    its smallest column index.  Rows are kept primitive (content 1).
    """
    rows_in = M.rows if isinstance(M, SparseMatrix) else M
    rows: dict[int, dict] = {}
    col_rows: dict[int, set] = {}
    for n, r in enumerate(rows_in):
        r = _integer_row(clean(r))
        if r:
            rows[n] = r
            for c in r:
                col_rows.setdefault(c, set()).add(n)
    rk = 0
    while rows:
        p = min(rows, key=lambda n: (len(rows[n]), min(rows[n]), n))
        prow = rows.pop(p)
        for c in prow:
            col_rows[c].discard(p)
        c = min(prow)
        a = prow[c]
        rk += 1
        for n in sorted(col_rows.get(c, ())):
            row = rows[n]
            b = row[c]
            g = gcd(a, b)
            fa, fb = a // g, b // g
            new = {k: fa * x for k, x in row.items()}
            for k, x in prow.items():
                y = new.get(k, 0) - fb * x
                if y:
                    new[k] = y
                else:
                    new.pop(k, None)
            for k in row:
                if k not in new:
                    col_rows[k].discard(n)
            if new:
                new = _primitive(new)
                for k in new:
                    col_rows.setdefault(k, set()).add(n)
                rows[n] = new
            else:
                del rows[n]
    return rk


def quotient_dimension(ambient_basis_size: int, relation_rows: SparseMatrix | Sequence) -> int:
    return ambient_basis_size - rank(relation_rows)


class RowReducer:
    """Incremental reduced row echelon form over Q.

    The pivot of a row is its smallest column, so columns placed first are
    eliminated first.  ``reduce`` returns the unique representative of a vector
    modulo the row span supported on non-pivot columns.  When ``track`` is set,
    every stored row remembers its combination of the input rows.
    """

    def __init__(self, track: bool = False):
        self.rows: dict[int, dict] = {}      # pivot column -> row with pivot coefficient 1
        self.col_index: dict[int, set] = {}  # column -> pivots of rows containing it
        self.track = track
        self.combos: dict[int, dict] = {}
        self.n_added = 0

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> set:
        return set(self.rows)

    def _reduce(self, v: dict, combo: dict | None) -> None:
        for p in sorted(set(v) & self.rows.keys()):
            x = v.get(p)
            if x:
                add_scaled(v, self.rows[p], -x)
                if combo is not None:
                    add_scaled(combo, self.combos[p], -x)

    def reduce(self, v: Mapping[int, object]) -> dict:
        w = {c: Fraction(x) for c, x in v.items() if x}
        self._reduce(w, None)
        return w

    def add(self, v: Mapping[int, object]) -> bool:
        """Add a row; returns True iff it was independent of the rows so far."""
        w = {c: Fraction(x) for c, x in v.items() if x}
        combo = {self.n_added: Fraction(1)} if self.track else None
        self.n_added += 1
        self._reduce(w, combo)
        if not w:
            return False
        p = min(w)
        inv = 1 / w[p]
        w = {c: x * inv for c, x in w.items()}
        if combo is not None:
            combo = {c: x * inv for c, x in combo.items()}
        # keep the echelon form reduced: clear column p from the other rows
        for q in sorted(self.col_index.get(p, ())):
            row = self.rows[q]
            x = row.get(p)
            if not x:
                continue
            old = set(row)
            add_scaled(row, w, -x)
            if combo is not None:
                add_scaled(self.combos[q], combo, -x)
            for c in old - set(row):
                self.col_index[c].discard(q)
            for c in set(row) - old:
                self.col_index.setdefault(c, set()).add(q)
        self.rows[p] = w
        if combo is not None:
            self.combos[p] = combo
        for c in w:
            self.col_index.setdefault(c, set()).add(p)
        return True

    def contains(self, v: Mapping[int, object]) -> bool:
        return not self.reduce(v)

    def witness(self, v: Mapping[int, object]) -> dict | None:
        """Coefficients over the added rows reproducing ``v``, or None."""
        if not self.track:
            raise ValueError("witnesses need a reducer built with track=True")
        w = {c: Fraction(x) for c, x in v.items() if x}
        combo: dict = {}
        for p in sorted(set(w) & self.rows.keys()):
            x = w.get(p)
            if x:
                add_scaled(w, self.rows[p], -x)
                add_scaled(combo, self.combos[p], x)
        return None if w else combo


def in_span(M: SparseMatrix, v: Mapping[int, object]) -> tuple[bool, dict | None]:
    """Whether ``v`` is in the row span of M, with coefficients over M's rows when it is."""
    if any(c >= M.ncols or c < 0 for c in v if v[c]):
        raise ValueError("vector does not fit the matrix width")
    red = RowReducer(track=True)
    for r in M.rows:
        red.add(r)
    coeffs = red.witness(v)
    return coeffs is not None, coeffs
