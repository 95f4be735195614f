"""Exact rational sparse vectors, matrices, and elimination kernels.

Scalars are ``fractions.Fraction`` (always reduced, positive denominator,
arbitrary precision).  Vectors are finitely supported maps from opaque
integer basis indices to nonzero scalars; this layer never interprets the
indices.  Everything here is immutable-by-convention and pure, so values
can be shared freely across threads.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence

Rational = Fraction

_ZERO = Fraction(0)


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class SparseVector:
    """Finitely supported map index -> nonzero Fraction."""

    __slots__ = ("entries",)

    def __init__(self, entries: Optional[Mapping[int, Fraction]] = None):
        data = {}
        if entries:
            for k, v in entries.items():
                v = _as_fraction(v)
                if v:
                    data[k] = v
        self.entries = data

    @staticmethod
    def basis(i: int, coeff=1) -> "SparseVector":
        return SparseVector({i: _as_fraction(coeff)})

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[int, Fraction]]:
        return iter(self.entries.items())

    def __getitem__(self, i: int) -> Fraction:
        return self.entries.get(i, _ZERO)

    def __eq__(self, other) -> bool:
        return isinstance(other, SparseVector) and self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def __add__(self, other: "SparseVector") -> "SparseVector":
        data = dict(self.entries)
        for k, v in other.entries.items():
            s = data.get(k, _ZERO) + v
            if s:
                data[k] = s
            else:
                data.pop(k, None)
        out = SparseVector.__new__(SparseVector)
        out.entries = data
        return out

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        return self + (-other)

    def __neg__(self) -> "SparseVector":
        out = SparseVector.__new__(SparseVector)
        out.entries = {k: -v for k, v in self.entries.items()}
        return out

    def scale(self, c) -> "SparseVector":
        c = _as_fraction(c)
        out = SparseVector.__new__(SparseVector)
        out.entries = {} if not c else {k: c * v for k, v in self.entries.items()}
        return out

    def __rmul__(self, c) -> "SparseVector":
        return self.scale(c)

    def support(self) -> list[int]:
        return sorted(self.entries)

    def leading(self) -> tuple[int, Fraction]:
        """(smallest index in support, its coefficient)."""
        i = min(self.entries)
        return i, self.entries[i]

    def __repr__(self) -> str:
        items = ", ".join(f"{i}: {c}" for i, c in sorted(self.entries.items()))
        return f"SparseVector({{{items}}})"


def vec_from_pairs(pairs: Iterable[tuple[int, Fraction]]) -> SparseVector:
    data: dict[int, Fraction] = {}
    for k, v in pairs:
        s = data.get(k, _ZERO) + v
        if s:
            data[k] = s
        else:
            data.pop(k, None)
    out = SparseVector.__new__(SparseVector)
    out.entries = data
    return out


class SparseMatrix:
    """Sparse matrix with explicit shape; entries (row, col) -> nonzero Fraction."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[Mapping[tuple[int, int], Fraction]] = None):
        self.rows = rows
        self.cols = cols
        data = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise IndexError(f"entry ({r},{c}) outside {rows}x{cols}")
                v = _as_fraction(v)
                if v:
                    data[(r, c)] = v
        self.entries = data

    @staticmethod
    def from_rows(rows: Sequence[Sequence], cols: Optional[int] = None) -> "SparseMatrix":
        n = len(rows)
        m = cols if cols is not None else (len(rows[0]) if rows else 0)
        data = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                v = _as_fraction(v)
                if v:
                    data[(i, j)] = v
        return SparseMatrix(n, m, data)

    @staticmethod
    def from_columns(columns: Sequence[SparseVector], rows: int) -> "SparseMatrix":
        data = {}
        for j, col in enumerate(columns):
            for i, v in col:
                data[(i, j)] = v
        return SparseMatrix(rows, len(columns), data)

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def apply(self, v: SparseVector) -> SparseVector:
        """Matrix-vector product, v indexed by columns."""
        acc: dict[int, Fraction] = {}
        cols: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), a in self.entries.items():
            cols.setdefault(c, []).append((r, a))
        for c, x in v:
            for r, a in cols.get(c, ()):
                s = acc.get(r, _ZERO) + a * x
                if s:
                    acc[r] = s
                else:
                    acc.pop(r, None)
        return SparseVector(acc)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _rref(rows: list[dict[int, Fraction]]) -> tuple[list[dict[int, Fraction]], list[int]]:
    """Reduced row echelon form of row dicts.

    Pivoting is leftmost column first with smallest-row-index tie-break, so
    the result (and everything derived from it) is deterministic.  Returns
    (pivot rows, pivot columns), pivot columns strictly increasing, each
    pivot normalized to 1 and cleared from every other row.
    """
    work = [dict(r) for r in rows if r]
    echelon: list[dict[int, Fraction]] = []
    pivots: list[int] = []
    # insertion sort by leading column keeps the smallest-row-index tie-break
    while work:
        best = min(range(len(work)), key=lambda i: min(work[i]))
        row = work.pop(best)
        col = min(row)
        inv = 1 / row[col]
        row = {c: v * inv for c, v in row.items()}
        # clear col from remaining work rows
        nxt = []
        for r in work:
            coeff = r.get(col)
            if coeff:
                r = {c: v - coeff * row.get(c, _ZERO) for c, v in
                     {**{c: _ZERO for c in row}, **r}.items()}
                r = {c: v for c, v in r.items() if v}
            if r:
                nxt.append(r)
        work = nxt
        # clear col from previously found rows (full reduction)
        for i, r in enumerate(echelon):
            coeff = r.get(col)
            if coeff:
                merged = dict(r)
                for c, v in row.items():
                    s = merged.get(c, _ZERO) - coeff * v
                    if s:
                        merged[c] = s
                    else:
                        merged.pop(c, None)
                echelon[i] = merged
        echelon.append(row)
        pivots.append(col)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [echelon[i] for i in order], sorted(pivots)


def rank(m: SparseMatrix) -> int:
    rows, _ = _rref(m.row_dicts())
    return len(rows)


def kernel_basis(m: SparseMatrix) -> list[SparseVector]:
    """Deterministic basis of the right null space of ``m``.

    One vector per free column, ordered by free column index; the free
    coordinate is set to 1 and pivot coordinates are read off the reduced
    echelon form.  This reproduces textbook back-substitution, e.g. a
    single relation x + 2y = 0 yields (-2, 1).
    """
    rows, pivots = _rref(m.row_dicts())
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    basis = []
    for f in free:
        v = {f: Fraction(1)}
        for row, p in zip(rows, pivots):
            coeff = row.get(f)
            if coeff:
                v[p] = -coeff
        basis.append(SparseVector(v))
    return basis


def membership(v: SparseVector, span: Sequence[SparseVector]) -> Optional[list[Fraction]]:
    """Coordinates of ``v`` in the given spanning set, or None.

    Solves sum(c_i * span_i) = v exactly; when the spanning set is linearly
    dependent the solution with all free coefficients zero is returned.
    """
    # augmented system: columns are span vectors, last column is v
    n = len(span)
    rows: dict[int, dict[int, Fraction]] = {}
    for j, s in enumerate(span):
        for i, a in s:
            rows.setdefault(i, {})[j] = a
    for i, a in v:
        rows.setdefault(i, {})[n] = a
    ech, pivots = _rref(list(rows.values()))
    coords = [Fraction(0)] * n
    for row, p in zip(ech, pivots):
        if p == n:
            return None  # inconsistent: pivot in the augmented column
        coords[p] = row.get(n, _ZERO)
    # RREF of [Sftnote | v]: row p reads  c_p + sum(free terms) = v-part;
    # free coefficients are zero, so c_p is the augmented entry directly.
    return coords


class Span:
    """Incrementally grown subspace in reduced echelon form.

    add() either absorbs the vector (returns False) or installs a new
    pivot row (returns True).  Rows are kept fully reduced; pivot columns
    are the deterministic leftmost choice.
    """

    __slots__ = ("rows",)

    def __init__(self, vectors: Iterable[SparseVector] = ()):
        self.rows: dict[int, dict[int, Fraction]] = {}
        for v in vectors:
            self.add(v)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, v: SparseVector) -> dict[int, Fraction]:
        cur = dict(v.entries)
        while cur:
            lead = min(cur)
            row = self.rows.get(lead)
            if row is None:
                return cur
            coeff = cur[lead]
            for c, a in row.items():
                s = cur.get(c, _ZERO) - coeff * a
                if s:
                    cur[c] = s
                else:
                    cur.pop(c, None)
        return cur

    def contains(self, v: SparseVector) -> bool:
        return not self.reduce(v)

    def add(self, v: SparseVector) -> bool:
        cur = self.reduce(v)
        if not cur:
            return False
        lead = min(cur)
        inv = 1 / cur[lead]
        new_row = {c: a * inv for c, a in cur.items()}
        # keep previous rows reduced against the new pivot
        for p, row in self.rows.items():
            coeff = row.get(lead)
            if coeff:
                for c, a in new_row.items():
                    s = row.get(c, _ZERO) - coeff * a
                    if s:
                        row[c] = s
                    else:
                        row.pop(c, None)
        self.rows[lead] = new_row
        return True

    def vectors(self) -> list[SparseVector]:
        return [SparseVector(self.rows[p]) for p in sorted(self.rows)]
