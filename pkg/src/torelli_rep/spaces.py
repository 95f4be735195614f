"""Concrete representation spaces: canonical bases, weights, Lie actions.

A module expression is a nested tuple tree over the leaves V (span of
a_1..a_g), dualV (span of b_1..b_g) and H = V + dualV, combined with
tensor/wedge/sym/dsum, plus named derived spaces:

* ``('U',)``              image of the Johnson homomorphism inside wedge^3 H
                          (all monomials containing at least one b)
* ``('Ubar',)``           its complement-to-H copy inside ker C_3
* ``('wedge3H_mod_H',)``  (wedge^3 H)/H realized as ker C_3
* ``('quotient_w2vv',)``  ((wedge^2 V) tensor V) / wedge^3 V
* ``('W',)``              ((wedge^2 V) tensor dualV) + Sym^2(dualV)
* ``('Wbar',)``           (((wedge^2 V) tensor dualV)/V) + Sym^2(dualV)
* ``('freelie3',)``       degree-3 part of the free Lie algebra on H

Basis monomials use the generator order a_1 < ... < a_g < b_1 < ... < b_g.
Wedge monomials are strictly increasing index tuples (signs absorbed into
coefficients); sym monomials are non-decreasing tuples denoting the sum
over distinct permutations of the corresponding tensors.

Operators:
  ('E', i, j)       elementary sl_g action, derivation over all factors
  ('X', i)          the sp_2g direction a_i -> b_i (FullH-built spaces only)
  ('swap', i, j)    handleswap a_i<->a_j, b_i<->b_j (multiplicative)
  ('transv', i, j)  symplectic transvection group element: for i == j,
                    a_i -> a_i + b_i; else a_i -> a_i + b_j, a_j -> a_j + b_i

Spaces are immutable after build(); action columns are memoized.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from .linalg import SparseVector, Span, vec_from_pairs
from . import weights as wt

# ---------------------------------------------------------------------------
# module expressions

V = ("V",)
DUALV = ("dualV",)
H = ("H",)
U_SPACE = ("U",)
UBAR = ("Ubar",)
WEDGE3H_MOD_H = ("wedge3H_mod_H",)
QUOT_W2VV = ("quotient_w2vv",)
W_SPACE = ("W",)
WBAR = ("Wbar",)
FREELIE3 = ("freelie3",)


def tensor(left, right):
    return ("tensor", left, right)


def wedge(k, inner):
    return ("wedge", k, inner)


def sym(k, inner):
    return ("sym", k, inner)


def dsum(*parts):
    return ("dsum",) + tuple(parts)


_LEAF_KINDS = {"V", "dualV", "H"}
_NAMED = {"U", "Ubar", "wedge3H_mod_H", "quotient_w2vv", "W", "Wbar", "freelie3"}


def expr_str(expr) -> str:
    kind = expr[0]
    if kind in _LEAF_KINDS or kind in _NAMED:
        return kind
    if kind == "tensor":
        return f"tensor({expr_str(expr[1])}, {expr_str(expr[2])})"
    if kind == "wedge":
        return f"wedge({expr[1]}, {expr_str(expr[2])})"
    if kind == "sym":
        return f"sym({expr[1]}, {expr_str(expr[2])})"
    if kind == "dsum":
        return "dsum(" + ", ".join(expr_str(p) for p in expr[1:]) + ")"
    raise ValueError(f"unknown expression {expr!r}")


def x_actionable(expr) -> bool:
    kind = expr[0]
    if kind == "H":
        return True
    if kind in ("V", "dualV"):
        return False
    if kind == "tensor":
        return x_actionable(expr[1]) and x_actionable(expr[2])
    if kind in ("wedge", "sym"):
        return x_actionable(expr[2])
    if kind == "dsum":
        return all(x_actionable(p) for p in expr[1:])
    if kind in ("U", "Ubar", "wedge3H_mod_H", "freelie3"):
        return True
    if kind in ("quotient_w2vv", "W", "Wbar"):
        return False
    raise ValueError(f"unknown expression {expr!r}")


# ---------------------------------------------------------------------------

class SpaceError(ValueError):
    pass


def _check_indices(g, *idx):
    for i in idx:
        if not 1 <= i <= g:
            raise SpaceError(f"generator index {i} out of range for g={g}")


class Space:
    """Common behaviour: indexed basis, weights, memoized action columns."""

    def __init__(self, expr, g: int):
        if g < 2:
            raise SpaceError("genus must be at least 2")
        self.expr = expr
        self.g = g
        self._cols: dict = {}

    # subclasses fill these in
    basis: list
    index: dict

    @property
    def dim(self) -> int:
        return len(self.basis)

    def weight_eps(self, i: int) -> tuple:
        raise NotImplementedError

    def _col(self, op, i: int) -> SparseVector:
        raise NotImplementedError

    def label_str(self, i: int) -> str:
        raise NotImplementedError

    # ---- public action API ------------------------------------------------

    def _validate_op(self, op):
        kind = op[0]
        if kind == "E":
            _check_indices(self.g, op[1], op[2])
            if op[1] == op[2]:
                raise SpaceError("E(i,i) is not an off-diagonal generator")
        elif kind == "X":
            _check_indices(self.g, op[1])
            if not x_actionable(self.expr):
                raise SpaceError(
                    f"X action unavailable on {expr_str(self.expr)}: "
                    "space is not built from full-H factors")
        elif kind == "swap":
            _check_indices(self.g, op[1], op[2])
            if op[1] == op[2]:
                raise SpaceError("swap(i,i) is trivial; indices must differ")
        elif kind == "transv":
            _check_indices(self.g, op[1], op[2])
        else:
            raise SpaceError(f"unknown operator {op!r}")

    def act_col(self, op, i: int) -> SparseVector:
        key = (op, i)
        col = self._cols.get(key)
        if col is None:
            col = self._col(op, i)
            self._cols[key] = col
        return col

    def act(self, op, v: SparseVector) -> SparseVector:
        self._validate_op(op)
        acc: dict[int, Fraction] = {}
        for i, c in v:
            for j, a in self.act_col(op, i):
                s = acc.get(j, 0) + c * a
                if s:
                    acc[j] = s
                else:
                    acc.pop(j, None)
        return SparseVector(acc)

    def weight_fund(self, i: int) -> tuple:
        return wt.fund_from_eps_a(self.weight_eps(i))

    def vector_weight_eps(self, v: SparseVector) -> tuple:
        """Common raw epsilon weight of a homogeneous vector (canonical A form)."""
        ws = {wt.canon_a(self.weight_eps(i)) for i, _ in v}
        if len(ws) != 1:
            raise SpaceError(f"vector is not weight-homogeneous: {sorted(ws)}")
        return next(iter(ws))

    def str_vector(self, v: SparseVector) -> str:
        if not v:
            return "0"
        bits = []
        for i in v.support():
            c = v[i]
            bits.append(f"({c})*{self.label_str(i)}")
        return " + ".join(bits)


_DERIVATIONS = ("E", "X")


def _is_derivation(op) -> bool:
    return op[0] in _DERIVATIONS


# ---------------------------------------------------------------------------
# leaves

class LeafSpace(Space):
    def __init__(self, expr, g):
        super().__init__(expr, g)
        kind = expr[0]
        labels = []
        if kind in ("V", "H"):
            labels += [("a", i) for i in range(1, g + 1)]
        if kind in ("dualV", "H"):
            labels += [("b", i) for i in range(1, g + 1)]
        self.basis = labels
        self.index = {lab: i for i, lab in enumerate(labels)}

    def weight_eps(self, i):
        side, k = self.basis[i]
        e = [0] * self.g
        e[k - 1] = 1 if side == "a" else -1
        return tuple(e)

    def label_str(self, i):
        side, k = self.basis[i]
        return f"{side}{k}"

    def _leaf_image(self, op, lab) -> list[tuple[tuple, Fraction]]:
        side, k = lab
        kind = op[0]
        one = Fraction(1)
        if kind == "E":
            _, i, j = op
            if side == "a":
                return [(("a", i), one)] if k == j else []
            return [(("b", j), -one)] if k == i else []
        if kind == "X":
            if side == "a" and k == op[1]:
                return [(("b", k), one)]
            return []
        if kind == "swap":
            _, i, j = op
            m = j if k == i else (i if k == j else k)
            return [((side, m), one)]
        if kind == "transv":
            _, i, j = op
            if side == "b":
                return [(lab, one)]
            if i == j:
                return [(lab, one)] + ([(("b", i), one)] if k == i else [])
            extra = []
            if k == i:
                extra = [(("b", j), one)]
            elif k == j:
                extra = [(("b", i), one)]
            return [(lab, one)] + extra
        raise SpaceError(f"unknown operator {op!r}")

    def _col(self, op, i):
        lab = self.basis[i]
        out = []
        for lab2, c in self._leaf_image(op, lab):
            j = self.index.get(lab2)
            if j is None:
                raise SpaceError(
                    f"operator {op!r} leaves {expr_str(self.expr)}: "
                    f"{self.label_str(i)} hits {lab2}")
            out.append((j, c))
        return vec_from_pairs(out)


# ---------------------------------------------------------------------------
# composite helpers

def _wedge_merge(t: tuple, pos: int, new: int) -> tuple[tuple, int] | None:
    """Replace t[pos] by `new` in a strict wedge monomial; (sorted tuple, sign)."""
    rest = t[:pos] + t[pos + 1:]
    if new in rest:
        return None
    out = []
    sign = 1
    placed = False
    moves = 0
    for x in rest:
        if not placed and new < x:
            out.append(new)
            placed = True
        out.append(x)
    if not placed:
        out.append(new)
    # parity: elements jumped over, relative to original slot
    old_rank = pos
    new_rank = out.index(new)
    sign = -1 if (old_rank + new_rank) % 2 else 1
    return tuple(out), sign


def wedge_of_vectors(vecs: list[SparseVector]) -> dict[tuple, Fraction]:
    """Exterior product of vectors over a common inner space, as a monomial dict."""
    acc: dict[tuple, Fraction] = {(): Fraction(1)}
    for v in vecs:
        nxt: dict[tuple, Fraction] = {}
        for t, c in acc.items():
            for i, a in v:
                if i in t:
                    continue
                # insert i into sorted t
                out = []
                sign = 1
                placed = False
                for pos, x in enumerate(t):
                    if not placed and i < x:
                        out.append(i)
                        placed = True
                        sign = -1 if (len(t) - pos) % 2 else 1
                    out.append(x)
                if not placed:
                    out.append(i)
                    sign = 1
                key = tuple(out)
                s = nxt.get(key, 0) + sign * c * a
                if s:
                    nxt[key] = s
                else:
                    nxt.pop(key, None)
        acc = nxt
    return acc


def _distinct_perms(t: tuple) -> list[tuple]:
    from itertools import permutations
    return sorted(set(permutations(t)))


# ---------------------------------------------------------------------------

class TensorSpace(Space):
    def __init__(self, expr, g, left: Space, right: Space):
        super().__init__(expr, g)
        self.left = left
        self.right = right
        self.basis = [(i, j) for i in range(left.dim) for j in range(right.dim)]
        self.index = {lab: i for i, lab in enumerate(self.basis)}

    def weight_eps(self, i):
        a, b = self.basis[i]
        return wt.eps_add(self.left.weight_eps(a), self.right.weight_eps(b))

    def label_str(self, i):
        a, b = self.basis[i]
        return f"[{self.left.label_str(a)}]x[{self.right.label_str(b)}]"

    def _col(self, op, i):
        a, b = self.basis[i]
        pairs = []
        if _is_derivation(op):
            for a2, c in self.left.act_col(op, a):
                pairs.append((self.index[(a2, b)], c))
            for b2, c in self.right.act_col(op, b):
                pairs.append((self.index[(a, b2)], c))
        else:
            for a2, ca in self.left.act_col(op, a):
                for b2, cb in self.right.act_col(op, b):
                    pairs.append((self.index[(a2, b2)], ca * cb))
        return vec_from_pairs(pairs)


class WedgeSpace(Space):
    def __init__(self, expr, g, k: int, inner: Space):
        super().__init__(expr, g)
        if k < 1:
            raise SpaceError("wedge power must be at least 1")
        self.k = k
        self.inner = inner
        self.basis = list(combinations(range(inner.dim), k))
        self.index = {lab: i for i, lab in enumerate(self.basis)}

    def weight_eps(self, i):
        t = self.basis[i]
        e = (0,) * self.g
        for x in t:
            e = wt.eps_add(e, self.inner.weight_eps(x))
        return e

    def label_str(self, i):
        t = self.basis[i]
        inner = self.inner
        sep = "^"
        return sep.join(f"[{inner.label_str(x)}]" if not isinstance(inner, LeafSpace)
                        else inner.label_str(x) for x in t)

    def _col(self, op, i):
        t = self.basis[i]
        pairs = []
        if _is_derivation(op):
            for pos in range(len(t)):
                for x2, c in self.inner.act_col(op, t[pos]):
                    merged = _wedge_merge(t, pos, x2)
                    if merged is None:
                        continue
                    key, sign = merged
                    pairs.append((self.index[key], sign * c))
        else:
            cols = [self.inner.act_col(op, x) for x in t]
            for key, c in wedge_of_vectors(cols).items():
                pairs.append((self.index[key], c))
        return vec_from_pairs(pairs)


class SymSpace(Space):
    """Sym^k via non-decreasing monomials = sums over distinct permutations."""

    def __init__(self, expr, g, k: int, inner: Space):
        super().__init__(expr, g)
        if k < 1:
            raise SpaceError("sym power must be at least 1")
        self.k = k
        self.inner = inner
        self.basis = list(combinations_with_replacement(range(inner.dim), k))
        self.index = {lab: i for i, lab in enumerate(self.basis)}

    def weight_eps(self, i):
        t = self.basis[i]
        e = (0,) * self.g
        for x in t:
            e = wt.eps_add(e, self.inner.weight_eps(x))
        return e

    def label_str(self, i):
        t = self.basis[i]
        return "sym(" + ",".join(self.inner.label_str(x) for x in t) + ")"

    def _col(self, op, i):
        # expand into ordered tensor words, act there, read sorted representatives
        t = self.basis[i]
        ordered: dict[tuple, Fraction] = {}
        if _is_derivation(op):
            for p in _distinct_perms(t):
                for pos in range(len(p)):
                    for x2, c in self.inner.act_col(op, p[pos]):
                        q = p[:pos] + (x2,) + p[pos + 1:]
                        s = ordered.get(q, 0) + c
                        if s:
                            ordered[q] = s
                        else:
                            ordered.pop(q, None)
        else:
            for p in _distinct_perms(t):
                partial: dict[tuple, Fraction] = {(): Fraction(1)}
                for x in p:
                    nxt: dict[tuple, Fraction] = {}
                    for word, c in partial.items():
                        for x2, a in self.inner.act_col(op, x):
                            q = word + (x2,)
                            s = nxt.get(q, 0) + c * a
                            if s:
                                nxt[q] = s
                    partial = nxt
                for q, c in partial.items():
                    s = ordered.get(q, 0) + c
                    if s:
                        ordered[q] = s
                    else:
                        ordered.pop(q, None)
        pairs = []
        for q, c in ordered.items():
            if q == tuple(sorted(q)):
                pairs.append((self.index[q], c))
        return vec_from_pairs(pairs)


class DirectSumSpace(Space):
    def __init__(self, expr, g, parts: list[Space]):
        super().__init__(expr, g)
        self.parts = parts
        self.basis = [(s, i) for s, p in enumerate(parts) for i in range(p.dim)]
        self.index = {lab: i for i, lab in enumerate(self.basis)}

    def weight_eps(self, i):
        s, j = self.basis[i]
        return self.parts[s].weight_eps(j)

    def label_str(self, i):
        s, j = self.basis[i]
        return f"<{s}:{self.parts[s].label_str(j)}>"

    def _col(self, op, i):
        s, j = self.basis[i]
        return vec_from_pairs(
            (self.index[(s, j2)], c) for j2, c in self.parts[s].act_col(op, j))

    def inject(self, slot: int, v: SparseVector) -> SparseVector:
        return vec_from_pairs((self.index[(slot, i)], c) for i, c in v)


class MonoSubspace(Space):
    """Subspace of a monomial space spanned by a subset of its basis monomials."""

    def __init__(self, expr, g, ambient: Space, keep: list[int]):
        super().__init__(expr, g)
        self.ambient = ambient
        self.basis = list(keep)
        self.index = {amb: i for i, amb in enumerate(self.basis)}

    def weight_eps(self, i):
        return self.ambient.weight_eps(self.basis[i])

    def label_str(self, i):
        return self.ambient.label_str(self.basis[i])

    def to_ambient(self, v: SparseVector) -> SparseVector:
        return vec_from_pairs((self.basis[i], c) for i, c in v)

    def from_ambient(self, v: SparseVector) -> SparseVector:
        pairs = []
        for amb, c in v:
            i = self.index.get(amb)
            if i is None:
                raise SpaceError(
                    f"vector leaves subspace {expr_str(self.expr)} at "
                    f"{self.ambient.label_str(amb)}")
            pairs.append((i, c))
        return vec_from_pairs(pairs)

    def _col(self, op, i):
        return self.from_ambient(self.ambient.act_col(op, self.basis[i]))


class VectorSubspace(Space):
    """Subspace with an explicit (typically non-monomial) basis.

    Basis vectors must be weight-homogeneous.  Actions evaluate in the
    ambient space and re-coordinate through a cached echelon solver; the
    subspace must be closed under whatever operators are applied to it.
    """

    def __init__(self, expr, g, ambient: Space, labels: list, vectors: list[SparseVector]):
        super().__init__(expr, g)
        self.ambient = ambient
        self.basis = list(labels)
        self.index = {lab: i for i, lab in enumerate(labels)}
        self.vectors = list(vectors)
        self._weights = []
        for v in vectors:
            ws = {ambient.weight_eps(i) for i, _ in v}
            if len(ws) != 1:
                raise SpaceError("subspace basis vector is not weight-homogeneous")
            self._weights.append(next(iter(ws)))
        # echelon rows over the ambient basis, with coordinates back to self
        self._rows: dict[int, tuple[dict, dict]] = {}
        for idx, v in enumerate(vectors):
            cur = dict(v.entries)
            coords = {idx: Fraction(1)}
            self._reduce_inplace(cur, coords)
            if not cur:
                raise SpaceError("subspace basis is linearly dependent")
            lead = min(cur)
            inv = 1 / cur[lead]
            self._rows[lead] = ({c: a * inv for c, a in cur.items()},
                                {c: a * inv for c, a in coords.items()})

    def _reduce_inplace(self, cur: dict, coords: dict):
        while cur:
            lead = min(cur)
            row = self._rows.get(lead)
            if row is None:
                return
            coeff = cur[lead]
            rvec, rcoords = row
            for c, a in rvec.items():
                s = cur.get(c, 0) - coeff * a
                if s:
                    cur[c] = s
                else:
                    cur.pop(c, None)
            for c, a in rcoords.items():
                s = coords.get(c, 0) - coeff * a
                if s:
                    coords[c] = s
                else:
                    coords.pop(c, None)

    def to_ambient(self, v: SparseVector) -> SparseVector:
        acc = SparseVector()
        for i, c in v:
            acc = acc + self.vectors[i].scale(c)
        return acc

    def from_ambient(self, v: SparseVector) -> SparseVector:
        cur = dict(v.entries)
        coords: dict[int, Fraction] = {}
        self._reduce_inplace(cur, coords)
        if cur:
            raise SpaceError(f"vector not in subspace {expr_str(self.expr)}")
        return SparseVector({i: -c for i, c in coords.items()})

    def contains_ambient(self, v: SparseVector) -> bool:
        cur = dict(v.entries)
        coords: dict[int, Fraction] = {}
        self._reduce_inplace(cur, coords)
        return not cur

    def weight_eps(self, i):
        return self._weights[i]

    def label_str(self, i):
        return str(self.basis[i])

    def _col(self, op, i):
        img = self.ambient.act(op, self.vectors[i])
        return self.from_ambient(img)


class CosetQuotient(Space):
    """Quotient of a monomial space by a relation span, via complement monomials.

    The basis is the set of ambient monomials that are not echelon pivots
    of the relation span; reduction rewrites pivot monomials into the
    complement.  Relations must be weight-homogeneous.
    """

    def __init__(self, expr, g, ambient: Space, relations: list[SparseVector]):
        super().__init__(expr, g)
        self.ambient = ambient
        self.span = Span()
        for r in relations:
            ws = {ambient.weight_eps(i) for i, _ in r}
            if len(ws) > 1:
                raise SpaceError("quotient relation is not weight-homogeneous")
            self.span.add(r)
        pivots = set(self.span.rows)
        self.basis = [i for i in range(ambient.dim) if i not in pivots]
        self.index = {amb: i for i, amb in enumerate(self.basis)}

    def weight_eps(self, i):
        return self.ambient.weight_eps(self.basis[i])

    def label_str(self, i):
        return "[" + self.ambient.label_str(self.basis[i]) + "]"

    def reduce_ambient(self, v: SparseVector) -> SparseVector:
        res = self.span.reduce(v)
        return vec_from_pairs((self.index[amb], c) for amb, c in res.items())

    def _col(self, op, i):
        img = self.ambient.act_col(op, self.basis[i])
        return self.reduce_ambient(img)


class FreeLie3Space(Space):
    """Degree-3 part of the free Lie algebra on the 2g generators of H.

    Basis: left-normed brackets [[u_a, u_b], u_c] with a > b and c >= b
    over the generator order a_1 < ... < a_g < b_1 < ... < b_g.
    """

    def __init__(self, expr, g):
        super().__init__(expr, g)
        self.h = LeafSpace(H, g)
        n = 2 * g
        self.basis = [(a, b, c)
                      for a in range(n) for b in range(n) for c in range(n)
                      if a > b and c >= b]
        self.basis.sort()
        self.index = {lab: i for i, lab in enumerate(self.basis)}

    def weight_eps(self, i):
        a, b, c = self.basis[i]
        e = self.h.weight_eps(a)
        e = wt.eps_add(e, self.h.weight_eps(b))
        return wt.eps_add(e, self.h.weight_eps(c))

    def label_str(self, i):
        a, b, c = self.basis[i]
        ls = self.h.label_str
        return f"[[{ls(a)},{ls(b)}],{ls(c)}]"

    def canon_bracket(self, a: int, b: int, c: int) -> list[tuple[tuple, int]]:
        """[[u_a,u_b],u_c] as a signed combination of basis triples."""
        if a == b:
            return []
        if a < b:
            return [(t, -s) for t, s in self.canon_bracket(b, a, c)]
        if c >= b:
            return [((a, b, c), 1)]
        # Jacobi: [[a,b],c] = [[a,c],b] - [[b,c],a], both right-normalized
        out = []
        out.extend(self.canon_bracket(a, c, b))
        out.extend((t, -s) for t, s in self.canon_bracket(b, c, a))
        return out

    def from_triples(self, terms: list[tuple[int, int, int, Fraction]]) -> SparseVector:
        """Sum of coeff * [[u_a,u_b],u_c] canonicalized into the basis."""
        pairs = []
        for a, b, c, coeff in terms:
            for t, s in self.canon_bracket(a, b, c):
                pairs.append((self.index[t], s * coeff))
        return vec_from_pairs(pairs)

    def _col(self, op, i):
        if not _is_derivation(op) and op[0] != "swap":
            raise SpaceError("only E/X/swap act on the free Lie space")
        a, b, c = self.basis[i]
        terms = []
        if _is_derivation(op):
            for pos, x in enumerate((a, b, c)):
                for x2, coeff in self.h.act_col(op, x):
                    tr = [a, b, c]
                    tr[pos] = x2
                    terms.append((tr[0], tr[1], tr[2], coeff))
        else:
            imgs = [self.h.act_col(op, x) for x in (a, b, c)]
            (a2, ca), = list(imgs[0])
            (b2, cb), = list(imgs[1])
            (c2, cc), = list(imgs[2])
            terms.append((a2, b2, c2, ca * cb * cc))
        return self.from_triples(terms)


# ---------------------------------------------------------------------------
# named derived spaces

def _build_u(g) -> MonoSubspace:
    amb = build(wedge(3, H), g)
    keep = []
    for i, t in enumerate(amb.basis):
        if any(amb.inner.basis[x][0] == "b" for x in t):
            keep.append(i)
    return MonoSubspace(U_SPACE, g, amb, keep)


def _ubar_family_vectors(g, amb: WedgeSpace):
    """Monomial and corrected families spanning ker C_3 inside wedge^3 H.

    Monomial part: all wedge monomials avoiding matched pairs {a_i, b_i}.
    Corrected part: qa(i,j) = a_i^a_j^b_j - (1/(g-1)) a_i^omega and the
    b-version qb(i,j), for j != i, skipping the largest admissible j for
    each i (the full family per i sums to zero, so one member is redundant).
    """
    leaf = amb.inner
    a = {i: leaf.index[("a", i)] for i in range(1, g + 1)}
    b = {i: leaf.index[("b", i)] for i in range(1, g + 1)}

    mono_idx = []
    for i, t in enumerate(amb.basis):
        sides = [leaf.basis[x] for x in t]
        matched = any(s == "a" and ("b", k) in sides for s, k in sides)
        if not matched:
            mono_idx.append(i)

    def wedge_h(idxs) -> SparseVector:
        d = wedge_of_vectors([SparseVector.basis(x) for x in idxs])
        return vec_from_pairs((amb.index[t], c) for t, c in d.items())

    def x_wedge_omega(xidx) -> SparseVector:
        acc = SparseVector()
        for k in range(1, g + 1):
            d = wedge_of_vectors([SparseVector.basis(xidx),
                                  SparseVector.basis(a[k]),
                                  SparseVector.basis(b[k])])
            acc = acc + vec_from_pairs((amb.index[t], c) for t, c in d.items())
        return acc

    corr = []
    for side, gens in (("qa", a), ("qb", b)):
        for i in range(1, g + 1):
            others = [j for j in range(1, g + 1) if j != i]
            for j in others[:-1]:
                mono = wedge_h([gens[i], a[j], b[j]])
                vec = mono - x_wedge_omega(gens[i]).scale(Fraction(1, g - 1))
                corr.append(((side, i, j), vec))
    return mono_idx, corr


def _build_kerc3(expr, g, include_triple_a: bool):
    amb = build(wedge(3, H), g)
    mono_idx, corr = _ubar_family_vectors(g, amb)
    leaf = amb.inner
    labels, vectors = [], []
    for i in mono_idx:
        t = amb.basis[i]
        all_a = all(leaf.basis[x][0] == "a" for x in t)
        if all_a and not include_triple_a:
            continue
        labels.append(("m", t))
        vectors.append(SparseVector.basis(i))
    for lab, vec in corr:
        labels.append(lab)
        vectors.append(vec)
    space = VectorSubspace(expr, g, amb, labels, vectors)
    return space


def _build_quot_w2vv(g) -> CosetQuotient:
    amb = build(tensor(wedge(2, V), V), g)
    w2v = amb.left
    vleaf = amb.right
    rels = []
    for i, j, k in combinations(range(1, g + 1), 3):
        def m(p, q, r):
            wi = w2v.index[(vleaf.index[("a", p)], vleaf.index[("a", q)])]
            return amb.index[(wi, vleaf.index[("a", r)])]
        rels.append(vec_from_pairs([
            (m(i, j, k), Fraction(1)),
            (m(j, k, i), Fraction(1)),
            (m(i, k, j), Fraction(-1)),
        ]))
    return CosetQuotient(QUOT_W2VV, g, amb, rels)


def _build_wbar_first(g) -> CosetQuotient:
    amb = build(tensor(wedge(2, V), DUALV), g)
    w2v = amb.left
    vleaf = w2v.inner
    dleaf = amb.right
    rels = []
    for k in range(1, g + 1):
        pairs = []
        for j in range(1, g + 1):
            if j == k:
                continue
            p, q = sorted((k, j))
            sign = 1 if k == p else -1
            wi = w2v.index[(vleaf.index[("a", p)], vleaf.index[("a", q)])]
            pairs.append((amb.index[(wi, dleaf.index[("b", j)])], Fraction(sign)))
        rels.append(vec_from_pairs(pairs))
    return CosetQuotient(("Wbar_first",), g, amb, rels)


_CACHE: dict = {}


def build(expr, g: int) -> Space:
    """Construct the space for a module expression at genus g (cached)."""
    key = (expr, g)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    kind = expr[0]
    if kind in _LEAF_KINDS:
        sp = LeafSpace(expr, g)
    elif kind == "tensor":
        sp = TensorSpace(expr, g, build(expr[1], g), build(expr[2], g))
    elif kind == "wedge":
        sp = WedgeSpace(expr, g, expr[1], build(expr[2], g))
    elif kind == "sym":
        sp = SymSpace(expr, g, expr[1], build(expr[2], g))
    elif kind == "dsum":
        sp = DirectSumSpace(expr, g, [build(p, g) for p in expr[1:]])
    elif kind == "U":
        sp = _build_u(g)
    elif kind == "Ubar":
        sp = _build_kerc3(UBAR, g, include_triple_a=False)
    elif kind == "wedge3H_mod_H":
        sp = _build_kerc3(WEDGE3H_MOD_H, g, include_triple_a=True)
    elif kind == "quotient_w2vv":
        sp = _build_quot_w2vv(g)
    elif kind == "W":
        sp = DirectSumSpace(W_SPACE, g,
                            [build(tensor(wedge(2, V), DUALV), g),
                             build(sym(2, DUALV), g)])
        sp.expr = W_SPACE
    elif kind == "Wbar":
        sp = DirectSumSpace(WBAR, g,
                            [_build_wbar_first(g), build(sym(2, DUALV), g)])
        sp.expr = WBAR
    elif kind == "freelie3":
        sp = FreeLie3Space(FREELIE3, g)
    else:
        raise SpaceError(f"unknown module expression {expr!r}")
    _CACHE[key] = sp
    return sp


def expected_dim(expr, g: int) -> int:
    """Independent combinatorial dimension count, used for build audits."""
    from math import comb
    kind = expr[0]
    if kind in ("V", "dualV"):
        return g
    if kind == "H":
        return 2 * g
    if kind == "tensor":
        return expected_dim(expr[1], g) * expected_dim(expr[2], g)
    if kind == "wedge":
        return comb(expected_dim(expr[2], g), expr[1])
    if kind == "sym":
        return comb(expected_dim(expr[2], g) + expr[1] - 1, expr[1])
    if kind == "dsum":
        return sum(expected_dim(p, g) for p in expr[1:])
    if kind == "U":
        return comb(2 * g, 3) - comb(g, 3)
    if kind == "Ubar":
        return comb(2 * g, 3) - comb(g, 3) - 2 * g
    if kind == "wedge3H_mod_H":
        return comb(2 * g, 3) - 2 * g
    if kind == "quotient_w2vv":
        return comb(g, 2) * g - comb(g, 3)
    if kind == "W":
        return comb(g, 2) * g + g * (g + 1) // 2
    if kind == "Wbar":
        return comb(g, 2) * g - g + g * (g + 1) // 2
    if kind == "freelie3":
        n = 2 * g
        return (n ** 3 - n) // 3
    raise SpaceError(f"unknown module expression {expr!r}")
