"""Irreducible decompositions, branching, and highest-weight-vector solving.

Two independent routes exist for decomposing a constructed space:

* greedy character subtraction (Freudenthal characters), and
* raising-operator kernels per dominant weight space.

They are cross-checked against each other in the test suite; the first is
the fast path for large modules, the second produces explicit witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import weights as wt
from .characters import (Character, IrrepLabel, irrep_character, label_from_eps,
                         module_character, pad_c_label, weyl_dim)
from .linalg import SparseMatrix, SparseVector, Span, kernel_basis, vec_from_pairs
from .spaces import Space


class Decomposition:
    """Multiset of irreducible labels with multiplicities."""

    def __init__(self, items: dict[IrrepLabel, int] | None = None):
        self.items: dict[IrrepLabel, int] = {}
        for lab, m in (items or {}).items():
            if m:
                self.items[lab] = m

    def add(self, label: IrrepLabel, mult: int = 1):
        m = self.items.get(label, 0) + mult
        if m:
            self.items[label] = m
        else:
            del self.items[label]

    def mult(self, label: IrrepLabel) -> int:
        return self.items.get(label, 0)

    def total_dim(self, g: int) -> int:
        return sum(m * weyl_dim(lab, g) for lab, m in self.items.items())

    def __eq__(self, other):
        return isinstance(other, Decomposition) and self.items == other.items

    def __len__(self):
        return len(self.items)

    def plus(self, other: "Decomposition", mult: int = 1) -> "Decomposition":
        out = Decomposition(self.items)
        for lab, m in other.items.items():
            out.add(lab, m * mult)
        return out

    def minus(self, other: "Decomposition") -> "Decomposition":
        out = Decomposition(self.items)
        for lab, m in other.items.items():
            out.add(lab, -m)
        if any(m < 0 for m in out.items.values()):
            raise ValueError("decomposition difference has negative multiplicity")
        return out

    def contains(self, other: "Decomposition") -> bool:
        return all(self.mult(lab) >= m for lab, m in other.items.items())

    def sorted_items(self) -> list[tuple[IrrepLabel, int]]:
        return sorted(self.items.items(), key=lambda lm: (lm[0].algebra, lm[0].w))

    def __repr__(self):
        bits = [f"{m}*{lab}" for lab, m in self.sorted_items()]
        return " + ".join(bits) if bits else "0"


@dataclass
class HwvWitness:
    """Basis of the highest-weight space at one dominant weight.

    Every vector is annihilated by all raising operators E_ij (i < j) and
    has the stated weight (fundamental coordinates).
    """

    weight: tuple
    vectors: list[SparseVector]


# ---------------------------------------------------------------------------

def decompose_character(ch: Character) -> Decomposition:
    """Greedy dominant-weight subtraction of Freudenthal characters.

    Raises ValueError if a subtraction would drive a multiplicity negative,
    which certifies the input was not the character of an actual module.
    """
    algebra, g = ch.algebra, ch.g
    if algebra == "A":
        is_dom, key = wt.is_dominant_eps_a, wt.height_key_a
    else:
        is_dom, key = wt.is_dominant_eps_c, wt.height_key_c
    rest = ch.copy()
    out = Decomposition()
    while rest.data:
        dominant = [w for w in rest.data if is_dom(w)]
        if not dominant:
            raise ValueError("nonempty character with no dominant weight: not a module character")
        top = max(dominant, key=key)
        mult = rest.data[top]
        label = label_from_eps(top, algebra)
        rest = rest.sub(irrep_character(label, g), mult)
        out.add(label, mult)
    return out


def decompose_space(space: Space, algebra: str = "A") -> Decomposition:
    return decompose_character(module_character(space, algebra))


# ---------------------------------------------------------------------------

def weight_space_indices(space: Space, eps_canon: tuple) -> list[int]:
    return [i for i in range(space.dim)
            if wt.canon_a(space.weight_eps(i)) == eps_canon]


def hwv_solve(space: Space, weight_fund: tuple) -> HwvWitness:
    """Joint kernel of all raising operators on one weight space.

    ``weight_fund`` is a dominant type A weight in fundamental coordinates.
    Returns the full highest-weight space basis in the space's canonical
    basis, deterministically ordered.
    """
    g = space.g
    if len(weight_fund) != g - 1 or any(x < 0 for x in weight_fund):
        raise ValueError(f"not a dominant fundamental weight for g={g}: {weight_fund}")
    target = wt.canon_a(wt.eps_from_fund_a(tuple(weight_fund)))
    cols = weight_space_indices(space, target)
    if not cols:
        return HwvWitness(tuple(weight_fund), [])
    entries = {}
    row_index: dict[tuple, int] = {}
    for t in range(1, g):
        op = ("E", t, t + 1)
        for c, i in enumerate(cols):
            for j, a in space.act_col(op, i):
                rk = row_index.setdefault((t, j), len(row_index))
                entries[(rk, c)] = a
    mat = SparseMatrix(len(row_index), len(cols), entries)
    kern = kernel_basis(mat)
    vectors = [vec_from_pairs((cols[i], a) for i, a in v) for v in kern]
    return HwvWitness(tuple(weight_fund), vectors)


def decompose_module(space: Space) -> tuple[Decomposition, list[HwvWitness]]:
    """Decomposition via raising-operator kernels, with explicit witnesses."""
    ch = module_character(space, "A")
    dominant = sorted((w for w in ch.data if wt.is_dominant_eps_a(w)),
                      key=wt.height_key_a, reverse=True)
    out = Decomposition()
    witnesses = []
    for eps in dominant:
        fund = wt.fund_from_eps_a(eps)
        wit = hwv_solve(space, fund)
        if wit.vectors:
            out.add(IrrepLabel("A", fund), len(wit.vectors))
            witnesses.append(wit)
    return out, witnesses


# ---------------------------------------------------------------------------

def tensor_decompose(l1: IrrepLabel, l2: IrrepLabel, g: int) -> Decomposition:
    if l1.algebra != l2.algebra:
        raise ValueError("tensor factors must share an algebra")
    ch = irrep_character(l1, g).tensor(irrep_character(l2, g))
    return decompose_character(ch)


def power_character(kind: str, k: int, ch: Character) -> Character:
    """Character of the k-th alternating or symmetric power (Newton recursion)."""
    if kind not in ("alt", "sym"):
        raise ValueError("power kind must be 'alt' or 'sym'")
    algebra, g = ch.algebra, ch.g
    trivial = Character(algebra, g, {(0,) * g: 1})
    powers: list[dict[tuple, Fraction]] = [dict((kk, Fraction(m)) for kk, m in trivial.data.items())]
    sign = -1 if kind == "alt" else 1
    for n in range(1, k + 1):
        acc: dict[tuple, Fraction] = {}
        for m in range(1, n + 1):
            pm = ch.stretched(m)
            coeff = Fraction(sign ** (m - 1), n)
            # pm (tensor) powers[n-m]
            for k1, c1 in pm.data.items():
                for k2, c2 in powers[n - m].items():
                    key = trivial.canon(wt.eps_add(k1, k2))
                    s = acc.get(key, Fraction(0)) + coeff * c1 * c2
                    if s:
                        acc[key] = s
                    else:
                        acc.pop(key, None)
        powers.append(acc)
    out = Character(algebra, g)
    for key, c in powers[k].items():
        if c.denominator != 1:
            raise ValueError(f"non-integral multiplicity {c} at {key} in {kind}^{k}")
        if c:
            out.add_weight(key, int(c))
    return out


def power_decompose(kind: str, k: int, label: IrrepLabel, g: int) -> Decomposition:
    return decompose_character(power_character(kind, k, irrep_character(label, g)))


def branch_c_to_a(label: IrrepLabel, g: int) -> Decomposition:
    """Restrict a type C irreducible along the GL block embedding and decompose.

    The restriction is the identity on epsilon coordinates (a_i keeps
    weight e_i, b_i keeps -e_i), so branching is pure bookkeeping on the
    character followed by type A decomposition.
    """
    if label.algebra != "C":
        raise ValueError("branch_c_to_a expects a type C label")
    ch = irrep_character(pad_c_label(label, g), g)
    out = Character("A", g)
    for eps, m in ch.data.items():
        out.add_weight(eps, m)
    dec = decompose_character(out)
    assert dec.total_dim(g) == weyl_dim(label, g)
    return dec


# ---------------------------------------------------------------------------

def _closure_ops(g):
    ops = []
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            if i != j:
                ops.append(("E", i, j))
    for i in range(1, g + 1):
        for j in range(i + 1, g + 1):
            ops.append(("swap", i, j))
    return ops


def generated_submodule(v: SparseVector, space: Space) -> tuple[int, Decomposition]:
    """Smallest subspace containing v closed under all E_ij and handleswaps.

    Returns its dimension and type A decomposition (the closure is stable
    under the torus, so its character is the sum of per-weight ranks).
    """
    ops = _closure_ops(space.g)
    span = Span()
    frontier = []
    if span.add(v):
        frontier.append(v)
    while frontier:
        nxt = []
        for w in frontier:
            for op in ops:
                u = space.act(op, w)
                if u and span.add(u):
                    nxt.append(u)
        frontier = nxt
    # weight-split the echelon rows to get the character of the closure
    per_weight: dict[tuple, Span] = {}
    for row in span.vectors():
        comps: dict[tuple, list] = {}
        for i, c in row:
            comps.setdefault(wt.canon_a(space.weight_eps(i)), []).append((i, c))
        for eps, pairs in comps.items():
            per_weight.setdefault(eps, Span()).add(vec_from_pairs(pairs))
    ch = Character("A", space.g)
    for eps, sp in per_weight.items():
        ch.add_weight(eps, sp.dim)
    assert ch.mass() == span.dim
    return span.dim, decompose_character(ch)
