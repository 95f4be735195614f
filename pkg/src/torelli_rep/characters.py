"""Formal characters and irreducible characters for types A_{g-1} and C_g.

Weights are handled in epsilon coordinates throughout (see weights.py);
fundamental coordinates appear only at API boundaries.  Irreducible
characters are computed by the Freudenthal multiplicity recursion on the
dominant cone, then spread over Weyl orbits; results are memoized per
label (and optionally on disk, keyed by the TORELLI_REP_CACHE env var).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import weights as wt


@dataclass(frozen=True)
class IrrepLabel:
    """Highest-weight label: algebra 'A' (rank g-1) or 'C' (rank g).

    Type C labels are stored full length; trailing zeros are trimmed only
    for display.
    """

    algebra: str
    w: tuple

    def __post_init__(self):
        if self.algebra not in ("A", "C"):
            raise ValueError(f"unknown algebra tag {self.algebra!r}")
        if any(x < 0 for x in self.w):
            raise ValueError(f"highest weight must be nonnegative: {self.w}")

    def __str__(self):
        if self.algebra == "A":
            return "Phi[" + ",".join(map(str, self.w)) + "]"
        w = list(self.w)
        while len(w) > 1 and w[-1] == 0:
            w.pop()
        return "Gamma[" + ",".join(map(str, w)) + "]"


def phi(*w) -> IrrepLabel:
    return IrrepLabel("A", tuple(w))


def gamma(*w) -> IrrepLabel:
    return IrrepLabel("C", tuple(w))


def pad_c_label(label: IrrepLabel, g: int) -> IrrepLabel:
    if label.algebra != "C":
        raise ValueError("pad_c_label expects a type C label")
    if len(label.w) > g:
        raise ValueError(f"label {label} too long for rank {g}")
    return IrrepLabel("C", label.w + (0,) * (g - len(label.w)))


def dual_label(label: IrrepLabel) -> IrrepLabel:
    """Type A duality reverses the coordinate string; type C is self-dual."""
    if label.algebra == "A":
        return IrrepLabel("A", tuple(reversed(label.w)))
    return label


class Character:
    """Finite multiset of weights with positive integer multiplicities.

    For algebra 'A' the keys are canonical epsilon tuples (min entry 0);
    for 'C' they are honest integer g-tuples.
    """

    __slots__ = ("algebra", "g", "data")

    def __init__(self, algebra: str, g: int, data: dict | None = None):
        self.algebra = algebra
        self.g = g
        self.data: dict[tuple, int] = dict(data or {})

    def canon(self, eps: tuple) -> tuple:
        return wt.canon_a(eps) if self.algebra == "A" else tuple(eps)

    def add_weight(self, eps: tuple, mult: int = 1):
        key = self.canon(eps)
        m = self.data.get(key, 0) + mult
        if m:
            self.data[key] = m
        else:
            del self.data[key]

    def mass(self) -> int:
        return sum(self.data.values())

    def copy(self) -> "Character":
        return Character(self.algebra, self.g, self.data)

    def __eq__(self, other):
        return (isinstance(other, Character) and self.algebra == other.algebra
                and self.g == other.g and self.data == other.data)

    def sub(self, other: "Character", mult: int = 1) -> "Character":
        """self - mult*other; raises if any multiplicity would go negative."""
        out = dict(self.data)
        for k, m in other.data.items():
            r = out.get(k, 0) - mult * m
            if r < 0:
                raise ValueError(
                    f"character subtraction underflow at weight {k}: not a module character")
            if r:
                out[k] = r
            else:
                out.pop(k, None)
        return Character(self.algebra, self.g, out)

    def plus(self, other: "Character", mult: int = 1) -> "Character":
        out = dict(self.data)
        for k, m in other.data.items():
            r = out.get(k, 0) + mult * m
            if r:
                out[k] = r
            else:
                out.pop(k, None)
        return Character(self.algebra, self.g, out)

    def dual(self) -> "Character":
        out = Character(self.algebra, self.g)
        for k, m in self.data.items():
            out.add_weight(tuple(-x for x in k), m)
        return out

    def stretched(self, n: int) -> "Character":
        """Weights scaled by n (the power-sum operation on characters)."""
        out = Character(self.algebra, self.g)
        for k, m in self.data.items():
            out.add_weight(tuple(n * x for x in k), m)
        return out

    def tensor(self, other: "Character") -> "Character":
        out = Character(self.algebra, self.g)
        for k1, m1 in self.data.items():
            for k2, m2 in other.data.items():
                out.add_weight(wt.eps_add(k1, k2), m1 * m2)
        return out

    def __repr__(self):
        return f"Character({self.algebra}{self.g}, mass={self.mass()}, support={len(self.data)})"


# ---------------------------------------------------------------------------
# root data

def _roots_a(g):
    pos = []
    for i in range(g):
        for j in range(i + 1, g):
            r = [0] * g
            r[i], r[j] = 1, -1
            pos.append(tuple(r))
    simple = []
    for i in range(g - 1):
        r = [0] * g
        r[i], r[i + 1] = 1, -1
        simple.append(tuple(r))
    rho = tuple(range(g - 1, -1, -1))
    return pos, simple, rho


def _roots_c(g):
    pos = []
    for i in range(g):
        for j in range(i + 1, g):
            r = [0] * g
            r[i], r[j] = 1, -1
            pos.append(tuple(r))
            r = [0] * g
            r[i], r[j] = 1, 1
            pos.append(tuple(r))
    for i in range(g):
        r = [0] * g
        r[i] = 2
        pos.append(tuple(r))
    simple = []
    for i in range(g - 1):
        r = [0] * g
        r[i], r[i + 1] = 1, -1
        simple.append(tuple(r))
    r = [0] * g
    r[g - 1] = 2
    simple.append(tuple(r))
    rho = tuple(range(g, 0, -1))
    return pos, simple, rho


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _le_dominance(mu, lam, algebra) -> bool:
    """mu <= lam in the root order (both in epsilon coordinates)."""
    diff = [l - m for l, m in zip(lam, mu)]
    acc = 0
    for d in diff:
        acc += d
        if acc < 0:
            return False
    if algebra == "A":
        return acc == 0
    return acc % 2 == 0


def _highest_eps(label: IrrepLabel, g: int) -> tuple:
    if label.algebra == "A":
        if len(label.w) != g - 1:
            raise ValueError(f"type A label length {len(label.w)} != g-1 = {g - 1}")
        return wt.eps_from_fund_a(label.w)
    label = pad_c_label(label, g)
    return wt.eps_from_fund_c(label.w)


def weyl_dim(label: IrrepLabel, g: int) -> int:
    """Exact dimension by the Weyl product formula."""
    lam = _highest_eps(label, g)
    if label.algebra == "A":
        l = [lam[i] + (g - 1 - i) for i in range(g)]
        num = den = 1
        for i in range(g):
            for j in range(i + 1, g):
                num *= l[i] - l[j]
                den *= j - i
    else:
        l = [lam[i] + (g - i) for i in range(g)]
        m = [g - i for i in range(g)]
        num = den = 1
        for i in range(g):
            num *= l[i]
            den *= m[i]
            for j in range(i + 1, g):
                num *= (l[i] - l[j]) * (l[i] + l[j])
                den *= (m[i] - m[j]) * (m[i] + m[j])
    q, r = divmod(num, den)
    assert r == 0
    return q


def _weight_set(lam, algebra, simple):
    """All weights of the irrep with highest weight lam (saturation + BFS)."""
    dom_rep = wt.dom_rep_a if algebra == "A" else wt.dom_rep_c
    if algebra == "A":
        # keep the fixed coordinate sum; dominant rep must be re-shifted to it
        total = sum(lam)

        def rep(nu):
            s = sorted(nu, reverse=True)
            return tuple(s)
    else:
        def rep(nu):
            return wt.dom_rep_c(nu)

    seen = {lam}
    frontier = [lam]
    while frontier:
        nxt = []
        for nu in frontier:
            for alpha in simple:
                cand = tuple(n - a for n, a in zip(nu, alpha))
                if cand in seen:
                    continue
                if _le_dominance(rep(cand), lam, algebra):
                    seen.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return seen


def _freudenthal(label: IrrepLabel, g: int) -> dict[tuple, int]:
    """Dominant weight multiplicities of the irreducible with this label."""
    algebra = label.algebra
    lam = _highest_eps(label, g)
    pos, simple, rho = _roots_a(g) if algebra == "A" else _roots_c(g)
    weight_set = _weight_set(lam, algebra, simple)

    if algebra == "A":
        def rep(nu):
            return tuple(sorted(nu, reverse=True))
    else:
        rep = wt.dom_rep_c

    dominants = sorted({rep(nu) for nu in weight_set},
                       key=lambda t: _dot(t, rho), reverse=True)
    lam_rho = tuple(l + r for l, r in zip(lam, rho))
    n_lam = _dot(lam_rho, lam_rho)
    mult: dict[tuple, int] = {lam: 1}
    for mu in dominants:
        if mu == lam:
            continue
        mu_rho = tuple(m + r for m, r in zip(mu, rho))
        den = n_lam - _dot(mu_rho, mu_rho)
        num = 0
        for alpha in pos:
            k = 1
            while True:
                nu = tuple(m + k * a for m, a in zip(mu, alpha))
                if nu not in weight_set:
                    break
                num += mult[rep(nu)] * _dot(nu, alpha)
                k += 1
        q, r = divmod(2 * num, den)
        assert r == 0 and q > 0, (label, mu)
        mult[mu] = q
    return mult


def _distinct_permutations(items):
    """All distinct permutations of a sequence (multiset-aware)."""
    items = sorted(items)
    n = len(items)
    out = []

    def rec(prefix, remaining):
        if not remaining:
            out.append(tuple(prefix))
            return
        last = None
        for i, x in enumerate(remaining):
            if x == last:
                continue
            last = x
            rec(prefix + [x], remaining[:i] + remaining[i + 1:])

    rec([], items)
    return out


def _orbit(mu, algebra):
    """Full Weyl orbit of a dominant weight, in epsilon coordinates."""
    if algebra == "A":
        return _distinct_permutations(mu)
    out = []
    nz = [i for i, x in enumerate(set(mu)) if True]
    for perm in _distinct_permutations(mu):
        signs_positions = [i for i, x in enumerate(perm) if x != 0]
        for mask in range(1 << len(signs_positions)):
            v = list(perm)
            for t, i in enumerate(signs_positions):
                if mask >> t & 1:
                    v[i] = -v[i]
            out.append(tuple(v))
    return out


_CHAR_CACHE: dict = {}


def _cache_path(label: IrrepLabel, g: int):
    root = os.environ.get("TORELLI_REP_CACHE")
    if not root:
        return None
    os.makedirs(root, exist_ok=True)
    tag = f"{label.algebra}{g}_" + "_".join(map(str, label.w))
    return os.path.join(root, f"char_{tag}.json")


def irrep_character(label: IrrepLabel, g: int) -> Character:
    """Full weight multiset of the irreducible module with this label."""
    if label.algebra == "C":
        label = pad_c_label(label, g)
    key = (label, g)
    hit = _CHAR_CACHE.get(key)
    if hit is not None:
        return hit
    path = _cache_path(label, g)
    if path and os.path.exists(path):
        with open(path) as fh:
            raw = json.load(fh)
        ch = Character(label.algebra, g, {tuple(k): m for k, m in raw})
    else:
        dom = _freudenthal(label, g)
        ch = Character(label.algebra, g)
        for mu, m in dom.items():
            for nu in _orbit(mu, label.algebra):
                ch.add_weight(nu, m)
        expected = weyl_dim(label, g)
        assert ch.mass() == expected, (label, ch.mass(), expected)
        if path:
            with open(path, "w") as fh:
                json.dump([[list(k), m] for k, m in sorted(ch.data.items())], fh)
    _CHAR_CACHE[key] = ch
    return ch


def module_character(space, algebra: str = "A") -> Character:
    """Weight multiset of a built space's basis.

    With algebra='C' the raw epsilon weights are reported unreduced; this
    is only meaningful for spaces carrying an sp_2g action.
    """
    ch = Character(algebra, space.g)
    for i in range(space.dim):
        ch.add_weight(space.weight_eps(i))
    return ch


def label_from_eps(eps: tuple, algebra: str) -> IrrepLabel:
    if algebra == "A":
        return IrrepLabel("A", wt.fund_from_eps_a(wt.canon_a(eps)))
    return IrrepLabel("C", wt.fund_from_eps_c(eps))


def eps_from_label(label: IrrepLabel, g: int) -> tuple:
    return _highest_eps(label if label.algebra == "A" else pad_c_label(label, g), g)
