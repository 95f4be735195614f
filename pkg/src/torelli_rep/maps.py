"""The named equivariant maps: contractions, the splitting of wedge^3 H,
the wedge^6 projection, the degree-two bracket, and the composite through
the free Lie algebra used for the trace-style evaluations.

All maps act on vectors over free monomial spaces built from full H;
derived (quotient) inputs are expected to arrive as their canonical
complement representatives, which is how every worked computation states
them.
"""

from __future__ import annotations

from fractions import Fraction

from . import weights as wt
from .characters import Character, module_character
from .decompose import Decomposition, decompose_character
from .linalg import SparseVector, Span, vec_from_pairs
from .spaces import (FREELIE3, H, SpaceError, U_SPACE, UBAR, W_SPACE, WBAR,
                     build, expr_str, sym, tensor, wedge, wedge_of_vectors)

# ---------------------------------------------------------------------------
# leaf-level symplectic form


def _omega_leaf(lab1, lab2) -> int:
    s1, i = lab1
    s2, j = lab2
    if i != j:
        return 0
    if s1 == "a" and s2 == "b":
        return 1
    if s1 == "b" and s2 == "a":
        return -1
    return 0


def omega_vector(g: int) -> SparseVector:
    """omega = sum_i a_i ^ b_i as a vector in wedge(2, H)."""
    sp = build(wedge(2, H), g)
    leaf = sp.inner
    pairs = []
    for i in range(1, g + 1):
        t = (leaf.index[("a", i)], leaf.index[("b", i)])
        pairs.append((sp.index[t], Fraction(1)))
    return vec_from_pairs(pairs)


# ---------------------------------------------------------------------------
# contraction C_k


def contract(g: int, k: int, v: SparseVector):
    """C_k on wedge(k, H).

    Returns a Fraction for k == 2, a vector over H for k == 3, and a
    vector over wedge(k-2, H) otherwise.
    """
    if k < 2:
        raise SpaceError("contraction needs at least two slots")
    src = build(wedge(k, H), g)
    leaf = src.inner
    dst = None if k == 2 else (build(H, g) if k == 3 else build(wedge(k - 2, H), g))
    scalar = Fraction(0)
    acc: dict[int, Fraction] = {}
    for idx, c in v:
        t = src.basis[idx]
        labs = [leaf.basis[x] for x in t]
        for i in range(k):
            for j in range(i + 1, k):
                w = _omega_leaf(labs[i], labs[j])
                if not w:
                    continue
                sign = -1 if (i + j + 1) % 2 else 1
                coeff = c * w * sign
                if k == 2:
                    scalar += coeff
                    continue
                rest = t[:i] + t[i + 1:j] + t[j + 1:]
                key = rest[0] if k == 3 else dst.index[rest]
                s = acc.get(key, 0) + coeff
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
    if k == 2:
        return scalar
    return SparseVector(acc)


def q_split(g: int, v: SparseVector) -> tuple[SparseVector, SparseVector]:
    """v = q(v) + h(v) with C_3(q(v)) = 0 and h(v) in H ^ omega.

    h(v) = (1/(g-1)) C_3(v) ^ omega; the complement q is the equivariant
    section of wedge^3 H -> (wedge^3 H)/H used everywhere downstream.
    """
    c3 = contract(g, 3, v)
    hv = wedge_with_omega(g, c3, 1).scale(Fraction(1, g - 1))
    return v - hv, hv


def wedge_with_omega(g: int, v: SparseVector, k: int) -> SparseVector:
    """v ^ omega for v in wedge(k, H), landing in wedge(k+2, H)."""
    src = build(wedge(k, H), g) if k > 1 else build(H, g)
    dst = build(wedge(k + 2, H), g)
    leaf = build(H, g)
    acc: dict[int, Fraction] = {}
    for idx, c in v:
        t = src.basis[idx] if k > 1 else (idx,)
        for i in range(1, g + 1):
            vecs = [SparseVector.basis(x) for x in t]
            vecs.append(SparseVector.basis(leaf.index[("a", i)]))
            vecs.append(SparseVector.basis(leaf.index[("b", i)]))
            for key, cc in wedge_of_vectors(vecs).items():
                s = acc.get(dst.index[key], 0) + c * cc
                if s:
                    acc[dst.index[key]] = s
                else:
                    acc.pop(dst.index[key], None)
    return SparseVector(acc)


# ---------------------------------------------------------------------------
# wedge^2 of wedge^3 H: projection to wedge^6 H and the bracket


def pi6(g: int, v: SparseVector) -> SparseVector:
    """[x]^[y] -> x^y: wedge(2, wedge(3,H)) -> wedge(6, H), bilinear."""
    outer = build(wedge(2, wedge(3, H)), g)
    inner = outer.inner
    dst = build(wedge(6, H), g)
    acc: dict[int, Fraction] = {}
    for idx, c in v:
        p, q = outer.basis[idx]
        t1, t2 = inner.basis[p], inner.basis[q]
        if set(t1) & set(t2):
            continue
        both = sorted(t1 + t2)
        seq = list(t1 + t2)
        # parity of the merge
        inv = 0
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if seq[i] > seq[j]:
                    inv += 1
        sign = -1 if inv % 2 else 1
        key = dst.index[tuple(both)]
        s = acc.get(key, 0) + c * sign
        if s:
            acc[key] = s
        else:
            acc.pop(key, None)
    return SparseVector(acc)


def sym2_pair(g: int, w1: int, w2: int, coeff: Fraction) -> list[tuple[int, Fraction]]:
    """coeff * (w1 <-> w2) in Sym(2, wedge(2,H)) index pairs.

    The <-> element is w1 (x) w2 + w2 (x) w1, so a diagonal pair
    contributes twice the diagonal monomial.
    """
    dst = build(sym(2, wedge(2, H)), g)
    if w1 == w2:
        return [(dst.index[(w1, w2)], 2 * coeff)]
    key = (w1, w2) if w1 < w2 else (w2, w1)
    return [(dst.index[key], coeff)]


def bracket(g: int, v: SparseVector) -> SparseVector:
    """The nine-term degree-two bracket wedge^2(wedge^3 H) -> Sym^2(wedge^2 H)."""
    outer = build(wedge(2, wedge(3, H)), g)
    inner = outer.inner
    leaf = inner.inner
    w2 = build(wedge(2, H), g)
    pairs: list[tuple[int, Fraction]] = []
    for idx, c in v:
        p, q = outer.basis[idx]
        t1, t2 = inner.basis[p], inner.basis[q]
        labs1 = [leaf.basis[x] for x in t1]
        labs2 = [leaf.basis[x] for x in t2]
        for s in range(3):
            for t in range(3):
                w = _omega_leaf(labs1[s], labs2[t])
                if not w:
                    continue
                sign = -1 if (s + t) % 2 else 1
                rest1 = t1[:s] + t1[s + 1:]
                rest2 = t2[:t] + t2[t + 1:]
                coeff = c * w * sign
                pairs.extend(sym2_pair(g, w2.index[rest1], w2.index[rest2], coeff))
    return vec_from_pairs(pairs)


def p4(g: int, v: SparseVector) -> SparseVector:
    """(x <-> y) -> x^y: Sym^2(wedge^2 H) -> wedge^4 H."""
    src = build(sym(2, wedge(2, H)), g)
    inner = src.inner
    dst = build(wedge(4, H), g)
    acc: dict[int, Fraction] = {}
    for idx, c in v:
        u, w = src.basis[idx]
        if u == w:
            continue
        t1, t2 = inner.basis[u], inner.basis[w]
        if set(t1) & set(t2):
            continue
        seq = list(t1 + t2)
        inv = sum(1 for i in range(4) for j in range(i + 1, 4) if seq[i] > seq[j])
        sign = -1 if inv % 2 else 1
        key = dst.index[tuple(sorted(seq))]
        s = acc.get(key, 0) + c * sign
        if s:
            acc[key] = s
        else:
            acc.pop(key, None)
    return SparseVector(acc)


# ---------------------------------------------------------------------------
# the composite through H (x) L_3(H)


def _sym2_tensor_terms(g: int, v: SparseVector):
    """Expand a Sym^2(wedge^2 H) vector into ordered tensor pairs.

    Off-diagonal monomials contribute both orders with the stored
    coefficient; diagonal monomials contribute the single square term.
    """
    src = build(sym(2, wedge(2, H)), g)
    for idx, c in v:
        u, w = src.basis[idx]
        if u == w:
            yield u, w, c
        else:
            yield u, w, c
            yield w, u, c


def p_free_lie(g: int, v: SparseVector) -> SparseVector:
    """Sym^2(wedge^2 H) -> H (x) L_3(H), Hall-canonicalized.

    On the symmetric generator: (a^b) <-> (c^d) |->
    a(x)[b,[c,d]] - b(x)[a,[c,d]] + c(x)[d,[a,b]] - d(x)[c,[a,b]].
    """
    w2 = build(wedge(2, H), g)
    dst = build(tensor(H, FREELIE3), g)
    lie = dst.right
    pairs = []
    for u, w, c in _sym2_tensor_terms(g, v):
        (x, y), (z, t) = w2.basis[u], w2.basis[w]
        # x (x) [y,[z,t]] - y (x) [x,[z,t]], with [p,[q,r]] = -[[q,r],p]
        for head, other, sgn in ((x, y, 1), (y, x, -1)):
            lv = lie.from_triples([(z, t, other, Fraction(-sgn))])
            for li, lc in lv:
                pairs.append((dst.index[(head, li)], c * lc))
    return vec_from_pairs(pairs)


def q_free_lie_term(g: int, head: int, bracket_triple: tuple[int, int, int],
                    coeff: Fraction) -> list[tuple[int, Fraction]]:
    """q on a generator head (x) [b,[c,d]]: 2w(a,b) c^d + w(a,c) b^d - w(a,d) b^c.

    Indices are H-leaf indices; returns index pairs over wedge(2, H).
    """
    leaf = build(H, g)
    w2 = build(wedge(2, H), g)
    b, c, d = bracket_triple
    la, lb, lc, ld = (leaf.basis[head], leaf.basis[b], leaf.basis[c], leaf.basis[d])
    out = []
    for w, (p, q) in ((2 * _omega_leaf(la, lb), (c, d)),
                      (_omega_leaf(la, lc), (b, d)),
                      (-_omega_leaf(la, ld), (b, c))):
        if not w or p == q:
            continue
        if p < q:
            out.append((w2.index[(p, q)], coeff * w))
        else:
            out.append((w2.index[(q, p)], -coeff * w))
    return out


def qp(g: int, v: SparseVector) -> SparseVector:
    """Termwise composite of the free-Lie factorization, Sym^2(wedge^2 H) -> wedge^2 H.

    q's generator rule is applied directly to the explicit four-term output
    of p, without passing through the Hall normal form.
    """
    w2 = build(wedge(2, H), g)
    pairs = []
    for u, w, c in _sym2_tensor_terms(g, v):
        (x, y), (z, t) = w2.basis[u], w2.basis[w]
        pairs.extend(q_free_lie_term(g, x, (y, z, t), c))
        pairs.extend(q_free_lie_term(g, y, (x, z, t), -c))
    return vec_from_pairs(pairs)


# ---------------------------------------------------------------------------
# unipotent coinvariants


def _transvectable(expr) -> bool:
    kind = expr[0]
    if kind in ("H", "dualV"):
        return True
    if kind == "V":
        return False
    if kind == "tensor":
        return _transvectable(expr[1]) and _transvectable(expr[2])
    if kind in ("wedge", "sym"):
        return _transvectable(expr[2])
    if kind == "dsum":
        return all(_transvectable(p) for p in expr[1:])
    if kind in ("U", "Ubar", "wedge3H_mod_H", "freelie3"):
        return True
    return False


def unipotent_coinvariants(space) -> tuple[int, Decomposition]:
    """Largest quotient on which the symplectic transvection group acts trivially.

    The group is generated by the disk-twist images: the diagonal
    transvections a_i -> a_i + b_i and the symmetric off-diagonal ones
    a_i -> a_i + b_j, a_j -> a_j + b_i.  The augmentation span of these
    generators is torus-stable, so the quotient character is the ambient
    character minus per-weight ranks of the span.
    """
    if not _transvectable(space.expr):
        raise SpaceError(
            f"{expr_str(space.expr)} does not carry the transvection action")
    g = space.g
    gens = [("transv", i, i) for i in range(1, g + 1)]
    gens += [("transv", i, j) for i in range(1, g + 1) for j in range(i + 1, g + 1)]
    per_weight: dict[tuple, Span] = {}
    total = 0
    for op in gens:
        for i in range(space.dim):
            diff = space.act_col(op, i) - SparseVector.basis(i)
            if not diff:
                continue
            comps: dict[tuple, list] = {}
            for j, c in diff:
                comps.setdefault(wt.canon_a(space.weight_eps(j)), []).append((j, c))
            for eps, prs in comps.items():
                sp = per_weight.setdefault(eps, Span())
                sp.add(vec_from_pairs(prs))
    sub_ch = Character("A", g)
    for eps, sp in per_weight.items():
        sub_ch.add_weight(eps, sp.dim)
        total += sp.dim
    quot = module_character(space, "A").sub(sub_ch)
    return space.dim - total, decompose_character(quot)


def johnson_image_basis(which: str, g: int):
    """Named image spaces of the degree-one quotient maps."""
    table = {"U": U_SPACE, "Ubar": UBAR, "W": W_SPACE, "Wbar": WBAR}
    if which not in table:
        raise SpaceError(f"unknown image space {which!r}")
    return build(table[which], g)
