"""Free group endomorphisms and the degree-one and degree-two Johnson maps.

Words are tuples of nonzero signed generator indices (k for x_k, -k for
its inverse), always freely reduced.  Nilpotent-quotient classes are read
off a truncated Magnus expansion: x_k -> 1 + X_k in the free associative
algebra, cut at total degree 3.  Degree-two tensors of commutator words
are antisymmetric and give the class in wedge^2 V; degree-three tensors
of deeper words are Lie elements, recovered in left-normed bracket form
by the Dynkin idempotent and pushed into ((wedge^2 V) (x) V)/wedge^3 V.

Evaluation on elements of the Torelli subgroup of Aut(F_g) uses the
generating conjugations C(i,j): x_j -> x_i x_j x_i^-1 and commutator
appenders M(i,j,k): x_k -> x_k [x_i, x_j]; group expressions are built
from these with prod/comm/inv, so inverses stay structural.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import SparseVector, vec_from_pairs
from .spaces import DUALV, QUOT_W2VV, V, H, build, tensor, wedge, wedge_of_vectors

Word = tuple[int, ...]

# sign convention pinned by the generator values J(C(i,j)) = -(a_i^a_j)(x)b_j
# and J2(comm(C(1,2),C(2,1))) = -(a1^a2)(x)a1(x)b1 - (a1^a2)(x)a2(x)b2
J_SIGN = -1
J2_SIGN = -1


def reduce_word(seq) -> Word:
    out: list[int] = []
    for x in seq:
        if x == 0:
            raise ValueError("0 is not a generator letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def word_mul(*words: Word) -> Word:
    seq: list[int] = []
    for w in words:
        seq.extend(w)
    return reduce_word(seq)


def word_inv(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


class FreeGroupEndo:
    """Endomorphism of F_g given by reduced images of the generators."""

    __slots__ = ("g", "images")

    def __init__(self, g: int, images):
        if len(images) != g:
            raise ValueError(f"need {g} generator images, got {len(images)}")
        self.g = g
        self.images = tuple(reduce_word(w) for w in images)

    def apply(self, w: Word) -> Word:
        seq: list[int] = []
        for x in w:
            img = self.images[abs(x) - 1]
            seq.extend(img if x > 0 else word_inv(img))
        return reduce_word(seq)

    def compose(self, other: "FreeGroupEndo") -> "FreeGroupEndo":
        """self after other: (self.compose(other))(w) = self(other(w))."""
        if self.g != other.g:
            raise ValueError("rank mismatch")
        return FreeGroupEndo(self.g, [self.apply(w) for w in other.images])

    def __eq__(self, other):
        return (isinstance(other, FreeGroupEndo) and self.g == other.g
                and self.images == other.images)

    def __repr__(self):
        return f"FreeGroupEndo(g={self.g}, {self.images})"


def identity_endo(g: int) -> FreeGroupEndo:
    return FreeGroupEndo(g, [(k,) for k in range(1, g + 1)])


def _subst(g, k, word) -> FreeGroupEndo:
    images = [(i,) for i in range(1, g + 1)]
    images[k - 1] = word
    return FreeGroupEndo(g, images)


def magnus_c(g, i, j) -> FreeGroupEndo:
    if i == j or not (1 <= i <= g and 1 <= j <= g):
        raise ValueError(f"bad conjugation generator C({i},{j}) for g={g}")
    return _subst(g, j, (i, j, -i))


def magnus_m(g, i, j, k) -> FreeGroupEndo:
    if len({i, j, k}) != 3 or not all(1 <= t <= g for t in (i, j, k)) or i > j:
        raise ValueError(f"bad commutator generator M({i},{j},{k}) for g={g}")
    return _subst(g, k, (k, i, j, -i, -j))


def commutator(f: FreeGroupEndo, h: FreeGroupEndo,
               f_inv: FreeGroupEndo, h_inv: FreeGroupEndo) -> FreeGroupEndo:
    return f.compose(h).compose(f_inv).compose(h_inv)


# ---- group expressions ------------------------------------------------------
# ('C',i,j) | ('Cinv',i,j) | ('M',i,j,k) | ('Minv',i,j,k) | ('id',)
# | ('prod', e...) | ('inv', e) | ('comm', e1, e2)

def invert_expr(expr):
    kind = expr[0]
    if kind == "C":
        return ("Cinv", expr[1], expr[2])
    if kind == "Cinv":
        return ("C", expr[1], expr[2])
    if kind == "M":
        return ("Minv", expr[1], expr[2], expr[3])
    if kind == "Minv":
        return ("M", expr[1], expr[2], expr[3])
    if kind == "id":
        return expr
    if kind == "prod":
        return ("prod",) + tuple(invert_expr(e) for e in reversed(expr[1:]))
    if kind == "inv":
        return expr[1]
    if kind == "comm":
        return ("comm", expr[2], expr[1])
    raise ValueError(f"unknown group expression {expr!r}")


def endo(expr, g: int) -> FreeGroupEndo:
    """Evaluate a group expression to an endomorphism of F_g."""
    kind = expr[0]
    if kind == "C":
        return magnus_c(g, expr[1], expr[2])
    if kind == "Cinv":
        return _subst(g, expr[2], (-expr[1], expr[2], expr[1]))
    if kind == "M":
        return magnus_m(g, expr[1], expr[2], expr[3])
    if kind == "Minv":
        _, i, j, k = expr
        return _subst(g, k, (k, j, i, -j, -i))
    if kind == "id":
        return identity_endo(g)
    if kind == "prod":
        acc = identity_endo(g)
        for e in expr[1:]:
            acc = acc.compose(endo(e, g))
        return acc
    if kind == "inv":
        return endo(invert_expr(expr[1]), g)
    if kind == "comm":
        f, h = endo(expr[1], g), endo(expr[2], g)
        fi, hi = endo(invert_expr(expr[1]), g), endo(invert_expr(expr[2]), g)
        return commutator(f, h, fi, hi)
    raise ValueError(f"unknown group expression {expr!r}")


# ---- Magnus expansion -------------------------------------------------------

def magnus3(w: Word) -> dict[tuple, int]:
    """Truncated Magnus expansion of a word, degrees 0..3.

    Keys are tuples of generator indices (1-based); the empty tuple is the
    constant term.
    """
    acc: dict[tuple, int] = {(): 1}
    for x in w:
        k = abs(x)
        if x > 0:
            factor = {(): 1, (k,): 1}
        else:
            factor = {(): 1, (k,): -1, (k, k): 1, (k, k, k): -1}
        nxt: dict[tuple, int] = {}
        for t1, c1 in acc.items():
            for t2, c2 in factor.items():
                if len(t1) + len(t2) > 3:
                    continue
                key = t1 + t2
                s = nxt.get(key, 0) + c1 * c2
                if s:
                    nxt[key] = s
                else:
                    nxt.pop(key, None)
        acc = nxt
    return acc


def abelianized_matrix(f: FreeGroupEndo) -> list[list[int]]:
    mat = [[0] * f.g for _ in range(f.g)]
    for k, img in enumerate(f.images):
        for x in img:
            mat[abs(x) - 1][k] += 1 if x > 0 else -1
    return mat


def is_ia(f: FreeGroupEndo) -> bool:
    mat = abelianized_matrix(f)
    return all(mat[i][j] == (1 if i == j else 0)
               for i in range(f.g) for j in range(f.g))


def _gamma2_class(exp: dict[tuple, int], g: int) -> dict[tuple, int]:
    """Class in gamma_2/gamma_3 = wedge^2 V from a degree-2 Magnus tensor."""
    out: dict[tuple, int] = {}
    for i in range(1, g + 1):
        for j in range(i + 1, g + 1):
            c = exp.get((i, j), 0)
            cr = exp.get((j, i), 0)
            if c + cr != 0:
                raise ValueError("degree-2 tensor not antisymmetric: word not in gamma_2")
            if c:
                out[(i, j)] = c
    return out


class NotInTorelliError(ValueError):
    pass


def johnson_j(f: FreeGroupEndo) -> SparseVector:
    """Degree-one Johnson value, in tensor(wedge(2,V), dualV).

    Sum over generator slots of the gamma_2/gamma_3 class of f(x_k) x_k^-1
    tensored with the dual slot, with the global sign pinned so that
    J(C(i,j)) = -(a_i ^ a_j) (x) b_j.
    """
    if not is_ia(f):
        raise NotInTorelliError("endomorphism is not IA: nontrivial abelianization")
    g = f.g
    sp = build(tensor(wedge(2, V), DUALV), g)
    w2v, dual = sp.left, sp.right
    vleaf = w2v.inner
    pairs = []
    for k in range(1, g + 1):
        w = word_mul(f.images[k - 1], ((-k),))
        exp = magnus3(w)
        if any(exp.get((i,), 0) for i in range(1, g + 1)):
            raise NotInTorelliError("image word has nonzero abelianization")
        cls = _gamma2_class(exp, g)
        for (i, j), c in cls.items():
            wi = w2v.index[(vleaf.index[("a", i)], vleaf.index[("a", j)])]
            pairs.append((sp.index[(wi, dual.index[("b", k)])], Fraction(J_SIGN * c)))
    return vec_from_pairs(pairs)


def _dynkin_leftnormed(exp: dict[tuple, int], g: int) -> list[tuple[int, int, int, Fraction]]:
    """Left-normed bracket expansion of a degree-3 Lie tensor (Dynkin/3)."""
    out = []
    for t, c in exp.items():
        if len(t) == 3 and c:
            out.append((t[0], t[1], t[2], Fraction(c, 3)))
    return out


def johnson_j2(f: FreeGroupEndo) -> SparseVector:
    """Degree-two Johnson value, in tensor(quotient_w2vv, dualV).

    Requires J(f) = 0; reads the gamma_3/gamma_4 class of each f(x_k) x_k^-1
    through the Dynkin projection, pushed along [[x,y],z] -> (x^y)(x)z into
    the quotient by wedge^3 V.
    """
    if not is_ia(f):
        raise NotInTorelliError("endomorphism is not IA")
    g = f.g
    quot = build(QUOT_W2VV, g)
    amb = quot.ambient
    w2v, vleaf = amb.left, amb.right
    sp = build(tensor(QUOT_W2VV, DUALV), g)
    dual = sp.right
    pairs = []
    for k in range(1, g + 1):
        w = word_mul(f.images[k - 1], ((-k),))
        exp = magnus3(w)
        if any(exp.get((i,), 0) for i in range(1, g + 1)):
            raise NotInTorelliError("image word has nonzero abelianization")
        if _gamma2_class(exp, g):
            raise NotInTorelliError(
                "nonzero degree-one Johnson value: endomorphism not in IA(2)")
        amb_pairs = []
        for (p, q, r, coeff) in _dynkin_leftnormed(exp, g):
            if p == q:
                continue
            sign = 1
            if p > q:
                p, q, sign = q, p, -1
            wi = w2v.index[(vleaf.index[("a", p)], vleaf.index[("a", q)])]
            amb_pairs.append((amb.index[(wi, vleaf.index[("a", r)])], sign * coeff))
        cls = quot.reduce_ambient(vec_from_pairs(amb_pairs))
        for qi, c in cls:
            pairs.append((sp.index[(qi, dual.index[("b", k)])], J2_SIGN * c))
    out = vec_from_pairs(pairs)
    for _, c in out:
        if c.denominator != 1:
            raise AssertionError("degree-3 class was not an integral Lie element")
    return out


# ---- bounding pair evaluation ----------------------------------------------

def _form(g: int, u: SparseVector, v: SparseVector) -> Fraction:
    leaf = build(H, g)
    total = Fraction(0)
    for i, a in u:
        for j, b in v:
            s1, k1 = leaf.basis[i]
            s2, k2 = leaf.basis[j]
            if k1 == k2:
                if s1 == "a" and s2 == "b":
                    total += a * b
                elif s1 == "b" and s2 == "a":
                    total -= a * b
    return total


def tau_bounding_pair(g: int, pairs: list[tuple[SparseVector, SparseVector]],
                      c: SparseVector) -> SparseVector:
    """(sum_i x_i ^ y_i) ^ c in wedge(3, H) for a genus-k bounding pair datum.

    Validates the symplectic-pair invariants: form(x_i, y_i) = 1, all other
    cross pairings zero, and c orthogonal to every pair.
    """
    for idx, (x, y) in enumerate(pairs):
        if _form(g, x, y) != 1:
            raise ValueError(f"pair {idx} is not symplectically normalized")
        for jdx, (x2, y2) in enumerate(pairs):
            if jdx == idx:
                continue
            if _form(g, x, x2) or _form(g, x, y2) or _form(g, y, x2) or _form(g, y, y2):
                raise ValueError(f"pairs {idx} and {jdx} are not orthogonal")
        if _form(g, x, c) or _form(g, y, c):
            raise ValueError(f"class vector pairs nontrivially with pair {idx}")
    sp3 = build(wedge(3, H), g)
    acc = SparseVector()
    for x, y in pairs:
        d = wedge_of_vectors([x, y, c])
        acc = acc + vec_from_pairs((sp3.index[t], cc) for t, cc in d.items())
    return acc
