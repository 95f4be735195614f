"""Weight bookkeeping in epsilon coordinates.

An epsilon weight is an integer g-tuple: the eigenvalue of the i-th
diagonal coordinate functional.  Type A (sl_g) weights are only defined
modulo the all-ones vector; their canonical form subtracts the minimum
entry.  Type C (sp_2g) weights are honest integer g-tuples.

Fundamental coordinates follow the usual conventions: for type A,
w_i = c_i - c_{i+1} (length g-1); for type C additionally w_g = c_g.
"""

from __future__ import annotations


def eps_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def canon_a(t: tuple) -> tuple:
    m = min(t)
    return tuple(x - m for x in t) if m else tuple(t)


def fund_from_eps_a(t: tuple) -> tuple:
    return tuple(t[i] - t[i + 1] for i in range(len(t) - 1))


def eps_from_fund_a(w: tuple) -> tuple:
    # c_i = w_i + w_{i+1} + ... + w_{g-1}, c_g = 0
    out = [0] * (len(w) + 1)
    acc = 0
    for i in range(len(w) - 1, -1, -1):
        acc += w[i]
        out[i] = acc
    return tuple(out)


def is_dominant_eps_a(t: tuple) -> bool:
    return all(t[i] >= t[i + 1] for i in range(len(t) - 1))


def dom_rep_a(t: tuple) -> tuple:
    return canon_a(tuple(sorted(t, reverse=True)))


def fund_from_eps_c(t: tuple) -> tuple:
    return tuple(t[i] - t[i + 1] for i in range(len(t) - 1)) + (t[-1],)


def eps_from_fund_c(w: tuple) -> tuple:
    out = [0] * len(w)
    acc = 0
    for i in range(len(w) - 1, -1, -1):
        acc += w[i]
        out[i] = acc
    return tuple(out)


def is_dominant_eps_c(t: tuple) -> bool:
    return all(t[i] >= t[i + 1] for i in range(len(t) - 1)) and t[-1] >= 0


def dom_rep_c(t: tuple) -> tuple:
    return tuple(sorted((abs(x) for x in t), reverse=True))


def height_key_a(t: tuple) -> tuple:
    """Shift-invariant dominance-monotone sort key for type A weights.

    2*<t, rho> - sum(t)*(g-1) with rho = (g-1, ..., 0); every positive root
    pairs to a positive value, so greater-in-dominance implies greater key.
    """
    g = len(t)
    val = 2 * sum(x * (g - 1 - i) for i, x in enumerate(t)) - sum(t) * (g - 1)
    return (val, t)


def height_key_c(t: tuple) -> tuple:
    g = len(t)
    return (sum(x * (g - i) for i, x in enumerate(t)), t)
