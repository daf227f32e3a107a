"""Independent reference computations in exact rational arithmetic.

Nothing here imports the package's sequence, penalty or extension code.
"""

from fractions import Fraction as Fr
from itertools import combinations


def ratio(rho, k):
    return rho / (1 + Fr(2) ** (-k))


def eps_table(rho, anchor, k_lo, k_hi):
    """Exact eps_k for k_lo <= k <= k_hi from eps_0 = anchor."""
    e = {0: Fr(anchor)}
    for k in range(1, k_hi + 1):
        e[k] = e[k - 1] / ratio(rho, k)
    for k in range(0, k_lo, -1):
        e[k - 1] = e[k] * ratio(rho, k)
    return e


def pointed_constant(coords, g, x, members, kind="two_sided"):
    """max over z in members, z != x, of inc(g(z) - g(x)) / |z - x| (1-D)."""
    best = Fr(0)
    for z in members:
        if z == x:
            continue
        delta = Fr(g[z]) - Fr(g[x])
        inc = abs(delta) if kind == "two_sided" else max(-delta, Fr(0))
        best = max(best, inc / abs(Fr(coords[z]) - Fr(coords[x])))
    return best


def exact_pen(coords, C, g, x, rho, anchor, L, t, kind="two_sided", depth=60):
    """pen_x(t) on a 1-D instance, summing ``depth`` intervals below t."""
    t = Fr(t)
    if t == 0:
        return Fr(0)
    e = eps_table(rho, anchor, -depth - 5, 40)

    def S(k):
        members = [z for z in C if abs(Fr(coords[z]) - Fr(coords[x])) < e[k]]
        return pointed_constant(coords, g, x, members, kind)

    def slope(k):
        return S(k) + 3 * Fr(L) * e[k - 2] / e[k - 1]

    k = next(k for k in range(-depth, 40) if e[k - 2] <= t < e[k - 1])
    total = slope(k) * (t - e[k - 2])
    for j in range(k - 1, max(k - depth, -depth + 1), -1):
        total += slope(j) * (e[j - 1] - e[j - 2])
    return total


def lip_pairs(coords, g, members):
    best = Fr(0)
    for a, b in combinations(members, 2):
        best = max(best, abs(Fr(g[a]) - Fr(g[b])) / abs(Fr(coords[a]) - Fr(coords[b])))
    return best
