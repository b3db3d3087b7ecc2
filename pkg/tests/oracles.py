"""Independent brute-force oracles used to freeze expected values.

Everything here is deliberately written from the definitions with plain
Python loops and itertools, sharing no code paths with the package.
"""

import math
from itertools import permutations as iter_permutations


def compose(x, y):
    """(x o y)(i) = x(y(i)); tuples in, tuple out."""
    return tuple(x[v] for v in y)


def inverse(p):
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def parity(p):
    """0 even, 1 odd."""
    seen = [False] * len(p)
    odd = 0
    for i in range(len(p)):
        if not seen[i]:
            j, c = i, 0
            while not seen[j]:
                seen[j] = True
                j = p[j]
                c += 1
            odd ^= (c - 1) & 1
    return odd


def all_perms(n):
    return list(iter_permutations(range(n)))


def even_perms(n):
    return [p for p in all_perms(n) if parity(p) == 0]


def count_triple_brute(X, Y, Z):
    """#{(x, y) in X x Y : x o y in Z} over tuple collections."""
    zset = set(Z)
    return sum(1 for x in X for y in Y if compose(x, y) in zset)


def convolve_brute(perms, fvals, gvals):
    """(f*g)(x) = (1/N) sum_y f(y) g(y^-1 x) as a dict perm -> value."""
    N = len(perms)
    idx = {p: i for i, p in enumerate(perms)}
    out = {}
    for x in perms:
        acc = 0.0
        for i, y in enumerate(perms):
            acc += fvals[i] * gvals[idx[compose(inverse(y), x)]]
        out[x] = acc / N
    return out


def triple_inner_brute(perms, fvals, gvals, hvals):
    """<f*g, h> from the definition."""
    conv = convolve_brute(perms, fvals, gvals)
    return sum(conv[p] * hvals[i] for i, p in enumerate(perms)) / len(perms)


def pushforward_brute(perms, fvals, i, n):
    """p_i f(w) = n * mean of f over {pi(i) = w}."""
    N = len(perms)
    out = [0.0] * n
    for r, p in enumerate(perms):
        out[p[i]] += fvals[r]
    return [v * n / N for v in out]


def entropy_brute(values):
    a = sum(values) / len(values)
    acc = 0.0
    for v in values:
        r = v / a
        if r > 0:
            acc += r * math.log(r)
    return acc / len(values)


def permanent_brute(M):
    n = len(M)
    total = 0
    for p in iter_permutations(range(n)):
        prod = 1
        for i, j in enumerate(p):
            prod *= M[i][j]
        total += prod
    return total


def sigma_coeff_brute(perms, fvals, n):
    """C[w][i] = mean of f over {pi(i) = w}."""
    N = len(perms)
    C = [[0.0] * n for _ in range(n)]
    for r, p in enumerate(perms):
        for i in range(n):
            C[p[i]][i] += fvals[r]
    return [[v / N for v in row] for row in C]


def hoeffding_values_brute(perms, a):
    return [sum(a[i][p[i]] for i in range(len(p))) for p in perms]
