"""Permanent inequalities and entropy bounds.

The permutation-product inequality (the integral of a product of functions
along a random permutation is at most the product of their L2 norms), its
restatement as a Hadamard-type bound on permanents, entropy subadditivity
over pushforwards, and the closed forms of the extremal two-level entropy
lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations as _iter_permutations
from math import factorial

import numpy as np

from permix import kernels
from permix.errors import CapExceeded
from permix.groups import GroupFunction, OmegaFunction, entropy, pushforward

PERMANENT_CAP = 20
BRUTEFORCE_CAP = 8


def permanent(M) -> float:
    """Exact permanent via Ryser's O(2^n n) inclusion-exclusion.

    Float matrices use the kernel backend; exact numeric types (int,
    Fraction) keep exact arithmetic in pure Python.
    """
    M = np.asarray(M)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise ValueError("matrix must be square")
    if n > PERMANENT_CAP:
        raise CapExceeded(f"permanent computation capped at n={PERMANENT_CAP}")
    if n == 0:
        return 1.0
    if M.dtype == object:
        return _ryser_exact(M)
    return float(kernels.ryser_permanent(np.ascontiguousarray(M, dtype=np.float64)))


def _ryser_exact(M) -> object:
    n = M.shape[0]
    row = [0] * n
    gray = 0
    sign = 1
    total = 0
    for k in range(1, 1 << n):
        bit = (k & -k).bit_length() - 1
        if gray & (1 << bit):
            for i in range(n):
                row[i] -= M[i, bit]
        else:
            for i in range(n):
                row[i] += M[i, bit]
        gray ^= 1 << bit
        sign = -sign
        prod = 1
        for x in row:
            prod *= x
        total += sign * prod
    return total if n % 2 == 0 else -total


def permanent_bruteforce(M) -> object:
    """Independent oracle: direct sum over all permutations (small n only)."""
    M = np.asarray(M)
    n = M.shape[0]
    if n > BRUTEFORCE_CAP:
        raise CapExceeded(f"brute-force permanent capped at n={BRUTEFORCE_CAP}")
    total = 0
    for perm in _iter_permutations(range(n)):
        prod = 1
        for i, j in enumerate(perm):
            prod *= M[i, j]
        total += prod
    return total


@dataclass(frozen=True)
class PermanentInstance:
    M: np.ndarray
    column_norms: np.ndarray = field(init=False)  # Euclidean, not measure-normalized

    def __post_init__(self):
        M = np.array(self.M, dtype=np.float64)
        M.setflags(write=False)
        object.__setattr__(self, "M", M)
        norms = np.sqrt((M * M).sum(axis=0))
        norms.setflags(write=False)
        object.__setattr__(self, "column_norms", norms)


def cll_check(f_list) -> tuple:
    """(lhs, rhs) of the permutation-product inequality.

    lhs = integral over S_n of prod_i f_i(pi(i)) = perm(A)/n! with
    A[j, i] = f_i(j); rhs = prod of the uniform-measure L2 norms.
    Contract: lhs <= rhs for nonnegative inputs.
    """
    n = len(f_list)
    if n > PERMANENT_CAP:
        raise CapExceeded(f"needs the permanent of an n={n} matrix; capped at {PERMANENT_CAP}")
    for f in f_list:
        if f.n != n:
            raise ValueError("need n functions on a ground set of size n")
        if np.any(f.values < 0):
            raise ValueError("inputs must be nonnegative")
    A = np.column_stack([f.values for f in f_list])
    lhs = permanent(A) / factorial(n)
    rhs = 1.0
    for f in f_list:
        rhs *= math.sqrt(float((f.values * f.values).mean()))
    return lhs, rhs


def hadamard_permanent_check(M) -> tuple:
    """(|perm(M)|, (n!/n^(n/2)) * prod of Euclidean column norms)."""
    inst = PermanentInstance(M)
    n = inst.M.shape[0]
    lhs = abs(permanent(inst.M))
    bound = factorial(n) / n ** (n / 2) * float(np.prod(inst.column_norms))
    return lhs, bound


def subadditivity_check(f: GroupFunction) -> tuple:
    """(S(f), (1/2) sum_i S(p_i f)); the first dominates the second."""
    lhs = entropy(f)
    rhs = 0.5 * sum(entropy(pushforward(f, i)) for i in range(f.space.n))
    return lhs, rhs


def _xlogx(x: float) -> float:
    return 0.0 if x <= 0 else x * math.log(x)


@dataclass(frozen=True)
class ExtremalEntropyLow:
    """Entropy of the two-level minimizer among g with mean beta that sit at
    beta - t on a set of density delta, plus the reference lower bound."""

    entropy: float
    reference_bound: float  # delta t^2 / beta^2


def extremal_entropy_low(beta: float, t: float, delta: float) -> ExtremalEntropyLow:
    if not 0 < t <= beta:
        raise ValueError("need 0 < t <= beta")
    if not 0 < delta <= 0.5:
        raise ValueError("need 0 < delta <= 1/2")
    x = delta * t / ((1 - delta) * beta)
    s = delta * _xlogx(1 - t / beta) + (1 - delta) * _xlogx(1 + x)
    return ExtremalEntropyLow(s, delta * t * t / (beta * beta))


@dataclass(frozen=True)
class ExtremalEntropyHigh:
    """Entropy of the two-level minimizer among g with mean beta that sit at
    beta + t on a set of density delta, plus the reference lower bounds."""

    entropy: float
    reference_bound: float  # delta * min(t/beta, t^2/beta^2)
    weak_bound: float  # delta t^2 / beta


def extremal_entropy_high(beta: float, t: float, delta: float) -> ExtremalEntropyHigh:
    if t <= 0 or beta <= 0:
        raise ValueError("need t, beta > 0")
    if not 0 < delta <= 0.5:
        raise ValueError("need 0 < delta <= 1/2")
    if (beta + t) * delta > beta:
        raise ValueError("mass constraint violated: need (beta + t) delta <= beta")
    r = t / beta
    x = delta * r / (1 - delta)
    s = delta * _xlogx(1 + r) + (1 - delta) * _xlogx(1 - x)
    return ExtremalEntropyHigh(s, delta * min(r, r * r), delta * t * t / beta)


def two_level_omega(n: int, support_count: int, level_value: float, rest_value: float) -> OmegaFunction:
    """The step function taking level_value on the first support_count points."""
    if not 0 <= support_count <= n:
        raise ValueError("support_count out of range")
    v = np.full(n, float(rest_value))
    v[:support_count] = level_value
    return OmegaFunction(n, v)
