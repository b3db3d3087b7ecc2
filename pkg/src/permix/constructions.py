"""Two explicit families with extreme product-mixing behaviour.

* The image-constrained family: permutations sending a basepoint into a
  set T and T entirely outside T.  These sets are product-free, with an
  exact closed-form density over S_n.
* The overlap family X_T: permutations g with g(T) meeting T.  These sets
  carry strictly more than the random-like number of solutions to xy = z.

Both come with vectorized membership predicates and exact densities so
they can be sampled at sizes far beyond enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from permix import groups
from permix.groups import GroupSpace, GroupSubset, count_products


@dataclass(frozen=True)
class KedlayaParams:
    """Parameters of the product-free family: basepoint -> T, T -> complement."""

    n: int
    T: tuple
    basepoint: int = 0

    def __post_init__(self):
        T = tuple(sorted(int(x) for x in self.T))
        object.__setattr__(self, "T", T)
        t = len(T)
        if t < 1:
            raise ValueError("T must be nonempty")
        if len(set(T)) != t or min(T) < 0 or max(T) >= self.n:
            raise ValueError("T must be a subset of {0..n-1} without repeats")
        if not 0 <= self.basepoint < self.n:
            raise ValueError("basepoint out of range")
        if self.basepoint in T:
            raise ValueError("basepoint must not lie in T")
        if 2 * t + 1 > self.n:
            raise ValueError("need 2|T| + 1 <= n")

    @property
    def t(self) -> int:
        return len(self.T)


@dataclass(frozen=True)
class SurplusParams:
    """Parameters of the overlap family X_T = {g : g(T) meets T}."""

    n: int
    T: tuple

    def __post_init__(self):
        T = tuple(sorted(int(x) for x in self.T))
        object.__setattr__(self, "T", T)
        if len(T) < 1:
            raise ValueError("T must be nonempty")
        if len(set(T)) != len(T) or min(T) < 0 or max(T) >= self.n:
            raise ValueError("T must be a subset of {0..n-1} without repeats")

    @property
    def t(self) -> int:
        return len(self.T)


def _member_mask(n: int, points) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[list(points)] = True
    return m


def kedlaya_membership(params: KedlayaParams, images: np.ndarray) -> np.ndarray:
    """Vectorized membership test on a (k, n) batch of image arrays."""
    in_T = _member_mask(params.n, params.T)
    mask = in_T[images[:, params.basepoint]]
    for pos in params.T:
        mask &= ~in_T[images[:, pos]]
    return mask


def surplus_membership(params: SurplusParams, images: np.ndarray) -> np.ndarray:
    in_T = _member_mask(params.n, params.T)
    mask = np.zeros(images.shape[0], dtype=bool)
    for pos in params.T:
        mask |= in_T[images[:, pos]]
    return mask


def kedlaya_set(space: GroupSpace, params: KedlayaParams) -> GroupSubset:
    """Exact membership: pi(basepoint) in T and pi(T) inside the complement of T."""
    if space.n != params.n:
        raise ValueError("space size does not match params.n")
    return GroupSubset(space, kedlaya_membership(params, space.images_table))


def surplus_set(space: GroupSpace, params: SurplusParams) -> GroupSubset:
    """Exact membership: g(T) meets T.  Closed under inversion."""
    if space.n != params.n:
        raise ValueError("space size does not match params.n")
    return GroupSubset(space, surplus_membership(params, space.images_table))


@dataclass(frozen=True)
class KedlayaDensity:
    """Density of the product-free family as a fraction of S_n, two closed forms."""

    binomial_form: Fraction  # t C(n-t, t) t! (n-t-1)! / n!
    factorial_form: Fraction  # t (n-t)! (n-t-1)! / (n! (n-2t)!)

    @property
    def value(self) -> float:
        return float(self.binomial_form)


def kedlaya_density_formula(n: int, t: int) -> KedlayaDensity:
    if t < 1 or 2 * t + 1 > n:
        raise ValueError("need 1 <= t and 2t + 1 <= n")
    binomial = Fraction(t * comb(n - t, t) * factorial(t) * factorial(n - t - 1), factorial(n))
    fact = Fraction(t * factorial(n - t) * factorial(n - t - 1), factorial(n) * factorial(n - 2 * t))
    return KedlayaDensity(binomial, fact)


def surplus_density_exact(n: int, t: int) -> Fraction:
    """P(g(T) meets T) for uniform g; exact for S_n, and for A_n when t <= n-2.

    The image of T under a uniform group element is a uniform t-subset,
    so the miss probability is C(n-t, t) / C(n, t).
    """
    if t < 1 or t > n:
        raise ValueError("need 1 <= t <= n")
    return 1 - Fraction(comb(n - t, t), comb(n, t))


def count_solutions(X: GroupSubset, Y: GroupSubset, Z: GroupSubset,
                    threads: int | None = None, pair_budget: int | None = None) -> int:
    """Exact #{(x, y) in X x Y : xy in Z}."""
    return count_products(X, Y, Z, threads=threads, pair_budget=pair_budget)


@dataclass(frozen=True)
class SurplusReport:
    density: Fraction  # |X_T| / |G|, exact
    excess: Fraction  # N_T / (density^3 |G|^2), exact
    solutions: int  # N_T

    @property
    def density_float(self) -> float:
        return float(self.density)

    @property
    def excess_float(self) -> float:
        return float(self.excess)


def surplus_ratio(space: GroupSpace, params: SurplusParams,
                  threads: int | None = None) -> SurplusReport:
    """Exact density of X_T and its solution count relative to the random rate."""
    X = surplus_set(space, params)
    k = X.cardinality
    if k == 0:
        raise ValueError("X_T is empty; excess undefined")
    n_t = count_solutions(X, X, X, threads=threads)
    # N_T / (alpha^3 |G|^2) with alpha = k / |G| reduces to N_T |G| / k^3
    return SurplusReport(
        density=Fraction(k, space.order),
        excess=Fraction(n_t * space.order, k**3),
        solutions=n_t,
    )


# -- sampling specs for the Monte Carlo engine ------------------------------


@dataclass
class PermSetSpec:
    """A permutation set defined through the images at finitely many positions.

    ``positions`` lists the positions membership depends on, and
    ``member_partial`` tests a (k, len(positions)) batch of those images.
    ``density`` is the exact density within S_n (equal to the A_n density
    for these families whenever at least two free points exist).
    """

    n: int
    positions: np.ndarray
    member_partial: object  # callable (k, q) int array -> bool array
    density: Fraction | None = None
    constructive: object | None = None  # callable (count, rng, parity) -> images
    name: str = ""

    def member_full(self, images: np.ndarray) -> np.ndarray:
        return self.member_partial(images[:, self.positions])


def kedlaya_spec(params: KedlayaParams) -> PermSetSpec:
    positions = np.array((params.basepoint,) + params.T, dtype=np.int64)
    in_T = _member_mask(params.n, params.T)

    def member_partial(vals: np.ndarray) -> np.ndarray:
        ok = in_T[vals[:, 0]]
        for j in range(1, vals.shape[1]):
            ok &= ~in_T[vals[:, j]]
        return ok

    from permix import montecarlo  # local import to keep layering acyclic

    def constructive(count, rng, parity):
        return montecarlo.kedlaya_sample(params, count, rng, parity)

    return PermSetSpec(
        n=params.n,
        positions=positions,
        member_partial=member_partial,
        density=kedlaya_density_formula(params.n, params.t).binomial_form,
        constructive=constructive,
        name=f"kedlaya(n={params.n}, t={params.t})",
    )


def surplus_spec(params: SurplusParams) -> PermSetSpec:
    positions = np.array(params.T, dtype=np.int64)
    in_T = _member_mask(params.n, params.T)

    def member_partial(vals: np.ndarray) -> np.ndarray:
        ok = in_T[vals[:, 0]]
        for j in range(1, vals.shape[1]):
            ok |= in_T[vals[:, j]]
        return ok

    return PermSetSpec(
        n=params.n,
        positions=positions,
        member_partial=member_partial,
        density=surplus_density_exact(params.n, params.t),
        name=f"surplus(n={params.n}, t={params.t})",
    )


def subset_spec(subset: GroupSubset) -> PermSetSpec:
    """Spec wrapping an explicitly enumerated subset (for small-n validation).

    The density is relative to the subset's own space, so Monte Carlo runs
    must sample with the matching parity.
    """
    space = subset.space
    codes = space.codes[subset.membership]

    def member_partial(vals: np.ndarray) -> np.ndarray:
        if len(codes) == 0:
            return np.zeros(len(vals), dtype=bool)
        c = groups._encode_rows(vals.astype(np.int16), space.powers)
        idx = np.searchsorted(codes, c)
        idx[idx == len(codes)] = 0
        return codes[idx] == c

    return PermSetSpec(
        n=space.n,
        positions=np.arange(space.n, dtype=np.int64),
        member_partial=member_partial,
        density=Fraction(subset.cardinality, space.order),
        name="enumerated-subset",
    )
