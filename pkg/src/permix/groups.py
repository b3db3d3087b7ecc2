"""Permutations, enumerated group spaces, and uniform-measure calculus.

Everything downstream (standard-representation coefficients, product-free
constructions, concentration experiments) builds on the types here: dense
real-valued functions on an enumerated S_n or A_n, functions on the ground
set {0..n-1}, and subsets with exact counting.  All integrals are means
with respect to the uniform measure on the relevant domain.

Indexing is 0-based internally; the CLI converts to 1-based on input and
output.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator

import numpy as np

from permix import kernels
from permix.errors import BudgetExceeded, CapExceeded

DEFAULT_CAPS = {"all": 10, "even": 11}

# Budgets keep dense working sets at desk scale (~256 MB).
IMAGE_TABLE_MAX_ENTRIES = 150_000_000  # order * n, int16 entries
MULT_TABLE_MAX_ENTRIES = 64_000_000  # order**2, int32 entries
PAIR_BUDGET = 2_000_000_000  # |X| * |Y| composition pairs


def _threads_from_env() -> int:
    try:
        return max(1, int(os.environ.get("PERMIX_THREADS", "1")))
    except ValueError:
        return 1


class Permutation:
    """A permutation of {0..n-1} stored as its image array: images[i] = pi(i)."""

    __slots__ = ("images",)

    def __init__(self, images):
        arr = np.array(images, dtype=np.int16)
        n = arr.shape[0]
        if arr.ndim != 1 or n < 1 or not np.array_equal(np.sort(arr), np.arange(n)):
            raise ValueError("images must be a bijection of {0..n-1}")
        arr.setflags(write=False)
        self.images = arr

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    @classmethod
    def from_one_based(cls, images) -> "Permutation":
        return cls(np.asarray(images, dtype=np.int64) - 1)

    @property
    def n(self) -> int:
        return self.images.shape[0]

    def __call__(self, i: int) -> int:
        return int(self.images[i])

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(i) = self(other(i))
        if self.n != other.n:
            raise ValueError("size mismatch")
        return Permutation(self.images[other.images])

    def inverse(self) -> "Permutation":
        inv = np.empty(self.n, dtype=np.int16)
        inv[self.images] = np.arange(self.n, dtype=np.int16)
        return Permutation(inv)

    def fixed_points(self) -> int:
        return int((self.images == np.arange(self.n)).sum())

    def sign(self) -> int:
        """+1 for even, -1 for odd."""
        return -1 if _parity(self.images) else 1

    @property
    def is_even(self) -> bool:
        return self.sign() == 1

    def one_based(self) -> tuple:
        return tuple(int(v) + 1 for v in self.images)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.images, other.images)

    def __hash__(self) -> int:
        return hash((self.n,) + tuple(int(v) for v in self.images))

    def __repr__(self) -> str:
        return f"Permutation{self.one_based()}"


def _parity(images) -> int:
    """1 if odd, 0 if even (cycle walk)."""
    n = len(images)
    seen = [False] * n
    odd = 0
    for i in range(n):
        if not seen[i]:
            j = i
            length = 0
            while not seen[j]:
                seen[j] = True
                j = int(images[j])
                length += 1
            odd ^= (length - 1) & 1
    return odd


def _lex_rank(images) -> int:
    """Rank of the image array in lexicographic order over S_n."""
    n = len(images)
    r = 0
    for i in range(n):
        c = 0
        for j in range(i + 1, n):
            if images[j] < images[i]:
                c += 1
        r += c * math.factorial(n - 1 - i)
    return r


def _lex_unrank(n: int, k: int) -> np.ndarray:
    avail = list(range(n))
    out = np.empty(n, dtype=np.int16)
    for i in range(n):
        f = math.factorial(n - 1 - i)
        d, k = divmod(k, f)
        out[i] = avail.pop(d)
    return out


def _encode_rows(imgs: np.ndarray, powers: np.ndarray) -> np.ndarray:
    # column-at-a-time to avoid an (order, n) int64 temporary
    out = np.zeros(imgs.shape[0], dtype=np.int64)
    for i in range(imgs.shape[1]):
        out += imgs[:, i].astype(np.int64) * int(powers[i])
    return out


def _perm_table_with_parity(n: int):
    """All of S_n in lexicographic order: (n!, n) int16 images + parity bits."""
    if n == 1:
        return np.zeros((1, 1), dtype=np.int16), np.zeros(1, dtype=np.uint8)
    sub, sub_par = _perm_table_with_parity(n - 1)
    m = sub.shape[0]
    table = np.empty((n * m, n), dtype=np.int16)
    par = np.empty(n * m, dtype=np.uint8)
    for v in range(n):
        block = table[v * m : (v + 1) * m]
        block[:, 0] = v
        block[:, 1:] = sub + (sub >= v)  # relabel the remaining values
        par[v * m : (v + 1) * m] = (sub_par + v) & 1
    return table, par


class GroupSpace:
    """An enumerated S_n (parity='all') or A_n (parity='even') with uniform measure.

    Elements are indexed 0..order-1 by the lexicographic rank of their image
    arrays; A_n is enumerated as the even subsequence of the S_n order, so
    its rank is the S_n rank floor-divided by two.
    """

    def __init__(self, n: int, parity: str = "all", cap: int | None = None):
        if parity not in ("all", "even"):
            raise ValueError("parity must be 'all' or 'even'")
        if n < 1:
            raise ValueError("n must be >= 1")
        limit = DEFAULT_CAPS[parity] if cap is None else cap
        if n > limit:
            raise CapExceeded(
                f"n={n} exceeds the enumeration cap {limit} for parity '{parity}'"
            )
        self.n = n
        self.parity = parity
        self.order = math.factorial(n) if parity == "all" or n < 2 else math.factorial(n) // 2
        self._images = None
        self._codes = None
        self._inv_images = None
        self._inv_ranks = None
        self._mult = None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupSpace)
            and self.n == other.n
            and self.parity == other.parity
        )

    def __hash__(self) -> int:
        return hash((self.n, self.parity))

    def __repr__(self) -> str:
        name = "S" if self.parity == "all" else "A"
        return f"GroupSpace({name}_{self.n}, order={self.order})"

    # -- ranking ---------------------------------------------------------

    def contains(self, p: Permutation) -> bool:
        return p.n == self.n and (self.parity == "all" or p.is_even)

    def rank(self, p: Permutation) -> int:
        if p.n != self.n:
            raise ValueError("size mismatch")
        r = _lex_rank(p.images)
        if self.parity == "even":
            if not p.is_even:
                raise ValueError("odd permutation is not a member of this space")
            return r >> 1
        return r

    def unrank(self, k: int) -> Permutation:
        if not 0 <= k < self.order:
            raise ValueError(f"rank {k} out of range for order {self.order}")
        if self.parity == "all" or self.n < 2:
            return Permutation(_lex_unrank(self.n, k))
        imgs = _lex_unrank(self.n, 2 * k)
        if _parity(imgs):
            # the lex-adjacent partner differs by swapping the last two images
            imgs = imgs.copy()
            imgs[-2], imgs[-1] = imgs[-1], imgs[-2]
        return Permutation(imgs)

    def elements(self) -> Iterator[Permutation]:
        for k in range(self.order):
            yield self.unrank(k)

    # -- cached dense structures ------------------------------------------

    @property
    def images_table(self) -> np.ndarray:
        """(order, n) int16 array of all image arrays, in rank order."""
        if self._images is None:
            if self.order * self.n > IMAGE_TABLE_MAX_ENTRIES:
                raise BudgetExceeded(
                    f"images table for {self!r} exceeds the dense budget"
                )
            table, par = _perm_table_with_parity(self.n)
            if self.parity == "even":
                table = np.ascontiguousarray(table[par == 0])
            table.setflags(write=False)
            self._images = table
        return self._images

    @property
    def powers(self) -> np.ndarray:
        """Mixed-radix weights so that encoded images sort lexicographically."""
        n = self.n
        return np.array([n ** (n - 1 - i) for i in range(n)], dtype=np.int64)

    @property
    def codes(self) -> np.ndarray:
        """int64 code of each element, ascending (lex order <=> numeric order)."""
        if self._codes is None:
            codes = _encode_rows(self.images_table, self.powers)
            codes.setflags(write=False)
            self._codes = codes
        return self._codes

    @property
    def inv_images_table(self) -> np.ndarray:
        """(order, n) int16 array of the inverse of each element's images."""
        if self._inv_images is None:
            inv = np.argsort(self.images_table, axis=1).astype(np.int16)
            inv.setflags(write=False)
            self._inv_images = inv
        return self._inv_images

    @property
    def inverse_ranks(self) -> np.ndarray:
        """rank of the inverse of each element."""
        if self._inv_ranks is None:
            codes = _encode_rows(self.inv_images_table, self.powers)
            ranks = np.searchsorted(self.codes, codes).astype(np.int32)
            ranks.setflags(write=False)
            self._inv_ranks = ranks
        return self._inv_ranks

    @property
    def mult_table(self) -> np.ndarray:
        """(order, order) int32 table of rank(a∘b); budget-guarded and cached."""
        if self._mult is None:
            if self.order * self.order > MULT_TABLE_MAX_ENTRIES:
                raise BudgetExceeded(
                    f"multiplication table for {self!r} exceeds the dense budget"
                )
            self._mult = kernels.build_mult_table(
                self.images_table, self.codes, self.powers
            )
            self._mult.setflags(write=False)
        return self._mult


def enumerate_group(n: int, parity: str = "all", cap: int | None = None) -> GroupSpace:
    """Deterministically enumerated S_n or A_n with rank/unrank bijection."""
    return GroupSpace(n, parity, cap=cap)


class GroupFunction:
    """A dense real-valued function on an enumerated group space."""

    __slots__ = ("space", "values")

    def __init__(self, space: GroupSpace, values):
        v = np.array(values, dtype=np.float64)
        if v.shape != (space.order,):
            raise ValueError("values must have length space.order")
        v.setflags(write=False)
        self.space = space
        self.values = v

    @classmethod
    def constant(cls, space: GroupSpace, c: float) -> "GroupFunction":
        return cls(space, np.full(space.order, float(c)))

    @classmethod
    def delta(cls, space: GroupSpace, p: Permutation) -> "GroupFunction":
        """Indicator of a single element."""
        v = np.zeros(space.order)
        v[space.rank(p)] = 1.0
        return cls(space, v)

    @property
    def is_indicator(self) -> bool:
        v = self.values
        return bool(np.all((v == 0.0) | (v == 1.0)))

    def mean_zero(self) -> "GroupFunction":
        return GroupFunction(self.space, self.values - self.values.mean())

    def __add__(self, other):
        _same_group(self, other)
        return GroupFunction(self.space, self.values + other.values)

    def __sub__(self, other):
        _same_group(self, other)
        return GroupFunction(self.space, self.values - other.values)

    def scaled(self, c: float) -> "GroupFunction":
        return GroupFunction(self.space, self.values * c)

    def __repr__(self) -> str:
        return f"GroupFunction(on {self.space!r}, mean={self.values.mean():.6g})"


class OmegaFunction:
    """A dense real-valued function on the ground set {0..n-1}."""

    __slots__ = ("n", "values")

    def __init__(self, n: int, values):
        v = np.array(values, dtype=np.float64)
        if v.shape != (n,):
            raise ValueError("values must have length n")
        v.setflags(write=False)
        self.n = n
        self.values = v

    @classmethod
    def constant(cls, n: int, c: float) -> "OmegaFunction":
        return cls(n, np.full(n, float(c)))

    @classmethod
    def indicator(cls, n: int, points) -> "OmegaFunction":
        v = np.zeros(n)
        v[np.asarray(list(points), dtype=np.int64)] = 1.0
        return cls(n, v)

    def mean_zero(self) -> "OmegaFunction":
        return OmegaFunction(self.n, self.values - self.values.mean())

    def __add__(self, other):
        _same_omega(self, other)
        return OmegaFunction(self.n, self.values + other.values)

    def __sub__(self, other):
        _same_omega(self, other)
        return OmegaFunction(self.n, self.values - other.values)

    def scaled(self, c: float) -> "OmegaFunction":
        return OmegaFunction(self.n, self.values * c)

    def __repr__(self) -> str:
        return f"OmegaFunction(n={self.n}, mean={self.values.mean():.6g})"


class GroupSubset:
    """A subset of a group space stored as a dense membership mask."""

    __slots__ = ("space", "membership")

    def __init__(self, space: GroupSpace, membership):
        m = np.array(membership, dtype=bool)
        if m.shape != (space.order,):
            raise ValueError("membership must have length space.order")
        m.setflags(write=False)
        self.space = space
        self.membership = m

    @classmethod
    def from_ranks(cls, space: GroupSpace, ranks) -> "GroupSubset":
        m = np.zeros(space.order, dtype=bool)
        m[np.asarray(list(ranks), dtype=np.int64)] = True
        return cls(space, m)

    @classmethod
    def from_permutations(cls, space: GroupSpace, perms) -> "GroupSubset":
        return cls.from_ranks(space, [space.rank(p) for p in perms])

    @classmethod
    def from_predicate(
        cls, space: GroupSpace, pred: Callable[[np.ndarray], np.ndarray]
    ) -> "GroupSubset":
        """pred maps an (k, n) batch of image arrays to a boolean mask."""
        return cls(space, np.asarray(pred(space.images_table), dtype=bool))

    @classmethod
    def full(cls, space: GroupSpace) -> "GroupSubset":
        return cls(space, np.ones(space.order, dtype=bool))

    @classmethod
    def empty(cls, space: GroupSpace) -> "GroupSubset":
        return cls(space, np.zeros(space.order, dtype=bool))

    @property
    def cardinality(self) -> int:
        return int(self.membership.sum())

    @property
    def density(self) -> float:
        return self.cardinality / self.space.order

    def ranks(self) -> np.ndarray:
        return np.nonzero(self.membership)[0]

    def images(self) -> np.ndarray:
        """(|X|, n) image arrays of the members, in rank order."""
        return np.ascontiguousarray(self.space.images_table[self.membership])

    def indicator(self) -> GroupFunction:
        return GroupFunction(self.space, self.membership.astype(np.float64))

    def permutations(self) -> list:
        return [self.space.unrank(int(k)) for k in self.ranks()]

    def __contains__(self, p: Permutation) -> bool:
        if not self.space.contains(p):
            return False
        return bool(self.membership[self.space.rank(p)])

    def __repr__(self) -> str:
        return f"GroupSubset({self.cardinality}/{self.space.order} of {self.space!r})"


def _same_group(f: GroupFunction, g: GroupFunction) -> None:
    if not isinstance(g, GroupFunction) or f.space != g.space:
        raise ValueError("functions live on different group spaces")


def _same_omega(u: OmegaFunction, v: OmegaFunction) -> None:
    if not isinstance(v, OmegaFunction) or u.n != v.n:
        raise ValueError("functions live on different ground sets")


# -- measure calculus ------------------------------------------------------


def integral(f) -> float:
    """Mean of the values: the integral against the uniform measure."""
    return float(f.values.mean())


def inner_product(f, g) -> float:
    """<f, g> = mean of the pointwise product (real functions, same domain)."""
    if isinstance(f, GroupFunction):
        _same_group(f, g)
    elif isinstance(f, OmegaFunction):
        _same_omega(f, g)
    else:
        raise TypeError("expected GroupFunction or OmegaFunction")
    return float((f.values * g.values).mean())


def norm2(f) -> float:
    """L2 norm under the uniform measure."""
    return math.sqrt(float((f.values * f.values).mean()))


def convolve_group(f: GroupFunction, g: GroupFunction) -> GroupFunction:
    """(f*g)(x) = integral over y of f(y) g(y^-1 x).

    Indicator inputs take an exact integer-counting path over the supports;
    general inputs use the dense multiplication table.
    """
    _same_group(f, g)
    space = f.space
    if f.is_indicator and g.is_indicator:
        counts = _indicator_product_counts(f, g)
        return GroupFunction(space, counts / space.order)
    return GroupFunction(
        space,
        kernels.convolve_table(space.mult_table, space.inverse_ranks, f.values, g.values),
    )


def _indicator_product_counts(f: GroupFunction, g: GroupFunction) -> np.ndarray:
    space = f.space
    xr = np.nonzero(f.values)[0]
    yr = np.nonzero(g.values)[0]
    if len(xr) * len(yr) > PAIR_BUDGET:
        raise BudgetExceeded("support pair count exceeds the compute budget")
    x_imgs = np.ascontiguousarray(space.images_table[xr])
    y_imgs = np.ascontiguousarray(space.images_table[yr])
    return kernels.product_counts(x_imgs, y_imgs, space.codes, space.powers)


def triple_inner(f: GroupFunction, g: GroupFunction, h: GroupFunction) -> float:
    """<f*g, h>, with an exact integer path when all three are indicators."""
    _same_group(f, g)
    _same_group(f, h)
    space = f.space
    if f.is_indicator and g.is_indicator and h.is_indicator:
        cnt = count_products(
            GroupSubset(space, f.values != 0),
            GroupSubset(space, g.values != 0),
            GroupSubset(space, h.values != 0),
        )
        return cnt / space.order**2
    return inner_product(convolve_group(f, g), h)


def count_products(
    X: GroupSubset,
    Y: GroupSubset,
    Z: GroupSubset,
    threads: int | None = None,
    pair_budget: int | None = None,
) -> int:
    """Exact #{(x, y) in X x Y : xy in Z}.

    Splitting over x-row chunks is safe for threading: chunk counts are
    integers, so the total is independent of the thread count.
    """
    if X.space != Y.space or X.space != Z.space:
        raise ValueError("subsets live on different group spaces")
    space = X.space
    budget = PAIR_BUDGET if pair_budget is None else pair_budget
    kx, ky = X.cardinality, Y.cardinality
    if kx * ky > budget:
        raise BudgetExceeded(
            f"|X|*|Y| = {kx * ky} exceeds the exact-count budget {budget}; "
            "use the Monte Carlo estimator"
        )
    if kx == 0 or ky == 0 or Z.cardinality == 0:
        return 0
    x_imgs = X.images()
    y_imgs = Y.images()
    z_codes = space.codes[Z.membership]
    threads = _threads_from_env() if threads is None else max(1, threads)
    if threads == 1 or kx < 2 * threads:
        return int(kernels.count_triple(x_imgs, y_imgs, z_codes, space.powers))
    bounds = np.linspace(0, kx, threads + 1, dtype=int)
    chunks = [
        np.ascontiguousarray(x_imgs[a:b]) for a, b in zip(bounds[:-1], bounds[1:]) if b > a
    ]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(
            lambda c: int(kernels.count_triple(c, y_imgs, z_codes, space.powers)), chunks
        )
        return sum(parts)


def convolve_group_omega(f: GroupFunction, u: OmegaFunction) -> OmegaFunction:
    """(f*u)(w) = integral over pi of f(pi) u(pi^-1(w)); a function on the ground set."""
    space = f.space
    if space.n != u.n:
        raise ValueError("size mismatch between group space and ground set")
    gathered = u.values[space.inv_images_table]  # (order, n)
    return OmegaFunction(u.n, f.values @ gathered / space.order)


def pushforward(f: GroupFunction, i: int) -> OmegaFunction:
    """p_i f(w) = n * integral of f(pi) over {pi(i) = w}; preserves total mass."""
    space = f.space
    if not 0 <= i < space.n:
        raise ValueError(f"index {i} out of range for n={space.n}")
    sums = np.bincount(space.images_table[:, i], weights=f.values, minlength=space.n)
    return OmegaFunction(space.n, sums * (space.n / space.order))


def entropy(f) -> float:
    """S(f) = integral of (f/a) log(f/a) with a = integral of f; 0 log 0 = 0."""
    v = f.values
    if np.any(v < 0):
        raise ValueError("entropy requires nonnegative values")
    a = v.mean()
    if a <= 0:
        raise ValueError("entropy requires positive total mass")
    r = v / a
    pos = r > 0
    out = np.zeros_like(r)
    out[pos] = r[pos] * np.log(r[pos])
    return float(out.mean())


# -- randomness ------------------------------------------------------------


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_subset(space: GroupSpace, density: float, seed) -> GroupSubset:
    """Independent Bernoulli(density) membership; reproducible given the seed."""
    if not 0 <= density <= 1:
        raise ValueError("density must lie in [0, 1]")
    rng = _as_rng(seed)
    return GroupSubset(space, rng.random(space.order) < density)


def random_nonempty_subset(space: GroupSpace, density: float, seed) -> GroupSubset:
    """Like random_subset but redraws until the subset is nonempty."""
    rng = _as_rng(seed)
    while True:
        s = random_subset(space, density, rng)
        if s.cardinality:
            return s


def random_permutation(space: GroupSpace, seed) -> Permutation:
    """Uniform element of the space; parity handled by resampling."""
    rng = _as_rng(seed)
    while True:
        p = Permutation(rng.permutation(space.n))
        if space.parity == "all" or p.is_even:
            return p


def random_function(space: GroupSpace, seed, low: float = 0.0, high: float = 1.0) -> GroupFunction:
    rng = _as_rng(seed)
    return GroupFunction(space, rng.uniform(low, high, space.order))


def random_omega_function(n: int, seed, low: float = 0.0, high: float = 1.0) -> OmegaFunction:
    rng = _as_rng(seed)
    return OmegaFunction(n, rng.uniform(low, high, n))
