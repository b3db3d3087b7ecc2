"""Concentration for the permutation statistic X = sum_i a[i, pi(i)].

Exact distributions by enumeration, the Bernstein-type tail bound and the
exponential-moment inequality from which it follows, the dyadic split of
a ground-set function into signed magnitude bands, and deficit reports for
randomly rearranged inner products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from permix import groups, montecarlo
from permix.errors import CapExceeded
from permix.groups import GroupFunction, GroupSpace, OmegaFunction

DEFAULT_BERNSTEIN_C = 1.0 / 16.0  # from the lambda = t/(4v + 2Mt) choice, with slack
RATIONAL_ENUM_CAP = 8

_CENTER_TOL = 1e-9


@dataclass(frozen=True)
class ConcentrationInstance:
    """An n x n real matrix with the statistics the tail bounds depend on:
    M = max |a_ij| and v = (1/n) sum a_ij^2."""

    a: np.ndarray
    shift: float = 0.0  # constant separating this matrix's X from the original's
    M: float = field(init=False)
    v: float = field(init=False)
    centered: bool = field(init=False)

    def __post_init__(self):
        if np.iscomplexobj(self.a):
            raise TypeError("complex matrices are not supported; split into real parts")
        a = np.array(self.a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError("matrix must be square and nonempty")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        M = float(np.abs(a).max())
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "v", float((a * a).sum() / a.shape[0]))
        rowsums = a.sum(axis=1)
        object.__setattr__(
            self, "centered", bool(np.all(np.abs(rowsums) <= _CENTER_TOL * max(1.0, M)))
        )

    @property
    def n(self) -> int:
        return self.a.shape[0]


def center(inst: ConcentrationInstance) -> ConcentrationInstance:
    """Subtract each row's mean.  X changes by the recorded constant shift only;
    max |a_ij| at most doubles and v never increases."""
    means = inst.a.mean(axis=1)
    return ConcentrationInstance(inst.a - means[:, None], shift=inst.shift + float(means.sum()))


def hoeffding_values(inst: ConcentrationInstance, space: GroupSpace) -> np.ndarray:
    """X(pi) for every element of the space, in rank order."""
    if space.n != inst.n:
        raise ValueError("matrix size does not match the group's ground set")
    tab = space.images_table
    vals = np.zeros(space.order)
    for i in range(inst.n):
        vals += inst.a[i, tab[:, i]]
    return vals


@dataclass(frozen=True)
class HoeffdingDistribution:
    """Exact distribution of X over the uniform measure on a group space."""

    support: np.ndarray  # ascending
    probs: np.ndarray
    rational: dict | None = None  # value -> Fraction mass, when requested

    def as_dict(self) -> dict:
        if self.rational is not None:
            return dict(self.rational)
        return {float(x): float(p) for x, p in zip(self.support, self.probs)}

    def mean(self) -> float:
        return float((self.support * self.probs).sum())

    def tail_prob(self, t: float) -> float:
        """P(|X| > t)."""
        return float(self.probs[np.abs(self.support) > t].sum())


def hoeffding_exact_distribution(
    inst: ConcentrationInstance, space: GroupSpace, rational: bool = False
) -> HoeffdingDistribution:
    vals = hoeffding_values(inst, space)
    support, counts = np.unique(vals, return_counts=True)
    probs = counts / space.order
    rat = None
    if rational:
        if space.n > RATIONAL_ENUM_CAP:
            raise CapExceeded(f"rational enumeration capped at n={RATIONAL_ENUM_CAP}")
        acc: dict = {}
        entries = [[Fraction(inst.a[i, j]) for j in range(inst.n)] for i in range(inst.n)]
        mass = Fraction(1, space.order)
        for row in space.images_table:
            x = sum(entries[i][int(row[i])] for i in range(inst.n))
            acc[x] = acc.get(x, Fraction(0)) + mass
        rat = acc
    return HoeffdingDistribution(support, probs, rat)


def hoeffding_sample(inst: ConcentrationInstance, samples: int, seed, parity: str = "all") -> np.ndarray:
    """Monte Carlo draws of X via uniform permutations."""
    rng = groups._as_rng(seed)
    out = np.empty(samples)
    done = 0
    while done < samples:
        k = min(montecarlo.CHUNK, samples - done)
        imgs = montecarlo.uniform_images(inst.n, k, rng, parity)
        vals = np.zeros(k)
        for i in range(inst.n):
            vals += inst.a[i, imgs[:, i]]
        out[done : done + k] = vals
        done += k
    return out


def bernstein_bound(inst: ConcentrationInstance, t: float, c: float = DEFAULT_BERNSTEIN_C) -> float:
    """2 exp(-c t^2 / (v + M t)).  The constant is a free parameter; the
    default 1/16 is conservative for the optimizing lambda in the proof."""
    if t <= 0 or c <= 0:
        raise ValueError("t and c must be positive")
    return 2.0 * math.exp(-c * t * t / (inst.v + inst.M * t))


def exp_moment_bound(inst: ConcentrationInstance, lam: float) -> float:
    """exp(2 lambda^2 v / (1 - 2 lambda M)); valid for row-centered matrices."""
    if lam <= 0 or 2 * lam * inst.M >= 1:
        raise ValueError("need 0 < lambda and 2 lambda M < 1")
    return math.exp(2 * lam * lam * inst.v / (1 - 2 * lam * inst.M))


def exp_moment_pair(inst: ConcentrationInstance, lam: float, space: GroupSpace) -> tuple:
    """(exact E exp(lambda X), closed-form bound); exact <= bound is the contract."""
    if not inst.centered:
        raise ValueError("row sums must vanish; apply center() first")
    bound = exp_moment_bound(inst, lam)
    vals = hoeffding_values(inst, space)
    exact = float(np.exp(lam * vals).mean())
    return exact, bound


def cll_exp_moment_step(inst: ConcentrationInstance, lam: float, space: GroupSpace) -> tuple:
    """(E exp(lambda X), prod_i ((1/n) sum_j exp(2 lambda a_ij))^(1/2)).

    The second entry dominates the first for any real matrix: it is the
    row-product bound obtained from the permanent inequality.
    """
    vals = hoeffding_values(inst, space)
    lhs = float(np.exp(lam * vals).mean())
    rhs = float(np.prod(np.sqrt(np.exp(2 * lam * inst.a).mean(axis=1))))
    return lhs, rhs


def fitted_bernstein_constant(
    inst: ConcentrationInstance, space: GroupSpace, grid_points: int = 25
) -> float:
    """Largest c for which the tail bound dominates the exact tail on a t grid.

    Returns inf when the exact tail is identically zero (the constraint set
    is empty).
    """
    dist = hoeffding_exact_distribution(inst, space)
    tmax = float(np.abs(dist.support).max())
    if tmax <= 0:
        return math.inf
    best = math.inf
    for t in np.linspace(tmax / grid_points, tmax, grid_points):
        p = dist.tail_prob(float(t))
        if p <= 0:
            continue
        best = min(best, (inst.v + inst.M * t) / (t * t) * math.log(2 / p))
    return best


# -- dyadic decomposition ----------------------------------------------------


@dataclass(frozen=True)
class DyadicPiece:
    """g - integral(g) restricted to one signed dyadic magnitude band."""

    s: float  # signed scale +-2^-k; entries have sign(s), magnitude in (|s|/2, |s|]
    values: OmegaFunction
    delta: float  # support density


def dyadic_decompose(g: OmegaFunction, floor: float = 1e-15) -> list:
    """Split g - integral(g) into signed dyadic bands, dropping magnitudes <= floor.

    Retained entries are copied exactly, so the pieces sum back to the
    centered function wherever anything was retained; the dropped mass is at
    most n * floor in l1.
    """
    v = g.values
    if np.any(v < 0) or np.any(v > 1):
        raise ValueError("g must take values in [0, 1]")
    if floor <= 0:
        raise ValueError("floor must be positive")
    d = v - v.mean()
    absd = np.abs(d)
    pieces = []
    s = 1.0
    min_retained = absd[absd > floor].min() if (absd > floor).any() else None
    if min_retained is None:
        return pieces
    while s > floor and s >= min_retained:
        band = (absd > max(s / 2, floor)) & (absd <= s)
        for sign in (1.0, -1.0):
            mask = band & ((d > 0) if sign > 0 else (d < 0))
            if mask.any():
                pieces.append(
                    DyadicPiece(
                        s=sign * s,
                        values=OmegaFunction(g.n, np.where(mask, d, 0.0)),
                        delta=float(mask.mean()),
                    )
                )
        s /= 2
    return pieces


# -- level-set and rearrangement deficits ------------------------------------


@dataclass(frozen=True)
class LevelSetPair:
    """Two ground-set functions valued in [1/2, 1] on their supports."""

    h1: OmegaFunction
    h2: OmegaFunction

    def __post_init__(self):
        if self.h1.n != self.h2.n:
            raise ValueError("level-set functions must share a ground set")
        for h in (self.h1, self.h2):
            on = h.values != 0
            if on.any() and (np.any(h.values[on] < 0.5) or np.any(h.values[on] > 1.0)):
                raise ValueError("support values must lie in [1/2, 1]")

    @property
    def delta1(self) -> float:
        return float((self.h1.values != 0).mean())

    @property
    def delta2(self) -> float:
        return float((self.h2.values != 0).mean())


@dataclass(frozen=True)
class LevelSetReport:
    observed: float  # <f*h1, h2> - alpha int(h1) int(h2)
    regime: str  # "high" when delta1*delta2 >= 1/n, else "low"
    bounds: dict
    alpha: float
    delta1: float
    delta2: float
    method: str


def _levelset_report(observed, alpha, pair, n, method) -> LevelSetReport:
    d1, d2 = pair.delta1, pair.delta2
    ln = math.log(n) if n >= 2 else 0.0
    if d1 * d2 >= 1.0 / n:
        regime = "high"
        bounds = {"gaussian_band": alpha * math.sqrt(d1 * d2) * ln / math.sqrt(n)}
    else:
        regime = "low"
        bounds = {
            "poisson_band": alpha * ln / n,
            "mass_band": d1 * d2,
            "lower_band": alpha * d1 * d2,
        }
    return LevelSetReport(observed, regime, bounds, alpha, d1, d2, method)


def levelset_deficit(f: GroupFunction, pair: LevelSetPair) -> LevelSetReport:
    """Exact deviation of <f*h1, h2> from its mean-field value (enumerated space)."""
    if np.any(f.values < 0) or np.any(f.values > 1):
        raise ValueError("f must take values in [0, 1]")
    if f.space.n != pair.h1.n:
        raise ValueError("size mismatch")
    alpha = float(f.values.mean())
    conv = groups.convolve_group_omega(f, pair.h1)
    observed = groups.inner_product(conv, pair.h2) - alpha * float(
        pair.h1.values.mean()
    ) * float(pair.h2.values.mean())
    return _levelset_report(observed, alpha, pair, f.space.n, "exact")


def levelset_deficit_mc(
    f_batch, n: int, pair: LevelSetPair, samples: int, seed, alpha: float | None = None
) -> LevelSetReport:
    """Monte Carlo deviation estimate for implicit f: mean of f(pi) V(pi) over
    uniform pi, where V is the rearranged inner product of the pair."""
    if pair.h1.n != n:
        raise ValueError("size mismatch")
    rng = groups._as_rng(seed)
    h1, h2 = pair.h1.values, pair.h2.values
    total = 0.0
    ftotal = 0.0
    done = 0
    while done < samples:
        k = min(montecarlo.CHUNK, samples - done)
        imgs = montecarlo.uniform_images(n, k, rng)
        fv = np.asarray(f_batch(imgs), dtype=np.float64)
        if np.any(fv < 0) or np.any(fv > 1):
            raise ValueError("f must take values in [0, 1]")
        V = (h1[None, :] * h2[imgs]).mean(axis=1)
        total += float((fv * V).sum())
        ftotal += float(fv.sum())
        done += k
    est = total / samples
    a = ftotal / samples if alpha is None else alpha
    observed = est - a * float(h1.mean()) * float(h2.mean())
    return _levelset_report(observed, a, pair, n, "monte_carlo")


@dataclass(frozen=True)
class RearrangementReport:
    """Deficit of <f*g1, g2> below its mean-field value against the two
    bound terms (all implicit constants set to 1)."""

    n: int
    alpha: float
    beta: float
    gamma: float
    deficit: float  # -(<f*g1, g2> - alpha beta gamma)
    variance_term: float
    entropy_term: float
    ratio: float  # deficit / (variance_term + entropy_term); nan when 0/0


def rearrangement_deficit_report(
    f: GroupFunction, g1: OmegaFunction, g2: OmegaFunction
) -> RearrangementReport:
    for name, v in (("f", f.values), ("g1", g1.values), ("g2", g2.values)):
        if np.any(v < 0) or np.any(v > 1):
            raise ValueError(f"{name} must take values in [0, 1]")
    n = f.space.n
    if g1.n != n or g2.n != n:
        raise ValueError("size mismatch")
    alpha = float(f.values.mean())
    beta = float(g1.values.mean())
    gamma = float(g2.values.mean())
    conv = groups.convolve_group_omega(f, g1)
    deficit = -(groups.inner_product(conv, g2) - alpha * beta * gamma)
    ln = math.log(n)
    var_term = (
        alpha * groups.norm2(g1.mean_zero()) * groups.norm2(g2.mean_zero()) * ln / math.sqrt(n)
    )
    s1 = groups.entropy(g1) if beta > 0 else 0.0
    s2 = groups.entropy(g2) if gamma > 0 else 0.0
    ent_term = (
        math.sqrt(alpha * beta * gamma)
        * (math.sqrt(beta) + math.sqrt(gamma))
        * math.sqrt(s1 * s2)
        * ln**2.5
        / math.sqrt(n)
    )
    denom = var_term + ent_term
    ratio = deficit / denom if denom > 0 else math.nan
    return RearrangementReport(n, alpha, beta, gamma, deficit, var_term, ent_term, ratio)


# -- matrix CSV interface ----------------------------------------------------


def load_matrix_csv(path) -> np.ndarray:
    """Read the matrix format: a header line 'n', the size, then n rows of n values."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "n":
        raise ValueError("matrix CSV must start with the header line 'n'")
    n = int(lines[1])
    rows = [[float(x) for x in ln.split(",")] for ln in lines[2 : 2 + n]]
    a = np.array(rows, dtype=np.float64)
    if a.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix, got shape {a.shape}")
    return a


def save_matrix_csv(path, a: np.ndarray) -> None:
    n = a.shape[0]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("n\n")
        fh.write(f"{n}\n")
        for row in a:
            fh.write(",".join(format(float(x), ".12g") for x in row) + "\n")
