"""Product-mixing measurements: exact triple counts, Monte Carlo estimates,
the minimal-representation bound, threshold diagnostics, and product-free
certification."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from permix import constructions, groups, montecarlo
from permix.constructions import PermSetSpec, count_solutions
from permix.errors import BudgetExceeded
from permix.groups import GroupSubset

Z_95 = 1.959963984540054  # two-sided 95% normal quantile


def gowers_bound(m: int, alpha: float, beta: float, gamma: float) -> float:
    """m^{-1/2} (alpha beta gamma)^{1/2}: the representation-theoretic bound
    on |<1_X * 1_Y, 1_Z> - alpha beta gamma| for a group whose nontrivial
    representations all have dimension at least m."""
    return math.sqrt(alpha * beta * gamma / m)


def threshold_margin(alpha: float, beta: float, gamma: float, n: int) -> float:
    """min(ab, ac, bc) * n / (log n)^7: above ~1 is the one-sided mixing regime."""
    pairmin = min(alpha * beta, alpha * gamma, beta * gamma)
    return pairmin * n / math.log(n) ** 7


@dataclass(frozen=True)
class MixingReport:
    total: float  # <1_X * 1_Y, 1_Z>
    main: float  # alpha beta gamma
    gowers_bound: float
    threshold_margin: float
    method: str  # "exact" | "monte_carlo"
    stderr: float  # 0 for exact
    alpha: float
    beta: float
    gamma: float
    n: int
    m: int | None
    samples: int = 0
    hits: int = 0

    @property
    def deviation(self) -> float:
        return self.total - self.main


def mixing_exact(
    X: GroupSubset,
    Y: GroupSubset,
    Z: GroupSubset,
    m: int,
    threads: int | None = None,
    pair_budget: int | None = None,
) -> MixingReport:
    """Exact triple-product report; raises BudgetExceeded (suggesting the
    Monte Carlo path) when |X||Y| is too large."""
    space = X.space
    try:
        cnt = count_solutions(X, Y, Z, threads=threads, pair_budget=pair_budget)
    except BudgetExceeded as exc:
        raise BudgetExceeded(f"{exc}; use mixing_monte_carlo") from None
    a, b, c = X.density, Y.density, Z.density
    return MixingReport(
        total=cnt / space.order**2,
        main=a * b * c,
        gowers_bound=gowers_bound(m, a, b, c),
        threshold_margin=threshold_margin(a, b, c, space.n) if space.n >= 2 else math.inf,
        method="exact",
        stderr=0.0,
        alpha=a,
        beta=b,
        gamma=c,
        n=space.n,
        m=m,
        hits=cnt,
    )


def mixing_monte_carlo(
    x_spec: PermSetSpec,
    y_spec: PermSetSpec,
    z_spec: PermSetSpec,
    n: int,
    samples: int,
    seed,
    parity: str = "all",
    m: int | None = None,
    density_probe: int = 200_000,
) -> MixingReport:
    """Estimate <1_X * 1_Y, 1_Z> by sampling x in X and y in Y and testing xy in Z.

    x is drawn complete; y is drawn only at the positions needed for its own
    membership and for the product test.  The estimate is
    alpha * beta * (hit fraction), with the densities taken exactly from the
    specs when available and estimated from the rejection acceptance rate
    otherwise.  stderr is the binomial standard error of the hit fraction,
    scaled by alpha * beta.
    """
    if parity not in ("all", "even"):
        raise ValueError("parity must be 'all' or 'even'")
    rng = groups._as_rng(seed)
    z_pos = np.asarray(z_spec.positions, dtype=np.int64)
    hits = 0
    x_attempts = x_accepts = 0
    y_attempts = y_accepts = 0
    x_scale = y_scale = 1.0
    done = 0
    while done < samples:
        k = min(montecarlo.CHUNK, samples - done)
        if x_spec.constructive is not None:
            x_imgs = x_spec.constructive(k, rng, parity)
        else:
            draw = montecarlo.conditioned_images(x_spec, k, rng, parity, complete=True)
            x_imgs = draw.values
            x_attempts += draw.attempts
            x_accepts += k
            x_scale = draw.density_scale
        if y_spec.constructive is not None:
            y_imgs = y_spec.constructive(k, rng, parity)
            y_at_z = y_imgs[:, z_pos]
        else:
            draw = montecarlo.conditioned_images(
                y_spec, k, rng, parity, extra_positions=z_pos
            )
            y_attempts += draw.attempts
            y_accepts += k
            y_scale = draw.density_scale
            col = {int(p): j for j, p in enumerate(draw.positions)}
            y_at_z = draw.values[:, [col[int(p)] for p in z_pos]]
        rows = np.arange(k)[:, None]
        prod_vals = x_imgs[rows, y_at_z.astype(np.int64)]
        hits += int(np.asarray(z_spec.member_partial(prod_vals), dtype=bool).sum())
        done += k

    p_hat = hits / samples
    alpha = (
        float(x_spec.density)
        if x_spec.density is not None
        else x_scale * x_accepts / x_attempts
    )
    beta = (
        float(y_spec.density)
        if y_spec.density is not None
        else y_scale * y_accepts / y_attempts
    )
    if z_spec.density is not None:
        gamma = float(z_spec.density)
    else:
        gamma = montecarlo.estimate_density(z_spec, min(samples, density_probe), rng, parity)
    se = alpha * beta * math.sqrt(max(p_hat * (1 - p_hat), 0.0) / samples)
    return MixingReport(
        total=alpha * beta * p_hat,
        main=alpha * beta * gamma,
        gowers_bound=gowers_bound(m, alpha, beta, gamma) if m else math.nan,
        threshold_margin=threshold_margin(alpha, beta, gamma, n) if n >= 2 else math.inf,
        method="monte_carlo",
        stderr=se,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        n=n,
        m=m,
        samples=samples,
        hits=hits,
    )


@dataclass(frozen=True)
class ProductFreeResult:
    is_product_free: bool
    witness: tuple | None  # (x, y, xy) Permutations when not product-free

    def __bool__(self) -> bool:
        return self.is_product_free


def product_free_check(
    X: GroupSubset, threads: int | None = None, pair_budget: int | None = None
) -> ProductFreeResult:
    """True iff no (x, y) in X^2 has xy in X; otherwise the first witness
    triple in rank order."""
    space = X.space
    kx = X.cardinality
    budget = groups.PAIR_BUDGET if pair_budget is None else pair_budget
    if kx * kx > budget:
        raise BudgetExceeded(f"|X|^2 = {kx * kx} exceeds the budget {budget}")
    if kx == 0:
        return ProductFreeResult(True, None)
    imgs = X.images()
    z_codes = space.codes[X.membership]
    from permix import kernels

    ix, iy = kernels.triple_witness(imgs, imgs, z_codes, space.powers)
    if ix < 0:
        return ProductFreeResult(True, None)
    ranks = X.ranks()
    x = space.unrank(int(ranks[ix]))
    y = space.unrank(int(ranks[iy]))
    return ProductFreeResult(False, (x, y, x * y))


@dataclass(frozen=True)
class ThresholdReport:
    """The five sufficiency margins (ratio of main term over each error term,
    all implicit constants set to 1) and the summary margin."""

    margins: tuple
    summary: float

    @property
    def all_above(self) -> float:
        return min(self.margins)


def main_theorem_conditions(alpha: float, beta: float, gamma: float, n: int) -> ThresholdReport:
    """Margins of the five conditions sufficient for one-sided mixing.

    Each margin is (alpha beta gamma) / (error term); the summary margin is
    min(ab, ac, bc) * n / (log n)^7.
    """
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if not 0 < v <= 1:
            raise ValueError(f"{name} must lie in (0, 1]")
    if n < 3:
        raise ValueError("n must be at least 3")
    ln = math.log(n)
    abg = alpha * beta * gamma
    root = math.sqrt(alpha * beta * gamma)
    m1 = abg * n / root  # vs sqrt(abc)/n
    m2 = abg * math.sqrt(n) / (alpha * math.sqrt(beta * gamma) * ln)
    m3 = abg * math.sqrt(n) / (math.sqrt(alpha) * beta * math.sqrt(gamma) * ln**3.5)
    m4 = abg * math.sqrt(n) / (math.sqrt(alpha * beta) * gamma * ln**3.5)
    try:
        m5 = abg * float(n) ** 98
    except OverflowError:
        m5 = math.inf
    return ThresholdReport(
        margins=(m1, m2, m3, m4, m5),
        summary=threshold_margin(alpha, beta, gamma, n),
    )


# -- family experiments ------------------------------------------------------


@dataclass(frozen=True)
class SurplusMCReport:
    """Monte Carlo estimate of the solution-count excess of an overlap family."""

    excess: float
    ci_low: float
    ci_high: float
    hit_fraction: float
    alpha: float
    samples: int
    report: MixingReport

    @property
    def excludes_random_rate(self) -> bool:
        return self.ci_low > 1.0 or self.ci_high < 1.0


def surplus_excess_monte_carlo(
    params: constructions.SurplusParams,
    samples: int,
    seed,
    parity: str = "all",
    m: int | None = None,
) -> SurplusMCReport:
    """Estimate N_T / (alpha^3 |G|^2) = (hit fraction) / alpha with a 95% CI."""
    spec = constructions.surplus_spec(params)
    rep = mixing_monte_carlo(spec, spec, spec, params.n, samples, seed, parity, m=m)
    alpha = rep.alpha
    p_hat = rep.hits / samples
    se_p = math.sqrt(max(p_hat * (1 - p_hat), 0.0) / samples)
    return SurplusMCReport(
        excess=p_hat / alpha,
        ci_low=(p_hat - Z_95 * se_p) / alpha,
        ci_high=(p_hat + Z_95 * se_p) / alpha,
        hit_fraction=p_hat,
        alpha=alpha,
        samples=samples,
        report=rep,
    )


def kedlaya_monte_carlo(
    params: constructions.KedlayaParams,
    samples: int,
    seed,
    parity: str = "all",
    m: int | None = None,
) -> MixingReport:
    """Sample the product-free family against itself; hits should be zero."""
    spec = constructions.kedlaya_spec(params)
    return mixing_monte_carlo(spec, spec, spec, params.n, samples, seed, parity, m=m)
