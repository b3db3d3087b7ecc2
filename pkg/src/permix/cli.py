"""Command-line front end.

Every command writes a deterministic report: identical (config, seed) give
byte-identical output regardless of --threads.  Wall-clock runtime is
logged to stderr and embedded in the report only with --timing (embedding
it by default would break byte-for-byte reproducibility).  Points of the
ground set are 1-based on the command line and in reports.
"""

from __future__ import annotations

import math
import sys
import time
from functools import wraps

import click
import numpy as np

from permix import __version__, concentration, constructions, fourier, groups
from permix import inequalities, mixing, reporting
from permix.errors import BudgetExceeded, CapExceeded, RejectionRateError


def _common(fn):
    fn = click.option("--output", type=click.Path(), default=None, help="Write the report here instead of stdout.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)(fn)
    fn = click.option("--threads", type=int, default=None, help="Worker cap for exact counting (PERMIX_THREADS otherwise).")(fn)
    fn = click.option("--timing", is_flag=True, help="Embed wall-clock runtime in the report (breaks byte determinism).")(fn)
    return fn


def _guarded(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (BudgetExceeded, RejectionRateError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except (CapExceeded, ValueError) as exc:
            raise click.UsageError(str(exc))

    return wrapper


def _emit(command, config, results, rows, columns, output, fmt, timing, t0):
    runtime = time.perf_counter() - t0
    if fmt == "json":
        text = reporting.render_json(
            reporting.envelope(command, config, results, runtime if timing else None)
        )
    else:
        text = reporting.render_csv(rows, columns)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    click.echo(f"# {command}: completed in {runtime:.3f}s", err=True)


def _parse_points(text: str, n: int) -> tuple:
    """1-based comma list -> 0-based tuple."""
    pts = tuple(int(x) - 1 for x in text.split(",") if x.strip())
    if any(p < 0 or p >= n for p in pts):
        raise click.UsageError(f"points must lie in 1..{n}")
    return pts


def _default_T(n: int, t: int, basepoint0: int) -> tuple:
    pts = [p for p in range(n) if p != basepoint0][:t]
    if len(pts) < t:
        raise click.UsageError("t too large for n")
    return tuple(pts)


def _space(n, parity):
    return groups.enumerate_group(n, parity)


def _lookup_m(parity: str, n: int, m) -> int | None:
    if m is not None:
        return m
    if parity == "even" and n >= 3:
        return fourier.alternating_min_rep_dim(n)
    return None


@click.group()
@click.version_option(version=__version__, prog_name="permix")
def main():
    """Exact and Monte Carlo product-mixing statistics on S_n and A_n."""


# ---------------------------------------------------------------- mixing

MIXING_COLUMNS = [
    "n", "parity", "method", "alpha", "beta", "gamma",
    "total", "main", "gowers_bound", "threshold_margin", "stderr", "samples", "hits",
]


def _mixing_row(rep: mixing.MixingReport, parity: str) -> dict:
    return {
        "n": rep.n, "parity": parity, "method": rep.method,
        "alpha": rep.alpha, "beta": rep.beta, "gamma": rep.gamma,
        "total": rep.total, "main": rep.main, "gowers_bound": rep.gowers_bound,
        "threshold_margin": rep.threshold_margin, "stderr": rep.stderr,
        "samples": rep.samples, "hits": rep.hits,
    }


@main.command("mixing")
@click.option("--n", type=int, required=True)
@click.option("--parity", type=click.Choice(["all", "even"]), default="even", show_default=True)
@click.option("--m", type=int, default=None, help="Minimal nontrivial representation dimension (auto for A_n).")
@click.option("--random-triple", is_flag=True, help="Exact report on three random subsets.")
@click.option("--density", type=float, default=0.3, show_default=True)
@click.option("--family", type=click.Choice(["kedlaya", "surplus"]), default=None)
@click.option("--t", type=int, default=None, help="|T| for a family run.")
@click.option("--basepoint", type=int, default=1, show_default=True, help="1-based basepoint (kedlaya).")
@click.option("--set-t", "set_t", type=str, default=None, help="Explicit 1-based T, e.g. '2,3'.")
@click.option("--monte-carlo", is_flag=True, help="Estimate by sampling instead of enumeration.")
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=None)
@_common
@_guarded
def mixing_cmd(n, parity, m, random_triple, density, family, t, basepoint, set_t,
               monte_carlo, samples, seed, output, fmt, threads, timing):
    """Triple-product statistics for subsets of S_n or A_n."""
    t0 = time.perf_counter()
    config = {
        "n": n, "parity": parity, "m": m, "random_triple": random_triple,
        "density": density, "family": family, "t": t, "basepoint": basepoint,
        "set_t": set_t, "monte_carlo": monte_carlo, "samples": samples,
        "seed": seed,
    }
    m = _lookup_m(parity, n, m)
    if monte_carlo:
        if family is None:
            raise click.UsageError("--monte-carlo needs --family")
        if seed is None:
            raise click.UsageError("--monte-carlo needs --seed")
        T = _parse_points(set_t, n) if set_t else _default_T(n, t or 2, basepoint - 1)
        if family == "kedlaya":
            params = constructions.KedlayaParams(n, T, basepoint - 1)
            rep = mixing.kedlaya_monte_carlo(params, samples, seed, parity, m=m)
        else:
            params = constructions.SurplusParams(n, T)
            mc = mixing.surplus_excess_monte_carlo(params, samples, seed, parity, m=m)
            rep = mc.report
        results = _mixing_row(rep, parity)
        if family == "surplus":
            results["excess"] = mc.excess
            results["excess_ci95"] = [mc.ci_low, mc.ci_high]
        _emit("mixing", config, results, [_mixing_row(rep, parity)], MIXING_COLUMNS,
              output, fmt, timing, t0)
        return
    if random_triple:
        if seed is None:
            raise click.UsageError("--random-triple needs --seed")
        if m is None:
            raise click.UsageError("provide --m for parity=all")
        space = _space(n, parity)
        rng = np.random.default_rng(seed)
        X, Y, Z = (groups.random_nonempty_subset(space, density, rng) for _ in range(3))
        rep = mixing.mixing_exact(X, Y, Z, m, threads=threads)
        _emit("mixing", config, _mixing_row(rep, parity), [_mixing_row(rep, parity)],
              MIXING_COLUMNS, output, fmt, timing, t0)
        return
    if family is None:
        raise click.UsageError("choose --random-triple, --family, or --monte-carlo")
    if m is None:
        raise click.UsageError("provide --m for parity=all")
    space = _space(n, parity)
    T = _parse_points(set_t, n) if set_t else _default_T(n, t or 2, basepoint - 1)
    if family == "kedlaya":
        X = constructions.kedlaya_set(space, constructions.KedlayaParams(n, T, basepoint - 1))
    else:
        X = constructions.surplus_set(space, constructions.SurplusParams(n, T))
    rep = mixing.mixing_exact(X, X, X, m, threads=threads)
    _emit("mixing", config, _mixing_row(rep, parity), [_mixing_row(rep, parity)],
          MIXING_COLUMNS, output, fmt, timing, t0)


# ---------------------------------------------------------------- construct

@main.group()
def construct():
    """Build the explicit families and report exact densities."""


@construct.command("kedlaya")
@click.option("--n", type=int, required=True)
@click.option("--t", type=int, default=None)
@click.option("--basepoint", type=int, default=1, show_default=True, help="1-based.")
@click.option("--set-t", "set_t", type=str, default=None, help="Explicit 1-based T.")
@click.option("--parity", type=click.Choice(["all", "even"]), default="even", show_default=True,
              help="Group used for enumerated checks.")
@click.option("--check-product-free", is_flag=True)
@_common
@_guarded
def construct_kedlaya(n, t, basepoint, set_t, parity, check_product_free,
                      output, fmt, threads, timing):
    """The product-free family, with its exact closed-form density."""
    t0 = time.perf_counter()
    T = _parse_points(set_t, n) if set_t else _default_T(n, t or 2, basepoint - 1)
    params = constructions.KedlayaParams(n, T, basepoint - 1)
    config = {
        "n": n, "t": params.t, "basepoint": basepoint,
        "T": [p + 1 for p in params.T], "parity": parity,
        "check_product_free": check_product_free,
    }
    dens = constructions.kedlaya_density_formula(n, params.t)
    results = {
        "sn_density": dens.binomial_form,
        "sn_density_float": dens.value,
        "factorial_form": dens.factorial_form,
        "forms_agree": dens.binomial_form == dens.factorial_form,
    }
    enumerable = n <= groups.DEFAULT_CAPS[parity]
    if enumerable:
        space = _space(n, parity)
        X = constructions.kedlaya_set(space, params)
        results["group"] = repr(space)
        results["cardinality"] = X.cardinality
        results["group_density"] = X.density
        if check_product_free:
            res = mixing.product_free_check(X, threads=threads)
            results["product_free"] = res.is_product_free
            if res.witness:
                x, y, z = res.witness
                results["witness"] = [list(x.one_based()), list(y.one_based()), list(z.one_based())]
    elif check_product_free:
        raise click.UsageError("--check-product-free needs an enumerable n; use mixing --monte-carlo")
    rows = [{"n": n, "t": params.t, "sn_density": dens.binomial_form,
             "sn_density_float": dens.value,
             "group_density": results.get("group_density"),
             "product_free": results.get("product_free")}]
    _emit("construct kedlaya", config, results, rows,
          ["n", "t", "sn_density", "sn_density_float", "group_density", "product_free"],
          output, fmt, timing, t0)


@construct.command("surplus")
@click.option("--n", type=int, required=True)
@click.option("--t", type=int, default=None)
@click.option("--set-t", "set_t", type=str, default=None, help="Explicit 1-based T.")
@click.option("--parity", type=click.Choice(["all", "even"]), default="even", show_default=True)
@click.option("--monte-carlo", is_flag=True)
@click.option("--samples", type=int, default=200_000, show_default=True)
@click.option("--seed", type=int, default=None)
@_common
@_guarded
def construct_surplus(n, t, set_t, parity, monte_carlo, samples, seed,
                      output, fmt, threads, timing):
    """The overlap family X_T and its solution-count excess."""
    t0 = time.perf_counter()
    T = _parse_points(set_t, n) if set_t else tuple(range(t or 2))
    params = constructions.SurplusParams(n, T)
    config = {
        "n": n, "t": params.t, "T": [p + 1 for p in params.T], "parity": parity,
        "monte_carlo": monte_carlo, "samples": samples, "seed": seed,
    }
    results = {"exact_density": constructions.surplus_density_exact(n, params.t)}
    if monte_carlo:
        if seed is None:
            raise click.UsageError("--monte-carlo needs --seed")
        mc = mixing.surplus_excess_monte_carlo(params, samples, seed, parity)
        results.update({
            "method": "monte_carlo", "samples": samples,
            "alpha": mc.alpha, "hit_fraction": mc.hit_fraction,
            "excess": mc.excess, "excess_ci95": [mc.ci_low, mc.ci_high],
            "ci_excludes_random_rate": mc.excludes_random_rate,
        })
        rows = [{"n": n, "t": params.t, "method": "monte_carlo",
                 "density": mc.alpha, "excess": mc.excess,
                 "ci_low": mc.ci_low, "ci_high": mc.ci_high}]
    else:
        space = _space(n, parity)
        rep = constructions.surplus_ratio(space, params, threads=threads)
        results.update({
            "method": "exact", "group": repr(space),
            "density": rep.density, "solutions": rep.solutions,
            "excess": rep.excess, "excess_float": rep.excess_float,
        })
        rows = [{"n": n, "t": params.t, "method": "exact",
                 "density": rep.density_float, "excess": rep.excess_float,
                 "ci_low": None, "ci_high": None}]
    _emit("construct surplus", config, results, rows,
          ["n", "t", "method", "density", "excess", "ci_low", "ci_high"],
          output, fmt, timing, t0)


# ---------------------------------------------------------------- fourier

FOURIER_COLUMNS = ["index", "total", "main", "sigma", "remainder", "secondterm_lhs", "secondterm_rhs"]


@main.command("fourier")
@click.option("--n", type=int, required=True)
@click.option("--parity", type=click.Choice(["all", "even"]), default="even", show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--triples", type=int, default=50, show_default=True)
@_common
@_guarded
def fourier_cmd(n, parity, seed, triples, output, fmt, threads, timing):
    """Random-triple decomposition and pushforward-identity experiments."""
    t0 = time.perf_counter()
    config = {"n": n, "parity": parity, "seed": seed, "triples": triples}
    space = _space(n, parity)
    rng = np.random.default_rng(seed)
    rows = []
    max_defect = 0.0
    max_diff = 0.0
    for idx in range(triples):
        f, g, h = (groups.random_function(space, rng) for _ in range(3))
        rep = fourier.decompose_triple(f, g, h)
        defect = abs(rep.total - rep.main_term - rep.sigma_term - rep.remainder)
        max_defect = max(max_defect, defect)
        lhs, rhs = fourier.secondterm_identity_check(f, g.mean_zero(), h)
        max_diff = max(max_diff, abs(lhs - rhs))
        rows.append({
            "index": idx, "total": rep.total, "main": rep.main_term,
            "sigma": rep.sigma_term, "remainder": rep.remainder,
            "secondterm_lhs": lhs, "secondterm_rhs": rhs,
        })
    results = {
        "triples": triples,
        "max_identity_defect": max_defect,
        "max_secondterm_diff": max_diff,
        "rows": rows,
    }
    _emit("fourier", config, results, rows, FOURIER_COLUMNS, output, fmt, timing, t0)


# ---------------------------------------------------------------- concentration

@main.group("concentration")
def concentration_group():
    """Permutation-statistic concentration experiments."""


def _load_instance(matrix, random_n, seed, do_center):
    if matrix is not None:
        a = concentration.load_matrix_csv(matrix)
    else:
        if random_n is None or seed is None:
            raise click.UsageError("provide --matrix or both --random-n and --seed")
        rng = np.random.default_rng(seed)
        a = rng.uniform(-1.0, 1.0, (random_n, random_n))
    inst = concentration.ConcentrationInstance(a)
    if do_center:
        inst = concentration.center(inst)
    return inst


@concentration_group.command("tail")
@click.option("--matrix", type=click.Path(exists=True), default=None, help="Matrix CSV (header 'n').")
@click.option("--random-n", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--t", "ts", type=float, multiple=True, required=True)
@click.option("--c", type=float, default=concentration.DEFAULT_BERNSTEIN_C, show_default=True)
@click.option("--parity", type=click.Choice(["all", "even"]), default="all", show_default=True)
@click.option("--center/--no-center", "do_center", default=True, show_default=True)
@click.option("--rational", is_flag=True, help="Also verify the exact distribution masses sum to 1.")
@_common
@_guarded
def concentration_tail(matrix, random_n, seed, ts, c, parity, do_center, rational,
                       output, fmt, threads, timing):
    """Exact tail probabilities against the Bernstein-type bound."""
    t0 = time.perf_counter()
    inst = _load_instance(matrix, random_n, seed, do_center)
    config = {"matrix": matrix, "random_n": random_n, "seed": seed,
              "t": list(ts), "c": c, "parity": parity, "center": do_center,
              "rational": rational}
    space = _space(inst.n, parity)
    dist = concentration.hoeffding_exact_distribution(inst, space, rational=rational)
    rows = []
    for t in ts:
        rows.append({
            "t": t,
            "exact_tail": dist.tail_prob(t),
            "bernstein_bound": concentration.bernstein_bound(inst, t, c),
        })
    results = {
        "n": inst.n, "M": inst.M, "v": inst.v, "centered": inst.centered,
        "shift": inst.shift, "c": c,
        "fitted_c": concentration.fitted_bernstein_constant(inst, space),
        "support_size": len(dist.support),
        "rows": rows,
    }
    if rational:
        total = sum(dist.rational.values())
        results["rational_mass_total"] = total
        results["rational_mass_is_one"] = total == 1
    _emit("concentration tail", config, results, rows,
          ["t", "exact_tail", "bernstein_bound"], output, fmt, timing, t0)


@concentration_group.command("moments")
@click.option("--matrix", type=click.Path(exists=True), default=None)
@click.option("--random-n", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--lam", "lams", type=float, multiple=True, required=True)
@click.option("--parity", type=click.Choice(["all", "even"]), default="all", show_default=True)
@click.option("--center/--no-center", "do_center", default=True, show_default=True)
@_common
@_guarded
def concentration_moments(matrix, random_n, seed, lams, parity, do_center,
                          output, fmt, threads, timing):
    """Exact exponential moments against the closed-form and row-product bounds."""
    t0 = time.perf_counter()
    inst = _load_instance(matrix, random_n, seed, do_center)
    config = {"matrix": matrix, "random_n": random_n, "seed": seed,
              "lam": list(lams), "parity": parity, "center": do_center}
    space = _space(inst.n, parity)
    rows = []
    for lam in lams:
        exact, bound = concentration.exp_moment_pair(inst, lam, space)
        lhs, rhs = concentration.cll_exp_moment_step(inst, lam, space)
        rows.append({"lam": lam, "exact": exact, "bound": bound,
                     "cll_lhs": lhs, "cll_rhs": rhs})
    results = {"n": inst.n, "M": inst.M, "v": inst.v, "centered": inst.centered, "rows": rows}
    _emit("concentration moments", config, results, rows,
          ["lam", "exact", "bound", "cll_lhs", "cll_rhs"], output, fmt, timing, t0)


@concentration_group.command("dyadic")
@click.option("--n", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--floor", type=float, default=1e-15, show_default=True)
@_common
@_guarded
def concentration_dyadic(n, seed, floor, output, fmt, threads, timing):
    """Dyadic band decomposition of a random ground-set function."""
    t0 = time.perf_counter()
    config = {"n": n, "seed": seed, "floor": floor}
    rng = np.random.default_rng(seed)
    g = groups.OmegaFunction(n, rng.random(n))
    pieces = concentration.dyadic_decompose(g, floor)
    recon = np.zeros(n)
    for p in pieces:
        recon += p.values.values
    err = float(np.abs(recon - (g.values - g.values.mean())).sum())
    rows = [
        {"s": p.s, "delta": p.delta, "support_count": int(round(p.delta * n))}
        for p in pieces
    ]
    results = {"n": n, "floor": floor, "pieces": len(pieces),
               "reconstruction_l1_error": err, "error_budget": n * floor, "rows": rows}
    _emit("concentration dyadic", config, results, rows,
          ["s", "delta", "support_count"], output, fmt, timing, t0)


DEFICIT_COLUMNS = ["n", "alpha", "beta", "gamma", "deficit", "term1", "term2", "ratio"]


@concentration_group.command("deficit")
@click.option("--n", type=int, required=True)
@click.option("--parity", type=click.Choice(["all", "even"]), default="even", show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--trials", type=int, default=20, show_default=True)
@_common
@_guarded
def concentration_deficit(n, parity, seed, trials, output, fmt, threads, timing):
    """Rearrangement deficit against the variance and entropy bound terms."""
    t0 = time.perf_counter()
    config = {"n": n, "parity": parity, "seed": seed, "trials": trials}
    space = _space(n, parity)
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(trials):
        f = groups.random_function(space, rng)
        g1 = groups.random_omega_function(n, rng)
        g2 = groups.random_omega_function(n, rng)
        rep = concentration.rearrangement_deficit_report(f, g1, g2)
        rows.append({
            "n": rep.n, "alpha": rep.alpha, "beta": rep.beta, "gamma": rep.gamma,
            "deficit": rep.deficit, "term1": rep.variance_term,
            "term2": rep.entropy_term, "ratio": rep.ratio,
        })
    results = {"trials": trials, "rows": rows}
    _emit("concentration deficit", config, results, rows, DEFICIT_COLUMNS,
          output, fmt, timing, t0)


# ---------------------------------------------------------------- inequality

@main.group()
def inequality():
    """Inequality oracles: violation sweeps over random instances."""


@inequality.command("cll")
@click.option("--n", type=int, required=True)
@click.option("--trials", type=int, default=500, show_default=True)
@click.option("--seed", type=int, required=True)
@_common
@_guarded
def inequality_cll(n, trials, seed, output, fmt, threads, timing):
    """Permutation-product inequality: lhs <= product of L2 norms."""
    t0 = time.perf_counter()
    config = {"n": n, "trials": trials, "seed": seed}
    rng = np.random.default_rng(seed)
    violations = 0
    worst = -math.inf
    for _ in range(trials):
        fs = [groups.OmegaFunction(n, rng.random(n)) for _ in range(n)]
        lhs, rhs = inequalities.cll_check(fs)
        gap = lhs - rhs
        worst = max(worst, gap)
        if gap > 1e-12 * max(1.0, rhs):
            violations += 1
    results = {"trials": trials, "violations": violations, "max_lhs_minus_rhs": worst}
    _emit("inequality cll", config, results,
          [{"n": n, "trials": trials, "violations": violations, "max_gap": worst}],
          ["n", "trials", "violations", "max_gap"], output, fmt, timing, t0)


@inequality.command("hadamard")
@click.option("--n", type=int, required=True)
@click.option("--trials", type=int, default=500, show_default=True)
@click.option("--seed", type=int, required=True)
@_common
@_guarded
def inequality_hadamard(n, trials, seed, output, fmt, threads, timing):
    """Permanent against the Hadamard-type column-norm bound."""
    t0 = time.perf_counter()
    config = {"n": n, "trials": trials, "seed": seed}
    rng = np.random.default_rng(seed)
    violations = 0
    worst = -math.inf
    for _ in range(trials):
        M = rng.normal(size=(n, n))
        lhs, bound = inequalities.hadamard_permanent_check(M)
        gap = lhs - bound
        worst = max(worst, gap)
        if gap > 1e-9 * max(1.0, bound):
            violations += 1
    results = {"trials": trials, "violations": violations, "max_lhs_minus_bound": worst}
    _emit("inequality hadamard", config, results,
          [{"n": n, "trials": trials, "violations": violations, "max_gap": worst}],
          ["n", "trials", "violations", "max_gap"], output, fmt, timing, t0)


@inequality.command("subadditivity")
@click.option("--n", type=int, required=True)
@click.option("--parity", type=click.Choice(["all", "even"]), default="all", show_default=True)
@click.option("--trials", type=int, default=500, show_default=True)
@click.option("--seed", type=int, required=True)
@_common
@_guarded
def inequality_subadditivity(n, parity, trials, seed, output, fmt, threads, timing):
    """Entropy of a group function against half the sum over pushforwards."""
    t0 = time.perf_counter()
    config = {"n": n, "parity": parity, "trials": trials, "seed": seed}
    space = _space(n, parity)
    rng = np.random.default_rng(seed)
    violations = 0
    worst = -math.inf
    for _ in range(trials):
        f = groups.random_function(space, rng)
        lhs, rhs = inequalities.subadditivity_check(f)
        gap = rhs - lhs
        worst = max(worst, gap)
        if gap > 1e-12:
            violations += 1
    results = {"trials": trials, "violations": violations, "max_rhs_minus_lhs": worst}
    _emit("inequality subadditivity", config, results,
          [{"n": n, "trials": trials, "violations": violations, "max_gap": worst}],
          ["n", "trials", "violations", "max_gap"], output, fmt, timing, t0)


@inequality.command("extremal")
@click.option("--regime", type=click.Choice(["low", "high"]), required=True)
@click.option("--beta", type=float, required=True)
@click.option("--t", type=float, required=True)
@click.option("--delta", type=float, required=True)
@click.option("--grid-n", type=int, default=100, show_default=True,
              help="Ground-set size for the constructed two-level cross-check.")
@_common
@_guarded
def inequality_extremal(regime, beta, t, delta, grid_n, output, fmt, threads, timing):
    """Closed-form extremal two-level entropy, cross-checked by construction."""
    t0 = time.perf_counter()
    config = {"regime": regime, "beta": beta, "t": t, "delta": delta,
              "grid_n": grid_n}
    if regime == "low":
        rep = inequalities.extremal_entropy_low(beta, t, delta)
        results = {"entropy": rep.entropy, "reference_bound": rep.reference_bound}
        level, rest = beta - t, beta + delta * t / (1 - delta)
    else:
        rep = inequalities.extremal_entropy_high(beta, t, delta)
        results = {"entropy": rep.entropy, "reference_bound": rep.reference_bound,
                   "weak_bound": rep.weak_bound}
        level, rest = beta + t, beta - delta * t / (1 - delta)
    support = delta * grid_n
    if abs(support - round(support)) < 1e-9:
        g = inequalities.two_level_omega(grid_n, int(round(support)), level, rest)
        direct = groups.entropy(g)
        results["constructed_entropy"] = direct
        results["construction_diff"] = abs(direct - rep.entropy)
    rows = [dict(results, regime=regime, beta=beta, t=t, delta=delta)]
    _emit("inequality extremal", config, results, rows,
          ["regime", "beta", "t", "delta", "entropy", "reference_bound"],
          output, fmt, timing, t0)


# ---------------------------------------------------------------- threshold

@main.command("threshold")
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, required=True)
@click.option("--gamma", type=float, required=True)
@click.option("--n", type=int, required=True)
@_common
@_guarded
def threshold_cmd(alpha, beta, gamma, n, output, fmt, threads, timing):
    """The five sufficiency margins and the summary threshold margin."""
    t0 = time.perf_counter()
    config = {"alpha": alpha, "beta": beta, "gamma": gamma, "n": n}
    rep = mixing.main_theorem_conditions(alpha, beta, gamma, n)
    results = {
        "margins": list(rep.margins),
        "summary_margin": rep.summary,
        "all_margins_min": rep.all_above,
    }
    rows = [{
        "n": n, "alpha": alpha, "beta": beta, "gamma": gamma,
        "margin1": rep.margins[0], "margin2": rep.margins[1], "margin3": rep.margins[2],
        "margin4": rep.margins[3], "margin5": rep.margins[4], "summary": rep.summary,
    }]
    _emit("threshold", config, results, rows,
          ["n", "alpha", "beta", "gamma", "margin1", "margin2", "margin3",
           "margin4", "margin5", "summary"], output, fmt, timing, t0)


if __name__ == "__main__":
    main()
