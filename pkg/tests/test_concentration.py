import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from permix import groups
from permix.concentration import (
    ConcentrationInstance,
    LevelSetPair,
    bernstein_bound,
    center,
    cll_exp_moment_step,
    dyadic_decompose,
    exp_moment_pair,
    fitted_bernstein_constant,
    hoeffding_exact_distribution,
    hoeffding_sample,
    hoeffding_values,
    levelset_deficit,
    levelset_deficit_mc,
    load_matrix_csv,
    rearrangement_deficit_report,
    save_matrix_csv,
)
from permix.groups import GroupFunction, OmegaFunction, enumerate_group


@pytest.fixture(scope="module")
def pm2():
    return ConcentrationInstance(np.array([[1.0, -1.0], [-1.0, 1.0]]))


def test_instance_stats(pm2):
    assert pm2.M == 1.0 and pm2.v == 2.0 and pm2.centered
    with pytest.raises(TypeError):
        ConcentrationInstance(np.eye(2, dtype=complex))


def test_center_examples():
    inst = ConcentrationInstance(np.ones((3, 3)))
    c = center(inst)
    assert np.allclose(c.a, 0.0) and c.shift == 3.0 and c.centered
    already = center(c)
    assert np.allclose(already.a, c.a) and already.shift == c.shift


def test_center_invariants_random():
    rng = np.random.default_rng(0)
    for _ in range(20):
        inst = ConcentrationInstance(rng.normal(size=(5, 5)))
        cen = center(inst)
        assert cen.M <= 2 * inst.M + 1e-12
        assert cen.v <= inst.v + 1e-12
        assert cen.centered
        # X distributions agree up to the recorded constant shift
        s5 = enumerate_group(5)
        v0 = hoeffding_values(inst, s5)
        v1 = hoeffding_values(cen, s5)
        assert np.allclose(v0, v1 + (cen.shift - inst.shift), atol=1e-12)


def test_exact_distribution_examples(pm2):
    s2 = enumerate_group(2)
    d = hoeffding_exact_distribution(pm2, s2)
    assert d.as_dict() == {-2.0: 0.5, 2.0: 0.5}
    zero = ConcentrationInstance(np.zeros((3, 3)))
    dz = hoeffding_exact_distribution(zero, enumerate_group(3))
    assert dz.as_dict() == {0.0: 1.0}
    rng = np.random.default_rng(99)
    d6 = hoeffding_exact_distribution(
        ConcentrationInstance(rng.normal(size=(6, 6))), enumerate_group(6)
    )
    assert abs(d6.probs.sum() - 1.0) < 1e-12


def test_exact_distribution_mean_linearity():
    rng = np.random.default_rng(1)
    s4 = enumerate_group(4)
    for _ in range(10):
        a = rng.normal(size=(4, 4))
        inst = ConcentrationInstance(a)
        d = hoeffding_exact_distribution(inst, s4)
        assert d.mean() == pytest.approx(a.sum() / 4, abs=1e-12)


def test_exact_distribution_rational_masses():
    rng = np.random.default_rng(2)
    a = rng.integers(-3, 4, size=(5, 5)).astype(float)
    inst = ConcentrationInstance(a)
    d = hoeffding_exact_distribution(inst, enumerate_group(5), rational=True)
    assert sum(d.rational.values()) == Fraction(1)
    probs = {float(k): float(v) for k, v in d.rational.items()}
    assert probs == pytest.approx(d.as_dict() if d.rational is None else probs)
    float_dict = {float(s): p for s, p in zip(d.support, d.probs)}
    for k, v in probs.items():
        assert float_dict[k] == pytest.approx(v, abs=1e-12)


def test_hoeffding_values_match_oracle():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4))
    s4 = enumerate_group(4)
    vals = hoeffding_values(ConcentrationInstance(a), s4)
    brute = oracles.hoeffding_values_brute(oracles.all_perms(4), a)
    assert np.allclose(vals, brute, atol=1e-12)


def test_bernstein_bound_examples(pm2):
    assert bernstein_bound(pm2, 4.0, c=1 / 8) == pytest.approx(2 * math.exp(-1 / 3))
    small = bernstein_bound(pm2, 1e-12)
    assert small == pytest.approx(2.0, abs=1e-9)
    ts = np.linspace(0.5, 8, 12)
    bounds = [bernstein_bound(pm2, float(t)) for t in ts]
    assert all(b1 > b2 for b1, b2 in zip(bounds, bounds[1:]))
    with pytest.raises(ValueError):
        bernstein_bound(pm2, -1.0)


def test_exp_moment_pair_example(pm2):
    s2 = enumerate_group(2)
    exact, bound = exp_moment_pair(pm2, 0.1, s2)
    assert exact == pytest.approx(math.cosh(0.2), abs=1e-14)
    assert bound == pytest.approx(math.exp(0.04 / 0.8), abs=1e-14)
    assert exact <= bound
    tiny, tiny_bound = exp_moment_pair(pm2, 1e-9, s2)
    assert tiny == pytest.approx(1.0, abs=1e-9) and tiny_bound == pytest.approx(1.0, abs=1e-9)


def test_exp_moment_requires_centered():
    inst = ConcentrationInstance(np.array([[1.0, 2.0], [3.0, 4.0]]))
    with pytest.raises(ValueError, match="center"):
        exp_moment_pair(inst, 0.01, enumerate_group(2))


def test_cll_exp_moment_step_examples(pm2):
    s2 = enumerate_group(2)
    z = ConcentrationInstance(np.zeros((2, 2)))
    assert cll_exp_moment_step(z, 0.5, s2) == (1.0, 1.0)
    lhs, rhs = cll_exp_moment_step(pm2, 0.3, s2)
    assert lhs == pytest.approx(rhs, abs=1e-12)  # symmetric 2x2 is the equality case


def test_exp_moment_contracts_random():
    rng = np.random.default_rng(4)
    for n in (4, 5):
        sp = enumerate_group(n)
        for _ in range(25):
            inst = center(ConcentrationInstance(rng.uniform(-1, 1, (n, n))))
            lams = np.linspace(0.05, 0.95, 8) / (2 * max(inst.M, 1e-9))
            for lam in lams:
                exact, bound = exp_moment_pair(inst, float(lam), sp)
                assert exact <= bound + 1e-12
                lhs, rhs = cll_exp_moment_step(inst, float(lam), sp)
                assert lhs <= rhs + 1e-12


def test_fitted_constant_dominates_default():
    rng = np.random.default_rng(5)
    s5 = enumerate_group(5)
    for _ in range(10):
        inst = center(ConcentrationInstance(rng.uniform(-1, 1, (5, 5))))
        assert fitted_bernstein_constant(inst, s5) >= 1 / 16


def test_monte_carlo_tail_matches_exact():
    rng = np.random.default_rng(6)
    s6 = enumerate_group(6)
    inst = center(ConcentrationInstance(rng.uniform(-1, 1, (6, 6))))
    dist = hoeffding_exact_distribution(inst, s6)
    samples = hoeffding_sample(inst, 1_000_000, seed=7)
    for t in (0.5, 1.0, 2.0):
        p = dist.tail_prob(t)
        emp = float((np.abs(samples) > t).mean())
        se = math.sqrt(p * (1 - p) / len(samples))
        assert abs(emp - p) <= 4 * max(se, 1e-9)


def test_dyadic_band_example():
    g = OmegaFunction(3, [0.6, 0.0, 0.3])  # centered: (0.3, -0.3, 0)
    pieces = dyadic_decompose(g)
    assert [(p.s, p.delta) for p in pieces] == [(0.5, 1 / 3), (-0.5, 1 / 3)]
    assert pieces[0].values.values.tolist() == [pytest.approx(0.3), 0.0, 0.0]


def test_dyadic_constant_empty():
    assert dyadic_decompose(OmegaFunction.constant(10, 0.4)) == []


def test_dyadic_invariants_random():
    rng = np.random.default_rng(7)
    floor = 1e-15
    for n in (10, 100, 2000):
        for _ in range(5):
            g = OmegaFunction(n, rng.random(n))
            pieces = dyadic_decompose(g, floor)
            d = g.values - g.values.mean()
            recon = np.zeros(n)
            seen = np.zeros(n, dtype=bool)
            for p in pieces:
                v = p.values.values
                on = v != 0
                assert not np.any(seen & on), "supports must be disjoint"
                seen |= on
                mag = np.abs(v[on])
                assert np.all((mag > abs(p.s) / 2) & (mag <= abs(p.s)))
                assert np.all(np.sign(v[on]) == np.sign(p.s))
                assert p.delta == pytest.approx(on.mean())
                recon += v
            assert np.abs(recon - d).sum() <= n * floor


def test_dyadic_rejects_bad_inputs():
    with pytest.raises(ValueError):
        dyadic_decompose(OmegaFunction(3, [0.5, 1.5, 0.2]))


def test_levelset_pair_validation():
    h1 = OmegaFunction(4, [0.75, 0, 0, 1.0])
    with pytest.raises(ValueError):
        LevelSetPair(h1, OmegaFunction(4, [0.2, 0, 0, 0]))
    pair = LevelSetPair(h1, OmegaFunction(4, [0, 0.5, 0, 0]))
    assert pair.delta1 == 0.5 and pair.delta2 == 0.25


def test_levelset_deficit_examples():
    s4 = enumerate_group(4)
    pair = LevelSetPair(
        OmegaFunction(4, [0.75, 1.0, 0, 0]), OmegaFunction(4, [0, 0.5, 0.5, 0])
    )
    rep = levelset_deficit(GroupFunction.constant(s4, 1.0), pair)
    assert rep.observed == pytest.approx(0.0, abs=1e-14)
    zero_pair = LevelSetPair(OmegaFunction(4, [0.75, 1.0, 0, 0]), OmegaFunction.constant(4, 0.0))
    rng = np.random.default_rng(8)
    f = groups.random_function(s4, rng)
    assert levelset_deficit(f, zero_pair).observed == pytest.approx(0.0, abs=1e-14)


def test_levelset_regimes_and_cauchy_schwarz():
    s6 = enumerate_group(6)
    rng = np.random.default_rng(9)
    h1 = OmegaFunction.indicator(6, [0, 1, 2])
    h2 = OmegaFunction.indicator(6, [1, 3, 4])
    pair = LevelSetPair(h1, h2)
    f = groups.random_function(s6, rng)
    rep = levelset_deficit(f, pair)
    assert rep.regime == "high"
    cs_cap = groups.norm2(h1) * groups.norm2(h2)
    assert abs(rep.observed) <= cs_cap
    small = LevelSetPair(OmegaFunction.indicator(6, [0]), OmegaFunction.indicator(6, [5]))
    rep2 = levelset_deficit(f, small)
    assert rep2.regime == "low"
    assert set(rep2.bounds) == {"poisson_band", "mass_band", "lower_band"}


def test_levelset_mc_agrees_with_exact():
    s6 = enumerate_group(6)
    rng = np.random.default_rng(10)
    fvals = rng.random(s6.order)
    f = GroupFunction(s6, fvals)
    pair = LevelSetPair(
        OmegaFunction(6, [0.9, 0.5, 0, 0, 0.7, 0]), OmegaFunction(6, [0, 1.0, 0.5, 0, 0, 0.6])
    )
    exact = levelset_deficit(f, pair)

    codes = {tuple(s6.images_table[k]): fvals[k] for k in range(s6.order)}

    def f_batch(imgs):
        return np.array([codes[tuple(r)] for r in imgs])

    mc = levelset_deficit_mc(f_batch, 6, pair, 200_000, seed=11)
    assert mc.observed == pytest.approx(exact.observed, abs=5e-3)


def test_rearrangement_report_trivial_cases():
    s5 = enumerate_group(5)
    rng = np.random.default_rng(12)
    f = groups.random_function(s5, rng)
    gconst = OmegaFunction.constant(5, 0.4)
    g2 = groups.random_omega_function(5, rng)
    rep = rearrangement_deficit_report(f, gconst, g2)
    assert rep.deficit == pytest.approx(0.0, abs=1e-14)
    assert rep.variance_term == 0.0 and rep.entropy_term == 0.0
    assert math.isnan(rep.ratio)
    uniform = GroupFunction.constant(s5, 1.0)
    rep2 = rearrangement_deficit_report(uniform, groups.random_omega_function(5, rng), g2)
    assert rep2.deficit == pytest.approx(0.0, abs=1e-14)


def test_rearrangement_report_random_s6():
    s6 = enumerate_group(6)
    rng = np.random.default_rng(13)
    for _ in range(5):
        f = groups.random_function(s6, rng)
        g1 = groups.random_omega_function(6, rng)
        g2 = groups.random_omega_function(6, rng)
        rep = rearrangement_deficit_report(f, g1, g2)
        assert math.isfinite(rep.deficit)
        assert rep.variance_term >= 0 and rep.entropy_term >= 0
        assert math.isfinite(rep.ratio)


def test_matrix_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(14)
    a = rng.normal(size=(4, 4))
    path = tmp_path / "m.csv"
    save_matrix_csv(path, a)
    b = load_matrix_csv(path)
    assert np.allclose(a, b, atol=1e-10)
    bad = tmp_path / "bad.csv"
    bad.write_text("3\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        load_matrix_csv(bad)
