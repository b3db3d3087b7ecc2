import math

import numpy as np
import pytest

import oracles
from permix import groups
from permix.fourier import (
    alternating_min_rep_dim,
    decompose_triple,
    secondterm_identity_check,
    sigma_coefficient,
    sigma_hs_product,
    sigma_matrix_product,
    standard_character,
)
from permix.groups import GroupFunction, Permutation


def test_sigma_coefficient_of_constant(s5):
    C = sigma_coefficient(GroupFunction.constant(s5, 1.0))
    assert np.allclose(C.perm_matrix_coeff, 1 / 5, atol=1e-15)
    assert sigma_hs_product(C, C) == pytest.approx(0.0, abs=1e-15)


def test_sigma_coefficient_of_identity_delta(s3):
    C = sigma_coefficient(GroupFunction.delta(s3, Permutation.identity(3)))
    assert np.allclose(C.perm_matrix_coeff, np.eye(3) / 6, atol=1e-15)


def test_sigma_coefficient_matches_oracle(s4):
    rng = np.random.default_rng(0)
    f = groups.random_function(s4, rng)
    C = sigma_coefficient(f)
    brute = oracles.sigma_coeff_brute(oracles.all_perms(4), list(f.values), 4)
    assert np.allclose(C.perm_matrix_coeff, brute, atol=1e-13)


def test_sigma_row_and_column_sums_equal_mean(s5):
    rng = np.random.default_rng(1)
    f = groups.random_function(s5, rng)
    C = sigma_coefficient(f)
    assert np.allclose(C.perm_matrix_coeff.sum(axis=0), C.mean, atol=1e-12)
    assert np.allclose(C.perm_matrix_coeff.sum(axis=1), C.mean, atol=1e-12)


def test_sigma_hs_norm_nonnegative(a5):
    rng = np.random.default_rng(2)
    for _ in range(20):
        C = sigma_coefficient(groups.random_function(a5, rng))
        assert sigma_hs_product(C, C) >= -1e-15


def test_sigma_product_is_convolution_coefficient(s4):
    rng = np.random.default_rng(3)
    f = groups.random_function(s4, rng)
    g = groups.random_function(s4, rng)
    direct = sigma_coefficient(groups.convolve_group(f, g))
    prod = sigma_matrix_product(sigma_coefficient(f), sigma_coefficient(g))
    assert np.allclose(direct.perm_matrix_coeff, prod.perm_matrix_coeff, atol=1e-12)
    assert direct.mean == pytest.approx(prod.mean, abs=1e-12)


def test_standard_character_examples():
    assert standard_character(Permutation.identity(5)) == 4
    assert standard_character(Permutation([1, 2, 0, 3, 4])) == 1  # 3-cycle in S_5
    assert standard_character(Permutation([1, 2, 3, 4, 0])) == -1  # 5-cycle


def test_standard_character_is_trace_identity(s4):
    # tr sigma(x y^-1) = #{i : x(i) = y(i)} - 1
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = groups.random_permutation(s4, rng)
        y = groups.random_permutation(s4, rng)
        agree = int((x.images == y.images).sum())
        assert standard_character(x * y.inverse()) == agree - 1


def test_decompose_uniform_middle(a5):
    rng = np.random.default_rng(5)
    f = groups.random_function(a5, rng)
    h = groups.random_function(a5, rng)
    rep = decompose_triple(f, GroupFunction.constant(a5, 0.6), h)
    assert rep.sigma_term == pytest.approx(0.0, abs=1e-14)
    assert rep.remainder == pytest.approx(0.0, abs=1e-13)
    assert rep.total == pytest.approx(rep.main_term, abs=1e-13)


def test_decompose_klein(klein):
    ind = klein.indicator()
    rep = decompose_triple(ind, ind, ind)
    assert rep.total == 16 / 144
    assert rep.main_term == pytest.approx((1 / 3) ** 3, abs=1e-15)
    assert rep.sigma_term + rep.remainder == pytest.approx(1 / 9 - 1 / 27, abs=1e-13)


def test_decompose_identity_and_exact_counts(a5):
    rng = np.random.default_rng(6)
    for _ in range(10):
        f, g, h = (groups.random_function(a5, rng) for _ in range(3))
        rep = decompose_triple(f, g, h)
        assert rep.total - rep.main_term - rep.sigma_term - rep.remainder == 0.0
    perms = oracles.even_perms(5)
    for seed in range(5):
        X, Y, Z = (groups.random_subset(a5, 0.5, 10 + seed + k) for k in range(3))
        rep = decompose_triple(X.indicator(), Y.indicator(), Z.indicator())
        cnt = oracles.count_triple_brute(
            [perms[i] for i in X.ranks()],
            [perms[i] for i in Y.ranks()],
            [perms[i] for i in Z.ranks()],
        )
        assert rep.total == cnt / a5.order**2


def test_remainder_vanishes_for_point_evaluation_functions(s5):
    # c + u(pi(i0)) has Fourier support only on the trivial and standard blocks
    rng = np.random.default_rng(7)
    u = rng.random(5)
    f = GroupFunction(s5, 0.3 + u[s5.images_table[:, 2]])
    g = groups.random_function(s5, rng)
    h = groups.random_function(s5, rng)
    rep = decompose_triple(f, g, h)
    assert abs(rep.remainder) < 1e-10


def test_secondterm_identity(s4, a5):
    rng = np.random.default_rng(8)
    for sp in (s4, a5):
        for _ in range(10):
            f = groups.random_function(sp, rng)
            g = groups.random_function(sp, rng).mean_zero()
            h = groups.random_function(sp, rng)
            lhs, rhs = secondterm_identity_check(f, g, h)
            assert lhs == pytest.approx(rhs, abs=1e-12)
        fz = groups.random_function(sp, rng).mean_zero()
        lhs, rhs = secondterm_identity_check(
            fz, groups.random_function(sp, rng), groups.random_function(sp, rng)
        )
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_secondterm_zero_and_precondition(s4):
    z = GroupFunction.constant(s4, 0.0)
    assert secondterm_identity_check(z, z, z) == (0.0, 0.0)
    f = GroupFunction.constant(s4, 0.5)
    with pytest.raises(ValueError, match="zero"):
        secondterm_identity_check(f, f, f)


def test_parseval_remnant_and_pushforward_norms(a5, s5):
    rng = np.random.default_rng(9)
    for sp in (a5, s5):
        n = sp.n
        for _ in range(50):
            f = groups.random_function(sp, rng).mean_zero()
            C = sigma_coefficient(f)
            norm_sq = float((f.values**2).mean())
            hs = (n - 1) * sigma_hs_product(C, C)
            push = (n - 1) / n * sum(
                float((groups.pushforward(f, i).values ** 2).mean()) for i in range(n)
            )
            assert norm_sq >= hs - 1e-12
            assert hs == pytest.approx(push, abs=1e-12)


def test_gowers_inequality_spot(a5):
    m = alternating_min_rep_dim(5)
    rng = np.random.default_rng(10)
    for _ in range(50):
        X, Y, Z = (groups.random_nonempty_subset(a5, 0.4, rng) for _ in range(3))
        total = groups.triple_inner(X.indicator(), Y.indicator(), Z.indicator())
        main = X.density * Y.density * Z.density
        assert abs(total - main) < math.sqrt(main / m)


def test_min_rep_dim_table():
    assert alternating_min_rep_dim(3) == 1
    assert alternating_min_rep_dim(4) == 1
    assert alternating_min_rep_dim(5) == 3
    assert alternating_min_rep_dim(6) == 5
    assert alternating_min_rep_dim(7) == 6
    assert alternating_min_rep_dim(9) == 8
    with pytest.raises(ValueError):
        alternating_min_rep_dim(2)
