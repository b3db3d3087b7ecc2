"""Fourier analysis restricted to the standard representation.

The (n-1)-dimensional standard representation is never materialized.
Every quantity is derived from the n x n permutation-representation
coefficient  C_f[w, i] = integral of f(pi) 1{pi(i) = w},  whose invariant
splitting is span(1) (the trivial block, carrying the mean of f) plus the
mean-zero subspace (the standard block).  Hilbert-Schmidt pairings of
standard-block coefficients are therefore full-matrix pairings minus the
product of means, which is basis-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from permix import groups
from permix.groups import GroupFunction, Permutation, convolve_group_omega, pushforward


@dataclass(frozen=True)
class SigmaCoefficient:
    """Permutation-representation Fourier coefficient with its trivial part."""

    n: int
    perm_matrix_coeff: np.ndarray  # (n, n); row/column sums all equal mean
    mean: float

    def hs_norm_sq(self) -> float:
        """Squared HS norm of the standard-representation block."""
        return sigma_hs_product(self, self)


def sigma_coefficient(f: GroupFunction) -> SigmaCoefficient:
    """C[w, i] = integral of f(pi) 1{pi(i) = w}; mean = integral of f."""
    space = f.space
    n = space.n
    mat = np.empty((n, n))
    for i in range(n):
        mat[:, i] = np.bincount(
            space.images_table[:, i], weights=f.values, minlength=n
        )
    mat /= space.order
    mat.setflags(write=False)
    return SigmaCoefficient(n, mat, float(f.values.mean()))


def sigma_hs_product(F: SigmaCoefficient, G: SigmaCoefficient) -> float:
    """HS inner product of the standard blocks: full pairing minus mean*mean."""
    if F.n != G.n:
        raise ValueError("size mismatch")
    return float((F.perm_matrix_coeff * G.perm_matrix_coeff).sum() - F.mean * G.mean)


def sigma_matrix_product(F: SigmaCoefficient, G: SigmaCoefficient) -> SigmaCoefficient:
    """Coefficient of the convolution: blocks multiply, so the full matrices do."""
    if F.n != G.n:
        raise ValueError("size mismatch")
    return SigmaCoefficient(F.n, F.perm_matrix_coeff @ G.perm_matrix_coeff, F.mean * G.mean)


def standard_character(p: Permutation) -> int:
    """Trace of the standard representation: fixed points minus one."""
    return p.fixed_points() - 1


@dataclass(frozen=True)
class DecompositionReport:
    """<f*g, h> split into main term, standard-representation term, and the rest."""

    total: float
    main_term: float
    sigma_term: float
    remainder: float  # defined by subtraction, so the identity is exact


def decompose_triple(f: GroupFunction, g: GroupFunction, h: GroupFunction) -> DecompositionReport:
    """Split <f*g, h> as (mean product) + (n-1)<(fg)^(std), h^(std)>_HS + remainder."""
    groups._same_group(f, g)
    groups._same_group(f, h)
    n = f.space.n
    total = groups.triple_inner(f, g, h)
    F = sigma_coefficient(f)
    G = sigma_coefficient(g)
    H = sigma_coefficient(h)
    main = F.mean * G.mean * H.mean
    sigma_term = (n - 1) * sigma_hs_product(sigma_matrix_product(F, G), H)
    return DecompositionReport(
        total=total,
        main_term=main,
        sigma_term=sigma_term,
        remainder=total - main - sigma_term,
    )


def secondterm_identity_check(
    f: GroupFunction, g: GroupFunction, h: GroupFunction, tol: float = 1e-12
) -> tuple:
    """Both sides of the pushforward identity for the standard-block term.

    lhs = (n-1) <(fg)^(std), h^(std)>_HS
    rhs = ((n-1)/n) * sum over i of <f * p_i g, p_i h>

    Requires at least one of the three integrals to vanish (shifting by a
    constant does not change a standard-block coefficient, so this loses
    no generality).
    """
    groups._same_group(f, g)
    groups._same_group(f, h)
    means = (abs(f.values.mean()), abs(g.values.mean()), abs(h.values.mean()))
    if min(means) > tol:
        raise ValueError("at least one of the integrals must be zero")
    n = f.space.n
    F = sigma_coefficient(f)
    G = sigma_coefficient(g)
    H = sigma_coefficient(h)
    lhs = (n - 1) * sigma_hs_product(sigma_matrix_product(F, G), H)
    acc = 0.0
    for i in range(n):
        acc += groups.inner_product(
            convolve_group_omega(f, pushforward(g, i)), pushforward(h, i)
        )
    rhs = (n - 1) / n * acc
    return lhs, rhs


def alternating_min_rep_dim(n: int) -> int:
    """Minimal dimension of a nontrivial irreducible representation of A_n.

    Only the alternating-group table ships; callers working in S_n or other
    groups must supply the dimension themselves.
    """
    if n < 3:
        raise ValueError("A_n is trivial for n < 3; no nontrivial representation")
    if n in (3, 4):
        return 1
    if n == 5:
        return 3
    if n == 6:
        return 5
    return n - 1
