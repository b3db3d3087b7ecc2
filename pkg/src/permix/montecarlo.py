"""Chunked Monte Carlo samplers over large symmetric groups.

All randomness is consumed as sequential doubles from a seeded numpy
Generator, in an order fixed by the wave/chunk structure below, so the
compiled and fallback kernels produce bit-identical samples.  Chunk sizes
are constants: results never depend on thread count.

Permutations are drawn by forward-selection Fisher-Yates on a value pool;
a draw's parity is the number of non-identity swaps mod 2.  Even-parity
sampling composes odd draws with a transposition at two positions the
membership predicate does not read, which maps the conditioned measure
bijectively onto its even half.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from permix import kernels
from permix.errors import RejectionRateError
from permix.groups import _parity

CHUNK = 8192  # samples per block; fixed so results are chunking-independent

_REJECTION_FLOOR = 1e-6
_REJECTION_PROBE = 2_000_000  # attempts before the acceptance floor is enforced


def _free_swap_pair(n: int, protected) -> tuple:
    """Two largest positions outside ``protected`` (for parity fixes)."""
    prot = set(int(p) for p in protected)
    free = [p for p in range(n - 1, -1, -1) if p not in prot]
    if len(free) < 2:
        raise ValueError("parity fix needs two positions outside the constrained set")
    return free[1], free[0]


def uniform_images(n: int, count: int, rng, parity: str = "all") -> np.ndarray:
    """(count, n) image arrays of independent uniform draws from S_n or A_n."""
    out = np.empty((count, n), dtype=np.int16)
    base = np.arange(n, dtype=np.int32)
    steps = np.arange(n - 1)
    done = 0
    while done < count:
        k = min(CHUNK, count - done)
        work = np.tile(base, (k, 1))
        J = kernels.fy_steps(work, rng.random((k, n - 1)), 0)
        block = work.astype(np.int16)
        if parity == "even" and n >= 2:
            odd = ((J != steps[None, :]).sum(axis=1) & 1).astype(bool)
            tmp = block[odd, n - 2].copy()
            block[odd, n - 2] = block[odd, n - 1]
            block[odd, n - 1] = tmp
        out[done : done + k] = block
        done += k
    return out


@dataclass
class ConditionedDraw:
    """Result of a conditioned batch draw."""

    values: np.ndarray  # (count, n) if complete else (count, q) int16
    positions: np.ndarray  # positions of the columns of ``values``
    attempts: int  # uniform proposals consumed
    complete: bool
    density_scale: float = 1.0  # count/attempts * scale estimates the density
    # within the sampled group (2.0 when odd proposals were rejected in-wave)


def conditioned_images(
    spec,
    count: int,
    rng,
    parity: str = "all",
    extra_positions=None,
    complete: bool = False,
) -> ConditionedDraw:
    """Uniform draws conditioned on spec membership, by partial-image rejection.

    Only the images at spec.positions are drawn for the accept/reject test;
    accepted rows are extended (to ``extra_positions`` or to a full
    permutation).  Even-parity sampling forces completion, since parity is
    a property of the whole permutation.
    """
    n = spec.n
    P = np.asarray(spec.positions, dtype=np.int64)
    q = len(P)
    extra = (
        np.setdiff1d(np.asarray(extra_positions, dtype=np.int64), P)
        if extra_positions is not None
        else np.empty(0, dtype=np.int64)
    )
    if parity == "even":
        complete = True
    rest = np.setdiff1d(np.arange(n), np.concatenate([P, extra]))
    pos_order = np.concatenate([P, extra, rest])
    # a row's permutation parity is its swap count plus the parity of the
    # slot-to-position map (the rows hold images in pos_order slots)
    pos_parity = _parity(pos_order)

    # With >= 2 positions the predicate never reads, odd accepted draws can be
    # fixed by a swap there; otherwise draw full rows and reject odd ones.
    parity_by_swap = parity == "even" and n - q >= 2
    parity_by_rejection = parity == "even" and not parity_by_swap
    test_steps = n - 1 if (q >= n - 1 or parity_by_rejection) else q
    state = np.empty((count, n), dtype=np.int32)
    swaps = np.zeros(count, dtype=np.int64)
    base = np.arange(n, dtype=np.int32)
    step_idx = np.arange(test_steps)
    got = 0
    attempts = 0
    while got < count:
        pending = count - got
        work = np.tile(base, (pending, 1))
        J = kernels.fy_steps(work, rng.random((pending, test_steps)), 0)
        acc = np.asarray(spec.member_partial(work[:, :q].astype(np.int16)), dtype=bool)
        row_swaps = (J != step_idx[None, :]).sum(axis=1)
        if parity_by_rejection:
            acc &= ((row_swaps + pos_parity) & 1) == 0
        attempts += pending
        na = int(acc.sum())
        if na:
            state[got : got + na] = work[acc]
            swaps[got : got + na] = row_swaps[acc]
            got += na
        if attempts > _REJECTION_PROBE and got < attempts * _REJECTION_FLOOR:
            raise RejectionRateError(
                f"{spec.name or 'predicate'}: acceptance rate below {_REJECTION_FLOOR}"
            )

    stop = n - 1 if complete else min(max(q, q + len(extra)), n - 1)
    if stop > test_steps:
        J2 = kernels.fy_steps(state, rng.random((count, stop - test_steps)), test_steps)
        swaps += (J2 != np.arange(test_steps, stop)[None, :]).sum(axis=1)

    scale = 2.0 if parity_by_rejection else 1.0
    if complete:
        images = np.empty((count, n), dtype=np.int16)
        images[:, pos_order] = state
        if parity_by_swap:
            a, b = _free_swap_pair(n, P)
            odd = ((swaps + pos_parity) & 1).astype(bool)
            tmp = images[odd, a].copy()
            images[odd, a] = images[odd, b]
            images[odd, b] = tmp
        return ConditionedDraw(images, np.arange(n), attempts, True, scale)

    width = q + len(extra)
    return ConditionedDraw(
        np.ascontiguousarray(state[:, :width]).astype(np.int16),
        pos_order[:width],
        attempts,
        False,
        scale,
    )


def kedlaya_sample(params, count: int, rng, parity: str = "all") -> np.ndarray:
    """Uniform draws from the product-free family, by direct construction.

    Per draw (n-1 doubles): the basepoint image is picked from T, the
    images of T are an ordered pick from the complement, and the remaining
    values are shuffled onto the remaining positions.
    """
    n, t = params.n, params.t
    T = np.array(params.T, dtype=np.int32)
    in_T = np.zeros(n, dtype=bool)
    in_T[T] = True
    comp = np.arange(n, dtype=np.int32)[~in_T]  # complement values, ascending
    rest_pos = np.setdiff1d(np.arange(n), np.concatenate([[params.basepoint], params.T]))
    if parity == "even" and len(rest_pos) < 2:
        raise ValueError("even-parity construction needs two unconstrained positions")

    out = np.empty((count, n), dtype=np.int16)
    done = 0
    while done < count:
        k = min(CHUNK, count - done)
        u = rng.random((k, n - 1))
        pool_t = np.tile(T, (k, 1))
        kernels.fy_steps(pool_t, u[:, :1], 0)
        pool_c = np.tile(comp, (k, 1))
        kernels.fy_steps(pool_c, u[:, 1 : 1 + t], 0)
        pool_r = np.ascontiguousarray(
            np.concatenate([pool_t[:, 1:], pool_c[:, t:]], axis=1)
        )
        if pool_r.shape[1] > 1:
            kernels.fy_steps(pool_r, u[:, 1 + t :], 0)
        block = np.empty((k, n), dtype=np.int16)
        block[:, params.basepoint] = pool_t[:, 0]
        block[:, T] = pool_c[:, :t]
        block[:, rest_pos] = pool_r
        if parity == "even":
            odd = kernels.parity_batch(block).astype(bool)
            a, b = int(rest_pos[-2]), int(rest_pos[-1])
            tmp = block[odd, a].copy()
            block[odd, a] = block[odd, b]
            block[odd, b] = tmp
        out[done : done + k] = block
        done += k
    return out


def estimate_density(spec, samples: int, rng, parity: str = "all") -> float:
    """Acceptance frequency of the membership test on uniform draws.

    For parity='even' the draws are uniform over S_n and only the even ones
    are tested (the estimate divides by the even count), so no parity fix
    is needed regardless of which positions the predicate reads.
    """
    hits = 0
    done = 0
    evens = 0
    n = spec.n
    q = len(spec.positions)
    P = np.asarray(spec.positions, dtype=np.int64)
    pos_parity = _parity(np.concatenate([P, np.setdiff1d(np.arange(n), P)]))
    test_steps = n - 1 if parity == "even" else min(q, n - 1)
    base = np.arange(n, dtype=np.int32)
    step_idx = np.arange(test_steps)
    while done < samples:
        k = min(CHUNK, samples - done)
        work = np.tile(base, (k, 1))
        J = kernels.fy_steps(work, rng.random((k, test_steps)), 0)
        member = np.asarray(spec.member_partial(work[:, :q].astype(np.int16)), dtype=bool)
        if parity == "even":
            even = (((J != step_idx[None, :]).sum(axis=1) + pos_parity) & 1) == 0
            evens += int(even.sum())
            hits += int((member & even).sum())
        else:
            hits += int(member.sum())
        done += k
    denom = evens if parity == "even" else samples
    if denom == 0:
        raise RejectionRateError("no even draws observed")
    return hits / denom
