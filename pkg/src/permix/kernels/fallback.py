"""numpy implementations of the hot kernels.

Drop-in equivalent of the compiled extension (permix._speedups).  Integer
results (counts, tables, sampled permutations) are bit-identical between
the two backends; float reductions may differ in the last bits because of
summation order and are compared at tolerance by the test suite.
"""

import numpy as np

_X_BLOCK = 128  # x rows per composition block in the pair-counting loops


def _encode(imgs, powers):
    # int64 mixed-radix codes, one column at a time to avoid a large temp
    out = np.zeros(imgs.shape[:-1], dtype=np.int64)
    for i in range(imgs.shape[-1]):
        out += imgs[..., i].astype(np.int64) * int(powers[i])
    return out


def fy_steps(work, u, start=0):
    """Run forward-selection Fisher-Yates picks on each row of ``work``.

    Step ``l`` (global index i = start + l) swaps work[r, i] with
    work[r, j] where j = i + int(u[r, l] * (m - i)).  Returns the chosen
    j indices as an int32 array of the same shape as ``u``; a row's swap
    parity is the number of entries with J[r, l] != start + l, mod 2.
    """
    k, m = work.shape
    s = u.shape[1]
    J = np.empty((k, s), dtype=np.int32)
    rows = np.arange(k)
    for l in range(s):
        i = start + l
        j = (u[:, l] * (m - i)).astype(np.int32)
        j += i
        np.minimum(j, m - 1, out=j)  # guard the u*(m-i) == m-i rounding edge
        J[:, l] = j
        wi = work[rows, i].copy()
        work[rows, i] = work[rows, j]
        work[rows, j] = wi
    return J


def parity_batch(images):
    """Cycle-walk parity of each row: 0 even, 1 odd.  O(n) per row."""
    k, n = images.shape
    out = np.zeros(k, dtype=np.uint8)
    seen = np.zeros(n, dtype=bool)
    for r in range(k):
        seen[:] = False
        row = images[r]
        odd = 0
        for i in range(n):
            if not seen[i]:
                j = i
                length = 0
                while not seen[j]:
                    seen[j] = True
                    j = int(row[j])
                    length += 1
                odd ^= (length - 1) & 1
        out[r] = odd
    return out


def count_triple(x_imgs, y_imgs, z_codes, powers):
    """#{(x, y) : encode(x∘y) in z_codes}; z_codes must be sorted."""
    if len(z_codes) == 0 or len(x_imgs) == 0 or len(y_imgs) == 0:
        return 0
    total = 0
    for a in range(0, x_imgs.shape[0], _X_BLOCK):
        xb = x_imgs[a : a + _X_BLOCK]
        comp = xb[:, y_imgs]  # (c, ky, n): (x∘y)(i) = x[y(i)]
        codes = _encode(comp, powers)
        idx = np.searchsorted(z_codes, codes)
        idx[idx == len(z_codes)] = 0  # cannot false-match: code > max(z_codes)
        total += int((z_codes[idx] == codes).sum())
    return total


def triple_witness(x_imgs, y_imgs, z_codes, powers):
    """First (x index, y index) in row-major order with x∘y in z_codes, else (-1, -1)."""
    if len(z_codes) == 0 or len(x_imgs) == 0 or len(y_imgs) == 0:
        return (-1, -1)
    ky = y_imgs.shape[0]
    for a in range(0, x_imgs.shape[0], _X_BLOCK):
        xb = x_imgs[a : a + _X_BLOCK]
        comp = xb[:, y_imgs]
        codes = _encode(comp, powers)
        idx = np.searchsorted(z_codes, codes)
        idx[idx == len(z_codes)] = 0
        hits = z_codes[idx] == codes
        if hits.any():
            flat = int(np.argmax(hits))
            return (a + flat // ky, flat % ky)
    return (-1, -1)


def product_counts(x_imgs, y_imgs, space_codes, powers):
    """counts[r] = #{(x, y) : rank(x∘y) = r} over the whole space."""
    N = len(space_codes)
    counts = np.zeros(N, dtype=np.int64)
    if len(x_imgs) == 0 or len(y_imgs) == 0:
        return counts
    for a in range(0, x_imgs.shape[0], _X_BLOCK):
        xb = x_imgs[a : a + _X_BLOCK]
        comp = xb[:, y_imgs]
        codes = _encode(comp, powers)
        ranks = np.searchsorted(space_codes, codes)  # products stay in the group
        counts += np.bincount(ranks.ravel(), minlength=N)
    return counts


def build_mult_table(images, codes, powers):
    """table[a, b] = rank of images[a]∘images[b]."""
    N = images.shape[0]
    table = np.empty((N, N), dtype=np.int32)
    for a in range(N):
        comp = images[a][images]  # (N, n)
        table[a] = np.searchsorted(codes, _encode(comp, powers))
    return table


def convolve_table(table, inv_ranks, f, g):
    """out[x] = (1/N) sum_y f[y] * g[(y^-1 x)] using the multiplication table."""
    N = f.shape[0]
    out = np.zeros(N, dtype=np.float64)
    for y in np.nonzero(f)[0]:
        out += f[y] * g[table[inv_ranks[y]]]
    return out / N


def ryser_permanent(M):
    """Exact permanent by Ryser's inclusion-exclusion with Gray-code updates."""
    n = M.shape[0]
    if n == 0:
        return 1.0
    row = np.zeros(n, dtype=np.float64)
    gray = 0
    sign = 1.0  # (-1)^(n - |S|), updated as |S| changes
    total = 0.0
    neg_n = -1.0 if n % 2 else 1.0
    for k in range(1, 1 << n):
        bit = (k & -k).bit_length() - 1
        gray ^= 1 << bit
        if gray & (1 << bit):
            row += M[:, bit]
            sign = -sign
        else:
            row -= M[:, bit]
            sign = -sign
        total += sign * np.prod(row)
    return float(neg_n * total)
