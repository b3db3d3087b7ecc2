# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; must match permix.kernels.fallback bit-for-bit on
integer outputs (sampled permutations, counts, tables, witnesses)."""

import numpy as np

from libc.stdint cimport int16_t, int32_t, int64_t, uint8_t


def fy_steps(int32_t[:, ::1] work, double[:, :] u, int start=0):
    cdef Py_ssize_t k = work.shape[0]
    cdef Py_ssize_t m = work.shape[1]
    cdef Py_ssize_t s = u.shape[1]
    J_arr = np.empty((k, s), dtype=np.int32)
    cdef int32_t[:, ::1] J = J_arr
    cdef Py_ssize_t r, l
    cdef int32_t i, j, tmp
    if k == 0 or s == 0:
        return J_arr
    with nogil:
        for r in range(k):
            for l in range(s):
                i = start + <int32_t>l
                j = i + <int32_t>(u[r, l] * (m - i))
                if j > m - 1:
                    j = <int32_t>(m - 1)
                J[r, l] = j
                tmp = work[r, i]
                work[r, i] = work[r, j]
                work[r, j] = tmp
    return J_arr


def parity_batch(int16_t[:, ::1] images):
    cdef Py_ssize_t k = images.shape[0]
    cdef Py_ssize_t n = images.shape[1]
    out_arr = np.zeros(k, dtype=np.uint8)
    cdef uint8_t[::1] out = out_arr
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] seen = seen_arr
    cdef Py_ssize_t r, i
    cdef int64_t j, length
    cdef uint8_t odd
    with nogil:
        for r in range(k):
            for i in range(n):
                seen[i] = 0
            odd = 0
            for i in range(n):
                if not seen[i]:
                    j = i
                    length = 0
                    while not seen[j]:
                        seen[j] = 1
                        j = images[r, j]
                        length += 1
                    odd ^= <uint8_t>((length - 1) & 1)
            out[r] = odd
    return out_arr


cdef inline int64_t _bsearch(const int64_t[::1] codes, int64_t target) nogil:
    """Index of target in sorted codes, or -1."""
    cdef int64_t lo = 0
    cdef int64_t hi = codes.shape[0] - 1
    cdef int64_t mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if codes[mid] < target:
            lo = mid + 1
        elif codes[mid] > target:
            hi = mid - 1
        else:
            return mid
    return -1


def count_triple(const int16_t[:, ::1] x_imgs, const int16_t[:, ::1] y_imgs,
                 const int64_t[::1] z_codes, const int64_t[::1] powers):
    cdef Py_ssize_t kx = x_imgs.shape[0]
    cdef Py_ssize_t ky = y_imgs.shape[0]
    cdef Py_ssize_t n = powers.shape[0]
    cdef int64_t total = 0
    cdef Py_ssize_t ix, iy, i
    cdef int64_t code
    if z_codes.shape[0] == 0 or kx == 0 or ky == 0:
        return 0
    with nogil:
        for ix in range(kx):
            for iy in range(ky):
                code = 0
                for i in range(n):
                    code += x_imgs[ix, y_imgs[iy, i]] * powers[i]
                if _bsearch(z_codes, code) >= 0:
                    total += 1
    return int(total)


def triple_witness(const int16_t[:, ::1] x_imgs, const int16_t[:, ::1] y_imgs,
                   const int64_t[::1] z_codes, const int64_t[::1] powers):
    cdef Py_ssize_t kx = x_imgs.shape[0]
    cdef Py_ssize_t ky = y_imgs.shape[0]
    cdef Py_ssize_t n = powers.shape[0]
    cdef Py_ssize_t ix, iy, i
    cdef int64_t code
    cdef Py_ssize_t wx = -1, wy = -1
    if z_codes.shape[0] == 0 or kx == 0 or ky == 0:
        return (-1, -1)
    with nogil:
        for ix in range(kx):
            for iy in range(ky):
                code = 0
                for i in range(n):
                    code += x_imgs[ix, y_imgs[iy, i]] * powers[i]
                if _bsearch(z_codes, code) >= 0:
                    wx = ix
                    wy = iy
                    break
            if wx >= 0:
                break
    return (int(wx), int(wy))


def product_counts(const int16_t[:, ::1] x_imgs, const int16_t[:, ::1] y_imgs,
                   const int64_t[::1] space_codes, const int64_t[::1] powers):
    cdef Py_ssize_t kx = x_imgs.shape[0]
    cdef Py_ssize_t ky = y_imgs.shape[0]
    cdef Py_ssize_t n = powers.shape[0]
    counts_arr = np.zeros(space_codes.shape[0], dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef Py_ssize_t ix, iy, i
    cdef int64_t code, pos
    if kx == 0 or ky == 0:
        return counts_arr
    with nogil:
        for ix in range(kx):
            for iy in range(ky):
                code = 0
                for i in range(n):
                    code += x_imgs[ix, y_imgs[iy, i]] * powers[i]
                pos = _bsearch(space_codes, code)
                counts[pos] += 1
    return counts_arr


def build_mult_table(const int16_t[:, ::1] images, const int64_t[::1] codes,
                     const int64_t[::1] powers):
    cdef Py_ssize_t N = images.shape[0]
    cdef Py_ssize_t n = images.shape[1]
    table_arr = np.empty((N, N), dtype=np.int32)
    cdef int32_t[:, ::1] table = table_arr
    cdef Py_ssize_t a, b, i
    cdef int64_t code
    with nogil:
        for a in range(N):
            for b in range(N):
                code = 0
                for i in range(n):
                    code += images[a, images[b, i]] * powers[i]
                table[a, b] = <int32_t>_bsearch(codes, code)
    return table_arr


def convolve_table(const int32_t[:, ::1] table, const int32_t[::1] inv_ranks,
                   const double[::1] f, const double[::1] g):
    cdef Py_ssize_t N = f.shape[0]
    out_arr = np.zeros(N, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t x, y
    cdef Py_ssize_t row
    cdef double fy
    with nogil:
        for y in range(N):
            fy = f[y]
            if fy != 0.0:
                row = inv_ranks[y]
                for x in range(N):
                    out[x] += fy * g[table[row, x]]
        for x in range(N):
            out[x] /= N
    return out_arr


def ryser_permanent(const double[:, ::1] M):
    cdef Py_ssize_t n = M.shape[0]
    if n == 0:
        return 1.0
    row_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] row = row_arr
    cdef double total = 0.0
    cdef double sign = 1.0
    cdef double prod
    cdef unsigned long long gray = 0, k, kk
    cdef Py_ssize_t bit, i
    with nogil:
        for k in range(1, (<unsigned long long>1) << n):
            kk = k & (~k + 1)  # lowest set bit
            bit = 0
            while (kk >> 1) != 0:
                kk >>= 1
                bit += 1
            gray ^= (<unsigned long long>1) << bit
            if gray & ((<unsigned long long>1) << bit):
                for i in range(n):
                    row[i] += M[i, bit]
            else:
                for i in range(n):
                    row[i] -= M[i, bit]
            sign = -sign
            prod = 1.0
            for i in range(n):
                prod *= row[i]
            total += sign * prod
    if n % 2:
        return float(-total)
    return float(total)
