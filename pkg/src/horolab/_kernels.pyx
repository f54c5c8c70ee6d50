# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled BFS and four-point kernels over CSR adjacency."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int32_t i32


def bfs_row(const i32[::1] indptr, const i32[::1] indices, int src):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] dist = out
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef int u, v
    dist[src] = 0
    queue[tail] = src
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue[tail] = v
                tail += 1
    return out


def bfs_row_avoiding(const i32[::1] indptr, const i32[::1] indices, int src, int banned):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] dist = out
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef int u, v
    if src == banned:
        return out
    dist[src] = 0
    queue[tail] = src
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if v != banned and dist[v] < 0:
                dist[v] = dist[u] + 1
                queue[tail] = v
                tail += 1
    return out


def bfs_pair_avoiding(const i32[::1] indptr, const i32[::1] indices, int src, int dst, int banned):
    """Distance from src to dst with ``banned`` deleted, -1 if disconnected."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef i32[::1] dist = np.full(n, -1, dtype=np.int32)
    cdef i32[::1] queue = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef int u, v
    if src == banned or dst == banned:
        return -1
    if src == dst:
        return 0
    dist[src] = 0
    queue[tail] = src
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if v != banned and dist[v] < 0:
                dist[v] = dist[u] + 1
                if v == dst:
                    return dist[v]
                queue[tail] = v
                tail += 1
    return -1


def distance_matrix(const i32[::1] indptr, const i32[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full((n, n), -1, dtype=np.int32)
    cdef i32[:, ::1] D = out
    cdef i32[::1] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef Py_ssize_t head, tail, k, s
    cdef int u, v
    for s in range(n):
        head = 0
        tail = 0
        D[s, s] = 0
        queue[tail] = <int>s
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if D[s, v] < 0:
                    D[s, v] = D[s, u] + 1
                    queue[tail] = v
                    tail += 1
    return out


cdef inline int _defect(const i32[:, ::1] D, int i, int j, int k, int l) nogil:
    cdef int s1 = D[i, j] + D[k, l]
    cdef int s2 = D[i, k] + D[j, l]
    cdef int s3 = D[i, l] + D[j, k]
    cdef int t
    # sort three sums, return largest minus middle
    if s1 < s2:
        t = s1; s1 = s2; s2 = t
    if s2 < s3:
        t = s2; s2 = s3; s3 = t
    if s1 < s2:
        t = s1; s1 = s2; s2 = t
    return s1 - s2


def four_point_max(const i32[:, ::1] D):
    """Largest doubled four-point defect over all quadruples i<j<k<l."""
    cdef Py_ssize_t n = D.shape[0]
    cdef int i, j, k, l, d
    cdef int best = 0
    cdef int bi = -1, bj = -1, bk = -1, bl = -1
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for l in range(k + 1, n):
                        d = _defect(D, i, j, k, l)
                        if d > best:
                            best = d
                            bi = i; bj = j; bk = k; bl = l
    return best, (bi, bj, bk, bl)


def four_point_sampled(const i32[:, ::1] D, const i32[:, ::1] quads):
    cdef Py_ssize_t m = quads.shape[0], r
    cdef int d, best = 0
    cdef Py_ssize_t arg = -1
    with nogil:
        for r in range(m):
            d = _defect(D, quads[r, 0], quads[r, 1], quads[r, 2], quads[r, 3])
            if d > best:
                best = d
                arg = r
    if arg < 0:
        return 0, (-1, -1, -1, -1)
    return best, (int(quads[arg, 0]), int(quads[arg, 1]), int(quads[arg, 2]), int(quads[arg, 3]))
