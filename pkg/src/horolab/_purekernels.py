"""Pure-Python/numpy versions of the compiled kernels (same signatures)."""

from collections import deque
from itertools import combinations

import numpy as np


def bfs_row(indptr, indices, src):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[src] = 0
    queue = deque([src])
    ip = indptr.tolist()
    ix = indices.tolist()
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for k in range(ip[u], ip[u + 1]):
            v = ix[k]
            if dist[v] < 0:
                dist[v] = du
                queue.append(v)
    return dist


def bfs_row_avoiding(indptr, indices, src, banned):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    if src == banned:
        return dist
    dist[src] = 0
    queue = deque([src])
    ip = indptr.tolist()
    ix = indices.tolist()
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for k in range(ip[u], ip[u + 1]):
            v = ix[k]
            if v != banned and dist[v] < 0:
                dist[v] = du
                queue.append(v)
    return dist


def bfs_pair_avoiding(indptr, indices, src, dst, banned):
    if src == banned or dst == banned:
        return -1
    if src == dst:
        return 0
    row = bfs_row_avoiding(indptr, indices, src, banned)
    return int(row[dst])


def distance_matrix(indptr, indices):
    n = len(indptr) - 1
    out = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        out[s] = bfs_row(indptr, indices, s)
    return out


def _defects(D, i, j, ks, ls):
    s1 = D[i, j] + D[ks, ls]
    s2 = D[i, ks] + D[j, ls]
    s3 = D[i, ls] + D[j, ks]
    hi = np.maximum(np.maximum(s1, s2), s3)
    lo = np.minimum(np.minimum(s1, s2), s3)
    mid = s1 + s2 + s3 - hi - lo
    return hi - mid


def four_point_max(D):
    D = np.asarray(D, dtype=np.int32)
    n = D.shape[0]
    best, arg = 0, (-1, -1, -1, -1)
    if n < 4:
        return best, arg
    for i, j in combinations(range(n), 2):
        if j + 2 >= n:
            continue
        ks, ls = np.triu_indices(n - j - 1, k=1)
        ks = ks + j + 1
        ls = ls + j + 1
        d = _defects(D, i, j, ks, ls)
        r = int(np.argmax(d))
        if d[r] > best:
            best = int(d[r])
            arg = (i, j, int(ks[r]), int(ls[r]))
    return best, arg


def four_point_sampled(D, quads):
    D = np.asarray(D, dtype=np.int32)
    quads = np.asarray(quads, dtype=np.int32)
    if len(quads) == 0:
        return 0, (-1, -1, -1, -1)
    i, j, k, l = quads.T
    s1 = D[i, j] + D[k, l]
    s2 = D[i, k] + D[j, l]
    s3 = D[i, l] + D[j, k]
    hi = np.maximum(np.maximum(s1, s2), s3)
    lo = np.minimum(np.minimum(s1, s2), s3)
    d = hi - (s1 + s2 + s3 - hi - lo)
    r = int(np.argmax(d))
    if d[r] <= 0:
        return 0, (-1, -1, -1, -1)
    return int(d[r]), tuple(int(x) for x in quads[r])
