# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled maximum separated-set kernel (bitset branch and bound).

Same algorithm as the pure-Python fallback in ``_seppy``: greedy clique,
greedy colouring bound, Tomita-style expansion.  Vertex sets are arrays of
64-bit words.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t

import numpy as np


cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define SL_POPCNT(x) __builtin_popcountll(x)
    #define SL_CTZ(x) __builtin_ctzll(x)
    #else
    static int SL_POPCNT(unsigned long long x){int c=0;while(x){x&=x-1;c++;}return c;}
    static int SL_CTZ(unsigned long long x){int c=0;while(!(x&1ULL)){x>>=1;c++;}return c;}
    #endif
    """
    int SL_POPCNT(uint64_t x) nogil
    int SL_CTZ(uint64_t x) nogil


cdef struct Ctx:
    const uint64_t* adj
    int n
    int words
    int best_size
    int* best
    int* r
    int r_size


cdef inline int bs_pop(const uint64_t* p, int words) nogil:
    cdef int i, c = 0
    for i in range(words):
        c += SL_POPCNT(p[i])
    return c


cdef inline int bs_lowest(const uint64_t* p, int words) nogil:
    cdef int i
    for i in range(words):
        if p[i]:
            return 64 * i + SL_CTZ(p[i])
    return -1


cdef int greedy_clique(Ctx* ctx, uint64_t* p, int* out) nogil:
    cdef int size = 0, v, i
    cdef const uint64_t* row
    while True:
        v = bs_lowest(p, ctx.words)
        if v < 0:
            break
        out[size] = v
        size += 1
        row = ctx.adj + v * ctx.words
        for i in range(ctx.words):
            p[i] &= row[i]
    return size


cdef int color_sort(Ctx* ctx, const uint64_t* p, int* order, int* colors,
                    uint64_t* uncolored, uint64_t* q) nogil:
    """Greedy colouring; fills order/colors, returns the vertex count."""
    cdef int words = ctx.words
    cdef int i, v, count = 0, color = 0
    cdef const uint64_t* row
    for i in range(words):
        uncolored[i] = p[i]
    while bs_lowest(uncolored, words) >= 0:
        color += 1
        for i in range(words):
            q[i] = uncolored[i]
        while True:
            v = bs_lowest(q, words)
            if v < 0:
                break
            row = ctx.adj + v * words
            for i in range(words):
                q[i] &= ~row[i]
            q[v >> 6] &= ~((<uint64_t>1) << (v & 63))
            uncolored[v >> 6] &= ~((<uint64_t>1) << (v & 63))
            order[count] = v
            colors[count] = color
            count += 1
    return count


cdef void expand(Ctx* ctx, uint64_t* p, const int* order, const int* colors,
                 int count) nogil:
    cdef int words = ctx.words
    cdef int i, j, v, sub_count
    cdef const uint64_t* row
    cdef uint64_t* new_p
    cdef uint64_t* scratch
    cdef int* sub_order
    cdef int* sub_colors
    for i in range(count - 1, -1, -1):
        v = order[i]
        if ctx.r_size + colors[i] <= ctx.best_size:
            return
        ctx.r[ctx.r_size] = v
        ctx.r_size += 1
        row = ctx.adj + v * words
        new_p = <uint64_t*> malloc(3 * words * sizeof(uint64_t))
        scratch = new_p + words
        for j in range(words):
            new_p[j] = p[j] & row[j]
        if bs_lowest(new_p, words) >= 0:
            sub_order = <int*> malloc(2 * ctx.n * sizeof(int))
            sub_colors = sub_order + ctx.n
            sub_count = color_sort(ctx, new_p, sub_order, sub_colors,
                                   scratch, scratch + words)
            expand(ctx, new_p, sub_order, sub_colors, sub_count)
            free(sub_order)
        elif ctx.r_size > ctx.best_size:
            ctx.best_size = ctx.r_size
            for j in range(ctx.r_size):
                ctx.best[j] = ctx.r[j]
        free(new_p)
        ctx.r_size -= 1
        p[v >> 6] &= ~((<uint64_t>1) << (v & 63))


def max_clique(adj_words, int n):
    """Indices of a maximum clique; adj_words is a (n, words) uint64 array."""
    if n == 0:
        return []
    cdef uint64_t[:, ::1] adj = np.ascontiguousarray(adj_words, dtype=np.uint64)
    cdef int words = adj.shape[1]
    cdef Ctx ctx
    ctx.adj = &adj[0, 0]
    ctx.n = n
    ctx.words = words
    cdef uint64_t* full = <uint64_t*> malloc(3 * words * sizeof(uint64_t))
    cdef uint64_t* scratch = full + words
    cdef int* bufs = <int*> malloc(4 * n * sizeof(int))
    cdef int* order = bufs + 2 * n
    cdef int* colors = bufs + 3 * n
    cdef int i, count
    ctx.best = bufs
    ctx.r = bufs + n
    try:
        for i in range(words):
            full[i] = 0
        for i in range(n):
            full[i >> 6] |= (<uint64_t>1) << (i & 63)
        for i in range(words):
            scratch[i] = full[i]
        ctx.best_size = greedy_clique(&ctx, scratch, ctx.best)
        ctx.r_size = 0
        count = color_sort(&ctx, full, order, colors, scratch,
                           scratch + words)
        if count == 0 or colors[count - 1] > ctx.best_size:
            expand(&ctx, full, order, colors, count)
        return sorted([ctx.best[i] for i in range(ctx.best_size)])
    finally:
        free(full)
        free(bufs)


def greedy_clique_py(adj_words, int n):
    """Greedy maximal clique (lower bound), compiled version."""
    if n == 0:
        return []
    cdef uint64_t[:, ::1] adj = np.ascontiguousarray(adj_words, dtype=np.uint64)
    cdef int words = adj.shape[1]
    cdef Ctx ctx
    ctx.adj = &adj[0, 0]
    ctx.n = n
    ctx.words = words
    cdef uint64_t* p = <uint64_t*> malloc(words * sizeof(uint64_t))
    cdef int* out = <int*> malloc(n * sizeof(int))
    cdef int i, size
    try:
        for i in range(words):
            p[i] = 0
        for i in range(n):
            p[i >> 6] |= (<uint64_t>1) << (i & 63)
        size = greedy_clique(&ctx, p, out)
        return sorted([out[i] for i in range(size)])
    finally:
        free(p)
        free(out)
