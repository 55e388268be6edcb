# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kinetic Monte Carlo kernel for the open exclusion chain.

Bit-for-bit twin of ``smps._kmc_py``: same splitmix64 generator, same draw
order, same floating-point operation order.  Any change here must be mirrored
there.
"""

from libc.math cimport log

ctypedef unsigned long long u64

cdef u64 _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef u64 _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef u64 _MIX2 = 0x94D049BB133111EBULL
cdef double _INV53 = 1.0 / 9007199254740992.0


cdef inline double _next_uniform(u64 *s) nogil:
    cdef u64 z
    s[0] = s[0] + _GOLDEN
    z = s[0]
    z = (z ^ (z >> 30)) * _MIX1
    z = (z ^ (z >> 27)) * _MIX2
    z = z ^ (z >> 31)
    return <double> (z >> 11) * _INV53


def run_chain(int num_sites, double alpha, double beta, double burn_in,
              double interval, u64[::1] out, u64 seed, u64 init_state):
    """Same contract as the pure-Python ``run_chain``; see that docstring."""
    cdef int n = num_sites
    cdef Py_ssize_t count = out.shape[0]
    cdef u64 state = init_state
    cdef u64 s = seed
    cdef u64 msb = (<u64> 1) << (n - 1)
    cdef double t = 0.0
    cdef double next_t = burn_in + interval
    cdef Py_ssize_t i = 0
    cdef unsigned long long events = 0, injections = 0, extractions = 0
    cdef bint can_inject, can_extract
    cdef int nhops, last_hop, j, kind, hop_j
    cdef double total, u1, u2, tn, x

    while i < count:
        can_inject = (state & msb) == 0
        can_extract = (state & 1) == 1
        nhops = 0
        last_hop = 0
        for j in range(n - 1, 0, -1):
            if ((state >> j) & 1) != 0 and ((state >> (j - 1)) & 1) == 0:
                nhops += 1
                last_hop = j
        total = <double> nhops
        if can_inject:
            total += alpha
        if can_extract:
            total += beta
        if total <= 0.0:
            while i < count:
                out[i] = state
                i += 1
            break

        u1 = _next_uniform(&s)
        tn = t + (-log(1.0 - u1) / total)

        while i < count and next_t <= tn:
            out[i] = state
            i += 1
            next_t += interval
        if i >= count:
            break

        u2 = _next_uniform(&s)

        x = u2 * total
        kind = 0
        hop_j = 0
        if can_inject:
            x -= alpha
            if x < 0.0:
                kind = 1
        if kind == 0:
            for j in range(n - 1, 0, -1):
                if ((state >> j) & 1) != 0 and ((state >> (j - 1)) & 1) == 0:
                    x -= 1.0
                    if x < 0.0:
                        kind = 2
                        hop_j = j
                        break
        if kind == 0 and can_extract:
            x -= beta
            if x < 0.0:
                kind = 3
        if kind == 0:
            if can_extract:
                kind = 3
            elif nhops > 0:
                kind = 2
                hop_j = last_hop
            else:
                kind = 1

        if kind == 1:
            state |= msb
            if tn > burn_in:
                injections += 1
        elif kind == 2:
            state = (state ^ ((<u64> 1) << hop_j)) | ((<u64> 1) << (hop_j - 1))
        else:
            state ^= 1
            if tn > burn_in:
                extractions += 1
        events += 1
        t = tn
    return events, injections, extractions, t
