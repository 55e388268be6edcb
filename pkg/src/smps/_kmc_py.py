"""Pure-Python kinetic Monte Carlo kernel for the open exclusion chain.

This is the fallback for the compiled module ``smps._kmc_cy``.  The two are
bit-for-bit twins: same splitmix64 generator, same draw order (one uniform
for the waiting time, one for the transition pick), same floating-point
operation order in the selection walk.  Any change here must be mirrored
there.
"""

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
# 2**-53: uniforms are (z >> 11) * _INV53, in [0, 1)
_INV53 = 1.0 / 9007199254740992.0


def run_chain(num_sites, alpha, beta, burn_in, interval, out, seed, init_state):
    """Simulate the chain and record states at fixed sampling times.

    Particles enter at site 1 (bit ``num_sites - 1``) at rate ``alpha``, hop
    one site rightward at unit rate when the target is empty, and leave from
    site ``num_sites`` (bit 0) at rate ``beta``.  ``out`` is a uint64 array;
    slot ``i`` receives the state at time ``burn_in + (i + 1) * interval``.
    Returns ``(events, injections, extractions, t_end)`` where the entry and
    exit counters only cover events after ``burn_in``.
    """
    n = num_sites
    count = len(out)
    state = int(init_state)
    s = int(seed) & _MASK
    msb = 1 << (n - 1)
    t = 0.0
    next_t = burn_in + interval
    i = 0
    events = 0
    injections = 0
    extractions = 0
    while i < count:
        can_inject = (state & msb) == 0
        can_extract = (state & 1) == 1
        nhops = 0
        last_hop = 0
        for j in range(n - 1, 0, -1):
            if (state >> j) & 1 and not (state >> (j - 1)) & 1:
                nhops += 1
                last_hop = j
        total = float(nhops)
        if can_inject:
            total += alpha
        if can_extract:
            total += beta
        if total <= 0.0:
            # absorbing only when injection is disabled and the lattice is empty
            while i < count:
                out[i] = state
                i += 1
            break

        s = (s + _GOLDEN) & _MASK
        z = s
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        z = z ^ (z >> 31)
        u1 = (z >> 11) * _INV53
        tn = t + (-math.log(1.0 - u1) / total)

        while i < count and next_t <= tn:
            out[i] = state
            i += 1
            next_t += interval
        if i >= count:
            break

        s = (s + _GOLDEN) & _MASK
        z = s
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        z = z ^ (z >> 31)
        u2 = (z >> 11) * _INV53

        x = u2 * total
        kind = 0  # 1 inject, 2 hop, 3 extract
        hop_j = 0
        if can_inject:
            x -= alpha
            if x < 0.0:
                kind = 1
        if kind == 0:
            for j in range(n - 1, 0, -1):
                if (state >> j) & 1 and not (state >> (j - 1)) & 1:
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
            # roundoff spilled past the last rate: take the last enabled move
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
            state = (state ^ (1 << hop_j)) | (1 << (hop_j - 1))
        else:
            state ^= 1
            if tn > burn_in:
                extractions += 1
        events += 1
        t = tn
    return events, injections, extractions, t
