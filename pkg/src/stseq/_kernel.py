"""Compiled depth-first search over partial sequencings.

The state arrays (seq, pos, nxt, state) are owned by the caller so a run can
be paused after a node quota and resumed exactly where it stopped.
"""

import numpy as np
from numba import njit

EXHAUSTED = 0
FOUND = 1
PAUSED = 2


@njit(cache=True)
def fits(third, v, ell, cyclic, seq, pos, p, i):
    """May point p go at position i, given positions 0..i-1 are filled?"""
    lo = i - ell + 1
    if lo < 0:
        lo = 0
    for j in range(lo, i):
        if pos[third[p, seq[j]]] >= lo:
            return False
    if cyclic:
        # windows wrapping past the end back to position 0
        for j in range(0, i + ell - v):
            q = pos[third[p, seq[j]]]
            if q < 0:
                continue
            a, b, c = j, q, i
            if a > b:
                a, b = b, a
            if b > c:
                b, c = c, b
            if a > b:
                a, b = b, a
            gap = b - a
            if c - b > gap:
                gap = c - b
            if v - c + a > gap:
                gap = v - c + a
            if v - gap + 1 <= ell:
                return False
    return True


@njit(cache=True)
def run(third, v, ell, cyclic, orient, count_all, nfixed, order, seq, pos, nxt, state, quota):
    """Advance the search by at most ``quota`` nodes.

    state = [depth, nodes, solutions]. Returns EXHAUSTED, FOUND or PAUSED.
    """
    i = state[0]
    done = 0
    while True:
        if done >= quota:
            state[0] = i
            state[1] += done
            return PAUSED
        advanced = False
        while nxt[i] < v:
            p = order[nxt[i]]
            nxt[i] += 1
            if pos[p] >= 0:
                continue
            if not fits(third, v, ell, cyclic, seq, pos, p, i):
                continue
            done += 1
            seq[i] = p
            pos[p] = i
            if i == v - 1:
                keep = True
                if orient:
                    if cyclic:
                        keep = seq[1] < seq[v - 1]
                    else:
                        keep = seq[0] < seq[v - 1]
                if keep:
                    if not count_all:
                        state[0] = i
                        state[1] += done
                        return FOUND
                    state[2] += 1
                seq[i] = -1
                pos[p] = -1
                continue
            i += 1
            nxt[i] = 0
            advanced = True
            break
        if not advanced:
            i -= 1
            if i < nfixed:
                state[0] = nfixed
                state[1] += done
                return EXHAUSTED
            p = seq[i]
            pos[p] = -1
            seq[i] = -1


def new_state(v, prefix):
    seq = np.full(v, -1, dtype=np.int32)
    pos = np.full(v + 1, -1, dtype=np.int32)  # pos[-1] stays -1 for third == -1
    nxt = np.zeros(v + 1, dtype=np.int32)
    for k, p in enumerate(prefix):
        seq[k] = p
        pos[p] = k
    state = np.array([len(prefix), 0, 0], dtype=np.int64)
    return seq, pos, nxt, state
