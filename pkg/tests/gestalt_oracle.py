"""Brute-force reference for the gestalt matcher.

Exhaustively scans every (i, j) start pair for the longest common contiguous
block, preferring longer, then lower a-start, then lower b-start, and recurses
on both flanks.  Deliberately independent of the library implementation.
"""

from __future__ import annotations


def brute_longest_block(a, b, alo, ahi, blo, bhi):
    best = None  # (length, a_start, b_start)
    for i in range(alo, ahi):
        for j in range(blo, bhi):
            k = 0
            while i + k < ahi and j + k < bhi and a[i + k] == b[j + k]:
                k += 1
            if k and (best is None or (k, -i, -j) > (best[0], -best[1], -best[2])):
                best = (k, i, j)
    return best


def brute_blocks(a, b):
    out = []

    def recurse(alo, ahi, blo, bhi):
        best = brute_longest_block(a, b, alo, ahi, blo, bhi)
        if best is None:
            return
        length, i, j = best
        recurse(alo, i, blo, j)
        out.append((i, j, length))
        recurse(i + length, ahi, j + length, bhi)

    recurse(0, len(a), 0, len(b))
    return out


def brute_ratio(a, b):
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    matched = sum(length for (_, _, length) in brute_blocks(a, b))
    return 2.0 * matched / total
