"""Pure-Python level-stepping kernel (fallback for the compiled one)."""

from bisect import bisect_right

OK, HIT_SINGULAR, HIT_ENDPOINT = 0, 1, 2


def run_levels(n, s, X, P, L, nxt0, nxt1, breaks, vals, dim, endpoints, singular):
    """Advance ``n`` full levels from bottom point (s, X/L).

    ``breaks[s]`` holds sorted doubled keys and ``vals[s]`` the level-sum
    vector in force from each key on; ``2*X`` is the lookup key of X.
    Returns ``(acc, s, X, status, levels_done)``; on a hit, ``levels_done``
    counts levels whose crossings were accumulated.
    """
    acc = [0] * dim
    m0 = P // L
    for i in range(n):
        if endpoints and (s, X) in endpoints:
            return acc, s, X, HIT_ENDPOINT, i
        br = breaks[s]
        if br:
            j = bisect_right(br, 2 * X) - 1
            if j >= 0:
                row = vals[s][j]
                for c in range(dim):
                    acc[c] += row[c]
        Y = X + P
        m = Y // L
        X = Y - m * L
        s = nxt0[s] if m == m0 else nxt1[s]
        if X == 0 and singular[s]:
            return acc, s, X, HIT_SINGULAR, i + 1
    return acc, s, X, OK, n
