"""Level-stepping kernel selection.

The compiled extension is used when it imported and every integer fits in
int64 with headroom; otherwise the pure-Python kernel runs on Python ints.
Set ``FLATSKEW_PURE=1`` to force the fallback.
"""

import os

import numpy as np

from . import _pykernel
from ._pykernel import HIT_ENDPOINT, HIT_SINGULAR, OK  # noqa: F401

try:
    if os.environ.get("FLATSKEW_PURE"):
        raise ImportError("forced pure-Python kernel")
    from ._kernel import run_levels_arrays as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

_LIMIT = 2 ** 60
_CHUNK = 1 << 20


def compiled_available():
    return _compiled is not None


class LevelTable:
    """Scaled level-sum step functions for one common denominator ``L``."""

    def __init__(self, L, P, nxt0, nxt1, breaks, vals, dim, endpoints, singular):
        self.L, self.P = L, P
        self.nxt0, self.nxt1 = nxt0, nxt1
        self.breaks, self.vals, self.dim = breaks, vals, dim
        self.endpoints = endpoints  # set of (s, X)
        self.singular = singular
        self._arrays = None
        biggest = max([abs(v) for row in vals for vec in row for v in vec] + [0])
        self.fits = (4 * L + 2 * abs(P) < _LIMIT and biggest < 2 ** 40)

    def arrays(self):
        if self._arrays is None:
            k = len(self.breaks)
            boff = np.zeros(k + 1, dtype=np.int64)
            eoff = np.zeros(k + 1, dtype=np.int64)
            ends_by_sq = [sorted(X for s2, X in self.endpoints if s2 == s) for s in range(k)]
            for s in range(k):
                boff[s + 1] = boff[s] + len(self.breaks[s])
                eoff[s + 1] = eoff[s] + len(ends_by_sq[s])
            breaks = np.array([b for br in self.breaks for b in br], dtype=np.int64)
            vals = np.array([vec for row in self.vals for vec in row],
                            dtype=np.int64).reshape(-1, self.dim)
            ends = np.array([e for es in ends_by_sq for e in es], dtype=np.int64)
            self._arrays = (
                np.asarray(self.nxt0, dtype=np.int32), np.asarray(self.nxt1, dtype=np.int32),
                breaks, boff, vals, ends, eoff, np.asarray(self.singular, dtype=np.uint8))
        return self._arrays


def run_levels(table: LevelTable, n, s, X, *, force_python=False):
    """Advance ``n`` full levels; see ``_pykernel.run_levels`` for the result."""
    if _compiled is None or force_python or not table.fits or table.dim == 0:
        return _pykernel.run_levels(n, s, X, table.P, table.L, table.nxt0, table.nxt1,
                                    table.breaks, table.vals, table.dim, table.endpoints,
                                    table.singular)
    nxt0, nxt1, breaks, boff, vals, ends, eoff, sing = table.arrays()
    total = [0] * table.dim
    done_total = 0
    while True:
        # chunked so int64 accumulators cannot overflow
        chunk = min(n - done_total, _CHUNK)
        acc, s, X, status, done = _compiled(chunk, s, X, table.P, table.L, nxt0, nxt1,
                                            breaks, boff, vals, ends, eoff, sing)
        total = [a + int(b) for a, b in zip(total, acc)]
        s, X, done_total = int(s), int(X), done_total + int(done)
        if status != OK or done_total >= n:
            return total, s, X, int(status), done_total
