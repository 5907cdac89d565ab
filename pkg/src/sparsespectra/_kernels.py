"""Hot inner loops for the population-dynamics solver.

The cost of one sweep is dominated by segment sums: for each of the M new
population members, sum a variable-length block of values gathered from the
previous buffer.  Two interchangeable backends are provided:

* a numba ``@njit(parallel=True)`` kernel (default when numba imports), and
* a pure-numpy path built on ``np.add.reduceat``.

Set ``SPARSESPECTRA_NO_NUMBA=1`` to force the numpy path.  Both backends are
deterministic; results agree to float rounding (each new value is computed
independently, so thread count never changes results).
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("SPARSESPECTRA_NO_NUMBA", "").strip().lower()
_DISABLED = _env in {"1", "true", "yes"}

try:  # pragma: no cover - exercised via environment matrix, not branches
    if _DISABLED:
        raise ImportError("numba disabled by SPARSESPECTRA_NO_NUMBA")
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA


def _starts_from_counts(counts: np.ndarray) -> np.ndarray:
    starts = np.empty(counts.shape[0], dtype=np.int64)
    if counts.shape[0]:
        starts[0] = 0
        np.cumsum(counts[:-1], out=starts[1:])
    return starts


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _segment_sums_numpy(values, idx, counts):
    g = values[idx]
    starts = _starts_from_counts(counts)
    gg = np.append(g, np.complex128(0))
    out = np.add.reduceat(gg, np.minimum(starts, g.shape[0]))
    out = out[: counts.shape[0]]
    out[counts == 0] = 0.0 + 0.0j
    return out


def _weighted_segment_sums_numpy(values, idx, w2, counts):
    g = values[idx] * w2
    starts = _starts_from_counts(counts)
    gg = np.append(g, np.complex128(0))
    out = np.add.reduceat(gg, np.minimum(starts, g.shape[0]))
    out = out[: counts.shape[0]]
    out[counts == 0] = 0.0 + 0.0j
    return out


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _segment_sums_numba(values, idx, starts, counts):  # pragma: no cover
        m = counts.shape[0]
        out = np.empty(m, dtype=np.complex128)
        for i in prange(m):
            acc = 0.0 + 0.0j
            s = starts[i]
            for t in range(s, s + counts[i]):
                acc += values[idx[t]]
            out[i] = acc
        return out

    @njit(cache=True, parallel=True)
    def _weighted_segment_sums_numba(values, idx, w2, starts, counts):  # pragma: no cover
        m = counts.shape[0]
        out = np.empty(m, dtype=np.complex128)
        for i in prange(m):
            acc = 0.0 + 0.0j
            s = starts[i]
            for t in range(s, s + counts[i]):
                acc += w2[t] * values[idx[t]]
            out[i] = acc
        return out


def segment_sums(values: np.ndarray, idx: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """out[i] = sum of values[idx[t]] over segment i of the flat index array.

    Segment i covers idx[starts[i] : starts[i] + counts[i]] with starts the
    exclusive prefix sums of counts; sum(counts) == len(idx).
    """
    if USING_NUMBA:
        return _segment_sums_numba(values, idx, _starts_from_counts(counts), counts)
    return _segment_sums_numpy(values, idx, counts)


def weighted_segment_sums(
    values: np.ndarray, idx: np.ndarray, w2: np.ndarray, counts: np.ndarray
) -> np.ndarray:
    """Like segment_sums but each gathered value is scaled by w2[t]."""
    if USING_NUMBA:
        return _weighted_segment_sums_numba(
            values, idx, w2, _starts_from_counts(counts), counts
        )
    return _weighted_segment_sums_numpy(values, idx, w2, counts)


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"
