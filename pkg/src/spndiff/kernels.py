"""Hot kernels for the exhaustive 2^32 differential scan.

Two interchangeable backends produce bit-identical results:

* ``numba`` (default): @njit kernels, parallel over the input-difference axis.
* ``numpy``: pure-NumPy loop, single-threaded.

Selection: set ``SPNDIFF_BACKEND=numpy`` (or ``numba``) in the environment.
Worker count: ``jobs`` arguments, defaulting to ``SPNDIFF_JOBS`` or all cores.

The full 2^16 x 2^16 count table is never materialized; each row is a reused
2^16-counter histogram (32-bit counters, max count 65536 exceeds 16 bits).
"""

from __future__ import annotations

import os

import numpy as np

BLOCK_SIZE = 1 << 16

BACKEND_ENV = "SPNDIFF_BACKEND"
JOBS_ENV = "SPNDIFF_JOBS"

try:
    import numba
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


def backend() -> str:
    """Active backend name, honoring the SPNDIFF_BACKEND override."""
    val = os.environ.get(BACKEND_ENV, "").strip().lower()
    if val == "numpy":
        return "numpy"
    if val == "numba":
        if not _HAVE_NUMBA:
            raise RuntimeError("SPNDIFF_BACKEND=numba but numba is not importable")
        return "numba"
    if val:
        raise ValueError(f"unknown {BACKEND_ENV} value {val!r}")
    return "numba" if _HAVE_NUMBA else "numpy"


def max_jobs() -> int:
    if _HAVE_NUMBA:
        return numba.config.NUMBA_NUM_THREADS
    return 1


def effective_jobs(jobs: int | None) -> int:
    """Resolve a worker count: explicit arg, then SPNDIFF_JOBS, then all cores.

    Requests beyond the machine's thread budget are clamped.
    """
    if jobs is None:
        env = os.environ.get(JOBS_ENV)
        jobs = int(env) if env else max_jobs()
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    return min(jobs, max_jobs())


if _HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _row_maxima_nb(table, lo, hi):
        out = np.zeros(BLOCK_SIZE, np.uint32)
        for a in prange(lo, hi):
            hist = np.zeros(BLOCK_SIZE, np.uint32)
            mx = np.uint32(0)
            for x in range(BLOCK_SIZE):
                b = table[x] ^ table[x ^ a]
                h = hist[b] + np.uint32(1)
                hist[b] = h
                if h > mx:
                    mx = h
            out[a] = mx
        return out

    @njit(cache=True, parallel=True)
    def _row_sizes_at_least_nb(table, a_values, threshold):
        sizes = np.zeros(a_values.shape[0], np.int64)
        for i in prange(a_values.shape[0]):
            a = a_values[i]
            hist = np.zeros(BLOCK_SIZE, np.uint32)
            for x in range(BLOCK_SIZE):
                b = table[x] ^ table[x ^ a]
                hist[b] += np.uint32(1)
            n = 0
            for b in range(BLOCK_SIZE):
                if hist[b] >= threshold:
                    n += 1
            sizes[i] = n
        return sizes

    @njit(cache=True, parallel=True)
    def _row_fill_at_least_nb(table, a_values, threshold, offsets, out_b, out_c):
        for i in prange(a_values.shape[0]):
            a = a_values[i]
            hist = np.zeros(BLOCK_SIZE, np.uint32)
            for x in range(BLOCK_SIZE):
                b = table[x] ^ table[x ^ a]
                hist[b] += np.uint32(1)
            k = offsets[i]
            for b in range(BLOCK_SIZE):
                if hist[b] >= threshold:
                    out_b[k] = b
                    out_c[k] = hist[b]
                    k += 1

    @njit(cache=True, parallel=True)
    def _row_fill_capped_nb(table, a_values, threshold, cap, out_b, out_c, out_n):
        # single pass; valid because a row holds at most 65536/threshold hits
        for i in prange(a_values.shape[0]):
            a = a_values[i]
            hist = np.zeros(BLOCK_SIZE, np.uint32)
            for x in range(BLOCK_SIZE):
                b = table[x] ^ table[x ^ a]
                hist[b] += np.uint32(1)
            k = 0
            base = i * cap
            for b in range(BLOCK_SIZE):
                if hist[b] >= threshold:
                    out_b[base + k] = b
                    out_c[base + k] = hist[b]
                    k += 1
            out_n[i] = k


def _row_hist_np(table: np.ndarray, a: int) -> np.ndarray:
    x = np.arange(BLOCK_SIZE)
    y = table ^ table[x ^ a]
    return np.bincount(y, minlength=BLOCK_SIZE).astype(np.uint32)


def _iter_row_hists_np(table, a_values):
    """Yield (a, histogram) per row; one cache-resident pass per row."""
    x = np.arange(BLOCK_SIZE)
    for a in a_values:
        y = table ^ table[x ^ int(a)]
        yield int(a), np.bincount(y, minlength=BLOCK_SIZE)


def _row_maxima_np(table, lo, hi):
    out = np.zeros(BLOCK_SIZE, np.uint32)
    for a, hist in _iter_row_hists_np(table, range(lo, hi)):
        out[a] = hist.max()
    return out


class _NumbaThreads:
    """Scoped numba thread-count override."""

    def __init__(self, jobs: int):
        self.jobs = jobs

    def __enter__(self):
        self.saved = numba.get_num_threads()
        numba.set_num_threads(self.jobs)

    def __exit__(self, *exc):
        numba.set_num_threads(self.saved)


def row_maxima(
    table: np.ndarray,
    lo: int = 1,
    hi: int = BLOCK_SIZE,
    jobs: int | None = None,
) -> np.ndarray:
    """Per-input-difference maxima: out[a] = max_b #{x : t[x]^t[x^a] = b}.

    Rows outside [lo, hi) are left at 0. Output is identical for any worker
    count (each row is written independently).
    """
    table = np.ascontiguousarray(table, dtype=np.uint16)
    if backend() == "numpy":
        return _row_maxima_np(table, lo, hi)
    with _NumbaThreads(effective_jobs(jobs)):
        return _row_maxima_nb(table, lo, hi)


def rows_pairs_at_least(
    table: np.ndarray,
    a_values: np.ndarray,
    threshold: int,
    jobs: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All (a, b, count) with count >= threshold for the given rows.

    ``a_values`` must be sorted ascending; output is lexicographic in (a, b)
    and independent of the worker count.
    """
    table = np.ascontiguousarray(table, dtype=np.uint16)
    a_values = np.asarray(a_values, dtype=np.int64)
    if backend() == "numpy":
        a_out, b_out, c_out = [], [], []
        for a, hist in _iter_row_hists_np(table, a_values):
            bs = np.nonzero(hist >= threshold)[0]
            a_out.extend([a] * len(bs))
            b_out.extend(bs.tolist())
            c_out.extend(hist[bs].tolist())
        return (
            np.array(a_out, np.int64),
            np.array(b_out, np.int64),
            np.array(c_out, np.int64),
        )
    jobs_n = effective_jobs(jobs)
    cap = BLOCK_SIZE // max(threshold, 1)
    if len(a_values) * cap <= (1 << 22):
        # one scan per row into preallocated per-row slots, then compact
        out_b = np.zeros(len(a_values) * cap, np.int64)
        out_c = np.zeros(len(a_values) * cap, np.int64)
        sizes = np.zeros(len(a_values), np.int64)
        with _NumbaThreads(jobs_n):
            _row_fill_capped_nb(
                table, a_values, np.uint32(threshold), cap, out_b, out_c, sizes
            )
        mask = np.arange(cap)[None, :] < sizes[:, None]
        keep = np.nonzero(mask.ravel())[0]
        out_a = np.repeat(a_values, sizes)
        return out_a, out_b[keep], out_c[keep]
    with _NumbaThreads(jobs_n):
        sizes = _row_sizes_at_least_nb(table, a_values, np.uint32(threshold))
        offsets = np.zeros(len(a_values) + 1, np.int64)
        np.cumsum(sizes, out=offsets[1:])
        out_b = np.zeros(int(offsets[-1]), np.int64)
        out_c = np.zeros(int(offsets[-1]), np.int64)
        _row_fill_at_least_nb(
            table, a_values, np.uint32(threshold), offsets[:-1], out_b, out_c
        )
    out_a = np.repeat(a_values, sizes)
    return out_a, out_b, out_c


def histogram_row(table: np.ndarray, a: int) -> np.ndarray:
    """Full output-difference histogram for one input difference."""
    table = np.ascontiguousarray(table, dtype=np.uint16)
    return _row_hist_np(table, a)


def count_pair(table: np.ndarray, a: int, b: int) -> int:
    """#{x : t[x] ^ t[x^a] = b} for a single pair."""
    table = np.ascontiguousarray(table, dtype=np.uint16)
    x = np.arange(BLOCK_SIZE)
    return int(np.count_nonzero((table ^ table[x ^ a]) == b))
