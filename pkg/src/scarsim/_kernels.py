"""Hot inner loops, each with a numba kernel and a pure-numpy twin.

The numba path is used when numba imports and ``SCARSIM_NO_NUMBA`` is not
set to a truthy value.  Both paths return identical arrays (same order,
same values), which the test-suite checks directly.
"""
from __future__ import annotations

import contextlib
import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # avoids the TBB version warning on systems with an old TBB
        numba.config.THREADING_LAYER = "workqueue"
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

    prange = range


def _env_disabled() -> bool:
    return os.environ.get("SCARSIM_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


_USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def backend() -> str:
    return "numba" if _USE_NUMBA else "numpy"


@contextlib.contextmanager
def force_backend(name: str):
    """Temporarily select ``"numba"`` or ``"numpy"`` kernels."""
    global _USE_NUMBA
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    old = _USE_NUMBA
    _USE_NUMBA = name == "numba"
    try:
        yield
    finally:
        _USE_NUMBA = old


def set_threads(n: int | None = None) -> None:
    """Cap numba worker threads; ``None`` reads ``SCARSIM_THREADS``."""
    if n is None:
        env = os.environ.get("SCARSIM_THREADS", "").strip()
        n = int(env) if env.isdigit() else None
    if HAVE_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# single spin flips dressed by neighbour projectors


@njit(cache=True, parallel=True)
def _flip_pairs_nb(states, masks):
    n_states = states.shape[0]
    n_sites = masks.shape[0]
    # one slot per (source, site); -1 marks a forbidden flip
    slot = np.full(n_states * n_sites, -1, dtype=np.int64)
    for i in prange(n_states):
        s = states[i]
        for j in range(n_sites):
            if s & masks[j]:
                continue
            t = s ^ (np.int64(1) << j)
            k = np.searchsorted(states, t)
            if k < n_states and states[k] == t:
                slot[i * n_sites + j] = k
    count = 0
    for m in range(slot.shape[0]):
        if slot[m] >= 0:
            count += 1
    rows = np.empty(count, dtype=np.int64)
    cols = np.empty(count, dtype=np.int64)
    c = 0
    for m in range(slot.shape[0]):
        if slot[m] >= 0:
            rows[c] = slot[m]
            cols[c] = m // n_sites
            c += 1
    return rows, cols


def _flip_pairs_np(states, masks):
    n_states = states.shape[0]
    src = np.arange(n_states, dtype=np.int64)
    rows, cols = [], []
    for j in range(masks.shape[0]):
        ok = (states & masks[j]) == 0
        t = states[ok] ^ (np.int64(1) << j)
        k = np.searchsorted(states, t)
        k_c = np.minimum(k, n_states - 1)
        hit = (k < n_states) & (states[k_c] == t)
        rows.append(k_c[hit])
        cols.append(src[ok][hit])
    rows = np.concatenate(rows) if rows else np.empty(0, np.int64)
    cols = np.concatenate(cols) if cols else np.empty(0, np.int64)
    # numba emits pairs ordered by (source, site); match it
    order = np.lexsort((_site_of(states, rows, cols), cols))
    return rows[order], cols[order]


def _site_of(states, rows, cols):
    diff = states[rows] ^ states[cols]
    return np.log2(diff.astype(np.float64)).astype(np.int64)


def flip_pairs(states: np.ndarray, masks: np.ndarray):
    """Return ``(target, source)`` index pairs for every allowed single flip.

    A flip of site ``j`` in state ``s`` is allowed when ``s & masks[j] == 0``
    and the flipped configuration is present in the sorted ``states`` array.
    """
    states = np.ascontiguousarray(states, dtype=np.int64)
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    if _USE_NUMBA:
        return _flip_pairs_nb(states, masks)
    return _flip_pairs_np(states, masks)


# ---------------------------------------------------------------------------
# translation orbits


@njit(cache=True)
def _orbits_nb(states, n_sites):
    n = states.shape[0]
    full = (np.int64(1) << n_sites) - 1
    reps = np.empty(n, dtype=np.int64)
    to_rep = np.empty(n, dtype=np.int64)
    period = np.empty(n, dtype=np.int64)
    for i in range(n):
        s = states[i]
        best = s
        best_l = 0
        per = n_sites
        r = s
        for l in range(1, n_sites):
            r = ((r << 1) | (r >> (n_sites - 1))) & full
            if r == s and per == n_sites:
                per = l
            if r < best:
                best = r
                best_l = l
        reps[i] = best
        to_rep[i] = best_l
        period[i] = per
    return reps, to_rep, period


def _orbits_np(states, n_sites):
    full = (1 << n_sites) - 1
    reps = states.copy()
    to_rep = np.zeros_like(states)
    period = np.full_like(states, n_sites)
    r = states.copy()
    for l in range(1, n_sites):
        r = ((r << 1) | (r >> (n_sites - 1))) & full
        first = (r == states) & (period == n_sites)
        period[first] = l
        better = r < reps
        reps[better] = r[better]
        to_rep[better] = l
    return reps, to_rep, period


def translation_orbits(states: np.ndarray, n_sites: int):
    """Minimal rotation, the rotation count reaching it, and the orbit period.

    One translation moves the content of site ``j`` to site ``j+1``.
    """
    states = np.ascontiguousarray(states, dtype=np.int64)
    if _USE_NUMBA:
        return _orbits_nb(states, n_sites)
    return _orbits_np(states, n_sites)


# ---------------------------------------------------------------------------
# sparse matrix-vector product (fixed per-row reduction order)


@njit(cache=True, parallel=True)
def _csr_matvec_nb(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    y = np.zeros(n, dtype=np.complex128)
    for i in prange(n):
        acc = 0j
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        y[i] = acc
    return y


def csr_matvec(mat, x: np.ndarray) -> np.ndarray:
    """``mat @ x`` for a scipy CSR matrix, complex output."""
    if _USE_NUMBA:
        return _csr_matvec_nb(
            mat.indptr.astype(np.int64, copy=False),
            mat.indices.astype(np.int64, copy=False),
            mat.data.astype(np.complex128, copy=False),
            np.ascontiguousarray(x, dtype=np.complex128),
        )
    return np.asarray(mat @ np.asarray(x, dtype=np.complex128))


# ---------------------------------------------------------------------------
# bond-dimension alpha+1 MPS amplitudes


@njit(cache=True)
def _mps_amps_nb(states, up_amp, down_amp, alpha, periodic):
    n = states.shape[0]
    n_sites = up_amp.shape[0]
    full = (np.int64(1) << n_sites) - 1
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        s = states[i]
        blocked = np.int64(0)
        for d in range(1, alpha + 1):
            if periodic:
                blocked |= ((s << d) | (s >> (n_sites - d))) & full
            else:
                blocked |= (s << d) & full
        amp = 1.0 + 0j
        for j in range(n_sites):
            if (s >> j) & 1:
                amp *= up_amp[j]
            elif not ((blocked >> j) & 1):
                amp *= down_amp[j]
        out[i] = amp
    return out


def _mps_amps_np(states, up_amp, down_amp, alpha, periodic):
    n_sites = up_amp.shape[0]
    full = (1 << n_sites) - 1
    blocked = np.zeros_like(states)
    for d in range(1, alpha + 1):
        if periodic:
            blocked |= ((states << d) | (states >> (n_sites - d))) & full
        else:
            blocked |= (states << d) & full
    out = np.ones(states.shape[0], dtype=np.complex128)
    for j in range(n_sites):
        up = ((states >> j) & 1).astype(bool)
        free = ~up & (((blocked >> j) & 1) == 0)
        out[up] *= up_amp[j]
        out[free] *= down_amp[j]
    return out


def mps_amplitudes(states, up_amp, down_amp, alpha: int, periodic: bool) -> np.ndarray:
    """Contract the companion-form MPS on every configuration in ``states``.

    Each up site contributes ``up_amp[j]``; a down site within ``alpha`` sites to
    the right of an up site contributes 1; any other down site contributes
    ``down_amp[j]``.
    """
    states = np.ascontiguousarray(states, dtype=np.int64)
    up_amp = np.ascontiguousarray(up_amp, dtype=np.complex128)
    down_amp = np.ascontiguousarray(down_amp, dtype=np.complex128)
    if _USE_NUMBA:
        return _mps_amps_nb(states, up_amp, down_amp, int(alpha), bool(periodic))
    return _mps_amps_np(states, up_amp, down_amp, int(alpha), bool(periodic))
