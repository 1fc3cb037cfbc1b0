"""Schmidt decomposition of constrained-basis amplitude vectors."""
from __future__ import annotations

import numpy as np


def region_mask(sites) -> int:
    m = 0
    for s in sites:
        m |= 1 << int(s)
    return m


def cut_mask(n_sites: int, cut: int | tuple[int, int], periodic: bool) -> int:
    """Bitmask of the left region for a cut.

    An integer ``c`` keeps sites ``[0, c)`` on the left; a pair ``(a, b)`` keeps
    ``[a, b)`` (on a ring this is the two-cut bipartition).
    """
    if isinstance(cut, (tuple, list)):
        a, b = int(cut[0]), int(cut[1])
    else:
        a, b = 0, int(cut)
    if not 0 <= a < b <= n_sites:
        raise ValueError(f"invalid cut {cut!r} for {n_sites} sites")
    if a == 0 and b == n_sites:
        raise ValueError("cut leaves an empty region")
    return region_mask(range(a, b))


def schmidt_values(states: np.ndarray, amplitudes: np.ndarray, mask: int) -> np.ndarray:
    """Singular values of the amplitude matrix reshaped over (inside mask, outside mask)."""
    states = np.asarray(states, dtype=np.int64)
    amps = np.asarray(amplitudes)
    nz = amps != 0
    left = states[nz] & mask
    right = states[nz] & ~mask
    lu, li = np.unique(left, return_inverse=True)
    ru, ri = np.unique(right, return_inverse=True)
    mat = np.zeros((lu.shape[0], ru.shape[0]), dtype=amps.dtype)
    mat[li, ri] = amps[nz]
    if mat.size == 0:
        return np.zeros(0)
    return np.linalg.svd(mat, compute_uv=False)


def entropy_from_schmidt(sv: np.ndarray) -> float:
    p = sv**2
    total = p.sum()
    if total == 0:
        return 0.0
    p = p[p > 1e-300] / total
    return float(max(0.0, -np.sum(p * np.log(p))))


def entanglement_entropy(states, amplitudes, mask: int) -> float:
    return entropy_from_schmidt(schmidt_values(states, amplitudes, mask))
