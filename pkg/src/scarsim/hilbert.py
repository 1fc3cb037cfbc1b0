"""Blockade-constrained Hilbert spaces: enumeration, exact counting, growth rate.

Bit ``j`` of a configuration is site ``j`` (site 0 leftmost); a set bit is an
up (Rydberg-excited) spin.  Two up spins must be more than ``alpha`` sites
apart, with the circular distance used on a ring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

MAX_SITES = 62


class Boundary(str, Enum):
    PERIODIC = "periodic"
    OPEN = "open"

    @classmethod
    def parse(cls, value) -> "Boundary":
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        aliases = {"pbc": cls.PERIODIC, "periodic": cls.PERIODIC, "obc": cls.OPEN, "open": cls.OPEN}
        if key not in aliases:
            raise ValueError(f"unknown boundary {value!r}")
        return aliases[key]


@dataclass(frozen=True)
class BlockadeConstraint:
    alpha: int
    n_sites: int
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary.parse(self.boundary))
        if int(self.alpha) != self.alpha or self.alpha < 0:
            raise ValueError(f"alpha must be a non-negative integer, got {self.alpha}")
        if int(self.n_sites) != self.n_sites or self.n_sites < 1:
            raise ValueError(f"n_sites must be a positive integer, got {self.n_sites}")
        if self.periodic and self.n_sites <= self.alpha:
            # the dressed flip would wrap onto the flipped site itself
            raise ValueError(
                f"periodic chain needs n_sites > alpha (got N={self.n_sites}, alpha={self.alpha})"
            )

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    def neighbour_masks(self) -> np.ndarray:
        """Bitmask of the sites within blockade distance of each site."""
        n, a = self.n_sites, self.alpha
        masks = np.zeros(n, dtype=np.int64)
        for j in range(n):
            m = 0
            for d in range(1, a + 1):
                for k in (j - d, j + d):
                    if self.periodic:
                        m |= 1 << (k % n)
                    elif 0 <= k < n:
                        m |= 1 << k
            masks[j] = m & ~(1 << j)
        return masks

    def is_legal(self, bits) -> np.ndarray | bool:
        """Vectorised blockade test on one or many bitmasks."""
        x = np.asarray(bits, dtype=np.int64)
        n = self.n_sites
        full = (1 << n) - 1
        ok = np.ones(x.shape, dtype=bool)
        for d in range(1, min(self.alpha, n - 1) + 1):
            if self.periodic:
                shifted = ((x << d) | (x >> (n - d))) & full
            else:
                shifted = (x << d) & full
            ok &= (x & shifted) == 0
        return ok if ok.ndim else bool(ok)


@dataclass(frozen=True)
class ConstrainedBasis:
    constraint: BlockadeConstraint
    states: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.states.setflags(write=False)

    @property
    def alpha(self) -> int:
        return self.constraint.alpha

    @property
    def n_sites(self) -> int:
        return self.constraint.n_sites

    @property
    def periodic(self) -> bool:
        return self.constraint.periodic

    @property
    def dim(self) -> int:
        return int(self.states.shape[0])

    def __len__(self) -> int:
        return self.dim

    def index(self, bits) -> np.ndarray | int:
        """Ordinal of each bitmask; -1 where it is not a basis state."""
        b = np.asarray(bits, dtype=np.int64)
        k = np.searchsorted(self.states, b)
        kc = np.minimum(k, self.dim - 1)
        out = np.where(self.states[kc] == b, kc, -1)
        return out if out.ndim else int(out)

    def occupation_strings(self) -> list[str]:
        n = self.n_sites
        return ["".join("1" if (int(s) >> j) & 1 else "0" for j in range(n)) for s in self.states]

    def occupations(self) -> np.ndarray:
        """``(dim, n_sites)`` 0/1 matrix of site occupations."""
        return ((self.states[:, None] >> np.arange(self.n_sites)) & 1).astype(np.int8)


def _open_chain_states(alpha: int, n_sites: int) -> np.ndarray:
    # grow at the high end; appending the new top bit keeps the array sorted
    states = np.zeros(1, dtype=np.int64)
    for n in range(n_sites):
        low = max(0, n - alpha)
        window = ((1 << n) - 1) ^ ((1 << low) - 1)
        free = states[(states & window) == 0]
        states = np.concatenate([states, free | (np.int64(1) << n)])
    return states


def enumerate_basis(constraint: BlockadeConstraint) -> ConstrainedBasis:
    """All blockade-legal configurations in ascending bitmask order."""
    if constraint.n_sites > MAX_SITES:
        raise ValueError(f"n_sites={constraint.n_sites} exceeds the {MAX_SITES}-bit state width")
    states = _open_chain_states(constraint.alpha, constraint.n_sites)
    if constraint.periodic:
        states = states[constraint.is_legal(states)]
    return ConstrainedBasis(constraint, np.ascontiguousarray(states))


def transfer_matrix(alpha: int) -> list[list[int]]:
    """Companion-form counting matrix, exact Python integers."""
    size = alpha + 1
    t = [[0] * size for _ in range(size)]
    t[0][0] += 1
    if size > 1:
        t[0][1] += 1
        for i in range(1, size - 1):
            t[i][i + 1] = 1
    t[size - 1][0] += 1
    return t


def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def _matpow(t, e):
    n = len(t)
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base = t
    while e:
        if e & 1:
            result = _matmul(result, base)
        base = _matmul(base, base)
        e >>= 1
    return result


def count_dimension(constraint: BlockadeConstraint) -> int:
    """Hilbert-space dimension from powers of the transfer matrix.

    Uses arbitrary-precision integers, so no overflow is possible.
    """
    tn = _matpow(transfer_matrix(constraint.alpha), constraint.n_sites)
    if constraint.periodic:
        return sum(tn[j][j] for j in range(len(tn)))
    return sum(row[0] for row in tn)


def quantum_dimension(alpha: int) -> float:
    """Largest real root of ``x**(alpha+1) = x**alpha + 1``."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if alpha == 0:
        return 2.0
    f = lambda x: x ** (alpha + 1) - x**alpha - 1.0
    return brentq(f, 1.0, 2.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
