"""Wall-clock comparison of the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--alpha 1] [--sites 24] [--repeat 5]

Prints one line per kernel with the best time of each backend and the speed-up.
The first numba call (compilation) is excluded.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from scarsim import _kernels
from scarsim.hilbert import BlockadeConstraint, enumerate_basis
from scarsim.operators import build_hamiltonian


def best_of(fn, repeat):
    fn()  # warm-up / JIT compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=int, default=1)
    ap.add_argument("--sites", type=int, default=24)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    constraint = BlockadeConstraint(args.alpha, args.sites)
    basis = enumerate_basis(constraint)
    masks = constraint.neighbour_masks()
    h = build_hamiltonian(basis)
    x = np.random.default_rng(0).standard_normal(basis.dim) + 0j
    up = np.full(args.sites, 0.6 + 0.2j)
    down = np.full(args.sites, 0.8 + 0.0j)

    cases = {
        "flip_pairs": lambda: _kernels.flip_pairs(basis.states, masks),
        "translation_orbits": lambda: _kernels.translation_orbits(basis.states, args.sites),
        "csr_matvec": lambda: _kernels.csr_matvec(h, x),
        "mps_amplitudes": lambda: _kernels.mps_amplitudes(basis.states, up, down, args.alpha, True),
    }
    print(f"alpha={args.alpha} N={args.sites} dim={basis.dim}")
    print(f"{'kernel':<20}{'numpy [s]':>12}{'numba [s]':>12}{'speed-up':>10}")
    for name, fn in cases.items():
        with _kernels.force_backend("numpy"):
            t_np = best_of(fn, args.repeat)
        if _kernels.HAVE_NUMBA:
            with _kernels.force_backend("numba"):
                t_nb = best_of(fn, args.repeat)
            print(f"{name:<20}{t_np:>12.4g}{t_nb:>12.4g}{t_np / t_nb:>10.1f}")
        else:
            print(f"{name:<20}{t_np:>12.4g}{'n/a':>12}{'':>10}")


if __name__ == "__main__":
    main()
