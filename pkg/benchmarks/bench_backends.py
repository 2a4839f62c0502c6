#!/usr/bin/env python3
"""Timing comparison of the pure-numpy and numba kernel implementations.

Runs the three hot loops — Lie-algebra closure, finite-difference schedule
gradients, and the RK4 relaxation integrator — through both kernel modules
on identical inputs and prints a table of best-of-``--repeats`` wall times.

Example:
    python3 benchmarks/bench_backends.py --levels 3 4 --repeats 5
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

import qdctl as q
from qdctl import _kernels_numpy
from qdctl.hamiltonians import build_h0, build_hi, traceless_part
from qdctl.hilbert import degeneracy, flat_index


def _generators(spec):
    gens = np.stack(
        [1j * traceless_part(build_h0(spec)).entries, 1j * build_hi(spec).entries]
    )
    for i in range(gens.shape[0]):
        gens[i] /= np.linalg.norm(gens[i])
    return np.ascontiguousarray(gens)


def _closure_case(N):
    gens = _generators(q.demo_spec(N))
    return (f"closure N={N}", lambda mod: mod.close_algebra_loop(gens.copy(), 1e-9))


def _gradient_case(N, segments):
    spec = q.demo_spec(N)
    h0 = np.ascontiguousarray(build_h0(spec).entries)
    hi = np.ascontiguousarray(build_hi(spec).entries)
    duration = 50.0 * q.HBAR_EV_S / q.energy_gaps(spec)[0]
    dts = np.full(segments, duration / segments)
    rng = np.random.default_rng(1)
    amps = rng.uniform(-0.1, 0.1, segments)
    psi0 = np.zeros(spec.dim, dtype=np.complex128)
    psi0[0] = 1.0
    targ = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
    targ /= np.linalg.norm(targ)
    return (
        f"fd_gradient N={N} ({segments} segments)",
        lambda mod: mod.fd_gradient(h0, hi, amps, dts, psi0, targ, q.HBAR_EV_S, 1e-6),
    )


def _rk4_case(steps):
    spec = q.SystemSpec(
        N=2,
        energies=[0.0, 1.0],
        excitation_inter={(1, 1, 1): 6.24e-4, (1, 1, 2): 6.24e-4},
        excitation_intra={2: 6.24e-4},
    )
    tau = 1e-12
    he = np.ascontiguousarray(q.build_he(spec).entries)
    energies = np.empty(spec.dim)
    for n in range(1, spec.N + 1):
        for k in range(1, degeneracy(n) + 1):
            energies[flat_index((n, k), spec.N)] = spec.energies[n - 1]
    h = tau * math.log(2.0) / steps
    psi0 = np.array([1.0 / np.sqrt(2.0), 0.5, 0.5], dtype=np.complex128)
    return (
        f"relax RK4 ({steps} steps)",
        lambda mod: mod.relax_state(energies, he, tau, q.HBAR_EV_S, steps, h, psi0),
    )


def _best_time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--levels", type=int, nargs="+", default=[3, 4],
                        help="ladder sizes for the closure benchmark")
    parser.add_argument("--segments", type=int, default=40,
                        help="schedule segments for the gradient benchmark")
    parser.add_argument("--steps", type=int, default=20000,
                        help="RK4 steps for the relaxation benchmark")
    parser.add_argument("--repeats", type=int, default=5,
                        help="repetitions per case (best time wins)")
    args = parser.parse_args(argv)

    try:
        from qdctl import _kernels_numba
    except ImportError:
        _kernels_numba = None
        print("numba unavailable; showing numpy timings only\n")

    cases = [_closure_case(N) for N in args.levels]
    cases.append(_gradient_case(max(args.levels), args.segments))
    cases.append(_rk4_case(args.steps))

    if _kernels_numba is not None:
        print("compiling numba kernels (excluded from timings)...")
        for _, fn in cases:
            fn(_kernels_numba)

    header = f"{'case':<34} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, fn in cases:
        t_np = _best_time(lambda: fn(_kernels_numpy), args.repeats)
        if _kernels_numba is not None:
            t_nb = _best_time(lambda: fn(_kernels_numba), args.repeats)
            print(
                f"{label:<34} {t_np * 1e3:>12.3f} {t_nb * 1e3:>12.3f} "
                f"{t_np / t_nb:>8.1f}x"
            )
        else:
            print(f"{label:<34} {t_np * 1e3:>12.3f} {'-':>12} {'-':>9}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
