"""Numba-accelerated compute kernels.

Mirrors ``_kernels_numpy`` function-for-function; the hot loops (Lie-closure
commutator sweep, per-segment eigendecomposition evolution, RK4 relaxation)
are compiled with ``@njit(cache=True)``.  Importing this module raises
``ImportError`` when numba is unavailable, which :mod:`qdctl.backend` treats
as a signal to fall back to the numpy kernels.
"""
from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_SQRT2 = np.sqrt(2.0)


@njit(cache=True)
def _vec_skew_into(a, d, out):
    m = (d * (d - 1)) // 2
    for i in range(d):
        out[i] = a[i, i].imag
    idx = 0
    for r in range(d):
        for c in range(r + 1, d):
            z = a[r, c]
            out[d + idx] = _SQRT2 * z.real
            out[d + m + idx] = _SQRT2 * z.imag
            idx += 1


@njit(cache=True)
def _mat_from_vec_impl(v, d):
    m = (d * (d - 1)) // 2
    out = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        out[i, i] = 1j * v[i]
    idx = 0
    for r in range(d):
        for c in range(r + 1, d):
            re = v[d + idx] / _SQRT2
            im = v[d + m + idx] / _SQRT2
            out[r, c] = complex(re, im)
            out[c, r] = complex(-re, im)
            idx += 1
    return out


def vec_skew(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape[0] * a.shape[0], dtype=np.float64)
    _vec_skew_into(np.ascontiguousarray(a), a.shape[0], out)
    return out


def mat_from_vec(v: np.ndarray, d: int) -> np.ndarray:
    return _mat_from_vec_impl(np.ascontiguousarray(v), d)


@njit(cache=True)
def _try_admit(bm, bv, n, cand, d, tol, scratch):
    _vec_skew_into(cand, d, scratch)
    v = scratch
    nrm0 = np.sqrt(np.dot(v, v))
    if nrm0 <= 0.0:
        return n
    if n > 0:
        v = v - np.dot(np.dot(bv[:n], v), bv[:n])
        v = v - np.dot(np.dot(bv[:n], v), bv[:n])
    r = np.sqrt(np.dot(v, v))
    if r > tol * nrm0:
        v = v / r
        bv[n] = v
        bm[n] = _mat_from_vec_impl(v, d)
        return n + 1
    return n


@njit(cache=True)
def close_algebra_loop(gens, tol):
    m = gens.shape[0]
    d = gens.shape[1]
    dd = d * d
    max_dim = dd - 1
    bm = np.zeros((max_dim, d, d), dtype=np.complex128)
    bv = np.zeros((max_dim, dd), dtype=np.float64)
    scratch = np.empty(dd, dtype=np.float64)
    n = 0
    for t in range(m):
        n = _try_admit(bm, bv, n, gens[t], d, tol, scratch)
    rounds = 0
    new_lo, new_hi = 0, n
    while new_lo < new_hi and n < max_dim:
        rounds += 1
        for i in range(new_lo, new_hi):
            for j in range(new_hi):
                if i == j:
                    continue
                cand = np.dot(bm[i], bm[j]) - np.dot(bm[j], bm[i])
                n = _try_admit(bm, bv, n, cand, d, tol, scratch)
                if n == max_dim:
                    return n, rounds, bv[:n].copy()
        new_lo, new_hi = new_hi, n
    return n, rounds, bv[:n].copy()


@njit(cache=True)
def _overlap(a, b):
    acc = 0.0 + 0.0j
    for i in range(a.shape[0]):
        acc += np.conj(a[i]) * b[i]
    return acc


@njit(cache=True)
def _apply_segment(h0, hi, amp, dt, hbar, psi, back):
    w, vv = np.linalg.eigh(h0 + amp * hi)
    sign = 1.0 if back else -1.0
    phase = np.exp(sign * 1j * w * (dt / hbar))
    return np.dot(vv, phase * np.dot(np.conj(vv.T), psi))


@njit(cache=True)
def evolve_schedule(h0, hi, amps, dts, psi0, hbar):
    psi = psi0.copy()
    for k in range(amps.shape[0]):
        psi = _apply_segment(h0, hi, amps[k], dts[k], hbar, psi, False)
    return psi


@njit(cache=True)
def schedule_fidelity(h0, hi, amps, dts, psi0, target, hbar):
    ov = _overlap(target, evolve_schedule(h0, hi, amps, dts, psi0, hbar))
    return ov.real * ov.real + ov.imag * ov.imag


@njit(cache=True)
def fd_gradient(h0, hi, amps, dts, psi0, target, hbar, delta):
    nseg = amps.shape[0]
    d = psi0.shape[0]
    fwd = np.empty((nseg + 1, d), dtype=np.complex128)
    fwd[0] = psi0
    for k in range(nseg):
        fwd[k + 1] = _apply_segment(h0, hi, amps[k], dts[k], hbar, fwd[k], False)
    bwd = np.empty((nseg + 1, d), dtype=np.complex128)
    bwd[nseg] = target
    for k in range(nseg - 1, -1, -1):
        bwd[k] = _apply_segment(h0, hi, amps[k], dts[k], hbar, bwd[k + 1], True)
    ov = _overlap(target, fwd[nseg])
    fid = ov.real * ov.real + ov.imag * ov.imag
    grad = np.empty(nseg, dtype=np.float64)
    for k in range(nseg):
        op = _overlap(bwd[k + 1], _apply_segment(h0, hi, amps[k] + delta, dts[k], hbar, fwd[k], False))
        om = _overlap(bwd[k + 1], _apply_segment(h0, hi, amps[k] - delta, dts[k], hbar, fwd[k], False))
        fp = op.real * op.real + op.imag * op.imag
        fm = om.real * om.real + om.imag * om.imag
        grad[k] = (fp - fm) / (2.0 * delta)
    return fid, grad


@njit(cache=True)
def _relax_rhs(energies, he, tau, hbar, s, c):
    ph = np.exp((1j * s / hbar) * energies)
    u = np.dot(he, np.conj(ph) * c)
    return (-1j / hbar) * np.exp(-s / tau) * (ph * u)


@njit(cache=True)
def relax_state(energies, he, tau, hbar, n_steps, h, psi0):
    c = psi0.copy()
    for i in range(n_steps):
        s = i * h
        k1 = _relax_rhs(energies, he, tau, hbar, s, c)
        k2 = _relax_rhs(energies, he, tau, hbar, s + 0.5 * h, c + (0.5 * h) * k1)
        k3 = _relax_rhs(energies, he, tau, hbar, s + 0.5 * h, c + (0.5 * h) * k2)
        k4 = _relax_rhs(energies, he, tau, hbar, s + h, c + h * k3)
        c = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return c
