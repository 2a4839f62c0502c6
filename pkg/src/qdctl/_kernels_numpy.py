"""Pure-numpy compute kernels (fallback backend).

`_kernels_numba` mirrors every function here one-for-one with ``@njit``
compilation; both modules expose the same array-in/array-out signatures so
:mod:`qdctl.backend` can swap them freely.  Skew-Hermitian matrices are encoded
as real vectors of length d**2 — (imaginary diagonal, sqrt(2) * real upper
triangle, sqrt(2) * imag upper triangle) — which preserves the Frobenius inner
product and lets the closure loop run on real BLAS operations.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

_SQRT2 = np.sqrt(2.0)


def vec_skew(a: np.ndarray) -> np.ndarray:
    """Real coordinate vector of a skew-Hermitian matrix (isometric)."""
    d = a.shape[0]
    r, c = np.triu_indices(d, 1)
    upper = a[r, c]
    return np.concatenate((a.diagonal().imag, _SQRT2 * upper.real, _SQRT2 * upper.imag))


def mat_from_vec(v: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`vec_skew`."""
    m = (d * (d - 1)) // 2
    out = np.zeros((d, d), dtype=np.complex128)
    out[np.arange(d), np.arange(d)] = 1j * v[:d]
    upper = (v[d : d + m] + 1j * v[d + m :]) / _SQRT2
    r, c = np.triu_indices(d, 1)
    out[r, c] = upper
    out[c, r] = -np.conj(upper)
    return out


def _try_admit(bm, bv, n, cand, d, tol):
    """Orthogonalize ``cand`` against the basis; admit the residual if it is
    numerically independent.  Returns the new basis size."""
    v = vec_skew(cand)
    nrm0 = np.linalg.norm(v)
    if nrm0 <= 0.0:
        return n
    if n > 0:
        v = v - (bv[:n] @ v) @ bv[:n]
        v = v - (bv[:n] @ v) @ bv[:n]
    r = np.linalg.norm(v)
    if r > tol * nrm0:
        v = v / r
        bv[n] = v
        bm[n] = mat_from_vec(v, d)
        return n + 1
    return n


def close_algebra_loop(gens: np.ndarray, tol: float):
    """Breadth-first Lie closure of normalized skew-Hermitian generators.

    Parameters
    ----------
    gens : (m, d, d) complex array
        Generators, each unit Frobenius norm (zero matrices are skipped).
    tol : float
        Relative residual threshold for admitting a commutator.

    Returns
    -------
    n : int
        Final basis size (capped at d**2 - 1).
    rounds : int
        Number of commutator rounds performed.
    basis_vecs : (n, d*d) real array
        Orthonormal coordinates of the basis.
    """
    m, d, _ = gens.shape
    dd = d * d
    max_dim = dd - 1
    bm = np.zeros((max_dim, d, d), dtype=np.complex128)
    bv = np.zeros((max_dim, dd), dtype=np.float64)
    n = 0
    for t in range(m):
        n = _try_admit(bm, bv, n, gens[t], d, tol)
    rounds = 0
    new_lo, new_hi = 0, n
    while new_lo < new_hi and n < max_dim:
        rounds += 1
        for i in range(new_lo, new_hi):
            for j in range(new_hi):
                if i == j:
                    continue
                cand = bm[i] @ bm[j] - bm[j] @ bm[i]
                n = _try_admit(bm, bv, n, cand, d, tol)
                if n == max_dim:
                    return n, rounds, bv[:n].copy()
        new_lo, new_hi = new_hi, n
    return n, rounds, bv[:n].copy()


def _apply_segment(h0, hi, amp, dt, hbar, psi, back):
    """Apply exp(-i dt (h0 + amp*hi) / hbar) (or its adjoint) to ``psi``."""
    w, vv = np.linalg.eigh(h0 + amp * hi)
    sign = 1.0 if back else -1.0
    phase = np.exp(sign * 1j * w * (dt / hbar))
    return vv @ (phase * (vv.conj().T @ psi))


def evolve_schedule(h0, hi, amps, dts, psi0, hbar):
    """Piecewise-constant evolution of ``psi0`` under h0 + f_k * hi."""
    psi = psi0.copy()
    for k in range(amps.shape[0]):
        psi = _apply_segment(h0, hi, amps[k], dts[k], hbar, psi, False)
    return psi


def schedule_fidelity(h0, hi, amps, dts, psi0, target, hbar):
    """|<target| U(f) |psi0>|^2 for unit-norm states."""
    ov = np.vdot(target, evolve_schedule(h0, hi, amps, dts, psi0, hbar))
    return float(ov.real * ov.real + ov.imag * ov.imag)


def fd_gradient(h0, hi, amps, dts, psi0, target, hbar, delta):
    """Fidelity and its central-finite-difference gradient in the segment
    amplitudes, using cached forward/backward propagated states so each
    component costs two extra eigendecompositions instead of a full sweep."""
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
    ov = np.vdot(target, fwd[nseg])
    fid = float(ov.real * ov.real + ov.imag * ov.imag)
    grad = np.empty(nseg, dtype=np.float64)
    for k in range(nseg):
        op = np.vdot(bwd[k + 1], _apply_segment(h0, hi, amps[k] + delta, dts[k], hbar, fwd[k], False))
        om = np.vdot(bwd[k + 1], _apply_segment(h0, hi, amps[k] - delta, dts[k], hbar, fwd[k], False))
        fp = op.real * op.real + op.imag * op.imag
        fm = om.real * om.real + om.imag * om.imag
        grad[k] = (fp - fm) / (2.0 * delta)
    return fid, grad


def _relax_rhs(energies, he, tau, hbar, s, c):
    # Interaction picture: the bare phases are absorbed analytically, leaving
    # i*hbar dC/ds = exp(-s/tau) * (P He P^dagger) C with P = diag(exp(i E s / hbar)).
    ph = np.exp((1j * s / hbar) * energies)
    u = he @ (np.conj(ph) * c)
    return (-1j / hbar) * np.exp(-s / tau) * (ph * u)


def relax_state(energies, he, tau, hbar, n_steps, h, psi0):
    """Fixed-step RK4 integration of the decaying-field interaction-picture
    amplitudes from s = 0 to s = n_steps * h."""
    c = psi0.copy()
    for i in range(n_steps):
        s = i * h
        k1 = _relax_rhs(energies, he, tau, hbar, s, c)
        k2 = _relax_rhs(energies, he, tau, hbar, s + 0.5 * h, c + (0.5 * h) * k1)
        k3 = _relax_rhs(energies, he, tau, hbar, s + 0.5 * h, c + (0.5 * h) * k2)
        k4 = _relax_rhs(energies, he, tau, hbar, s + h, c + h * k3)
        c = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return c
