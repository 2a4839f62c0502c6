"""Numerical closure of the dynamical Lie algebra generated by drift and control.

The system ``H = H0 + f(t) H_I`` can reach every unitary (up to global phase)
exactly when the real Lie algebra generated by ``{i*H0_traceless, i*H_I}``
under commutation is all of ``su(d)``, i.e. has dimension ``d**2 - 1``.  This
module computes that dimension by breadth-first commutator expansion with
two-pass Gram-Schmidt orthonormalization in a real, inner-product-preserving
coordinate encoding of skew-Hermitian matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import ContractError, ShapeMismatchError
from .hamiltonians import SystemSpec, build_h0, build_hi, traceless_part
from .hilbert import OperatorMatrix

#: Default relative residual threshold for admitting a new basis direction.
DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ClosureResult:
    """Outcome of a Lie-algebra closure run.

    Attributes
    ----------
    dimension : int
        Real dimension of the computed algebra.
    controllable : bool
        ``dimension == d**2 - 1``, the su(d) criterion.
    basis : tuple of OperatorMatrix
        Orthonormal (Frobenius) skew-Hermitian basis of the algebra.
    rounds : int
        Number of breadth-first commutator rounds performed.
    tolerance : float
        Relative residual threshold used.
    """

    dimension: int
    controllable: bool
    basis: tuple[OperatorMatrix, ...]
    rounds: int
    tolerance: float

    def to_json_dict(self) -> dict:
        """Summary (without the basis matrices) for report serialization."""
        return {
            "dimension": int(self.dimension),
            "controllable": bool(self.controllable),
            "rounds": int(self.rounds),
            "tolerance": float(self.tolerance),
        }


def _validate_generator(arr: np.ndarray, label: str) -> None:
    scale = max(1.0, float(np.max(np.abs(arr))) if arr.size else 0.0)
    skew_defect = float(np.max(np.abs(arr + arr.conj().T)))
    if skew_defect > 1e-12 * scale:
        raise ContractError(
            f"{label} is not skew-Hermitian (defect {skew_defect:.3e}); "
            "pass i*H for Hermitian H"
        )
    trace_mag = abs(complex(np.trace(arr)))
    if trace_mag > 1e-10 * scale:
        raise ContractError(
            f"{label} is not traceless (|trace| = {trace_mag:.3e}); "
            "apply traceless_part to the drift first"
        )


def close_algebra(generators, tolerance: float = DEFAULT_TOLERANCE) -> ClosureResult:
    """Close a set of skew-Hermitian traceless generators under commutation.

    Commutators are formed breadth-first (every element new in the previous
    round against every element known at the round start) and admitted when
    their orthogonalized residual exceeds ``tolerance`` times the candidate
    norm.  The loop stops at a fixpoint or when the dimension reaches
    ``d**2 - 1``.

    Parameters
    ----------
    generators : sequence of OperatorMatrix or complex arrays
        Skew-Hermitian, traceless generators of equal dimension.  Zero
        generators are ignored.
    tolerance : float
        Relative admission threshold; must be positive.

    Returns
    -------
    ClosureResult
    """
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    if not (float(tolerance) > 0.0) or not np.isfinite(tolerance):
        raise ValueError(f"tolerance must be a positive real, got {tolerance!r}")
    arrs = []
    for idx, g in enumerate(gens):
        arr = g.entries if isinstance(g, OperatorMatrix) else np.asarray(g, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeMismatchError(f"generator {idx} is not square: shape {arr.shape}")
        if arrs and arr.shape != arrs[0].shape:
            raise ShapeMismatchError(
                f"generator {idx} has shape {arr.shape}, expected {arrs[0].shape}"
            )
        _validate_generator(arr, f"generator {idx}")
        arrs.append(np.asarray(arr, dtype=np.complex128))

    normalized = []
    for arr in arrs:
        nrm = float(np.linalg.norm(arr))
        if nrm > 0.0:
            normalized.append(arr / nrm)
    if not normalized:
        raise ContractError("all generators are zero")

    d = normalized[0].shape[0]
    stacked = np.ascontiguousarray(np.stack(normalized))
    kern = kernels()
    n, rounds, basis_vecs = kern.close_algebra_loop(stacked, float(tolerance))
    basis = tuple(
        OperatorMatrix(kern.mat_from_vec(basis_vecs[i], d), kind="skew_hermitian")
        for i in range(n)
    )
    return ClosureResult(
        dimension=int(n),
        controllable=bool(n == d * d - 1),
        basis=basis,
        rounds=int(rounds),
        tolerance=float(tolerance),
    )


def is_completely_controllable(spec: SystemSpec, tolerance: float = DEFAULT_TOLERANCE) -> ClosureResult:
    """Decide complete controllability of a system by Lie closure.

    Builds the generators ``i * traceless(H0)`` and ``i * H_I`` from the spec
    and runs :func:`close_algebra`; the system is completely controllable
    exactly when the closure reaches dimension ``(2N-1)**2 - 1``.
    """
    drift = 1j * traceless_part(build_h0(spec)).entries
    control = 1j * build_hi(spec).entries
    gens = [
        OperatorMatrix(drift, kind="skew_hermitian"),
        OperatorMatrix(control, kind="skew_hermitian"),
    ]
    return close_algebra(gens, tolerance=tolerance)
