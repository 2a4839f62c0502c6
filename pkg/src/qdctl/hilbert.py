"""Operator algebra on the level basis of a ladder system whose excited levels
are two-fold degenerate.

States are labelled ``(n, k)`` with level number ``n >= 1`` and sublevel
``k`` (the ground level ``n = 1`` has a single sublevel, every level above it
has two).  The flattened basis order is ``(1,1), (2,1), (2,2), (3,1), (3,2),
...`` so an ``N``-level system lives in Hilbert-space dimension ``2N - 1``.

The elementary skew-Hermitian operators returned by :func:`make_x`,
:func:`make_y` and :func:`make_h` span ``su(2N-1)`` together with their
commutators and are the building blocks used by the Lie-closure engine and the
algebraic controllability criteria.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError, ShapeMismatchError

#: Absolute tolerance used to verify a declared (skew-)Hermiticity flag.
HERMITICITY_ATOL = 1e-12

_KINDS = ("hermitian", "skew_hermitian", "general")


def degeneracy(n: int) -> int:
    """Number of sublevels of level ``n``: 1 for the ground level, 2 above it."""
    if n < 1:
        raise IndexError(f"level number must be >= 1, got {n}")
    return 1 if n == 1 else 2


def basis_dimension(N: int) -> int:
    """Hilbert-space dimension ``2N - 1`` of an ``N``-level ladder.

    Parameters
    ----------
    N : int
        Number of levels, counting the ground level.  Must be at least 2.

    Returns
    -------
    int
        ``2N - 1``.
    """
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise InvalidSpecError(f"level count must be an integer, got {N!r}")
    if N < 2:
        raise InvalidSpecError(f"need at least two levels, got N={N}")
    return 2 * int(N) - 1


@dataclass(frozen=True, order=True)
class LevelIndex:
    """A ``(level, sublevel)`` label in the flattened basis order.

    Attributes
    ----------
    n : int
        Level number, ``1``-based.
    k : int
        Sublevel within the level: ``k = 1`` for the ground level,
        ``k in {1, 2}`` for every excited level.
    """

    n: int
    k: int

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise IndexError(f"level number must be an integer, got {self.n!r}")
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)):
            raise IndexError(f"sublevel must be an integer, got {self.k!r}")
        if self.n < 1:
            raise IndexError(f"level number must be >= 1, got {self.n}")
        if not 1 <= self.k <= degeneracy(self.n):
            raise IndexError(
                f"sublevel {self.k} out of range for level {self.n} "
                f"(degeneracy {degeneracy(self.n)})"
            )


def _as_level_index(value) -> LevelIndex:
    if isinstance(value, LevelIndex):
        return value
    try:
        n, k = value
    except (TypeError, ValueError):
        raise IndexError(f"cannot interpret {value!r} as a level index") from None
    return LevelIndex(int(n), int(k))


def flat_index(idx, N: int) -> int:
    """Position of a level label in the flattened basis of an ``N``-level system.

    ``(1,1)`` maps to 0 and ``(n,k)`` with ``n >= 2`` maps to ``2n - 4 + k``.
    """
    idx = _as_level_index(idx)
    basis_dimension(N)
    if idx.n > N:
        raise IndexError(f"level {idx.n} out of range for an {N}-level system")
    if idx.n == 1:
        return 0
    return 2 * idx.n - 4 + idx.k


def level_indices(N: int) -> tuple[LevelIndex, ...]:
    """All level labels of an ``N``-level system in flattened order."""
    basis_dimension(N)
    out = [LevelIndex(1, 1)]
    for n in range(2, N + 1):
        out.append(LevelIndex(n, 1))
        out.append(LevelIndex(n, 2))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A dense complex operator together with a declared symmetry kind.

    Parameters
    ----------
    entries : numpy.ndarray
        Square complex matrix; it is copied and frozen on construction.
    kind : {"hermitian", "skew_hermitian", "general"}
        Declared symmetry class, verified to within ``HERMITICITY_ATOL``
        (absolute) at construction time.
    """

    entries: np.ndarray
    kind: str = "general"

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeMismatchError(f"operator must be square, got shape {arr.shape}")
        if self.kind not in _KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind == "hermitian":
            defect = np.max(np.abs(arr - arr.conj().T)) if arr.size else 0.0
            if defect > HERMITICITY_ATOL:
                raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
        elif self.kind == "skew_hermitian":
            defect = np.max(np.abs(arr + arr.conj().T)) if arr.size else 0.0
            if defect > HERMITICITY_ATOL:
                raise ValueError(f"matrix is not skew-Hermitian (defect {defect:.3e})")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        """Matrix dimension."""
        return self.entries.shape[0]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"OperatorMatrix(dim={self.dim}, kind={self.kind!r})"


def _entries(op) -> np.ndarray:
    if isinstance(op, OperatorMatrix):
        return op.entries
    return np.asarray(op, dtype=np.complex128)


def commutator(a, b) -> OperatorMatrix:
    """Commutator ``[a, b] = ab - ba`` of two operators.

    The symmetry kind of the result follows the algebra: two operators of the
    same (skew-)Hermitian kind yield a skew-Hermitian commutator, a mixed
    Hermitian/skew-Hermitian pair yields a Hermitian one.
    """
    ea, eb = _entries(a), _entries(b)
    if ea.shape != eb.shape:
        raise ShapeMismatchError(f"operator shapes differ: {ea.shape} vs {eb.shape}")
    kinds = {
        getattr(a, "kind", "general"),
        getattr(b, "kind", "general"),
    }
    if kinds == {"hermitian"} or kinds == {"skew_hermitian"}:
        kind = "skew_hermitian"
    elif kinds == {"hermitian", "skew_hermitian"}:
        kind = "hermitian"
    else:
        kind = "general"
    return OperatorMatrix(ea @ eb - eb @ ea, kind=kind)


def frobenius_inner(a, b) -> float:
    """Real Frobenius inner product ``Re tr(a^dagger b)``."""
    ea, eb = _entries(a), _entries(b)
    if ea.shape != eb.shape:
        raise ShapeMismatchError(f"operator shapes differ: {ea.shape} vs {eb.shape}")
    return float(np.vdot(ea, eb).real)


def _pair_positions(a, b, N: int) -> tuple[int, int]:
    a = _as_level_index(a)
    b = _as_level_index(b)
    ia, ib = flat_index(a, N), flat_index(b, N)
    if ia >= ib:
        raise ValueError(
            f"first index {(a.n, a.k)} must precede second index {(b.n, b.k)} "
            "in the flattened basis order"
        )
    return ia, ib


def make_x(a, b, N: int) -> OperatorMatrix:
    """Skew-Hermitian generator ``i(|a><b| + |b><a|)``.

    Parameters
    ----------
    a, b : LevelIndex or (n, k) tuple
        Distinct level labels with ``a`` preceding ``b`` in flattened order.
    N : int
        Number of levels of the ambient system.
    """
    ia, ib = _pair_positions(a, b, N)
    d = basis_dimension(N)
    m = np.zeros((d, d), dtype=np.complex128)
    m[ia, ib] = 1j
    m[ib, ia] = 1j
    return OperatorMatrix(m, kind="skew_hermitian")


def make_y(a, b, N: int) -> OperatorMatrix:
    """Skew-Hermitian generator ``|a><b| - |b><a|``."""
    ia, ib = _pair_positions(a, b, N)
    d = basis_dimension(N)
    m = np.zeros((d, d), dtype=np.complex128)
    m[ia, ib] = 1.0
    m[ib, ia] = -1.0
    return OperatorMatrix(m, kind="skew_hermitian")


def make_h(a, b, N: int) -> OperatorMatrix:
    """Skew-Hermitian Cartan generator ``i(|a><a| - |b><b|)``."""
    ia, ib = _pair_positions(a, b, N)
    d = basis_dimension(N)
    m = np.zeros((d, d), dtype=np.complex128)
    m[ia, ia] = 1j
    m[ib, ib] = -1j
    return OperatorMatrix(m, kind="skew_hermitian")
