"""System descriptions and Hamiltonian builders.

A :class:`SystemSpec` collects everything needed to pose the control problem:
level energies (eV), the dimensionless dipole couplings driven by the control
field, and the static excitation couplings (eV) used by the
degeneracy-splitting analysis and the relaxation simulation.

Couplings are stored sparsely; any entry not present is zero.  Energies and
excitation couplings are always held in electronvolts internally — JSON
documents (and the CLI) may declare ``units.coupling = "J"`` in which case the
excitation values are converted on load.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import InvalidSpecError
from .hilbert import OperatorMatrix, basis_dimension, degeneracy, flat_index

#: Reduced Planck constant in eV.s.
HBAR_EV_S = 6.582119569e-16

#: Exact (SI definition) number of joules per electronvolt.
J_PER_EV = 1.602176634e-19

_TOP_KEYS = {"N", "energies", "dipoles", "excitation_inter", "excitation_intra", "units"}


def _check_inter_key(N: int, n, k, p, label: str) -> tuple[int, int, int]:
    for v in (n, k, p):
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise InvalidSpecError(f"{label} indices must be integers, got {(n, k, p)!r}")
    n, k, p = int(n), int(k), int(p)
    if not 1 <= n <= N - 1:
        raise InvalidSpecError(f"{label} ({n},{k},{p}): level {n} must lie in 1..{N - 1}")
    if not 1 <= k <= degeneracy(n):
        raise InvalidSpecError(f"{label} ({n},{k},{p}): sublevel {k} out of range for level {n}")
    if p not in (1, 2):
        raise InvalidSpecError(f"{label} ({n},{k},{p}): target sublevel {p} must be 1 or 2")
    return n, k, p


@dataclass(frozen=True)
class SystemSpec:
    """Validated description of an ``N``-level ladder system.

    Attributes
    ----------
    N : int
        Number of levels (ground plus ``N - 1`` two-fold degenerate ones).
    energies : tuple of float
        Level energies ``E_1 < E_2 < ... < E_N`` in eV.
    dipoles : mapping ``(n, k, p) -> float``
        Dimensionless dipole coupling between ``(n, k)`` and ``(n+1, p)``.
    excitation_inter : mapping ``(n, k, p) -> float``
        Static excitation coupling (eV) between ``(n, k)`` and ``(n+1, p)``.
    excitation_intra : mapping ``n -> float``
        Static excitation coupling (eV) between the two sublevels of level ``n``.
    """

    N: int
    energies: tuple[float, ...]
    dipoles: dict[tuple[int, int, int], float] = field(default_factory=dict)
    excitation_inter: dict[tuple[int, int, int], float] = field(default_factory=dict)
    excitation_intra: dict[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        basis_dimension(self.N)  # validates N
        object.__setattr__(self, "N", int(self.N))
        energies = tuple(float(e) for e in self.energies)
        if len(energies) != self.N:
            raise InvalidSpecError(
                f"expected {self.N} energies, got {len(energies)}"
            )
        if not all(np.isfinite(energies)):
            raise InvalidSpecError("energies must be finite")
        for lo, hi in zip(energies, energies[1:]):
            if not hi > lo:
                raise InvalidSpecError(
                    f"energies must be strictly increasing, got {lo} then {hi}"
                )
        object.__setattr__(self, "energies", energies)

        dip = {}
        for key, value in dict(self.dipoles).items():
            nkp = _check_inter_key(self.N, *key, label="dipole")
            if nkp in dip:
                raise InvalidSpecError(f"duplicate dipole entry {nkp}")
            dip[nkp] = float(value)
        object.__setattr__(self, "dipoles", dip)

        inter = {}
        for key, value in dict(self.excitation_inter).items():
            nkp = _check_inter_key(self.N, *key, label="excitation_inter")
            if nkp in inter:
                raise InvalidSpecError(f"duplicate excitation_inter entry {nkp}")
            inter[nkp] = float(value)
        object.__setattr__(self, "excitation_inter", inter)

        intra = {}
        for n, value in dict(self.excitation_intra).items():
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
                raise InvalidSpecError(f"excitation_intra level must be an integer, got {n!r}")
            n = int(n)
            if not 2 <= n <= self.N:
                raise InvalidSpecError(
                    f"excitation_intra level {n} must lie in 2..{self.N}"
                )
            if n in intra:
                raise InvalidSpecError(f"duplicate excitation_intra entry {n}")
            intra[n] = float(value)
        object.__setattr__(self, "excitation_intra", intra)

        values = list(dip.values()) + list(inter.values()) + list(intra.values())
        if not all(np.isfinite(values)):
            raise InvalidSpecError("couplings must be finite")

    # -- sparse accessors -------------------------------------------------

    def dipole(self, n: int, k: int, p: int) -> float:
        """Dipole coupling between ``(n, k)`` and ``(n+1, p)``; absent means 0."""
        return self.dipoles.get((n, k, p), 0.0)

    def coupling_inter(self, n: int, k: int, p: int) -> float:
        """Excitation coupling (eV) between ``(n, k)`` and ``(n+1, p)``."""
        return self.excitation_inter.get((n, k, p), 0.0)

    def coupling_intra(self, n: int) -> float:
        """Excitation coupling (eV) between the sublevels of level ``n``."""
        return self.excitation_intra.get(n, 0.0)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension ``2N - 1``."""
        return basis_dimension(self.N)


def energy_gaps(spec: SystemSpec) -> list[float]:
    """Successive level spacings ``mu_n = E_{n+1} - E_n`` in eV (all positive)."""
    return [spec.energies[i + 1] - spec.energies[i] for i in range(spec.N - 1)]


def build_h0(spec: SystemSpec) -> OperatorMatrix:
    """Drift Hamiltonian: diagonal level energies, degenerate within each level."""
    d = spec.dim
    diag = np.zeros(d)
    for n in range(1, spec.N + 1):
        for k in range(1, degeneracy(n) + 1):
            diag[flat_index((n, k), spec.N)] = spec.energies[n - 1]
    return OperatorMatrix(np.diag(diag).astype(np.complex128), kind="hermitian")


def _symmetric_from_inter(spec: SystemSpec, table: Mapping[tuple[int, int, int], float]) -> np.ndarray:
    d = spec.dim
    m = np.zeros((d, d), dtype=np.complex128)
    for (n, k, p), value in table.items():
        i = flat_index((n, k), spec.N)
        j = flat_index((n + 1, p), spec.N)
        m[i, j] += value
        m[j, i] += value
    return m


def build_hi(spec: SystemSpec) -> OperatorMatrix:
    """Control (dipole) Hamiltonian coupling adjacent levels, real symmetric."""
    return OperatorMatrix(_symmetric_from_inter(spec, spec.dipoles), kind="hermitian")


def build_he(spec: SystemSpec) -> OperatorMatrix:
    """Static excitation Hamiltonian: adjacent-level plus intra-level couplings (eV)."""
    m = _symmetric_from_inter(spec, spec.excitation_inter)
    for n, value in spec.excitation_intra.items():
        i = flat_index((n, 1), spec.N)
        j = flat_index((n, 2), spec.N)
        m[i, j] += value
        m[j, i] += value
    return OperatorMatrix(m, kind="hermitian")


def traceless_part(op: OperatorMatrix) -> OperatorMatrix:
    """Remove the trace: ``op - (tr op / d) * I``, preserving the symmetry kind."""
    arr = op.entries if isinstance(op, OperatorMatrix) else np.asarray(op, dtype=np.complex128)
    d = arr.shape[0]
    shifted = arr - (np.trace(arr) / d) * np.eye(d, dtype=np.complex128)
    kind = op.kind if isinstance(op, OperatorMatrix) else "general"
    return OperatorMatrix(shifted, kind=kind)


# -- JSON serialization ----------------------------------------------------


def to_json_dict(spec: SystemSpec) -> dict:
    """Plain-JSON form of a spec.  Couplings are always written in eV."""
    return {
        "N": spec.N,
        "energies": list(spec.energies),
        "dipoles": [
            {"n": n, "k": k, "p": p, "value": v}
            for (n, k, p), v in sorted(spec.dipoles.items())
        ],
        "excitation_inter": [
            {"n": n, "k": k, "p": p, "value": v}
            for (n, k, p), v in sorted(spec.excitation_inter.items())
        ],
        "excitation_intra": [
            {"n": n, "value": v} for n, v in sorted(spec.excitation_intra.items())
        ],
        "units": {"coupling": "eV"},
    }


def _record_list(data, fields: tuple[str, ...], section: str) -> list[dict]:
    if not isinstance(data, list):
        raise InvalidSpecError(f"{section} must be a list of records")
    out = []
    for rec in data:
        if not isinstance(rec, dict):
            raise InvalidSpecError(f"{section} records must be objects, got {rec!r}")
        unknown = set(rec) - set(fields)
        if unknown:
            raise InvalidSpecError(f"unknown keys {sorted(unknown)} in {section} record")
        missing = set(fields) - set(rec)
        if missing:
            raise InvalidSpecError(f"missing keys {sorted(missing)} in {section} record")
        out.append(rec)
    return out


def from_json_dict(data: dict, units: str | None = None) -> SystemSpec:
    """Build a :class:`SystemSpec` from its JSON form.

    Unknown keys anywhere in the document are rejected.  ``units`` overrides
    the document's ``units.coupling`` declaration ("eV" or "J"); joule-valued
    excitation couplings are converted to eV on load (dipoles are
    dimensionless and never scaled).
    """
    if not isinstance(data, dict):
        raise InvalidSpecError("system spec must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise InvalidSpecError(f"unknown keys in system spec: {sorted(unknown)}")
    if "N" not in data or "energies" not in data:
        raise InvalidSpecError("system spec requires 'N' and 'energies'")

    declared = data.get("units", {"coupling": "eV"})
    if not isinstance(declared, dict) or set(declared) - {"coupling"}:
        raise InvalidSpecError(f"malformed units declaration: {declared!r}")
    unit = units if units is not None else declared.get("coupling", "eV")
    if unit not in ("eV", "J"):
        raise InvalidSpecError(f"unsupported coupling unit {unit!r}")
    scale = 1.0 if unit == "eV" else 1.0 / J_PER_EV

    dipoles = {}
    for rec in _record_list(data.get("dipoles", []), ("n", "k", "p", "value"), "dipoles"):
        key = (rec["n"], rec["k"], rec["p"])
        if key in dipoles:
            raise InvalidSpecError(
                f"duplicate dipoles record for n={key[0]}, k={key[1]}, p={key[2]}"
            )
        dipoles[key] = rec["value"]
    inter = {}
    for rec in _record_list(
        data.get("excitation_inter", []), ("n", "k", "p", "value"), "excitation_inter"
    ):
        key = (rec["n"], rec["k"], rec["p"])
        if key in inter:
            raise InvalidSpecError(
                f"duplicate excitation_inter record for n={key[0]}, k={key[1]}, p={key[2]}"
            )
        inter[key] = rec["value"] * scale
    intra = {}
    for rec in _record_list(
        data.get("excitation_intra", []), ("n", "value"), "excitation_intra"
    ):
        if rec["n"] in intra:
            raise InvalidSpecError(f"duplicate excitation_intra record for n={rec['n']}")
        intra[rec["n"]] = rec["value"] * scale

    return SystemSpec(
        N=data["N"],
        energies=data["energies"],
        dipoles=dipoles,
        excitation_inter=inter,
        excitation_intra=intra,
    )


def load_spec(path, units: str | None = None) -> SystemSpec:
    """Load a spec from a JSON file.  ``units`` overrides the file's declaration."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpecError(f"malformed JSON in {path}: {exc}") from exc
    return from_json_dict(data, units=units)


def save_spec(spec: SystemSpec, path) -> None:
    """Write a spec to a JSON file (couplings in eV), deterministically."""
    Path(path).write_text(json.dumps(to_json_dict(spec), indent=2, sort_keys=True) + "\n")


def demo_spec(N: int) -> SystemSpec:
    """Equally spaced ladder with a square-root dipole profile.

    Level energies are ``E_n = n - 1/2`` eV and the dipole between ``(i, j)``
    and ``(i+1, k)`` is ``sqrt(N + 3 - i - j - k)``.  For ``N >= 3`` the
    resulting system is completely controllable, which makes this family a
    convenient self-test and demo input.
    """
    basis_dimension(N)
    if N < 3:
        raise InvalidSpecError(
            "the demo family needs at least 3 levels; a 2-level degenerate "
            "system is never completely controllable"
        )
    energies = [n - 0.5 for n in range(1, N + 1)]
    dipoles = {}
    for i in range(1, N):
        for j in range(1, degeneracy(i) + 1):
            for k in (1, 2):
                dipoles[(i, j, k)] = float(np.sqrt(N + 3 - i - j - k))
    return SystemSpec(N=N, energies=energies, dipoles=dipoles)
