"""Closed-form sufficient conditions for complete controllability, and the
feasibility checks for eliminating degeneracy with a weak excitation field.

Each checker returns a :class:`ConditionReport` whose verdict is a pure
function of its recorded witnesses: the checks implement exact algebraic
inequalities, applied with scale-aware margins ``eps_rel * (magnitude of the
compared terms)`` so that verdicts are invariant under rescaling all couplings.

A "pass" from any checker is sufficient — but not necessary — for complete
controllability; the Lie-closure oracle in :mod:`qdctl.lie_closure` remains
the ground truth.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpecError
from .hamiltonians import SystemSpec, energy_gaps
from .hilbert import LevelIndex, degeneracy

#: Default relative margin for the exact inequalities.
EPS_REL = 1e-9

CONDITION_IDS = ("lemma1", "theorem1", "theorem2", "elim_no_crossing", "elim_gap_distinct")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    return value


@dataclass
class ConditionReport:
    """Auditable outcome of one sufficient-condition check.

    Attributes
    ----------
    condition_id : str
        One of ``lemma1``, ``theorem1``, ``theorem2``, ``elim_no_crossing``,
        ``elim_gap_distinct``.
    passed : bool
        Verdict; a pure function of ``witnesses``.
    witnesses : dict
        The numbers the verdict was computed from (determinants, p/q,
        eigenvalue lists, split spectra, ...).
    notes : str
        Human-readable caveats (inapplicability, index-range remarks, ...).
    """

    condition_id: str
    passed: bool
    witnesses: dict = field(default_factory=dict)
    notes: str = ""

    def to_json_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "pass": bool(self.passed),
            "witnesses": _jsonable(self.witnesses),
            "notes": self.notes,
        }


@dataclass
class EqualGapParameters:
    """The coupled-coefficient machinery for the equal-gap criterion.

    Attributes
    ----------
    K2 : dict[LevelIndex, float]
        Level constants ``K^2_{ij}`` (three-branch formula over i=1, middle,
        i=N).
    nu : dict[(LevelIndex, LevelIndex), float]
        ``nu_{ij,i+1k} = K^2_{i+1k} - K^2_{ij}`` keyed by the coupled pair.
    b : list[float]
        Mixing coefficients indexed by subscript, ``b[0] = 0`` by convention,
        ``b[1] .. b[N-1]`` from the three-branch formula.
    G : list[numpy.ndarray]
        Symmetric blocks: ``G[0]`` is the 2x2 first block, ``G[i-1]`` the 4x4
        block for level pair (i, i+1), i >= 2.
    lambdas : list[numpy.ndarray]
        Eigenvalues of each block, ascending.
    C1 : list[numpy.ndarray]
        Transformed couplings ``U_i @ d_i`` per block (first block carries
        ``C_{11,21}, C_{11,22}``).
    U : list[numpy.ndarray]
        Orthogonal transforms (rows are eigenvectors, sign-fixed so each
        row's largest-magnitude entry is positive).
    """

    K2: dict
    nu: dict
    b: list
    G: list
    lambdas: list
    C1: list
    U: list


def _dipole_vector(spec: SystemSpec, i: int) -> np.ndarray:
    """Couplings of block i in row order (j,k) = (1,1),(1,2),(2,1),(2,2)."""
    if i == 1:
        return np.array([spec.dipole(1, 1, 1), spec.dipole(1, 1, 2)])
    return np.array(
        [
            spec.dipole(i, 1, 1),
            spec.dipole(i, 1, 2),
            spec.dipole(i, 2, 1),
            spec.dipole(i, 2, 2),
        ]
    )


def check_lemma1(spec: SystemSpec, eps_rel: float = EPS_REL) -> ConditionReport:
    """Coupling-determinant condition on every excited adjacent-level pair.

    Passes when ``d_{n1,n+11} d_{n2,n+12} - d_{n1,n+12} d_{n2,n+11}`` is
    nonzero (beyond the relative margin) for every ``n`` in ``2..N-1``; this
    lets ladder operators reaching the top level be separated sublevel by
    sublevel.  Vacuous for N=2.
    """
    determinants = []
    passed = True
    for n in range(2, spec.N):
        a = spec.dipole(n, 1, 1)
        bb = spec.dipole(n, 1, 2)
        c = spec.dipole(n, 2, 1)
        e = spec.dipole(n, 2, 2)
        det = a * e - bb * c
        scale = max(abs(a * e), abs(bb * c))
        ok = abs(det) > eps_rel * scale and scale > 0.0
        passed = passed and ok
        determinants.append({"n": n, "value": det, "scale": scale, "ok": ok})
    notes = ""
    if spec.N == 2:
        notes = "no adjacent excited-level pairs for N=2; condition is vacuous"
    return ConditionReport(
        condition_id="lemma1",
        passed=passed,
        witnesses={"determinants": determinants, "eps_rel": eps_rel},
        notes=notes,
    )


def check_theorem1(spec: SystemSpec, eps_rel: float = EPS_REL) -> ConditionReport:
    """Distinct-first-gap sufficient condition for complete controllability.

    Requires the first gap to differ from every later gap, the displayed
    ``p``/``q`` coupling inequality to hold strictly, and :func:`check_lemma1`
    to pass.  Inapplicable for N=2 (reported as failed with a note).
    """
    if spec.N == 2:
        return ConditionReport(
            condition_id="theorem1",
            passed=False,
            witnesses={},
            notes="inapplicable: a two-level system with a degenerate excited "
            "level is never completely controllable",
        )
    gaps = energy_gaps(spec)
    mu1 = gaps[0]
    gap_checks = []
    gap_ok = True
    for n in range(2, spec.N):
        mun = gaps[n - 1]
        scale = max(abs(mu1), abs(mun))
        ok = abs(mu1 - mun) > eps_rel * scale
        gap_ok = gap_ok and ok
        gap_checks.append({"n": n, "mu1": mu1, "mu_n": mun, "ok": ok})

    p = spec.dipole(1, 1, 1) * spec.dipole(2, 1, 1) + spec.dipole(1, 1, 2) * spec.dipole(2, 2, 1)
    q = spec.dipole(1, 1, 1) * spec.dipole(2, 1, 2) + spec.dipole(1, 1, 2) * spec.dipole(2, 2, 2)
    lhs = spec.dipole(1, 1, 1) * (p * spec.dipole(2, 2, 1) + q * spec.dipole(2, 2, 2))
    rhs = spec.dipole(1, 1, 2) * (p * spec.dipole(2, 1, 1) + q * spec.dipole(2, 1, 2))
    ineq_scale = max(abs(lhs), abs(rhs))
    ineq_ok = abs(lhs - rhs) > eps_rel * ineq_scale and ineq_scale > 0.0

    lemma = check_lemma1(spec, eps_rel)
    passed = gap_ok and ineq_ok and lemma.passed
    notes = []
    if not gap_ok:
        notes.append("first gap is not distinct from every later gap")
    if not ineq_ok:
        notes.append("coupling inequality is an equality (within margin)")
    if not lemma.passed:
        notes.append("coupling-determinant condition fails")
    return ConditionReport(
        condition_id="theorem1",
        passed=passed,
        witnesses={
            "p": p,
            "q": q,
            "lhs": lhs,
            "rhs": rhs,
            "gaps": gaps,
            "gap_checks": gap_checks,
            "inequality_ok": ineq_ok,
            "lemma1_pass": lemma.passed,
            "eps_rel": eps_rel,
        },
        notes="; ".join(notes),
    )


def equal_gap_parameters(spec: SystemSpec, eps_rel: float = EPS_REL) -> EqualGapParameters:
    """Compute the block matrices governing repeated-commutator recursion for
    equally spaced levels.

    Raises
    ------
    InvalidSpecError
        If ``N < 3`` or the level spacings are not all equal within the
        relative margin.
    """
    if spec.N < 3:
        raise InvalidSpecError("equal-gap analysis requires at least three levels")
    gaps = energy_gaps(spec)
    gap_scale = max(abs(g) for g in gaps)
    for g in gaps[1:]:
        if abs(g - gaps[0]) > eps_rel * gap_scale:
            raise InvalidSpecError(
                f"level spacings are not all equal: {gaps[0]} vs {g}"
            )

    N = spec.N

    K2: dict = {LevelIndex(1, 1): spec.dipole(1, 1, 1) ** 2 + spec.dipole(1, 1, 2) ** 2}
    for i in range(2, N):
        for j in (1, 2):
            up = sum(spec.dipole(i, j, a) ** 2 for a in (1, 2))
            down = sum(
                spec.dipole(i - 1, g, j) ** 2 for g in range(1, degeneracy(i - 1) + 1)
            )
            K2[LevelIndex(i, j)] = up - down
    for j in (1, 2):
        K2[LevelIndex(N, j)] = -(
            spec.dipole(N - 1, 1, j) ** 2 + spec.dipole(N - 1, 2, j) ** 2
        )

    nu: dict = {}
    for i in range(1, N):
        for j in range(1, degeneracy(i) + 1):
            for k in (1, 2):
                nu[(LevelIndex(i, j), LevelIndex(i + 1, k))] = (
                    K2[LevelIndex(i + 1, k)] - K2[LevelIndex(i, j)]
                )

    b = [0.0] * N
    b[1] = (
        spec.dipole(1, 1, 1) * spec.dipole(1, 1, 2)
        - spec.dipole(2, 1, 1) * spec.dipole(2, 2, 1)
        - spec.dipole(2, 1, 2) * spec.dipole(2, 2, 2)
    )
    for i in range(2, N - 1):
        b[i] = (
            spec.dipole(i, 1, 1) * spec.dipole(i, 1, 2)
            + spec.dipole(i, 2, 1) * spec.dipole(i, 2, 2)
            - spec.dipole(i + 1, 1, 1) * spec.dipole(i + 1, 2, 1)
            - spec.dipole(i + 1, 1, 2) * spec.dipole(i + 1, 2, 2)
        )
    b[N - 1] = (
        spec.dipole(N - 1, 1, 1) * spec.dipole(N - 1, 1, 2)
        + spec.dipole(N - 1, 2, 1) * spec.dipole(N - 1, 2, 2)
    )

    G: list = []
    for i in range(1, N):
        if i == 1:
            block = np.array(
                [
                    [nu[(LevelIndex(1, 1), LevelIndex(2, 1))], -b[1]],
                    [-b[1], nu[(LevelIndex(1, 1), LevelIndex(2, 2))]],
                ]
            )
        else:
            n11 = nu[(LevelIndex(i, 1), LevelIndex(i + 1, 1))]
            n12 = nu[(LevelIndex(i, 1), LevelIndex(i + 1, 2))]
            n21 = nu[(LevelIndex(i, 2), LevelIndex(i + 1, 1))]
            n22 = nu[(LevelIndex(i, 2), LevelIndex(i + 1, 2))]
            block = np.array(
                [
                    [n11, -b[i], b[i - 1], 0.0],
                    [-b[i], n12, 0.0, b[i - 1]],
                    [b[i - 1], 0.0, n21, -b[i]],
                    [0.0, b[i - 1], -b[i], n22],
                ]
            )
        G.append(block)

    lambdas, U, C1 = [], [], []
    for i, block in enumerate(G, start=1):
        w, v = np.linalg.eigh(block)
        for col in range(v.shape[1]):
            lead = int(np.argmax(np.abs(v[:, col])))
            if v[lead, col] < 0:
                v[:, col] = -v[:, col]
        u = v.T.copy()
        lambdas.append(w)
        U.append(u)
        C1.append(u @ _dipole_vector(spec, i))

    return EqualGapParameters(K2=K2, nu=nu, b=b, G=G, lambdas=lambdas, C1=C1, U=U)


def check_theorem2(spec: SystemSpec, eps_rel: float = EPS_REL) -> ConditionReport:
    """Equal-gap sufficient condition for complete controllability.

    Passes when (a) :func:`check_lemma1` passes, (b) the first block's two
    eigenvalues are nonzero and distinct and its transformed couplings
    ``C_{11,21}, C_{11,22}`` are nonzero, and (c) all nonzero block
    eigenvalues are pairwise distinct globally — the separability requirement
    for the repeated-commutator (Vandermonde) argument.

    Raises
    ------
    InvalidSpecError
        If the level spacings are not all equal (precondition).
    """
    if spec.N == 2:
        return ConditionReport(
            condition_id="theorem2",
            passed=False,
            witnesses={},
            notes="inapplicable: a two-level system with a degenerate excited "
            "level is never completely controllable",
        )
    params = equal_gap_parameters(spec, eps_rel)
    lemma = check_lemma1(spec, eps_rel)

    all_lambdas = np.concatenate(params.lambdas)
    lam_scale = float(np.max(np.abs(all_lambdas))) if all_lambdas.size else 0.0
    lam_eps = eps_rel * lam_scale

    lam1 = params.lambdas[0]
    first_nonzero = lam_scale > 0.0 and all(abs(l) > lam_eps for l in lam1)
    first_distinct = lam_scale > 0.0 and abs(lam1[0] - lam1[1]) > lam_eps

    c_first = params.C1[0]
    c_scale = float(np.linalg.norm(c_first))
    c_ok = c_scale > 0.0 and all(abs(c) > eps_rel * c_scale for c in c_first)

    nonzero = [l for l in all_lambdas if abs(l) > lam_eps]
    global_distinct = True
    clashes = []
    for a in range(len(nonzero)):
        for bidx in range(a + 1, len(nonzero)):
            if abs(nonzero[a] - nonzero[bidx]) <= lam_eps:
                global_distinct = False
                clashes.append([nonzero[a], nonzero[bidx]])

    higher_zero_c = []
    for i, cvec in enumerate(params.C1[1:], start=2):
        cs = float(np.linalg.norm(cvec))
        for pos, c in enumerate(cvec):
            if cs == 0.0 or abs(c) <= eps_rel * cs:
                higher_zero_c.append({"block": i, "component": pos, "value": float(c)})

    passed = bool(lemma.passed and first_nonzero and first_distinct and c_ok and global_distinct)
    notes = []
    if not lemma.passed:
        notes.append("coupling-determinant condition fails")
    if not (first_nonzero and first_distinct):
        notes.append("first-block eigenvalues are zero or coincide")
    if not c_ok:
        notes.append("first-block transformed couplings vanish")
    if not global_distinct:
        notes.append("nonzero eigenvalues coincide across blocks")
    if higher_zero_c:
        # Zero C's in higher blocks change which elements are obtained
        # directly but do not by themselves gate the verdict.
        notes.append(f"{len(higher_zero_c)} higher-block transformed couplings are zero")
    return ConditionReport(
        condition_id="theorem2",
        passed=passed,
        witnesses={
            "lambdas": {str(i + 1): params.lambdas[i] for i in range(len(params.lambdas))},
            "C": {str(i + 1): params.C1[i] for i in range(len(params.C1))},
            "lambda_scale": lam_scale,
            "first_block_nonzero": first_nonzero,
            "first_block_distinct": first_distinct,
            "first_couplings_nonzero": c_ok,
            "global_distinct": global_distinct,
            "coinciding_pairs": clashes,
            "higher_zero_couplings": higher_zero_c,
            "lemma1_pass": lemma.passed,
            "eps_rel": eps_rel,
        },
        notes="; ".join(notes),
    )


def _split_spectrum(spec: SystemSpec):
    gammas = {n: abs(spec.coupling_intra(n)) for n in range(2, spec.N + 1)}
    table = [{"n": 1, "k": 1, "energy": spec.energies[0]}]
    for n in range(2, spec.N + 1):
        e = spec.energies[n - 1]
        table.append({"n": n, "k": 1, "energy": e - gammas[n]})
        table.append({"n": n, "k": 2, "energy": e + gammas[n]})
    return gammas, table


def check_elim_no_crossing(spec: SystemSpec, eps_rel: float = EPS_REL) -> ConditionReport:
    """Split-spectrum ordering: every level's lower split sublevel must stay
    above the previous level's upper one, so first-order splitting does not
    reorder the ladder."""
    gammas, table = _split_spectrum(spec)
    span = spec.energies[-1] - spec.energies[0]
    margin = eps_rel * span
    offending = []
    for n in range(1, spec.N):
        top = spec.energies[n - 1] + (gammas.get(n, 0.0) if n >= 2 else 0.0)
        bottom = spec.energies[n] - gammas[n + 1]
        if not bottom - top > margin:
            offending.append({"n_lower": n, "upper_energy": top, "lower_energy_next": bottom})
    return ConditionReport(
        condition_id="elim_no_crossing",
        passed=not offending,
        witnesses={
            "split_spectrum": table,
            "offending_pairs": offending,
            "eps_rel": eps_rel,
        },
        notes="level crossing after splitting" if offending else "",
    )


def check_elim_gap_distinct(spec: SystemSpec, eps_rel: float = EPS_REL) -> ConditionReport:
    """First-transition distinctness: the lowest split transition energy
    ``(E_2 - Gamma_2) - E_1`` must stay away from every intra-level splitting
    ``2 Gamma_n`` and from every higher adjacent split gap
    ``(E_n - Gamma_n) - (E_{n-1} + Gamma_{n-1})``, so it can be addressed
    selectively.  Zero splitting anywhere means the degeneracy is not lifted
    at all and fails outright."""
    gammas, table = _split_spectrum(spec)
    zero_levels = [n for n in range(2, spec.N + 1) if gammas[n] == 0.0]
    first_gap = (spec.energies[1] - gammas[2]) - spec.energies[0]
    comparisons = []
    distinct = True
    for n in range(2, spec.N + 1):
        other = 2.0 * gammas[n]
        scale = max(abs(first_gap), abs(other))
        ok = abs(first_gap - other) > eps_rel * scale
        distinct = distinct and ok
        comparisons.append({"kind": "2*Gamma", "n": n, "value": other, "ok": ok})
    # The adjacent-split-gap family starts at n=3: the n=2 member would be
    # the first gap itself, and a self-comparison carries no information.
    for n in range(3, spec.N + 1):
        other = (spec.energies[n - 1] - gammas[n]) - (spec.energies[n - 2] + gammas[n - 1])
        scale = max(abs(first_gap), abs(other))
        ok = abs(first_gap - other) > eps_rel * scale
        distinct = distinct and ok
        comparisons.append({"kind": "adjacent_split_gap", "n": n, "value": other, "ok": ok})
    passed = distinct and not zero_levels
    notes = []
    if zero_levels:
        notes.append(
            "splitting is zero at level"
            + ("s " if len(zero_levels) > 1 else " ")
            + ", ".join(str(n) for n in zero_levels)
        )
    if not distinct:
        notes.append("first split transition collides with another transition energy")
    notes.append(
        "adjacent-gap comparisons range over levels 3..N; the n=2 member "
        "is the first gap itself and is excluded as a self-comparison"
    )
    return ConditionReport(
        condition_id="elim_gap_distinct",
        passed=passed,
        witnesses={
            "split_spectrum": table,
            "first_gap": first_gap,
            "comparisons": comparisons,
            "zero_splitting_levels": zero_levels,
            "eps_rel": eps_rel,
        },
        notes="; ".join(notes),
    )


def check_elimination(spec: SystemSpec, eps_rel: float = EPS_REL) -> list[ConditionReport]:
    """Both degeneracy-elimination feasibility checks.

    Returns the no-crossing and gap-distinctness reports; the protocol is
    feasible only when both pass.
    """
    return [check_elim_no_crossing(spec, eps_rel), check_elim_gap_distinct(spec, eps_rel)]
