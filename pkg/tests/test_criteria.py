"""Sufficient-condition checkers validated against commutator-chain oracles.

The equal-gap parameter machinery (K^2, nu, b, G blocks) is cross-checked by
building the corresponding operators explicitly and reading the coefficients
off double commutators:

    V1 = mu^-1 [iH0, iHI]          (y-type ladder combination)
    V0 = 1/2 [V1, iHI]             (diagonal carries K^2; intra x's carry -b)
    V2 = mu^-1 [iH0, [V1, V0]]     (y-coefficients transform as G_i @ d_i)

and the distinct-gap inequality by the analogous chain ending in

    V3 = mu1^-1 [iH0, [V2, iHI - V1']]

whose x-coefficients are (p d_{21,31} + q d_{21,32}) and
(p d_{22,31} + q d_{22,32}) -- x-type because each bracket of an x with a
y sharing one index flips the type.
"""
from __future__ import annotations

import numpy as np
import pytest

import qdctl as q
from qdctl.criteria import equal_gap_parameters
from qdctl.errors import InvalidSpecError
from qdctl.hamiltonians import build_h0, build_hi
from qdctl.hilbert import (
    LevelIndex,
    commutator,
    degeneracy,
    frobenius_inner,
    make_x,
    make_y,
)


def _y_coefficient(op, a, b, N):
    """Coefficient of y_{ab} in an operator (the y's have Frobenius norm^2 2)."""
    return frobenius_inner(make_y(a, b, N), op) / 2.0


def _x_coefficient(op, a, b, N):
    return frobenius_inner(make_x(a, b, N), op) / 2.0


def _band_pairs(spec, i):
    """Adjacent-level index pairs of band i in (j,k) = (1,1),(1,2),(2,1),(2,2) order."""
    return [
        ((i, j), (i + 1, k))
        for j in range(1, degeneracy(i) + 1)
        for k in range(1, degeneracy(i + 1) + 1)
    ]


def _random_equal_gap_spec(N, seed):
    rng = np.random.default_rng(seed)
    dipoles = {}
    for i in range(1, N):
        for j in range(1, degeneracy(i) + 1):
            for k in (1, 2):
                dipoles[(i, j, k)] = float(rng.uniform(-2.0, 2.0))
    e0 = float(rng.uniform(-1.0, 1.0))
    mu = float(rng.uniform(0.5, 2.0))
    return q.SystemSpec(
        N=N, energies=[e0 + n * mu for n in range(N)], dipoles=dipoles
    )


class TestLemma1:
    def test_identity_pattern_passes(self):
        spec = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 2.0],
            dipoles={(2, 1, 1): 1.0, (2, 2, 2): 1.0},
        )
        report = q.check_lemma1(spec)
        assert report.passed
        assert report.witnesses["determinants"][0]["value"] == pytest.approx(1.0)

    def test_all_equal_couplings_fail(self):
        spec = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 2.0],
            dipoles={(2, j, k): 1.0 for j in (1, 2) for k in (1, 2)},
        )
        report = q.check_lemma1(spec)
        assert not report.passed
        assert report.witnesses["determinants"][0]["value"] == pytest.approx(0.0)

    def test_square_root_profile_determinant(self, demo3):
        # d_{21,31}=sqrt2, d_{21,32}=1, d_{22,31}=1, d_{22,32}=0 -> det = -1
        report = q.check_lemma1(demo3)
        assert report.passed
        assert report.witnesses["determinants"][0]["value"] == pytest.approx(-1.0)

    def test_two_level_vacuous(self):
        spec = q.SystemSpec(N=2, energies=[0.0, 1.0], dipoles={(1, 1, 1): 1.0})
        report = q.check_lemma1(spec)
        assert "vacuous" in report.notes

    def test_condition_id(self, demo3):
        assert q.check_lemma1(demo3).condition_id == "lemma1"


class TestTheorem1:
    def test_symmetric_couplings_equal_sides(self):
        spec = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 2.5],
            dipoles={
                (1, 1, 1): 1.0,
                (1, 1, 2): 1.0,
                (2, 1, 1): 1.0,
                (2, 1, 2): 1.0,
                (2, 2, 1): 1.0,
                (2, 2, 2): 1.0,
            },
        )
        report = q.check_theorem1(spec)
        assert not report.passed
        assert report.witnesses["p"] == pytest.approx(2.0)
        assert report.witnesses["q"] == pytest.approx(2.0)
        assert report.witnesses["lhs"] == pytest.approx(4.0)
        assert report.witnesses["rhs"] == pytest.approx(4.0)

    def test_documented_failing_arithmetic(self):
        spec = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 2.5],
            dipoles={
                (1, 1, 1): 1.0,
                (1, 1, 2): 2.0,
                (2, 1, 1): 1.0,
                (2, 1, 2): 0.0,
                (2, 2, 1): 0.0,
                (2, 2, 2): 1.0,
            },
        )
        report = q.check_theorem1(spec)
        assert not report.passed
        assert report.witnesses["p"] == pytest.approx(1.0)
        assert report.witnesses["q"] == pytest.approx(2.0)
        assert report.witnesses["lhs"] == pytest.approx(2.0)
        assert report.witnesses["rhs"] == pytest.approx(2.0)

    def test_equal_gaps_fail_gap_clause(self, demo3):
        report = q.check_theorem1(demo3)
        assert not report.passed
        assert "gap" in report.notes

    def test_passing_instance_is_controllable(self):
        spec = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 2.5],
            dipoles={
                (1, 1, 1): 1.0,
                (1, 1, 2): 1.0,
                (2, 1, 1): 1.0,
                (2, 1, 2): 0.0,
                (2, 2, 1): 0.0,
                (2, 2, 2): 2.0,
            },
        )
        report = q.check_theorem1(spec)
        assert report.passed
        assert report.witnesses["lhs"] == pytest.approx(4.0)
        assert report.witnesses["rhs"] == pytest.approx(1.0)
        assert q.is_completely_controllable(spec).controllable

    def test_two_level_inapplicable(self):
        spec = q.SystemSpec(N=2, energies=[0.0, 1.0], dipoles={(1, 1, 1): 1.0})
        report = q.check_theorem1(spec)
        assert not report.passed
        assert "inapplicable" in report.notes

    @pytest.mark.parametrize("scale", [1e-3, 1.0, 1e3])
    def test_verdict_invariant_under_dipole_scaling(self, scale):
        base = {
            (1, 1, 1): 0.3,
            (1, 1, 2): -1.1,
            (2, 1, 1): 0.9,
            (2, 1, 2): 0.2,
            (2, 2, 1): -0.5,
            (2, 2, 2): 1.4,
        }
        spec1 = q.SystemSpec(N=3, energies=[0.0, 1.0, 2.5], dipoles=base)
        spec2 = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 2.5],
            dipoles={k: scale * v for k, v in base.items()},
        )
        r1, r2 = q.check_theorem1(spec1), q.check_theorem1(spec2)
        assert r1.passed == r2.passed
        assert r2.witnesses["p"] == pytest.approx(scale**2 * r1.witnesses["p"], rel=1e-12)
        assert r2.witnesses["q"] == pytest.approx(scale**2 * r1.witnesses["q"], rel=1e-12)
        assert r2.witnesses["lhs"] == pytest.approx(scale**4 * r1.witnesses["lhs"], rel=1e-12)
        assert r2.witnesses["rhs"] == pytest.approx(scale**4 * r1.witnesses["rhs"], rel=1e-12)
        assert q.check_lemma1(spec1).passed == q.check_lemma1(spec2).passed


@pytest.mark.parametrize("seed", [1, 5, 9])
def test_theorem1_inequality_matches_commutator_chain(seed):
    """p, q and both inequality sides appear as coefficients of explicit
    double commutators of the generators."""
    rng = np.random.default_rng(seed)
    N = 3
    dipoles = {
        (1, 1, 1): float(rng.uniform(0.2, 2.0)),
        (1, 1, 2): float(rng.uniform(0.2, 2.0)),
        (2, 1, 1): float(rng.uniform(-2.0, 2.0)),
        (2, 1, 2): float(rng.uniform(-2.0, 2.0)),
        (2, 2, 1): float(rng.uniform(-2.0, 2.0)),
        (2, 2, 2): float(rng.uniform(-2.0, 2.0)),
    }
    spec = q.SystemSpec(N=N, energies=[0.0, 1.0, 2.5], dipoles=dipoles)
    report = q.check_theorem1(spec)
    mu1 = q.energy_gaps(spec)[0]

    ih0 = 1j * build_h0(spec).entries
    ihi = 1j * build_hi(spec).entries
    v1_prime = (
        dipoles[(1, 1, 1)] * make_x((1, 1), (2, 1), N).entries
        + dipoles[(1, 1, 2)] * make_x((1, 1), (2, 2), N).entries
    )
    v1 = (ih0 @ v1_prime - v1_prime @ ih0) / mu1
    rest = ihi - v1_prime
    v2 = v1 @ rest - rest @ v1
    p_oracle = _x_coefficient(v2, (1, 1), (3, 1), N)
    q_oracle = _x_coefficient(v2, (1, 1), (3, 2), N)
    assert p_oracle == pytest.approx(report.witnesses["p"], rel=1e-12, abs=1e-12)
    assert q_oracle == pytest.approx(report.witnesses["q"], rel=1e-12, abs=1e-12)

    inner = v2 @ rest - rest @ v2
    v3 = (ih0 @ inner - inner @ ih0) / mu1
    a_coef = _x_coefficient(v3, (1, 1), (2, 1), N)  # p d_{21,31} + q d_{21,32}
    b_coef = _x_coefficient(v3, (1, 1), (2, 2), N)  # p d_{22,31} + q d_{22,32}
    lhs_oracle = dipoles[(1, 1, 1)] * b_coef
    rhs_oracle = dipoles[(1, 1, 2)] * a_coef
    assert lhs_oracle == pytest.approx(report.witnesses["lhs"], rel=1e-12, abs=1e-12)
    assert rhs_oracle == pytest.approx(report.witnesses["rhs"], rel=1e-12, abs=1e-12)


class TestEqualGapParameters:
    def test_worked_first_block(self, worked_spec):
        pars = equal_gap_parameters(worked_spec)
        assert pars.G[0] == pytest.approx(np.array([[-5.0, -2.0], [-2.0, -8.0]]))
        assert pars.lambdas[0] == pytest.approx([-9.0, -4.0], abs=1e-10)
        assert pars.b[0] == 0.0
        assert pars.b[1] == pytest.approx(2.0)
        assert pars.b[2] == pytest.approx(0.0)

    def test_worked_level_constants(self, worked_spec):
        pars = equal_gap_parameters(worked_spec)
        K2 = {(key.n, key.k): v for key, v in pars.K2.items()}
        assert K2[(1, 1)] == pytest.approx(5.0)   # 1 + 4
        assert K2[(2, 1)] == pytest.approx(0.0)   # (1+0) - 1
        assert K2[(2, 2)] == pytest.approx(-3.0)  # (0+1) - 4
        assert K2[(3, 1)] == pytest.approx(-1.0)  # -(1+0)
        assert K2[(3, 2)] == pytest.approx(-1.0)  # -(0+1)

    def test_worked_nu_differences(self, worked_spec):
        pars = equal_gap_parameters(worked_spec)
        nu = {
            ((a.n, a.k), (b.n, b.k)): v for (a, b), v in pars.nu.items()
        }
        assert nu[((1, 1), (2, 1))] == pytest.approx(-5.0)
        assert nu[((1, 1), (2, 2))] == pytest.approx(-8.0)
        assert nu[((2, 1), (3, 1))] == pytest.approx(-1.0)
        assert nu[((2, 2), (3, 2))] == pytest.approx(2.0)

    def test_all_zero_dipoles(self):
        spec = q.SystemSpec(N=3, energies=[0.0, 1.0, 2.0])
        pars = equal_gap_parameters(spec)
        assert all(v == 0.0 for v in pars.K2.values())
        assert all(v == 0.0 for v in pars.nu.values())
        assert all(v == 0.0 for v in pars.b)
        for block, lam in zip(pars.G, pars.lambdas):
            assert np.max(np.abs(block)) == 0.0
            assert np.max(np.abs(lam)) == 0.0

    def test_unequal_gaps_rejected(self):
        spec = q.SystemSpec(N=3, energies=[0.0, 1.0, 2.5], dipoles={(1, 1, 1): 1.0})
        with pytest.raises(InvalidSpecError):
            equal_gap_parameters(spec)

    def test_two_level_rejected(self):
        spec = q.SystemSpec(N=2, energies=[0.0, 1.0], dipoles={(1, 1, 1): 1.0})
        with pytest.raises(InvalidSpecError):
            equal_gap_parameters(spec)

    @pytest.mark.parametrize("seed", [0, 3])
    @pytest.mark.parametrize("N", [3, 4, 5])
    def test_blocks_symmetric_and_consistent(self, N, seed):
        pars = equal_gap_parameters(_random_equal_gap_spec(N, seed))
        assert len(pars.G) == N - 1
        for i, block in enumerate(pars.G):
            assert np.array_equal(block, block.T)
            # U^T diag(lambda) U reproduces G
            recon = pars.U[i].T @ np.diag(pars.lambdas[i]) @ pars.U[i]
            assert np.max(np.abs(recon - block)) < 1e-10
            # eigenvalues ascending
            assert np.all(np.diff(pars.lambdas[i]) >= 0)

    @pytest.mark.parametrize("scale", [1e-3, 1e3])
    def test_parameters_scale_quadratically(self, worked_spec, scale):
        scaled = q.SystemSpec(
            N=3,
            energies=worked_spec.energies,
            dipoles={k: scale * v for k, v in worked_spec.dipoles.items()},
        )
        base = equal_gap_parameters(worked_spec)
        got = equal_gap_parameters(scaled)
        for key in base.K2:
            assert got.K2[key] == pytest.approx(scale**2 * base.K2[key], rel=1e-12)
        for i in range(len(base.b)):
            assert got.b[i] == pytest.approx(scale**2 * base.b[i], rel=1e-12)
        for i in range(len(base.lambdas)):
            assert got.lambdas[i] == pytest.approx(scale**2 * base.lambdas[i], rel=1e-12)


@pytest.mark.parametrize("N,seed", [(3, 2), (3, 7), (4, 2), (4, 11), (5, 4)])
def test_level_constants_match_double_commutator(N, seed):
    """K^2 and b read off V0 = 1/2 [V1, iHI] agree with the parameter block."""
    spec = _random_equal_gap_spec(N, seed)
    pars = equal_gap_parameters(spec)
    mu = q.energy_gaps(spec)[0]

    ih0 = 1j * build_h0(spec).entries
    ihi = 1j * build_hi(spec).entries
    v1 = (ih0 @ ihi - ihi @ ih0) / mu
    v0 = 0.5 * (v1 @ ihi - ihi @ v1)

    # diagonal entries are i K^2_{(n,k)}
    for idx, value in pars.K2.items():
        pos = q.flat_index(idx, N)
        assert v0[pos, pos].imag == pytest.approx(value, rel=1e-12, abs=1e-12)
        assert abs(v0[pos, pos].real) < 1e-12
    # the intra-level x coefficient at level n is -b_{n-1}
    for n in range(2, N + 1):
        coef = _x_coefficient(v0, (n, 1), (n, 2), N)
        assert coef == pytest.approx(-pars.b[n - 1], rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("N,seed", [(3, 2), (3, 7), (4, 2), (4, 11), (5, 4)])
def test_g_blocks_match_triple_commutator(N, seed):
    """The y-coefficients of mu^-1 [iH0, [V1, V0]] equal G_i @ d_i per band."""
    spec = _random_equal_gap_spec(N, seed)
    pars = equal_gap_parameters(spec)
    mu = q.energy_gaps(spec)[0]

    ih0 = 1j * build_h0(spec).entries
    ihi = 1j * build_hi(spec).entries
    v1 = (ih0 @ ihi - ihi @ ih0) / mu
    v0 = 0.5 * (v1 @ ihi - ihi @ v1)
    inner = v1 @ v0 - v0 @ v1
    v2 = (ih0 @ inner - inner @ ih0) / mu

    for i in range(1, N):
        pairs = _band_pairs(spec, i)
        d_vec = np.array([spec.dipole(a[0], a[1], b[1]) for a, b in pairs])
        got = np.array([_y_coefficient(v2, a, b, N) for a, b in pairs])
        expected = pars.G[i - 1] @ d_vec
        assert got == pytest.approx(expected, rel=1e-10, abs=1e-10)


class TestTheorem2:
    def test_worked_spec_fails_on_coupling_and_degeneracy(self, worked_spec):
        report = q.check_theorem2(worked_spec)
        assert not report.passed
        # first-block eigenvalues are fine (-9, -4) but the transformed
        # coupling C_{11,22} = (2*1 - 1*2)/sqrt5 vanishes, and the second
        # block's eigenvalues are pairwise degenerate
        assert report.witnesses["first_block_distinct"]
        assert not report.witnesses["first_couplings_nonzero"]
        assert not report.witnesses["global_distinct"]
        c_first = report.witnesses["C"]["1"]
        assert abs(c_first[0]) == pytest.approx(np.sqrt(5.0), rel=1e-12)
        assert abs(c_first[1]) < 1e-12

    def test_symmetric_dipoles_fail_determinant_clause(self):
        spec = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 2.0],
            dipoles={(n, j, k): 1.0 for n in (1, 2) for j in range(1, degeneracy(n) + 1) for k in (1, 2)},
        )
        report = q.check_theorem2(spec)
        assert not report.passed
        assert not report.witnesses["lemma1_pass"]

    def test_demo_family_consistent_with_oracle(self, demo3):
        report = q.check_theorem2(demo3)
        if report.passed:
            assert q.is_completely_controllable(demo3).controllable

    def test_unequal_gaps_rejected(self):
        spec = q.SystemSpec(N=3, energies=[0.0, 1.0, 2.5], dipoles={(1, 1, 1): 1.0})
        with pytest.raises(InvalidSpecError):
            q.check_theorem2(spec)

    def test_two_level_inapplicable(self):
        spec = q.SystemSpec(N=2, energies=[0.0, 1.0], dipoles={(1, 1, 1): 1.0})
        report = q.check_theorem2(spec)
        assert not report.passed
        assert "inapplicable" in report.notes


@pytest.mark.parametrize("regime", ["distinct_first_gap", "equal_gaps"])
def test_sufficiency_never_contradicts_closure(regime):
    """A checker pass must imply closure-oracle controllability."""
    rng = np.random.default_rng(99 if regime == "equal_gaps" else 42)
    checked = 0
    for _ in range(60):
        N = int(rng.integers(3, 5))
        dipoles = {}
        for i in range(1, N):
            for j in range(1, degeneracy(i) + 1):
                for k in (1, 2):
                    v = float(rng.uniform(-2.0, 2.0))
                    if rng.random() < 0.15:
                        v = 0.0
                    dipoles[(i, j, k)] = v
        if regime == "equal_gaps":
            mu = float(rng.uniform(0.5, 2.0))
            energies = [n * mu for n in range(N)]
            spec = q.SystemSpec(N=N, energies=energies, dipoles=dipoles)
            report = q.check_theorem2(spec)
        else:
            energies = [0.0, float(rng.uniform(1.5, 3.0))]
            for _ in range(N - 2):
                energies.append(energies[-1] + float(rng.uniform(0.3, 1.2)))
            spec = q.SystemSpec(N=N, energies=energies, dipoles=dipoles)
            report = q.check_theorem1(spec)
        if report.passed:
            checked += 1
            assert q.is_completely_controllable(spec).controllable
    assert checked > 5  # the regime generator produces passing instances


class TestEliminationChecks:
    def test_crossing_detected(self):
        spec = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 1.05],
            excitation_intra={2: 0.1, 3: 0.01},
        )
        report = q.check_elim_no_crossing(spec)
        assert not report.passed
        assert report.witnesses["offending_pairs"]
        pair = report.witnesses["offending_pairs"][0]
        assert pair["upper_energy"] == pytest.approx(1.1)
        assert pair["lower_energy_next"] == pytest.approx(1.04)

    def test_two_level_split_passes(self):
        spec = q.SystemSpec(N=2, energies=[0.0, 1.0], excitation_intra={2: 0.001})
        reports = q.check_elimination(spec)
        assert [r.condition_id for r in reports] == [
            "elim_no_crossing",
            "elim_gap_distinct",
        ]
        assert all(r.passed for r in reports)
        gap_report = reports[1]
        assert gap_report.witnesses["first_gap"] == pytest.approx(0.999)

    def test_split_spectrum_table(self):
        spec = q.SystemSpec(N=2, energies=[0.0, 1.0], excitation_intra={2: 0.001})
        table = q.check_elim_no_crossing(spec).witnesses["split_spectrum"]
        energies = [row["energy"] for row in table]
        assert energies == pytest.approx([0.0, 0.999, 1.001])

    def test_zero_splitting_fails_with_note(self):
        spec = q.SystemSpec(N=3, energies=[0.0, 1.0, 2.0])
        report = q.check_elim_gap_distinct(spec)
        assert not report.passed
        assert "splitting is zero at level" in report.notes
        assert report.witnesses["zero_splitting_levels"] == [2, 3]

    def test_collision_with_intra_splitting(self):
        # first gap = 1 - 0.25 = 0.75; 2*Gamma_3 = 0.75 collides
        spec = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 3.0],
            excitation_intra={2: 0.25, 3: 0.375},
        )
        report = q.check_elim_gap_distinct(spec)
        assert not report.passed
        kinds = [c for c in report.witnesses["comparisons"] if not c["ok"]]
        assert any(c["kind"] == "2*Gamma" and c["n"] == 3 for c in kinds)

    def test_clean_three_level_passes_both(self):
        spec = q.SystemSpec(
            N=3,
            energies=[0.0, 1.0, 2.3],
            excitation_intra={2: 0.01, 3: 0.02},
        )
        reports = q.check_elimination(spec)
        assert all(r.passed for r in reports)


class TestConditionReportSerialization:
    def test_json_fields(self, demo3):
        payload = q.check_lemma1(demo3).to_json_dict()
        assert payload["condition_id"] == "lemma1"
        assert payload["pass"] is True
        assert "witnesses" in payload and "notes" in payload

    def test_complex_witnesses_jsonable(self, worked_spec):
        import json

        payload = q.check_theorem2(worked_spec).to_json_dict()
        json.dumps(payload)  # must not raise

    def test_condition_ids_cover_enum(self, demo3):
        ids = {
            q.check_lemma1(demo3).condition_id,
            q.check_theorem1(demo3).condition_id,
            q.check_theorem2(demo3).condition_id,
        }
        ids.update(r.condition_id for r in q.check_elimination(demo3))
        assert ids == {
            "lemma1",
            "theorem1",
            "theorem2",
            "elim_no_crossing",
            "elim_gap_distinct",
        }
