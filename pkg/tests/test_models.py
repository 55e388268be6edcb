import math

import numpy as np
import pytest

from smps import (
    AsepParams,
    IsingParams,
    StructureError,
    asep_candidate_representations,
    asep_mps,
    asep_representation,
    asep_representation_for_regime,
    asep_scalar_mps,
    contract_to_table,
    cut_spectrum,
    factorize_at_cut,
    ising_entropy_cost_exact,
    ising_mps,
    l1_distance,
    marginal,
    mutual_information,
    shannon_entropy,
    steady_state_table,
)
from smps.models import AsepRepresentation


def boltzmann_table(beta, n):
    """Direct enumeration of the open spin chain; symbol 0 is spin +1."""
    w = np.zeros(2**n)
    for idx in range(2**n):
        spins = [1 - 2 * ((idx >> (n - 1 - k)) & 1) for k in range(n)]
        energy = sum(s * t for s, t in zip(spins, spins[1:]))
        w[idx] = math.exp(-beta * energy)
    return w / w.sum()


class TestIsingParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            IsingParams(-0.1, 4)
        with pytest.raises(ValueError):
            IsingParams(1.0, 1)
        with pytest.raises(ValueError):
            IsingParams(301.0, 4)


class TestIsingMps:
    def test_zero_coupling_is_uniform(self):
        t = contract_to_table(ising_mps(IsingParams(0.0, 3)))
        np.testing.assert_allclose(t.weights, 0.125, atol=1e-14)

    def test_two_site_weights(self):
        t = contract_to_table(ising_mps(IsingParams(1.0, 2)))
        raw = np.array([math.exp(-1), math.e, math.e, math.exp(-1)])
        np.testing.assert_allclose(t.weights, raw / raw.sum(), atol=1e-13)

    def test_matches_enumeration(self):
        for beta in (0.2, 0.8, 1.7):
            for n in (2, 3, 5):
                t = contract_to_table(ising_mps(IsingParams(beta, n)))
                np.testing.assert_allclose(
                    t.weights, boltzmann_table(beta, n), atol=1e-12
                )

    def test_every_interior_cut_carries_the_optimal_pair(self):
        m = ising_mps(IsingParams(0.9, 6))
        for cut in range(1, 6):
            h = shannon_entropy(cut_spectrum(m, cut).probabilities, check=False)
            assert h == pytest.approx(ising_entropy_cost_exact(0.9), abs=1e-10)

    def test_bond_dimension_two(self):
        assert max(ising_mps(IsingParams(1.2, 5)).bond_dims) == 2


class TestAsepParams:
    def test_validation(self):
        for bad in (0.0, -0.2, 1.2):
            with pytest.raises(ValueError):
                AsepParams(bad, 0.5, 4)
            with pytest.raises(ValueError):
                AsepParams(0.5, bad, 4)
        with pytest.raises(ValueError):
            AsepParams(0.5, 0.5, 0)


class TestRegimeSelection:
    def test_tie_rules(self):
        assert asep_representation(AsepParams(0.45, 0.55, 4)).regime == "MF"
        assert asep_representation(AsepParams(0.3, 0.3, 4)).regime == "I"
        assert asep_representation(AsepParams(0.2, 0.4, 4)).regime == "II"
        assert asep_representation(AsepParams(0.8, 0.9, 4)).regime == "III"
        assert asep_representation(AsepParams(1.0, 1.0, 4)).regime == "III"

    def test_couplings(self):
        rep = asep_representation(AsepParams(0.2, 0.1, 4))
        assert rep.coupling == pytest.approx(math.sqrt(0.7))
        rep = asep_representation(AsepParams(1.0, 1.0, 4))
        assert rep.coupling == pytest.approx(1.0)
        assert asep_representation(AsepParams(0.5, 0.5, 4)).coupling == 0.0

    def test_explicit_regime_validity(self):
        with pytest.raises(ValueError):
            asep_representation_for_regime(AsepParams(0.2, 0.2, 4), "III")
        with pytest.raises(ValueError):
            asep_representation_for_regime(AsepParams(0.8, 0.8, 4), "I")
        with pytest.raises(ValueError):
            asep_representation_for_regime(AsepParams(0.3, 0.3, 4), "MF")
        with pytest.raises(ValueError):
            asep_representation_for_regime(AsepParams(0.3, 0.3, 4), "IV")

    def test_candidate_sets(self):
        labels = [l for l, _ in asep_candidate_representations(AsepParams(0.5, 0.5, 4))]
        assert labels[0] == "MF" and set(labels) == {"MF", "I", "II", "III"}
        labels = [l for l, _ in asep_candidate_representations(AsepParams(0.2, 0.3, 4))]
        assert labels[0] == "II" and set(labels) == {"I", "II"}
        labels = [l for l, _ in asep_candidate_representations(AsepParams(0.9, 0.9, 4))]
        assert labels == ["III"]


class TestRepresentationAlgebra:
    def test_invariants_over_grid(self):
        kink = np.zeros((2, 2))
        kink[1, 1] = 1.0
        for a in np.arange(0.1, 1.0, 0.1):
            for b in np.arange(0.1, 1.0, 0.1):
                params = AsepParams(round(float(a), 12), round(float(b), 12), 5)
                for _, rep in asep_candidate_representations(params):
                    occ, emp = rep.occupied_matrix, rep.empty_matrix
                    if rep.bond_dim == 1:
                        resid = abs(occ[0, 0] * emp[0, 0] - occ[0, 0] - emp[0, 0])
                    else:
                        resid = np.abs(
                            occ[:2, :2] @ emp[:2, :2] + kink - occ[:2, :2] - emp[:2, :2]
                        ).max()
                    assert resid <= 1e-12
                    assert np.abs(rep.left_vector @ emp - rep.left_vector / params.alpha).max() <= 1e-12
                    assert np.abs(occ @ rep.right_vector - rep.right_vector / params.beta).max() <= 1e-12
                    assert emp.min() >= 0.0 and occ.min() >= 0.0

    def test_constructor_rejects_broken_algebra(self):
        with pytest.raises(StructureError):
            AsepRepresentation(
                "I", 0.3, 0.3, 2, 0.0,
                np.eye(3), np.eye(3), np.array([1.0, 0, 0]), np.array([1.0, 0, 0]),
            )

    def test_bond_dim(self):
        assert asep_representation(AsepParams(0.3, 0.2, 7)).bond_dim == 8
        assert asep_representation(AsepParams(0.5, 0.5, 7)).bond_dim == 1


class TestSteadyStateStacks:
    def test_single_site(self):
        t = contract_to_table(asep_mps(AsepParams(0.3, 0.6, 1)))
        np.testing.assert_allclose(t.weights, [2 / 3, 1 / 3], atol=1e-12)

    def test_matches_oracle_all_regimes(self):
        for a, b in ((0.2, 0.7), (0.7, 0.2), (0.3, 0.3), (0.4, 0.6), (0.9, 0.8), (1.0, 1.0)):
            for n in (2, 4, 7):
                params = AsepParams(a, b, n)
                dist = l1_distance(
                    contract_to_table(asep_mps(params)), steady_state_table(params)
                )
                assert dist <= 1e-10

    def test_all_candidate_forms_agree(self):
        params = AsepParams(0.25, 0.35, 6)
        tables = [
            contract_to_table(rep.to_mps()).weights
            for _, rep in asep_candidate_representations(params)
        ]
        for other in tables[1:]:
            assert np.abs(tables[0] - other).sum() <= 1e-10

    def test_regime_boundary_continuity(self):
        # forms I and II coincide on the diagonal
        params = AsepParams(0.35, 0.35, 6)
        one = contract_to_table(asep_representation_for_regime(params, "I").to_mps())
        two = contract_to_table(asep_representation_for_regime(params, "II").to_mps())
        assert l1_distance(one, two) <= 1e-10

    def test_mean_field_is_bernoulli_product(self):
        params = AsepParams(0.4, 0.6, 8)
        t = contract_to_table(asep_scalar_mps(params))
        for site in range(1, 9):
            np.testing.assert_allclose(marginal(t, [site]).weights, [0.6, 0.4], atol=1e-12)
        assert mutual_information(factorize_at_cut(asep_scalar_mps(params), 4)) <= 1e-12

    def test_scalar_form_off_line_rejected(self):
        with pytest.raises(ValueError):
            asep_scalar_mps(AsepParams(0.3, 0.3, 4))

    def test_scalar_and_default_agree_on_line(self):
        params = AsepParams(0.25, 0.75, 6)
        dist = l1_distance(
            contract_to_table(asep_scalar_mps(params)),
            contract_to_table(asep_mps(params)),
        )
        assert dist <= 1e-12

    def test_diagonal_point_explicit_regime_three(self):
        # the alpha = beta = 1/2 corner of regime III has zero coupling and
        # degenerates to the same product state the scalar form gives
        params = AsepParams(0.5, 0.5, 5)
        rep = asep_representation_for_regime(params, "III")
        assert rep.coupling == 0.0
        dist = l1_distance(
            contract_to_table(rep.to_mps()), contract_to_table(asep_scalar_mps(params))
        )
        assert dist <= 1e-12

    def test_spectrum_entropy_log_bound_smoke(self):
        for a, b in ((0.2, 0.6), (0.8, 0.7), (0.3, 0.3)):
            for n in (4, 9):
                m = asep_mps(AsepParams(a, b, n))
                for cut in range(1, n):
                    h = shannon_entropy(cut_spectrum(m, cut).probabilities, check=False)
                    assert h <= math.log2(n + 1.0) + 1e-12
