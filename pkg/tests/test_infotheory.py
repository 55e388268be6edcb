import math

import numpy as np
import pytest

from smps import (
    AsepParams,
    InconsistencyError,
    IsingParams,
    NotNormalizedError,
    ProbabilityTable,
    StochasticMPS,
    asep_candidate_representations,
    asep_mps,
    contract_to_table,
    entropy_cost_bracket,
    factorize_at_cut,
    ising_entropy_cost_exact,
    ising_mps,
    mutual_information,
    pinsker_gap,
    shannon_entropy,
)
from smps.verify import random_smps


def correlated_pair():
    """Two perfectly correlated bits."""
    return ProbabilityTable(
        2, 2, np.array([0.5, 0.0, 0.0, 0.5]), normalized=True
    )


class TestShannonEntropy:
    def test_point_mass(self):
        assert shannon_entropy([1.0, 0.0]) == 0.0

    def test_uniform(self):
        assert shannon_entropy([0.25] * 4) == pytest.approx(2.0, abs=1e-12)

    def test_biased_coin(self):
        h = shannon_entropy([0.9, 0.1])
        expect = -(0.9 * math.log2(0.9) + 0.1 * math.log2(0.1))
        assert h == pytest.approx(expect, abs=1e-12)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            shannon_entropy([1.1, -0.1])

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            shannon_entropy([0.5, 0.4])

    def test_unchecked_mode(self):
        assert shannon_entropy([0.5, 0.4], check=False) > 0.0

    def test_never_negative_zero(self):
        assert str(shannon_entropy([1.0])) == "0.0"


class TestMutualInformation:
    def test_product_table_is_zero(self, rng):
        m = random_smps(rng, 4, max_bond=1)
        assert mutual_information(contract_to_table(m), 2) == 0.0

    def test_correlated_pair_is_one_bit(self):
        assert mutual_information(correlated_pair(), 1) == pytest.approx(1.0, abs=1e-12)

    def test_table_and_factorization_agree(self, rng):
        for _ in range(20):
            m = random_smps(rng)
            t = contract_to_table(m)
            for cut in range(1, m.num_sites):
                a = mutual_information(t, cut)
                b = mutual_information(factorize_at_cut(m, cut))
                assert a == pytest.approx(b, abs=1e-9)

    def test_cut_required_for_table(self):
        with pytest.raises(ValueError):
            mutual_information(correlated_pair())

    def test_cut_mismatch_for_factorization(self, rng):
        f = factorize_at_cut(random_smps(rng, 4), 2)
        with pytest.raises(ValueError):
            mutual_information(f, 3)
        assert mutual_information(f, 2) == mutual_information(f)

    def test_requires_normalized_table(self):
        t = ProbabilityTable(2, 2, np.array([1.0, 0.0, 0.0, 1.0]))
        with pytest.raises(NotNormalizedError):
            mutual_information(t, 1)

    def test_requires_unit_mass_factorization(self, rng):
        m = random_smps(rng, 4)
        doubled = StochasticMPS(2, 4, tuple(t * 2.0 for t in m.tensors))
        with pytest.raises(NotNormalizedError):
            mutual_information(factorize_at_cut(doubled, 2))


class TestPinskerGap:
    def test_product_is_zero_zero(self, rng):
        m = random_smps(rng, 4, max_bond=1)
        lhs, rhs = pinsker_gap(contract_to_table(m), 2)
        assert lhs == pytest.approx(0.0, abs=1e-20)
        assert rhs == pytest.approx(0.0, abs=1e-12)

    def test_correlated_pair_values(self):
        lhs, rhs = pinsker_gap(correlated_pair(), 1)
        assert lhs == pytest.approx(1.0, abs=1e-12)
        assert rhs == pytest.approx(2.0 * math.log(2.0), abs=1e-12)

    def test_holds_on_random_two_site_tables(self):
        rng = np.random.default_rng(77)
        for _ in range(1000):
            w = rng.random(4) ** 2
            t = ProbabilityTable(2, 2, w / w.sum(), normalized=True)
            lhs, rhs = pinsker_gap(t, 1)
            assert lhs <= rhs + 1e-9

    def test_holds_on_random_stacks(self, rng):
        for _ in range(50):
            m = random_smps(rng)
            for cut in range(1, m.num_sites):
                lhs, rhs = pinsker_gap(factorize_at_cut(m, cut))
                assert lhs <= rhs + 1e-9


class TestEntropyCostBracket:
    def test_product_state_brackets_zero(self, rng):
        m = random_smps(rng, 4, max_bond=1)
        br = entropy_cost_bracket(m, 2, [("product", m)])
        assert br.lower_bound == pytest.approx(0.0, abs=1e-12)
        assert br.upper_bound == pytest.approx(0.0, abs=1e-12)
        assert br.achieved_by == "product"

    def test_ising_upper_is_closed_form(self):
        for beta in (0.5, 1.0, 3.0):
            m = ising_mps(IsingParams(beta, 2))
            br = entropy_cost_bracket(m, 1, [("two-channel", m)])
            assert br.upper_bound == pytest.approx(
                ising_entropy_cost_exact(beta), abs=1e-9
            )
            assert br.lower_bound <= br.upper_bound + 1e-9

    def test_exclusion_chain_winner_below_line(self):
        # at (0.2, 0.6) the form adapted to fast extraction carries far less
        # spectrum entropy than its mirror
        params = AsepParams(0.2, 0.6, 20)
        mps = asep_mps(params)
        cands = [(lbl, rep.to_mps()) for lbl, rep in asep_candidate_representations(params)]
        br = entropy_cost_bracket(mps, 10, cands)
        assert br.achieved_by == "II"
        assert br.upper_bound < math.log2(21.0)
        assert br.lower_bound <= br.upper_bound

    def test_mirror_point_prefers_regime_one(self):
        params = AsepParams(0.6, 0.2, 20)
        mps = asep_mps(params)
        cands = [(lbl, rep.to_mps()) for lbl, rep in asep_candidate_representations(params)]
        assert entropy_cost_bracket(mps, 10, cands).achieved_by == "I"

    def test_accepts_mapping(self, rng):
        m = random_smps(rng, 4)
        br = entropy_cost_bracket(m, 2, {"self": m})
        assert br.achieved_by == "self"

    def test_rejects_inconsistent_candidate(self, rng):
        m = random_smps(rng, 4)
        other = random_smps(rng, 4)
        with pytest.raises(InconsistencyError):
            entropy_cost_bracket(m, 2, [("self", m), ("other", other)])

    def test_rejects_shape_mismatch(self, rng):
        m = random_smps(rng, 4)
        other = random_smps(rng, 5)
        with pytest.raises(InconsistencyError):
            entropy_cost_bracket(m, 2, [("other", other)])

    def test_large_chain_requires_certified_candidates(self):
        raw = ising_mps(IsingParams(0.5, 13))
        uncertified = StochasticMPS(2, 13, raw.tensors, normalized=False)
        with pytest.raises(NotNormalizedError):
            entropy_cost_bracket(raw, 6, [("raw", uncertified)])

    def test_requires_candidates(self, rng):
        with pytest.raises(ValueError):
            entropy_cost_bracket(random_smps(rng, 4), 2, [])


class TestIsingClosedForm:
    def test_zero_coupling(self):
        assert ising_entropy_cost_exact(0.0) == 0.0

    def test_monotone_toward_one_bit(self):
        grid = np.arange(0.0, 5.01, 0.1)
        vals = [ising_entropy_cost_exact(b) for b in grid]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] == pytest.approx(1.0, abs=1e-3)

    def test_saturates(self):
        assert ising_entropy_cost_exact(30.0) == pytest.approx(1.0, abs=1e-9)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ising_entropy_cost_exact(-0.5)
