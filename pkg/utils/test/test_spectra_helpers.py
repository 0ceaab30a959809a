import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from utils.hbac_utils.hbac_errors import CompositeCapExceededError, DimensionMismatchError, InvalidParameterError
from utils.hbac_utils.spectra_utils.spectra_config import (
    bath_from_config,
    bath_to_config,
    hamiltonian_from_config,
    hamiltonian_to_config,
)
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    beta_ordering,
    composite_hamiltonian,
    fit_inverse_temperature,
    gibbs,
    mean_energy,
    product_hamiltonian,
    r3_witness,
    satisfies_R3,
)

q_values = st.floats(min_value=0.05, max_value=0.95)


class GibbsTests(unittest.TestCase):

    def test_qutrit_gibbs_at_q_half(self):
        bath = BathSpec.from_q(0.5)
        assert_allclose(gibbs(HamiltonianSpec.equally_spaced(3), bath).probs, [4 / 7, 2 / 7, 1 / 7], atol=1e-12)

    def test_two_level_gibbs_from_beta(self):
        bath = BathSpec.from_beta(math.log(2))
        assert_allclose(gibbs(HamiltonianSpec.explicit([0.0, 1.0]), bath).probs, [2 / 3, 1 / 3], atol=1e-12)

    def test_degenerate_levels_share_weight(self):
        p = gibbs(HamiltonianSpec.explicit([0.0, 1.0, 1.0]), BathSpec.from_q(0.5))
        self.assertAlmostEqual(p[1], p[2], places=14)

    @settings(max_examples=50, deadline=None)
    @given(q=q_values, d=st.integers(min_value=2, max_value=8))
    def test_gibbs_ratios_are_q(self, q, d):
        p = gibbs(HamiltonianSpec.equally_spaced(d), BathSpec.from_q(q)).array
        assert_allclose(p[1:] / p[:-1], q, rtol=1e-10)
        self.assertAlmostEqual(p.sum(), 1.0, places=12)

    def test_mean_energy(self):
        p = PopulationVector((0.0, 0.0, 1.0))
        self.assertEqual(mean_energy(p, HamiltonianSpec.equally_spaced(3, gap=2.0)), 4.0)


class ValidationTests(unittest.TestCase):

    def test_rejects_unnormalized_populations(self):
        with self.assertRaises(InvalidParameterError):
            PopulationVector((0.5, 0.6))

    def test_rejects_negative_population(self):
        with self.assertRaises(InvalidParameterError):
            PopulationVector((1.1, -0.1))

    def test_from_array_absorbs_rounding(self):
        p = PopulationVector.from_array([0.5 + 1e-11, 0.5, -1e-13])
        self.assertAlmostEqual(sum(p.probs), 1.0, places=15)
        self.assertEqual(p[2], 0.0)

    def test_rejects_unsorted_levels(self):
        with self.assertRaises(InvalidParameterError):
            HamiltonianSpec.explicit([0.0, 2.0, 1.0])

    def test_rejects_single_level(self):
        with self.assertRaises(InvalidParameterError):
            HamiltonianSpec.explicit([0.0])

    def test_rejects_inconsistent_bath(self):
        with self.assertRaises(InvalidParameterError):
            BathSpec(beta=1.0, gap=1.0, q=0.5)

    def test_rejects_q_outside_unit_interval(self):
        for q in (0.0, 1.0, 1.5):
            with self.assertRaises(InvalidParameterError):
                BathSpec.from_q(q)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            mean_energy(PopulationVector((0.5, 0.5)), HamiltonianSpec.equally_spaced(3))


class OrderingTests(unittest.TestCase):

    def setUp(self):
        self.bath = BathSpec.from_q(0.5)
        self.qutrit = HamiltonianSpec.equally_spaced(3)

    def test_subset_v_ordering(self):
        p = PopulationVector((2 / 7, 4 / 7, 1 / 7))
        self.assertEqual(beta_ordering(p, self.qutrit, self.bath), (1, 2, 0))

    def test_ties_keep_index_order(self):
        p = gibbs(self.qutrit, self.bath)
        self.assertEqual(beta_ordering(p, self.qutrit, self.bath), (0, 1, 2))

    def test_chained_near_ties_sort_consistently(self):
        flat = HamiltonianSpec.explicit([0.0, 0.0, 0.0])
        raw = np.array([1.0 - 1.8e-12, 1.0 - 0.9e-12, 1.0])
        p = PopulationVector.from_array(raw / raw.sum())
        ordering = beta_ordering(p, flat, self.bath)
        self.assertEqual(sorted(ordering), [0, 1, 2])
        self.assertLess(ordering.index(2), ordering.index(0))

    def test_gibbs_satisfies_r3(self):
        self.assertTrue(satisfies_R3(gibbs(self.qutrit, self.bath), self.qutrit, self.bath))

    def test_population_inversion_satisfies_r3(self):
        self.assertTrue(satisfies_R3(PopulationVector((0.0, 0.0, 1.0)), self.qutrit, self.bath))

    def test_cold_state_breaks_r3(self):
        p = PopulationVector((0.9, 0.08, 0.02))
        self.assertFalse(satisfies_R3(p, self.qutrit, self.bath))
        self.assertEqual(r3_witness(p, self.qutrit, self.bath), (0, 1))

    def test_unequal_degenerate_weights_break_r3(self):
        h = HamiltonianSpec.explicit([0.0, 1.0, 1.0])
        p = PopulationVector((0.2, 0.5, 0.3))
        self.assertEqual(r3_witness(p, h, self.bath), (1, 2))


class CompositeTests(unittest.TestCase):

    def test_two_qubit_composite_labels(self):
        h = composite_hamiltonian(HamiltonianSpec.equally_spaced(2), 2)
        self.assertEqual(h.levels, (0.0, 1.0, 1.0, 2.0))
        self.assertEqual(h.basis_labels, ((0, 0), (0, 1), (1, 0), (1, 1)))

    def test_system_machine_product_is_lexicographic(self):
        h = product_hamiltonian(HamiltonianSpec.equally_spaced(3), HamiltonianSpec.equally_spaced(2))
        self.assertEqual(h.levels, (0.0, 1.0, 1.0, 2.0, 2.0, 3.0))
        self.assertEqual([h.format_label(i) for i in range(6)], ["00", "01", "10", "11", "20", "21"])

    def test_single_copy_is_identity(self):
        h = HamiltonianSpec.equally_spaced(3)
        self.assertIs(composite_hamiltonian(h, 1), h)

    def test_cap(self):
        with self.assertRaises(CompositeCapExceededError):
            composite_hamiltonian(HamiltonianSpec.equally_spaced(2), 13)

    def test_composite_gibbs_is_product(self):
        bath = BathSpec.from_q(0.3)
        qubit = HamiltonianSpec.equally_spaced(2)
        single = gibbs(qubit, bath).array
        composite = gibbs(composite_hamiltonian(qubit, 3), bath)
        self.assertAlmostEqual(composite[0], single[0] ** 3, places=14)


class FitTests(unittest.TestCase):

    def test_fit_recovers_double_temperature(self):
        bath = BathSpec.from_q(0.3)
        h = HamiltonianSpec.equally_spaced(4)
        ratio, spread = fit_inverse_temperature(gibbs(h, bath.with_beta(2 * bath.beta)), h, bath)
        self.assertAlmostEqual(ratio, 2.0, places=10)
        self.assertLess(spread, 1e-10)

    def test_fit_needs_populated_pair(self):
        with self.assertRaises(InvalidParameterError):
            fit_inverse_temperature(PopulationVector((1.0, 0.0)), HamiltonianSpec.equally_spaced(2),
                                    BathSpec.from_q(0.5))


class ConfigTests(unittest.TestCase):

    def test_equally_spaced_from_config(self):
        h = hamiltonian_from_config({"KIND": "equally_spaced", "d": "4", "E": "0.5"})
        self.assertEqual(h.levels, (0.0, 0.5, 1.0, 1.5))
        self.assertEqual(hamiltonian_to_config(h), {"kind": "equally_spaced", "d": "4", "E": "0.5"})

    def test_composite_from_config(self):
        h = hamiltonian_from_config({"kind": "composite", "d": "2", "copies": "3"})
        self.assertEqual(h.dimension, 8)

    def test_composite_config_round_trip(self):
        for particle in (HamiltonianSpec.equally_spaced(2, 0.5), HamiltonianSpec.explicit([0.0, 1.0, 3.0])):
            h = composite_hamiltonian(particle, 2)
            config = hamiltonian_to_config(h)
            self.assertEqual((config["kind"], config["copies"]), ("composite", "2"))
            rebuilt = hamiltonian_from_config(config)
            self.assertEqual(rebuilt.levels, h.levels)
            self.assertEqual(rebuilt.basis_labels, h.basis_labels)

    def test_system_machine_product_stays_explicit(self):
        h = product_hamiltonian(HamiltonianSpec.equally_spaced(3), HamiltonianSpec.equally_spaced(2))
        self.assertEqual(hamiltonian_to_config(h)["kind"], "explicit")

    def test_bath_config_prefers_consistency(self):
        bath = bath_from_config({"q": "0.3"})
        self.assertAlmostEqual(bath.beta, -math.log(0.3), places=14)
        self.assertAlmostEqual(bath_from_config(bath_to_config(bath)).q, 0.3, places=14)

    def test_bath_config_needs_temperature(self):
        with self.assertRaises(InvalidParameterError):
            bath_from_config({"E": "1"})

    def test_bad_number(self):
        with self.assertRaises(InvalidParameterError):
            hamiltonian_from_config({"kind": "equally_spaced", "d": "three"})


if __name__ == '__main__':
    unittest.main()
