import unittest

from utils.hbac_utils.hbac_errors import InvalidParameterError, PremiseViolationError
from utils.hbac_utils.nogo_utils.nogo_helpers import (
    Premises,
    counterexample_margins,
    counterexample_r2,
    evaluate_instance,
    three_qubit_example,
    three_qubit_populations,
    verify_theorem2,
    verify_theorem3,
)
from utils.hbac_utils.nogo_utils.nogo_sweeps import theorem2_sweep, theorem3_sweep, verdict_rows, verdict_table
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    composite_hamiltonian,
    gibbs,
    r3_witness,
)

QUTRIT = HamiltonianSpec.equally_spaced(3)


class BoundTests(unittest.TestCase):

    def setUp(self):
        self.bath = BathSpec.from_q(0.3)

    def test_gibbs_input_meets_the_bound(self):
        verdict = verify_theorem2(QUTRIT, QUTRIT, gibbs(QUTRIT, self.bath), self.bath)
        self.assertTrue(verdict.bound_holds)
        self.assertAlmostEqual(verdict.p0_star, verdict.tau0_S, places=12)

    def test_population_inversion_stays_below_gibbs(self):
        verdict = verify_theorem2(QUTRIT, HamiltonianSpec.equally_spaced(2), PopulationVector((0.0, 0.0, 1.0)),
                                  self.bath, label="inverted")
        self.assertTrue(verdict.bound_holds)
        self.assertGreaterEqual(verdict.margin, 0.0)
        self.assertEqual(verdict.to_row()["instance"], "inverted")

    def test_larger_molecule_breaks_r1(self):
        with self.assertRaises(PremiseViolationError) as raised:
            verify_theorem2(HamiltonianSpec.equally_spaced(2), QUTRIT, PopulationVector((0.5, 0.5)), self.bath)
        self.assertEqual(raised.exception.premises.failing(), ["R1", "R2"])

    def test_composite_bound(self):
        qubit = HamiltonianSpec.equally_spaced(2)
        h = composite_hamiltonian(qubit, 3)
        verdict = verify_theorem3(qubit, 3, 2, gibbs(h, self.bath), self.bath)
        self.assertTrue(verdict.bound_holds)

    def test_equal_dimensions_meet_the_bound_for_hotter_gibbs(self):
        hotter = self.bath.with_beta(self.bath.beta / 2)
        for d in (3, 4):
            h = HamiltonianSpec.equally_spaced(d)
            verdict = verify_theorem2(h, h, gibbs(h, hotter), self.bath)
            self.assertAlmostEqual(verdict.margin, 0.0, places=12)

    def test_composite_equality_at_equal_copies(self):
        qubit = HamiltonianSpec.equally_spaced(2)
        h = composite_hamiltonian(qubit, 2)
        verdict = verify_theorem3(qubit, 2, 2, gibbs(h, self.bath), self.bath)
        self.assertAlmostEqual(verdict.margin, 0.0, places=12)

    def test_single_copy_molecule_stays_strictly_below(self):
        qubit = HamiltonianSpec.equally_spaced(2)
        h = composite_hamiltonian(qubit, 2)
        hotter = self.bath.with_beta(self.bath.beta / 2)
        verdict = verify_theorem3(qubit, 2, 1, gibbs(h, hotter), self.bath)
        self.assertTrue(verdict.bound_holds)
        self.assertGreater(verdict.margin, 1e-6)

    def test_composite_copies_must_be_ordered(self):
        with self.assertRaises(InvalidParameterError):
            verify_theorem3(HamiltonianSpec.equally_spaced(2), 1, 2, PopulationVector((0.5, 0.5)), self.bath)

    def test_composite_state_breaking_r3(self):
        _, p = three_qubit_populations(0.6, self.bath)
        with self.assertRaises(PremiseViolationError) as raised:
            verify_theorem3(HamiltonianSpec.equally_spaced(2), 3, 3, p, self.bath)
        self.assertEqual(raised.exception.premises, Premises(True, True, False))


class CounterexampleTests(unittest.TestCase):

    def test_spectrum_mismatch_beats_bound(self):
        for q, expected in ((0.5, (0.8, 4 / 7)), (0.3, (1 / 1.09, 1 / 1.39))):
            p0_out, tau0_S = counterexample_r2(BathSpec.from_q(q))
            self.assertAlmostEqual(p0_out, expected[0], places=12)
            self.assertAlmostEqual(tau0_S, expected[1], places=12)

    def test_margin_near_infinite_temperature(self):
        q = 0.999
        p0_out, tau0_S = counterexample_r2(BathSpec.from_q(q))
        self.assertAlmostEqual(p0_out - tau0_S, 1 / (1 + q ** 2) - 1 / (1 + q + q ** 2), places=12)

    def test_margins_are_positive_on_grid(self):
        rows = counterexample_margins()
        self.assertEqual(len(rows), 9)
        self.assertTrue(all(row["margin"] > 0 for row in rows))

    def test_oracle_flags_the_mismatch(self):
        bath = BathSpec.from_q(0.5)
        molecule = HamiltonianSpec(levels=(0.0, 2.0))
        verdict = evaluate_instance(QUTRIT, molecule, PopulationVector((0.0, 0.0, 1.0)), bath)
        self.assertEqual(verdict.premises.failing(), ["R2"])
        self.assertFalse(verdict.bound_holds)

    def test_three_qubit_example(self):
        bath = BathSpec.from_q(0.5)
        p_out, tau0_S = three_qubit_example(0.6, bath)
        self.assertAlmostEqual(p_out, 0.302881, places=6)
        self.assertAlmostEqual(tau0_S, 8 / 27, places=12)

    def test_three_qubit_witness_levels(self):
        bath = BathSpec.from_q(0.5)
        h, p = three_qubit_populations(0.6, bath)
        first, second = r3_witness(p, h, bath)
        self.assertEqual((h.format_label(first), h.format_label(second)), ("100", "011"))

    def test_three_qubit_thermal_input(self):
        bath = BathSpec.from_q(0.5)
        p_out, tau0_S = three_qubit_example(2 / 3, bath)
        self.assertAlmostEqual(p_out, tau0_S, places=12)

    def test_three_qubit_rejects_hot_start_above_thermal(self):
        with self.assertRaises(InvalidParameterError):
            three_qubit_example(0.9, BathSpec.from_q(0.5))


class SweepTests(unittest.TestCase):

    def setUp(self):
        self.bath = BathSpec.from_q(0.4)

    def test_random_instances_respect_the_bound(self):
        verdicts = theorem2_sweep(self.bath, count=25, seed=3)
        self.assertEqual(len(verdicts), 25)
        self.assertTrue(all(v.bound_holds for v in verdicts))

    def test_random_composites_respect_the_bound(self):
        verdicts = theorem3_sweep(self.bath, count=8, seed=5)
        self.assertTrue(all(v.bound_holds for v in verdicts))

    def test_sweep_is_reproducible(self):
        first = [v.p0_star for v in theorem2_sweep(self.bath, count=5, seed=11)]
        second = [v.p0_star for v in theorem2_sweep(self.bath, count=5, seed=11)]
        self.assertEqual(first, second)

    def test_table(self):
        verdicts = theorem2_sweep(self.bath, count=3, seed=0)
        self.assertEqual(len(verdict_rows(verdicts)), 3)
        self.assertIn("p0_star", verdict_table(verdicts))


if __name__ == '__main__':
    unittest.main()
