import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from utils.hbac_utils.collision_utils.channel_text import dumps_channel, loads_channel
from utils.hbac_utils.collision_utils.collision_helpers import (
    apply_collision,
    build_channel,
    channel_from_label_map,
    collide_joint,
    collision_matrix,
    decompose_subspaces,
    identity_channel,
    iterate_collisions,
    joint_energy,
    joint_populations,
    mixture_block,
    permutation_block,
    validate_channel,
)
from utils.hbac_utils.collision_utils.collision_oracle import (
    exhaustive_single_collision,
    greedy_single_collision,
    optimal_single_collision,
    optimal_single_collision_with_fallback,
    subset_single_collision,
)
from utils.hbac_utils.hbac_errors import InvalidParameterError, SubspaceCapExceededError
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    composite_hamiltonian,
    gibbs,
)

QUBIT = HamiltonianSpec.equally_spaced(2)
QUTRIT = HamiltonianSpec.equally_spaced(3)


def resonant_swap(strength):
    block = np.array([[1 - strength, strength], [strength, 1 - strength]])
    return build_channel(QUBIT, QUBIT, {1: block})


def simplex_points(d):
    return st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=d, max_size=d).filter(
        lambda values: sum(values) > 1e-3
    ).map(lambda values: PopulationVector.from_array(np.array(values) / sum(values)))


class SubspaceTests(unittest.TestCase):

    def test_qutrit_pair_shells(self):
        subspaces = decompose_subspaces(QUTRIT, QUTRIT)
        self.assertEqual([s.size for s in subspaces], [1, 2, 3, 2, 1])
        self.assertEqual(subspaces[2].basis, ((0, 2), (1, 1), (2, 0)))

    def test_shells_cover_every_label(self):
        h = HamiltonianSpec.explicit([0.0, 1.0, 3.0])
        labels = [label for s in decompose_subspaces(h, QUBIT) for label in s.basis]
        self.assertEqual(sorted(labels), [(k, j) for k in range(3) for j in range(2)])

    def test_rejects_non_positive_tolerance(self):
        with self.assertRaises(InvalidParameterError):
            decompose_subspaces(QUBIT, QUBIT, degeneracy_tol=0.0)


class ChannelTests(unittest.TestCase):

    def test_permutation_block_convention(self):
        # position 0 moves to 1, 1 to 2, 2 to 0
        assert_allclose(permutation_block([1, 2, 0]), [[0, 0, 1], [1, 0, 0], [0, 1, 0]])

    def test_permutation_block_rejects_repeats(self):
        with self.assertRaises(InvalidParameterError):
            permutation_block([0, 0, 1])

    def test_mixture_block(self):
        block = mixture_block([np.eye(2), permutation_block([1, 0])], [0.25, 0.75])
        assert_allclose(block, [[0.25, 0.75], [0.75, 0.25]])

    def test_identity_is_valid(self):
        self.assertTrue(validate_channel(identity_channel(QUTRIT, QUTRIT)))

    def test_non_stochastic_block_is_invalid(self):
        channel = build_channel(QUBIT, QUBIT, {1: np.array([[0.5, 0.5], [0.2, 0.8]])})
        self.assertFalse(validate_channel(channel))

    def test_wrong_block_shape(self):
        with self.assertRaises(InvalidParameterError):
            build_channel(QUBIT, QUBIT, {1: np.eye(3)})

    def test_label_map_must_stay_in_shell(self):
        with self.assertRaises(InvalidParameterError):
            channel_from_label_map(QUBIT, QUBIT, lambda k, j: (1 - k, j))

    def test_text_dump_reloads_same_blocks(self):
        channel = build_channel(QUTRIT, QUTRIT, {2: permutation_block([1, 2, 0])})
        reloaded = loads_channel(dumps_channel(channel))
        self.assertEqual(reloaded.system.levels, channel.system.levels)
        self.assertEqual([s.basis for s in reloaded.subspaces], [s.basis for s in channel.subspaces])
        for original, copy in zip(channel.blocks, reloaded.blocks):
            assert_allclose(copy, original)
        assert_allclose(reloaded.block_at(2.0), permutation_block([1, 2, 0]))

    def test_text_rejects_garbage(self):
        with self.assertRaises(InvalidParameterError):
            loads_channel("# collision channel\nsystem 0.0,1.0 labels 0,1\nmolecule 0.0,1.0 labels 0,1\nfoo 1\n")


class CollisionTests(unittest.TestCase):

    def setUp(self):
        self.bath = BathSpec.from_q(0.5)

    def test_full_swap_thermalizes_excited_qubit(self):
        states = [iterate_collisions(resonant_swap(1.0), PopulationVector((0.0, 1.0)), self.bath, n) for n in (1, 2)]
        for state in states:
            assert_allclose(state.probs, [2 / 3, 1 / 3], atol=1e-12)

    def test_partial_swap_contracts_towards_gibbs(self):
        s = 0.4
        out = apply_collision(resonant_swap(s), PopulationVector((0.0, 1.0)), self.bath)
        self.assertAlmostEqual(out[0], 2 / 3 + (1 - s) * (0.0 - 2 / 3), places=12)

    def test_invalid_channel_is_refused(self):
        channel = build_channel(QUBIT, QUBIT, {1: np.array([[0.6, 0.5], [0.5, 0.6]])})
        self.assertFalse(validate_channel(channel))
        with self.assertRaises(InvalidParameterError):
            apply_collision(channel, PopulationVector((0.0, 1.0)), self.bath)
        with self.assertRaises(InvalidParameterError):
            collision_matrix(channel, self.bath)

    def test_long_iteration_stays_normalized(self):
        partial_swap = np.array([[0.7, 0.3], [0.3, 0.7]])
        channel = build_channel(QUTRIT, QUTRIT, {2: permutation_block([1, 2, 0]), 1: partial_swap})
        p = iterate_collisions(channel, PopulationVector((0.1, 0.2, 0.7)), self.bath, 10_000)
        self.assertAlmostEqual(sum(p.probs), 1.0, places=12)
        self.assertTrue(all(value >= 0.0 for value in p.probs))

    def test_iterate_needs_one_collision(self):
        with self.assertRaises(InvalidParameterError):
            iterate_collisions(resonant_swap(1.0), PopulationVector((0.0, 1.0)), self.bath, 0)

    def test_collision_matrix_matches_apply(self):
        channel = build_channel(QUTRIT, QUTRIT, {2: permutation_block([1, 2, 0]), 1: permutation_block([1, 0])})
        p = PopulationVector((0.2, 0.5, 0.3))
        g = collision_matrix(channel, self.bath)
        assert_allclose(g @ p.array, apply_collision(channel, p, self.bath).array, atol=1e-14)
        assert_allclose(g.sum(axis=0), 1.0, atol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(p=simplex_points(3), permutation=st.permutations([0, 1, 2]))
    def test_gibbs_is_preserved_and_energy_conserved(self, p, permutation):
        channel = build_channel(QUTRIT, QUTRIT, {2: permutation_block(list(permutation))})
        tau = gibbs(QUTRIT, self.bath)
        assert_allclose(apply_collision(channel, tau, self.bath).array, tau.array, atol=1e-12)
        joint = joint_populations(p, QUTRIT, self.bath)
        self.assertAlmostEqual(joint_energy(channel, collide_joint(channel, joint)),
                               joint_energy(channel, joint), places=12)


class OracleTests(unittest.TestCase):

    def setUp(self):
        self.bath = BathSpec.from_q(0.3)

    def test_gibbs_input_reaches_gibbs_ground(self):
        p0_star, _ = optimal_single_collision(gibbs(QUTRIT, self.bath), QUTRIT, QUTRIT, self.bath)
        self.assertAlmostEqual(p0_star, gibbs(QUTRIT, self.bath)[0], places=12)

    def test_witness_reaches_the_optimum(self):
        p = PopulationVector((0.1, 0.2, 0.7))
        p0_star, witness = greedy_single_collision(p, QUTRIT, QUTRIT, self.bath)
        self.assertTrue(validate_channel(witness))
        self.assertAlmostEqual(apply_collision(witness, p, self.bath)[0], p0_star, places=12)

    @settings(max_examples=30, deadline=None)
    @given(p=simplex_points(4))
    def test_greedy_matches_enumeration(self, p):
        hs = HamiltonianSpec.equally_spaced(4)
        greedy, _ = greedy_single_collision(p, hs, QUTRIT, self.bath)
        self.assertAlmostEqual(greedy, exhaustive_single_collision(p, hs, QUTRIT, self.bath), places=12)

    def test_large_shell_needs_fallback(self):
        h = composite_hamiltonian(QUBIT, 3)
        p = gibbs(h, self.bath)
        with self.assertRaises(SubspaceCapExceededError) as raised:
            optimal_single_collision(p, h, h, self.bath)
        self.assertEqual(raised.exception.size, 15)
        p0_star, _ = optimal_single_collision_with_fallback(p, h, h, self.bath)
        self.assertAlmostEqual(p0_star, p[0], places=12)

    @settings(max_examples=20, deadline=None)
    @given(p=simplex_points(4))
    def test_applied_channels_match_enumeration(self, p):
        hs = HamiltonianSpec.equally_spaced(4)
        self.assertAlmostEqual(subset_single_collision(p, hs, QUTRIT, self.bath),
                               exhaustive_single_collision(p, hs, QUTRIT, self.bath), places=12)

    def test_applied_channels_reach_composite_optimum(self):
        h = composite_hamiltonian(QUBIT, 3)
        raw = np.linspace(1.0, 2.0, h.dimension)
        p = PopulationVector.from_array(raw / raw.sum())
        greedy, _ = greedy_single_collision(p, h, h, self.bath)
        self.assertAlmostEqual(subset_single_collision(p, h, h, self.bath), greedy, places=12)
        with self.assertRaises(SubspaceCapExceededError):
            subset_single_collision(p, h, h, self.bath, max_choices=100)

    def test_machine_ground_slots(self):
        sm = HamiltonianSpec(levels=(0.0, 1.0, 1.0, 2.0), basis_labels=((0, 0), (0, 1), (1, 0), (1, 1)))
        p = gibbs(sm, self.bath)
        value, _ = greedy_single_collision(p, sm, QUBIT, self.bath, ground_levels=(0, 1))
        self.assertAlmostEqual(value, p[0] + p[1], places=12)


if __name__ == '__main__':
    unittest.main()
