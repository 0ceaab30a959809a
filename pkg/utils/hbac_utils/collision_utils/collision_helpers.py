#!/usr/bin/env python3

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from utils.hbac_utils.hbac_constants import Tolerance
from utils.hbac_utils.hbac_errors import DimensionMismatchError, InvalidParameterError
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    check_dimensions,
    gibbs,
)

logger = logging.getLogger(__name__)

JointLabel = Tuple[int, int]


# ============================ DOMAIN TYPES ============================

@dataclass(frozen=True)
class SubspaceIndex:
    """Joint labels (k, j) sharing the total energy E_k + E_j, in lexicographic order."""
    energy: float
    basis: Tuple[JointLabel, ...]

    @property
    def size(self) -> int:
        return len(self.basis)

    def flat_indices(self, molecule_dimension: int) -> np.ndarray:
        return np.array([k * molecule_dimension + j for k, j in self.basis], dtype=int)

    def position(self, label: JointLabel) -> int:
        return self.basis.index(tuple(label))


@dataclass(frozen=True, eq=False)
class BlockChannel:
    """
    Population action of an energy-preserving collision: one block per joint subspace.

    A block acts as xi = G @ x on the subspace's joint populations listed in basis
    order, so G[a][b] is the weight carried from basis label b to basis label a.
    """
    system: HamiltonianSpec
    molecule: HamiltonianSpec
    subspaces: Tuple[SubspaceIndex, ...]
    blocks: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.subspaces) != len(self.blocks):
            raise InvalidParameterError(
                f"{len(self.blocks)} blocks given for {len(self.subspaces)} subspaces"
            )
        blocks = []
        for subspace, block in zip(self.subspaces, self.blocks):
            block = np.array(block, dtype=float)
            if block.shape != (subspace.size, subspace.size):
                raise InvalidParameterError(
                    f"Block of shape {block.shape} does not fit subspace of size {subspace.size} "
                    f"at energy {subspace.energy}"
                )
            block.setflags(write=False)
            blocks.append(block)
        object.__setattr__(self, "subspaces", tuple(self.subspaces))
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def joint_dimension(self) -> int:
        return self.system.dimension * self.molecule.dimension

    def block_at(self, energy: float) -> np.ndarray:
        for subspace, block in zip(self.subspaces, self.blocks):
            if abs(subspace.energy - energy) <= Tolerance.DEGENERACY:
                return block
        raise InvalidParameterError(f"No subspace at energy {energy}")


@dataclass(frozen=True)
class JointPopulation:
    probs: Tuple[float, ...]
    system_dimension: int
    molecule_dimension: int

    def __post_init__(self):
        values = np.asarray(self.probs, dtype=float)
        if values.size != self.system_dimension * self.molecule_dimension:
            raise DimensionMismatchError(
                f"{values.size} joint populations for a {self.system_dimension}x{self.molecule_dimension} system"
            )
        if abs(values.sum() - 1.0) > Tolerance.NORMALIZATION:
            raise InvalidParameterError(f"Joint populations sum to {values.sum()!r}")
        object.__setattr__(self, "probs", tuple(float(v) for v in values))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def system_marginal(self) -> PopulationVector:
        return PopulationVector.from_array(
            self.array.reshape(self.system_dimension, self.molecule_dimension).sum(axis=1)
        )

    def molecule_marginal(self) -> PopulationVector:
        return PopulationVector.from_array(
            self.array.reshape(self.system_dimension, self.molecule_dimension).sum(axis=0)
        )


# ============================ SUBSPACES AND BLOCKS ============================

def decompose_subspaces(hs: HamiltonianSpec, hr: HamiltonianSpec,
                        degeneracy_tol: float = Tolerance.DEGENERACY) -> List[SubspaceIndex]:
    if degeneracy_tol <= 0:
        raise InvalidParameterError(f"degeneracy_tol must be positive, got {degeneracy_tol}")

    labelled = sorted(
        ((hs.levels[k] + hr.levels[j], (k, j)) for k in range(hs.dimension) for j in range(hr.dimension)),
        key=lambda item: (item[0], item[1]),
    )
    subspaces = []
    group: List[Tuple[float, JointLabel]] = []
    for energy, label in labelled:
        if group and energy - group[0][0] > degeneracy_tol:
            subspaces.append(_subspace_from_group(group))
            group = []
        group.append((energy, label))
    if group:
        subspaces.append(_subspace_from_group(group))
    return subspaces


def permutation_block(destinations: Sequence[int]) -> np.ndarray:
    """Block sending basis position b to position destinations[b]."""
    size = len(destinations)
    if sorted(destinations) != list(range(size)):
        raise InvalidParameterError(f"{list(destinations)} is not a permutation of 0..{size - 1}")
    block = np.zeros((size, size))
    for source, destination in enumerate(destinations):
        block[destination, source] = 1.0
    return block


def mixture_block(blocks: Sequence[np.ndarray], weights: Sequence[float]) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > Tolerance.STOCHASTIC:
        raise InvalidParameterError(f"Mixture weights must be a probability vector, got {weights}")
    return sum(w * np.asarray(b, dtype=float) for w, b in zip(weights, blocks))


def build_channel(hs: HamiltonianSpec, hr: HamiltonianSpec,
                  blocks: Optional[Mapping[int, np.ndarray]] = None) -> BlockChannel:
    """Channel with the given blocks keyed by subspace position; identity everywhere else."""
    subspaces = decompose_subspaces(hs, hr)
    blocks = blocks or {}
    unknown = set(blocks) - set(range(len(subspaces)))
    if unknown:
        raise InvalidParameterError(f"No subspace at positions {sorted(unknown)}")
    return BlockChannel(
        system=hs,
        molecule=hr,
        subspaces=tuple(subspaces),
        blocks=tuple(np.asarray(blocks[n], dtype=float) if n in blocks else np.eye(s.size)
                     for n, s in enumerate(subspaces)),
    )


def channel_from_label_map(hs: HamiltonianSpec, hr: HamiltonianSpec,
                           destination: Callable[[int, int], JointLabel]) -> BlockChannel:
    """Permutation channel moving each joint label (k, j) to destination(k, j)."""
    subspaces = decompose_subspaces(hs, hr)
    blocks = []
    for subspace in subspaces:
        targets = []
        for label in subspace.basis:
            target = tuple(destination(*label))
            if target not in subspace.basis:
                raise InvalidParameterError(
                    f"Label {label} mapped to {target}, outside its subspace at energy {subspace.energy}"
                )
            targets.append(subspace.position(target))
        blocks.append(permutation_block(targets))
    return BlockChannel(system=hs, molecule=hr, subspaces=tuple(subspaces), blocks=tuple(blocks))


def identity_channel(hs: HamiltonianSpec, hr: HamiltonianSpec) -> BlockChannel:
    return build_channel(hs, hr)


def channel_defect(ch: BlockChannel) -> Optional[str]:
    """First reason the channel is not a valid collision, or None."""
    covered = []
    for subspace, block in zip(ch.subspaces, ch.blocks):
        covered.extend(subspace.basis)
        if block.shape != (subspace.size, subspace.size):
            return f"block at energy {subspace.energy} has shape {block.shape}"
        if np.any(block < -Tolerance.STOCHASTIC):
            return f"block at energy {subspace.energy} has a negative entry"
        if np.any(np.abs(block.sum(axis=0) - 1.0) > Tolerance.STOCHASTIC):
            return f"block at energy {subspace.energy} is not column stochastic"
        if np.any(np.abs(block.sum(axis=1) - 1.0) > Tolerance.STOCHASTIC):
            return f"block at energy {subspace.energy} is not row stochastic"
    expected = {(k, j) for k in range(ch.system.dimension) for j in range(ch.molecule.dimension)}
    if len(covered) != len(expected) or set(covered) != expected:
        return "subspaces do not cover every joint label exactly once"
    return None


def validate_channel(ch: BlockChannel) -> bool:
    if channel_defect(ch) is not None:
        return False
    for subspace, block in zip(ch.subspaces, ch.blocks):
        if subspace.size >= 3 and not _is_permutation(block):
            logger.warning("Block at energy %s is bistochastic but not a permutation; "
                           "unitary realizability is not checked", subspace.energy)
    return True


def require_valid_channel(ch: BlockChannel):
    defect = channel_defect(ch)
    if defect is not None:
        raise InvalidParameterError(f"Invalid collision channel: {defect}")


# ============================ COLLISIONS ============================

def joint_populations(p: PopulationVector, hr: HamiltonianSpec, bath: BathSpec) -> JointPopulation:
    molecule = gibbs(hr, bath)
    return JointPopulation(
        probs=tuple(np.outer(p.array, molecule.array).ravel()),
        system_dimension=p.dimension,
        molecule_dimension=hr.dimension,
    )


def collide_joint(ch: BlockChannel, joint: JointPopulation) -> JointPopulation:
    require_valid_channel(ch)
    values = joint.array
    out = values.copy()
    for subspace, block in zip(ch.subspaces, ch.blocks):
        indices = subspace.flat_indices(ch.molecule.dimension)
        out[indices] = block @ values[indices]
    out = np.where((out < 0.0) & (out >= -Tolerance.CLAMP), 0.0, out)
    return JointPopulation(tuple(out), joint.system_dimension, joint.molecule_dimension)


def joint_energy(ch: BlockChannel, joint: JointPopulation) -> float:
    energies = np.add.outer(ch.system.energies, ch.molecule.energies).ravel()
    return float(joint.array @ energies)


def apply_collision(ch: BlockChannel, p: PopulationVector, bath: BathSpec) -> PopulationVector:
    check_dimensions(p, ch.system)
    return collide_joint(ch, joint_populations(p, ch.molecule, bath)).system_marginal()


def iterate_collisions(ch: BlockChannel, p: PopulationVector, bath: BathSpec, n: int) -> PopulationVector:
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    for _ in range(n):
        p = apply_collision(ch, p, bath)
    return p


def joint_matrix(ch: BlockChannel) -> np.ndarray:
    matrix = np.zeros((ch.joint_dimension, ch.joint_dimension))
    for subspace, block in zip(ch.subspaces, ch.blocks):
        indices = subspace.flat_indices(ch.molecule.dimension)
        matrix[np.ix_(indices, indices)] = block
    return matrix


def collision_matrix(ch: BlockChannel, bath: BathSpec) -> np.ndarray:
    """Column-stochastic map on the system populations induced by one collision."""
    require_valid_channel(ch)
    d_s, d_r = ch.system.dimension, ch.molecule.dimension
    molecule = gibbs(ch.molecule, bath).array
    attach = np.kron(np.eye(d_s), molecule.reshape(d_r, 1))
    trace_out = np.kron(np.eye(d_s), np.ones((1, d_r)))
    return trace_out @ joint_matrix(ch) @ attach


# ---------------------------------------------------------------------------

def _subspace_from_group(group: Iterable[Tuple[float, JointLabel]]) -> SubspaceIndex:
    group = list(group)
    return SubspaceIndex(energy=group[0][0], basis=tuple(sorted(label for _, label in group)))


def _is_permutation(block: np.ndarray) -> bool:
    return bool(np.all((np.abs(block) <= Tolerance.STOCHASTIC) | (np.abs(block - 1.0) <= Tolerance.STOCHASTIC)))

