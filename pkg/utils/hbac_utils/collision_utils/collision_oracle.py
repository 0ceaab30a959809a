#!/usr/bin/env python3

import itertools
import logging
import math
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from utils.hbac_utils.collision_utils.collision_helpers import (
    BlockChannel,
    SubspaceIndex,
    apply_collision,
    build_channel,
    decompose_subspaces,
    joint_populations,
    permutation_block,
)
from utils.hbac_utils.hbac_constants import Cap, Tolerance
from utils.hbac_utils.hbac_errors import SubspaceCapExceededError, VerificationFailure
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    check_dimensions,
)

logger = logging.getLogger(__name__)


def greedy_single_collision(p: PopulationVector, hs: HamiltonianSpec, hr: HamiltonianSpec,
                            bath: BathSpec, ground_levels: Sequence[int] = (0,)) -> Tuple[float, BlockChannel]:
    """
    Largest ground population reachable in one collision.

    Inside every subspace the largest joint populations are routed to the labels
    whose system index is 0; the witness channel does exactly that and keeps the
    remaining values in basis order. ground_levels lists the controlled levels counted
    as ground, e.g. every system-ground label of a system-machine composite.
    """
    check_dimensions(p, hs)
    subspaces = decompose_subspaces(hs, hr)
    joint = joint_populations(p, hr, bath).array

    p0_star = 0.0
    blocks = []
    for subspace in subspaces:
        values = joint[subspace.flat_indices(hr.dimension)]
        slots = _ground_slots(subspace, ground_levels)
        ranked = np.argsort(-values, kind="stable")
        destinations = slots + [i for i in range(subspace.size) if i not in slots]
        targets = [0] * subspace.size
        for rank, source in enumerate(ranked):
            targets[source] = destinations[rank]
        blocks.append(permutation_block(targets))
        p0_star += float(values[ranked[:len(slots)]].sum())

    witness = BlockChannel(system=hs, molecule=hr, subspaces=tuple(subspaces), blocks=tuple(blocks))
    return p0_star, witness


def exhaustive_single_collision(p: PopulationVector, hs: HamiltonianSpec, hr: HamiltonianSpec,
                                bath: BathSpec, max_block: int = Cap.SUBSPACE_SIZE,
                                ground_levels: Sequence[int] = (0,)) -> float:
    """Brute-force maximum over every permutation of every subspace."""
    check_dimensions(p, hs)
    subspaces = decompose_subspaces(hs, hr)
    _check_cap(subspaces, max_block)
    joint = joint_populations(p, hr, bath).array

    p0_star = 0.0
    for subspace in subspaces:
        slots = _ground_slots(subspace, ground_levels)
        if not slots:
            continue
        values = joint[subspace.flat_indices(hr.dimension)]
        # row r of the table lists which basis position feeds each slot
        table = _permutation_table(subspace.size)
        p0_star += float(values[table[:, slots]].sum(axis=1).max())
    return p0_star


def optimal_single_collision(p: PopulationVector, hs: HamiltonianSpec, hr: HamiltonianSpec,
                             bath: BathSpec, exhaustive: bool = True,
                             max_block: int = Cap.SUBSPACE_SIZE,
                             ground_levels: Sequence[int] = (0,)) -> Tuple[float, BlockChannel]:
    """
    Optimal one-collision cooling of the ground level.

    With exhaustive=True the greedy optimum is confirmed by permutation enumeration;
    SubspaceCapExceededError means a subspace is too large and the caller should
    retry with exhaustive=False.
    """
    p0_star, witness = greedy_single_collision(p, hs, hr, bath, ground_levels)
    if exhaustive:
        oracle = exhaustive_single_collision(p, hs, hr, bath, max_block, ground_levels)
        if abs(oracle - p0_star) > Tolerance.BOUND:
            raise VerificationFailure(
                f"Greedy optimum {p0_star!r} disagrees with enumeration {oracle!r}"
            )
    return p0_star, witness


def optimal_single_collision_with_fallback(p: PopulationVector, hs: HamiltonianSpec, hr: HamiltonianSpec,
                                           bath: BathSpec) -> Tuple[float, BlockChannel]:
    try:
        return optimal_single_collision(p, hs, hr, bath)
    except SubspaceCapExceededError as err:
        logger.info("Subspace of size %d too large to enumerate, using the greedy formula only", err.size)
        return optimal_single_collision(p, hs, hr, bath, exhaustive=False)


def subset_single_collision(p: PopulationVector, hs: HamiltonianSpec, hr: HamiltonianSpec,
                            bath: BathSpec, max_choices: int = Cap.SLOT_CHOICES) -> float:
    """
    Brute-force optimum by applying channels.

    For every subspace, each choice of labels to fill its ground slots is swapped in
    and the channel is applied to p; subspaces act independently, so the best gains
    add up. Unlike exhaustive_single_collision this only grows with the number of
    label subsets, which keeps composite spectra within reach.
    """
    check_dimensions(p, hs)
    subspaces = decompose_subspaces(hs, hr)
    baseline = p[0]
    p0_star = baseline
    for position, subspace in enumerate(subspaces):
        slots = _ground_slots(subspace)
        if not slots:
            continue
        choices = math.comb(subspace.size, len(slots))
        if choices > max_choices:
            raise SubspaceCapExceededError(
                f"Subspace at energy {subspace.energy} has {choices} slot fillings, cap is {max_choices}",
                size=subspace.size,
            )
        best_gain = 0.0
        for chosen in itertools.combinations(range(subspace.size), len(slots)):
            incoming = [i for i in chosen if i not in slots]
            vacated = [i for i in slots if i not in chosen]
            targets = list(range(subspace.size))
            for source, slot in zip(incoming, vacated):
                targets[source], targets[slot] = slot, source
            channel = build_channel(hs, hr, {position: permutation_block(targets)})
            best_gain = max(best_gain, apply_collision(channel, p, bath)[0] - baseline)
        p0_star += best_gain
    return p0_star


# ---------------------------------------------------------------------------

def _ground_slots(subspace: SubspaceIndex, ground_levels: Sequence[int] = (0,)) -> List[int]:
    return [i for i, (k, _) in enumerate(subspace.basis) if k in ground_levels]


def _check_cap(subspaces, max_block):
    for subspace in subspaces:
        if subspace.size > max_block:
            raise SubspaceCapExceededError(
                f"Subspace at energy {subspace.energy} has {subspace.size} labels, cap is {max_block}",
                size=subspace.size,
            )


@lru_cache(maxsize=None)
def _permutation_table(size: int) -> np.ndarray:
    table = np.array(list(itertools.permutations(range(size))), dtype=int)
    table.setflags(write=False)
    return table
