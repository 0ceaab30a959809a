#!/usr/bin/env python3

"""Constructors of the recharge/thermalize rounds for every cooling protocol."""

import logging
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from utils.hbac_utils.collision_utils.collision_helpers import (
    build_channel,
    channel_from_label_map,
    decompose_subspaces,
)
from utils.hbac_utils.collision_utils.collision_oracle import greedy_single_collision
from utils.hbac_utils.hbac_errors import InvalidParameterError
from utils.hbac_utils.protocol_utils.protocol_constants import Blocks, CoolingLimitBlocks, Variant
from utils.hbac_utils.protocol_utils.protocol_helpers import RoundSpec, swap_matrix
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    gibbs,
    product_hamiltonian,
)

logger = logging.getLogger(__name__)

QUTRIT_MOLECULE = 3


def qutrit(bath: BathSpec, label: str = "H^(3)") -> HamiltonianSpec:
    return HamiltonianSpec.equally_spaced(3, bath.gap, label=label)


def qubit_machine(bath: BathSpec) -> HamiltonianSpec:
    return HamiltonianSpec.equally_spaced(2, bath.gap, label="H_M")


def system_machine(bath: BathSpec) -> HamiltonianSpec:
    """Qutrit target with a qubit machine; labels (s, m) in lexicographic order 00, 01, 10, 11, 20, 21."""
    return product_hamiltonian(qutrit(bath, "H_S"), qubit_machine(bath), label="H_SM")


# ============================ WITHOUT A MACHINE ============================

def build_protocol_I_qutrit(dS: int, bath: BathSpec) -> RoundSpec:
    """
    Machine-free round with qutrit molecules.

    V swaps pairs of neighbouring levels according to dS mod 3, and each energy shell
    of the target-molecule pair gets one of I, G_A, G_B or sigma_x, so that the round
    matrix is the banded G* whose fixed point has inverse temperature 2 beta.
    """
    if dS < 3:
        raise InvalidParameterError(f"Protocol I with qutrit molecules needs dS >= 3, got {dS}")
    hs = HamiltonianSpec.equally_spaced(dS, bath.gap, label=f"H^({dS})")
    hr = qutrit(bath)
    k, remainder = divmod(dS, 3)

    if remainder == 0:
        swaps = [(3 * j + 1, 3 * j + 2) for j in range(k)]
        blocks = {1: np.eye(2), 2: Blocks.G_A, 3 * k: Blocks.SIGMA_X}
        for j in range(1, k):
            blocks.update({3 * j: Blocks.G_B, 3 * j + 1: np.eye(3), 3 * j + 2: Blocks.G_A})
    elif remainder == 1:
        swaps = [(3 * j + 1, 3 * j + 2) for j in range(k)]
        blocks = {1: np.eye(2), 2: Blocks.G_A, 3: Blocks.G_B, 3 * k + 1: np.eye(2)}
        for j in range(1, k):
            blocks.update({3 * j + 1: np.eye(3), 3 * j + 2: Blocks.G_A, 3 * j + 3: Blocks.G_B})
    else:
        swaps = [(0, 1)] + [(3 * j, 3 * j + 1) for j in range(1, k + 1)]
        blocks = {1: Blocks.SIGMA_X, 3 * k + 2: Blocks.SIGMA_X}
        for j in range(1, k + 1):
            blocks.update({3 * j: np.eye(3), 3 * j - 1: Blocks.G_B, 3 * j + 1: Blocks.G_A})

    return RoundSpec(
        name=f"{Variant.I} dS={dS}",
        system=hs,
        controlled=hs,
        recharge=swap_matrix(dS, swaps),
        thermalize=build_channel(hs, hr, blocks),
    )


def general_label_map(dS: int, dr: int) -> Callable[[int, int], Tuple[int, int]]:
    """
    Destination of every joint label (k, j) for molecules with dr >= 4 levels.

    Inside each energy shell the map is a bijection; the induced round matrix is
    tridiagonal with up-ratios q^(dr-1) from even levels and q^3 from odd ones.
    """
    top = dS - 1

    def destination(k: int, j: int) -> Tuple[int, int]:
        if k == 0:
            if j == 0:
                return 0, 0
            if j <= dr - 2:
                return 1, j - 1
            return 2, dr - 3
        if k == 1:
            if j <= dr - 2:
                return 0, j + 1
            return 1, j
        if k % 2 == 0:
            if dS % 2 == 0 and k == dS - 2:
                return (k + 1, j - 1) if j >= 1 else (k, 0)
            if dS % 2 == 1 and k == top:
                return (k - 1, dr - 2) if j == dr - 3 else (k, j)
            if j == 0:
                return k, 0
            if j <= dr - 2:
                return k + 1, j - 1
            return k + 2, dr - 3
        if j == dr - 4:
            return k - 2, dr - 2
        if j == dr - 1:
            return k, j
        return k - 1, j + 1

    return destination


def build_protocol_I_general(dS: int, dr: int, bath: BathSpec) -> RoundSpec:
    if not 4 <= dr <= dS:
        raise InvalidParameterError(f"Protocol I with large molecules needs 4 <= dr <= dS, got dS = {dS}, dr = {dr}")
    hs = HamiltonianSpec.equally_spaced(dS, bath.gap, label=f"H^({dS})")
    hr = HamiltonianSpec.equally_spaced(dr, bath.gap, label=f"H^({dr})")
    swaps = [(2 * i, 2 * i + 1) for i in range(dS // 2)]
    return RoundSpec(
        name=f"{Variant.I_GENERAL} dS={dS} dr={dr}",
        system=hs,
        controlled=hs,
        recharge=swap_matrix(dS, swaps),
        thermalize=channel_from_label_map(hs, hr, general_label_map(dS, dr)),
    )


def build_protocol_I(dS: int, dr: int, bath: BathSpec) -> RoundSpec:
    logger.debug(f"Building machine-free protocol for dS = {dS}, dr = {dr}")
    if dr == QUTRIT_MOLECULE:
        return build_protocol_I_qutrit(dS, bath)
    if dr >= 4:
        return build_protocol_I_general(dS, dr, bath)
    raise InvalidParameterError(f"No machine-free protocol for dr = {dr}")


# ============================ WITH A QUBIT MACHINE ============================

def _machine_flip(sm: HamiltonianSpec) -> np.ndarray:
    swaps = [(sm.index_of((s, 0)), sm.index_of((s, 1))) for s in range(3)]
    return swap_matrix(sm.dimension, swaps)


def _sm_label_map(sm: HamiltonianSpec, swaps) -> Callable[[int, int], Tuple[int, int]]:
    """Label map on (SM index, molecule level) from swaps written as (s, m, r) triples."""
    table: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for (s, m, r), (s2, m2, r2) in swaps:
        a = (sm.index_of((s, m)), r)
        b = (sm.index_of((s2, m2)), r2)
        table[a], table[b] = b, a
    return lambda k, j: table.get((k, j), (k, j))


def build_protocol_II_efficiency(bath: BathSpec) -> RoundSpec:
    sm = system_machine(bath)
    hr = qutrit(bath)
    thermalize = channel_from_label_map(sm, hr, _sm_label_map(sm, [((0, 0, 2), (1, 1, 0)), ((1, 0, 2), (2, 1, 0))]))
    return RoundSpec(
        name=Variant.II_EFFICIENCY,
        system=qutrit(bath, "H_S"),
        controlled=sm,
        recharge=_machine_flip(sm),
        thermalize=thermalize,
        machine=qubit_machine(bath),
    )


def build_protocol_II_cooling_limit(bath: BathSpec) -> RoundSpec:
    sm = system_machine(bath)
    hr = qutrit(bath)
    subspaces = decompose_subspaces(sm, hr)
    blocks = {}
    for position, subspace in enumerate(subspaces):
        level = int(round(subspace.energy / bath.gap))
        if level in CoolingLimitBlocks.BY_ENERGY:
            blocks[position] = CoolingLimitBlocks.BY_ENERGY[level]
    return RoundSpec(
        name=Variant.II_COOLING,
        system=qutrit(bath, "H_S"),
        controlled=sm,
        recharge=_machine_flip(sm),
        thermalize=build_channel(sm, hr, blocks),
        machine=qubit_machine(bath),
    )


# ============================ SINGLE ROUND ============================

def ground_levels(controlled: HamiltonianSpec) -> Tuple[int, ...]:
    """Controlled levels whose target index is 0."""
    return tuple(i for i, label in enumerate(controlled.basis_labels) if label[0] == 0)


def build_round_for_state(name: str, system: HamiltonianSpec, controlled: HamiltonianSpec, recharge: np.ndarray,
                          p: PopulationVector, bath: BathSpec,
                          machine: Optional[HamiltonianSpec] = None) -> RoundSpec:
    """Round whose thermalization routes the largest recharged populations to the target ground."""
    recharged = PopulationVector.from_array(recharge @ p.array)
    _, witness = greedy_single_collision(recharged, controlled, qutrit(bath), bath, ground_levels(controlled))
    return RoundSpec(name=name, system=system, controlled=controlled, recharge=recharge,
                     thermalize=witness, machine=machine)


def build_single_round_protocol(bath: BathSpec, machine: bool,
                                p: Optional[PopulationVector] = None) -> RoundSpec:
    """
    Best single round from a Gibbs start (or from p).

    Without a machine V exchanges target levels 1 and 2; with the qubit machine it
    exchanges |01> and |11>.
    """
    if not machine:
        hs = qutrit(bath, "H_S")
        start = p or gibbs(hs, bath)
        return build_round_for_state(Variant.I_SINGLE, hs, hs, swap_matrix(3, [(1, 2)]), start, bath)

    sm = system_machine(bath)
    m = qubit_machine(bath)
    start = p or PopulationVector.from_array(np.kron(gibbs(qutrit(bath), bath).array, gibbs(m, bath).array))
    recharge = swap_matrix(sm.dimension, [(sm.index_of((0, 1)), sm.index_of((1, 1)))])
    return build_round_for_state(Variant.II_SINGLE, qutrit(bath, "H_S"), sm, recharge, start, bath, machine=m)
