#!/usr/bin/env python3

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from utils.hbac_utils.collision_utils.collision_oracle import greedy_single_collision
from utils.hbac_utils.hbac_constants import Tolerance
from utils.hbac_utils.hbac_errors import InvalidParameterError, VerificationFailure
from utils.hbac_utils.protocol_utils.protocol_builders import (
    build_protocol_I,
    ground_levels,
    qubit_machine,
    qutrit,
    system_machine,
)
from utils.hbac_utils.protocol_utils.protocol_helpers import fixed_point, permutation_matrix, round_matrix
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    gibbs,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SingleRoundOptima:
    p1_star_I: float
    p1_star_II: float
    w1_I: float
    w1_II: float


def cooling_limit(dS: int, dr: int, bath: BathSpec) -> float:
    """Asymptotic ground population of the machine-free protocol."""
    q = bath.q
    if dr == 3 and dS >= 3:
        return (1.0 - q ** (dr - 1)) / (1.0 - q ** ((dr - 1) * dS))
    if dr >= 4 and dS >= dr:
        k, odd = divmod(dS, 2)
        cycle = q ** (dr + 2)
        z = (1.0 + q ** (dr - 1)) * (1.0 - cycle ** k) / (1.0 - cycle)
        if odd:
            z += q ** ((dr + 2) * k - 1)
        return 1.0 / z
    raise InvalidParameterError(f"No cooling limit for dS = {dS}, dr = {dr}")


def closed_form_trajectory(p0: PopulationVector, bath: BathSpec, n: int) -> List[PopulationVector]:
    """
    Exact states of the three-level machine-free protocol.

    After the first round the deviation from the fixed point lies on the eigenvector
    (1, q - 1, -q) and shrinks by 2 tau_1 per round.
    """
    if p0.dimension != 3:
        raise InvalidParameterError(f"The closed form covers three-level targets only, got dimension {p0.dimension}")
    if n < 0:
        raise InvalidParameterError(f"Round count must be >= 0, got {n}")
    q = bath.q
    t0, t1, _ = gibbs(qutrit(bath), bath).probs
    star = np.array([1.0, q ** 2, q ** 4]) / (1.0 + q ** 2 + q ** 4)
    amplitude = t0 * (q * (p0[0] - star[0]) - (p0[2] - star[2]))
    direction = np.array([1.0, q - 1.0, -q])
    states = [p0]
    for rounds in range(1, n + 1):
        states.append(PopulationVector.from_array(star + (2.0 * t1) ** (rounds - 1) * amplitude * direction))
    return states


def single_round_optima(bath: BathSpec) -> SingleRoundOptima:
    """Best one-round ground population with and without the qubit machine, with each round's work."""
    q, gap = bath.q, bath.gap
    t0, t1, t2 = gibbs(qutrit(bath), bath).probs
    p1_star = t0 + t0 * (t1 - t2)
    optima = SingleRoundOptima(
        p1_star_I=p1_star,
        p1_star_II=p1_star,
        w1_I=q * gap * (t0 - t1),
        w1_II=gap * (t0 - t1) * q / (1.0 + q),
    )
    if not optima.w1_II < optima.w1_I:
        raise VerificationFailure(f"Machine round costs {optima.w1_II!r}, not less than {optima.w1_I!r}")
    ceiling = 1.0 / (1.0 + q ** 3 + q ** 6)
    if optima.p1_star_II > ceiling + Tolerance.BOUND:
        raise VerificationFailure(f"Single-round optimum {optima.p1_star_II!r} exceeds {ceiling!r}")
    return optima


def brute_force_single_round(bath: BathSpec, machine: bool,
                             p: Optional[PopulationVector] = None) -> Tuple[float, np.ndarray]:
    """
    Best target ground population after one recharge and one collision, searching
    every recharge permutation of the controlled system.

    Returns the optimum and the first recharge matrix reaching it.
    """
    if machine:
        controlled = system_machine(bath)
        start = p or PopulationVector.from_array(
            np.kron(gibbs(qutrit(bath), bath).array, gibbs(qubit_machine(bath), bath).array)
        )
    else:
        controlled = qutrit(bath, "H_S")
        start = p or gibbs(controlled, bath)
    molecule = qutrit(bath)
    slots = ground_levels(controlled)

    best, best_recharge = -1.0, None
    for destinations in itertools.permutations(range(controlled.dimension)):
        recharge = permutation_matrix(destinations)
        recharged = PopulationVector.from_array(recharge @ start.array)
        value, _ = greedy_single_collision(recharged, controlled, molecule, bath, slots)
        if value > best + Tolerance.BOUND:
            best, best_recharge = value, recharge
    logger.debug("Single-round search over %d recharges gave %.12f", controlled.dimension, best)
    return best, best_recharge


def fixed_point_deviation(dS: int, dr: int, bath: BathSpec) -> float:
    """Largest population gap between the machine-free fixed point and the Gibbs state at (dr - 1) beta."""
    spec = build_protocol_I(dS, dr, bath)
    reference = gibbs(HamiltonianSpec.equally_spaced(dS, bath.gap), bath.with_beta((dr - 1) * bath.beta))
    return float(np.max(np.abs(fixed_point(round_matrix(spec, bath)).array - reference.array)))
