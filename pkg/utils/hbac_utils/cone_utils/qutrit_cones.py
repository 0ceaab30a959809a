#!/usr/bin/env python3

import itertools
import logging
from typing import Dict, List, NamedTuple, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from utils.hbac_utils.cone_utils.cone_constants import ConeKind, ExtremePoint, LevelPairs, Subset
from utils.hbac_utils.cone_utils.cone_helpers import ConeRegion
from utils.hbac_utils.hbac_constants import Tolerance
from utils.hbac_utils.hbac_errors import InvalidParameterError, WrongSubsetError
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    beta_ordering,
    gibbs,
)

logger = logging.getLogger(__name__)

_ROUNDING_DIGITS = 13


class QutritBlockParams(NamedTuple):
    """
    Free entries of the three non-trivial blocks of a qutrit-qutrit collision.

    G1 = [[a1, 1-a1], [1-a1, a1]] on (01, 10), G3 the same form with a3 on (12, 21),
    G2 on (02, 11, 20) with first row (a2, b2, .) and second row (a2p, b2p, .).
    """
    a1: float
    a2: float
    b2: float
    a2p: float
    b2p: float
    a3: float


IDENTITY_PARAMS = QutritBlockParams(a1=1.0, a2=1.0, b2=0.0, a2p=0.0, b2p=1.0, a3=1.0)


def qutrit_hamiltonian(bath: BathSpec) -> HamiltonianSpec:
    return HamiltonianSpec.equally_spaced(3, bath.gap)


def params_to_blocks(params: QutritBlockParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    a1, a2, b2, a2p, b2p, a3 = params
    g1 = np.array([[a1, 1 - a1], [1 - a1, a1]])
    g2 = np.array([
        [a2, b2, 1 - a2 - b2],
        [a2p, b2p, 1 - a2p - b2p],
        [1 - a2 - a2p, 1 - b2 - b2p, a2 + b2 + a2p + b2p - 1],
    ])
    g3 = np.array([[a3, 1 - a3], [1 - a3, a3]])
    return g1, g2, g3


def blocks_to_params(g1: np.ndarray, g2: np.ndarray, g3: np.ndarray) -> QutritBlockParams:
    return QutritBlockParams(
        a1=float(g1[0][0]), a2=float(g2[0][0]), b2=float(g2[0][1]),
        a2p=float(g2[1][0]), b2p=float(g2[1][1]), a3=float(g3[0][0]),
    )


def check_params(params: QutritBlockParams):
    for block in params_to_blocks(params):
        if np.any(block < -Tolerance.STOCHASTIC) or np.any(block > 1.0 + Tolerance.STOCHASTIC):
            raise InvalidParameterError(f"Parameters {tuple(params)} give a block entry outside [0, 1]")


def classify_beta_subset(p: PopulationVector, bath: BathSpec) -> str:
    if p.dimension != 3:
        raise InvalidParameterError(f"Subsets are defined for qutrits only, got dimension {p.dimension}")
    return Subset.BY_ORDERING[beta_ordering(p, qutrit_hamiltonian(bath), bath)]


def qutrit_collision_output(p: PopulationVector, params: QutritBlockParams, bath: BathSpec) -> PopulationVector:
    if p.dimension != 3:
        raise InvalidParameterError(f"Expected a qutrit population, got dimension {p.dimension}")
    check_params(params)
    a1, a2, b2, a2p, b2p, a3 = params
    q = bath.q
    t0, t1, t2 = gibbs(qutrit_hamiltonian(bath), bath).probs
    p0, p1, p2 = p.probs

    low_flow = t1 * p0 - t0 * p1
    high_flow = t1 * p1 - t0 * p2
    return PopulationVector.from_array([
        t0 + (a1 + q * a2) * low_flow + (a2 + b2) * high_flow,
        t1 - (a1 - q * a2p) * low_flow - (1 - a2p - b2p - q * a3) * high_flow,
        t2 - q * (a2 + a2p) * low_flow - (a2 + b2 + a2p + b2p - 1 + q * a3) * high_flow,
    ])


def qutrit_cone_subsetV(p: PopulationVector, bath: BathSpec) -> ConeRegion:
    subset = classify_beta_subset(p, bath)
    if subset != Subset.V:
        raise WrongSubsetError(f"Closed-form cone needs subset V, input is in subset {subset}", subset=subset)
    t0, t1, t2 = gibbs(qutrit_hamiltonian(bath), bath).probs
    p0, p1, p2 = p.probs

    p0_range = (p0, t0 + (t1 * p1 - t0 * p2))
    p1_range = (t1 - (t1 * p1 - t2 * p0), p1)
    p2_range = (p2 - (t0 * p2 - t2 * p0), t2 + (t1 * p1 - t2 * p0))
    (p0_min, p0_max), (p1_min, p1_max), (p2_min, p2_max) = p0_range, p1_range, p2_range

    corners = [
        (p0_min, p1_max, 1 - p0_min - p1_max),
        (p0_min, 1 - p0_min - p2_max, p2_max),
        (1 - p1_min - p2_max, p1_min, p2_max),
        (p0_max, p1_min, 1 - p0_max - p1_min),
        (p0_max, 1 - p0_max - p2_min, p2_min),
        (1 - p1_max - p2_min, p1_max, p2_min),
    ]
    return ConeRegion(
        kind=ConeKind.QUTRIT_POPULATION,
        intervals=(p0_range, p1_range, p2_range),
        extreme_points=tuple(PopulationVector.from_array(corner) for corner in corners),
        labels=ExtremePoint.LABELS,
    )


def permutation_vertex_params() -> List[QutritBlockParams]:
    """The 24 parameter tuples whose blocks are all permutations."""
    swaps = (np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]]))
    cyclers = [np.eye(3)[list(order)] for order in itertools.permutations(range(3))]
    return [blocks_to_params(g1, g2, g3) for g1 in swaps for g2 in cyclers for g3 in swaps]


def qutrit_cone_vertices(p: PopulationVector, bath: BathSpec) -> ConeRegion:
    """
    Exact one-collision population cone for any qutrit input.

    The outputs are linear in the blocks and the admissible blocks form a product of
    Birkhoff polytopes, so the cone is the hull of the permutation-vertex images.
    """
    images = np.array([qutrit_collision_output(p, params, bath).array for params in permutation_vertex_params()])
    hull = hull_points(images)
    return ConeRegion(
        kind=ConeKind.QUTRIT_POPULATION,
        intervals=tuple((float(images[:, level].min()), float(images[:, level].max())) for level in range(3)),
        extreme_points=tuple(PopulationVector.from_array(point) for point in hull),
        labels=tuple(f"V{i}" for i in range(len(hull))),
    )


def qutrit_cone(p: PopulationVector, bath: BathSpec) -> ConeRegion:
    try:
        return qutrit_cone_subsetV(p, bath)
    except WrongSubsetError as err:
        logger.info("Input in subset %s, using the permutation-vertex cone", err.subset)
        return qutrit_cone_vertices(p, bath)


def qutrit_extreme_witnesses(p: PopulationVector, bath: BathSpec) -> Dict[str, Tuple[QutritBlockParams, float]]:
    """For every extreme point, the permutation parameters whose output lies closest, with that distance."""
    region = qutrit_cone_subsetV(p, bath)
    candidates = [(params, qutrit_collision_output(p, params, bath).array) for params in permutation_vertex_params()]
    witnesses = {}
    for label, point in zip(region.labels, region.extreme_points):
        params, output = min(candidates, key=lambda item: np.max(np.abs(item[1] - point.array)))
        witnesses[label] = (params, float(np.max(np.abs(output - point.array))))
    return witnesses


def mto_qutrit_inner_bound(p: PopulationVector, bath: BathSpec, budget: int,
                           samples: int = 20000, seed: int = 0) -> Tuple[PopulationVector, ...]:
    """
    Inner approximation of the Markovian thermal cone of a qutrit.

    Explores sequences of at most `budget` two-level partial thermalizations: every
    full-strength sequence up to length 4, plus `samples` random sequences with
    random pairs and strengths. Every prefix is kept, and the hull of the reached
    populations is returned.
    """
    if p.dimension != 3:
        raise InvalidParameterError(f"Expected a qutrit population, got dimension {p.dimension}")
    if budget < 0:
        raise InvalidParameterError(f"budget must be >= 0, got {budget}")
    tau = gibbs(qutrit_hamiltonian(bath), bath).array
    reached = [p.array.reshape(1, 3)]

    if budget > 0:
        for length in range(1, min(budget, 4) + 1):
            for sequence in itertools.product(range(len(LevelPairs.QUTRIT)), repeat=length):
                state = p.array.reshape(1, 3).copy()
                for pair in sequence:
                    state = _partial_thermalize(state, np.array([pair]), np.ones(1), tau)
                reached.append(state)

        rng = np.random.default_rng(seed)
        states = np.tile(p.array, (samples, 1))
        for _ in range(budget):
            states = _partial_thermalize(states, rng.integers(0, len(LevelPairs.QUTRIT), size=samples),
                                         rng.random(samples), tau)
            reached.append(states)

    hull = hull_points(np.vstack(reached))
    return tuple(PopulationVector.from_array(point) for point in hull)


# ---------------------------------------------------------------------------

def hull_points(points: np.ndarray) -> np.ndarray:
    """Extreme qutrit populations, using the (p0, p2) projection of the simplex."""
    unique = np.unique(np.round(points, _ROUNDING_DIGITS), axis=0)
    if len(unique) < 3:
        return unique
    try:
        hull = ConvexHull(unique[:, [0, 2]])
    except QhullError:
        # collinear: keep the two ends of the segment
        axis = 0 if np.ptp(unique[:, 0]) > 0 else 2
        return unique[[int(np.argmin(unique[:, axis])), int(np.argmax(unique[:, axis]))]]
    return unique[hull.vertices]


def _partial_thermalize(states: np.ndarray, pair_choice: np.ndarray, strength: np.ndarray,
                        tau: np.ndarray) -> np.ndarray:
    states = states.copy()
    rows = np.arange(states.shape[0])
    i = LevelPairs.QUTRIT[pair_choice, 0]
    j = LevelPairs.QUTRIT[pair_choice, 1]
    total = states[rows, i] + states[rows, j]
    target = total * tau[i] / (tau[i] + tau[j])
    moved = (1.0 - strength) * states[rows, i] + strength * target
    states[rows, i] = moved
    states[rows, j] = total - moved
    return states
