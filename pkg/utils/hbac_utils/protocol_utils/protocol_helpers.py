#!/usr/bin/env python3

import logging
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.sparse.csgraph import connected_components

from utils.hbac_utils.collision_utils.collision_helpers import BlockChannel, collision_matrix, validate_channel
from utils.hbac_utils.hbac_constants import Tolerance
from utils.hbac_utils.hbac_errors import (
    DimensionMismatchError,
    InvalidParameterError,
    ReducibleMatrixError,
    VerificationFailure,
)
from utils.hbac_utils.spectra_utils.spectra_helpers import BathSpec, HamiltonianSpec, PopulationVector

logger = logging.getLogger(__name__)


# ============================ DOMAIN TYPES ============================

@dataclass(frozen=True, eq=False)
class RoundSpec:
    """
    One cooling round: the recharge permutation V on the controlled system, then a
    thermalizing collision with a fresh molecule.

    controlled is the target system alone, or the target-machine composite whose
    basis labels start with the target index.
    """
    name: str
    system: HamiltonianSpec
    controlled: HamiltonianSpec
    recharge: np.ndarray
    thermalize: BlockChannel
    machine: Optional[HamiltonianSpec] = None

    def __post_init__(self):
        recharge = np.array(self.recharge, dtype=float)
        d = self.controlled.dimension
        if recharge.shape != (d, d):
            raise DimensionMismatchError(f"Recharge of shape {recharge.shape} on a {d}-level controlled system")
        if not _is_permutation_matrix(recharge):
            raise InvalidParameterError(f"Recharge of {self.name} is not a permutation matrix")
        if self.thermalize.system.levels != self.controlled.levels:
            raise DimensionMismatchError(f"Thermalizing channel of {self.name} acts on another spectrum")
        if not validate_channel(self.thermalize):
            raise InvalidParameterError(f"Thermalizing channel of {self.name} is not a valid block channel")
        recharge.setflags(write=False)
        object.__setattr__(self, "recharge", recharge)

    @property
    def has_machine(self) -> bool:
        return self.machine is not None


@dataclass(frozen=True, eq=False)
class RoundMatrix:
    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidParameterError(f"Round matrix must be square, got shape {g.shape}")
        if np.any(g < -Tolerance.STOCHASTIC):
            raise InvalidParameterError("Round matrix has negative entries")
        if np.any(np.abs(g.sum(axis=0) - 1.0) > Tolerance.STOCHASTIC):
            raise InvalidParameterError(f"Round matrix columns sum to {g.sum(axis=0)}")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @property
    def dimension(self) -> int:
        return self.g.shape[0]

    def apply(self, p: PopulationVector) -> PopulationVector:
        if p.dimension != self.dimension:
            raise DimensionMismatchError(f"Population of dimension {p.dimension} for a {self.dimension}x{self.dimension} round")
        return PopulationVector.from_array(self.g @ p.array)


# ============================ ROUNDS ============================

def round_matrix(spec: RoundSpec, bath: BathSpec) -> RoundMatrix:
    return RoundMatrix(collision_matrix(spec.thermalize, bath) @ spec.recharge)


def trajectory(spec: RoundSpec, p0: PopulationVector, bath: BathSpec, n: int) -> List[PopulationVector]:
    if n < 0:
        raise InvalidParameterError(f"Round count must be >= 0, got {n}")
    g = round_matrix(spec, bath)
    states = [p0]
    for _ in range(n):
        states.append(g.apply(states[-1]))
    return states


def fixed_point(g: RoundMatrix) -> PopulationVector:
    """
    Stationary distribution of a round matrix.

    Strongly connected chains go through GTH elimination, which keeps every entry to
    relative accuracy. Chains that are not strongly connected are accepted only while
    the fixed-point set stays one-dimensional, and are solved as (G - I) p = 0 with
    the normalization row appended.
    """
    identity = np.eye(g.dimension)
    n_components, _ = connected_components(g.g > Tolerance.STOCHASTIC, directed=True, connection="strong")
    solution = None
    if n_components > 1:
        nullity = linalg.null_space(g.g - identity, rcond=1e-10).shape[1]
        if nullity > 1:
            raise ReducibleMatrixError(
                f"Round matrix is reducible with a {nullity}-dimensional fixed-point set", dimension=nullity
            )
        logger.info("Round matrix has %d strong components but a unique fixed point", n_components)
    else:
        solution = gth_stationary(g.g)

    if solution is None:
        system = np.vstack([g.g - identity, np.ones((1, g.dimension))])
        rhs = np.zeros(g.dimension + 1)
        rhs[-1] = 1.0
        solution, *_ = linalg.lstsq(system, rhs)
    residual = float(np.max(np.abs(g.g @ solution - solution)))
    if residual > Tolerance.RESIDUAL:
        raise VerificationFailure(f"Fixed-point residual {residual:.3e} exceeds {Tolerance.RESIDUAL}")
    return PopulationVector.from_array(solution)


def gth_stationary(matrix: np.ndarray) -> Optional[np.ndarray]:
    """
    Grassmann-Taksar-Heyman elimination on a column-stochastic matrix.

    Returns None when a state has no weight flowing to lower indices, i.e. the chain
    is not irreducible.
    """
    t = np.array(matrix, dtype=float)
    size = t.shape[0]
    for n in range(size - 1, 0, -1):
        outflow = t[:n, n].sum()
        if outflow <= 0.0:
            return None
        t[n, :n] /= outflow
        t[:n, :n] += np.outer(t[:n, n], t[n, :n])
    pi = np.zeros(size)
    pi[0] = 1.0
    for n in range(1, size):
        pi[n] = pi[:n] @ t[n, :n]
    return pi / pi.sum()


def second_eigenvalue_modulus(g: RoundMatrix) -> float:
    moduli = np.sort(np.abs(linalg.eigvals(g.g)))[::-1]
    return float(moduli[1])


def system_marginal(p: PopulationVector, controlled: HamiltonianSpec, system: HamiltonianSpec) -> PopulationVector:
    """Sums the machine index out of a composite population; identity for a bare system."""
    if p.dimension != controlled.dimension:
        raise DimensionMismatchError(f"Population of dimension {p.dimension} for {controlled.label}")
    marginal = np.zeros(system.dimension)
    for index, label in enumerate(controlled.basis_labels):
        marginal[label[0]] += p[index]
    return PopulationVector.from_array(marginal)


# ============================ PERIODIC ROUNDS ============================

def cyclic_classes(g: RoundMatrix) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Splits the states of a period-2 chain into the two classes it alternates between."""
    support = g.g > Tolerance.STOCHASTIC
    parity = {0: 0}
    queue = deque([0])
    while queue:
        source = queue.popleft()
        # edges both ways: a column-stochastic G moves weight from column to row
        neighbours = np.flatnonzero(support[:, source] | support[source, :])
        for target in neighbours:
            target = int(target)
            if target not in parity:
                parity[target] = 1 - parity[source]
                queue.append(target)
            elif parity[target] == parity[source]:
                raise InvalidParameterError("Round matrix is aperiodic; parity limits do not exist")
    if len(parity) != g.dimension:
        raise InvalidParameterError("Round matrix is not connected")
    first = tuple(i for i in range(g.dimension) if parity[i] == 0)
    second = tuple(i for i in range(g.dimension) if parity[i] == 1)
    return first, second


def parity_limits(spec: RoundSpec, p0: PopulationVector, bath: BathSpec) -> Tuple[PopulationVector, PopulationVector]:
    """
    Long-run states after an even and after an odd number of rounds.

    G^2 leaves each cyclic class invariant, so each limit is the class weights of the
    starting state spread over the per-class fixed points of G^2.
    """
    g = round_matrix(spec, bath)
    classes = cyclic_classes(g)
    square = g.g @ g.g
    class_fixed_points = []
    for members in classes:
        block = RoundMatrix(square[np.ix_(members, members)])
        embedded = np.zeros(g.dimension)
        embedded[list(members)] = fixed_point(block).array
        class_fixed_points.append(embedded)

    def limit(start: np.ndarray) -> PopulationVector:
        weights = [start[list(members)].sum() for members in classes]
        return PopulationVector.from_array(sum(w * fp for w, fp in zip(weights, class_fixed_points)))

    return limit(p0.array), limit(g.g @ p0.array)


# ---------------------------------------------------------------------------

def _is_permutation_matrix(matrix: np.ndarray) -> bool:
    binary = np.all((matrix == 0.0) | (matrix == 1.0))
    return bool(binary and np.all(matrix.sum(axis=0) == 1.0) and np.all(matrix.sum(axis=1) == 1.0))


def permutation_matrix(destinations) -> np.ndarray:
    """V with V[destinations[b], b] = 1, i.e. level b is moved to level destinations[b]."""
    size = len(destinations)
    if sorted(destinations) != list(range(size)):
        raise InvalidParameterError(f"{list(destinations)} is not a permutation of 0..{size - 1}")
    matrix = np.zeros((size, size))
    matrix[list(destinations), list(range(size))] = 1.0
    return matrix


def swap_matrix(size: int, pairs) -> np.ndarray:
    destinations = list(range(size))
    for a, b in pairs:
        destinations[a], destinations[b] = b, a
    return permutation_matrix(destinations)
