#!/usr/bin/env python3

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from utils.hbac_utils.hbac_constants import Cap, Tolerance
from utils.hbac_utils.hbac_errors import (
    CompositeCapExceededError,
    DimensionMismatchError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)

# Values drifting further than this from a unit sum are treated as a bug, not as rounding dust.
_RENORMALIZATION_SLACK = 1e-9


# ============================ DOMAIN TYPES ============================

@dataclass(frozen=True)
class HamiltonianSpec:
    """
    Diagonal spectrum of a finite system.

    levels are sorted energies; basis_labels maps each level back to its product
    basis label (a tuple of single-particle indices, ``(j,)`` for plain systems).
    """
    levels: Tuple[float, ...]
    label: str = ""
    basis_labels: Optional[Tuple[Tuple[int, ...], ...]] = None

    def __post_init__(self):
        levels = tuple(float(energy) for energy in self.levels)
        if len(levels) < 2:
            raise InvalidParameterError(f"A Hamiltonian needs at least 2 levels, got {len(levels)}")
        if not all(math.isfinite(energy) for energy in levels):
            raise InvalidParameterError(f"Non-finite energy in levels {levels}")
        if any(upper < lower for lower, upper in zip(levels, levels[1:])):
            raise InvalidParameterError(f"Levels must be sorted non-decreasing, got {levels}")
        object.__setattr__(self, "levels", levels)

        if self.basis_labels is None:
            object.__setattr__(self, "basis_labels", tuple((j,) for j in range(len(levels))))
        else:
            labels = tuple(tuple(int(i) for i in basis_label) for basis_label in self.basis_labels)
            if len(labels) != len(levels):
                raise InvalidParameterError(
                    f"Got {len(labels)} basis labels for {len(levels)} levels"
                )
            object.__setattr__(self, "basis_labels", labels)

    @classmethod
    def equally_spaced(cls, d: int, gap: float = 1.0, label: Optional[str] = None) -> "HamiltonianSpec":
        if d < 2:
            raise InvalidParameterError(f"Dimension must be >= 2, got {d}")
        if gap <= 0:
            raise InvalidParameterError(f"Gap must be positive, got {gap}")
        return cls(levels=tuple(j * gap for j in range(d)), label=label or f"H^({d})")

    @classmethod
    def explicit(cls, levels: Sequence[float], label: str = "explicit") -> "HamiltonianSpec":
        return cls(levels=tuple(levels), label=label)

    @property
    def dimension(self) -> int:
        return len(self.levels)

    @property
    def energies(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=float)

    def index_of(self, basis_label: Sequence[int]) -> int:
        try:
            return self.basis_labels.index(tuple(basis_label))
        except ValueError:
            raise InvalidParameterError(f"Basis label {tuple(basis_label)} not in {self.label}") from None

    def format_label(self, index: int) -> str:
        return "".join(str(i) for i in self.basis_labels[index])


@dataclass(frozen=True)
class BathSpec:
    """Bath inverse temperature; q = exp(-beta * gap) is the Boltzmann factor per reference gap."""
    beta: float
    gap: float = 1.0
    q: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta <= 0:
            raise InvalidParameterError(f"beta must be a positive finite number, got {self.beta}")
        if not math.isfinite(self.gap) or self.gap <= 0:
            raise InvalidParameterError(f"Reference gap must be positive, got {self.gap}")
        expected_q = math.exp(-self.beta * self.gap)
        if self.q is None:
            object.__setattr__(self, "q", expected_q)
        elif abs(self.q - expected_q) > Tolerance.BATH_CONSISTENCY * expected_q:
            raise InvalidParameterError(
                f"q = {self.q} is inconsistent with beta = {self.beta} and gap = {self.gap}"
            )
        if not 0.0 < self.q < 1.0:
            raise InvalidParameterError(f"q must lie in (0, 1), got {self.q}")

    @classmethod
    def from_q(cls, q: float, gap: float = 1.0) -> "BathSpec":
        if not 0.0 < q < 1.0:
            raise InvalidParameterError(f"q must lie in (0, 1), got {q}")
        return cls(beta=-math.log(q) / gap, gap=gap, q=q)

    @classmethod
    def from_beta(cls, beta: float, gap: float = 1.0) -> "BathSpec":
        return cls(beta=beta, gap=gap)

    def with_beta(self, beta: float) -> "BathSpec":
        return BathSpec(beta=beta, gap=self.gap)


@dataclass(frozen=True)
class PopulationVector:
    probs: Tuple[float, ...]

    def __post_init__(self):
        values = np.asarray(self.probs, dtype=float).ravel()
        if values.size < 1:
            raise InvalidParameterError("Population vector is empty")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError(f"Non-finite population in {values}")
        if np.any(values < -Tolerance.CLAMP):
            raise InvalidParameterError(f"Negative population {values.min():.3e}")
        values = np.where(values < 0.0, 0.0, values)
        total = float(values.sum())
        if abs(total - 1.0) > Tolerance.NORMALIZATION:
            raise InvalidParameterError(f"Populations sum to {total!r}, expected 1")
        object.__setattr__(self, "probs", tuple(float(v) for v in values))

    @classmethod
    def from_array(cls, values) -> "PopulationVector":
        """Builds a vector from the output of a numerical map, absorbing rounding drift."""
        values = np.asarray(values, dtype=float).ravel()
        values = np.where((values < 0.0) & (values >= -_RENORMALIZATION_SLACK), 0.0, values)
        total = float(values.sum())
        if abs(total - 1.0) > _RENORMALIZATION_SLACK:
            raise InvalidParameterError(f"Populations sum to {total!r}, expected 1")
        return cls(tuple(values / total))

    @property
    def dimension(self) -> int:
        return len(self.probs)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, index):
        return self.probs[index]


# ============================ OPERATIONS ============================

def check_dimensions(p: PopulationVector, h: HamiltonianSpec):
    if p.dimension != h.dimension:
        raise DimensionMismatchError(
            f"Population of dimension {p.dimension} does not match {h.label} of dimension {h.dimension}"
        )


def gibbs(h: HamiltonianSpec, bath: BathSpec) -> PopulationVector:
    weights = np.exp(-bath.beta * (h.energies - h.energies[0]))
    return PopulationVector.from_array(weights / weights.sum())


def mean_energy(p: PopulationVector, h: HamiltonianSpec) -> float:
    check_dimensions(p, h)
    return float(p.array @ h.energies)


def weighted_populations(p: PopulationVector, h: HamiltonianSpec, bath: BathSpec) -> np.ndarray:
    """p_j * exp(beta * E_j), rescaled so the largest value is 1."""
    check_dimensions(p, h)
    weights = p.array * np.exp(bath.beta * (h.energies - h.energies[-1]))
    if weights.max() <= 0.0:
        raise InvalidParameterError(f"Weighted populations underflow at beta = {bath.beta}")
    return weights / weights.max()


def beta_ordering(p: PopulationVector, h: HamiltonianSpec, bath: BathSpec) -> Tuple[int, ...]:
    """Levels by decreasing weighted population; weights equal on the ORDERING grid keep index order."""
    grid = np.round(weighted_populations(p, h, bath) / Tolerance.ORDERING)
    return tuple(sorted(range(p.dimension), key=lambda j: (-grid[j], j)))


def r3_witness(p: PopulationVector, h: HamiltonianSpec, bath: BathSpec) -> Optional[Tuple[int, int]]:
    """
    First level pair (k, k') breaking R3, or None.

    Pairs with E_k < E_k' and a larger weighted population on k are reported first;
    then degenerate pairs whose weighted populations differ.
    """
    weights = weighted_populations(p, h, bath)
    energies = h.energies
    upper = np.triu(np.ones((p.dimension, p.dimension), dtype=bool), k=1)
    energy_gap = energies[None, :] - energies[:, None]
    weight_gap = weights[:, None] - weights[None, :]

    strict = upper & (energy_gap > Tolerance.DEGENERACY) & (weight_gap > Tolerance.ORDERING)
    hits = np.argwhere(strict)
    if hits.size:
        return int(hits[0][0]), int(hits[0][1])

    degenerate = upper & (np.abs(energy_gap) <= Tolerance.DEGENERACY) & (np.abs(weight_gap) > Tolerance.ORDERING)
    hits = np.argwhere(degenerate)
    if hits.size:
        return int(hits[0][0]), int(hits[0][1])
    return None


def satisfies_R3(p: PopulationVector, h: HamiltonianSpec, bath: BathSpec) -> bool:
    return r3_witness(p, h, bath) is None


def product_hamiltonian(*factors: HamiltonianSpec, cap: int = Cap.COMPOSITE_DIMENSION,
                        label: Optional[str] = None) -> HamiltonianSpec:
    """
    Tensor product of independent subsystems.

    Levels are sorted by energy; degenerate levels keep lexicographic order of their
    concatenated basis labels.
    """
    if not factors:
        raise InvalidParameterError("At least one factor is required")
    dimension = math.prod(factor.dimension for factor in factors)
    if dimension > cap:
        logger.warning(f"Refusing a {dimension}-level product, cap is {cap}")
        raise CompositeCapExceededError(f"Product dimension {dimension} exceeds the cap {cap}")

    entries = []
    for combo in itertools.product(*(range(factor.dimension) for factor in factors)):
        energy = sum(factor.levels[i] for factor, i in zip(factors, combo))
        basis_label = tuple(itertools.chain.from_iterable(
            factor.basis_labels[i] for factor, i in zip(factors, combo)
        ))
        entries.append((energy, basis_label))
    entries.sort(key=lambda entry: entry[0])

    levels, labels = [], []
    for group in _group_degenerate(entries):
        for _, basis_label in sorted(group, key=lambda entry: entry[1]):
            levels.append(group[0][0])
            labels.append(basis_label)

    name = label or " ⊗ ".join(factor.label for factor in factors)
    return HamiltonianSpec(levels=tuple(levels), label=name, basis_labels=tuple(labels))


def composite_hamiltonian(h: HamiltonianSpec, copies: int,
                          cap: int = Cap.COMPOSITE_DIMENSION) -> HamiltonianSpec:
    if copies < 1:
        raise InvalidParameterError(f"copies must be >= 1, got {copies}")
    if copies == 1:
        return h
    return product_hamiltonian(*([h] * copies), cap=cap, label=f"({h.label})^{copies}")


def fit_inverse_temperature(p: PopulationVector, h: HamiltonianSpec, bath: BathSpec) -> Tuple[float, float]:
    """
    Fits beta* from adjacent-level ratios p_{j+1}/p_j = exp(-beta* dE).

    Returns (mean of beta*/beta, max deviation of beta*/beta from that mean).
    """
    check_dimensions(p, h)
    ratios = []
    for j in range(p.dimension - 1):
        gap = h.levels[j + 1] - h.levels[j]
        if gap <= Tolerance.DEGENERACY or p[j] <= 0.0 or p[j + 1] <= 0.0:
            continue
        ratios.append(-math.log(p[j + 1] / p[j]) / gap / bath.beta)
    if not ratios:
        raise InvalidParameterError("No non-degenerate populated level pair to fit")
    mean = float(np.mean(ratios))
    return mean, float(max(abs(r - mean) for r in ratios))


# ---------------------------------------------------------------------------

def _group_degenerate(entries):
    group = []
    for entry in entries:
        if group and entry[0] - group[0][0] > Tolerance.DEGENERACY:
            yield group
            group = []
        group.append(entry)
    if group:
        yield group
