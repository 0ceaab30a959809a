#!/usr/bin/env python3

import logging
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from tabulate import tabulate

from utils.hbac_utils.hbac_errors import InvalidParameterError
from utils.hbac_utils.nogo_utils.nogo_helpers import NoGoVerdict, verify_theorem2, verify_theorem3
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    composite_hamiltonian,
    gibbs,
)

logger = logging.getLogger(__name__)


class SweepDefaults:
    THEOREM2_INSTANCES = 200
    THEOREM3_INSTANCES = 50
    MAX_SYSTEM_DIMENSION = 5
    MAX_COPIES = 3
    GAP_CHOICES = (1, 2)
    GIBBS_FRACTION = 0.1


def random_r2_instance(rng: np.random.Generator, max_dimension: int = SweepDefaults.MAX_SYSTEM_DIMENSION,
                       gap: float = 1.0) -> Tuple[HamiltonianSpec, HamiltonianSpec]:
    """System spectrum with integer gaps (so joint subspaces are degenerate) and a molecule sharing its lowest levels."""
    if max_dimension < 2:
        raise InvalidParameterError(f"max_dimension must be >= 2, got {max_dimension}")
    d_s = int(rng.integers(2, max_dimension + 1))
    d_r = int(rng.integers(2, d_s + 1))
    steps = rng.choice(SweepDefaults.GAP_CHOICES, size=d_s - 1)
    levels = tuple(float(level) * gap for level in np.concatenate(([0], np.cumsum(steps))))
    hs = HamiltonianSpec(levels=levels, label=f"S{d_s}")
    hr = HamiltonianSpec(levels=levels[:d_r], label=f"r{d_r}")
    return hs, hr


def random_r3_state(h: HamiltonianSpec, bath: BathSpec, rng: np.random.Generator) -> PopulationVector:
    """
    State whose weighted populations p_k exp(beta E_k) never decrease with energy.

    One weight is drawn per distinct energy so degenerate levels share it.
    """
    energies = np.unique(h.energies)
    weights = np.sort(rng.random(len(energies)) + 1e-3)
    per_level = weights[np.searchsorted(energies, h.energies)]
    values = per_level * np.exp(-bath.beta * (h.energies - h.energies[0]))
    return PopulationVector.from_array(values / values.sum())


def theorem2_sweep(bath: BathSpec, count: int = SweepDefaults.THEOREM2_INSTANCES, seed: int = 0,
                   max_dimension: int = SweepDefaults.MAX_SYSTEM_DIMENSION) -> List[NoGoVerdict]:
    rng = np.random.default_rng(seed)
    verdicts = []
    for index in range(count):
        hs, hr = random_r2_instance(rng, max_dimension, bath.gap)
        if rng.random() < SweepDefaults.GIBBS_FRACTION:
            p, kind = gibbs(hs, bath), "gibbs"
        else:
            p, kind = random_r3_state(hs, bath, rng), "random"
        verdicts.append(verify_theorem2(hs, hr, p, bath, label=f"T2-{index}-{kind}-{hs.dimension}x{hr.dimension}"))
    _log_summary("Theorem 2", verdicts)
    return verdicts


def theorem3_sweep(bath: BathSpec, h: Optional[HamiltonianSpec] = None,
                   count: int = SweepDefaults.THEOREM3_INSTANCES, seed: int = 0,
                   max_copies: int = SweepDefaults.MAX_COPIES) -> List[NoGoVerdict]:
    h = h or HamiltonianSpec.equally_spaced(2, bath.gap, label="h")
    rng = np.random.default_rng(seed)
    verdicts = []
    for index in range(count):
        mu = int(rng.integers(1, max_copies + 1))
        nu = int(rng.integers(1, mu + 1))
        hs = composite_hamiltonian(h, mu)
        if rng.random() < SweepDefaults.GIBBS_FRACTION:
            p, kind = gibbs(hs, bath), "gibbs"
        else:
            p, kind = random_r3_state(hs, bath, rng), "random"
        verdicts.append(verify_theorem3(h, mu, nu, p, bath, label=f"T3-{index}-{kind}-mu{mu}-nu{nu}"))
    _log_summary("Theorem 3", verdicts)
    return verdicts


def verdict_rows(verdicts: Iterable[NoGoVerdict]) -> List[Dict[str, object]]:
    return [verdict.to_row() for verdict in verdicts]


def verdict_table(verdicts: Iterable[NoGoVerdict]) -> str:
    rows = verdict_rows(verdicts)
    return tabulate(rows, headers="keys", tablefmt="github", floatfmt=".9f")


def _log_summary(name: str, verdicts: List[NoGoVerdict]):
    broken = [v.label for v in verdicts if not v.bound_holds]
    if broken:
        logger.warning("%s bound fails on %d of %d instances: %s", name, len(broken), len(verdicts), broken)
    else:
        logger.info("%s bound holds on all %d instances", name, len(verdicts))
