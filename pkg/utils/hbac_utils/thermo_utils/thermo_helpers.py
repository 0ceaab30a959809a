#!/usr/bin/env python3

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from utils.hbac_utils.collision_utils.collision_helpers import collide_joint, joint_populations
from utils.hbac_utils.hbac_errors import (
    CopUndefinedError,
    DimensionMismatchError,
    InvalidParameterError,
    VerificationFailure,
)
from utils.hbac_utils.protocol_utils.protocol_helpers import RoundSpec, round_matrix, system_marginal
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    check_dimensions,
    gibbs,
    mean_energy,
)

logger = logging.getLogger(__name__)

# Bookkeeping closure is checked against this slack.
_CLOSURE_TOL = 1e-10

LEDGER_COLUMNS = ("variant", "n", "W_n", "dU_n", "cumW", "cumdU", "K_n")


@dataclass(frozen=True)
class LedgerRecord:
    n: int
    work: float
    energy_reduction: float
    heat: float
    controlled: PopulationVector
    system: PopulationVector


@dataclass
class CoolingLedger:
    """Append-only per-round energetics of one run; energy_reduction is -Delta U of the target."""
    name: str
    system: HamiltonianSpec
    controlled: HamiltonianSpec
    initial_energy: float
    records: List[LedgerRecord] = field(default_factory=list)

    def append(self, record: LedgerRecord):
        expected = len(self.records) + 1
        if record.n != expected:
            raise InvalidParameterError(f"Ledger {self.name} expects round {expected}, got {record.n}")
        self.records.append(record)

    @property
    def rounds(self) -> int:
        return len(self.records)

    def cumulative(self, n: int) -> Tuple[float, float]:
        if not 0 <= n <= self.rounds:
            raise InvalidParameterError(f"Round {n} outside the recorded 0..{self.rounds}")
        work = sum(record.work for record in self.records[:n])
        reduction = sum(record.energy_reduction for record in self.records[:n])
        return work, reduction

    def min_work(self) -> float:
        return min(record.work for record in self.records)


# ============================ PER ROUND ============================

def work_per_round(spec: RoundSpec, p_before: PopulationVector) -> float:
    check_dimensions(p_before, spec.controlled)
    return float((spec.recharge @ p_before.array - p_before.array) @ spec.controlled.energies)


def energy_reduction_per_round(p_before_S: PopulationVector, p_after_S: PopulationVector,
                               hS: HamiltonianSpec) -> float:
    if p_before_S.dimension != p_after_S.dimension:
        raise DimensionMismatchError(
            f"Populations of dimension {p_before_S.dimension} and {p_after_S.dimension} are not comparable"
        )
    return mean_energy(p_before_S, hS) - mean_energy(p_after_S, hS)


def heat_to_bath(spec: RoundSpec, p_before: PopulationVector, bath: BathSpec) -> float:
    """Energy gained by the molecule during the thermalizing collision of one round."""
    check_dimensions(p_before, spec.controlled)
    recharged = PopulationVector.from_array(spec.recharge @ p_before.array)
    molecule = spec.thermalize.molecule
    after = collide_joint(spec.thermalize, joint_populations(recharged, molecule, bath)).molecule_marginal()
    return mean_energy(after, molecule) - mean_energy(gibbs(molecule, bath), molecule)


def run_ledger(spec: RoundSpec, p0: PopulationVector, bath: BathSpec, rounds: int) -> CoolingLedger:
    """
    Simulates the rounds and records work, target energy reduction and heat.

    Energy is conserved by every collision, so heat = W + (drop of controlled energy)
    on each round; a violation is a construction bug and raises.
    """
    if rounds < 0:
        raise InvalidParameterError(f"Round count must be >= 0, got {rounds}")
    check_dimensions(p0, spec.controlled)
    g = round_matrix(spec, bath)
    p_system = system_marginal(p0, spec.controlled, spec.system)
    ledger = CoolingLedger(name=spec.name, system=spec.system, controlled=spec.controlled,
                           initial_energy=mean_energy(p_system, spec.system))
    p = p0
    for n in range(1, rounds + 1):
        work = work_per_round(spec, p)
        heat = heat_to_bath(spec, p, bath)
        after = g.apply(p)
        after_system = system_marginal(after, spec.controlled, spec.system)
        controlled_drop = mean_energy(p, spec.controlled) - mean_energy(after, spec.controlled)
        if abs(heat - work - controlled_drop) > _CLOSURE_TOL:
            raise VerificationFailure(
                f"Round {n} of {spec.name} breaks energy bookkeeping: heat {heat!r}, work {work!r}, "
                f"drop {controlled_drop!r}"
            )
        ledger.append(LedgerRecord(
            n=n,
            work=work,
            energy_reduction=energy_reduction_per_round(p_system, after_system, spec.system),
            heat=heat,
            controlled=after,
            system=after_system,
        ))
        p, p_system = after, after_system
    return ledger


# ============================ EFFICIENCY ============================

def cumulative_cop(ledger: CoolingLedger, n: int) -> float:
    work, reduction = ledger.cumulative(n)
    if work <= 0.0:
        logger.warning(f"CoP of {ledger.name} undefined after {n} rounds: cumulative work {work!r}")
        raise CopUndefinedError(f"Cumulative work {work!r} after {n} rounds leaves the CoP undefined",
                                cumulative_work=work)
    return reduction / work


def protocol_I_cop_bound(ledger: CoolingLedger, n: int) -> float:
    """U_0 / (n w) with w the smallest per-round work seen in the run."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    w = ledger.min_work()
    if w <= 0.0:
        raise CopUndefinedError(f"Smallest per-round work {w!r} is not positive", cumulative_work=w)
    return ledger.initial_energy / (n * w)


def cop_trend(ledger: CoolingLedger, n: int) -> float:
    """K(2n) / K(n): near 1 for a CoP with a positive floor, near 1/2 for one vanishing like 1/n."""
    return cumulative_cop(ledger, 2 * n) / cumulative_cop(ledger, n)


def xhbac_first_round_work(dS: int, bath: BathSpec) -> float:
    """First-round work of the exchange protocol that reverses the thermal populations of a dS-level target."""
    if dS < 2:
        raise InvalidParameterError(f"dS must be >= 2, got {dS}")
    tau = gibbs(HamiltonianSpec.equally_spaced(dS, bath.gap), bath).array
    weights = dS - 1 - 2 * np.arange(dS)
    return float(bath.gap * weights @ tau)


def ledger_rows(ledger: CoolingLedger, variant: Optional[str] = None) -> List[Dict[str, object]]:
    rows = []
    cumulative_work = cumulative_reduction = 0.0
    for record in ledger.records:
        cumulative_work += record.work
        cumulative_reduction += record.energy_reduction
        rows.append({
            "variant": variant or ledger.name,
            "n": record.n,
            "W_n": record.work,
            "dU_n": record.energy_reduction,
            "cumW": cumulative_work,
            "cumdU": cumulative_reduction,
            "K_n": cumulative_reduction / cumulative_work if cumulative_work > 0.0 else "",
        })
    return rows
