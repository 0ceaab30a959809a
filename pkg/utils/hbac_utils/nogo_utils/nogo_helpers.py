#!/usr/bin/env python3

import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from utils.hbac_utils.collision_utils.collision_helpers import (
    BlockChannel,
    apply_collision,
    channel_from_label_map,
)
from utils.hbac_utils.collision_utils.collision_oracle import (
    optimal_single_collision_with_fallback,
    subset_single_collision,
)
from utils.hbac_utils.hbac_constants import Tolerance
from utils.hbac_utils.hbac_errors import InvalidParameterError, PremiseViolationError, VerificationFailure
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    PopulationVector,
    check_dimensions,
    composite_hamiltonian,
    gibbs,
    r3_witness,
    satisfies_R3,
)

logger = logging.getLogger(__name__)

# Counterexamples must beat the bound by at least this much.
COUNTEREXAMPLE_MARGIN = 1e-6


class Premises(NamedTuple):
    r1: bool
    r2: bool
    r3: bool

    @property
    def all_hold(self) -> bool:
        return self.r1 and self.r2 and self.r3

    def failing(self) -> List[str]:
        return [name.upper() for name, holds in self._asdict().items() if not holds]


@dataclass(frozen=True)
class NoGoVerdict:
    premises: Premises
    p0_star: float
    tau0_S: float
    witness: Optional[BlockChannel] = None
    label: str = ""

    @property
    def bound_holds(self) -> bool:
        return self.p0_star <= self.tau0_S + Tolerance.BOUND

    @property
    def margin(self) -> float:
        return self.tau0_S - self.p0_star

    def to_row(self) -> Dict[str, object]:
        return {
            "instance": self.label,
            "R1": self.premises.r1,
            "R2": self.premises.r2,
            "R3": self.premises.r3,
            "p0_star": self.p0_star,
            "tau0_S": self.tau0_S,
            "margin": self.margin,
            "bound_holds": self.bound_holds,
        }


# ============================ PREMISES ============================

def check_premises(hs: HamiltonianSpec, hr: HamiltonianSpec, p: PopulationVector, bath: BathSpec) -> Premises:
    check_dimensions(p, hs)
    r1 = hs.dimension >= hr.dimension
    r2 = r1 and all(abs(hs.levels[j] - hr.levels[j]) <= Tolerance.SPECTRUM_MATCH for j in range(hr.dimension))
    return Premises(r1=r1, r2=r2, r3=satisfies_R3(p, hs, bath))


def _require(premises: Premises):
    if not premises.all_hold:
        raise PremiseViolationError(
            f"Premises {', '.join(premises.failing())} do not hold; the bound is not claimed for this instance",
            premises=premises,
        )


# ============================ BOUNDS ============================

def evaluate_instance(hs: HamiltonianSpec, hr: HamiltonianSpec, p: PopulationVector, bath: BathSpec,
                      label: str = "") -> NoGoVerdict:
    """Best one-collision ground population against the Gibbs value, premises or not."""
    p0_star, witness = optimal_single_collision_with_fallback(p, hs, hr, bath)
    return NoGoVerdict(
        premises=check_premises(hs, hr, p, bath),
        p0_star=p0_star,
        tau0_S=gibbs(hs, bath)[0],
        witness=witness,
        label=label,
    )


def verify_theorem2(hs: HamiltonianSpec, hr: HamiltonianSpec, p: PopulationVector, bath: BathSpec,
                    label: str = "") -> NoGoVerdict:
    _require(check_premises(hs, hr, p, bath))
    return evaluate_instance(hs, hr, p, bath, label)


def verify_theorem3(h: HamiltonianSpec, mu: int, nu: int, p: PopulationVector, bath: BathSpec,
                    label: str = "") -> NoGoVerdict:
    """
    Bound for a system of mu independent copies of h cooled by a molecule of nu copies.

    The ground population is that of the all-zeros product label, the first level of
    the composite spectrum.
    """
    if not 1 <= nu <= mu:
        raise InvalidParameterError(f"Need 1 <= nu <= mu, got mu = {mu}, nu = {nu}")
    hs = composite_hamiltonian(h, mu)
    hr = composite_hamiltonian(h, nu)
    check_dimensions(p, hs)
    if not satisfies_R3(p, hs, bath):
        raise PremiseViolationError(f"Composite state breaks R3 at levels {r3_witness(p, hs, bath)}",
                                    premises=Premises(True, True, False))
    return evaluate_instance(hs, hr, p, bath, label)


# ============================ COUNTEREXAMPLES ============================

def counterexample_r2(bath: BathSpec) -> Tuple[float, float]:
    """
    Qutrit system cooled by a qubit molecule with gap 2E.

    The molecule's spectrum differs from the system's low-lying one, and the swap of
    |2,0> with |0,1> drives the fully excited system above the Gibbs ground population.
    """
    gap = bath.gap
    hs = HamiltonianSpec.equally_spaced(3, gap)
    hr = HamiltonianSpec(levels=(0.0, 2.0 * gap), label="2E|1><1|")
    p = PopulationVector((0.0, 0.0, 1.0))

    swaps = {(2, 0): (0, 1), (0, 1): (2, 0)}
    channel = channel_from_label_map(hs, hr, lambda k, j: swaps.get((k, j), (k, j)))
    p0_out = apply_collision(channel, p, bath)[0]
    tau0_S = gibbs(hs, bath)[0]

    q = bath.q
    expected = 1.0 / (1.0 + q ** 2)
    if abs(p0_out - expected) > Tolerance.BOUND:
        raise VerificationFailure(f"Swap channel gave p0' = {p0_out!r}, closed form is {expected!r}")
    if not p0_out > tau0_S + COUNTEREXAMPLE_MARGIN:
        raise VerificationFailure(f"p0' = {p0_out!r} does not beat tau0 = {tau0_S!r} at q = {q}")
    return p0_out, tau0_S


def counterexample_margins(grid: Sequence[float] = tuple(np.linspace(0.1, 0.9, 9))) -> List[Dict[str, float]]:
    rows = []
    for q in grid:
        p0_out, tau0_S = counterexample_r2(BathSpec.from_q(float(q)))
        rows.append({"q": float(q), "p0_out": p0_out, "tau0_S": tau0_S, "margin": p0_out - tau0_S})
    return rows


def three_qubit_populations(pbar0: float, bath: BathSpec) -> Tuple[HamiltonianSpec, PopulationVector]:
    """First qubit at ground population pbar0, the other two thermal, on the composite spectrum."""
    qubit = HamiltonianSpec.equally_spaced(2, bath.gap, label="h")
    h = composite_hamiltonian(qubit, 3)
    first = np.array([pbar0, 1.0 - pbar0])
    thermal = gibbs(qubit, bath).array
    factors = (first, thermal, thermal)
    return h, PopulationVector.from_array([
        np.prod([factor[i] for factor, i in zip(factors, label)]) for label in h.basis_labels
    ])


def three_qubit_example(pbar0: float, bath: BathSpec, cross_check: bool = True) -> Tuple[float, float]:
    """
    Three-qubit system cooled below the no-go bound by a three-qubit molecule.

    Only the first qubit is out of equilibrium, so R3 fails. Cooling that qubit alone
    already lifts the ground population above the Gibbs value; with cross_check the
    optimal collision on the full composite must reach the same value.
    """
    q = bath.q
    t0, t1 = 1.0 / (1.0 + q), q / (1.0 + q)
    if not 0.0 <= pbar0 <= 1.0:
        raise InvalidParameterError(f"pbar0 must lie in [0, 1], got {pbar0}")
    if pbar0 > t0 + Tolerance.ORDERING:
        raise InvalidParameterError(f"pbar0 = {pbar0} must not exceed the thermal value {t0}")

    cooled = t0 + t0 * t1 * (t0 - pbar0)
    p_ground_out = cooled * t0 ** 2
    tau0_S = t0 ** 3
    if abs(pbar0 - t0) <= Tolerance.ORDERING:
        return p_ground_out, tau0_S

    h, p = three_qubit_populations(pbar0, bath)
    witness = r3_witness(p, h, bath)
    if witness is None:
        raise VerificationFailure(f"Initial composite state unexpectedly satisfies R3 at pbar0 = {pbar0}")
    logger.debug("R3 broken by levels %s and %s", h.format_label(witness[0]), h.format_label(witness[1]))
    if not p_ground_out > tau0_S:
        raise VerificationFailure(f"Ground population {p_ground_out!r} does not beat {tau0_S!r}")

    if cross_check:
        optimum = subset_single_collision(p, h, h, bath)
        if abs(optimum - p_ground_out) > Tolerance.BOUND:
            raise VerificationFailure(
                f"Optimal collision reaches {optimum!r}, closed form gives {p_ground_out!r}"
            )
    return p_ground_out, tau0_S
