#!/usr/bin/env python3

import cmath
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from utils.hbac_utils.cone_utils.cone_constants import ConeKind
from utils.hbac_utils.hbac_constants import Tolerance
from utils.hbac_utils.hbac_errors import InvalidParameterError
from utils.hbac_utils.spectra_utils.spectra_helpers import BathSpec, PopulationVector

# Cone membership is checked with a looser slack than normalization.
_MEMBERSHIP_TOL = 1e-10


# ============================ DOMAIN TYPES ============================

@dataclass(frozen=True)
class BlochState:
    """Qubit state with Bloch vector (eta cos phi, eta sin phi, z); rho00 = (1 + z) / 2."""
    eta: float
    phi: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if self.eta < 0:
            raise InvalidParameterError(f"eta must be non-negative, got {self.eta}")
        if abs(self.z) > 1.0 + Tolerance.NORMALIZATION:
            raise InvalidParameterError(f"z must lie in [-1, 1], got {self.z}")
        if self.eta ** 2 + self.z ** 2 > 1.0 + Tolerance.NORMALIZATION:
            raise InvalidParameterError(f"Bloch vector ({self.eta}, {self.z}) is longer than 1")

    @classmethod
    def thermal(cls, bath: BathSpec) -> "BlochState":
        return cls(eta=0.0, phi=0.0, z=thermal_z(bath))

    @property
    def rho00(self) -> float:
        return (1.0 + self.z) / 2.0

    def vector(self) -> np.ndarray:
        return np.array([self.eta * math.cos(self.phi), self.eta * math.sin(self.phi), self.z])


@dataclass(frozen=True)
class QubitCollisionParams:
    u00_abs: float
    alpha: float = 0.0
    n: int = 1

    def __post_init__(self):
        if not 0.0 <= self.u00_abs <= 1.0:
            raise InvalidParameterError(f"|u00| must lie in [0, 1], got {self.u00_abs}")
        if self.n < 1:
            raise InvalidParameterError(f"Collision count must be >= 1, got {self.n}")


@dataclass(frozen=True)
class ConeRegion:
    """
    Reachable set.

    Qubit regions are stored by the input (eta, z), the thermal z_tau and the factor
    applied to the upper eta' bound to get the lower one. Qutrit regions carry
    per-level intervals and their extreme points.
    """
    kind: str
    eta: float = 0.0
    z: float = 0.0
    z_tau: float = 0.0
    lower_factor: float = 0.0
    intervals: Tuple[Tuple[float, float], ...] = ()
    extreme_points: Tuple[PopulationVector, ...] = ()
    labels: Tuple[str, ...] = ()

    @property
    def is_point_like(self) -> bool:
        return abs(self.z - self.z_tau) <= Tolerance.NORMALIZATION

    def z_range(self) -> Tuple[float, float]:
        return min(self.z, self.z_tau), max(self.z, self.z_tau)

    def eta_bounds(self, z_prime: float) -> Tuple[float, float]:
        if self.kind != ConeKind.QUBIT:
            raise InvalidParameterError("eta bounds exist only for qubit regions")
        if self.is_point_like:
            if abs(z_prime - self.z_tau) > _MEMBERSHIP_TOL:
                raise InvalidParameterError(f"z' = {z_prime} is not reachable, only z_tau = {self.z_tau}")
            return 0.0, self.eta
        ratio = (z_prime - self.z_tau) / (self.z - self.z_tau)
        if ratio < -_MEMBERSHIP_TOL or ratio > 1.0 + _MEMBERSHIP_TOL:
            raise InvalidParameterError(f"z' = {z_prime} lies outside {self.z_range()}")
        root = math.sqrt(min(max(ratio, 0.0), 1.0))
        return self.lower_factor * self.eta * root, self.eta * root

    def contains(self, state, tol: float = _MEMBERSHIP_TOL) -> bool:
        if self.kind == ConeKind.QUBIT:
            low, high = self.z_range()
            if not low - tol <= state.z <= high + tol:
                return False
            z_prime = min(max(state.z, low), high)
            eta_min, eta_max = self.eta_bounds(z_prime)
            return eta_min - tol <= state.eta <= eta_max + tol
        return all(low - tol <= value <= high + tol for value, (low, high) in zip(state.probs, self.intervals))

    def to_rows(self) -> List[Dict[str, object]]:
        rows = []
        for level, (low, high) in enumerate(self.intervals):
            rows.append({"kind": "interval", "label": f"p{level}", "low": low, "high": high})
        for label, point in zip(self.labels, self.extreme_points):
            row = {"kind": "extreme", "label": label}
            row.update({f"p{level}": value for level, value in enumerate(point.probs)})
            rows.append(row)
        return rows


# ============================ QUBIT CONES ============================

def thermal_z(bath: BathSpec) -> float:
    return (1.0 - bath.q) / (1.0 + bath.q)


def qubit_cone(b: BlochState, bath: BathSpec, n: int) -> ConeRegion:
    if n < 1:
        raise InvalidParameterError(f"Collision count must be >= 1, got {n}")
    z_tau = thermal_z(bath)
    return ConeRegion(kind=ConeKind.QUBIT, eta=b.eta, z=b.z, z_tau=z_tau, lower_factor=z_tau ** n)


def mto_qubit_cone(b: BlochState, bath: BathSpec) -> ConeRegion:
    return ConeRegion(kind=ConeKind.QUBIT, eta=b.eta, z=b.z, z_tau=thermal_z(bath), lower_factor=0.0)


def qubit_collision_output(b: BlochState, params: QubitCollisionParams, bath: BathSpec) -> BlochState:
    tau0 = 1.0 / (1.0 + bath.q)
    shrink = params.u00_abs ** params.n
    rho00 = tau0 + shrink ** 2 * (b.rho00 - tau0)
    dephasing = (1.0 - tau0) + tau0 * cmath.exp(1j * params.alpha)
    eta = b.eta * shrink * abs(dephasing) ** params.n
    phi = (b.phi - params.n * cmath.phase(dephasing)) % (2.0 * math.pi)
    z = min(max(2.0 * rho00 - 1.0, -1.0), 1.0)
    return BlochState(eta=eta, phi=phi, z=z)


def qubit_cone_boundary(region: ConeRegion, z_grid: Sequence[float]) -> np.ndarray:
    """
    Boundary points of a qubit region in the (z', x') plane, x' = +-eta'.

    The region is symmetric under phase rotation, so both signs are listed.
    """
    low, high = region.z_range()
    points = []
    for z_prime in z_grid:
        z_prime = min(max(float(z_prime), low), high)
        eta_min, eta_max = region.eta_bounds(z_prime)
        for eta in (eta_min, eta_max):
            points.append((z_prime, eta))
            points.append((z_prime, -eta))
    return np.array(points)
