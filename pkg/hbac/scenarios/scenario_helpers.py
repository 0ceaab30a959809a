#!/usr/bin/env python3

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from hbac.scenarios.scenario_constants import Columns, Initial
from utils.hbac_utils.cone_utils.cone_helpers import ConeRegion
from utils.hbac_utils.hbac_errors import InvalidParameterError
from utils.hbac_utils.protocol_utils.protocol_builders import (
    build_protocol_I,
    build_protocol_II_cooling_limit,
    build_protocol_II_efficiency,
    build_single_round_protocol,
)
from utils.hbac_utils.protocol_utils.protocol_constants import Variant
from utils.hbac_utils.protocol_utils.protocol_helpers import RoundSpec, system_marginal
from utils.hbac_utils.spectra_utils.spectra_config import bath_from_config
from utils.hbac_utils.spectra_utils.spectra_helpers import BathSpec, PopulationVector, gibbs

logger = logging.getLogger(__name__)


def bath_from_args(q: Optional[float], beta: Optional[float], gap: float) -> BathSpec:
    values = {"q": q, "beta": beta, "E": gap}
    return bath_from_config({key: repr(value) for key, value in values.items() if value is not None})


def parse_populations(text: str) -> PopulationVector:
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise InvalidParameterError(f"Cannot read populations from {text!r}") from None
    return PopulationVector(tuple(values))


def parse_variants(text: str, allowed: Sequence[str]) -> List[str]:
    variants = [item.strip() for item in text.split(",") if item.strip()]
    unknown = [variant for variant in variants if variant not in allowed]
    if not variants or unknown:
        raise InvalidParameterError(f"Unknown variants {unknown or text!r}; choose from {', '.join(allowed)}")
    return variants


def build_round(variant: str, bath: BathSpec, dS: int = 3, dr: int = 3) -> RoundSpec:
    if variant == Variant.I:
        return build_protocol_I(dS, 3, bath)
    if variant == Variant.I_GENERAL:
        return build_protocol_I(dS, dr, bath)
    if variant == Variant.II_EFFICIENCY:
        return build_protocol_II_efficiency(bath)
    if variant == Variant.II_COOLING:
        return build_protocol_II_cooling_limit(bath)
    if variant == Variant.I_SINGLE:
        return build_single_round_protocol(bath, machine=False)
    if variant == Variant.II_SINGLE:
        return build_single_round_protocol(bath, machine=True)
    raise InvalidParameterError(f"Unknown protocol variant {variant!r}")


def initial_state(spec: RoundSpec, bath: BathSpec, initial: str = Initial.GIBBS,
                  populations: Optional[str] = None) -> PopulationVector:
    """Start on the controlled system; a machine always starts thermal."""
    if initial == Initial.GIBBS:
        system = gibbs(spec.system, bath)
    elif initial == Initial.EXCITED:
        values = np.zeros(spec.system.dimension)
        values[-1] = 1.0
        system = PopulationVector(tuple(values))
    elif initial == Initial.CUSTOM:
        if not populations:
            raise InvalidParameterError("--initial custom needs --p")
        system = parse_populations(populations)
    else:
        raise InvalidParameterError(f"Unknown initial state {initial!r}")

    if system.dimension != spec.system.dimension:
        raise InvalidParameterError(f"Initial state has {system.dimension} levels, target has {spec.system.dimension}")
    logger.debug(f"Initial {initial} state {system.probs} for {spec.name}")
    if not spec.has_machine:
        return system
    return PopulationVector.from_array(np.kron(system.array, gibbs(spec.machine, bath).array))


def qutrit_cone_rows(region: ConeRegion, kind: str = "cone") -> List[Dict[str, object]]:
    rows = []
    for row in region.to_rows():
        rows.append(_fill(dict(row, kind=f"{kind}-{row['kind']}"), Columns.QUTRIT_CONE))
    return rows


def hull_rows(points: Sequence[PopulationVector], kind: str) -> List[Dict[str, object]]:
    return [
        _fill({"kind": kind, "label": f"H{i}", "p0": p[0], "p1": p[1], "p2": p[2]}, Columns.QUTRIT_CONE)
        for i, p in enumerate(points)
    ]


def boundary_rows(points: np.ndarray, kind: str) -> List[Dict[str, object]]:
    return [{"kind": kind, "z": float(z), "x": float(x)} for z, x in points]


def trajectory_rows(variant: str, states: Sequence[PopulationVector], reference: Sequence[PopulationVector],
                    spec: RoundSpec) -> List[Dict[str, object]]:
    """Per-round system populations and the max distance to the matching long-run state."""
    rows = []
    for n, state in enumerate(states):
        marginal = system_marginal(state, spec.controlled, spec.system)
        row = {"variant": variant, "n": n}
        row.update({f"S{level}": value for level, value in enumerate(marginal.probs)})
        target = reference[n % len(reference)]
        row["dist"] = float(np.max(np.abs(state.array - target.array)))
        rows.append(row)
    return rows


def trajectory_columns(spec: RoundSpec) -> tuple:
    return ("variant", "n") + tuple(f"S{level}" for level in range(spec.system.dimension)) + ("dist",)


def sibling_path(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}_{suffix}{path.suffix}")


def _fill(row: Dict[str, object], columns: Sequence[str]) -> Dict[str, object]:
    return {column: row.get(column, "") for column in columns}
