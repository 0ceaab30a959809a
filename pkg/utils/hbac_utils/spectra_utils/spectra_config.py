#!/usr/bin/env python3

from typing import Dict, Mapping, Tuple

from utils.hbac_utils.hbac_errors import InvalidParameterError
from utils.hbac_utils.spectra_utils.spectra_helpers import (
    BathSpec,
    HamiltonianSpec,
    composite_hamiltonian,
)


class Kind:
    EQUALLY_SPACED = "equally_spaced"
    EXPLICIT = "explicit"
    COMPOSITE = "composite"


def hamiltonian_from_config(config: Mapping[str, str]) -> HamiltonianSpec:
    """
    Builds a HamiltonianSpec from a KEY=VALUE mapping.

    kind=equally_spaced needs d (and optionally E); kind=explicit needs levels
    (comma separated); kind=composite needs copies plus either d or levels for the
    single particle.
    """
    values = _lower_keys(config)
    kind = values.get("kind", Kind.EQUALLY_SPACED)
    gap = _as_float(values, "e", 1.0)

    if kind == Kind.EQUALLY_SPACED:
        return HamiltonianSpec.equally_spaced(_as_int(values, "d"), gap)
    if kind == Kind.EXPLICIT:
        return HamiltonianSpec.explicit(_as_levels(values))
    if kind == Kind.COMPOSITE:
        if "levels" in values:
            particle = HamiltonianSpec.explicit(_as_levels(values))
        else:
            particle = HamiltonianSpec.equally_spaced(_as_int(values, "d"), gap)
        return composite_hamiltonian(particle, _as_int(values, "copies"))
    raise InvalidParameterError(f"Unknown Hamiltonian kind '{kind}'")


def hamiltonian_to_config(h: HamiltonianSpec) -> Dict[str, str]:
    particle, copies = _composite_factor(h)
    if copies > 1:
        config = hamiltonian_to_config(particle)
        config["kind"] = Kind.COMPOSITE
        config["copies"] = str(copies)
        return config
    gap = h.levels[1] - h.levels[0]
    if gap > 0 and all(level == j * gap for j, level in enumerate(h.levels)):
        return {"kind": Kind.EQUALLY_SPACED, "d": str(h.dimension), "E": repr(gap)}
    return {"kind": Kind.EXPLICIT, "levels": ",".join(repr(level) for level in h.levels)}


def _composite_factor(h: HamiltonianSpec) -> Tuple[HamiltonianSpec, int]:
    """Single particle and copy count when h is exactly composite_hamiltonian of it, else (h, 1)."""
    copies = len(h.basis_labels[0])
    d = 1 + max(max(label) for label in h.basis_labels)
    if copies < 2 or d < 2 or d ** copies != h.dimension:
        return h, 1
    ground = h.levels[h.index_of((0,) * copies)]
    offset = ground / copies
    levels = [h.levels[h.index_of((0,) * (copies - 1) + (j,))] - ground + offset for j in range(d)]
    if any(upper < lower for lower, upper in zip(levels, levels[1:])):
        return h, 1
    gap = levels[1] - levels[0]
    if levels[0] == 0.0 and gap > 0 and all(level == j * gap for j, level in enumerate(levels)):
        particle = HamiltonianSpec.equally_spaced(d, gap)
    else:
        particle = HamiltonianSpec.explicit(levels)
    rebuilt = composite_hamiltonian(particle, copies)
    if rebuilt.levels != h.levels or rebuilt.basis_labels != h.basis_labels:
        return h, 1
    return particle, copies


def bath_from_config(config: Mapping[str, str]) -> BathSpec:
    values = _lower_keys(config)
    gap = _as_float(values, "e", 1.0)
    if "q" in values and "beta" in values:
        return BathSpec(beta=_as_float(values, "beta"), gap=gap, q=_as_float(values, "q"))
    if "q" in values:
        return BathSpec.from_q(_as_float(values, "q"), gap)
    if "beta" in values:
        return BathSpec.from_beta(_as_float(values, "beta"), gap)
    raise InvalidParameterError("Bath config needs 'q' or 'beta'")


def bath_to_config(bath: BathSpec) -> Dict[str, str]:
    return {"beta": repr(bath.beta), "q": repr(bath.q), "E": repr(bath.gap)}


# ---------------------------------------------------------------------------

def _lower_keys(config):
    return {str(key).strip().lower(): str(value).strip() for key, value in config.items() if value is not None}


def _as_float(values, key, default=None):
    if key not in values:
        if default is None:
            raise InvalidParameterError(f"Missing config key '{key}'")
        return default
    try:
        return float(values[key])
    except ValueError:
        raise InvalidParameterError(f"Config key '{key}' is not a number: {values[key]!r}") from None


def _as_int(values, key):
    if key not in values:
        raise InvalidParameterError(f"Missing config key '{key}'")
    try:
        return int(values[key])
    except ValueError:
        raise InvalidParameterError(f"Config key '{key}' is not an integer: {values[key]!r}") from None


def _as_levels(values):
    if "levels" not in values:
        raise InvalidParameterError("Missing config key 'levels'")
    try:
        return [float(level) for level in values["levels"].split(",") if level.strip()]
    except ValueError:
        raise InvalidParameterError(f"Bad levels list {values['levels']!r}") from None
