#!/usr/bin/env python3

"""Plain-text dump of a BlockChannel: spectra first, then one section per subspace."""

from typing import List

import numpy as np

from utils.hbac_utils.collision_utils.collision_helpers import BlockChannel, SubspaceIndex
from utils.hbac_utils.hbac_errors import InvalidParameterError
from utils.hbac_utils.spectra_utils.spectra_helpers import HamiltonianSpec

HEADER = "# collision channel"


def dumps_channel(ch: BlockChannel) -> str:
    lines = [
        HEADER,
        _spectrum_line("system", ch.system),
        _spectrum_line("molecule", ch.molecule),
    ]
    for subspace, block in zip(ch.subspaces, ch.blocks):
        basis = " ".join(f"{k}:{j}" for k, j in subspace.basis)
        lines.append(f"subspace {subspace.energy!r} basis {basis}")
        for row in block:
            lines.append("row " + " ".join(repr(float(value)) for value in row))
    return "\n".join(lines) + "\n"


def loads_channel(text: str) -> BlockChannel:
    lines = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if len(lines) < 2:
        raise InvalidParameterError("Channel text is missing its spectrum lines")
    system = _parse_spectrum(lines[0], "system")
    molecule = _parse_spectrum(lines[1], "molecule")

    subspaces: List[SubspaceIndex] = []
    blocks: List[List[List[float]]] = []
    for line in lines[2:]:
        keyword, _, rest = line.partition(" ")
        if keyword == "subspace":
            energy, _, basis = rest.partition(" basis ")
            labels = tuple(tuple(int(i) for i in item.split(":")) for item in basis.split())
            subspaces.append(SubspaceIndex(energy=float(energy), basis=labels))
            blocks.append([])
        elif keyword == "row" and blocks:
            blocks[-1].append([float(value) for value in rest.split()])
        else:
            raise InvalidParameterError(f"Unexpected channel line: {line!r}")

    return BlockChannel(system=system, molecule=molecule, subspaces=tuple(subspaces),
                        blocks=tuple(np.array(block) for block in blocks))


# ---------------------------------------------------------------------------

def _spectrum_line(name: str, h: HamiltonianSpec) -> str:
    levels = ",".join(repr(level) for level in h.levels)
    labels = ",".join("-".join(str(i) for i in label) for label in h.basis_labels)
    return f"{name} {levels} labels {labels}"


def _parse_spectrum(line: str, name: str) -> HamiltonianSpec:
    keyword, _, rest = line.partition(" ")
    if keyword != name:
        raise InvalidParameterError(f"Expected a '{name}' line, got {line!r}")
    levels, _, labels = rest.partition(" labels ")
    return HamiltonianSpec(
        levels=tuple(float(level) for level in levels.split(",")),
        label=name,
        basis_labels=tuple(tuple(int(i) for i in label.split("-")) for label in labels.split(",")),
    )
