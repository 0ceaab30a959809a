#!/usr/bin/env python3

"""Renders the cooling-limit and CoP comparison of the simulated protocols next to the known literature rows."""

import logging
from typing import Dict, List

from tabulate import tabulate

from utils.hbac_utils.hbac_errors import CopUndefinedError
from utils.hbac_utils.protocol_utils.protocol_builders import (
    build_protocol_I,
    build_protocol_II_cooling_limit,
    build_protocol_II_efficiency,
)
from utils.hbac_utils.protocol_utils.protocol_helpers import RoundSpec, fixed_point, round_matrix, system_marginal
from utils.hbac_utils.spectra_utils.spectra_helpers import BathSpec, fit_inverse_temperature, gibbs
from utils.hbac_utils.thermo_utils.thermo_helpers import cop_trend, run_ledger

logger = logging.getLogger(__name__)

HEADERS = ["Thermalization", "Machine", "beta*/beta", "cumulative CoP", "source"]

# K(2N)/K(N) above this reads as a CoP with a positive floor
POSITIVE_COP_TREND = 0.75
TREND_ROUNDS = 100

LITERATURE_ROWS = [
    ["partial trace + reset of the machine", "m qubits", "m", "positive", "literature"],
    ["reset of one machine qubit (PPA)", "m qubits", "2^(m-1)", "positive", "literature"],
    ["full thermalization in an SM subspace (SR)", "m qubits", "2^(m+1) - 1", "zero", "literature"],
    ["full set of thermal operations (xHBAC)", "none", "inf", "zero", "literature"],
]


def simulated_row(label: str, machine: str, spec: RoundSpec, bath: BathSpec) -> List[str]:
    fixed = fixed_point(round_matrix(spec, bath))
    marginal = system_marginal(fixed, spec.controlled, spec.system)
    ratio, spread = fit_inverse_temperature(marginal, spec.system, bath)
    return [label, machine, f"{ratio:.2f} (spread {spread:.2g})", cop_flag(spec, bath), "simulated"]


def cop_flag(spec: RoundSpec, bath: BathSpec, rounds: int = TREND_ROUNDS) -> str:
    # the Gibbs state of a system-machine composite is the product of the two Gibbs states
    p0 = gibbs(spec.controlled, bath)
    ledger = run_ledger(spec, p0, bath, 2 * rounds)
    try:
        trend = cop_trend(ledger, rounds)
    except CopUndefinedError as err:
        logger.warning("CoP of %s undefined: cumulative work %r", spec.name, err.cumulative_work)
        return "undefined"
    return "positive" if trend > POSITIVE_COP_TREND else "zero"


def summary_rows(bath: BathSpec) -> List[List[str]]:
    rows = [list(row) for row in LITERATURE_ROWS]
    rows.append(simulated_row("one collision, qutrit molecule (dS = dr = 3)", "none", build_protocol_I(3, 3, bath), bath))
    rows.append(simulated_row("one collision, dr = 4 molecule (dS = 4)", "none", build_protocol_I(4, 4, bath), bath))
    rows.append(simulated_row("one collision on SM, efficiency variant", "1 qubit", build_protocol_II_efficiency(bath), bath))
    rows.append(simulated_row("one collision on SM, cooling-limit variant", "1 qubit",
                              build_protocol_II_cooling_limit(bath), bath))
    return rows


def emit_summary_table(bath: BathSpec) -> str:
    return tabulate(summary_rows(bath), headers=HEADERS, tablefmt="github")


def summary_records(bath: BathSpec) -> List[Dict[str, str]]:
    return [dict(zip(HEADERS, row)) for row in summary_rows(bath)]

