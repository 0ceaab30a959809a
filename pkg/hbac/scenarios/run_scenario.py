#!/usr/bin/env python3

"""
Scenario runner: cone reachability, no-go verification, protocol trajectories,
energetics series and the summary table, each written to a data file.

    python3 hbac/scenarios/run_scenario.py cone --q 0.5 --initial subsetV-canonical --out fig2.csv
    python3 hbac/scenarios/run_scenario.py cop --q 0.3 --rounds 200 --variant I,II --out fig34.csv
    python3 hbac/scenarios/run_scenario.py nogo --sweep default --seed 7
"""

import argparse
import logging
import os
import sys
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..')))

import numpy as np
from tabulate import tabulate

from hbac.scenarios.scenario_constants import COP_VARIANTS, Columns, Command, Defaults, FileName, Initial, Sweep
from hbac.scenarios.scenario_helpers import (
    bath_from_args,
    boundary_rows,
    build_round,
    hull_rows,
    initial_state,
    parse_populations,
    parse_variants,
    qutrit_cone_rows,
    sibling_path,
    trajectory_columns,
    trajectory_rows,
)
from hbac.tools.summary_table import HEADERS as SUMMARY_HEADERS, emit_summary_table, summary_records
from utils.hbac_utils.collision_utils.channel_text import dumps_channel
from utils.hbac_utils.cone_utils.cone_helpers import BlochState, mto_qubit_cone, qubit_cone, qubit_cone_boundary
from utils.hbac_utils.cone_utils.qutrit_cones import mto_qutrit_inner_bound, qutrit_cone, qutrit_hamiltonian
from utils.hbac_utils.file_helpers import create_output_file, write_rows
from utils.hbac_utils.hbac_constants import ExitCode, LogFormat
from utils.hbac_utils.hbac_errors import CopUndefinedError, HbacError, InvalidParameterError, VerificationFailure
from utils.hbac_utils.nogo_utils.nogo_helpers import counterexample_margins, three_qubit_example
from utils.hbac_utils.nogo_utils.nogo_sweeps import theorem2_sweep, theorem3_sweep, verdict_rows, verdict_table
from utils.hbac_utils.protocol_utils.protocol_constants import Variant
from utils.hbac_utils.protocol_utils.protocol_helpers import (
    fixed_point,
    parity_limits,
    round_matrix,
    system_marginal,
    trajectory,
)
from utils.hbac_utils.protocol_utils.protocol_limits import cooling_limit
from utils.hbac_utils.spectra_utils.spectra_helpers import BathSpec, fit_inverse_temperature, gibbs
from utils.hbac_utils.thermo_utils.thermo_helpers import (
    LEDGER_COLUMNS,
    cumulative_cop,
    ledger_rows,
    protocol_I_cop_bound,
    run_ledger,
)
from utils.hbac_utils.utilities import format_vector, read_config_file, resolve_output_path

logger = logging.getLogger(__name__)


class ScenarioParser(argparse.ArgumentParser):
    """Raises instead of exiting so bad flags map to the invalid-parameter exit code."""

    def error(self, message):
        raise InvalidParameterError(message)


# ============================ PARSER ============================

def build_parser(config=None) -> argparse.ArgumentParser:
    common = ScenarioParser(add_help=False)
    bath = common.add_argument_group("bath")
    bath.add_argument("--q", type=float, help=f"Boltzmann factor exp(-beta E), default {Defaults.Q}")
    bath.add_argument("--beta", type=float, help="inverse temperature, alternative to --q")
    bath.add_argument("--E", dest="gap", type=float, default=Defaults.GAP, help="reference gap E")
    common.add_argument("--seed", type=int, default=Defaults.SEED)
    common.add_argument("--out", help="output file; relative names go to $HBAC_OUTPUT_DIR when set")
    common.add_argument("--format", dest="output_format", choices=("csv", "records"), default=None)
    common.add_argument("--config", help="KEY=VALUE file with defaults for any long flag")
    common.add_argument("--log-file", dest="log_file")
    common.add_argument("--verbose", action="store_true")

    parser = ScenarioParser(description="Collision-model cooling scenarios")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ScenarioParser)

    cone = commands.add_parser(Command.CONE, parents=[common], help="reachable sets after collisions")
    cone.add_argument("--kind", choices=("qutrit", "qubit"), default="qutrit")
    cone.add_argument("--initial", default=Initial.SUBSET_V_CANONICAL,
                      help=f"'{Initial.SUBSET_V_CANONICAL}' or '{Initial.CUSTOM}' with --p")
    cone.add_argument("--p", help="comma-separated qutrit populations")
    cone.add_argument("--eta", type=float, default=0.5)
    cone.add_argument("--z", type=float, default=0.0)
    cone.add_argument("--phi", type=float, default=0.0)
    cone.add_argument("--collisions", type=int, default=1)
    cone.add_argument("--z-points", dest="z_points", type=int, default=Defaults.Z_POINTS)
    cone.add_argument("--budget", type=int, default=Defaults.MTO_BUDGET)
    cone.add_argument("--samples", type=int, default=Defaults.MTO_SAMPLES)

    nogo = commands.add_parser(Command.NOGO, parents=[common], help="no-go bound sweeps and counterexamples")
    nogo.add_argument("--sweep", choices=Sweep.ALL, default=Sweep.DEFAULT)
    nogo.add_argument("--count", type=int, help="instances per theorem sweep")
    nogo.add_argument("--pbar0", type=float, default=Defaults.PBAR0)

    protocol = commands.add_parser(Command.PROTOCOL, parents=[common], help="iterate a cooling protocol")
    protocol.add_argument("--variant", choices=Variant.ALL, default=Variant.I)
    protocol.add_argument("--dS", type=int, default=3)
    protocol.add_argument("--dr", type=int, default=3)
    protocol.add_argument("--rounds", type=int, default=Defaults.ROUNDS)
    protocol.add_argument("--initial", choices=(Initial.GIBBS, Initial.EXCITED, Initial.CUSTOM), default=Initial.GIBBS)
    protocol.add_argument("--p", help="comma-separated target populations for --initial custom")

    cop = commands.add_parser(Command.COP, parents=[common], help="work, energy reduction and cumulative CoP")
    cop.add_argument("--variant", default="I,II", help="comma-separated subset of " + ",".join(COP_VARIANTS))
    cop.add_argument("--rounds", type=int, default=Defaults.COP_ROUNDS)

    commands.add_parser(Command.REPORT, parents=[common], help="summary table of cooling limits and CoP")

    if config:
        for subparser in commands.choices.values():
            dests = {action.dest.lower(): action.dest for action in subparser._actions}
            subparser.set_defaults(**{dests[key]: value for key, value in config.items() if key in dests})
    return parser


def parse_arguments(argv=None) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    config = None
    if known.config:
        config = read_config_file(known.config)
        if "e" in config:
            config["gap"] = config.pop("e")
        if "format" in config:
            config["output_format"] = config.pop("format")
        if "verbose" in config:
            config["verbose"] = config["verbose"].strip().lower() in ("1", "true", "yes")
    args = build_parser(config).parse_args(argv)
    if args.q is None and args.beta is None:
        args.q = Defaults.Q
    return args


# ============================ COMMANDS ============================

def run_cone(args, bath: BathSpec):
    if args.kind == "qubit":
        state = BlochState(eta=args.eta, phi=args.phi, z=args.z)
        region = qubit_cone(state, bath, args.collisions)
        low, high = region.z_range()
        grid = np.linspace(low, high, args.z_points)
        rows = boundary_rows(qubit_cone_boundary(region, grid), "collision")
        rows += boundary_rows(qubit_cone_boundary(mto_qubit_cone(state, bath), grid), "mto")
        print(f"ℹ Qubit cone after {args.collisions} collision(s): z' in [{low:.6f}, {high:.6f}]")
        return rows, Columns.QUBIT_CONE, FileName.CONE

    if args.initial == Initial.SUBSET_V_CANONICAL:
        t0, t1, t2 = gibbs(qutrit_hamiltonian(bath), bath).probs
        p = parse_populations(f"{t1},{t0},{t2}")
    elif args.initial == Initial.CUSTOM and args.p:
        p = parse_populations(args.p)
    else:
        raise InvalidParameterError(f"Unknown initial qutrit state {args.initial!r}")

    region = qutrit_cone(p, bath)
    hull = mto_qutrit_inner_bound(p, bath, args.budget, samples=args.samples, seed=args.seed)
    rows = qutrit_cone_rows(region) + hull_rows(hull, "mto-hull")
    for (low, high), level in zip(region.intervals, range(3)):
        print(f"ℹ p{level}' in [{low:.6f}, {high:.6f}]")
    print(f"ℹ MTO inner bound: {len(hull)} hull points, "
          f"min p2' = {min(point[2] for point in hull):.6f}, max p0' = {max(point[0] for point in hull):.6f}")
    return rows, Columns.QUTRIT_CONE, FileName.CONE


def run_nogo(args, bath: BathSpec):
    verdicts = []
    if args.sweep in (Sweep.DEFAULT, Sweep.THEOREM2):
        verdicts += theorem2_sweep(bath, seed=args.seed, **({"count": args.count} if args.count else {}))
    if args.sweep in (Sweep.DEFAULT, Sweep.THEOREM3):
        verdicts += theorem3_sweep(bath, seed=args.seed, **({"count": args.count} if args.count else {}))

    margins = []
    if args.sweep in (Sweep.DEFAULT, Sweep.COUNTEREXAMPLES):
        margins = counterexample_margins()
        p_out, tau0 = three_qubit_example(args.pbar0, bath)
        print(tabulate(margins, headers="keys", tablefmt="github", floatfmt=".6f"))
        print(f"✔ Three-qubit example: ground population {p_out:.6f} > {tau0:.6f}")

    if verdicts:
        print(verdict_table(verdicts))
    broken = [verdict.label for verdict in verdicts if not verdict.bound_holds]
    if broken:
        raise VerificationFailure(f"No-go bound violated on {len(broken)} instance(s): {', '.join(broken)}")
    if verdicts:
        print(f"✔ Bound holds on all {len(verdicts)} instances")

    if not verdicts:
        return margins, Columns.COUNTEREXAMPLE, FileName.NOGO
    extra = [(margins, Columns.COUNTEREXAMPLE, "counterexamples")] if margins else []
    tightest = min((verdict for verdict in verdicts if verdict.witness is not None),
                   key=lambda verdict: verdict.margin, default=None)
    if tightest is not None:
        print(f"ℹ Witness channel of the tightest instance {tightest.label} (margin {tightest.margin:.3e})")
        extra.append((f"# instance {tightest.label}\n" + dumps_channel(tightest.witness), None, "witness"))
    return verdict_rows(verdicts), Columns.VERDICT, FileName.NOGO, extra


def run_protocol(args, bath: BathSpec):
    if args.rounds < 0:
        raise InvalidParameterError(f"--rounds must be >= 0, got {args.rounds}")
    spec = build_round(args.variant, bath, args.dS, args.dr)
    p0 = initial_state(spec, bath, args.initial, args.p)
    states = trajectory(spec, p0, bath, args.rounds)

    g = round_matrix(spec, bath)
    if args.variant == Variant.II_EFFICIENCY:
        even, odd = parity_limits(spec, p0, bath)
        reference = [even, odd]
    else:
        reference = [fixed_point(g)]
    marginal = system_marginal(reference[0], spec.controlled, spec.system)
    ratio, spread = fit_inverse_temperature(marginal, spec.system, bath)
    print(f"ℹ {spec.name}: long-run target state {format_vector(marginal.probs)}, beta*/beta = {ratio:.4f} ± {spread:.1e}")
    if args.variant in (Variant.I, Variant.I_GENERAL):
        dr = 3 if args.variant == Variant.I else args.dr
        print(f"ℹ Closed-form ground population {cooling_limit(args.dS, dr, bath):.12f}")
    return trajectory_rows(args.variant, states, reference, spec), trajectory_columns(spec), FileName.PROTOCOL


def run_cop(args, bath: BathSpec):
    if args.rounds < 1:
        raise InvalidParameterError(f"--rounds must be >= 1, got {args.rounds}")
    rows = []
    for name in parse_variants(args.variant, tuple(COP_VARIANTS)):
        spec = build_round(COP_VARIANTS[name], bath)
        ledger = run_ledger(spec, initial_state(spec, bath), bath, args.rounds)
        rows += ledger_rows(ledger, name)
        try:
            k_final = cumulative_cop(ledger, args.rounds)
            print(f"ℹ {name}: K({args.rounds}) = {k_final:.6f}")
        except CopUndefinedError as err:
            print(f"⚠️ {name}: CoP undefined, cumulative work {err.cumulative_work:.6e}")
        if name == "I":
            bound = protocol_I_cop_bound(ledger, args.rounds)
            print(f"ℹ {name}: U_0/(N w) = {bound:.6f}")
    return rows, LEDGER_COLUMNS, FileName.COP


def run_report(args, bath: BathSpec):
    table = emit_summary_table(bath)
    print(table)
    if args.output_format is None:
        return table, None, FileName.REPORT
    return summary_records(bath), SUMMARY_HEADERS, FileName.REPORT_ROWS


RUNNERS = {
    Command.CONE: run_cone,
    Command.NOGO: run_nogo,
    Command.PROTOCOL: run_protocol,
    Command.COP: run_cop,
    Command.REPORT: run_report,
}


def run_scenario(args) -> int:
    bath = bath_from_args(args.q, args.beta, args.gap)
    logger.info(f"Running {args.command} at q = {bath.q:.6g}, beta = {bath.beta:.6g}, E = {bath.gap:g}")
    result = RUNNERS[args.command](args, bath)
    rows, columns, default_name = result[:3]
    extra = result[3] if len(result) > 3 else []
    output_format = args.output_format or ("records" if args.command == Command.NOGO else Defaults.FORMAT)

    path = resolve_output_path(args.out, default_name)
    if columns is None:
        create_output_file(rows + "\n", path)
    else:
        write_rows(rows, columns, path, output_format)
    for extra_rows, extra_columns, suffix in extra:
        if extra_columns is None:
            create_output_file(extra_rows, sibling_path(path, suffix).with_suffix(".txt"))
        else:
            write_rows(extra_rows, extra_columns, sibling_path(path, suffix), output_format)
    logger.info(f"Output written to {path}")
    print(f"✔ Wrote {path}")
    return ExitCode.SUCCESS


def configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.INFO
    if args.log_file:
        logging.basicConfig(filename=args.log_file, filemode='w', format=LogFormat.FORMAT,
                            datefmt=LogFormat.DATE_FORMAT, level=level)
    else:
        logging.basicConfig(format=LogFormat.FORMAT, datefmt=LogFormat.DATE_FORMAT, level=level)


def main(argv=None) -> int:
    try:
        args = parse_arguments(argv)
        configure_logging(args)
        return run_scenario(args)
    except VerificationFailure as err:
        print(f"✘ Verification failed: {err}", file=sys.stderr)
        return ExitCode.VERIFICATION_FAILURE
    except InvalidParameterError as err:
        print(f"✘ Invalid parameters: {err}", file=sys.stderr)
        return ExitCode.INVALID_PARAMS
    except OSError as err:
        print(f"✘ I/O failure: {err}", file=sys.stderr)
        return ExitCode.IO_FAILURE
    except HbacError as err:
        print(f"✘ {type(err).__name__}: {err}", file=sys.stderr)
        return ExitCode.INVALID_PARAMS


if __name__ == "__main__":
    sys.exit(main())
