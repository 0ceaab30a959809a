import contextlib
import io
import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from hbac.scenarios.run_scenario import main, parse_arguments
from hbac.scenarios.scenario_helpers import bath_from_args, build_round, initial_state, parse_variants
from utils.hbac_utils.collision_utils.channel_text import loads_channel
from utils.hbac_utils.collision_utils.collision_helpers import validate_channel
from utils.hbac_utils.hbac_constants import Env, ExitCode
from utils.hbac_utils.hbac_errors import InvalidParameterError


def quiet_main(argv):
    with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
        return main(argv)


class ScenarioTests(unittest.TestCase):

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.base = Path(self.temp_dir.name)

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_protocol_trajectory(self):
        out = self.base / "trajectory.csv"
        self.assertEqual(quiet_main(["protocol", "--q", "0.3", "--rounds", "5", "--out", str(out)]), ExitCode.SUCCESS)
        lines = out.read_text().splitlines()
        self.assertEqual(lines[0], "variant,n,S0,S1,S2,dist")
        self.assertEqual(len(lines), 7)

    def test_machine_protocol_with_excited_start(self):
        out = self.base / "efficiency.csv"
        argv = ["protocol", "--variant", "II-efficiency", "--initial", "excited", "--rounds", "4", "--out", str(out)]
        self.assertEqual(quiet_main(argv), ExitCode.SUCCESS)
        self.assertEqual(len(out.read_text().splitlines()), 6)

    def test_cop_records(self):
        out = self.base / "cop.jsonl"
        argv = ["cop", "--rounds", "4", "--format", "records", "--out", str(out)]
        self.assertEqual(quiet_main(argv), ExitCode.SUCCESS)
        records = [json.loads(line) for line in out.read_text().splitlines()]
        self.assertEqual([(r["variant"], r["n"]) for r in records[:2]], [("I", 1), ("I", 2)])
        self.assertEqual(len(records), 8)

    def test_nogo_sweep_writes_verdicts(self):
        out = self.base / "verdicts.jsonl"
        argv = ["nogo", "--sweep", "theorem2", "--count", "3", "--out", str(out)]
        self.assertEqual(quiet_main(argv), ExitCode.SUCCESS)
        verdicts = [json.loads(line) for line in out.read_text().splitlines()]
        self.assertEqual(len(verdicts), 3)
        self.assertTrue(all(v["bound_holds"] for v in verdicts))

    def test_nogo_dumps_the_tightest_witness(self):
        out = self.base / "verdicts.jsonl"
        argv = ["nogo", "--sweep", "theorem2", "--count", "4", "--seed", "2", "--out", str(out)]
        self.assertEqual(quiet_main(argv), ExitCode.SUCCESS)
        text = (self.base / "verdicts_witness.txt").read_text()
        self.assertTrue(text.startswith("# instance T2-"))
        self.assertTrue(validate_channel(loads_channel(text)))

    def test_same_seed_gives_identical_files(self):
        for command in (["nogo", "--sweep", "default", "--count", "3"],
                        ["cone", "--q", "0.5", "--budget", "2", "--samples", "100"]):
            outputs = []
            for run in ("first", "second"):
                out = self.base / command[0] / run / "out.txt"
                self.assertEqual(quiet_main(command + ["--seed", "9", "--out", str(out)]), ExitCode.SUCCESS)
                outputs.append(sorted((p.name, p.read_bytes()) for p in out.parent.iterdir()))
            self.assertEqual(outputs[0], outputs[1], command[0])

    def test_counterexamples_only(self):
        out = self.base / "counter.csv"
        argv = ["nogo", "--sweep", "counterexamples", "--format", "csv", "--out", str(out)]
        self.assertEqual(quiet_main(argv), ExitCode.SUCCESS)
        self.assertTrue(out.read_text().startswith("q,p0_out,tau0_S,margin\n"))

    def test_qubit_cone(self):
        out = self.base / "qubit.csv"
        argv = ["cone", "--kind", "qubit", "--q", "0.5", "--z-points", "3", "--out", str(out)]
        self.assertEqual(quiet_main(argv), ExitCode.SUCCESS)
        self.assertEqual(len(out.read_text().splitlines()), 1 + 2 * 12)

    def test_qutrit_cone(self):
        out = self.base / "qutrit.csv"
        argv = ["cone", "--q", "0.5", "--budget", "2", "--samples", "200", "--out", str(out)]
        self.assertEqual(quiet_main(argv), ExitCode.SUCCESS)
        self.assertIn("cone-extreme,A0", out.read_text())

    def test_report(self):
        out = self.base / "summary.txt"
        self.assertEqual(quiet_main(["report", "--out", str(out)]), ExitCode.SUCCESS)
        self.assertIn("Thermalization", out.read_text())

    def test_report_records(self):
        out = self.base / "summary.jsonl"
        self.assertEqual(quiet_main(["report", "--format", "records", "--out", str(out)]), ExitCode.SUCCESS)
        records = [json.loads(line) for line in out.read_text().splitlines()]
        self.assertEqual(len(records), 8)
        self.assertEqual(records[-1]["source"], "simulated")
        self.assertIn("beta*/beta", records[0])

    def test_invalid_bath(self):
        self.assertEqual(quiet_main(["protocol", "--q", "1.5", "--out", str(self.base / "x.csv")]),
                         ExitCode.INVALID_PARAMS)

    def test_unknown_command(self):
        self.assertEqual(quiet_main(["bogus"]), ExitCode.INVALID_PARAMS)

    def test_hot_three_qubit_start_is_rejected(self):
        argv = ["nogo", "--sweep", "counterexamples", "--pbar0", "0.95", "--out", str(self.base / "x.csv")]
        self.assertEqual(quiet_main(argv), ExitCode.INVALID_PARAMS)

    def test_config_file_sets_defaults(self):
        config = self.base / "run.env"
        config.write_text("q=0.5\nrounds=3\nformat=records\n")
        args = parse_arguments(["protocol", "--config", str(config)])
        self.assertEqual((args.q, args.rounds, args.output_format), (0.5, 3, "records"))
        args = parse_arguments(["protocol", "--config", str(config), "--rounds", "7"])
        self.assertEqual(args.rounds, 7)

    def test_output_dir_from_environment(self):
        with patch.dict(os.environ, {Env.OUTPUT_DIR: str(self.base)}):
            self.assertEqual(quiet_main(["protocol", "--rounds", "2", "--out", "traj.csv"]), ExitCode.SUCCESS)
        self.assertTrue((self.base / "traj.csv").is_file())


class HelperTests(unittest.TestCase):

    def test_bath_from_beta(self):
        self.assertAlmostEqual(bath_from_args(None, 1.0, 1.0).beta, 1.0, places=14)

    def test_variants(self):
        self.assertEqual(parse_variants("I, II", ("I", "II")), ["I", "II"])
        with self.assertRaises(InvalidParameterError):
            parse_variants("III", ("I", "II"))

    def test_custom_start_needs_populations(self):
        bath = bath_from_args(0.3, None, 1.0)
        with self.assertRaises(InvalidParameterError):
            initial_state(build_round("I", bath), bath, "custom")

    def test_machine_start_is_a_product(self):
        bath = bath_from_args(0.3, None, 1.0)
        p = initial_state(build_round("II-efficiency", bath), bath, "custom", "1,0,0")
        self.assertAlmostEqual(p[0], 1 / 1.3, places=12)
        self.assertAlmostEqual(p[1], 0.3 / 1.3, places=12)


if __name__ == '__main__':
    unittest.main()
