class Command:
    CONE = "cone"
    NOGO = "nogo"
    PROTOCOL = "protocol"
    COP = "cop"
    REPORT = "report"


class Defaults:
    Q = 0.3
    GAP = 1.0
    SEED = 0
    ROUNDS = 100
    COP_ROUNDS = 200
    MTO_BUDGET = 6
    MTO_SAMPLES = 20000
    Z_POINTS = 21
    PBAR0 = 0.6
    FORMAT = "csv"


class Initial:
    SUBSET_V_CANONICAL = "subsetV-canonical"
    GIBBS = "gibbs"
    EXCITED = "excited"
    CUSTOM = "custom"


class Sweep:
    DEFAULT = "default"
    THEOREM2 = "theorem2"
    THEOREM3 = "theorem3"
    COUNTEREXAMPLES = "counterexamples"

    ALL = (DEFAULT, THEOREM2, THEOREM3, COUNTEREXAMPLES)


class FileName:
    CONE = "cone.csv"
    NOGO = "nogo_verdicts.jsonl"
    PROTOCOL = "protocol_trajectory.csv"
    COP = "cop_series.csv"
    REPORT = "summary_table.txt"
    REPORT_ROWS = "summary_table.jsonl"


class Columns:
    QUTRIT_CONE = ("kind", "label", "p0", "p1", "p2", "low", "high")
    QUBIT_CONE = ("kind", "z", "x")
    VERDICT = ("instance", "R1", "R2", "R3", "p0_star", "tau0_S", "margin", "bound_holds")
    COUNTEREXAMPLE = ("q", "p0_out", "tau0_S", "margin")


# Cop variants accepted on the command line and the protocol each one runs
COP_VARIANTS = {
    "I": "I",
    "II": "II-efficiency",
}
