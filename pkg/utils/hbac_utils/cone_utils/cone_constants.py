import numpy as np


class ConeKind:
    QUBIT = "qubit"
    QUTRIT_POPULATION = "qutrit-population"


class Subset:
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"

    BY_ORDERING = {
        (0, 1, 2): I,
        (2, 1, 0): II,
        (1, 0, 2): III,
        (2, 0, 1): IV,
        (1, 2, 0): V,
        (0, 2, 1): VI,
    }


class ExtremePoint:
    LABELS = ("A0", "A1", "A2", "A3", "A4", "A5")


class LevelPairs:
    QUTRIT = np.array([(0, 1), (0, 2), (1, 2)], dtype=int)
