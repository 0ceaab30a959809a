import numpy as np


def _frozen(rows):
    matrix = np.array(rows, dtype=float)
    matrix.setflags(write=False)
    return matrix


class Blocks:
    SIGMA_X = _frozen([[0, 1], [1, 0]])
    # swaps the last two levels of a three-level block
    U = _frozen([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    G_A = _frozen([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    G_B = _frozen([[0, 1, 0], [0, 0, 1], [1, 0, 0]])


class CoolingLimitBlocks:
    """Thermalizing blocks of the qubit-machine cooling-limit round, keyed by subspace energy in units of E."""
    BY_ENERGY = {
        1: _frozen([[0, 1, 0],
                    [1, 0, 0],
                    [0, 0, 1]]),
        2: _frozen([[0, 1, 0, 0, 0],
                    [0, 0, 0, 1, 0],
                    [1, 0, 0, 0, 0],
                    [0, 0, 1, 0, 0],
                    [0, 0, 0, 0, 1]]),
        3: _frozen([[1, 0, 0, 0, 0],
                    [0, 0, 1, 0, 0],
                    [0, 0, 0, 0, 1],
                    [0, 1, 0, 0, 0],
                    [0, 0, 0, 1, 0]]),
        4: _frozen([[1, 0, 0],
                    [0, 0, 1],
                    [0, 1, 0]]),
    }


class Variant:
    I = "I"
    I_GENERAL = "I-general"
    II_EFFICIENCY = "II-efficiency"
    II_COOLING = "II-cooling"
    I_SINGLE = "I-single"
    II_SINGLE = "II-single"

    ALL = (I, I_GENERAL, II_EFFICIENCY, II_COOLING, I_SINGLE, II_SINGLE)
    WITH_MACHINE = (II_EFFICIENCY, II_COOLING, II_SINGLE)


class Horizon:
    # iterate length used to compare with the fixed point
    ITERATE = 500
    PARITY_ROUNDS = 60
