class Tolerance:
    NORMALIZATION = 1e-12
    CLAMP = 1e-15
    DEGENERACY = 1e-9
    STOCHASTIC = 1e-12
    ORDERING = 1e-12
    SPECTRUM_MATCH = 1e-12
    BOUND = 1e-12
    RESIDUAL = 1e-12
    BATH_CONSISTENCY = 1e-12


class Cap:
    COMPOSITE_DIMENSION = 4096
    SUBSPACE_SIZE = 8
    SLOT_CHOICES = 5000


class Env:
    OUTPUT_DIR = "HBAC_OUTPUT_DIR"
    ENV_FILE_NAME = ".hbac.env"


class ExitCode:
    SUCCESS = 0
    INVALID_PARAMS = 2
    VERIFICATION_FAILURE = 3
    IO_FAILURE = 4


class LogFormat:
    FORMAT = '%(asctime)s,%(msecs)d %(levelname)s %(message)s'
    DATE_FORMAT = '%H:%M:%S'
