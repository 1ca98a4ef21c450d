import os
from typing import Optional

from dotenv import load_dotenv

from conelab.exceptions import InvalidParameterError

load_dotenv()


class Config:
    # Solver defaults
    TOL = float(os.getenv("CONELAB_TOL", "1e-9"))
    MAX_ITER = int(os.getenv("CONELAB_MAX_ITER", "100000"))
    MULTISTARTS = int(os.getenv("CONELAB_MULTISTARTS", "8"))
    ALT_ITER = int(os.getenv("CONELAB_ALT_ITER", "25"))
    SAMPLES = int(os.getenv("CONELAB_SAMPLES", "10000"))

    # Logging
    LOG_LEVEL = os.getenv("CONELAB_LOG_LEVEL", "INFO")
    LOG_DIR = os.getenv("CONELAB_LOG_DIR")

    # Output
    OUTPUT_DIR = os.getenv("CONELAB_OUTPUT_DIR", "results")
    SCHEMA_VERSION = 1

    @staticmethod
    def seed(default: Optional[int] = None) -> int:
        """CONELAB_SEED wins over any seed given on the command line"""
        value = os.getenv("CONELAB_SEED")
        if value is not None and value.strip():
            try:
                return int(value)
            except ValueError:
                raise InvalidParameterError(f"CONELAB_SEED must be an integer, got {value!r}") from None
        return 0 if default is None else int(default)
