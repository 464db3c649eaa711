import logging
import os
from dataclasses import dataclass

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("json", "csv", "text")


class Config:
    """Configuration for the univoque dimension toolkit"""

    # Tolerances and depths
    DEFAULT_TOL: float = float(os.getenv('BUD_TOL', '1e-12'))
    DEFAULT_DEPTH: int = int(os.getenv('BUD_DEPTH', '256'))
    COMPARE_DEPTH: int = int(os.getenv('BUD_COMPARE_DEPTH', '4096'))
    DEFAULT_P_MAX: int = int(os.getenv('BUD_P_MAX', '6'))

    # Budgets
    MAX_VERTICES: int = int(os.getenv('BUD_MAX_VERTICES', '1000000'))
    ENUMERATION_BUDGET: int = int(os.getenv('BUD_ENUMERATION_BUDGET', '10000000'))
    WORD_COUNT_BUDGET: int = int(os.getenv('BUD_WORD_COUNT_BUDGET', '100000'))
    MAX_POWER_ITERATIONS: int = int(os.getenv('BUD_MAX_ITERATIONS', '100000'))
    MAX_SERIES_DEPTH: int = int(os.getenv('BUD_MAX_SERIES_DEPTH', '1048576'))

    # Arithmetic
    WORKING_PRECISION_BITS: int = int(os.getenv('BUD_PRECISION_BITS', '128'))
    TIE_GUARD_BITS: int = int(os.getenv('BUD_TIE_GUARD_BITS', '40'))

    # Logging
    LOG_LEVEL: str = os.getenv('BUD_LOG_LEVEL', 'WARNING').upper()

    @classmethod
    def validate_config(cls) -> bool:
        """Validate configuration settings"""
        valid = True

        if cls.DEFAULT_TOL <= 0:
            logger.warning("BUD_TOL must be positive, got %s", cls.DEFAULT_TOL)
            valid = False

        if cls.DEFAULT_DEPTH < 8 or cls.COMPARE_DEPTH < 8:
            logger.warning("Expansion and comparison depths should be at least 8 digits")
            valid = False

        if cls.DEFAULT_P_MAX < 1:
            logger.warning("BUD_P_MAX must be at least 1")
            valid = False

        if cls.MAX_VERTICES < 1 or cls.ENUMERATION_BUDGET < 1 or cls.WORD_COUNT_BUDGET < 1:
            logger.warning("Budgets must be positive")
            valid = False

        if cls.WORKING_PRECISION_BITS < 64:
            logger.warning("Working precision below 64 bits is not supported")
            valid = False

        if not isinstance(logging.getLevelName(cls.LOG_LEVEL), int):
            logger.warning("Unknown log level %s", cls.LOG_LEVEL)
            valid = False

        return valid


@dataclass(frozen=True)
class RunConfig:
    """Per-invocation settings of the command line tool"""

    n: int
    tol: float = Config.DEFAULT_TOL
    depth: int = Config.DEFAULT_DEPTH
    p_max: int = Config.DEFAULT_P_MAX
    output_format: str = "text"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"alphabet size must be at least 2, got {self.n}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.depth < 8:
            raise ValueError(f"depth must be at least 8, got {self.depth}")
        if self.p_max < 1:
            raise ValueError(f"p_max must be at least 1, got {self.p_max}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output format must be one of {OUTPUT_FORMATS}")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            n=args.n,
            tol=args.tol,
            depth=args.depth,
            p_max=args.p_max,
            output_format=args.format,
        )
