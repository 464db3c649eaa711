"""Hausdorff dimension of the univoque set U_{beta,N} as a function of beta."""

import csv
import logging
import math
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from admissible import LocateKind, critical_bases, locate_block
from config import Config
from entropy import entropy
from errors import BudError
from expansions import Base
from numerics import sig15
from words import Alphabet, Word

logger = logging.getLogger(__name__)

CSV_FIELDS = ["beta", "dim", "regime", "block", "h"]
CSV_HEADER = ",".join(CSV_FIELDS)


class Regime(Enum):
    TRIVIAL_ZERO = "trivial-zero"
    ADMISSIBLE_INTERVAL = "admissible-interval"
    SUPER_CRITICAL = "super-critical"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class DimensionSample:
    """One evaluation of beta -> dim U_{beta,N}.

    Unresolved samples carry dim None and the bracket [lower, upper];
    resolved ones have lower == upper == dim.
    """

    beta: float
    n: int
    regime: Regime
    dim: Optional[float]
    lower: float
    upper: float
    block: Optional[Word] = None
    entropy: Optional[float] = None
    detail: str = ""

    @property
    def resolved(self) -> bool:
        return self.regime is not Regime.UNRESOLVED

    def to_row(self) -> List[str]:
        return [
            repr(sig15(self.beta)),
            "" if self.dim is None else repr(sig15(self.dim)),
            self.regime.value,
            "" if self.block is None else self.block.render(sep="-"),
            "" if self.entropy is None else repr(sig15(self.entropy)),
        ]

    def to_json(self) -> dict:
        return {
            "beta": sig15(self.beta),
            "N": self.n,
            "regime": self.regime.value,
            "dim": None if self.dim is None else sig15(self.dim),
            "lower": sig15(self.lower),
            "upper": sig15(self.upper),
            "block": None if self.block is None else self.block.to_list(),
            "h": None if self.entropy is None else sig15(self.entropy),
        }


class EntropyCache:
    """Entropy per (N, block), safe to share between threads"""

    def __init__(self):
        self._values: Dict[Tuple[int, Tuple[int, ...]], float] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def get(self, block: Word, tol: Optional[float] = None) -> float:
        key = (block.alphabet.n, block.digits)
        with self._lock:
            if key in self._values:
                return self._values[key]
        logger.debug("entropy cache miss for %s (N=%d)", block, block.alphabet.n)
        value = entropy(block, tol)
        with self._lock:
            return self._values.setdefault(key, value)


def _unresolved(beta: float, n: int, detail: str) -> DimensionSample:
    return DimensionSample(beta, n, Regime.UNRESOLVED, None, 0.0, math.log(n) / math.log(beta), detail=detail)


def dim_unique_set(base: Base, p_max: Optional[int] = None, tol: Optional[float] = None,
                   depth: Optional[int] = None, cache: Optional[EntropyCache] = None) -> DimensionSample:
    n = base.alphabet.n
    tol = Config.DEFAULT_TOL if tol is None else tol
    beta = float(base.beta)
    log_beta = math.log(beta)

    if base.beta >= n:
        value = math.log(n) / log_beta
        return DimensionSample(beta, n, Regime.SUPER_CRITICAL, value, value, value)

    try:
        _, beta_c = critical_bases(base.alphabet, tol)
        if base.beta <= beta_c + tol:
            return DimensionSample(beta, n, Regime.TRIVIAL_ZERO, 0.0, 0.0, 0.0)

        location = locate_block(base, depth, p_max, tol)
        if location.kind is LocateKind.BELOW_CRITICAL:
            return DimensionSample(beta, n, Regime.TRIVIAL_ZERO, 0.0, 0.0, 0.0)
        if location.kind is not LocateKind.BLOCK:
            return _unresolved(beta, n, location.detail or location.kind.value)

        h = (cache or EntropyCache()).get(location.block, tol)
    except BudError as e:
        logger.debug("beta=%s unresolved: %s", beta, e)
        return _unresolved(beta, n, str(e))

    value = h / log_beta
    return DimensionSample(beta, n, Regime.ADMISSIBLE_INTERVAL, value, value, value, location.block, h)


def _sample_chunk(args) -> List[DimensionSample]:
    n, betas, p_max, tol, depth = args
    cache = EntropyCache()
    return [dim_unique_set(Base.of(beta, n), p_max, tol, depth, cache) for beta in betas]


def sample_curve(alphabet: Alphabet, beta_lo: float, beta_hi: float, grid_points: int,
                 p_max: Optional[int] = None, tol: Optional[float] = None, depth: Optional[int] = None,
                 workers: int = 1) -> List[DimensionSample]:
    """Evaluate the dimension on a uniform grid of bases; samples come back ordered by beta"""
    if not 1 < beta_lo < beta_hi:
        raise ValueError(f"need 1 < beta_lo < beta_hi, got {beta_lo}, {beta_hi}")
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    if workers < 1:
        raise ValueError("workers must be at least 1")

    betas = [float(b) for b in np.linspace(beta_lo, beta_hi, grid_points)]
    if workers == 1:
        samples = _sample_chunk((alphabet.n, betas, p_max, tol, depth))
    else:
        chunks = [betas[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sample_chunk, [(alphabet.n, c, p_max, tol, depth) for c in chunks]))
        samples = sorted((s for chunk in results for s in chunk), key=lambda s: s.beta)

    logger.info("%d of %d samples unresolved (%.1f%%)",
                sum(not s.resolved for s in samples), len(samples), 100 * unresolved_fraction(samples))
    return samples


def unresolved_fraction(samples: Sequence[DimensionSample]) -> float:
    if not samples:
        return 0.0
    return sum(not s.resolved for s in samples) / len(samples)


def write_csv(samples: Sequence[DimensionSample], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    writer.writerows(s.to_row() for s in samples)
