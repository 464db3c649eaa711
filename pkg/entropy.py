"""The subshift of finite type Z_t, its edge graph and topological entropy."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from admissible import require_admissible
from config import Config
from errors import BudgetExceeded, EmptyGraph
from words import Alphabet, Word

logger = logging.getLogger(__name__)

STALL_WINDOW = 8
GROWTH_CHECK_LENGTH = 64


@dataclass(frozen=True, eq=False)
class SftGraph:
    """Edge graph of Z_t.

    Vertices are the words u of length p-1 with reflect(t_1..t_{p-1}) <= u <=
    t_1..t_{p-1}, stored by their base-N value in increasing order. For p = 1
    there is one virtual vertex whose loop multiplicity is t_1 - reflect(t_1) + 1.
    """

    block: Word
    codes: np.ndarray
    adjacency: csr_matrix

    @property
    def p(self) -> int:
        return len(self.block)

    @property
    def size(self) -> int:
        return self.adjacency.shape[0]

    def vertex_word(self, i: int) -> Word:
        n = self.block.alphabet.n
        code = int(self.codes[i])
        digits = []
        for _ in range(self.p - 1):
            code, d = divmod(code, n)
            digits.append(d)
        return Word(tuple(reversed(digits)), self.block.alphabet)

    @property
    def vertices(self) -> List[Word]:
        return [self.vertex_word(i) for i in range(self.size)]

    def successors(self) -> List[List[int]]:
        indptr, indices = self.adjacency.indptr, self.adjacency.indices
        return [indices[indptr[i]:indptr[i + 1]].tolist() for i in range(self.size)]

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def to_json(self) -> dict:
        return {
            "N": self.block.alphabet.n,
            "block": self.block.to_list(),
            "vertices": [w.to_list() for w in self.vertices],
            "adjacency": self.dense().tolist(),
        }


def build_sft(block: Word, max_vertices: Optional[int] = None) -> SftGraph:
    require_admissible(block)
    alphabet = block.alphabet
    n = alphabet.n
    p = len(block)

    if p == 1:
        width = block[0] - alphabet.reflect_digit(block[0]) + 1
        return SftGraph(block, np.zeros(1, dtype=np.int64), csr_matrix(np.array([[width]], dtype=np.int64)))

    lower = block.reflect()[:p - 1].value
    upper = block[:p - 1].value
    count = upper - lower + 1
    limit = Config.MAX_VERTICES if max_vertices is None else max_vertices
    if count > limit:
        raise BudgetExceeded(f"edge graph of {block}", count, limit)

    word_lo = block.reflect().value
    word_hi = block.value
    if n ** p < 2 ** 62:
        codes = np.arange(lower, upper + 1, dtype=np.int64)
    else:
        codes = np.array(range(lower, upper + 1), dtype=object)
    modulus = n ** (p - 2)
    index = np.arange(count, dtype=np.int64)

    rows, cols = [], []
    for x in range(n):
        spelled = codes * n + x
        successor = (codes % modulus) * n + x
        mask = (spelled >= word_lo) & (spelled <= word_hi) & (successor >= lower) & (successor <= upper)
        mask = mask.astype(bool)
        rows.append(index[mask])
        cols.append((successor[mask] - lower).astype(np.int64))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.ones(len(rows), dtype=np.int64)
    adjacency = csr_matrix((data, (rows, cols)), shape=(count, count))
    adjacency.sort_indices()
    return SftGraph(block, np.asarray(codes), adjacency)


@dataclass(frozen=True)
class PerronEstimate:
    value: float
    lower: float
    upper: float
    method: str

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _component_estimate(matrix: csr_matrix, tol: float, max_iterations: int) -> PerronEstimate:
    """Power iteration on the irreducible block A + I.

    For positive x the ratios (Ax)_i / x_i bracket the Perron root of A, so
    their min and max give a certified enclosure. The shift by I makes the
    iteration converge on periodic components too.
    """
    size = matrix.shape[0]
    if size == 1:
        value = float(matrix[0, 0])
        return PerronEstimate(value, value, value, "exact")

    x = np.full(size, 1.0 / size)
    quotients = []
    stalls = 0
    for _ in range(max_iterations):
        y = matrix @ x
        ratios = y / x
        lower, upper = float(ratios.min()), float(ratios.max())
        closing = max(tol, 64 * np.finfo(float).eps * upper)
        if upper - lower <= closing:
            return PerronEstimate((lower + upper) / 2, lower, upper, "collatz-wielandt")

        quotient = float(y.sum() / x.sum())
        if quotients and abs(quotient - quotients[-1]) < tol / 10:
            stalls += 1
        else:
            stalls = 0
        quotients.append(quotient)
        if stalls >= STALL_WINDOW and lower <= quotient <= upper and upper - lower <= 1e3 * closing:
            return PerronEstimate(quotient, lower, upper, "rayleigh")

        z = y + x
        x = z / z.sum()

    logger.warning("power iteration did not close within %d steps; using growth ratios", max_iterations)
    value = _cesaro_growth(matrix, min(max_iterations, 4096))
    return PerronEstimate(value, lower, upper, "cesaro")


def _cesaro_growth(matrix: csr_matrix, steps: int) -> float:
    """Geometric mean of successive word-count ratios over the second half of the run"""
    x = np.full(matrix.shape[0], 1.0 / matrix.shape[0])
    logs = []
    for _ in range(steps):
        y = matrix @ x
        total = y.sum()
        if total <= 0:
            return 0.0
        logs.append(math.log(total))
        x = y / total
    tail = logs[len(logs) // 2:]
    return math.exp(sum(tail) / len(tail))


def perron_estimate(g: SftGraph, tol: Optional[float] = None, max_iterations: Optional[int] = None) -> PerronEstimate:
    """Perron root of the adjacency matrix, the maximum over strongly connected components"""
    if g.size == 0:
        raise EmptyGraph(f"edge graph of {g.block} has no vertices")
    tol = Config.DEFAULT_TOL if tol is None else float(tol)
    max_iterations = Config.MAX_POWER_ITERATIONS if max_iterations is None else max_iterations

    matrix = g.adjacency.astype(np.float64)
    if matrix.nnz == 0:
        return PerronEstimate(0.0, 0.0, 0.0, "exact")

    _, labels = connected_components(matrix, directed=True, connection="strong")
    coo = matrix.tocoo()
    internal = labels[coo.row] == labels[coo.col]
    best = PerronEstimate(0.0, 0.0, 0.0, "exact")
    for label in np.unique(labels[coo.row[internal]]):
        members = np.flatnonzero(labels == label)
        component = matrix[members][:, members].tocsr()
        estimate = _component_estimate(component, tol, max_iterations)
        if estimate.value > best.value:
            best = estimate
    return best


def perron_enclosure(g: SftGraph, tol: Optional[float] = None) -> Tuple[float, float]:
    estimate = perron_estimate(g, tol)
    return estimate.lower, estimate.upper


def spectral_radius(g: SftGraph, tol: Optional[float] = None) -> float:
    return perron_estimate(g, tol).value


def word_counts(block: Word, n: int, budget: Optional[int] = None, graph: Optional[SftGraph] = None) -> List[int]:
    """Exact counts of allowed words of lengths 1..n.

    A word of length >= p-1 is allowed when it labels a path in the edge
    graph: its length-p windows lie between reflect(t) and t and its
    length-(p-1) windows are vertices. Shorter lengths count the distinct
    prefixes of vertex words.
    """
    budget = Config.WORD_COUNT_BUDGET if budget is None else budget
    if n < 1:
        raise ValueError("word length must be positive")
    if n > budget:
        raise BudgetExceeded("word length", n, budget)
    g = build_sft(block) if graph is None else graph
    p = len(block)

    if p == 1:
        width = int(g.adjacency[0, 0])
        return [width ** length for length in range(1, n + 1)]

    base = block.alphabet.n
    codes = [int(c) for c in g.codes]
    counts = []
    for length in range(1, min(n, p - 2) + 1):
        counts.append(len({code // base ** (p - 1 - length) for code in codes}))
    if n < p - 1:
        return counts

    successors = g.successors()
    paths = [1] * g.size
    counts.append(g.size)
    for _ in range(p, n + 1):
        following = [0] * g.size
        for i, weight in enumerate(paths):
            if weight:
                for j in successors[i]:
                    following[j] += weight
        paths = following
        counts.append(sum(paths))
    return counts


def word_count(block: Word, n: int, budget: Optional[int] = None) -> int:
    return word_counts(block, n, budget)[-1]


def _grows_polynomially(block: Word, g: SftGraph) -> bool:
    counts = word_counts(block, 2 * GROWTH_CHECK_LENGTH, graph=g)
    half, full = counts[GROWTH_CHECK_LENGTH - 1], counts[-1]
    if half == 0:
        return True
    return full <= half * 2 ** min(g.size, 60)


@dataclass(frozen=True)
class EntropyReport:
    rho: float
    rho_lower: float
    rho_upper: float
    h: float
    zero_certified: bool

    def to_json(self) -> dict:
        return {
            "rho": self.rho,
            "rho_lower": self.rho_lower,
            "rho_upper": self.rho_upper,
            "h": self.h,
            "zero_certified": self.zero_certified,
        }


def entropy_report(block: Word, tol: Optional[float] = None) -> EntropyReport:
    tol = Config.DEFAULT_TOL if tol is None else float(tol)
    g = build_sft(block)
    estimate = perron_estimate(g, tol)
    zero = estimate.lower <= 1 + tol and estimate.upper >= 1 - tol and _grows_polynomially(block, g)
    h = 0.0
    if not zero and estimate.value > 1:
        h = math.log(estimate.value)
    return EntropyReport(estimate.value, estimate.lower, estimate.upper, h, zero)


def entropy(block: Word, tol: Optional[float] = None) -> float:
    return entropy_report(block, tol).h


def entropy_closed_p1(t1: int, alphabet: Alphabet) -> float:
    require_admissible(Word((t1,), alphabet))
    return math.log(2 * t1 + 2 - alphabet.n)


def entropy_closed_p2(t1: int, t2: int, alphabet: Alphabet) -> float:
    require_admissible(Word((t1, t2), alphabet))
    a = 2 * t1 + 1 - alphabet.n
    b = 2 * t2 + 2 - alphabet.n
    return math.log((a + math.sqrt(a * a + 4 * b)) / 2)
