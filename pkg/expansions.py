"""Greedy and quasi-greedy beta-expansions, the projection Pi_beta, and the
lexicographic tests for greedy and unique expansions."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple, Union

from config import Config
from errors import (
    BaseOutOfRange,
    DepthExceeded,
    NearTie,
    NotEventuallyPeriodic,
    NotQuasiGreedy,
    XOutOfRange,
)
from numerics import bits_for_depth, bits_for_tol, mantissa_bits, mp_context, to_mpf
from words import (
    Alphabet,
    DigitStream,
    Ordering,
    PeriodicStream,
    Word,
    compare_periodic,
    lex_cmp,
)

logger = logging.getLogger(__name__)

VALIDATION_DEPTH = 256

Sequenceish = Union[DigitStream, Word]


class Mode(Enum):
    GREEDY = "greedy"
    QUASI = "quasi"


class TiePolicy(Enum):
    RAISE = "raise"
    SNAP = "snap"


@dataclass(frozen=True)
class Base:
    """A base beta > 1 together with the digit alphabet"""

    beta: object
    alphabet: Alphabet

    def __post_init__(self):
        beta = to_mpf(self.beta)
        if not beta > 1:
            raise BaseOutOfRange(f"base must exceed 1, got {beta}")
        object.__setattr__(self, "beta", beta)

    @classmethod
    def of(cls, beta, n: int) -> "Base":
        return cls(beta, Alphabet(n))

    @property
    def n(self) -> int:
        return self.alphabet.n

    def require_expansion_range(self) -> None:
        if self.beta > self.alphabet.n:
            raise BaseOutOfRange(f"expansions need 1 < beta <= {self.alphabet.n}, got {self.beta}")

    def __float__(self) -> float:
        return float(self.beta)


@dataclass(frozen=True)
class ExpansionResult:
    digits: Word
    residual_bound: object
    snapped: Tuple[int, ...] = ()
    exact: Optional[PeriodicStream] = field(default=None, compare=False)


def _tail_bound(beta, top: int, depth: int):
    return top * beta ** (-depth) / (beta - 1)


def expand(x, base: Base, depth: Optional[int] = None, mode: Mode = Mode.QUASI,
           ties: TiePolicy = TiePolicy.RAISE, guard_bits: Optional[int] = None) -> ExpansionResult:
    """Run the greedy or quasi-greedy digit recursion for ``depth`` digits.

    Greedy picks the largest digit b <= beta*r, quasi-greedy the largest
    a < beta*r. A decision with beta*r within the tie guard of an integer k in
    1..N-1 either raises NearTie or, under TiePolicy.SNAP, is taken as an
    exact tie: greedy then emits k and stops at remainder 0, quasi-greedy
    emits k-1 and restarts at remainder 1.
    """
    base.require_expansion_range()
    depth = Config.DEFAULT_DEPTH if depth is None else depth
    if depth < 1:
        raise ValueError("depth must be positive")
    top = base.alphabet.top
    greedy = mode is Mode.GREEDY
    x = to_mpf(x)

    ctx = mp_context()
    with ctx.workprec(bits_for_depth(base.beta, depth) + mantissa_bits(x)):
        beta = ctx.mpf(base.beta)
        r = ctx.mpf(x)
        guard = ctx.mpf(2) ** (-(Config.TIE_GUARD_BITS if guard_bits is None else guard_bits))
        slack = ctx.mpf(2) ** (-Config.TIE_GUARD_BITS)
        x_max = top / (beta - 1)
        if r < 0 or r > x_max * (1 + slack):
            raise XOutOfRange(f"x = {x} outside [0, (N-1)/(beta-1)] = [0, {x_max}]")
        if r > x_max:
            r = x_max
        starts_at_one = r == 1

        digits = []
        snapped = []
        exact = None
        for position in range(1, depth + 1):
            v = beta * r
            k = int(ctx.nint(v))
            if 1 <= k <= top and abs(v - k) < guard * max(1, v):
                if ties is TiePolicy.RAISE:
                    raise NearTie(position, k, v)
                logger.debug("snapping tie at digit %d to boundary %d", position, k)
                snapped.append(position)
                digit = k if greedy else k - 1
                r = ctx.mpf(0) if greedy else ctx.mpf(1)
            else:
                digit = int(ctx.floor(v)) if greedy else int(ctx.ceil(v)) - 1
                digit = min(max(digit, 0), top)
                r = v - digit
            digits.append(digit)

            if snapped and greedy:
                exact = PeriodicStream(Word((0,), base.alphabet), Word(tuple(digits), base.alphabet))
                break
            if snapped and starts_at_one:
                exact = PeriodicStream(Word(tuple(digits), base.alphabet))
                break

        if exact is not None:
            digits = exact.prefix(depth).to_list()
        bound = _tail_bound(beta, top, depth)

    return ExpansionResult(Word(tuple(digits), base.alphabet), bound, tuple(snapped), exact)


def quasi_greedy_of_one(base: Base, depth: Optional[int] = None, ties: TiePolicy = TiePolicy.RAISE,
                       guard_bits: Optional[int] = None) -> Word:
    return expand(1, base, depth, Mode.QUASI, ties, guard_bits).digits


def quasi_greedy_of_x(x, base: Base, depth: Optional[int] = None, ties: TiePolicy = TiePolicy.RAISE,
                       guard_bits: Optional[int] = None) -> Word:
    return expand(x, base, depth, Mode.QUASI, ties, guard_bits).digits


def greedy_of_x(x, base: Base, depth: Optional[int] = None, ties: TiePolicy = TiePolicy.RAISE,
                       guard_bits: Optional[int] = None) -> Word:
    return expand(x, base, depth, Mode.GREEDY, ties, guard_bits).digits


@lru_cache(maxsize=4096)
def alpha(base: Base, depth: Optional[int] = None) -> Sequenceish:
    """Quasi-greedy expansion of 1: exact periodic stream if a tie was snapped,
    otherwise the computed prefix"""
    depth = Config.COMPARE_DEPTH if depth is None else depth
    result = expand(1, base, depth, Mode.QUASI, TiePolicy.SNAP)
    return result.exact if result.exact is not None else result.digits


def _periodic_value(ctx, stream: PeriodicStream, beta):
    y = 1 / beta

    def finite(w: Word):
        if len(w) == 0:
            return ctx.mpf(0)
        return y * ctx.polyval(list(reversed(w.digits)), y)

    pre = len(stream.preperiod)
    per = len(stream.period)
    return finite(stream.preperiod) + y ** pre * finite(stream.period) / (1 - y ** per)


def projection_enclosure(digits: Sequenceish, base: Base, depth: Optional[int] = None):
    """Certified (lo, hi) with lo <= Pi_beta(digits) <= hi.

    Eventually periodic streams are summed in closed form. Words are treated
    as the known prefix of an unknown continuation.
    """
    top = base.alphabet.top
    ctx = mp_context()
    with ctx.workprec(max(Config.WORKING_PRECISION_BITS, mantissa_bits(base.beta)) + 64):
        beta = ctx.mpf(base.beta)
        if isinstance(digits, PeriodicStream):
            value = _periodic_value(ctx, digits, beta)
            return value, value
        if isinstance(digits, Word):
            ds = digits.digits if depth is None else digits.digits[:depth]
        else:
            ds = digits.prefix(Config.DEFAULT_DEPTH if depth is None else depth).digits
        y = 1 / beta
        partial = y * ctx.polyval(list(reversed(ds)), y) if ds else ctx.mpf(0)
        return partial, partial + _tail_bound(beta, top, len(ds))


def project(digits: Sequenceish, base: Base, depth: Optional[int] = None):
    lo, hi = projection_enclosure(digits, base, depth)
    return (lo + hi) / 2


def _require_periodic(s) -> PeriodicStream:
    if not isinstance(s, PeriodicStream):
        raise NotEventuallyPeriodic(f"expected an eventually periodic stream, got {s!r}")
    return s


def is_quasi_greedy_sequence(s: DigitStream) -> bool:
    """True iff s is infinite and every shift of s is <= s"""
    s = _require_periodic(s)
    if not s.is_infinite:
        return False
    span = len(s.preperiod) + len(s.period)
    return all(compare_periodic(s.shift(k), s) is not Ordering.GREATER for k in range(1, span))


def _strictly_less(a: Sequenceish, b: Sequenceish, depth: int) -> bool:
    outcome = lex_cmp(a, b, depth)
    if outcome is Ordering.EQUAL_TO_DEPTH:
        raise DepthExceeded(f"sequences agree on {depth} digits; increase the comparison depth")
    return outcome is Ordering.LESS


def _tail_positions(s: PeriodicStream, start: int) -> range:
    """Shifts j >= start covering every distinct tail sigma^j(s)"""
    return range(start, max(start, len(s.preperiod)) + len(s.period) + 1)


def _first_position(s: PeriodicStream, predicate) -> Optional[int]:
    span = len(s.preperiod) + len(s.period)
    for n in range(1, span + 1):
        if predicate(s[n - 1]):
            return n
    return None


def _resolve_alpha(base: Base, depth: Optional[int], given: Optional[Sequenceish]) -> Tuple[Sequenceish, int]:
    depth = Config.COMPARE_DEPTH if depth is None else depth
    return (given if given is not None else alpha(base, depth)), depth


def is_greedy_sequence(s: DigitStream, base: Base, depth: Optional[int] = None,
                       alpha_digits: Optional[Sequenceish] = None) -> bool:
    """sigma^n(s) < alpha(beta) whenever s_n < N-1"""
    s = _require_periodic(s)
    a, depth = _resolve_alpha(base, depth, alpha_digits)
    top = base.alphabet.top
    span = len(s.preperiod) + len(s.period)
    for n in range(1, span + 1):
        if s[n - 1] < top and not _strictly_less(s.shift(n), a, depth):
            return False
    return True


def is_greedy_sequence_all_tails(s: DigitStream, base: Base, depth: Optional[int] = None,
                                 alpha_digits: Optional[Sequenceish] = None) -> bool:
    """sigma^(n+k)(s) < alpha(beta) for all k >= 0 whenever s_n < N-1"""
    s = _require_periodic(s)
    a, depth = _resolve_alpha(base, depth, alpha_digits)
    first = _first_position(s, lambda d: d < base.alphabet.top)
    if first is None:
        return True
    return all(_strictly_less(s.shift(j), a, depth) for j in _tail_positions(s, first))


def is_unique_expansion(s: DigitStream, base: Base, depth: Optional[int] = None,
                        alpha_digits: Optional[Sequenceish] = None) -> bool:
    """Both strict families: tails after the first digit below N-1 stay below
    alpha, and reflected tails after the first nonzero digit stay below alpha.
    A family with no starting position holds vacuously."""
    s = _require_periodic(s)
    a, depth = _resolve_alpha(base, depth, alpha_digits)
    top = base.alphabet.top

    m = _first_position(s, lambda d: d < top)
    if m is not None and not all(_strictly_less(s.shift(j), a, depth) for j in _tail_positions(s, m)):
        return False

    n = _first_position(s, lambda d: d > 0)
    if n is not None and not all(_strictly_less(s.shift(j).reflect(), a, depth) for j in _tail_positions(s, n)):
        return False
    return True


def in_two_sided_set(s: DigitStream, base: Base, depth: Optional[int] = None,
                     alpha_digits: Optional[Sequenceish] = None) -> bool:
    """reflect(alpha) < sigma^n(s) < alpha for every n >= 0"""
    s = _require_periodic(s)
    a, depth = _resolve_alpha(base, depth, alpha_digits)
    lower = a.reflect()
    for j in _tail_positions(s, 0):
        tail = s.shift(j)
        if not _strictly_less(lower, tail, depth) or not _strictly_less(tail, a, depth):
            return False
    return True


def _validate_quasi_greedy(s: DigitStream) -> None:
    if isinstance(s, PeriodicStream):
        if not is_quasi_greedy_sequence(s):
            raise NotQuasiGreedy(f"{s!r} is not the quasi-greedy expansion of 1 in any base")
        return
    w = s.prefix(VALIDATION_DEPTH).digits
    half = VALIDATION_DEPTH // 2
    head = w[:half]
    for k in range(1, half):
        if w[k:k + half] > head:
            raise NotQuasiGreedy(f"shift {k} of the sequence exceeds the sequence")


def _series_depth(ctx, beta, top: int, tol) -> int:
    """Digits needed for the tail bound at beta to drop below tol/4"""
    if beta <= 1:
        return Config.MAX_SERIES_DEPTH
    needed = ctx.log(4 * top / ((beta - 1) * tol)) / ctx.log(beta)
    return int(min(max(64, int(ctx.ceil(needed))), Config.MAX_SERIES_DEPTH))


def _side_of_one(ctx, s: DigitStream, beta, top: int, tol) -> int:
    """Sign of Pi_beta(s) - 1, certified with the series tail"""
    if isinstance(s, PeriodicStream):
        value = _periodic_value(ctx, s, beta)
        return (value > 1) - (value < 1)
    y = 1 / beta
    n = _series_depth(ctx, beta, top, tol)
    while True:
        ds = s.prefix(n).digits
        partial = y * ctx.polyval(list(reversed(ds)), y)
        if partial > 1:
            return 1
        if partial + _tail_bound(beta, top, n) < 1:
            return -1
        if n >= Config.MAX_SERIES_DEPTH:
            raise DepthExceeded(f"cannot separate Pi_beta from 1 at beta = {beta} with {n} digits")
        n = min(2 * n, Config.MAX_SERIES_DEPTH)
        logger.debug("raising series depth to %d at beta = %s", n, beta)


def base_enclosure(s: DigitStream, alphabet: Alphabet, tol=None, validate: bool = True):
    """Certified bracket (lo, hi), hi - lo <= 2 tol, around the beta with Pi_beta(s) = 1"""
    tol = Config.DEFAULT_TOL if tol is None else tol
    if validate:
        _validate_quasi_greedy(s)
    top = alphabet.top
    ctx = mp_context()
    with ctx.workprec(bits_for_tol(tol)):
        tol = ctx.mpf(tol)
        lo, hi = ctx.mpf(1), ctx.mpf(alphabet.n)
        if isinstance(s, PeriodicStream) and set(s.preperiod.digits + s.period.digits) == {top}:
            return hi, hi
        while hi - lo > 2 * tol:
            mid = (lo + hi) / 2
            side = _side_of_one(ctx, s, mid, top, tol)
            if side > 0:
                lo = mid
            elif side < 0:
                hi = mid
            else:
                return mid, mid
        return lo, hi


def base_estimate(s: DigitStream, alphabet: Alphabet, tol=None, validate: bool = True):
    """Midpoint and half-width of base_enclosure, both exact"""
    lo, hi = base_enclosure(s, alphabet, tol, validate)
    ctx = mp_context()
    with ctx.workprec(bits_for_tol(Config.DEFAULT_TOL if tol is None else tol) + 8):
        return (lo + hi) / 2, (hi - lo) / 2


def base_from_quasi_greedy(s: DigitStream, alphabet: Alphabet, tol=None):
    return base_estimate(s, alphabet, tol)[0]
