"""Admissible blocks, their intervals [beta_L, beta_U], and locating the
block whose interval contains a given base."""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import List, Optional, Tuple

from config import Config
from errors import BudError, BudgetExceeded, NotAdmissible, Undecided
from expansions import Base, alpha, base_estimate, base_from_quasi_greedy
from numerics import bits_for_tol, interval_precision, mp_context, sig15
from words import (
    Alphabet,
    Ordering,
    PeriodicStream,
    Word,
    compare_periodic,
    gtm_stream,
    komornik_loreti_stream,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Endpoint:
    value: object
    radius: object

    @property
    def lower(self):
        return mp_context().fsub(self.value, self.radius, exact=True)

    @property
    def upper(self):
        return mp_context().fadd(self.value, self.radius, exact=True)

    def to_json(self) -> dict:
        return {"value": sig15(self.value), "radius": sig15(self.radius)}


@dataclass(frozen=True)
class AdmissibleInterval:
    block: Word
    beta_L: Endpoint
    beta_U: Endpoint

    @property
    def p(self) -> int:
        return len(self.block)

    def contains(self, beta, slack=0) -> bool:
        ctx = mp_context()
        return (ctx.fsub(self.beta_L.lower, slack, exact=True) <= beta
                <= ctx.fadd(self.beta_U.upper, slack, exact=True))

    def to_json(self) -> dict:
        return {
            "N": self.block.alphabet.n,
            "block": self.block.to_list(),
            "beta_L": self.beta_L.to_json(),
            "beta_U": self.beta_U.to_json(),
        }


class Relation(Enum):
    DISJOINT = "disjoint"
    SAME_RIGHT_ENDPOINT = "same-right-endpoint"
    IDENTICAL = "identical"


class LocateKind(Enum):
    BLOCK = "block"
    IN_CLOSURE_U = "in-closure-u"
    BELOW_CRITICAL = "below-critical"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class Location:
    kind: LocateKind
    block: Optional[Word] = None
    interval: Optional[AdmissibleInterval] = None
    detail: str = ""


def _segment(label: str, first: int, last: int) -> str:
    if first > last:
        return ""
    return f"{label}_{first}" if first == last else f"{label}_{first}..{label}_{last}"


def admissibility_witness(t: Word) -> Tuple[bool, str]:
    """Check the admissibility clauses in order; return the first one that fails"""
    if len(t) == 0:
        raise ValueError("blocks must be nonempty")
    top = t.alphabet.top
    d = t.digits
    p = len(d)
    if d[-1] >= top:
        return False, f"t_p = {d[-1]} is not below N-1 = {top}"

    low = t.reflect().digits
    plus = d[:-1] + (d[-1] + 1,)
    for i in range(p):
        rotation = d[i:] + d[:i]
        if rotation < low:
            label = " ".join(filter(None, (_segment("t", i + 1, p), _segment("t", 1, i))))
            return False, f"reflect(t) = {t.reflect()} > {label} = {Word(rotation, t.alphabet)} at i={i + 1}"
        upper = plus[i:] + low[:i]
        if upper > plus:
            label = _segment("t", i + 1, p) + "^+"
            if i:
                label += f" reflect({_segment('t', 1, i)})"
            return False, f"{label} = {Word(upper, t.alphabet)} > t^+ = {Word(plus, t.alphabet)} at i={i + 1}"
    return True, ""


def is_admissible_block(t: Word) -> bool:
    return admissibility_witness(t)[0]


def require_admissible(t: Word) -> None:
    ok, witness = admissibility_witness(t)
    if not ok:
        raise NotAdmissible(t, witness)


def enumerate_admissible(alphabet: Alphabet, p_max: int, budget: Optional[int] = None) -> List[Word]:
    """All admissible blocks of length <= p_max in (length, lexicographic) order"""
    if p_max < 1:
        raise ValueError("p_max must be at least 1")
    budget = Config.ENUMERATION_BUDGET if budget is None else budget
    candidates = alphabet.n ** p_max
    if candidates > budget:
        raise BudgetExceeded("admissible block candidates", candidates, budget)

    top = alphabet.top
    first_digits = range((top + 1) // 2, top + 1)
    blocks = []
    for p in range(1, p_max + 1):
        ranges = [first_digits] + [range(alphabet.n)] * (p - 1)
        for digits in itertools.product(*ranges):
            if digits[-1] == top:
                continue
            word = Word(digits, alphabet)
            if is_admissible_block(word):
                blocks.append(word)
    return blocks


def doubled_block(t: Word) -> Word:
    """t^+ reflect(t^+), which is theta_1..theta_2p of t^+ with the last digit lowered"""
    seed = t.plus_one()
    return seed + seed.reflect()


def critical_block(alphabet: Alphabet) -> Word:
    """Block generating [G_N, beta_c(N)]"""
    k, odd = divmod(alphabet.n, 2)
    return Word((k,), alphabet) if odd else Word((k, k - 1), alphabet)


def generalized_golden_ratio(alphabet: Alphabet):
    ctx = mp_context()
    k, odd = divmod(alphabet.n, 2)
    if odd:
        return ctx.mpf(k + 1)
    return (k + ctx.sqrt(k * k + 4 * k)) / 2


def top_block_bound(alphabet: Alphabet):
    """(N-1+sqrt(N^2-2N+5))/2, below beta_U of the block N-2"""
    n = alphabet.n
    if n < 3:
        raise ValueError("the block N-2 is admissible only for N >= 3")
    ctx = mp_context()
    return (n - 1 + ctx.sqrt(n * n - 2 * n + 5)) / 2


def _parry_coefficients(t: Word) -> List[int]:
    """beta^p - sum t_i beta^(p-i) - 1, highest degree first"""
    return [1] + [-d for d in t.digits[:-1]] + [-t.digits[-1] - 1]


def _sign_change_certified(coeffs: List[int], a, b, bits: int) -> bool:
    with interval_precision(bits + 16) as iv:
        def horner(x):
            acc = iv.mpf(coeffs[0])
            for c in coeffs[1:]:
                acc = acc * x + c
            return acc

        return (horner(iv.mpf(a)) < 0) is True and (horner(iv.mpf(b)) > 0) is True


def _lower_endpoint(t: Word, tol) -> Endpoint:
    """Root of the Parry polynomial of t in (1, N]: bisection, Newton polish,
    then an interval-arithmetic sign check around the polished root"""
    coeffs = _parry_coefficients(t)
    n = t.alphabet.n
    bits = bits_for_tol(tol)
    ctx = mp_context()
    with ctx.workprec(bits):
        lo, hi = ctx.mpf(1), ctx.mpf(n)
        coarse = ctx.mpf(2) ** -32
        while hi - lo > coarse:
            mid = (lo + hi) / 2
            if ctx.polyval(coeffs, mid) < 0:
                lo = mid
            else:
                hi = mid

        x = (lo + hi) / 2
        resolution = ctx.mpf(2) ** (-(bits - 8))
        for _ in range(100):
            value, slope = ctx.polyval(coeffs, x, derivative=True)
            if slope == 0:
                break
            step = value / slope
            x -= step
            if abs(step) <= resolution * x:
                break

        radius = n * ctx.mpf(2) ** (-(bits - 16))
        if lo <= x <= hi and _sign_change_certified(coeffs, x - radius, x + radius, bits):
            return Endpoint(x, radius)

        logger.warning("Newton polish of beta_L for %s failed; bisecting to tol", t)
        tol = ctx.mpf(tol)
        while hi - lo > 2 * tol:
            mid = (lo + hi) / 2
            if ctx.polyval(coeffs, mid) < 0:
                lo = mid
            else:
                hi = mid
        return Endpoint((lo + hi) / 2, (hi - lo) / 2)


def beta_L_root(block: Word, tol=None):
    require_admissible(block)
    return _lower_endpoint(block, Config.DEFAULT_TOL if tol is None else tol).value


@lru_cache(maxsize=16384)
def interval_endpoints(block: Word, tol=None) -> AdmissibleInterval:
    require_admissible(block)
    tol = Config.DEFAULT_TOL if tol is None else tol
    logger.debug("computing interval endpoints of %s", block)

    lower = _lower_endpoint(block, tol)
    upper = Endpoint(*base_estimate(gtm_stream(block.plus_one()), block.alphabet, tol, validate=False))
    interval = AdmissibleInterval(block, lower, upper)
    _verify_interval(interval)
    return interval


def _verify_interval(interval: AdmissibleInterval) -> None:
    n = interval.block.alphabet.n
    g_n = generalized_golden_ratio(interval.block.alphabet)
    slack = interval.beta_L.radius + n * mp_context().mpf(2) ** -100
    problems = []
    if not interval.beta_L.upper < interval.beta_U.lower:
        problems.append("beta_L < beta_U not certified")
    if g_n > interval.beta_L.value + slack:
        problems.append("beta_L below the generalized golden ratio")
    if not interval.beta_U.upper < n:
        problems.append("beta_U not below N")
    if problems:
        raise Undecided(f"interval of {interval.block}: " + "; ".join(problems))


def beta_ladder(block: Word, n_max: int, tol=None) -> list:
    """Bases whose quasi-greedy expansion of 1 is (theta_1..theta_L reflect(theta_1..theta_L))^inf, L = 2^(n-1) p"""
    require_admissible(block)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    theta = gtm_stream(block.plus_one())
    values = []
    for level in range(1, n_max + 1):
        head = theta.prefix(2 ** (level - 1) * len(block))
        values.append(base_from_quasi_greedy(PeriodicStream(head + head.reflect()), block.alphabet, tol))
    return values


def _doubling_related(a: Word, b: Word) -> bool:
    """True when the longer block's seed is a 2^k-fold prefix of the shorter one's sequence"""
    short, long = (a, b) if len(a) <= len(b) else (b, a)
    ratio, rest = divmod(len(long), len(short))
    if rest or ratio < 2 or ratio & (ratio - 1):
        return False
    return gtm_stream(short.plus_one()).prefix(len(long)) == long.plus_one()


def interval_relation(a: Word, b: Word, tol=None) -> Relation:
    if a == b:
        require_admissible(a)
        return Relation.IDENTICAL
    first = interval_endpoints(a, tol)
    second = interval_endpoints(b, tol)

    if _doubling_related(a, b):
        if first.beta_U.lower <= second.beta_U.upper and second.beta_U.lower <= first.beta_U.upper:
            return Relation.SAME_RIGHT_ENDPOINT
        raise Undecided(f"{a} and {b} share beta_U but their enclosures separate")

    if first.beta_U.upper < second.beta_L.lower or second.beta_U.upper < first.beta_L.lower:
        return Relation.DISJOINT
    raise Undecided(f"enclosures of {a} and {b} overlap; retry with a smaller tol")


@lru_cache(maxsize=256)
def critical_bases(alphabet: Alphabet, tol=None):
    """(G_N, beta_c(N))"""
    beta_c = base_from_quasi_greedy(komornik_loreti_stream(alphabet), alphabet, tol)
    return generalized_golden_ratio(alphabet), beta_c


def thue_morse_bounds_hold(block: Word, levels: int) -> bool:
    """reflect(theta_1..theta_{L-i+1}) < theta_i..theta_L <= theta_1..theta_{L-i+1}
    for every 1 <= i <= L, L = 2^n p, n <= levels"""
    theta = gtm_stream(block.plus_one())
    top = block.alphabet.top
    for level in range(levels + 1):
        length = 2 ** level * len(block)
        w = theta.doubling_prefix(length).digits
        low = tuple(top - d for d in w)
        for i in range(1, length + 1):
            window = w[i - 1:]
            size = len(window)
            if not low[:size] < window <= w[:size]:
                return False
    return True


def closure_violation(alpha_digits, depth: Optional[int] = None) -> Optional[int]:
    """Least q >= 1 with sigma^q(alpha) <= reflect(alpha), or None.

    Exact for periodic alpha; for a computed prefix only shifts leaving at
    least half of it to compare are scanned.
    """
    if isinstance(alpha_digits, PeriodicStream):
        low = alpha_digits.reflect()
        span = len(alpha_digits.preperiod) + len(alpha_digits.period)
        for q in range(1, span + 1):
            if compare_periodic(alpha_digits.shift(q), low) is not Ordering.GREATER:
                return q
        return None

    w = alpha_digits.digits
    if depth is not None:
        w = w[:depth]
    low = tuple(alpha_digits.alphabet.top - d for d in w)
    for q in range(1, len(w) // 2 + 1):
        tail = w[q:]
        if tail <= low[:len(tail)]:
            return q
    return None


def _containing_interval(prefix: Word, beta, p_max: int, tol) -> Optional[AdmissibleInterval]:
    """If beta lies in [beta_L(t), beta_U(t)] then alpha(beta) starts with t or t^+,
    so each length contributes at most two candidates"""
    for p in range(1, min(p_max, len(prefix)) + 1):
        head = prefix[:p]
        candidates = [head]
        if head[-1] > 0:
            candidates.append(head.minus_one())
        for candidate in candidates:
            if not is_admissible_block(candidate):
                continue
            try:
                interval = interval_endpoints(candidate, tol)
            except BudError as e:
                logger.debug("skipping %s: %s", candidate, e)
                continue
            if interval.contains(beta, tol):
                return interval
    return None


def locate_block(base: Base, depth: Optional[int] = None, p_max: Optional[int] = None,
                 tol=None, prefer_intervals: bool = True) -> Location:
    """Find the admissible block whose interval contains beta.

    Containment in an interval of a block of length <= p_max is tried first;
    the closure scan on alpha(beta) follows. Blocks longer than p_max are not
    reported.
    """
    alphabet = base.alphabet
    depth = Config.DEFAULT_DEPTH if depth is None else depth
    p_max = Config.DEFAULT_P_MAX if p_max is None else p_max
    tol = Config.DEFAULT_TOL if tol is None else tol
    beta = base.beta

    _, beta_c = critical_bases(alphabet, tol)
    if beta <= beta_c + tol:
        return Location(LocateKind.BELOW_CRITICAL)
    if beta >= alphabet.n:
        return Location(LocateKind.UNRESOLVED, detail="beta >= N")

    expansion = alpha(base, depth)
    prefix = expansion.prefix(depth) if isinstance(expansion, PeriodicStream) else expansion

    if prefer_intervals:
        interval = _containing_interval(prefix, beta, p_max, tol)
        if interval is not None:
            return Location(LocateKind.BLOCK, interval.block, interval)

    q = closure_violation(expansion, depth)
    if q is None:
        return Location(LocateKind.IN_CLOSURE_U, detail=f"no closure violation within {depth} digits")
    if q > p_max:
        return Location(LocateKind.UNRESOLVED, detail=f"closure violation at {q} exceeds p_max = {p_max}")
    if prefix[q - 1] == 0:
        return Location(LocateKind.UNRESOLVED, detail=f"alpha_{q} = 0")
    block = prefix[:q].minus_one()
    if not is_admissible_block(block):
        return Location(LocateKind.UNRESOLVED, detail=f"scanned block {block} is not admissible")
    try:
        interval = interval_endpoints(block, tol)
    except BudError as e:
        return Location(LocateKind.UNRESOLVED, detail=str(e))
    if not interval.contains(beta, tol):
        return Location(LocateKind.UNRESOLVED, detail=f"beta outside the interval of {block}")
    return Location(LocateKind.BLOCK, block, interval)
