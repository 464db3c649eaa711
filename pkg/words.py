"""Digit alphabets, finite words, infinite digit streams and the Thue-Morse family.

Indexing conventions: ``Word`` and ``DigitStream`` are 0-indexed like any
Python sequence, so ``stream[0]`` is the first digit d_1. Functions that take
a position in the mathematical sense (``gtm_digit_closed``,
``komornik_loreti_digit``) are 1-indexed and say so.
"""

import itertools
import logging
import math
import re
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from config import Config
from errors import DigitOutOfRange, InvalidAlphabet, InvalidSeed

logger = logging.getLogger(__name__)

MAX_ALPHABET = 2 ** 16


@dataclass(frozen=True)
class Alphabet:
    """The digit set {0, ..., n-1}"""

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise InvalidAlphabet(f"alphabet size must be an integer, got {self.n!r}")
        if not 2 <= self.n <= MAX_ALPHABET:
            raise InvalidAlphabet(f"alphabet size must lie in [2, {MAX_ALPHABET}], got {self.n}")

    @property
    def top(self) -> int:
        return self.n - 1

    def reflect_digit(self, d: int) -> int:
        return self.n - 1 - d

    def check(self, d: int) -> int:
        if not 0 <= d < self.n:
            raise DigitOutOfRange(f"digit {d} outside 0..{self.n - 1}", d)
        return d


class Ordering(Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    EQUAL_TO_DEPTH = "equal-to-depth"


def _first_difference(xs: Sequence[int], ys: Sequence[int]) -> Optional[Ordering]:
    for x, y in zip(xs, ys):
        if x != y:
            return Ordering.LESS if x < y else Ordering.GREATER
    return None


@total_ordering
@dataclass(frozen=True)
class Word:
    """A finite block of digits over an alphabet"""

    digits: Tuple[int, ...]
    alphabet: Alphabet

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        for d in digits:
            self.alphabet.check(d)
        object.__setattr__(self, "digits", digits)

    @classmethod
    def of(cls, digits: Iterable[int], n: int) -> "Word":
        return cls(tuple(digits), Alphabet(n))

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> "Word":
        """Read ``910``, ``[9,1,0]`` or ``9-1-0``.

        Without separators each character is one digit when N <= 10; for
        larger alphabets a bare token is a single digit.
        """
        text = text.strip()
        if text.startswith("[") and text.endswith("]"):
            parts = [part for part in re.split(r"[,\s]+", text[1:-1]) if part]
        elif re.search(r"[-,\s]", text):
            parts = [part for part in re.split(r"[-,\s]+", text) if part]
        elif alphabet.n <= 10:
            parts = list(text)
        else:
            parts = [text]
        try:
            digits = tuple(int(part) for part in parts)
        except ValueError:
            raise DigitOutOfRange(f"cannot read a word from {text!r}")
        return cls(digits, alphabet)

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Word(self.digits[index], self.alphabet)
        return self.digits[index]

    def __add__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        _same_alphabet(self, other)
        return Word(self.digits + other.digits, self.alphabet)

    def __lt__(self, other: "Word") -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        _same_alphabet(self, other)
        return self.digits < other.digits

    def __str__(self) -> str:
        return self.render()

    @property
    def n(self) -> int:
        return self.alphabet.n

    @property
    def value(self) -> int:
        """The word read as a base-N integer"""
        total = 0
        for d in self.digits:
            total = total * self.alphabet.n + d
        return total

    def render(self, sep: Optional[str] = None) -> str:
        if sep is not None:
            return sep.join(str(d) for d in self.digits)
        if self.alphabet.n <= 10:
            return "".join(str(d) for d in self.digits)
        return "[" + ",".join(str(d) for d in self.digits) + "]"

    def to_list(self) -> List[int]:
        return list(self.digits)

    def reflect(self) -> "Word":
        top = self.alphabet.top
        return Word(tuple(top - d for d in self.digits), self.alphabet)

    def plus_one(self) -> "Word":
        if not self.digits or self.digits[-1] >= self.alphabet.top:
            raise DigitOutOfRange(f"cannot increase the last digit of {self}")
        return Word(self.digits[:-1] + (self.digits[-1] + 1,), self.alphabet)

    def minus_one(self) -> "Word":
        if not self.digits or self.digits[-1] <= 0:
            raise DigitOutOfRange(f"cannot decrease the last digit of {self}")
        return Word(self.digits[:-1] + (self.digits[-1] - 1,), self.alphabet)


def _same_alphabet(a, b) -> None:
    if a.alphabet != b.alphabet:
        raise ValueError(f"alphabets differ: {a.alphabet.n} vs {b.alphabet.n}")


def reflect(w: Word) -> Word:
    return w.reflect()


def plus_one(w: Word) -> Word:
    return w.plus_one()


def minus_one(w: Word) -> Word:
    return w.minus_one()


class StreamKind(Enum):
    EVENTUALLY_PERIODIC = "eventually-periodic"
    GENERALIZED_TM = "generalized-thue-morse"
    GENERATED = "generated"


class DigitStream(ABC):
    """An infinite digit sequence read lazily by index"""

    kind: StreamKind

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet

    @abstractmethod
    def _digit(self, i: int) -> int:
        ...

    def _digits(self, n: int) -> List[int]:
        return [self._digit(i) for i in range(n)]

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError("streams are indexed from 0")
        return self._digit(i)

    def __iter__(self) -> Iterator[int]:
        for i in itertools.count():
            yield self._digit(i)

    def prefix(self, n: int) -> Word:
        return Word(tuple(self._digits(n)), self.alphabet)

    def shift(self, k: int) -> "DigitStream":
        if k < 0:
            raise ValueError("shift must be nonnegative")
        if k == 0:
            return self
        return GeneratedStream((self._digit(i) for i in itertools.count(k)), self.alphabet)

    def reflect(self) -> "DigitStream":
        top = self.alphabet.top
        return GeneratedStream((top - d for d in self), self.alphabet)


class PeriodicStream(DigitStream):
    """preperiod followed by period repeated forever"""

    kind = StreamKind.EVENTUALLY_PERIODIC

    def __init__(self, period: Word, preperiod: Optional[Word] = None):
        super().__init__(period.alphabet)
        if len(period) == 0:
            raise ValueError("period length must be at least 1")
        if preperiod is None:
            preperiod = Word((), period.alphabet)
        _same_alphabet(period, preperiod)
        self.period = period
        self.preperiod = preperiod

    def _digit(self, i: int) -> int:
        pre = len(self.preperiod)
        if i < pre:
            return self.preperiod[i]
        return self.period[(i - pre) % len(self.period)]

    @property
    def is_infinite(self) -> bool:
        """Infinitely many nonzero digits"""
        return any(self.period)

    def shift(self, k: int) -> "PeriodicStream":
        if k < 0:
            raise ValueError("shift must be nonnegative")
        pre = len(self.preperiod)
        if k <= pre:
            return PeriodicStream(self.period, self.preperiod[k:])
        r = (k - pre) % len(self.period)
        return PeriodicStream(self.period[r:] + self.period[:r])

    def reflect(self) -> "PeriodicStream":
        return PeriodicStream(self.period.reflect(), self.preperiod.reflect())

    def __repr__(self) -> str:
        return f"PeriodicStream({self.preperiod}({self.period})^inf)"


class GeneratedStream(DigitStream):
    """Digits pulled on demand from a stateful producer and memoized"""

    kind = StreamKind.GENERATED

    def __init__(self, producer: Iterable[int], alphabet: Alphabet):
        super().__init__(alphabet)
        self._producer = iter(producer)
        self._memo: List[int] = []
        self._lock = threading.Lock()

    def _fill(self, n: int) -> None:
        with self._lock:
            while len(self._memo) < n:
                self._memo.append(self.alphabet.check(next(self._producer)))

    def _digit(self, i: int) -> int:
        if i >= len(self._memo):
            self._fill(i + 1)
        return self._memo[i]

    def _digits(self, n: int) -> List[int]:
        self._fill(n)
        return self._memo[:n]


class ThueMorseStream(DigitStream):
    """Generalized Thue-Morse sequence generated by a seed t_1...t_p^+.

    Random access goes through the closed formula; ``prefix`` materializes the
    doubling construction once and reuses it.
    """

    kind = StreamKind.GENERALIZED_TM

    def __init__(self, seed: Word):
        super().__init__(seed.alphabet)
        if len(seed) == 0 or seed[-1] == 0:
            raise InvalidSeed(f"seed {seed} must end with a nonzero digit")
        self.seed = seed
        self._doubled: List[int] = list(seed.digits)
        self._lock = threading.Lock()

    @property
    def block(self) -> Word:
        return self.seed.minus_one()

    def _digit(self, i: int) -> int:
        return gtm_digit_closed(self.seed, i + 1)

    def _digits(self, n: int) -> List[int]:
        return self.doubling_prefix(n).to_list()

    def doubling_prefix(self, length: int) -> Word:
        top = self.alphabet.top
        with self._lock:
            while len(self._doubled) < length:
                block = [top - d for d in self._doubled]
                block[-1] += 1
                self._doubled.extend(block)
            digits = tuple(self._doubled[:length])
        return Word(digits, self.alphabet)

    def __repr__(self) -> str:
        return f"ThueMorseStream({self.seed})"


def periodic(period: Union[Word, Sequence[int]], preperiod=None, alphabet: Optional[Alphabet] = None) -> PeriodicStream:
    if not isinstance(period, Word):
        period = Word(tuple(period), alphabet)
    if preperiod is not None and not isinstance(preperiod, Word):
        preperiod = Word(tuple(preperiod), period.alphabet)
    return PeriodicStream(period, preperiod)


def shift(s: DigitStream, k: int) -> DigitStream:
    return s.shift(k)


def classical_tm(i: int, method: str = "parity") -> int:
    """Classical Thue-Morse digit tau_i, i >= 0"""
    if i < 0:
        raise ValueError("index must be nonnegative")
    if method == "parity":
        return bin(i).count("1") & 1
    if method == "recursive":
        return classical_tm_recursive(i)
    raise ValueError(f"unknown method {method!r}")


def classical_tm_recursive(i: int) -> int:
    """tau_0 = 0, tau_{2^n} = 1, tau_{2^n + j} = 1 - tau_j for 0 < j < 2^n"""
    flips = 0
    while i > 0:
        top = 1 << (i.bit_length() - 1)
        if i == top:
            return 1 ^ flips
        i -= top
        flips ^= 1
    return flips


def gtm_stream(seed: Word) -> ThueMorseStream:
    return ThueMorseStream(seed)


def gtm_digit_closed(seed: Word, ell: int) -> int:
    """theta_ell of the sequence generated by ``seed`` (1-indexed).

    With ell = i*p + q, 1 <= q <= p and t = seed^-:
    theta_ell = t_q + tau_i (reflect(t_q) - t_q), plus tau_{i+1} - tau_i when q = p.
    """
    if ell < 1:
        raise ValueError("positions start at 1")
    p = len(seed)
    if p == 0 or seed[-1] == 0:
        raise InvalidSeed(f"seed {seed} must end with a nonzero digit")
    i, q = divmod(ell - 1, p)
    q += 1
    tq = seed[q - 1] - (1 if q == p else 0)
    tau_i = classical_tm(i)
    digit = tq + tau_i * (seed.alphabet.top - 2 * tq)
    if q == p:
        digit += classical_tm(i + 1) - tau_i
    return digit


def doubling_prefix(seed: Word, length: int) -> Word:
    return ThueMorseStream(seed).doubling_prefix(length)


def komornik_loreti_digit(n: int, i: int) -> int:
    """lambda_i(N) for i >= 1"""
    k, odd = divmod(n, 2)
    if odd:
        return k + classical_tm(i) - classical_tm(i - 1)
    return k - 1 + classical_tm(i)


def komornik_loreti_stream(alphabet: Alphabet) -> GeneratedStream:
    n = alphabet.n
    return GeneratedStream((komornik_loreti_digit(n, i) for i in itertools.count(1)), alphabet)


def compare_periodic(a: PeriodicStream, b: PeriodicStream) -> Ordering:
    """Exact comparison: after both preperiods, one common period decides"""
    _same_alphabet(a, b)
    length = max(len(a.preperiod), len(b.preperiod)) + math.lcm(len(a.period), len(b.period))
    outcome = _first_difference(a.prefix(length).digits, b.prefix(length).digits)
    return outcome or Ordering.EQUAL


def lex_cmp(a: Union[DigitStream, Word], b: Union[DigitStream, Word], depth: Optional[int] = None) -> Ordering:
    """Lexicographic comparison of words and streams.

    Equal-length words and pairs of eventually periodic streams are compared
    exactly. Everything else is compared over at most ``depth`` digits (and
    never past the end of a word); agreement there gives EQUAL_TO_DEPTH.
    """
    _same_alphabet(a, b)
    if isinstance(a, Word) and isinstance(b, Word) and len(a) == len(b):
        return _first_difference(a.digits, b.digits) or Ordering.EQUAL
    if isinstance(a, PeriodicStream) and isinstance(b, PeriodicStream):
        return compare_periodic(a, b)
    limit = depth if depth is not None else Config.COMPARE_DEPTH
    for side in (a, b):
        if isinstance(side, Word):
            limit = min(limit, len(side))
    outcome = _first_difference(a[:limit].digits if isinstance(a, Word) else a.prefix(limit).digits,
                                b[:limit].digits if isinstance(b, Word) else b.prefix(limit).digits)
    return outcome or Ordering.EQUAL_TO_DEPTH
