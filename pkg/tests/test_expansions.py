import mpmath
import pytest

from admissible import beta_L_root
from errors import BaseOutOfRange, NearTie, NotEventuallyPeriodic, NotQuasiGreedy, XOutOfRange
from expansions import (
    Base,
    Mode,
    TiePolicy,
    alpha,
    base_enclosure,
    base_from_quasi_greedy,
    expand,
    greedy_of_x,
    in_two_sided_set,
    is_greedy_sequence,
    is_greedy_sequence_all_tails,
    is_quasi_greedy_sequence,
    is_unique_expansion,
    project,
    projection_enclosure,
    quasi_greedy_of_one,
    quasi_greedy_of_x,
)
from words import Alphabet, PeriodicStream, Word, gtm_stream, periodic

GOLDEN = "1.6180339887498948482045868343656381177203091798057628621354486227"


@pytest.fixture
def golden():
    return Base.of(GOLDEN, 2)


def test_base_must_exceed_one():
    with pytest.raises(BaseOutOfRange):
        Base.of(1, 2)
    with pytest.raises(BaseOutOfRange):
        expand(1, Base.of(3, 2))


def test_project_examples(word, golden):
    assert project(periodic(word("0", 2)), Base.of(2, 2)) == 0
    assert project(periodic(word("1", 2)), Base.of(2, 2)) == 1
    assert abs(project(periodic(word("10", 2)), golden) - 1) < 1e-30


def test_projection_enclosure_is_exact_for_periodic(word, golden):
    lo, hi = projection_enclosure(periodic(word("10", 2)), golden)
    assert lo == hi


def test_quasi_greedy_of_one_at_integer_base():
    assert quasi_greedy_of_one(Base.of(2, 2), depth=32) == Word.of([1] * 32, 2)


def test_quasi_greedy_of_one_golden(golden):
    with pytest.raises(NearTie) as info:
        quasi_greedy_of_one(golden, depth=10)
    assert info.value.position == 2
    assert quasi_greedy_of_one(golden, depth=10, ties=TiePolicy.SNAP) == Word.of([1, 0] * 5, 2)


def test_quasi_greedy_of_one_at_beta_nine():
    digits = quasi_greedy_of_one(Base.of(9, 10), depth=16, ties=TiePolicy.SNAP)
    assert digits == Word.of([8] * 16, 10)


def test_snapped_expansion_carries_exact_stream():
    result = expand(1, Base.of(9, 10), depth=5, ties=TiePolicy.SNAP)
    assert result.snapped == (1,)
    assert isinstance(result.exact, PeriodicStream)
    assert result.exact.period == Word.of([8], 10)


def test_greedy_snap_ends_in_zeros(golden):
    result = expand(1, golden, depth=8, mode=Mode.GREEDY, ties=TiePolicy.SNAP)
    assert result.digits == Word.of([1, 1, 0, 0, 0, 0, 0, 0], 2)


@pytest.mark.parametrize("n,beta", [(2, 1.5), (3, 2.2), (10, 7.3)])
def test_zero_expands_to_zeros(n, beta):
    base = Base.of(beta, n)
    assert quasi_greedy_of_x(0, base, depth=12) == Word.of([0] * 12, n)
    assert greedy_of_x(0, base, depth=12) == Word.of([0] * 12, n)


@pytest.mark.parametrize("n,beta", [(2, 2), (3, 3)])
def test_maximal_point_expands_to_top_digits(n, beta):
    base = Base.of(beta, n)
    x = (n - 1) / (beta - 1)
    assert quasi_greedy_of_x(x, base, depth=12) == Word.of([n - 1] * 12, n)
    assert greedy_of_x(x, base, depth=12) == Word.of([n - 1] * 12, n)


def test_x_out_of_range():
    base = Base.of(1.5, 2)
    with pytest.raises(XOutOfRange):
        expand(-0.25, base)
    with pytest.raises(XOutOfRange):
        expand(2.5, base)


def test_expansions_project_back_to_x(rng):
    for _ in range(40):
        n = int(rng.integers(2, 8))
        beta = float(rng.uniform(1.05, n))
        x = float(rng.uniform(0, (n - 1) / (beta - 1)))
        base = Base.of(beta, n)
        for mode in Mode:
            result = expand(x, base, depth=64, mode=mode)
            lo, hi = projection_enclosure(result.digits, base)
            slack = mpmath.mpf(2) ** -100
            assert lo - slack <= x <= hi + slack, (n, beta, x, mode)


def test_greedy_dominates_quasi_greedy(rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        beta = float(rng.uniform(1.1, n))
        x = float(rng.uniform(0.01, (n - 1) / (beta - 1)))
        base = Base.of(beta, n)
        assert greedy_of_x(x, base, depth=48) >= quasi_greedy_of_x(x, base, depth=48)


@pytest.mark.parametrize("text,n,expected", [("10", 2, True), ("01", 2, False), ("31", 4, True)])
def test_is_quasi_greedy_sequence(word, text, n, expected):
    assert is_quasi_greedy_sequence(periodic(word(text, n))) is expected


def test_finite_sequence_is_not_quasi_greedy(word):
    assert not is_quasi_greedy_sequence(PeriodicStream(word("0", 2), word("1", 2)))


def test_quasi_greedy_test_needs_periodic_input(word):
    with pytest.raises(NotEventuallyPeriodic):
        is_quasi_greedy_sequence(gtm_stream(word("11", 2)))


def test_is_greedy_sequence_examples(word, golden):
    assert is_greedy_sequence(periodic(word("1", 2)), golden)
    assert not is_greedy_sequence(periodic(word("10", 2)), golden)
    assert is_greedy_sequence(PeriodicStream(word("0", 2), word("11", 2)), golden)


def test_greedy_characterizations_agree(rng):
    alphabet = Alphabet(4)
    alpha_digits = periodic(Word.of([3, 1], 4))
    base = Base.of(3.5, 4)
    for _ in range(200):
        pre = Word(tuple(int(d) for d in rng.integers(0, 4, size=int(rng.integers(0, 4)))), alphabet)
        per = Word(tuple(int(d) for d in rng.integers(0, 4, size=int(rng.integers(1, 4)))), alphabet)
        s = PeriodicStream(per, pre)
        assert (is_greedy_sequence(s, base, alpha_digits=alpha_digits)
                == is_greedy_sequence_all_tails(s, base, alpha_digits=alpha_digits)), s


@pytest.mark.parametrize("n,beta", [(2, 1.9), (3, 2.4), (5, 4.2)])
def test_extreme_points_are_unique(n, beta):
    base = Base.of(beta, n)
    assert is_unique_expansion(periodic(Word.of([0], n)), base)
    assert is_unique_expansion(periodic(Word.of([n - 1], n)), base)


def test_unique_expansion_below_two(word):
    base = Base.of(1.9, 2)
    assert is_unique_expansion(periodic(word("10", 2)), base)
    assert not is_unique_expansion(periodic(word("110", 2)), Base.of(GOLDEN, 2), depth=256)


def test_two_sided_set(word):
    base = Base.of(1.9, 2)
    assert in_two_sided_set(periodic(word("10", 2)), base)
    assert in_two_sided_set(periodic(word("110", 2)), base)
    assert not in_two_sided_set(periodic(word("0", 2)), base)


def test_alpha_is_exact_at_ties(golden):
    a = alpha(golden)
    assert isinstance(a, PeriodicStream)
    assert a.prefix(6) == Word.of([1, 0, 1, 0, 1, 0], 2)


def test_base_from_quasi_greedy_examples(word):
    with mpmath.workdps(80):
        golden = mpmath.mpf(GOLDEN)
    assert abs(base_from_quasi_greedy(periodic(word("10", 2)), Alphabet(2), 1e-20) - golden) < 1e-19
    assert abs(base_from_quasi_greedy(periodic(word("8", 10)), Alphabet(10)) - 9) < 1e-11
    assert base_from_quasi_greedy(periodic(word("9", 10)), Alphabet(10)) == 10


@pytest.mark.slow
def test_periodic_expansion_of_one_recovers_its_base(small_blocks):
    for n in range(2, 6):
        alphabet = Alphabet(n)
        for block in small_blocks(n, 3):
            beta = beta_L_root(block, 1e-30)
            a = alpha(Base(beta, alphabet))
            assert isinstance(a, PeriodicStream), block
            assert a.prefix(4 * len(block)) == periodic(block).prefix(4 * len(block)), block
            assert abs(base_from_quasi_greedy(a, alphabet, 1e-28) - beta) < 1e-24, block


def test_quasi_greedy_of_one_grows_with_the_base(rng):
    for _ in range(40):
        n = int(rng.integers(2, 7))
        small, large = sorted(float(b) for b in rng.uniform(1.05, n, size=2))
        low = quasi_greedy_of_one(Base.of(small, n), 40, ties=TiePolicy.SNAP)
        high = quasi_greedy_of_one(Base.of(large, n), 40, ties=TiePolicy.SNAP)
        assert low.digits <= high.digits, (n, small, large)


def test_two_sided_set_lies_in_unique_expansions(rng):
    alphabet = Alphabet(3)
    inside = 0
    for _ in range(60):
        base = Base.of(float(rng.uniform(2.3, 3.0)), 3)
        pre = Word(tuple(int(d) for d in rng.integers(0, 3, size=int(rng.integers(0, 3)))), alphabet)
        per = Word(tuple(int(d) for d in rng.integers(0, 3, size=int(rng.integers(1, 5)))), alphabet)
        s = PeriodicStream(per, pre)
        if in_two_sided_set(s, base):
            inside += 1
            assert is_unique_expansion(s, base), (s, base)
    assert inside > 0

def test_base_enclosure_is_certified(word):
    lo, hi = base_enclosure(periodic(word("10", 2)), Alphabet(2), 1e-15)
    assert lo <= mpmath.mpf(GOLDEN) <= hi
    assert hi - lo <= 2e-15


def test_base_from_quasi_greedy_rejects_bad_sequences(word):
    with pytest.raises(NotQuasiGreedy):
        base_from_quasi_greedy(periodic(word("01", 2)), Alphabet(2))


def test_base_from_generated_stream_matches_known_constant():
    # Komornik-Loreti constant for two digits
    beta = base_from_quasi_greedy(gtm_stream(Word.of([1], 2)), Alphabet(2), 1e-12)
    assert abs(beta - mpmath.mpf("1.787231650182965933013274")) < 1e-11
