import itertools

import mpmath
import pytest

from admissible import (
    LocateKind,
    Relation,
    admissibility_witness,
    beta_L_root,
    beta_ladder,
    closure_violation,
    critical_bases,
    critical_block,
    doubled_block,
    enumerate_admissible,
    generalized_golden_ratio,
    interval_endpoints,
    interval_relation,
    is_admissible_block,
    locate_block,
    require_admissible,
    thue_morse_bounds_hold,
    top_block_bound,
)
from errors import BudgetExceeded, NotAdmissible
from expansions import Base, TiePolicy, projection_enclosure, quasi_greedy_of_one
from words import Alphabet, Ordering, PeriodicStream, Word, gtm_stream, lex_cmp, periodic

with mpmath.workdps(80):
    GOLDEN = mpmath.mpf("1.6180339887498948482045868343656381177203091798057628621354486227")
    KOMORNIK_LORETI_2 = mpmath.mpf("1.787231650182965933013274")


@pytest.mark.parametrize("text,n,expected", [("10", 2, True), ("31", 4, True), ("0", 2, False), ("8", 10, True)])
def test_is_admissible_block(word, text, n, expected):
    assert is_admissible_block(word(text, n)) is expected


def test_witness_names_the_failing_clause(word):
    ok, witness = admissibility_witness(word("0", 2))
    assert not ok
    assert witness == "reflect(t) = 1 > t_1 = 0 at i=1"
    ok, witness = admissibility_witness(word("9", 10))
    assert not ok
    assert "t_p" in witness
    assert admissibility_witness(word("31", 4)) == (True, "")


def test_require_admissible_carries_witness(word):
    with pytest.raises(NotAdmissible) as info:
        require_admissible(word("0", 2))
    assert info.value.witness.startswith("reflect(t)")


@pytest.mark.parametrize("n,expected", [(2, []), (3, [[1]]), (10, [[5], [6], [7], [8]])])
def test_enumerate_length_one(n, expected):
    assert [b.to_list() for b in enumerate_admissible(Alphabet(n), 1)] == expected


def test_enumerate_matches_brute_force():
    alphabet = Alphabet(4)
    expected = [
        Word(digits, alphabet)
        for p in range(1, 4)
        for digits in itertools.product(range(4), repeat=p)
        if is_admissible_block(Word(digits, alphabet))
    ]
    assert enumerate_admissible(alphabet, 3) == expected


def test_enumerate_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_admissible(Alphabet(10), 6, budget=1000)


@pytest.mark.parametrize("n", range(3, 31))
def test_length_one_blocks_follow_closed_range(n):
    blocks = [b[0] for b in enumerate_admissible(Alphabet(n), 1)]
    assert blocks == list(range((n) // 2, n - 1))


def test_interval_of_critical_block_two_digits(word):
    interval = interval_endpoints(word("10", 2))
    assert abs(interval.beta_L.value - GOLDEN) < 1e-12
    assert abs(interval.beta_U.value - KOMORNIK_LORETI_2) < 1e-11


def test_interval_of_top_block(word):
    interval = interval_endpoints(word("8", 10))
    assert abs(interval.beta_L.value - 9) <= interval.beta_L.radius
    assert interval.beta_U.lower > top_block_bound(Alphabet(10))
    assert float(top_block_bound(Alphabet(10))) == pytest.approx(9.1097722286464, abs=1e-12)


def test_upper_endpoint_radius_is_certified(word):
    block = word("31", 4)
    interval = interval_endpoints(block, 1e-80)
    assert interval.beta_U.radius < 1e-79
    theta = gtm_stream(block.plus_one())
    # the projection of theta decreases in beta and equals 1 at beta_U
    _, hi = projection_enclosure(theta, Base(interval.beta_U.lower, block.alphabet), 600)
    lo, _ = projection_enclosure(theta, Base(interval.beta_U.upper, block.alphabet), 600)
    assert hi >= 1
    assert lo <= 1


def test_interval_json(word):
    data = interval_endpoints(word("31", 4)).to_json()
    assert data["N"] == 4
    assert data["block"] == [3, 1]
    assert data["beta_L"]["value"] == pytest.approx(3.5615528128088303, rel=1e-14)


def test_beta_l_is_parry_root(word):
    beta = beta_L_root(word("31", 4))
    assert abs(beta ** 2 - 3 * beta - 2) < 1e-20


def test_beta_ladder_climbs_to_beta_u(word):
    block = word("10", 2)
    ladder = beta_ladder(block, 4)
    interval = interval_endpoints(block)
    assert all(a < b for a, b in zip(ladder, ladder[1:]))
    assert interval.beta_L.value < ladder[0]
    assert ladder[-1] < interval.beta_U.upper


def test_interval_relation_examples(word):
    a = word("21", 4)
    assert interval_relation(a, a) is Relation.IDENTICAL
    assert interval_relation(a, word("31", 4)) is Relation.DISJOINT
    t = word("31", 4)
    assert interval_relation(t, doubled_block(t)) is Relation.SAME_RIGHT_ENDPOINT


def test_doubled_block(word):
    t = word("31", 4)
    assert doubled_block(t) == word("3201", 4)
    assert is_admissible_block(doubled_block(t))
    theta = gtm_stream(t.plus_one()).prefix(4)
    assert doubled_block(t).plus_one() == theta


@pytest.mark.slow
def test_interval_law_over_small_alphabets(small_blocks):
    allowed = {Relation.DISJOINT, Relation.SAME_RIGHT_ENDPOINT, Relation.IDENTICAL}
    for n in range(2, 6):
        blocks = small_blocks(n, 4)
        for a, b in itertools.combinations_with_replacement(blocks, 2):
            assert interval_relation(a, b, 1e-12) in allowed


@pytest.mark.slow
def test_endpoints_are_consistent(small_blocks):
    for n in range(2, 7):
        alphabet = Alphabet(n)
        g_n = generalized_golden_ratio(alphabet)
        for block in small_blocks(n, 3):
            interval = interval_endpoints(block, 1e-80)
            assert interval.beta_L.upper < interval.beta_U.lower
            assert g_n <= interval.beta_L.upper + 1e-30
            assert interval.beta_U.upper < n

            at_left = quasi_greedy_of_one(Base(interval.beta_L.value, alphabet), 64, TiePolicy.SNAP)
            assert at_left == PeriodicStream(block).prefix(64), block
            at_right = quasi_greedy_of_one(Base(interval.beta_U.value, alphabet), 64, guard_bits=200)
            assert at_right == gtm_stream(block.plus_one()).prefix(64), block


@pytest.mark.slow
def test_admissible_blocks_satisfy_thue_morse_bounds(small_blocks):
    for n in range(2, 7):
        for block in small_blocks(n, 4):
            assert thue_morse_bounds_hold(block, 6), block


def test_thue_morse_bounds_fail_for_non_admissible_block(word):
    assert not thue_morse_bounds_hold(word("03", 5), 2)


def test_even_alphabet_half_block_shares_sequence(word):
    # k-1 is not admissible for N = 2k, yet generates the same sequence as k(k-1)
    half = word("1", 4)
    assert not is_admissible_block(half)
    assert thue_morse_bounds_hold(half, 6)
    assert doubled_block(half) == word("21", 4)
    assert is_admissible_block(doubled_block(half))


def test_thue_morse_bounds_characterize_admissible_words():
    for n in range(2, 5):
        alphabet = Alphabet(n)
        mismatches = []
        for p in range(1, 4):
            for digits in itertools.product(range(n), repeat=p):
                t = Word(digits, alphabet)
                if digits[-1] == alphabet.top:
                    assert not is_admissible_block(t)
                    continue
                if thue_morse_bounds_hold(t, 6) != is_admissible_block(t):
                    mismatches.append(t)
        expected = [Word((n // 2 - 1,), alphabet)] if n % 2 == 0 else []
        assert mismatches == expected, n


@pytest.mark.slow
def test_thue_morse_sequence_is_a_unique_expansion_of_one(small_blocks):
    for n in range(2, 6):
        for block in small_blocks(n, 3):
            theta = gtm_stream(block.plus_one())
            low = theta.reflect()
            for i in range(1, 65):
                tail = theta.shift(i)
                assert lex_cmp(tail, theta, 4096) is Ordering.LESS, (block, i)
                assert lex_cmp(tail, low, 4096) is Ordering.GREATER, (block, i)


@pytest.mark.slow
def test_reflected_prefix_bounds_the_next_segment(small_blocks):
    for n in range(2, 6):
        for block in small_blocks(n, 6):
            t = block.digits
            for q in range(1, (len(t) + 1) // 2):
                raised = tuple(block.alphabet.top - d for d in t[:q - 1]) + (block.alphabet.top - t[q - 1] + 1,)
                assert raised <= t[q:2 * q], (block, q)


@pytest.mark.parametrize("n,expected", [(2, "10"), (3, "1"), (4, "21"), (10, "54"), (11, "5")])
def test_critical_block(word, n, expected):
    assert critical_block(Alphabet(n)) == word(expected, n)


def test_critical_bases():
    g, beta_c = critical_bases(Alphabet(2))
    assert abs(g - GOLDEN) < 1e-30
    assert abs(beta_c - KOMORNIK_LORETI_2) < 1e-11
    assert critical_bases(Alphabet(3))[0] == 2
    assert abs(critical_bases(Alphabet(10))[1] - 5.976) < 1e-3


@pytest.mark.parametrize("n", [2, 3, 4, 10, 20])
def test_critical_block_interval_is_golden_to_komornik_loreti(n):
    alphabet = Alphabet(n)
    interval = interval_endpoints(critical_block(alphabet))
    g, beta_c = critical_bases(alphabet)
    assert abs(interval.beta_L.value - g) < 1e-10
    assert abs(interval.beta_U.value - beta_c) < 1e-10


def test_closure_violation(word):
    assert closure_violation(periodic(word("8", 10))) is None
    assert closure_violation(PeriodicStream(word("0", 4), word("32", 4))) == 2
    assert closure_violation(word("3320", 4)) is None
    assert closure_violation(word("31000000", 4)) == 2


def test_locate_at_left_endpoint_of_top_block(word):
    base = Base.of(9, 10)
    location = locate_block(base)
    assert location.kind is LocateKind.BLOCK
    assert location.block == word("8", 10)
    assert locate_block(base, prefer_intervals=False).kind is LocateKind.IN_CLOSURE_U


def test_locate_inside_top_block(word):
    location = locate_block(Base.of("9.05", 10))
    assert location.kind is LocateKind.BLOCK
    assert location.block == word("8", 10)
    assert location.interval.contains(mpmath.mpf("9.05"))


def test_locate_below_critical():
    assert locate_block(Base.of("1.7", 2)).kind is LocateKind.BELOW_CRITICAL


def test_locate_agrees_with_enumeration():
    alphabet = Alphabet(2)
    base = Base.of("1.85", 2)
    beta = base.beta
    location = locate_block(base, p_max=8)
    assert location.kind is LocateKind.BLOCK
    assert is_admissible_block(location.block)
    assert location.interval.contains(beta)
    holders = [b for b in enumerate_admissible(alphabet, 8) if interval_endpoints(b).contains(beta)]
    assert location.block in holders


def test_locate_through_closure_scan_matches_intervals(rng):
    alphabet = Alphabet(3)
    for beta in rng.uniform(2.5, 2.99, size=10):
        base = Base(float(beta), alphabet)
        scanned = locate_block(base, p_max=6, prefer_intervals=False)
        if scanned.kind is LocateKind.BLOCK:
            assert scanned.interval.contains(base.beta, 1e-12)
            assert is_admissible_block(scanned.block)


def test_no_short_block_contains_one_point_nine():
    base = Base.of("1.9", 2)
    location = locate_block(base, p_max=8)
    assert location.kind is not LocateKind.BLOCK
    assert not [b for b in enumerate_admissible(Alphabet(2), 8) if interval_endpoints(b).contains(base.beta)]


@pytest.mark.slow
@pytest.mark.parametrize("beta,prefer_intervals", [("1.99", True), ("1.9", False)])
def test_locate_reports_narrow_intervals_as_outcomes(beta, prefer_intervals):
    base = Base.of(beta, 2)
    location = locate_block(base, p_max=200, prefer_intervals=prefer_intervals)
    assert location.kind in (LocateKind.BLOCK, LocateKind.UNRESOLVED, LocateKind.IN_CLOSURE_U)
    if location.kind is LocateKind.BLOCK:
        assert location.interval.contains(base.beta, 1e-12)
    else:
        assert location.detail
