import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adicgaps.tree import (
    AlphabetMismatch,
    NotBelow,
    ScaleLimit,
    empty_node,
    first_move,
    first_move_equivalent,
    format_node,
    format_node_set,
    meet,
    meet_closure,
    node,
    node_from_runs,
    node_set,
    parse_node,
    parse_node_set,
    prec_compare,
    prec_sorted,
    random_node_set,
    record_closure,
    record_equivalent,
    record_history,
    reembed,
    replay_witness,
    weight,
)


def letters_strategy(alphabet, max_len=6):
    return st.lists(st.integers(0, alphabet - 1), max_size=max_len)


node_strategy = st.integers(2, 4).flatmap(
    lambda n: st.tuples(st.just(n), letters_strategy(n))
).map(lambda t: node(t[0], t[1]))


def pair_strategy(alphabet):
    return st.tuples(letters_strategy(alphabet), letters_strategy(alphabet)).map(
        lambda t: (node(alphabet, t[0]), node(alphabet, t[1]))
    )


# ---------------------------------------------------------------------------
# words and runs


def test_run_normalization():
    a = node_from_runs(3, [(1, 2), (1, 3), (0, 0), (2, 1)])
    assert a.runs == ((1, 5), (2, 1))
    assert a.length == 6
    assert a == node(3, [1, 1, 1, 1, 1, 2])


def test_parse_format_roundtrip():
    for text in ("e", "", "0", "120", "0011"):
        nd = parse_node(3, text)
        assert format_node(nd) == (text if text else "e")
        assert parse_node(3, format_node(nd)) == nd


def test_letter_access_and_slicing():
    a = parse_node(4, "0123012")
    assert [a.letter_at(i) for i in range(7)] == [0, 1, 2, 3, 0, 1, 2]
    assert a.prefix(3) == parse_node(4, "012")
    assert a.suffix_from(3) == parse_node(4, "3012")
    assert a.suffix_after(parse_node(4, "01")) == parse_node(4, "23012")
    with pytest.raises(NotBelow):
        a.suffix_after(parse_node(4, "1"))
    with pytest.raises(IndexError):
        a.letter_at(7)


def test_concat_extend_repeat():
    a = parse_node(2, "01")
    assert a.concat(parse_node(2, "10")) == parse_node(2, "0110")
    assert a.extend(1, 3) == parse_node(2, "01111")
    assert a.repeat(3) == parse_node(2, "010101")
    assert empty_node(2).repeat(5) == empty_node(2)
    with pytest.raises(AlphabetMismatch):
        a.concat(parse_node(3, "2"))


def test_prefix_relation():
    a = parse_node(2, "0010")
    assert parse_node(2, "001").is_prefix_of(a)
    assert parse_node(2, "00").is_prefix_of(a)
    assert not parse_node(2, "01").is_prefix_of(a)
    assert a.is_prefix_of(a)
    assert not a.strictly_below(a)
    assert parse_node(2, "0").strictly_below(a)


def test_big_counts_stay_cheap():
    # Witness words later in the suite reach lengths near 2**513; every
    # structural operation must work on runs without expanding them.
    big = node_from_runs(3, [(0, 2**513), (2, 1)])
    other = node_from_runs(3, [(0, 2**513), (1, 7)])
    assert big.length == 2**513 + 1
    assert meet(big, other).length == 2**513
    assert prec_compare(big, other) == -1
    assert big.letter_at(2**513) == 2
    with pytest.raises(ScaleLimit):
        big.letters


# ---------------------------------------------------------------------------
# the well order


def test_prec_is_length_then_lexicographic():
    a, b, c = parse_node(3, "001"), parse_node(3, "020"), parse_node(3, "12")
    assert prec_compare(c, a) == -1  # shorter first
    assert prec_compare(a, b) == -1  # 001 before 020
    assert prec_compare(a, a) == 0
    # the runs tuples compare the other way round; ordering must not use them
    assert a.runs > b.runs


@given(st.integers(2, 4).flatmap(lambda n: pair_strategy(n)))
def test_prec_matches_weight_order(pair):
    s, t = pair
    cmp = prec_compare(s, t)
    key_s, key_t = (s.length, weight(s)), (t.length, weight(t))
    assert cmp == (key_s > key_t) - (key_s < key_t)


@given(st.integers(2, 3).flatmap(lambda n: st.tuples(
    letters_strategy(n), letters_strategy(n), letters_strategy(n)
).map(lambda t: (node(n, t[0]), node(n, t[1]), node(n, t[2])))))
def test_prec_total_order_laws(triple):
    a, b, c = triple
    assert prec_compare(a, b) == -prec_compare(b, a)
    assert (prec_compare(a, b) == 0) == (a == b)
    if prec_compare(a, b) <= 0 and prec_compare(b, c) <= 0:
        assert prec_compare(a, c) <= 0


def test_prec_sorted_deduplicates_nothing_and_orders():
    nodes = [parse_node(2, w) for w in ("10", "e", "0", "010", "1", "00")]
    got = [format_node(x) for x in prec_sorted(nodes)]
    assert got == ["e", "0", "1", "00", "10", "010"]


# ---------------------------------------------------------------------------
# meets


@given(st.integers(2, 4).flatmap(lambda n: pair_strategy(n)))
def test_meet_is_longest_common_prefix(pair):
    s, t = pair
    m = meet(s, t)
    assert m.is_prefix_of(s) and m.is_prefix_of(t)
    if m.length < s.length and m.length < t.length:
        assert s.letter_at(m.length) != t.letter_at(m.length)
    assert meet(t, s) == m
    assert meet(s, s) == s


# ---------------------------------------------------------------------------
# record histories


def test_record_history_worked_examples():
    h = record_history(parse_node(3, "e"), parse_node(3, "1020"))
    assert [format_node(x) for x in h.nodes] == ["e", "10", "1020"]
    assert h.records == (1, 2)
    h.check()

    h = record_history(parse_node(2, "1"), parse_node(2, "101"))
    assert [format_node(x) for x in h.nodes] == ["1", "10", "101"]
    assert h.records == (0, 1)
    h.check()


def test_record_history_restarts_at_the_lower_node():
    # climbing from 2 only sees the suffix 01; the 2 below is irrelevant
    h = record_history(parse_node(3, "2"), parse_node(3, "201"))
    assert h.records == (0, 1)
    assert [format_node(x) for x in h.nodes] == ["2", "20", "201"]


def test_record_history_on_giant_runs():
    t = empty_node(3)
    s = node_from_runs(3, [(0, 2**100), (1, 2**200), (2, 1)])
    h = record_history(t, s)
    assert h.records == (0, 1, 2)
    assert [x.length for x in h.nodes] == [0, 2**100, 2**100 + 2**200, s.length]


@given(st.integers(2, 4).flatmap(lambda n: pair_strategy(n)))
def test_record_history_invariants(pair):
    t, s = pair
    if not t.strictly_below(s):
        s = t.concat(s).extend(0)
    h = record_history(t, s)
    h.check()
    assert h.nodes[0] == t and h.nodes[-1] == s
    assert h.records[0] == first_move(t, s)
    assert list(h.records) == sorted(set(h.records))


# ---------------------------------------------------------------------------
# closures


def naive_meet_closure(nodes):
    cur = set(nodes)
    while True:
        nxt = cur | {meet(a, b) for a in cur for b in cur}
        if nxt == cur:
            return cur
        cur = nxt


@settings(max_examples=60)
@given(st.integers(2, 3), st.integers(1, 5), st.integers(0, 10_000))
def test_meet_closure_matches_fixpoint(alphabet, size, seed):
    rng = random.Random(seed)
    a = random_node_set(rng, alphabet, size)
    got = set(meet_closure(a).nodes)
    assert got == naive_meet_closure(a.nodes)
    assert got >= set(a.nodes)
    # closing again adds nothing
    assert set(meet_closure(meet_closure(a)).nodes) == got


def test_record_closure_worked_example():
    a = node_set(3, ["e", "1020"])
    assert [format_node(x) for x in a.record_closure_nodes] == ["e", "10", "1020"]


@settings(max_examples=60)
@given(st.integers(2, 3), st.integers(1, 4), st.integers(0, 10_000))
def test_record_closure_is_closed(alphabet, size, seed):
    rng = random.Random(seed)
    a = random_node_set(rng, alphabet, size, max_len=5)
    clo = record_closure(a)
    items = clo.sorted_nodes
    for x in items:
        for y in items:
            assert meet(x, y) in clo
            if x.strictly_below(y):
                for nd in record_history(x, y).nodes:
                    assert nd in clo
    assert set(record_closure(clo).nodes) == set(clo.nodes)
    assert set(clo.nodes) >= set(a.nodes)
    assert set(clo.nodes) >= set(meet_closure(a).nodes)


# ---------------------------------------------------------------------------
# equivalence deciders vs the exhaustive oracle


def oracle_equivalent(a, b, record):
    """Try every bijection between the closures; no positional shortcut."""
    ca = a.record_closure_nodes if record else a.meet_closure_nodes
    cb = b.record_closure_nodes if record else b.meet_closure_nodes
    if len(ca) != len(cb):
        return False
    for perm in itertools.permutations(cb):
        f = dict(zip(ca, perm))
        if {f[x] for x in a.nodes} != set(b.nodes):
            continue
        ok = True
        for x in ca:
            for y in ca:
                if f[meet(x, y)] != meet(f[x], f[y]):
                    ok = False
                elif prec_compare(x, y) != prec_compare(f[x], f[y]):
                    ok = False
                elif x.strictly_below(y):
                    if first_move(x, y) != first_move(f[x], f[y]):
                        ok = False
                    elif record and record_history(x, y).records != record_history(
                        f[x], f[y]
                    ).records:
                        ok = False
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def test_equivalence_worked_examples():
    # padding along a chain changes nothing
    assert first_move_equivalent(node_set(2, ["1", "001"]), node_set(2, ["1", "00001"]))
    # a first move is part of the structure
    assert not first_move_equivalent(node_set(2, ["0", "00"]), node_set(2, ["0", "010"]))
    # same first move, different record pattern: only the finer relation sees it
    a, b = node_set(3, ["e", "10"]), node_set(3, ["e", "12"])
    assert first_move_equivalent(a, b)
    assert not record_equivalent(a, b)
    # record positions are immaterial, the record letters are not
    assert record_equivalent(node_set(3, ["e", "102"]), node_set(3, ["e", "12"]))
    assert not record_equivalent(node_set(3, ["e", "102"]), node_set(3, ["e", "101"]))


def test_equivalence_requires_matching_membership():
    # equal record closures, different underlying sets
    a = node_set(2, ["e", "0", "01"])
    b = node_set(2, ["e", "01"])  # record closure also {e, 0, 01}
    assert set(a.record_closure_nodes) == set(b.record_closure_nodes)
    assert not record_equivalent(a, b)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 3), st.integers(1, 3), st.integers(1, 3), st.booleans(),
       st.integers(0, 10_000))
def test_decider_agrees_with_oracle(alphabet, size_a, size_b, record, seed):
    rng = random.Random(seed)
    a = random_node_set(rng, alphabet, size_a, max_len=4)
    b = random_node_set(rng, alphabet, size_b, max_len=4)
    fast = record_equivalent(a, b) if record else first_move_equivalent(a, b)
    slow = oracle_equivalent(a, b, record)
    assert bool(fast) == slow
    if fast:
        assert replay_witness(a, b, fast, record=record)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 4), st.integers(1, 5), st.booleans(), st.integers(0, 10_000))
def test_reembed_preserves_structure(alphabet, size, record, seed):
    rng = random.Random(seed)
    a = random_node_set(rng, alphabet, size)
    b = reembed(a, rng, record=record)
    res = record_equivalent(a, b) if record else first_move_equivalent(a, b)
    assert res
    assert replay_witness(a, b, res, record=record)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3), st.integers(1, 4), st.booleans(), st.integers(0, 10_000))
def test_equivalence_relation_laws(alphabet, size, record, seed):
    rng = random.Random(seed)
    a = random_node_set(rng, alphabet, size, max_len=5)
    b = reembed(a, rng, record=record)
    c = reembed(b, rng, record=record)
    rel = record_equivalent if record else first_move_equivalent
    assert rel(a, a)
    assert bool(rel(a, b)) == bool(rel(b, a))
    assert rel(a, c)  # transitivity along the reembedding chain


# ---------------------------------------------------------------------------
# literals


def test_node_set_literals():
    a = parse_node_set(2, "{1, 001, e}")
    assert format_node_set(a) == "{e,1,001}"
    assert parse_node_set(2, "{}") == node_set(2, [])
