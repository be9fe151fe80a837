"""Breaking-layer tests: witness search, revalidation, audits, J function.

Expected values were produced by probing oracles in a scratch harness before
this suite was written, then frozen here; search order is deterministic, so
witness identities are exact expectations, not regressions of convenience.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adicgaps.breaking import (
    AUDIT_CAVEAT,
    BROKEN_WITNESSED,
    DEFAULT_BREAK_BUDGET,
    NOT_BROKEN_BOUNDED,
    BreakBudget,
    BreakQuery,
    break_check,
    eight_type_gap,
    j_function,
    jbreak_optimality_check,
    jigsaw_audit,
    preservation_lemma_check,
    record_three_gap,
    revalidate_break,
    two_break_audit,
)
from adicgaps.gaps import (
    FIRST_MOVE,
    RECORD,
    GapSpec,
    critical_record_gap,
    critical_strong_gap,
    enumerate_candidates_record,
    max_partition_gap,
)
from adicgaps.runtime import canonical_json
from adicgaps.tree import ScaleLimit
from adicgaps.types import enumerate_types, parse_type, print_type

DELTA = record_three_gap()


def query(gap, sides, budget=DEFAULT_BREAK_BUDGET):
    return BreakQuery(gap, frozenset(sides), budget)


class TestBreakQuery:
    def test_rejects_first_move_layer(self):
        with pytest.raises(ValueError, match="record-layer"):
            query(critical_strong_gap(2), {0})

    def test_rejects_empty_side_set(self):
        with pytest.raises(ValueError, match="nonempty"):
            query(DELTA, set())

    def test_rejects_out_of_range_indices(self):
        with pytest.raises(ValueError, match="subset"):
            query(DELTA, {0, 3})

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            BreakBudget(substitution_blocks=0)
        with pytest.raises(ValueError):
            BreakBudget(efamily_letters=-1)

    def test_budget_json_echo(self):
        data = DEFAULT_BREAK_BUDGET.as_json()
        assert data["substitution_blocks"] == 3
        assert data["efamily_letters"] == 12
        assert data["probe"]["domain_depth"] == 40


class TestBreakCheckOnThreeGap:
    """The canonical partial-breaking instance, side by side with its table."""

    def test_single_side_witnesses(self):
        for side, kind, label in [
            (0, "subalphabet", "iota=0"),
            (1, "subalphabet", "iota=1"),
            (2, "substitution", "blocks=01"),
        ]:
            report = break_check(query(DELTA, {side}))
            assert report.verdict == BROKEN_WITNESSED
            assert (report.witness.kind, report.witness.label) == (kind, label)
            assert revalidate_break(report)

    def test_pair_with_two_record_side_breaks(self):
        report = break_check(query(DELTA, {0, 2}))
        assert report.verdict == BROKEN_WITNESSED
        assert report.witness.kind == "substitution"
        assert report.witness.label == "blocks=00,010"
        assert revalidate_break(report)

    def test_other_pair_with_two_record_side_breaks(self):
        report = break_check(query(DELTA, {1, 2}))
        assert report.verdict == BROKEN_WITNESSED
        assert report.witness.label == "blocks=01,10"
        assert revalidate_break(report)

    def test_chain_pair_is_not_broken_within_budget(self):
        report = break_check(query(DELTA, {0, 1}))
        assert report.verdict == NOT_BROKEN_BOUNDED
        assert report.witness is None
        assert report.searched == 86  # the full dyadic candidate pool
        assert not report
        assert not revalidate_break(report)

    def test_all_sides_break_via_identity_inclusion(self):
        report = break_check(query(DELTA, {0, 1, 2}))
        assert report.witness.kind == "subalphabet"
        assert report.witness.label == "iota=0,1"

    def test_witness_range_meets_exactly_the_requested_sides(self):
        report = break_check(query(DELTA, {0, 2}))
        rng = report.witness.range_types
        for i in range(DELTA.n):
            assert bool(rng & DELTA.sides[i]) == (i in {0, 2})

    def test_pair_witness_action_table(self):
        report = break_check(query(DELTA, {1, 2}))
        action = {print_type(a): print_type(b) for a, b in report.witness.action}
        assert action["[l0]"] == "[l0 l1]"
        assert action["[l1]"] == "[l1]"

    def test_report_json_shape(self):
        report = break_check(query(DELTA, {0, 2}))
        data = report.as_dict()
        assert data["verdict"] == BROKEN_WITNESSED
        assert data["broken_sides"] == [0, 2]
        assert data["witness"]["action"]["[l0]"] == "[l0]"
        assert "embedding" in data["witness"]
        assert data["budget"]["probe"]["domain_depth"] == 40
        assert data["gap"] == DELTA.to_json()

    def test_determinism_byte_identical(self):
        first = break_check(query(DELTA, {0, 2})).as_dict()
        second = break_check(query(DELTA, {0, 2})).as_dict()
        assert canonical_json(first) == canonical_json(second)


class TestRevalidation:
    def test_tampered_witness_fails(self):
        report = break_check(query(DELTA, {0, 2}))
        witness = report.witness
        flipped = tuple((a, b) for a, b in reversed(witness.action))
        tampered = type(report)(
            gap=report.gap,
            broken_sides=report.broken_sides,
            verdict=report.verdict,
            witness=type(witness)(
                kind=witness.kind,
                label=witness.label,
                domain_alphabet=witness.domain_alphabet,
                action=flipped,
                payload=witness.payload,
            ),
            searched=report.searched,
            budget=report.budget,
        )
        assert not revalidate_break(tampered)

    def test_every_broken_verdict_in_the_audit_revalidates(self):
        audit = jigsaw_audit(DELTA)
        for _, report in audit.entries:
            if report:
                assert revalidate_break(report)


class TestJigsawAudit:
    def test_three_gap_table(self):
        audit = jigsaw_audit(DELTA)
        assert audit.broken_sets == (
            (0,),
            (1,),
            (2,),
            (0, 2),
            (1, 2),
            (0, 1, 2),
        )
        assert not audit.fully_broken
        assert audit.note == AUDIT_CAVEAT

    def test_critical_gap_breaks_everywhere_by_subalphabets(self):
        audit = jigsaw_audit(critical_record_gap(3))
        assert audit.fully_broken
        assert len(audit.entries) == 7
        for b, report in audit.entries:
            assert report.witness.kind == "subalphabet"
            assert report.witness.label == "iota=" + ",".join(map(str, b))

    def test_max_partition_gap_breaks_everywhere(self):
        audit = jigsaw_audit(max_partition_gap(3))
        assert audit.fully_broken
        assert all(r.witness.kind == "subalphabet" for _, r in audit.entries)

    def test_csv_table(self):
        text = jigsaw_audit(DELTA).to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "B,verdict,witness_kind,witness_label,searched"
        assert len(lines) == 8
        assert '"0;1",NOT_BROKEN_bounded,,"",86' in lines
        assert any(line.startswith('"0;2",BROKEN_witnessed,substitution')
                   for line in lines)

    def test_audit_json_carries_note_and_reports(self):
        data = jigsaw_audit(DELTA).as_dict()
        assert data["note"] == AUDIT_CAVEAT
        assert len(data["entries"]) == 7
        assert data["entries"][3]["broken_sides"] == [0, 1]
        assert data["entries"][3]["report"]["verdict"] == NOT_BROKEN_BOUNDED


class TestPreservationLemma:
    def test_no_violations_and_known_premise_holders(self):
        report = preservation_lemma_check()
        assert report.holds
        assert report.violations == ()
        assert report.checked == 68
        assert len(report.premise_holders) == 11
        assert "subalphabet:iota=0,1" in report.premise_holders
        assert "substitution:blocks=00,10" in report.premise_holders

    def test_reduction_map_fails_the_premise(self):
        report = preservation_lemma_check()
        assert report.reduction_map["admissible"]
        assert report.reduction_map["premise_holds"] is False
        assert report.reduction_map["chain0_image"] == "[l0 l1]"

    def test_json_shape(self):
        data = preservation_lemma_check().as_dict()
        assert data["holds"] is True
        assert data["violations"] == []


class TestJFunction:
    def test_counts(self):
        assert j_function(1) == 1
        assert j_function(2) == 8
        assert j_function(3) == 61
        assert j_function(4) == 480

    def test_scale_guard(self):
        with pytest.raises(ScaleLimit):
            j_function(5)
        with pytest.raises(ScaleLimit):
            j_function(0)


class TestOptimality:
    def test_no_counterexamples(self):
        report = jbreak_optimality_check()
        assert report.holds
        assert report.counterexamples == ()
        assert report.checked == 86
        assert len(report.qualifying) == 11
        assert "subalphabet:iota=0,1" in report.qualifying

    def test_gap_is_the_eight_type_gap(self):
        report = jbreak_optimality_check()
        assert report.gap.n == 8
        assert report.gap == eight_type_gap()
        sides = [next(iter(side)) for side in report.gap.sides]
        assert sides == list(enumerate_types(2))

    def test_note_flags_the_bounded_quantifier(self):
        assert jbreak_optimality_check().note == AUDIT_CAVEAT


class TestTwoBreakAudit:
    def test_every_candidate_breaks_at_a_pair(self):
        audit = two_break_audit()
        assert audit.checked == 1458
        assert audit.failures == ()
        assert audit.holds

    def test_named_desk_instances(self):
        named = dict(two_break_audit().named)
        assert named["critical_record_gap(3)"] == ((0, 1), (0, 2), (1, 2))
        assert named["record_three_gap"] == ((0, 2), (1, 2))
        assert named["max_partition_gap(3)"] == ((0, 1), (0, 2), (1, 2))

    def test_json_shape(self):
        data = two_break_audit().as_dict()
        assert data["holds"] is True
        assert data["failures"] == []
        assert data["named"]["record_three_gap"] == [[0, 2], [1, 2]]


class TestProperties:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=1457))
    def test_two_sided_candidates_break_at_full_pair(self, index):
        gap = enumerate_candidates_record(2)[index]
        report = break_check(query(gap, {0, 1}))
        assert report.verdict == BROKEN_WITNESSED
        # The full-alphabet inclusion realises every type, so it always
        # validates a query with no avoid sides; nothing earlier can meet
        # two disjoint sides with a single-type range.
        assert report.witness.label == "iota=0,1"
        assert revalidate_break(report)

    @settings(max_examples=20, deadline=None)
    @given(st.sampled_from([(0,), (1,), (2,), (0, 2), (1, 2), (0, 1, 2)]))
    def test_broken_verdicts_meet_exactly_the_requested_sides(self, sides):
        report = break_check(query(DELTA, set(sides)))
        assert report.verdict == BROKEN_WITNESSED
        rng = report.witness.range_types
        for i in range(DELTA.n):
            assert bool(rng & DELTA.sides[i]) == (i in sides)

    def test_breaking_is_not_monotone_in_the_side_set(self):
        assert break_check(query(DELTA, {0, 2}))
        assert break_check(query(DELTA, {0, 1, 2}))
        assert not break_check(query(DELTA, {0, 1}))
