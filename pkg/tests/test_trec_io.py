"""Parsing, canonical ordering and round-trip serialization."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuseval.errors import (
    DuplicateDocument,
    DuplicateJudgment,
    MalformedLine,
    RunTagMismatch,
)
from fuseval.trec_io import parse_qrels, parse_run, write_run

from conftest import random_run


def test_single_line():
    run = parse_run("401 Q0 FT911-1 1 8.73 runA\n")
    assert run.run_tag == "runA"
    assert run.lists == {"401": [("FT911-1", 8.73)]}


def test_wrong_field_count():
    with pytest.raises(MalformedLine) as exc:
        parse_run("401 Q0 d1 1 8.73\n")
    assert exc.value.line_no == 1


def test_score_tie_broken_by_doc_id_descending():
    run = parse_run("401 Q0 A 1 1.0 r\n401 Q0 B 2 1.0 r\n")
    assert [d for d, _ in run.lists["401"]] == ["B", "A"]


def test_rank_column_ignored_for_ordering():
    run = parse_run("401 Q0 low 1 1.0 r\n401 Q0 high 2 9.0 r\n")
    assert [d for d, _ in run.lists["401"]] == ["high", "low"]


def test_duplicate_document_rejected():
    with pytest.raises(DuplicateDocument):
        parse_run("401 Q0 d1 1 2.0 r\n401 Q0 d1 2 1.0 r\n")


def test_run_tag_mismatch():
    with pytest.raises(RunTagMismatch):
        parse_run("401 Q0 d1 1 2.0 r1\n401 Q0 d2 2 1.0 r2\n")


def test_empty_input_gives_empty_run():
    run = parse_run("")
    assert run.lists == {}
    assert run.run_tag == ""


def test_q0_case_insensitive():
    run = parse_run("401 q0 d1 1 2.0 r\n")
    assert run.lists["401"] == [("d1", 2.0)]


def test_unparseable_score():
    with pytest.raises(MalformedLine):
        parse_run("401 Q0 d1 1 abc r\n")


def test_nonfinite_score_rejected():
    with pytest.raises(MalformedLine):
        parse_run("401 Q0 d1 1 nan r\n")
    with pytest.raises(MalformedLine):
        parse_run("401 Q0 d1 1 inf r\n")


def test_topic_cap_enforced():
    lines = [f"401 Q0 d{i} {i} {1000-i} r" for i in range(11)]
    with pytest.raises(MalformedLine):
        parse_run("\n".join(lines), max_per_topic=10)
    parse_run("\n".join(lines), max_per_topic=None)


def test_full_scale_file_parses():
    # 50 topics x 10,000 entries: the stated maximum run size
    lines = []
    for t in range(50):
        for i in range(10_000):
            lines.append(f"{400+t} Q0 doc{i} {i+1} {10_000-i} big")
    run = parse_run("\n".join(lines))
    assert len(run.lists) == 50
    assert all(len(v) == 10_000 for v in run.lists.values())


def test_write_run_format():
    from conftest import make_run

    run = make_run("f", {"401": [("d1", 1.0)]})
    assert write_run(run) == "401 Q0 d1 1 1.00000 f\n"


def test_write_empty_run():
    from conftest import make_run

    assert write_run(make_run("f", {})) == ""


def test_round_trip_random_run():
    rng = random.Random(7)
    run = random_run(rng, "rt", ["1", "2", "3"])
    assert parse_run(write_run(run), max_per_topic=None) == run


def test_parse_is_order_insensitive():
    rng = random.Random(11)
    run = random_run(rng, "shuf", ["1", "2"])
    text = write_run(run)
    lines = text.strip().split("\n")
    rng.shuffle(lines)
    assert parse_run("\n".join(lines)) == run


@settings(max_examples=60)
@given(
    entries=st.lists(
        st.tuples(
            st.text(alphabet="abcdef", min_size=1, max_size=4),
            st.integers(min_value=-1000, max_value=1000),
        ),
        min_size=0,
        max_size=30,
        unique_by=lambda e: e[0],
    )
)
def test_round_trip_property(entries):
    from conftest import make_run

    run = make_run("p", {"1": [(d, float(s)) for d, s in entries]} if entries else {})
    parsed = parse_run(write_run(run), max_per_topic=None)
    # an empty run serializes to empty text, which cannot carry the tag
    assert parsed.lists == run.lists
    if entries:
        assert parsed == run


def test_canonical_order_is_total():
    rng = random.Random(3)
    run = random_run(rng, "t", ["1"])
    docs = [d for d, _ in run.lists["1"]]
    assert len(set(docs)) == len(docs)
    entries = run.lists["1"]
    for (d1, s1), (d2, s2) in zip(entries, entries[1:]):
        assert (s1, d1) > (s2, d2)


def test_qrels_basic():
    q = parse_qrels("401 0 FT911-1 1\n")
    assert q.judgments["401"]["FT911-1"] == 1


def test_qrels_conflicting_duplicate():
    with pytest.raises(DuplicateJudgment):
        parse_qrels("401 0 d1 1\n401 0 d1 2\n")


def test_qrels_identical_duplicate_silent():
    q = parse_qrels("401 0 d1 1\n401 0 d1 1\n")
    assert q.judgments["401"]["d1"] == 1


def test_qrels_negative_grade_clamped():
    q = parse_qrels("401 0 d1 -2\n")
    assert q.judgments["401"]["d1"] == 0
    assert q.negative_clamped == 1


def test_qrels_malformed():
    with pytest.raises(MalformedLine):
        parse_qrels("401 0 d1\n")
    with pytest.raises(MalformedLine):
        parse_qrels("401 0 d1 x\n")
