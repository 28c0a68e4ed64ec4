import json
from math import prod

import pytest

from quadclass.classgroup import group_structure
from quadclass.errors import DomainError, ScaleLimit
from quadclass.family import build_field_spec
from quadclass.wada import (
    CONFORMING,
    COUNTEREXAMPLE,
    CYCLIC,
    classify,
    load_fixtures,
    normalize_chain,
    remaining_parts,
    scan_counterexamples,
    table2_report,
)


def test_classify_basic():
    assert classify([3]).kind == CYCLIC
    assert classify([]).kind == CYCLIC
    assert classify([20, 10, 2, 2]).kind == CONFORMING
    assert classify([6, 2]).kind == CONFORMING
    assert classify([30, 6, 3]) == classify((30, 6, 3))
    v = classify([479550, 30, 3])
    assert (v.kind, v.odd_heavy_count) == (COUNTEREXAMPLE, 3)
    assert classify([381006210618, 6, 6, 2, 2, 2]).kind == COUNTEREXAMPLE


def test_classify_accepts_structure():
    assert classify(group_structure(-11358372)).kind == CONFORMING


def test_normalize_chain():
    assert normalize_chain([6, 1, 1]) == (6,)
    with pytest.raises(DomainError):
        normalize_chain([6, 4])


def test_remaining_parts():
    assert remaining_parts([1084512, 6, 2, 2, 2, 2]) == (11, 13, 79)
    assert remaining_parts([381006210618, 6, 6, 2, 2, 2]) == (121, 211, 92119)


def test_table2_report_row_one():
    r = table2_report(build_field_spec(11, 17, 5))
    assert r.structure == (20, 10, 2, 2)
    assert r.two_parts == (2, 2, 2, 4) and r.five_parts == (5, 5)
    assert r.verdict.kind == CONFORMING
    with pytest.raises(ScaleLimit):
        table2_report(build_field_spec(11, 17, 5), compute=False)


def test_fixtures_load_and_reassemble():
    fx = load_fixtures()
    assert len(fx) == 14
    for f in fx:
        r = table2_report(f.structure)
        parts = r.two_parts + r.three_parts + r.five_parts + r.remaining
        assert prod(parts) == prod(f.structure)
    flagged = {f.row for f in fx if f.mismatches}
    assert flagged == {2, 10, 13}


def test_fixture_counterexamples():
    res = scan_counterexamples(load_fixtures())
    assert [item.row for item, _ in res.counterexamples] == [3, 10]
    assert res.examined == 14 and not res.skipped


def test_fixtures_match_computation_where_feasible():
    for f in load_fixtures():
        if abs(f.disc) <= 10**17:
            assert group_structure(f.disc).invariant_factors == f.structure, f.row


def test_bad_fixture_file(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text(json.dumps({"p": 3, "q": 5, "n": 3, "structure": [6, 4]}) + "\n")
    with pytest.raises(DomainError):
        load_fixtures(p)
    p.write_text("{not json\n")
    with pytest.raises(DomainError):
        load_fixtures(p)


def test_scan_with_pairs_and_specs():
    res = scan_counterexamples([("a", [30, 6, 3]), ("b", [6, 2])])
    assert [item[0] for item, _ in res.counterexamples] == ["a"]
    res = scan_counterexamples([build_field_spec(3, 5, 3)], classify_only=True)
    assert len(res.skipped) == 1
