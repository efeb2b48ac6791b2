"""Acceptance criteria, one test per check.

Each test prints its ``[PASS]``/``[FAIL]`` line; ``test_report`` prints the
whole table at once.
"""

import json
from functools import lru_cache

import pytest

from fockladder.acceptance import CRITERIA, dump_report, format_report, run_acceptance


@lru_cache(maxsize=None)
def checks_for(criterion):
    return tuple(CRITERIA[criterion]())


def _ids():
    out = []
    for cid in sorted(CRITERIA):
        out += [(cid, i) for i in range(len(checks_for(cid)))]
    return out


@pytest.mark.parametrize("cid,idx", _ids(), ids=lambda v: str(v))
def test_criterion(cid, idx, capsys):
    check = checks_for(cid)[idx]
    with capsys.disabled():
        print("\n" + check.line())
    assert check.passed, check.line()


def test_every_criterion_has_checks():
    assert sorted(CRITERIA) == list(range(1, 11))
    assert all(checks_for(c) for c in CRITERIA)


def test_report(capsys):
    report = run_acceptance()
    with capsys.disabled():
        print("\n" + format_report(report))
    doc = json.loads(dump_report(report))
    assert set(doc) >= {"passed", "elapsed_s", "checks"}
    for c in doc["checks"]:
        assert set(c) >= {"criterion", "name", "measured", "bound", "passed"}
    assert doc["elapsed_s"] < 60
    assert len(doc["checks"]) == sum(len(checks_for(c)) for c in CRITERIA)
