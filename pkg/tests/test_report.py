import json

import numpy as np
import pytest

from crlab.report import SCHEMA, CheckRecord, VerificationReport


def test_status_and_anchor_validation():
    with pytest.raises(ValueError):
        CheckRecord("x", "", "pass", None, None)
    with pytest.raises(ValueError):
        CheckRecord("x", "plumbing", "maybe", None, None)


def test_add_and_passed():
    rep = VerificationReport("demo")
    rep.add("a", "plumbing", True, 0.5)
    rep.add("b", "plumbing", None)
    assert rep.passed and rep.failures == []
    rep.add("c", "plumbing", False, -1.0)
    assert not rep.passed and [c.id for c in rep.failures] == ["c"]
    assert rep.get("b").status == "skip"
    with pytest.raises(KeyError):
        rep.get("zzz")


def test_json_payload_types():
    rep = VerificationReport("demo", config={"seed": 3, "arr": np.arange(3)})
    rep.add("a", "plumbing", True, np.float64(1e-3),
            {"z": 1 + 2j, "v": np.array([1j, 2]), "nan": float("nan")})
    d = json.loads(rep.to_json())
    assert d["schema"] == SCHEMA == "crlab/1"
    assert d["config"]["arr"] == [0, 1, 2]
    w = d["checks"][0]["witness"]
    assert w["z"] == {"re": 1.0, "im": 2.0}
    assert w["v"][0] == {"re": 0.0, "im": 1.0}
    assert set(d) == {"schema", "suite", "passed", "config", "checks", "wall_time"}


def test_extend_prefixes_ids():
    a, b = VerificationReport("a"), VerificationReport("b")
    b.add("x", "plumbing", True)
    a.extend(b, prefix="b/")
    assert a.checks[0].id == "b/x"


def test_summary_lines():
    rep = VerificationReport("demo")
    rep.add("a", "plumbing", False, 2.0)
    assert rep.summary_lines() == ["[FAIL] a  margin=2.0"]
