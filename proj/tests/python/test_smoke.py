"""Smoke tests for the python bindings."""

import json
import os

import pytest

moka = pytest.importorskip("moka")

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "..", "fixtures")


def fixture(name: str) -> str:
    return os.path.join(FIXTURES, name)


def read(name: str) -> str:
    with open(fixture(name)) as fh:
        return fh.read()


def test_encode():
    assert moka.encode("AG !rd", "actl") == "push; next*; rd?; pop"
    assert moka.encode("true", "pdl") == "0"


def test_check_traffic_light():
    light = read("light.json")
    assert moka.check(light, "AG !rd", "actl", ["rs"]) == []
    cex = moka.check(light, "AG !gd", "actl", ["rs"])
    assert "rs" in cex


def test_check_agrees_with_oracle():
    light = read("light.json")
    for formula in ["AG !rd", "AF d", "A[s U d]", "AG (g -> AX d)"]:
        sat = set(moka.oracle(light, formula, "actl"))
        cex = set(moka.check(light, formula, "actl"))
        everything = {"rs", "gs", "ys", "rd", "gd", "yd"}
        assert cex == everything - sat


def test_run_abstract_alarm():
    code, report = moka.run(
        {
            "subcommand": "abstract",
            "ts": fixture("light.json"),
            "domain": fixture("figure1.json"),
            "equiv": "total",
            "formula": "AG (g -> AX d)",
            "init": "rs",
        }
    )
    assert code == 2
    data = json.loads(report)
    assert data["verdict"] == "alarm"
    assert data["candidates"] == ["rs", "ys"]


def test_run_repair_loop():
    code, report = moka.run(
        {
            "subcommand": "repair-loop",
            "ts": fixture("light.json"),
            "domain": fixture("figure1.json"),
            "equiv": "total",
            "formula": "AG (g -> AX d)",
            "init": "rs",
        }
    )
    assert code == 0
    data = json.loads(report)
    assert data["verdict"] == "proved"
    assert data["repairs"] == 1
    assert sorted(data["added_elements"]) == [["gd"], ["gs", "gd"]]


def test_roundtrip():
    light = read("light.json")
    once = moka.ts_roundtrip(light)
    assert moka.ts_roundtrip(once) == once
