import io
import json
import shutil
import subprocess

import pytest

from beauville.cli import catalog, parse_catalog_range, run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, json.loads(buf.getvalue())


def test_psl2_command():
    code, doc = call("psl2", "7")
    assert code == 0
    assert doc["type"] == [[4, 4, 4], [7, 7, 7]] and doc["verified"] is True
    code, doc = call("psl2", "5")
    assert code == 3 and doc["exists"] is False


def test_search_command():
    code, doc = call("search", "psl2:7")
    assert code == 0 and doc["type"] == [[4, 4, 4], [7, 7, 7]]
    code, doc = call("search", "psl2:5", "--exhaustive")
    assert code == 3 and doc["exists"] is False
    code, doc = call("search", "an:5", "--budget", "200", "--seed", "1")
    assert code == 4 and doc["exists"] is None
    code, doc = call("search", "ab2:5", "--type1", "5,5,5", "--type2", "5,5,5")
    assert code == 0 and doc["verified"] is True


def test_invariants_command():
    code, doc = call("invariants", "--order", "25", "--type1", "5,5,5", "--type2", "5,5,5")
    assert code == 0
    assert doc == {"g1": 6, "g2": 6, "chi": 1, "K2": 8, "e": 4, "q": 0, "pg": 0}


def test_census_command():
    code, doc = call("census", "sn:3", "--type", "2,2,2")
    assert code == 0 and (doc["pairs"], doc["epi_pairs"]) == (10, 0)


def test_hunt_command():
    code, doc = call("hunt", "7", "11")
    assert code == 0 and doc["primes"][0]["p"] == 43 and doc["primes"][0]["verified"] is True
    code, doc = call("hunt", "6", "10")
    assert code == 2 and doc["error"]["type"] == "BadInput"


def test_an_command():
    code, doc = call("an", "104", "--type1", "3,3,4", "--type2", "5,5,5", "--min-degree-factor", "20")
    assert code == 0 and doc["group"] == "an:104" and doc["verified"] is True
    assert doc["selection"]["n"] == 104
    code, doc = call("an", "104", "--type1", "3,3,4", "--type2", "5,5,5")
    assert code == 2 and doc["error"]["type"] == "DegreeTooSmall"


@pytest.mark.parametrize("argv", [[], ["search"], ["psl2", "x"], ["search", "psl2:7", "--type1", "4,4,4"],
                                  ["invariants", "--order", "25", "--type1", "5,a,5", "--type2", "5,5,5"],
                                  ["search", "zz:3"], ["census", "sn:3", "--type", "2,2"]])
def test_usage_errors(argv):
    code, doc = call(*argv)
    assert code == 2 and "error" in doc


def test_verify_round_trip(tmp_path):
    for argv in (["psl2", "8"], ["search", "ab2:7"], ["search", "sn:5"]):
        code, doc = call(*argv)
        assert code == 0
        path = tmp_path / "s.json"
        path.write_text(json.dumps(doc))
        code, rep = call("verify", doc["group"], "--structure", str(path))
        assert code == 0 and rep["valid"] is True
    doc["T1"]["elements"][0] = doc["T2"]["elements"][0]
    path.write_text(json.dumps(doc))
    code, rep = call("verify", doc["group"], "--structure", str(path))
    assert code == 3 and rep["valid"] is False


def test_verify_bad_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, doc = call("verify", "psl2:7", "--structure", str(path))
    assert code == 2


def test_catalog_ranges():
    assert parse_catalog_range("psl2:[7..10]") == ("psl2", [7, 8, 9, 10])
    assert parse_catalog_range("ab2:[2,5,7]") == ("ab2", [2, 5, 7])
    assert parse_catalog_range("an:6") == ("an", [6])


def test_catalog_psl2():
    entries = catalog("psl2:[7..32]")
    assert [int(e["group"].split(":")[1]) for e in entries] == [7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]
    assert all(e["structure"]["verified"] is True for e in entries)
    for e in entries:
        inv = e["structure"]["invariants"]
        assert inv["K2"] == 8 * inv["chi"] and inv["e"] == 4 * inv["chi"]


def test_catalog_small_families(monkeypatch):
    monkeypatch.setenv("BEAUVILLE_WORKERS", "2")
    code, entries = call("catalog", "ab2:[2..7]", "an:[5..9]")
    assert code == 0
    assert [e["group"] for e in entries] == ["ab2:5", "ab2:7", "an:6", "an:7", "an:8", "an:9"]
    assert {e["provenance"] for e in entries} == {"searched"}


@pytest.mark.skipif(shutil.which("beauville") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["beauville", "search", "psl2:5", "--exhaustive"], capture_output=True, text=True)
    assert proc.returncode == 3
    assert json.loads(proc.stdout)["exists"] is False
