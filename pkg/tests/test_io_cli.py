from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest
from hypothesis import given, settings

from helpers import posets
from kslab.cli import main
from kslab.io import DocumentError, PosetDocument, dumps, encode_value, load_document, poset_hash
from kslab.poset import ChainPartition, count_extensions, disjoint_chains, poset_from_relations
from kslab.qpoly import MultiPoly, QPoly


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture
def c33_file(tmp_path):
    return _write(
        tmp_path,
        "c33.json",
        {"n": 6, "relations": [[1, 2], [2, 3], [4, 5], [5, 6]], "chains": {"c1": [1, 2, 3], "c2": [4, 5, 6]}},
    )


@pytest.fixture
def pentagon_file(tmp_path):
    return _write(
        tmp_path,
        "pentagon.json",
        {"n": 5, "relations": [[1, 2], [2, 3], [4, 5], [1, 4], [5, 3]], "chains": {"c1": [1, 2, 3], "c2": [4, 5]}},
    )


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# ------------------------------------------------------------ documents


@settings(max_examples=50, deadline=None)
@given(posets(max_n=7))
def test_document_round_trip(p):
    doc = PosetDocument.of(p)
    again = PosetDocument.from_json(json.loads(json.dumps(doc.to_json())))
    assert again.to_json() == doc.to_json()
    assert again.poset() == p
    assert again.canonical().to_json() == doc.to_json()


def test_generating_set_is_closed():
    doc = PosetDocument.from_json({"n": 3, "relations": [[1, 2], [2, 3], [1, 3]]})
    assert doc.canonical().relations == [(1, 2), (2, 3)]
    assert doc.poset().less(1, 3)


def test_document_with_chains_and_labels(tmp_path):
    path = _write(
        tmp_path,
        "doc.json",
        {"n": 2, "relations": [], "chains": {"c1": [1], "c2": [2]}, "labels": {"1": "a", "2": "b"}},
    )
    doc = load_document(path)
    assert doc.partition() == ChainPartition((1,), (2,))
    assert doc.to_json()["labels"] == {"1": "a", "2": "b"}


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"relations": []},
        {"n": 2, "relations": [[1, 2], [2, 1]]},
        {"n": 2, "relations": [[1, 3]]},
        {"n": 3, "relations": [], "chains": {"c1": [1, 2]}},
        {"n": 2, "relations": [], "chains": "bad"},
        {"n": 1, "relations": [], "labels": {"4": "x"}},
    ],
)
def test_malformed_documents(data):
    with pytest.raises(DocumentError):
        PosetDocument.from_json(data)


def test_unreadable_files(tmp_path):
    with pytest.raises(DocumentError):
        load_document(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    with pytest.raises(DocumentError, match="invalid JSON"):
        load_document(bad)


def test_big_integers_are_strings():
    big = 3**80
    assert encode_value(big) == str(big)
    assert encode_value(QPoly({2: big})) == {"2": str(big)}
    assert encode_value(MultiPoly(2, {(1, 0): 5})) == {"1,0": "5"}
    assert encode_value(True) is True
    with pytest.raises(TypeError):
        encode_value(1.5)
    assert json.loads(dumps({"v": encode_value(big)}))["v"] == str(big)


def test_poset_hash_is_label_sensitive_and_stable():
    p = poset_from_relations(3, [(1, 2)])
    q = poset_from_relations(3, [(2, 3)])
    assert poset_hash(p) == poset_hash(poset_from_relations(3, [(1, 2)]))
    assert poset_hash(p) != poset_hash(q)


# ------------------------------------------------------------ stats / check


def test_stats_cross_chain_example(capsys, c33_file):
    code, out, _ = run(capsys, "stats", c33_file, "1", "6", "--q")
    assert code == 0
    rep = json.loads(out)
    assert rep["tables"]["Fq"]["1"] == {"14": "1"}
    assert rep["tables"]["Fq"]["2"] == {"13": "2"}
    assert rep["tables"]["Fq"]["3"] == {"11": "1", "12": "3"}
    assert rep["tables"]["F"]["3"] == "4"


def test_stats_chain_point_mass(capsys, tmp_path):
    path = _write(tmp_path, "chain.json", {"n": 4, "relations": [[1, 2], [2, 3], [3, 4]]})
    code, out, _ = run(capsys, "stats", path, "3")
    assert code == 0 and json.loads(out)["tables"]["N"] == {"3": "1"}


def test_stats_multivariate_total(capsys, c33_file):
    code, out, _ = run(capsys, "stats", c33_file, "2", "--mq")
    assert code == 0
    table = json.loads(out)["tables"]["Nmq"]
    assert all(len(key.split(",")) == 3 for row in table.values() for key in row)
    total = sum(int(c) for row in table.values() for c in row.values())
    assert total == count_extensions(disjoint_chains(3, 3)) == 20


def test_stats_q_needs_chains(capsys, tmp_path):
    path = _write(tmp_path, "nochains.json", {"n": 2, "relations": []})
    code, _, err = run(capsys, "stats", path, "1", "--q")
    assert code == 3 and "chain partition" in err


def test_check_q_ks_cross_chain_refused(capsys, c33_file):
    code, out, err = run(capsys, "check", c33_file, "1", "6", "--which", "q-ks")
    assert code == 3 and out == ""
    assert "refused" in err and "q^26 - q^25" in err


def test_check_same_chain_passes(capsys, c33_file):
    code, out, _ = run(capsys, "check", c33_file, "1", "3", "--which", "q-ks", "--k", "2-4")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert [row["k"] for row in rep["verdicts"]] == [2, 3, 4]


def test_check_equality_on_pentagon(capsys, pentagon_file):
    code, out, _ = run(capsys, "check", pentagon_file, "2", "--which", "equality", "--k", "3")
    rep = json.loads(out)
    assert code == 0
    assert rep["verdicts"][0]["conditions"] == {"a": True, "b": True, "c": True, "d": True, "e": True}


def test_check_stanley_on_small_posets(capsys, tmp_path):
    from kslab.generate import all_posets

    for i, p in enumerate(all_posets(4)):
        path = _write(tmp_path, f"p{i}.json", PosetDocument.of(p).to_json())
        for x in range(1, p.n + 1):
            code, out, _ = run(capsys, "check", path, str(x), "--which", "stanley")
            assert code == 0 and json.loads(out)["ok"]


def test_check_violation_exit_code(capsys, c33_file, monkeypatch):
    import kslab.cli as cli
    from kslab.stats import KVerdict

    monkeypatch.setitem(cli.CHECKS, "stanley", lambda doc, p, x, y: [KVerdict(2, False, -1)])
    code, out, _ = run(capsys, "check", c33_file, "1", "--which", "stanley")
    assert code == 2 and json.loads(out)["ok"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "{f}", "9"],
        ["check", "{f}", "x"],
        ["check", "{f}", "1", "--which", "ks"],
        ["check", "{f}", "1", "1", "--which", "ks"],
        ["check", "{f}", "1", "--k", "2-x"],
        ["stats", "{f}", "2", "2"],
        ["stats", "/nonexistent/file.json", "1"],
        ["nonsense"],
        ["check", "{f}", "1", "--which", "bogus"],
    ],
)
def test_input_errors_exit_3(capsys, c33_file, argv):
    code, _, _ = run(capsys, *[a.format(f=c33_file) for a in argv])
    assert code == 3


# ------------------------------------------------------------ scan


def test_scan_exhaustive_small(capsys):
    code, out, _ = run(capsys, "scan", "exhaustive", "--max-n", "5")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert rep["posets"] == 1 + 2 + 5 + 16 + 63
    assert "timing" not in rep


def test_scan_random_deterministic(capsys):
    args = ["scan", "random", "--n", "6", "--seed", "11", "--count", "40"]
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first == second and first[0] == 0
    other = run(capsys, "scan", "random", "--n", "6", "--seed", "12", "--count", "40")
    assert json.loads(other[1])["seed"] == 12


def test_scan_region_suite(capsys):
    code, out, _ = run(capsys, "scan", "exhaustive", "--region-ab", "3,3")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert set(rep["results"]) == {"q_kahn_saks", "stanley_equality", "kahn_saks_equality"}
    assert all(r["failures"] == 0 for r in rep["results"].values())
    assert rep["results"]["q_kahn_saks"]["regions"] == 175


def test_scan_timing_opt_in(capsys):
    code, out, _ = run(capsys, "scan", "random", "--n", "4", "--count", "3", "--timing")
    assert code == 0 and "seconds" in json.loads(out)["timing"]


@pytest.mark.parametrize(
    "argv, hint",
    [
        (["scan", "exhaustive", "--max-n", "20"], "--max-n 7"),
        (["scan", "exhaustive"], "--max-n"),
        (["scan", "exhaustive", "--region-ab", "9,9"], "--region-ab 4,4"),
        (["scan", "random", "--n", "40"], "--n 8"),
        (["scan", "random", "--n", "5", "--count", "0"], "--count"),
        (["scan", "random", "--n", "5", "--density", "2"], "density"),
    ],
)
def test_scan_bounds_refused(capsys, argv, hint):
    code, out, err = run(capsys, *argv)
    assert code == 3 and out == "" and hint in err


def test_scan_out_file(capsys, tmp_path):
    target = tmp_path / "rep.json"
    code, out, _ = run(capsys, "scan", "exhaustive", "--max-n", "3", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["posets"] == 8


def test_scan_workers_match_serial(tmp_path):
    env = dict(os.environ)
    args = [sys.executable, "-m", "kslab", "scan", "random", "--n", "6", "--seed", "3", "--count", "60"]
    serial = subprocess.run(args, capture_output=True, env=dict(env, KSLAB_WORKERS="1"), check=True).stdout
    pooled = subprocess.run(args, capture_output=True, env=dict(env, KSLAB_WORKERS="2"), check=True).stdout
    assert serial == pooled


def test_scan_bad_worker_count(capsys, monkeypatch):
    monkeypatch.setenv("KSLAB_WORKERS", "many")
    code, _, err = run(capsys, "scan", "random", "--n", "4", "--count", "2")
    assert code == 3 and "KSLAB_WORKERS" in err


# ------------------------------------------------------------ region


def test_region_full_rectangle(capsys, c33_file):
    code, out, _ = run(capsys, "region", c33_file)
    assert code == 0
    assert "EEENNN" in out and "NNNEEE" in out


def test_region_overlay(capsys, pentagon_file):
    code, out, _ = run(capsys, "region", pentagon_file, "--extension", "1,4,2,5,3")
    assert code == 0
    assert out.strip().splitlines()[-1] == "path:  ENENE"


def test_region_without_chains_uses_automatic_partition(capsys, tmp_path):
    path = _write(tmp_path, "plain.json", {"n": 3, "relations": [[1, 2], [1, 3], [2, 3]]})
    code, out, _ = run(capsys, "region", path)
    assert code == 0 and out


def test_region_single_path(capsys, tmp_path):
    path = _write(tmp_path, "chain.json", {"n": 2, "relations": [[1, 2]], "chains": {"c1": [1], "c2": [2]}})
    code, out, _ = run(capsys, "region", path)
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln.startswith(("lower", "upper"))]
    assert len(lines) == 2 and lines[0].split()[-1] == lines[1].split()[-1]


@pytest.mark.parametrize("ext", ["1,2", "1,2,3,3,4", "3,1,2,4,5", "a,b"])
def test_region_bad_extension(capsys, pentagon_file, ext):
    code, _, _ = run(capsys, "region", pentagon_file, "--extension", ext)
    assert code == 3


def test_region_refuses_width_three(capsys, tmp_path):
    path = _write(tmp_path, "wide.json", {"n": 3, "relations": []})
    code, _, err = run(capsys, "region", path)
    assert code == 3 and err
