import json

import pytest

from dmm.cli import config_from_json, main


def test_costs_table(capsys, tmp_path):
    out_csv = tmp_path / "so.csv"
    assert main(["costs", "--preset", "so", "--csv", str(out_csv)]) == 0
    text = capsys.readouterr().out
    assert "25.1 MB" in text and "2.13 TB" in text
    lines = out_csv.read_text().splitlines()
    assert lines[0].startswith("dataset,mechanism") and len(lines) == 3


def test_costs_single_mechanism(capsys):
    main(["costs", "--preset", "femnist", "--mechanism", "honaker"])
    text = capsys.readouterr().out
    assert "5.73 MB" in text and "optimal" not in text


def test_accountant_json(capsys):
    main(["accountant", "--preset", "femnist", "--iterations", "64", "--epsilon", "2", "8", "--json"])
    rows = json.loads(capsys.readouterr().out)
    assert [r["target"] for r in rows] == [2.0, 8.0]
    for r in rows:
        assert r["eps_cdp"] <= r["target"]
        assert r["gamma"] > 0 and r["sigma"] > 0
    assert rows[0]["sigma"] > rows[1]["sigma"]


def test_accountant_text_and_explicit_sensitivity(capsys):
    main(["accountant", "--mechanism", "optimal", "--iterations", "64", "--sensitivity", "3.0", "--epsilon", "4"])
    text = capsys.readouterr().out
    assert "sensitivity 3" in text


def test_accountant_optimal_needs_matrix():
    with pytest.raises(SystemExit):
        main(["accountant", "--mechanism", "optimal", "--iterations", "64"])


def test_run_config(tmp_path, capsys):
    cfg = {
        "committee_size": 16,
        "t_c": 3,
        "t_d": 2,
        "mu": "1/6",
        "iterations": 4,
        "dimension": 10,
        "field": {"modulus": 4294967291},
        "noise_scale": 0.01,
        "factorization": {"preset": "honaker"},
        "adversary": {"dropouts": {"2": {"5": 2}}},
        "seed": 3,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    trans = tmp_path / "t.jsonl"
    assert main(["run", str(path), "--transcript", str(trans)]) == 0
    recs = [json.loads(l) for l in trans.read_text().splitlines()]
    assert len(recs) == 4
    assert "final prefix-sum error" in capsys.readouterr().out


def test_config_rejects_unknown_factorization():
    with pytest.raises(ValueError):
        config_from_json({"committee_size": 16, "t_c": 3, "t_d": 2, "mu": "1/6", "iterations": 4,
                          "dimension": 4, "factorization": {"preset": "banded"}})
