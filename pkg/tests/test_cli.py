import json
import subprocess
import sys

import pytest

from tihsim import cli


def run(*args, env=None):
    return subprocess.run([sys.executable, "-m", "tihsim", *args], capture_output=True,
                          text=True, env=env)


def test_closed_form_output(capsys):
    assert cli.main(["spectral", "closed-form", "--L", "8", "--digits", "12"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == "0.060307379214"


def test_clock_report(capsys):
    assert cli.main(["clock", "graph", "--N", "5", "--T", "0", "--report"]) == 0
    assert json.loads(capsys.readouterr().out)["cycle_length"] == 84


def test_extract(capsys, tmp_path):
    assert cli.main(["ged", "extract", "--instance", "toy-m1.json", "--x", "2",
                     "--cache-dir", str(tmp_path)]) == 0
    assert json.loads(capsys.readouterr().out)["recovered_f"] == 0


def test_unknown_flag_prints_usage():
    r = run("spectral", "closed-form", "--L", "8", "--frobnicate")
    assert r.returncode != 0
    assert "usage:" in r.stderr


def test_errors_exit_nonzero():
    r = run("clock", "graph", "--N", "12")
    assert r.returncode == 1 and "error" in r.stderr


def test_json_out_manifest(tmp_path, capsys):
    out = tmp_path / "r.json"
    cli.main(["tm", "nofx", "--x", "0101", "--json-out", str(out)])
    doc = json.loads(out.read_text())
    assert doc["manifest"]["subcommand"] == "tm nofx"
    assert doc["result"]["N"] == 45
    assert set(doc["manifest"]["versions"]) == {"artifact", "numpy", "scipy"}


def test_cache_env_and_reuse(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("TIHSIM_CACHE", str(tmp_path))
    cli.main(["ged", "alpha0", "--instance", "toy-m2"])
    first = json.loads(capsys.readouterr().out)
    cli.main(["ged", "alpha0", "--instance", "toy-m2"])
    second = json.loads(capsys.readouterr().out)
    assert first["cache"]["misses"] > 0 and second["cache"]["misses"] == 0
    assert first["alpha0"] == second["alpha0"]
    assert any(tmp_path.rglob("*.json"))


def test_cache_never_crosses_digests(tmp_path):
    from tihsim import blocks, ged
    cache = cli.ResultCache(tmp_path)
    a = ged.GedSeries(blocks.load_instance("toy-m0"))
    b = ged.GedSeries(blocks.load_instance("toy-m1"))
    va = cache.lambda_fn(a)(1, 128)
    vb = cache.lambda_fn(b)(1, 128)
    assert cache.hits == 0 and cache.misses == 2
    assert va.to_fraction() != vb.to_fraction()
    # a tampered entry whose stored key disagrees is ignored
    key = {"kind": "lambda0_4k", "instance": b.instance.digest(), "k": 1, "bits": 128, "K": []}
    path = cache._path(key)
    entry = json.loads(path.read_text())
    entry["key"]["instance"] = a.instance.digest()
    path.write_text(json.dumps(entry))
    assert cache.get(key) is None


def test_verify_all_deterministic(tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"v{i}.json"
        r = run("verify-all", "--only", "3,10,11,12", "--json-out", str(p))
        assert r.returncode == 0, r.stdout + r.stderr
        outs.append((r.stdout, json.loads(p.read_text())["result"]))
    assert outs[0] == outs[1]
    assert outs[0][0].count("PASS") == 4


@pytest.mark.parametrize("argv", [
    ["tm", "run", "--tape", "1###", "--steps", "5"],
    ["tm", "check", "--machine", "check"],
    ["spectral", "eig", "--periodic", "3,5"],
    ["spectral", "bounds", "--N", "6", "--T", "4"],
    ["blocks", "profile", "--instance", "toy-m1", "--N", "8", "--T", "1"],
    ["blocks", "walk", "--N", "6", "--T", "2"],
    ["ged", "search", "--lam0", "2/7", "--rounds", "10"],
    ["ged", "decay", "--instance", "toy-m0"],
    ["robinson", "hierarchy", "--L", "64"],
])
def test_subcommands_run(argv, capsys):
    assert cli.main(argv) == 0
    json.loads(capsys.readouterr().out)


def test_robinson_interval(tmp_path, capsys):
    assert cli.main(["robinson", "interval", "--L", "256", "--instance", "toy-m1",
                     "--cache-dir", str(tmp_path)]) == 0
    assert json.loads(capsys.readouterr().out)["bracketed"] is True
