import json

import pytest

from zkcred.cli import main


@pytest.fixture
def home(tmp_path):
    h = tmp_path / "home"

    def run(*argv):
        return main(["--home", str(h), *map(str, argv)])

    run.dir = h
    run.tmp = tmp_path
    return run


def last_json(capsys, stream="out"):
    text = getattr(capsys.readouterr(), stream)
    dec, docs, i = json.JSONDecoder(), [], text.find("{")
    while i >= 0:
        doc, end = dec.raw_decode(text, i)
        docs.append(doc)
        i = text.find("{", end)
    return docs[-1]


def setup_issuer(home, tmp, capsys, **attrs):
    assert home("keygen", "--public-out", tmp / "issuer.pub.json") == 0
    assert home("schema", "new", "--name", "person", "--attr", "name:short-string", "--attr", "age:integer",
                "--attr", "city:short-string", "--out", tmp / "schema.json") == 0
    assert home("registry", "new", "--depth", 8) == 0
    (tmp / "attrs.json").write_text(json.dumps({"name": "ada", "age": 36, "city": "linz", **attrs}))
    assert home("issue", "--schema", tmp / "schema.json", "--attrs", tmp / "attrs.json") == 0
    assert home("policy", "trust", "--issuer", tmp / "issuer.pub.json") == 0
    assert home("policy", "registry", "--backend", "dev") == 0
    capsys.readouterr()


def test_issue_present_verify_revoke(home, capsys):
    tmp = home.tmp
    setup_issuer(home, tmp, capsys)
    assert home("request", "new", "--schema", tmp / "schema.json", "--reveal", "city", "--out", tmp / "req.json") == 0
    assert home("present", "--request", tmp / "req.json", "--backend", "dev", "--trust-new-key",
                "--out", tmp / "vp.json") == 0
    assert home("verify", "--request", tmp / "req.json", "--presentation", tmp / "vp.json") == 0
    report = last_json(capsys)
    assert report["valid"] and report["disclosed"][0]["value"] == "linz"

    assert home("inspect", tmp / "vp.json") == 0
    assert last_json(capsys)["proofBytes"] == 32

    assert home("registry", "revoke", "--id", 0) == 0
    assert home("registry", "status", "--id", 0) == 0
    assert last_json(capsys)["valid"] is False
    assert home("present", "--request", tmp / "req.json", "--backend", "dev", "--trust-new-key") == 1
    assert last_json(capsys, "err")["error"]["code"] == "REVOKED"


def test_custom_circuit_needs_opt_in(home, capsys):
    tmp = home.tmp
    setup_issuer(home, tmp, capsys)
    home("request", "new", "--schema", tmp / "schema.json", "--reveal", "name", "--reveal", "age",
         "--out", tmp / "req.json")
    assert home("present", "--request", tmp / "req.json", "--backend", "dev") == 1
    assert last_json(capsys, "err")["error"]["code"] == "UNTRUSTED_CIRCUIT"


def test_tampered_presentation_exits_nonzero(home, capsys):
    tmp = home.tmp
    setup_issuer(home, tmp, capsys)
    home("request", "new", "--schema", tmp / "schema.json", "--reveal", "name", "--out", tmp / "req.json")
    home("present", "--request", tmp / "req.json", "--backend", "dev", "--trust-new-key", "--out", tmp / "vp.json")
    vp = json.loads((tmp / "vp.json").read_text())
    vp["disclosures"][0]["value"] = "eve"
    (tmp / "vp.json").write_text(json.dumps(vp))
    capsys.readouterr()
    assert home("verify", "--request", tmp / "req.json", "--presentation", tmp / "vp.json") == 1
    report = last_json(capsys)
    assert not report["valid"]


def test_predicate_request(home, capsys):
    tmp = home.tmp
    setup_issuer(home, tmp, capsys)
    (tmp / "adult.json").write_text(json.dumps(
        {"type": "expr", "expr": {"op": ">=", "args": [{"attr": 1}, {"const": 18}]}, "expect": 1}))
    home("request", "new", "--schema", tmp / "schema.json", "--predicate", tmp / "adult.json",
         "--out", tmp / "req.json")
    assert home("present", "--request", tmp / "req.json", "--backend", "dev", "--trust-new-key",
                "--out", tmp / "vp.json") == 0
    assert home("verify", "--request", tmp / "req.json", "--presentation", tmp / "vp.json") == 0


def test_designated_envelope(home, capsys):
    tmp = home.tmp
    setup_issuer(home, tmp, capsys)
    home("keygen", "--out", tmp / "dv.json", "--public-out", tmp / "dv.pub.json")
    home("request", "new", "--schema", tmp / "schema.json", "--reveal", "name",
         "--designated-signing-key", tmp / "dv.pub.json", "--out", tmp / "req.json")
    assert home("present", "--request", tmp / "req.json", "--backend", "dev", "--trust-new-key",
                "--out", tmp / "env.json") == 0
    assert json.loads((tmp / "env.json").read_text())["type"] == "DesignatedEnvelope"
    capsys.readouterr()
    assert home("verify", "--request", tmp / "req.json", "--presentation", tmp / "env.json") == 1
    assert last_json(capsys, "err")["error"]["code"] == "MISSING_KEY"
    assert home("verify", "--request", tmp / "req.json", "--presentation", tmp / "env.json",
                "--encryption-key", tmp / "dv.json") == 0


def test_bench_outputs(home, capsys):
    assert home("bench", "--scenario", "I", "--format", "json") == 0
    doc = last_json(capsys)
    assert doc["reports"][0]["componentTotal"] == 16037
    assert home("bench", "--scenario", "VI", "--format", "csv") == 0
    assert "1068979" in capsys.readouterr().out
    assert home("bench", "--scenario", "XI") == 1


def test_errors_are_json(home, capsys):
    assert home("registry", "status") == 1
    assert last_json(capsys, "err")["error"]["code"] == "UNKNOWN_REGISTRY"
    assert home("keygen") == 0
    assert home("keygen") == 1
    assert last_json(capsys, "err")["error"]["code"] == "FILE_EXISTS"


def readme_walkthrough():
    import pathlib
    import re
    text = (pathlib.Path(__file__).parents[1] / "README.md").read_text()
    block = re.search(r"<!-- walkthrough -->\n```sh\n(.*?)```", text, re.S).group(1)
    return [line for line in block.splitlines() if line.strip()]


def test_readme_walkthrough(tmp_path, monkeypatch, capsys):
    import shlex
    monkeypatch.chdir(tmp_path)
    last = None
    for line in readme_walkthrough():
        cmd, _, comment = line.partition("#")
        argv = shlex.split(cmd)
        if argv[0] == "export":
            key, value = argv[1].split("=", 1)
            monkeypatch.setenv(key, value.replace("$PWD", str(tmp_path)))
        elif argv[0] == "echo":
            assert argv[2] == ">"
            (tmp_path / argv[3]).write_text(argv[1])
        else:
            assert argv[0] == "zkcred"
            want = 1 if "exit 1" in comment else 0
            assert main(argv[1:]) == want, line
            last = comment
    assert (tmp_path / ".zkcred-demo" / "wallet.json").exists()
    assert "REVOKED" in last
    assert last_json(capsys, "err")["error"]["code"] == "REVOKED"
