"""End-to-end command-line flows, run in-process via cli.main."""

import json

import pytest

from ineqkit.cli import main
from ineqkit.gridfn import load_corpus_spec
from ineqkit.render import CSV_COLUMNS, load_report


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def flow_dir(tmp_path_factory):
    """corpus gen -> verify run -> report render, all in one tree."""
    root = tmp_path_factory.mktemp("flow")
    corpus = root / "corpus.json"
    out = root / "run"
    assert run_cli("corpus", "gen", "--dim", "1", "--count", "3",
                   "--grid", "8,64", "--seed", "7", "--out", str(corpus)) == 0
    assert run_cli("verify", "run", "--id", "bound", "--corpus", str(corpus),
                   "--out", str(out), "--jobs", "1") == 0
    return root


def test_corpus_file_contents(flow_dir):
    grid, seed, count = load_corpus_spec(flow_dir / "corpus.json")
    assert (grid.dim, seed, count) == (1, 7, 3)
    assert grid.points[0] == 64


def test_verify_run_report(flow_dir):
    doc = load_report(flow_dir / "run" / "report.json")
    assert [r["id"] for r in doc["reports"]] == ["bound"]
    assert doc["reports"][0]["passed"] is True
    assert len(doc["reports"][0]["rows"]) == 3


def test_render_both_formats(flow_dir):
    out = flow_dir / "run"
    assert run_cli("report", "render", "--in", str(out), "--format", "csv") == 0
    assert run_cli("report", "render", "--in", str(out), "--format", "svg") == 0
    header = (out / "report.csv").read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
    assert (out / "report.svg").read_text().startswith("<svg")


def test_report_json_deterministic_modulo_timestamp(flow_dir, tmp_path):
    again = tmp_path / "again"
    assert run_cli("verify", "run", "--id", "bound",
                   "--corpus", str(flow_dir / "corpus.json"),
                   "--out", str(again), "--jobs", "1") == 0
    docs = [load_report(p / "report.json") for p in (flow_dir / "run", again)]
    for doc in docs:
        doc["metadata"].pop("timestamp")
    assert json.dumps(docs[0], sort_keys=True) == json.dumps(docs[1], sort_keys=True)


def test_config_fills_gaps_and_flags_win(tmp_path):
    corpus = tmp_path / "c.json"
    config = tmp_path / "conf.json"
    config.write_text(json.dumps(
        {"dim": 1, "count": 2, "grid": "8,64", "out": str(corpus)}))
    assert run_cli("corpus", "gen", "--config", str(config), "--count", "4") == 0
    _, _, count = load_corpus_spec(corpus)
    assert count == 4


def test_usage_errors_exit_2(tmp_path):
    cases = [
        ("corpus", "gen", "--dim", "1", "--count", "0", "--out", "x.json"),
        ("corpus", "gen", "--count", "3", "--out", "x.json"),
        ("verify", "run", "--id", "no_such_entry", "--out", str(tmp_path)),
        ("probe", "--question", "bound", "--out", str(tmp_path)),
        ("report", "render", "--format", "csv"),
    ]
    for argv in cases:
        with pytest.raises(SystemExit) as exc:
            run_cli(*argv)
        assert exc.value.code == 2


def test_dim_mismatch_exits_2(flow_dir, tmp_path):
    with pytest.raises(SystemExit) as exc:
        run_cli("verify", "run", "--id", "sob1",
                "--corpus", str(flow_dir / "corpus.json"),
                "--out", str(tmp_path / "bad"))
    assert exc.value.code == 2


def test_render_failures_exit_1(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert run_cli("report", "render", "--in", str(empty), "--format", "csv") == 1
    stale = tmp_path / "stale"
    stale.mkdir()
    (stale / "report.json").write_text(json.dumps({"format_version": 99}))
    assert run_cli("report", "render", "--in", str(stale), "--format", "csv") == 1
    err = capsys.readouterr().err
    assert "format_version" in err


def test_probe_writes_labeled_file(tmp_path):
    out = tmp_path / "probes"
    assert run_cli("probe", "--question", "obertype_n2", "--depth", "0",
                   "--out", str(out), "--jobs", "1") == 0
    doc = json.loads((out / "probe_obertype_n2.json").read_text())
    assert doc["probe"]["label"] == "OPEN QUESTION — no asserted direction"
    assert len(doc["probe"]["levels"]) == 1
