import json

import pytest

from carrier_lab import cli, experiments, io
from carrier_lab.errors import ConfigParse


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_validate_from_file(tmp_path, tri3):
    io.save_graph(tri3, tmp_path / "tri3.json")
    cfg = write(tmp_path, "v.toml", 'kind = "validate"\n[graph]\ngenerator = "file"\nfile = "tri3.json"\n')
    out = tmp_path / "out"
    assert cli.main(["validate", "--config", str(cfg), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["passed"] and rep["kind"] == "validate"


def test_pack_writes_packing(tmp_path):
    cfg = write(tmp_path, "p.toml", 'kind = "pack"\n[graph]\ngenerator = "hyperbolic"\ndeg = 7\ndepth = 3\n')
    assert cli.main(["pack", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    p = io.load_packing(tmp_path / "o" / "packing.json")
    assert p.angle_residual <= 1e-9


def test_empty_grid_is_config_error(tmp_path):
    text = 'kind = "exit-arc"\n[graph]\ngenerator = "tri3"\n[params]\nradii = []\n'
    with pytest.raises(ConfigParse):
        experiments.parse_config(text)
    cfg = write(tmp_path, "bad.toml", text)
    assert cli.main(["measure", "--config", str(cfg)]) == 1


def test_unknown_kind_and_bad_toml():
    with pytest.raises(ConfigParse):
        experiments.parse_config('kind = "nope"\n')
    with pytest.raises(ConfigParse):
        experiments.parse_config('kind = \n')


def test_failed_check_exits_two(tmp_path):
    cfg = write(tmp_path, "f.toml", 'kind = "validate"\n[graph]\ngenerator = "tri3"\n[params]\nD = 1.0\neta = 2.5\n')
    assert cli.main(["measure", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_generate_and_render(tmp_path):
    cfg = write(tmp_path, "g.toml", 'kind = "validate"\n[graph]\ngenerator = "wheel"\nk = 5\n')
    assert cli.main(["generate", "--config", str(cfg), "--out", str(tmp_path / "g")]) == 0
    assert io.load_graph(tmp_path / "g" / "graph.json").to_triangulation().n == 6
    assert cli.main(["render", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 0
    assert (tmp_path / "r" / "drawing.svg").read_text().count("<circle") == 7


def test_all_runs_directory(tmp_path):
    d = tmp_path / "cfgs"
    d.mkdir()
    write(d, "a.toml", 'kind = "validate"\n[graph]\ngenerator = "tri3"\n')
    write(d, "b.toml", 'kind = "validate"\n[graph]\ngenerator = "square"\nk = 3\n')
    assert cli.main(["all", "--config", str(d), "--out", str(tmp_path / "o"), "--threads", "1"]) == 0
    assert (tmp_path / "o" / "b" / "summary.txt").exists()


def test_seed_override(tmp_path):
    cfg = write(tmp_path, "s.toml", 'kind = "bilipschitz"\nseed = 1\n[graph]\ngenerator = "tri3"\n'
                                    '[params]\nsamples = [500, 1000]\n')
    cli.main(["measure", "--config", str(cfg), "--seed", "9", "--out", str(tmp_path / "o")])
    a = json.loads((tmp_path / "o" / "report.json").read_text())
    cli.main(["measure", "--config", str(cfg), "--seed", "9", "--out", str(tmp_path / "o2")])
    b = json.loads((tmp_path / "o2" / "report.json").read_text())
    assert a["data"] == b["data"]


def test_shipped_configs_parse():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "configs"
    paths = sorted(root.rglob("*.toml"))
    assert len(paths) >= 14
    for p in paths:
        experiments.load_config(p)
