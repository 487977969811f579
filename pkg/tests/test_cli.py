import json
import subprocess
import sys

import pytest

from avgquery.cli import main
from avgquery.config import ConfigError, parse_text

CONFIG = """\
[meta]
schema = avgquery-config/1

[experiment]
kind = sweep
name = orc
seed = 7
trials = 300
sizes = 64, 128, 256
out = {out}

[algorithm]
name = classical_or_sampler

[function]
kind = OR

[distribution]
kind = or_alpha
alpha = {alpha}
"""


def write(tmp_path, alpha=0.4, extra="", name="c.ini"):
    p = tmp_path / name
    p.write_text(CONFIG.format(out=tmp_path / "out", alpha=alpha) + extra)
    return p


def test_run_writes_outputs(tmp_path, capsys):
    assert main(["run", "--config", str(write(tmp_path))]) == 0
    assert "slope" in capsys.readouterr().out
    summary = json.loads((tmp_path / "out" / "orc.summary.json").read_text())
    assert summary["seed"] == 7 and "fit" in summary
    assert (tmp_path / "out" / "orc.csv").read_text().startswith("size,trials,mean_queries")


def test_bad_alpha_exits_2(tmp_path, capsys):
    assert main(["run", "--config", str(write(tmp_path, alpha=0.7))]) == 2
    err = capsys.readouterr().err
    assert "alpha" in err and "(0, 1/2)" in err
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize("extra", ["\n[tunables]\nspeed = 3\n", "\n[plots]\nx = 1\n"])
def test_unknown_keys_exit_2(tmp_path, extra):
    assert main(["run", "--config", str(write(tmp_path, extra=extra))]) == 2


def test_missing_file_exits_2(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.ini")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_size_cap_exits_2(tmp_path):
    p = write(tmp_path)
    p.write_text(p.read_text().replace("64, 128, 256", "8192, 16384, 32768").replace("trials = 300", "exact = true"))
    assert main(["run", "--config", str(p)]) == 2


def test_config_echo_reproduces_run(tmp_path):
    assert main(["run", "--config", str(write(tmp_path))]) == 0
    out = tmp_path / "out"
    first = (out / "orc.csv").read_bytes()
    echo = json.loads((out / "orc.summary.json").read_text())["config"]
    cfg = parse_text(echo)
    assert parse_text(cfg.to_text()) == cfg
    (tmp_path / "echo.ini").write_text(echo)
    (out / "orc.csv").unlink()
    assert main(["run", "--config", str(tmp_path / "echo.ini")]) == 0
    assert (out / "orc.csv").read_bytes() == first


def test_seed_override_changes_run(tmp_path):
    p = write(tmp_path)
    main(["run", "--config", str(p)])
    a = (tmp_path / "out" / "orc.csv").read_text()
    main(["run", "--config", str(p), "--seed", "8"])
    assert (tmp_path / "out" / "orc.csv").read_text() != a


def test_sweep_needs_three_sizes():
    text = CONFIG.format(out="x", alpha=0.4).replace("64, 128, 256", "64, 128")
    with pytest.raises(ConfigError, match="3 sizes"):
        parse_text(text)


def test_wrong_function_for_algorithm():
    text = CONFIG.format(out="x", alpha=0.4).replace("kind = OR", "kind = MAJ")
    with pytest.raises(ConfigError, match="does not compute"):
        parse_text(text)


def test_distinguish_and_certify_kinds(tmp_path):
    (tmp_path / "d.ini").write_text(
        "[meta]\nschema = avgquery-config/1\n[experiment]\nkind = distinguish\nname = dd\nseed = 1\n"
        f"trials = 50\nsizes = 4\nm = 16\ndecider = full\nout = {tmp_path}\n")
    assert main(["run", "--config", str(tmp_path / "d.ini")]) == 0
    res = json.loads((tmp_path / "dd.summary.json").read_text())["results"][0]
    assert res["gap"] == 1.0
    (tmp_path / "c.ini").write_text(
        "[meta]\nschema = avgquery-config/1\n[experiment]\nkind = certify\nname = cc\nseed = 1\n"
        f"sizes = 4\ntrials_per_input = 20\nout = {tmp_path}\n[algorithm]\nname = parity_exact_quantum\n"
        "[function]\nkind = PARITY\n[distribution]\nkind = uniform\n")
    assert main(["run", "--config", str(tmp_path / "c.ini")]) == 0
    assert json.loads((tmp_path / "cc.summary.json").read_text())["certified"] == {"4": True}


class TestReport:
    def test_empty_directory(self, tmp_path):
        assert main(["report", str(tmp_path)]) == 2
        assert main(["report", str(tmp_path / "missing")]) == 2

    def test_single_point_omits_slope(self, tmp_path, capsys):
        (tmp_path / "one.csv").write_text("size,trials,mean_queries\n16,10,4.0\n")
        assert main(["report", str(tmp_path)]) == 0
        assert "slope omitted" in capsys.readouterr().out
        assert (tmp_path / "report" / "slopes.csv").read_text().splitlines()[1].startswith("one,1,")

    def test_groups_experiments(self, tmp_path):
        (tmp_path / "a.csv").write_text("size,mean_queries\n2,4\n4,16\n8,64\n")
        (tmp_path / "b.csv").write_text("size,mean_queries\n2,2\n4,4\n8,8\n")
        (tmp_path / "notes.csv").write_text("x,y\n1,2\n")
        assert main(["report", str(tmp_path), "--out", str(tmp_path / "r")]) == 0
        rows = (tmp_path / "r" / "slopes.csv").read_text().splitlines()[1:]
        slopes = {r.split(",")[0]: float(r.split(",")[2]) for r in rows}
        assert slopes == pytest.approx({"a": 2.0, "b": 1.0})
        assert len((tmp_path / "r" / "points.csv").read_text().splitlines()) == 7


def test_verify_rejects_unknown_suite():
    with pytest.raises(SystemExit) as e:
        main(["verify", "nonsense"])
    assert e.value.code == 2


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "avgquery", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "verify" in r.stdout
