import csv
import io
import math

import numpy as np
import pytest

from domint import cli, experiments
from domint.experiments import ConfigError

SMALL = """
[sim]
trials = 300
outage_trials = 200
seed = 3
[dominant_cdf]
points = 7
[outage]
phi = pi/4, pi
ranks = 1
fading_m = 2
[qos]
points = 5
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.ini"
    p.write_text(SMALL)
    return str(p)


def _read(path):
    return list(csv.reader(open(path)))


@pytest.mark.parametrize(
    "text, value",
    [("2.5", 2.5), ("pi", math.pi), ("pi/4", math.pi / 4), ("2*pi", 2 * math.pi), ("3 * pi / 4", 0.75 * math.pi)],
)
def test_parse_number(text, value):
    assert experiments.parse_number(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["", "abc", "pi/0", "2*"])
def test_parse_number_rejects(text):
    with pytest.raises(ConfigError):
        experiments.parse_number(text)


def test_parse_criteria():
    assert experiments.parse_criteria("1-9") == list(range(1, 10))
    assert experiments.parse_criteria("4, 1, 4") == [1, 4]
    assert experiments.parse_criteria("2-3,7") == [2, 3, 7]
    for bad in ("0", "10", "5-2", "x"):
        with pytest.raises(ConfigError):
            experiments.parse_criteria(bad)


def test_defaults_load():
    cfg = experiments.load_config()
    assert cfg.net.alpha == 3.0 and cfg.net.phi == pytest.approx(math.pi / 4)
    assert cfg.link.u == 80.0 and cfg.cdf_ranks == (1, 2, 5)


@pytest.mark.parametrize(
    "text",
    [
        "[network]\nlamda = 1\n",
        "[nosuch]\nx = 1\n",
        "[network]\nalpha = 2\n",
        "[network]\nphi = 7\n",
        "[sim]\ntrials = 0\n",
        "[qos]\nrates = 0.1\n",
        "[dominant_cdf]\nranks = 9\n",
        "[verify]\nbogus = 1\n",
        "not an ini",
    ],
)
def test_bad_config_exit_code(tmp_path, text, capsys):
    p = tmp_path / "bad.ini"
    p.write_text(text)
    with pytest.raises(ConfigError):
        experiments.load_config(str(p))
    assert cli.main(["outage", str(p)]) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_missing_config_and_bad_flags(tmp_path):
    assert cli.main(["qos", str(tmp_path / "none.ini")]) == cli.EXIT_CONFIG
    assert cli.main(["dominant-cdf", "--trials", "0"]) == cli.EXIT_CONFIG
    assert cli.main(["dominant-cdf", "--seed", "-1"]) == cli.EXIT_CONFIG
    assert cli.main(["qos", "--dump", str(tmp_path / "d.csv")]) == cli.EXIT_CONFIG


def test_fmt_twelve_significant_digits():
    assert cli._fmt(math.pi) == "3.14159265359"
    assert cli._fmt(1.0 / 3e-9) == "333333333.333"
    assert cli._fmt(float("nan")) == "nan"


def test_dominant_cdf_csv(small_cfg, tmp_path):
    out, dump = tmp_path / "cdf.csv", tmp_path / "dump.csv"
    assert cli.main(["dominant-cdf", small_cfg, "--out", str(out), "--dump", str(dump)]) == 0
    rows = _read(out)
    assert rows[0][0] == "power" and "analytic_cdf_n1" in rows[0] and "empirical_cdf_n5" in rows[0]
    assert len(rows) == 8
    body = np.array(rows[1:], dtype=float)
    assert np.all(np.diff(body[:, 1:4], axis=0) >= 0)
    # the strongest interferer is at least as strong as the nearest one
    emp = rows[0].index("empirical_cdf_n1")
    near = rows[0].index("nearest_empirical_cdf_n1")
    assert np.all(body[:, emp] <= body[:, near] + 1e-12)
    assert len(_read(dump)) == 301


def test_output_is_deterministic(small_cfg, tmp_path):
    a, b, c = (tmp_path / f"{k}.csv" for k in "abc")
    for path, seed in ((a, "5"), (b, "5"), (c, "6")):
        assert cli.main(["outage", small_cfg, "--seed", seed, "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    ra, rc = _read(a), _read(c)
    assert ra != rc
    col = ra[0].index("analytic_m2_n1")
    # analytic columns do not depend on the seed
    assert [r[col] for r in ra] == [r[col] for r in rc]


def test_outage_csv_values(small_cfg, tmp_path):
    out = tmp_path / "o.csv"
    assert cli.main(["outage", small_cfg, "--out", str(out)]) == 0
    rows = _read(out)
    assert rows[0] == ["phi", "analytic_m2_n1", "empirical_m2_n1"]
    body = np.array(rows[1:], dtype=float)
    assert body[0, 0] == pytest.approx(math.pi / 4, rel=1e-11)
    assert np.all((body[:, 1:] >= 0) & (body[:, 1:] <= 1))
    assert body[1, 1] > body[0, 1]


def test_qos_stdout_and_decision_file(small_cfg, tmp_path, capsys):
    assert cli.main(["qos", small_cfg]) == 0
    text = capsys.readouterr().out
    table, decisions = text.split("\n\n")
    rows = list(csv.reader(io.StringIO(table)))
    assert rows[0][0] == "q_max" and len(rows) == 6
    drows = list(csv.reader(io.StringIO(decisions)))
    assert drows[0] == experiments.DECISION_HEADER
    out = tmp_path / "q.csv"
    assert cli.main(["qos", small_cfg, "--out", str(out)]) == 0
    assert _read(out) == rows
    assert _read(tmp_path / "q_decisions.csv") == drows


def test_plot_written(small_cfg, tmp_path):
    for cmd in ("qos", "outage"):
        png = tmp_path / f"{cmd}.png"
        assert cli.main([cmd, small_cfg, "--out", str(tmp_path / "x.csv"), "--plot", str(png)]) == 0
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_verify_pass_and_fail(tmp_path, capsys):
    ok = tmp_path / "ok.ini"
    ok.write_text("[verify]\ncriteria = 5, 8\n")
    out = tmp_path / "checks.csv"
    assert cli.main(["verify", str(ok), "--out", str(out)]) == cli.EXIT_OK
    err = capsys.readouterr().err
    assert "criterion 5 PASS" in err and "criterion 8 PASS" in err
    assert _read(out)[0] == ["criterion", "check", "passed", "value", "tolerance", "detail"]

    # negative control: a zero KS tolerance cannot be met by a finite sample
    bad = tmp_path / "bad.ini"
    bad.write_text("[verify]\ncriteria = 1\nks_tol = 0\n")
    assert cli.main(["verify", str(bad), "--trials", "200"]) == cli.EXIT_VERIFY_FAILED
    assert "criterion 1 FAIL" in capsys.readouterr().err


def test_dominant_vs_nearest_default_sweep():
    cfg = experiments.load_config().with_overrides(trials=5000)
    t = experiments.dominant_cdf_table(cfg)
    col = {name: t.rows[:, i] for i, name in enumerate(t.header)}
    for n in cfg.cdf_ranks:
        assert col[f"analytic_cdf_n{n}"][-1] >= 0.99
        assert np.all(np.diff(col[f"analytic_cdf_n{n}"]) >= 0)
    # beyond the first rank the n-th nearest node is no longer the weaker one everywhere
    gap = col["analytic_cdf_n5"] - col["nearest_empirical_cdf_n5"]
    assert gap.min() < -0.05 and gap.max() > 0.02
