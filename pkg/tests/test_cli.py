import argparse

import pytest

from localsgd import NoiseParams, min_beta
from localsgd.cli import (
    ConfigError,
    effective_config,
    main,
    parse_config,
    parse_schedule_spec,
)


def ns(**kw):
    base = dict(config=None, schedule=None, seed=None, trials=None, out=None, data=None)
    base.update(kw)
    return argparse.Namespace(**base)


# ---------------------------------------------------------------------------
# config parsing


def test_parse_config_basic():
    cfg = parse_config(
        """
        # a comment
        objective = quadratic
        T = 50

        n=4
        beta = auto
        lambda = 0.25
        """
    )
    assert cfg == {"objective": "quadratic", "T": 50, "n": 4, "beta": "auto",
                   "lambda": 0.25}
    assert isinstance(cfg["T"], int)
    assert isinstance(cfg["lambda"], float)


def test_parse_config_unknown_key():
    with pytest.raises(ConfigError, match=r"unknown config key 'tee'.*line 2"):
        parse_config("T = 5\ntee = 7\n")


def test_parse_config_duplicate_key():
    with pytest.raises(ConfigError, match=r"duplicate key 'T'.*lines 1 and 3"):
        parse_config("T = 5\nn = 2\nT = 6\n")


def test_parse_config_malformed_line():
    with pytest.raises(ConfigError, match=r"malformed line 1"):
        parse_config("just some words\n")


def test_parse_config_bad_values():
    with pytest.raises(ConfigError, match=r"invalid value for 'T' \(line 1"):
        parse_config("T = soon\n")
    with pytest.raises(ConfigError, match="beta"):
        parse_config("beta = -2\n")
    with pytest.raises(ConfigError, match="objective"):
        parse_config("objective = cubic\n")
    with pytest.raises(ConfigError, match="x0"):
        parse_config("x0 = diag\n")


def test_effective_config_defaults():
    cfg, explicit = effective_config(ns())
    assert cfg["objective"] == "quadratic"
    assert cfg["T"] == 1000
    assert cfg["beta"] == 1.0
    assert explicit == set()


def test_effective_config_layering(tmp_path, monkeypatch):
    f = tmp_path / "c.cfg"
    f.write_text("T = 60\ntrials = 5\nseed = 2\n")
    monkeypatch.setenv("LOCALSGD_TRIALS", "7")
    cfg, explicit = effective_config(ns(config=str(f), trials=9, seed=None))
    assert cfg["T"] == 60        # file
    assert cfg["trials"] == 9    # flag beats env beats file
    assert cfg["seed"] == 2      # file survives when no override
    assert {"T", "trials", "seed"} <= explicit
    monkeypatch.setenv("LOCALSGD_SEED", "11")
    cfg, _ = effective_config(ns(config=str(f)))
    assert cfg["seed"] == 11     # env beats file
    assert cfg["trials"] == 7


def test_effective_config_env_bad_value(monkeypatch):
    monkeypatch.setenv("LOCALSGD_T", "many")
    with pytest.raises(ConfigError, match="LOCALSGD_T"):
        effective_config(ns())


def test_effective_config_schedule_flag():
    cfg, explicit = effective_config(ns(schedule=["sync", "fixed:5"]))
    assert cfg["schedules"] == "sync fixed:5"
    assert "schedules" in explicit


# ---------------------------------------------------------------------------
# schedule specs


def test_parse_schedule_spec_grammar():
    assert parse_schedule_spec("sync", 6).comm_times == (1, 2, 3, 4, 5, 6)
    assert parse_schedule_spec("oneshot", 6).comm_times == (6,)
    assert parse_schedule_spec("fixed:25", 1000).rounds == 40
    assert parse_schedule_spec("growing:26", 1000).rounds == 26
    assert parse_schedule_spec("growing:20:5", 500).rounds == 14
    assert parse_schedule_spec("custom:10,20,50", 50).comm_times == (10, 20, 50)


@pytest.mark.parametrize(
    "spec",
    ["weird", "sync:3", "fixed:", "fixed:x", "growing:", "growing:2:3:4",
     "custom:10,20", "custom:", "fixed:0", "growing:99"],
)
def test_parse_schedule_spec_rejects(spec):
    with pytest.raises(ConfigError):
        parse_schedule_spec(spec, 50)


# ---------------------------------------------------------------------------
# subcommands, end to end


def write_config(tmp_path, text):
    f = tmp_path / "exp.cfg"
    f.write_text(text)
    return str(f)


SMALL_RUN = """
objective = quadratic
T = 40
n = 3
beta = 1
trials = 4
seed = 3
schedules = sync growing:5
"""


def test_cmd_run_writes_csvs(tmp_path, capsys):
    cfg_path = write_config(tmp_path, SMALL_RUN)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg_path, "--out", str(out)]) == 0
    sync_csv = out / "sync.csv"
    grow_csv = out / "growing_5.csv"
    assert sync_csv.exists() and grow_csv.exists()
    lines = sync_csv.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    assert "# config: T = 40" in comments
    assert "# seed: 3" in comments
    assert "# schedule: sync" in comments
    assert not any(l.startswith("# config: out") for l in comments)
    assert not any(l.startswith("# config: threads") for l in comments)
    header = lines[len(comments)]
    assert header == "t,mean_subopt,std_subopt,mean_consensus,comm_count"
    rows = lines[len(comments) + 1:]
    assert len(rows) == 41  # t = 0..40 at stride 1
    first = rows[0].split(",")
    assert first[0] == "0"
    assert float(first[1]) > 0  # starts at ones, so positive suboptimality
    assert first[4] == "0"
    last = rows[-1].split(",")
    assert last[0] == "40"
    assert int(last[4]) == 40  # sync communicates every step


def test_cmd_run_deterministic_bytes(tmp_path, monkeypatch):
    cfg_path = write_config(tmp_path, SMALL_RUN)
    outs = []
    for name, threads in (("o1", None), ("o2", None), ("o3", "4")):
        if threads is None:
            monkeypatch.delenv("LOCALSGD_THREADS", raising=False)
        else:
            monkeypatch.setenv("LOCALSGD_THREADS", threads)
        assert main(["run", "--config", cfg_path, "--out", str(tmp_path / name)]) == 0
        outs.append(tmp_path / name)
    for fname in ("sync.csv", "growing_5.csv"):
        blobs = [(d / fname).read_bytes() for d in outs]
        assert blobs[0] == blobs[1] == blobs[2]


def test_cmd_run_seed_changes_output(tmp_path):
    cfg_path = write_config(tmp_path, SMALL_RUN)
    main(["run", "--config", cfg_path, "--out", str(tmp_path / "a")])
    main(["run", "--config", cfg_path, "--out", str(tmp_path / "b"), "--seed", "4"])
    a = (tmp_path / "a" / "sync.csv").read_bytes()
    b = (tmp_path / "b" / "sync.csv").read_bytes()
    assert a != b


def test_cmd_run_float_fields_roundtrip(tmp_path):
    cfg_path = write_config(tmp_path, SMALL_RUN)
    out = tmp_path / "out"
    main(["run", "--config", cfg_path, "--out", str(out)])
    for line in (out / "sync.csv").read_text().splitlines():
        if line.startswith("#") or line.startswith("t,"):
            continue
        t, ms, ss, mc, cc = line.split(",")
        int(t), int(cc)
        for v in (ms, ss, mc):
            assert repr(float(v)) == v  # full-precision round trip


def test_cmd_speedup(tmp_path):
    cfg_path = write_config(
        tmp_path,
        "objective = quadratic\nT = 50\nbeta = 1\ntrials = 3\nn_list = 2,4\n",
    )
    out = tmp_path / "out"
    assert main(["speedup", "--config", cfg_path, "--out", str(out)]) == 0
    lines = (out / "speedup.csv").read_text().splitlines()
    data = [l for l in lines if not l.startswith("#")]
    assert data[0] == "n,mean_final_subopt,std_final_subopt,reference"
    rows = [l.split(",") for l in data[1:]]
    assert [r[0] for r in rows] == ["2", "4"]
    # the sigma2 / (mu n T) reference halves exactly when n doubles
    assert float(rows[0][3]) == 2.0 * float(rows[1][3])


def test_cmd_bound_report(tmp_path, capsys):
    cfg_path = write_config(
        tmp_path,
        "T = 1000\nn = 20\nbeta = auto\nmu = 1\nL = 1\nc = 9\nsigma2 = 0.75\n",
    )
    code = main(["bound", "--config", cfg_path, "--schedule", "growing:26"])
    assert code == 0
    text = capsys.readouterr().out
    assert "admissible: yes" in text
    assert "(auto)" in text
    assert "bound_growing" in text
    beta = min_beta(1.0, 1.0, 20, NoiseParams(9.0, 0.75), 1000, R=26)
    assert repr(beta) in text


def test_cmd_bound_sync_lag_zero(tmp_path, capsys):
    cfg_path = write_config(tmp_path, "T = 100\nbeta = 5\n")
    assert main(["bound", "--config", cfg_path, "--schedule", "sync"]) == 0
    text = capsys.readouterr().out
    assert "lag_sum = 0.0" in text
    assert "bound_fixed" in text


def test_cmd_bound_csv_only_when_out_given(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg_path = write_config(tmp_path, "T = 100\nbeta = 5\n")
    assert main(["bound", "--config", cfg_path, "--schedule", "growing:10"]) == 0
    assert not (tmp_path / "out").exists()
    assert main(["bound", "--config", cfg_path, "--schedule", "growing:10",
                 "--out", str(tmp_path / "rep")]) == 0
    f = tmp_path / "rep" / "bound_growing_10.csv"
    assert f.exists()
    lines = f.read_text().splitlines()
    data = [l for l in lines if not l.startswith("#")]
    assert data[0] == "interval,start,length,condition,admissible"
    assert any(l.startswith("summary,bound_growing,") for l in data)


def test_exit_codes(tmp_path, capsys):
    bad = write_config(tmp_path, "frobnicate = 1\n")
    assert main(["run", "--config", bad]) == 2
    assert "unknown config key" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 1
    assert main(["run", "--schedule", "nope", "--config",
                 write_config(tmp_path, "T = 10\ntrials = 1\n")]) == 2
    empty = write_config(tmp_path, "schedules =\ntrials = 1\nT = 10\n")
    assert main(["run", "--config", empty]) == 2
    assert "no schedules" in capsys.readouterr().err


def test_cmd_run_x0_zeros_starts_at_optimum(tmp_path):
    cfg_path = write_config(
        tmp_path,
        "objective = quadratic\nT = 20\nn = 2\nbeta = 1\ntrials = 2\n"
        "schedules = sync\nx0 = zeros\nc1 = 0\nc2 = 0\n",
    )
    out = tmp_path / "out"
    main(["run", "--config", cfg_path, "--out", str(out)])
    rows = [l for l in (out / "sync.csv").read_text().splitlines()
            if not l.startswith(("#", "t,"))]
    assert all(float(r.split(",")[1]) == 0.0 for r in rows)
