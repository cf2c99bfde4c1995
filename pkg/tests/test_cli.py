"""Command-line client: exit codes, config files, artifact output."""

import pytest

from bamc.cli import main, parse_config_file


@pytest.fixture(scope="module")
def records_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "records.csv"
    code = main(["run", "--model", "tiny-hmm", "--algorithm", "bamc",
                 "--iterations", "20", "--runs", "2", "--seed", "3",
                 "--out", str(out)])
    assert code == 0
    return out


# ---------------------------------------------------------------------------
# run


def test_run_reports_and_writes(tmp_path, capsys):
    out = tmp_path / "rec.csv"
    code = main(["run", "--model", "tiny-hmm", "--algorithm", "bamc",
                 "--iterations", "10", "--out", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "bamc on tiny-hmm: 1 runs x 10 iterations" in stdout
    assert str(out) in stdout
    assert out.is_file()
    assert out.with_suffix(".norm.csv").is_file()


def test_run_missing_required_setting(capsys):
    code = main(["run", "--algorithm", "bamc", "--iterations", "5"])
    assert code == 2
    assert "missing required settings: model" in capsys.readouterr().err


def test_run_unknown_model(capsys):
    code = main(["run", "--model", "spins", "--algorithm", "bamc",
                 "--iterations", "5"])
    assert code == 2
    assert "failed (400)" in capsys.readouterr().err


def test_run_sa_without_schedule(capsys):
    code = main(["run", "--model", "tiny-hmm", "--algorithm", "sa",
                 "--iterations", "5"])
    assert code == 2


def test_unreachable_server(capsys):
    code = main(["run", "--model", "tiny-hmm", "--algorithm", "bamc",
                 "--iterations", "5", "--server", "http://127.0.0.1:9"])
    assert code == 1
    assert "cannot reach server" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# config files


def test_config_file_drives_run(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "# smoke experiment\n"
        "model tiny-hmm\n"
        "algorithm sa        # baseline\n"
        "schedule exponential\n"
        "rate 0.9\n"
        "iterations 15\n"
        "seed 7\n"
        "\n"
    )
    code = main(["run", "--config", str(cfg)])
    assert code == 0
    assert "sa on tiny-hmm: 1 runs x 15 iterations" in capsys.readouterr().out


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("model tiny-hmm\nalgorithm bamc\niterations 5\n")
    code = main(["run", "--config", str(cfg), "--iterations", "8"])
    assert code == 0
    assert "x 8 iterations" in capsys.readouterr().out


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("model tiny-hmm\noptimizer adam\n")
    code = main(["run", "--config", str(cfg)])
    assert code == 2
    assert "unknown key 'optimizer'" in capsys.readouterr().err


def test_config_file_malformed_line(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("model\n")
    code = main(["run", "--config", str(cfg)])
    assert code == 2
    assert "expected `key value`" in capsys.readouterr().err


def test_parse_config_file_skips_comments(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# header\n\nmodel hmm16  # trailing\nruns 4\n")
    assert parse_config_file(cfg) == {"model": "hmm16", "runs": "4"}


# ---------------------------------------------------------------------------
# summarize


def test_summarize_prints_finals(records_csv, tmp_path, capsys):
    dest = tmp_path / "summary.csv"
    code = main(["summarize", "--records", str(records_csv),
                 "--out", str(dest)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "20 iterations; final" in stdout
    assert "q0.5=" in stdout
    assert dest.read_text().startswith("iteration,q0.25,q0.5,q0.75")


def test_summarize_custom_quantiles(records_csv, capsys):
    code = main(["summarize", "--records", str(records_csv),
                 "--quantiles", "0.1,0.9"])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "q0.1=" in stdout and "q0.9=" in stdout


def test_summarize_missing_records(tmp_path, capsys):
    code = main(["summarize", "--records", str(tmp_path / "nope.csv")])
    assert code == 2
    assert "not found" in capsys.readouterr().err


def test_summarize_bad_quantile_text(records_csv, capsys):
    code = main(["summarize", "--records", str(records_csv),
                 "--quantiles", "abc"])
    assert code == 2


# ---------------------------------------------------------------------------
# plot


def test_plot_quantiles_with_svg(records_csv, tmp_path, capsys):
    fig = tmp_path / "fig.csv"
    svg = tmp_path / "fig.svg"
    code = main(["plot", "--records", str(records_csv),
                 "--out", str(fig), "--svg", str(svg), "--title", "tiny"])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "quantiles figure: 60 rows" in stdout
    assert fig.is_file()
    assert (tmp_path / "fig.csv.meta.txt").is_file()
    assert svg.read_bytes().startswith(b"<svg")


def test_plot_single_run(records_csv, tmp_path, capsys):
    fig = tmp_path / "run.csv"
    code = main(["plot", "--records", str(records_csv), "--figure", "run",
                 "--run-id", "1", "--window", "3", "--out", str(fig)])
    assert code == 0
    assert "run figure: 60 rows" in capsys.readouterr().out


def test_plot_even_window(records_csv, tmp_path, capsys):
    code = main(["plot", "--records", str(records_csv), "--figure", "run",
                 "--window", "4", "--out", str(tmp_path / "x.csv")])
    assert code == 2
