import io
import shlex
import subprocess
import sys

import numpy as np
import pytest

from vblast import cli


def run(capsys, *args):
    code = cli.main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return header, data


def test_parse_axis():
    ax = cli.parse_axis("0:25:26", "rho-db", "db")
    assert ax.swept and len(ax.values) == 26
    assert ax.values[-1] == pytest.approx(10 ** 2.5)
    ax = cli.parse_axis("1:100:3", "rho", "log")
    assert np.allclose(ax.values, [1, 10, 100])
    assert not cli.parse_axis("0.1", "eps").swept
    for bad in ("a", "1:2", "1:2:0", "1:2:2.5"):
        with pytest.raises(cli.ConfigError):
            cli.parse_axis(bad, "eps")


def test_outage_sweep_monotone_with_diversity(capsys):
    code, out, err = run(capsys, "outage", "--t", "3", "--r", "4", "--rate", "1",
                         "--rho-db", "0:25:26")
    assert code == 0
    assert "done in" in err
    header, data = read_csv(out)
    assert header == ["rho_db", "pout_layer1", "pout_layer2", "pout_layer3"]
    assert data.shape == (26, 4)
    assert np.all(np.diff(data[:, 1:], axis=0) < 0)
    slopes = (np.log10(data[-1, 1:]) - np.log10(data[-6, 1:])) / 0.5
    assert np.allclose(slopes, [-12, -6, -2], rtol=0.15)


def test_waterfill_cutoff(capsys):
    code, out, _ = run(capsys, "waterfill", "--t", "3", "--r", "4", "--rho-db", "5",
                       "--eps", "0.01:0.5:50")
    assert code == 0
    header, data = read_csv(out)
    eps, p3 = data[:, 0], data[:, header.index("power_layer3")]
    first_on = eps[np.argmax(p3 > 0)]
    assert np.all(p3[eps < 0.19] == 0)
    assert first_on == pytest.approx(0.215, abs=0.02)
    assert np.allclose(data[:, header.index("power_layer1"):header.index("power_layer3") + 1]
                       .sum(axis=1), 10 ** 0.5, rtol=1e-9)


def test_capacity_columns(capsys):
    code, out, _ = run(capsys, "capacity", "--eps", "0.1", "--rho-db", "15")
    assert code == 0
    header, data = read_csv(out)
    row = dict(zip(header, data[0]))
    assert 0.5 <= row["greedy_sum"] - row["noorder_sum"] <= 1.5
    code, out, _ = run(capsys, "capacity", "--eps", "0.1", "--rho-db", "15",
                       "--power", "waterfill")
    _, wf = read_csv(out)
    assert wf[0, 4] >= data[0, 4] - 1e-9


def test_pdf_histogram_columns(capsys):
    code, out, _ = run(capsys, "pdf", "--layers", "2,3", "--trials", "2e5", "--seed", "7")
    assert code == 0
    header, data = read_csv(out)
    assert header == ["x", "pdf_layer2", "hist_layer2", "pdf_layer3", "hist_layer3"]
    width = data[1, 0] - data[0, 0]
    for layer in (2, 3):
        l1 = np.sum(np.abs(data[:, header.index(f"pdf_layer{layer}")]
                           - data[:, header.index(f"hist_layer{layer}")])) * width
        assert l1 < 0.05


def test_simulate_is_byte_identical_across_workers(capsys, tmp_path):
    outs = []
    for w in ("1", "3"):
        path = tmp_path / f"w{w}.csv"
        assert cli.main(["simulate", "--trials", "70000", "--seed", "4", "--workers", w,
                         "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    # the echoed config differs only in --workers
    strip = lambda b: b"\n".join(ln for ln in b.splitlines() if not ln.startswith(b"# config"))
    assert strip(outs[0]) == strip(outs[1])


def test_simulate_ecdf(capsys):
    code, out, _ = run(capsys, "simulate", "--trials", "1000", "--ecdf", "0:10:11")
    header, data = read_csv(out)
    assert header == ["x", "ecdf_layer1", "ecdf_layer2", "ecdf_layer3"]
    assert np.all(np.diff(data[:, 1:], axis=0) >= 0)


def test_config_echo_reruns_the_same_job(capsys):
    code, out, _ = run(capsys, "outage", "--rate", "2", "--rho-db", "0:10:3", "--t", "2")
    echo = [ln for ln in out.splitlines() if ln.startswith("# config: ")][0]
    argv = shlex.split(echo[len("# config: "):])[1:]
    code2, out2, _ = run(capsys, *argv)
    assert code2 == 0 and out2 == out


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# outage sweep\nt = 2\nr = 3\nrate = 2\nrho-db = 0:10:3\n")
    code, out, _ = run(capsys, "outage", "--config", str(cfg))
    assert code == 0
    header, data = read_csv(out)
    assert header[-1] == "pout_layer2" and data.shape == (3, 3)
    code, out, _ = run(capsys, "outage", "--config", str(cfg), "--t", "3")
    header, _ = read_csv(out)
    assert header[-1] == "pout_layer3"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "outage", "--config", str(cfg))
    assert code == 1 and "colour" in err


@pytest.mark.parametrize("args,field", [
    (["outage", "--t", "5", "--r", "4"], "--t"),
    (["capacity", "--eps", "1.5"], "--eps"),
    (["capacity", "--eps", "0.1:0.2:3", "--rho-db", "0:10:3"], "--eps"),
    (["outage", "--rate", "-1"], "--rate"),
    (["simulate", "--trials", "2.5"], "--trials"),
    (["pdf", "--layers", "4"], "--layers"),
    (["outage", "--nodes", "4"], "quadrature"),
    (["outage", "--rho", "-3", "--scale", "linear"], "--rho"),
])
def test_validation_errors_name_the_field(capsys, args, field):
    code, out, err = run(capsys, *args)
    assert code == 1
    assert field in err
    assert out == ""


def test_numeric_failure_reports_sweep_point(capsys, monkeypatch):
    from vblast.distribution import LayerLaw
    from vblast.errors import NumericError

    def broken(self, layer, x, m=None):
        raise NumericError("quadrature stalled", estimate=0.5)

    monkeypatch.setattr(LayerLaw, "cdf", broken)
    code, out, err = run(capsys, "outage", "--rho-db", "0:10:3")
    assert code == 2
    assert "rho=1" in err and "quadrature stalled" in err
    assert out == ""


def test_verify_exit_code_and_table(monkeypatch):
    from vblast import verification

    def fake(**kw):
        checks = [verification.Check("a", "1", 1.0, "0", True),
                  verification.Check("b", "1", 2.0, "0", False)]
        for c in checks:
            kw["progress"](c)
        return checks

    monkeypatch.setattr(verification, "run_all", fake)
    assert cli.main(["verify", "--quick"]) == 3
    monkeypatch.setattr(verification, "run_all",
                        lambda **kw: [verification.Check("a", "1", 1.0, "0", True)])
    assert cli.main(["verify", "--quick"]) == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "vblast", "outage", "--rho-db", "10"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[-2].startswith("rho_db")


def test_result_table_rejects_bad_shapes():
    with pytest.raises(ValueError):
        cli.ResultTable(["a", "a"], [[1, 2]])
    with pytest.raises(ValueError):
        cli.ResultTable(["a", "b"], [[1, 2, 3]])
    buf = io.StringIO()
    cli.ResultTable(["a"], [[1 / 3]], {"k": "v"}).write(buf)
    assert buf.getvalue() == "# k: v\na\n0.333333333\n"
