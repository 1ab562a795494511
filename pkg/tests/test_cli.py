import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from xsym.cli import CLIError, main, parse_grid
from xsym.presets import family_state

AD_U = '{"kind": "ad", "location": "U", "p": 0.3}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_grid():
    assert parse_grid("0:1:0.005").size == 201
    np.testing.assert_allclose(parse_grid("0:1:0.5"), [0.0, 0.5, 1.0])
    for bad in ("0:2:0.1", "0:1", "0.5:0.2:0.1", "0:1:0"):
        with pytest.raises(CLIError):
            parse_grid(bad)


def test_sweep_dephasing_bell(capsys):
    code, out, _ = run(capsys, "sweep", "--state", "bell", "--channel", '{"kind": "pd"}',
                       "--grid", "0:1:0.5", "--measures", "C")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["p", "C_U", "C_L"]
    assert [float(r["C_U"]) for r in table] == [1.0, 0.0, 1.0]
    assert [r["C_U"] for r in table] == [r["C_L"] for r in table]


def test_sweep_columns_and_determinism(capsys):
    argv = ("sweep", "--state", "worked", "--channel", '{"kind": "dep"}', "--grid", "0:1:0.01")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert first.splitlines()[0] == "p,C_U,C_L,F_U,F_L,D_U,D_L"
    assert len(first.splitlines()) == 102


def test_sweep_fig3_sudden_death(capsys):
    _, out, _ = run(capsys, "sweep", "--state", "fig3", "--channel", '{"kind": "ad"}',
                    "--measures", "C")
    table = rows(out)
    p = np.array([float(r["p"]) for r in table])
    cu = np.array([float(r["C_U"]) for r in table])
    cl = np.array([float(r["C_L"]) for r in table])
    assert np.all(cl[p >= 0.63] == 0) and np.all(cl[p <= 0.62] > 0)
    assert np.all(cu[p < 1] > 0)


def test_sweep_json_and_file(capsys, tmp_path):
    target = tmp_path / "sweep.json"
    code, out, _ = run(capsys, "sweep", "--state", "bell", "--channel", '{"kind": "ad"}',
                       "--format", "json", "--out", str(target), "--grid", "0:1:0.25")
    assert code == 0 and out == ""
    data = json.loads(target.read_text())
    assert data["p"] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert set(data) == {"p", "C_U", "C_L", "F_U", "F_L", "D_U", "D_L"}


def test_state_from_file(capsys, tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps({"diag": [0.5, 0, 0, 0.5], "rho14": 0.5}))
    code, out, _ = run(capsys, "evolve", "--state", str(path), "--channel", AD_U)
    assert code == 0
    res = json.loads(out)
    assert res["concurrence"] == pytest.approx(np.sqrt(0.7))


def test_complex_discord_is_an_error(capsys):
    state = json.dumps({"diag": [0.5, 0, 0, 0.5], "rho14": {"re": 0.0, "im": 0.3}})
    code, _, err = run(capsys, "sweep", "--state", state, "--channel", '{"kind": "dep"}')
    assert code == 2 and json.loads(err)["error"] == "ComplexCoherence"
    code, out, _ = run(capsys, "sweep", "--state", state, "--channel", '{"kind": "dep"}',
                       "--measures", "C,F")
    assert code == 0


def test_figure_4(capsys, tmp_path):
    code, out, _ = run(capsys, "figure", "4", "--out", str(tmp_path))
    assert code == 0
    files = json.loads(out)["files"]
    assert len(files) == 5
    meta = json.loads((tmp_path / "meta.json").read_text())
    diag = sorted(tuple(s["diag"]) for s in meta["states"].values())
    assert diag == [(0.4, 0.0, 0.2, 0.4), (0.4, 0.2, 0.0, 0.4)]
    table = rows((tmp_path / "fig4_fig4_a_depolarizing.csv").read_text())
    assert len(table) == 501


def test_figure_6_entropies(capsys, tmp_path):
    run(capsys, "figure", "6", "--out", str(tmp_path))
    ent = json.loads((tmp_path / "meta.json").read_text())["entropies"]
    assert ent["S_total"] == pytest.approx(0.402, abs=0.01)


def test_figure_table1(capsys, tmp_path):
    code, _, _ = run(capsys, "figure", "table1", "--samples", "5", "--out", str(tmp_path))
    assert code == 0
    table = rows((tmp_path / "table1.csv").read_text())
    assert len(table) == 16 and all(r["misclassified"] == "0" for r in table)


def test_classify(capsys, rng):
    _, out, _ = run(capsys, "classify", "--state", "bell", "--channel", '{"kind": "dep"}')
    rep = json.loads(out)
    assert all(v["verdict"] == "Symmetric" for v in rep["verdicts"].values())

    _, out, _ = run(capsys, "classify", "--state", "fig3", "--channel", '{"kind": "ad"}',
                    "--measures", "C")
    rep = json.loads(out)
    assert rep["verdicts"]["concurrence"]["verdict"] == "Asymmetric"
    assert rep["zero_set"]["L"] and not rep["zero_set"]["U"]

    x = family_state(rng, 4)
    _, out, _ = run(capsys, "classify", "--state", json.dumps(x.to_json()),
                    "--channel", '{"kind": "dep"}')
    rep = json.loads(out)
    assert rep["verdicts"]["concurrence"]["verdict"] == "Asymmetric"
    assert rep["verdicts"]["bell"]["verdict"] == "Symmetric"


@pytest.mark.parametrize("hidden", [("ad", "U", 0.3), ("dep", "L", 0.7)])
def test_discriminate(capsys, hidden):
    kind, loc, p = hidden
    spec = json.dumps({"kind": kind, "location": loc, "p": p})
    code, out, _ = run(capsys, "discriminate", "--channel", spec)
    res = json.loads(out)
    assert code == 0 and res["location"] == loc
    assert res["p_estimate"] == pytest.approx(p, abs=1e-6)


def test_discriminate_config(capsys):
    code, out, _ = run(capsys, "discriminate", "--config",
                       '{"layout": "c", "slots": ["ad", "dep", "ad"], "p": 0.4}')
    assert code == 0 and json.loads(out)["kind"] == "configs_ac"


def test_discriminate_dephasing_fails(capsys):
    code, _, err = run(capsys, "discriminate", "--channel", '{"kind": "pd", "location": "U", "p": 0.4}')
    assert code == 3
    assert json.loads(err)["error"] in ("NoFit", "Ambiguous")


@pytest.mark.parametrize("argv", [
    ("sweep", "--state", "{not json", "--channel", '{"kind": "ad"}'),
    ("sweep", "--state", "bell"),
    ("sweep", "--state", "nosuchpreset", "--channel", '{"kind": "ad"}'),
    ("sweep", "--state", "bell", "--channel", '{"kind": "ad"}', "--measures", "Q"),
    ("sweep", "--state", '{"diag": [2, 0, 0, -1]}', "--channel", '{"kind": "ad"}'),
    ("sweep", "--state", '{"rho11": 1}', "--channel", '{"kind": "ad"}'),
    ("classify", "--state", "bell", "--channel", '{"kind": "ad"}', "--grid", "0:3:1"),
    ("evolve", "--state", "bell", "--config", '{"slots": ["ad"]}'),
])
def test_input_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    msg = json.loads(err)
    assert set(msg) >= {"error", "message"}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "xsym", "evolve", "--state", "bell",
                           "--channel", AD_U], capture_output=True, text=True, check=True)
    res = json.loads(proc.stdout)
    assert res["state"]["diag"] == pytest.approx([0.5, 0.15, 0.0, 0.35])
    assert res["bell"] == pytest.approx(2 * np.sqrt(1.4))  # u1 = u3 = 0.7 > u2 = 0.49
