import json
import math

import numpy as np
import pytest

from sgdicke.cli import main
from sgdicke.config import ConfigError, load_amplitudes, parse_config

BASE = """
[model]
n_qubits = 1
coupling = 1
[state]
alpha = 2
[time]
t_end = 4
steps = 9
[output]
prefix = t
"""


def write(tmp_path, text=BASE, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run(tmp_path, *args):
    return main([args[0], write(tmp_path), "--output", str(tmp_path / "out"), *args[1:]])


def test_round_trip():
    cfg = parse_config(BASE + "[qfunc]\ntimes = 1, 2\ncenter = 1+2j\n[rabi]\nomega_f = 1\ng = 0.01\n")
    again = parse_config(cfg.to_ini())
    assert again == cfg
    assert again.digest() == cfg.digest()


@pytest.mark.parametrize(
    "text, field",
    [
        ("[model]\nkerr = 1\n", "model.n_qubits"),
        ("[model]\nn_qubits = 1\nkerr = abc\n", "model.kerr"),
        ("[model]\nn_qubits = 1\n[time]\nsteps = 0\n", "time.steps"),
        ("[model]\nn_qubits = 1\n[time]\ntimes = 1, 0.5\n", "time.times"),
        ("[model]\nn_qubits = 1\n[state]\nalpha = inf\n", "state.alpha"),
        ("[model]\nn_qubits = 1\nbogus = 1\n", "model.bogus"),
        ("[model\nn_qubits = 1\n", "syntax"),
    ],
)
def test_config_errors_name_the_field(text, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        parse_config(text)


def test_overrides():
    cfg = parse_config(BASE, ["model.kerr=0.5", "time.steps=3"])
    assert cfg.model.kerr == 0.5 and cfg.time.values().size == 3
    with pytest.raises(ConfigError):
        parse_config(BASE, ["kerr=0.5"])


def test_simulate_outputs(tmp_path):
    assert run(tmp_path, "simulate", "--workers", "1") == 0
    csv = tmp_path / "out" / "t_observables.csv"
    lines = csv.read_text().splitlines()
    assert lines[0] == "t,jz,mean_n,purity_deficit,entropy"
    data = np.loadtxt(csv, delimiter=",", skiprows=1)
    assert data.shape == (9, 5)
    meta = json.loads((tmp_path / "out" / "t_observables.json").read_text())
    assert meta["p_max"] >= 4 + 20 + 10 and meta["tail_mass"] < 1e-12
    assert len(meta["config_hash"]) == 64 and "numpy" in meta["versions"]


def test_simulate_deterministic(tmp_path):
    out = tmp_path / "out" / "t_observables.csv"
    assert run(tmp_path, "simulate", "--workers", "1") == 0
    first = out.read_bytes()
    assert run(tmp_path, "simulate", "--workers", "1") == 0
    assert out.read_bytes() == first
    assert run(tmp_path, "simulate", "--workers", "3") == 0
    assert out.read_bytes() == first


def test_simulate_decoupled_and_single_point(tmp_path):
    assert run(tmp_path, "simulate", "--set", "model.coupling=0", "--set", "model.kerr=0.3") == 0
    data = np.loadtxt(tmp_path / "out" / "t_observables.csv", delimiter=",", skiprows=1)
    assert np.abs(data[:, 4]).max() < 1e-10
    assert run(tmp_path, "simulate", "--set", "time.steps=1", "--set", "model.n_qubits=3") == 0
    data = np.loadtxt(tmp_path / "out" / "t_observables.csv", delimiter=",", skiprows=1, ndmin=2)
    assert data.shape == (1, 5)
    assert data[0, 1] == pytest.approx(-1.5, abs=1e-10) and abs(data[0, 4]) < 1e-10


def test_simulate_config_error_exit(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--set", "model.kerr=x") == 2
    assert "model.kerr" in capsys.readouterr().err


def test_simulate_truncation_exit(tmp_path):
    amps = tmp_path / "amps.csv"
    amps.write_text("p,m,re,im\n3,1,1,0\n")
    code = main(["simulate", write(tmp_path), "--output", str(tmp_path / "out"),
                 "--set", f"state.amplitudes={amps}", "--set", "state.cutoff=3"])
    assert code == 3
    code = main(["simulate", write(tmp_path), "--output", str(tmp_path / "out"),
                 "--set", f"state.amplitudes={amps}"])
    assert code == 0


def test_load_amplitudes(tmp_path):
    path = tmp_path / "a.csv"
    path.write_text("p,m,re,im\n0,0,0.6,0\n2,1,0,0.8\n")
    st = load_amplitudes(str(path), 1)
    assert st.amplitudes[2, 1] == 0.8j and st.norm() == pytest.approx(1.0)
    path.write_text("p,m,re,im\n0,4,1,0\n")
    with pytest.raises(ConfigError):
        load_amplitudes(str(path), 1)


def test_spectrum(tmp_path):
    assert run(tmp_path, "spectrum", "--set", "spectrum.s_max=3") == 0
    data = np.loadtxt(tmp_path / "out" / "t_spectrum.csv", delimiter=",", skiprows=1)
    assert data[0, 2] == 0.0
    for s in (1, 2, 3):
        nu = data[data[:, 0] == s, 2]
        np.testing.assert_allclose(nu, [-math.sqrt(s), math.sqrt(s)], atol=1e-12)
    assert np.abs(data[:, 3]).max() < 1e-10


def test_qfunc_explicit_and_auto(tmp_path):
    assert run(tmp_path, "qfunc", "--set", "qfunc.times=0", "--set", "qfunc.resolution=41") == 0
    grid = np.loadtxt(tmp_path / "out" / "t_q_0.csv", delimiter=",", skiprows=1)
    meta = json.loads((tmp_path / "out" / "t_q.json").read_text())
    re, im = np.array(meta["re"]), np.array(meta["im"])
    i, k = np.unravel_index(np.argmax(grid), grid.shape)
    assert abs(re[k] - 2) < 0.2 and abs(im[i]) < 0.2
    assert run(tmp_path, "qfunc", "--set", "qfunc.auto=true", "--set", "qfunc.resolution=21",
               "--set", "time.t_end=12", "--set", "time.steps=121") == 0
    meta = json.loads((tmp_path / "out" / "t_q.json").read_text())
    assert meta["mode"] == "auto" and meta["times"][0] == pytest.approx(meta["times"][1] / 2)


def test_validate(tmp_path, capsys):
    args = ["--set", "validate.p_cut=30", "--set", "validate.support=10"]
    assert run(tmp_path, "validate", *args) == 0
    assert "PASS" in capsys.readouterr().out
    assert run(tmp_path, "validate", "--set", "model.n_qubits=2", "--corrupt", *args) == 5
    assert run(tmp_path, "validate", "--set", "validate.times=0", *args) == 0
    rep = json.loads((tmp_path / "out" / "t_validate.json").read_text())["report"]
    assert rep["fast_vs_oracle_max"] == 0.0
    assert all(v == 0.0 for v in rep["factorized_vs_oracle"]["0.0"].values())
    assert run(tmp_path, "validate", "--set", "model.n_qubits=9", *args) == 2


def test_map_rabi(tmp_path, capsys):
    base = ["--set", "rabi.omega_f=1", "--set", "rabi.omega_q=1.2", "--set", "rabi.g=0.02"]
    assert run(tmp_path, "map-rabi", *base) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["effective"]["coupling"] == pytest.approx(2 * 0.02 / 2.2)
    assert report["valid"]
    assert run(tmp_path, "map-rabi", *base, "--set", "rabi.chi=0.3") == 0
    assert json.loads(capsys.readouterr().out)["flags"]["squeeze"] is False
    assert run(tmp_path, "map-rabi", "--set", "rabi.omega_q=-1", "--set", "rabi.g=0.1") == 4
    assert run(tmp_path, "map-rabi") == 2
