import json

import numpy as np
import pytest

from delaylattice import cli
from delaylattice.core import LatticeSpec, Model, SLParams, parse_config
from delaylattice.pattern import write_pgm
from delaylattice.sl import sl_enumerate_plane_waves


def write_config(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def sl_config(tmp_path):
    return write_config(tmp_path / "sl.json", {
        "model": "sl", "M": 3, "N": 3,
        "params": {"alpha": -2.5, "beta": 0.5},
        "C": 2.0, "delay": {"homogeneous": 20.0},
    })


def read_manifest(outdir):
    return json.loads((outdir / "manifest.json").read_text())


def test_spectrum_stst_runs_and_is_reproducible(tmp_path, sl_config):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert cli.main(["spectrum-stst", "--config", sl_config,
                     "--out", str(out1)]) == 0
    assert cli.main(["spectrum-stst", "--config", sl_config,
                     "--out", str(out2)]) == 0
    man = read_manifest(out1)
    assert set(man["outputs"]) == {"eigenvalues.csv", "resolved_config.json"}
    # data artifacts are byte-identical across reruns
    a = (out1 / "eigenvalues.csv").read_bytes()
    assert a == (out2 / "eigenvalues.csv").read_bytes()
    assert len(a.splitlines()) > 1
    # the echoed config round-trips through the parser
    cfg = parse_config((out1 / "resolved_config.json").read_text())
    assert cfg.spec.rows == 3 and cfg.tau == 20.0


def test_spectrum_stst_alpha_override(tmp_path, sl_config):
    out = tmp_path / "r"
    assert cli.main(["spectrum-stst", "--config", sl_config,
                     "--out", str(out), "--alpha", "-3.5"]) == 0
    echoed = json.loads((out / "resolved_config.json").read_text())
    assert echoed["params"]["alpha"] == -3.5


def test_manifest_hashes_match_files(tmp_path, sl_config):
    import hashlib
    out = tmp_path / "r"
    cli.main(["planewaves", "--config", sl_config, "--out", str(out),
              "--alpha", "3.0"])
    man = read_manifest(out)
    for name, digest in man["outputs"].items():
        got = hashlib.sha256((out / name).read_bytes()).hexdigest()
        assert got == digest


def test_planewaves_count_matches_enumeration(tmp_path, sl_config):
    out = tmp_path / "r"
    assert cli.main(["planewaves", "--config", sl_config, "--out", str(out),
                     "--alpha", "3.0"]) == 0
    n_lines = len((out / "planewaves.csv").read_text().splitlines()) - 1
    spec = LatticeSpec(rows=3, cols=3, model=Model.STUART_LANDAU,
                       params=SLParams(alpha=3.0, beta=0.5), coupling=2.0)
    waves = sl_enumerate_plane_waves(spec.params, 2.0, 20.0, spec)
    assert n_lines == len(waves)


def test_dispersion_outputs_finite_surface(tmp_path, sl_config):
    out = tmp_path / "r"
    assert cli.main(["dispersion", "--config", sl_config, "--out", str(out),
                     "--grid", "8", "--alpha", "-2.5"]) == 0
    data = np.loadtxt(out / "dispersion.csv", delimiter=",", skiprows=1)
    assert data.shape == (64, 3)
    assert np.all(np.isfinite(data))
    assert np.max(data[:, 2]) < 0.0   # alpha below threshold: stable surface


def test_floquet_verdicts(tmp_path, sl_config):
    out = tmp_path / "r"
    assert cli.main(["floquet", "--config", sl_config, "--out", str(out),
                     "--alpha", "3.0", "--max-waves", "1"]) == 0
    lines = (out / "floquet.csv").read_text().splitlines()
    assert lines[0] == "k1,k2,q1,q2,re_lambda,im_lambda,class"
    assert len(lines) == 2
    assert lines[1].rsplit(",", 1)[1] in ("stable", "strong", "uniform",
                                          "modulational")


def test_hopf_threshold(tmp_path, sl_config):
    out = tmp_path / "r"
    assert cli.main(["hopf", "--config", sl_config, "--out", str(out)]) == 0
    alpha_h = float((out / "hopf.csv").read_text().splitlines()[1])
    assert abs(alpha_h + 2.0) < 0.1


def test_simulate_artifacts(tmp_path):
    cfgp = write_config(tmp_path / "sim.json", {
        "model": "sl", "M": 2, "N": 2,
        "params": {"alpha": 1.0, "beta": 1.0},
        "C": 0.5, "delay": {"homogeneous": 2.0},
        "sim": {"t_end": 10.0, "dt": 0.01, "record_every": 10},
        "seed": 1,
    })
    out = tmp_path / "r"
    assert cli.main(["simulate", "--config", cfgp, "--out", str(out)]) == 0
    header = json.loads((out / "frames.json").read_text())
    frames = np.fromfile(out / "frames.f64", dtype="<f8")
    assert frames.size == header["n_frames"] * 2 * 2 * 2
    assert (out / "snapshots.csv").exists()
    assert (out / "spikes.csv").exists()


def test_simulate_requires_sim_section(tmp_path, sl_config):
    assert cli.main(["simulate", "--config", sl_config,
                     "--out", str(tmp_path / "r")]) == 1


def test_config_error_exit_code(tmp_path):
    bad = write_config(tmp_path / "bad.json", {
        "model": "sl", "M": 2, "N": 2,
        "params": {"alpha": 1.0, "beta": 1.0, "gamma": 0.0},
        "C": 1.0,
    })
    assert cli.main(["spectrum-stst", "--config", bad,
                     "--out", str(tmp_path / "r")]) == 1


def test_missing_delay_exit_code(tmp_path):
    cfgp = write_config(tmp_path / "nodelay.json", {
        "model": "sl", "M": 2, "N": 2,
        "params": {"alpha": 1.0, "beta": 1.0}, "C": 1.0,
    })
    assert cli.main(["spectrum-stst", "--config", cfgp,
                     "--out", str(tmp_path / "r")]) == 1


def test_numerical_failure_exit_code(tmp_path, sl_config, monkeypatch):
    from delaylattice.dde import SimulationError

    def boom(*a, **k):
        raise SimulationError("synthetic failure")

    monkeypatch.setattr(cli.sl, "sl_hopf_threshold", boom)
    assert cli.main(["hopf", "--config", sl_config,
                     "--out", str(tmp_path / "r")]) == 2


def test_encode_and_verify_pipeline(tmp_path):
    img = np.array([[0, 255], [128, 64]], dtype=np.uint8)
    imgp = tmp_path / "pat.pgm"
    write_pgm(imgp, img)
    enc = tmp_path / "enc"
    assert cli.main(["encode", "--image", str(imgp), "--out", str(enc),
                     "--tau", "10.0", "--eta-max", "0.5"]) == 0
    down = np.loadtxt(enc / "delays_down.csv", delimiter=",", ndmin=2)
    eta = np.loadtxt(enc / "eta.csv", delimiter=",", ndmin=2)
    assert down.shape == (2, 2)
    assert eta[0, 0] == 0.0 and eta[0, 1] == 0.5

    # oscillatory SL run, then check fidelity reporting end to end
    cfgp = write_config(tmp_path / "sim.json", {
        "model": "sl", "M": 2, "N": 2,
        "params": {"alpha": 1.0, "beta": 1.0},
        "C": 0.0, "delay": {"homogeneous": 1.0},
        "sim": {"t_end": 60.0, "dt": 0.01, "record_every": 5},
        "seed": 3,
    })
    rundir = tmp_path / "run"
    assert cli.main(["simulate", "--config", cfgp, "--out", str(rundir)]) == 0
    etap = tmp_path / "eta.csv"
    np.savetxt(etap, np.zeros((2, 2)), delimiter=",")
    out = tmp_path / "ver"
    assert cli.main(["verify", "--run", str(rundir), "--eta", str(etap),
                     "--out", str(out), "--t-discard", "20.0"]) == 0
    report = json.loads((out / "fidelity.json").read_text())
    assert set(report) == {"correlation", "max_dev", "missing_nodes"}
    assert report["missing_nodes"] == []
