import numpy as np
import pytest

from curvest.cli import main
from curvest.pointcloud import load_cloud, load_labeled


@pytest.fixture
def torus_csv(tmp_path):
    path = tmp_path / "t.csv"
    assert main(["generate", "--surface", "torus-sectional", "--n", "400", "--seed", "1", "--out", str(path)]) == 0
    return path


def test_generate_labels(torus_csv):
    cloud, labels = load_labeled(torus_csv)
    assert cloud.n == 400 and labels.normals.shape == (400, 3)


def test_generate_hypersphere(tmp_path):
    p = tmp_path / "s.csv"
    assert main(["generate", "--surface", "hypersphere", "--n", "10", "--dim", "5", "--radius", "2", "--out", str(p)]) == 0
    assert np.allclose(np.linalg.norm(load_cloud(p).points, axis=1), 2)


def test_noise_keeps_labels(torus_csv, tmp_path):
    out = tmp_path / "n.csv"
    assert main(["noise", str(torus_csv), "--kind", "uniform", "--scale", "0.1", "--seed", "3", "--out", str(out)]) == 0
    a, la = load_labeled(torus_csv)
    b, lb = load_labeled(out)
    assert np.abs(a.points - b.points).max() <= 0.1
    assert np.array_equal(la.normals, lb.normals)


@pytest.mark.parametrize("method", ["pca", "vcm"])
def test_normals(torus_csv, tmp_path, capsys, method):
    out = tmp_path / "n.csv"
    args = ["normals", str(torus_csv), "--method", method, "--k", "20", "--out", str(out)]
    if method == "vcm":
        args = ["normals", str(torus_csv), "--method", "vcm", "--conv-k", "20", "--samples", "30000", "--out", str(out)]
    assert main(args) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "index,n0,n1,n2" and len(lines) == 401
    assert "mean_abs_cos" in capsys.readouterr().err


def test_vcm_upper_triangle(torus_csv, tmp_path):
    out = tmp_path / "v.csv"
    assert main(["vcm", str(torus_csv), "--R", "0.5", "--samples", "5000", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "index,v00,v01,v02,v11,v12,v22"


@pytest.mark.parametrize("method", ["wme", "vwme"])
def test_estimate(torus_csv, tmp_path, method):
    out = tmp_path / "e.csv"
    args = ["estimate", str(torus_csv), "--method", method, "--normal-k", "30", "--mask-k", "20",
            "--conv-k", "20", "--vcm-samples", "30000", "--out", str(out)]
    assert main(args) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "index,H,K,k0,k1,fallback,failed"
    assert len(lines) == 401


def test_sweep_exit_codes(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nname = c\n[surface]\nn = 100\n[estimator]\nnormal = knn:10\n")
    assert main(["sweep", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    assert main(["sweep", "--config", str(cfg), "--set", "estimator.normal=knn:200", "--out-dir", str(tmp_path / "o")]) == 1


def test_plot_and_errors(tmp_path, capsys):
    t = tmp_path / "r.csv"
    t.write_text("a,b\n1,2\n2,3\n")
    assert main(["plot", str(t), "--kind", "line", "--x", "a", "--y", "b", "--out", str(tmp_path / "p.svg")]) == 0
    assert main(["plot", str(t), "--kind", "line", "--x", "a", "--y", "c", "--out", str(tmp_path / "p.svg")]) == 2
    assert "MissingColumn" in capsys.readouterr().err
    assert main(["noise", str(tmp_path / "none.csv"), "--kind", "gaussian", "--scale", "1", "--out", "x"]) == 2


def test_sweep_list(capsys):
    assert main(["sweep", "--list"]) == 0
    assert "fig10" in capsys.readouterr().out
