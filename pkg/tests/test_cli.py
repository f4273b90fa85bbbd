import json

import numpy as np
import pytest

from srrlasso.bench import lambda_from_ratio
from srrlasso.cli import main
from srrlasso.ingest import bundled_example_path, read_dense_csv, read_trace, write_dense_csv
from srrlasso.spectral import MAX_P

EXAMPLE = str(bundled_example_path())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_srrt_example(capsys, tmp_path):
    trace = tmp_path / "t.csv"
    code, out, _ = run(capsys, "solve", "--input", EXAMPLE, "--lambda", "0", "--variant", "srrt", "--trace", str(trace))
    assert code == 0
    f = float(out.split("f")[1].split()[0])
    assert f <= 1e-10
    rows = read_trace(trace).rows
    assert next(r.k for r in rows if r.f <= 1e-10) <= 30


def test_solve_max_sweeps_exit_2(capsys):
    code, out, _ = run(capsys, "solve", "--input", EXAMPLE, "--lambda", "0", "--variant", "srrc", "--step-tol", "0", "--max-sweeps", "30")
    assert code == 2 and "max_sweeps" in out


def test_ratio_round_trip_to_trace(capsys, tmp_path, example_arrays):
    trace = tmp_path / "t.csv"
    code, _, _ = run(capsys, "solve", "--input", EXAMPLE, "--ratio", "0.3", "--trace", str(trace))
    assert code == 0
    assert read_trace(trace).lam == lambda_from_ratio(*example_arrays, 0.3)


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["solve", "--lambda", "0"])
    assert e.value.code == 1
    assert "usage" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        main(["solve", "--input", EXAMPLE, "--ratio", "0.5", "--lambda", "1"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1


def test_bad_input_file(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    code, _, err = run(capsys, "solve", "--input", str(bad), "--lambda", "0")
    assert code == 1 and "ragged" in err
    code, _, _ = run(capsys, "solve", "--input", str(tmp_path / "none.csv"), "--lambda", "0")
    assert code == 1
    code, _, _ = run(capsys, "solve", "--input", EXAMPLE, "--lambda", "-1")
    assert code == 1


def test_eigen_example(capsys, tmp_path):
    trace = tmp_path / "srrc.csv"
    run(capsys, "solve", "--input", EXAMPLE, "--lambda", "0", "--variant", "srrc", "--step-tol", "0", "--max-sweeps", "30", "--trace", str(trace))
    code, out, _ = run(capsys, "eigen", "--input", EXAMPLE, "--alphas-from", str(trace))
    assert code == 0
    rep = json.loads(out)
    ev = sorted(z[0] for z in rep["eigenvalues"])
    np.testing.assert_allclose(ev, [0.0, 0.00219338, 0.12412229, 0.62606165, 0.93956707], atol=1e-6)
    assert rep["spectral_bound_ok"]
    assert rep["t_magnitudes"][28][-1] <= 1e-5


def test_eigen_cd_trace_uses_unit_factors(capsys, tmp_path):
    trace = tmp_path / "cd.jsonl"
    run(capsys, "solve", "--input", EXAMPLE, "--lambda", "0", "--step-tol", "0", "--max-sweeps", "30", "--trace", str(trace))
    code, out, _ = run(capsys, "eigen", "--input", EXAMPLE, "--alphas-from", str(trace))
    assert code == 0
    assert json.loads(out)["t_magnitudes"][28][-1] == pytest.approx(0.164023, abs=1e-4)


def test_eigen_orthogonal_and_scale(capsys, tmp_path):
    path = tmp_path / "eye.csv"
    write_dense_csv(path, np.hstack([np.eye(3), np.ones((3, 1))]))
    code, out, _ = run(capsys, "eigen", "--input", str(path))
    assert code == 0
    assert all(abs(re) == 0 and abs(im) == 0 for re, im in json.loads(out)["eigenvalues"])
    code, _, err = run(capsys, "eigen", "--input", str(path), "--max-p", "2")
    assert code == 3 and "exceeds" in err
    assert MAX_P >= 512


def test_synth(capsys, tmp_path):
    a = [tmp_path / n for n in ("x1.csv", "y1.csv", "x2.csv", "y2.csv", "x3.csv", "y3.csv")]
    assert run(capsys, "synth", "--n", "50", "--p", "100", "--seed", "4", "--out-x", str(a[0]), "--out-y", str(a[1]))[0] == 0
    run(capsys, "synth", "--n", "50", "--p", "100", "--seed", "4", "--out-x", str(a[2]), "--out-y", str(a[3]))
    run(capsys, "synth", "--n", "50", "--p", "100", "--seed", "5", "--out-x", str(a[4]), "--out-y", str(a[5]))
    assert a[0].read_bytes() == a[2].read_bytes() and a[1].read_bytes() == a[3].read_bytes()
    assert a[0].read_bytes() != a[4].read_bytes()
    X, y = read_dense_csv(a[0], a[1])
    assert X.shape == (50, 100) and y.shape == (50,)
    code, _, _ = run(capsys, "synth", "--n", "2", "--p", "2", "--out-x", str(tmp_path / "no" / "x.csv"), "--out-y", str(a[1]))
    assert code == 1


@pytest.mark.slow
def test_synth_wide_shape(capsys, tmp_path):
    x, y = tmp_path / "x.csv", tmp_path / "y.csv"
    assert run(capsys, "synth", "--n", "500", "--p", "1000", "--out-x", str(x), "--out-y", str(y))[0] == 0
    assert len(x.read_text().splitlines()) == 500
    assert len(x.read_text().splitlines()[0].split(",")) == 1000
    assert len(y.read_text().splitlines()) == 500


def test_bench_cli(capsys, tmp_path):
    out_csv = tmp_path / "b.csv"
    argv = ["bench", "--synthetic", "30x40", "--input", EXAMPLE, "--ratios", "0.5,0.1", "--repeats", "2", "--out", str(out_csv)]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert "synthetic n=30 p=40" in out and "single run" in out
    first = out_csv.read_text()
    run(capsys, *argv, "--jobs", "3")
    assert out_csv.read_text() == first


def test_bench_needs_source(capsys):
    code, _, err = run(capsys, "bench")
    assert code == 1 and "--synthetic" in err
    with pytest.raises(SystemExit) as e:
        main(["bench", "--synthetic", "30by40"])
    assert e.value.code == 1
