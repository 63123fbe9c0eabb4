import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlsh.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main, points_to_jsonl, read_points
from hyperlsh.experiments import CSV_COLUMNS, ExperimentConfig, csv_rows, rho_curve, to_csv
from hyperlsh.geometry import distance_poincare, point_at_distance


def _gen(tmp_path, name="pts.jsonl", d=2, n=300, seed=1, extra=()):
    out = tmp_path / name
    assert main(["gen", "--d", str(d), "--n", str(n), "--seed", str(seed), "--out", str(out), *extra]) == EXIT_OK
    return out


def test_gen_records(tmp_path):
    out = _gen(tmp_path)
    lines = out.read_text().splitlines()
    assert len(lines) == 300
    recs = [json.loads(line) for line in lines]
    assert [r["id"] for r in recs] == list(range(300))
    assert all(r["model"] == "ball" and np.linalg.norm(r["coords"]) <= 0.99 for r in recs)


def test_gen_deterministic(tmp_path):
    a = _gen(tmp_path, "a.jsonl")
    b = _gen(tmp_path, "b.jsonl")
    assert a.read_bytes() == b.read_bytes()


def test_gen_empty(tmp_path):
    assert _gen(tmp_path, n=0).read_text() == ""


def test_gen_unwritable(tmp_path, capsys):
    code = main(["gen", "--d", "2", "--n", "3", "--seed", "0", "--out", str(tmp_path / "missing" / "x")])
    assert code == EXIT_DATA
    assert "cannot write" in capsys.readouterr().err


def test_seed_is_mandatory(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--d", "2", "--n", "3"])
    assert exc.value.code == EXIT_USAGE


def test_gen_halfspace(tmp_path):
    out = _gen(tmp_path, d=3, n=20, extra=("--model", "halfspace"))
    pts, model = read_points(str(out))
    assert model == "halfspace" and np.all(pts[:, 0] > 0)


def test_rho_two_rows(tmp_path, capsys):
    data = _gen(tmp_path)
    out = tmp_path / "rho.csv"
    args = ["rho", "--data", str(data), "--r", "0.2", "--c-grid", "2,4", "--seed", "3", "--reps", "200"]
    assert main([*args, "--out", str(out)]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == list(CSV_COLUMNS) and len(rows) == 3
    for row in rows[1:]:
        rec = dict(zip(CSV_COLUMNS, row))
        assert float(rec["rho_hat"]) < float(rec["one_over_c"])


def test_rho_matches_library(tmp_path):
    data = _gen(tmp_path, seed=7)
    out = tmp_path / "rho.csv"
    R = math.log(199.0)
    args = ["rho", "--data", str(data), "--r", "0.2", "--c-grid", "2,3", "--seed", "7", "--reps", "100"]
    assert main([*args, "--radius", repr(R), "--out", str(out)]) == EXIT_OK
    cfg = ExperimentConfig(2, 300, R, 0.2, (2.0, 3.0), 100, 7)
    assert out.read_text() == to_csv(csv_rows(cfg, rho_curve(cfg)))


def test_rho_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": 0, "model": "ball"}\n')
    assert main(["rho", "--data", str(bad), "--r", "0.2", "--c-grid", "2", "--seed", "0"]) == EXIT_DATA
    assert "malformed" in capsys.readouterr().err


def test_rho_bad_grid(tmp_path):
    data = _gen(tmp_path, n=5)
    assert main(["rho", "--data", str(data), "--r", "0.2", "--c-grid", "x", "--seed", "0"]) == EXIT_USAGE


def test_index_build_and_query(tmp_path, capsys):
    data = _gen(tmp_path)
    idx = tmp_path / "index.json"
    assert main(["index", "build", "--data", str(data), "--r", "0.2", "--c", "2.5", "--seed", "4", "--out", str(idx)]) == 0
    pts, _ = read_points(str(data))
    capsys.readouterr()
    point = ",".join(repr(float(v)) for v in pts[11])
    assert main(["index", "query", "--index", str(idx), f"--point={point}"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "11,0.0"


def test_index_query_none(tmp_path, capsys):
    data = tmp_path / "two.jsonl"
    data.write_text(points_to_jsonl(np.array([[0.0, 0.0], [0.05, 0.0]]), "ball"))
    idx = tmp_path / "index.json"
    assert main(["index", "build", "--data", str(data), "--r", "0.01", "--c", "2", "--seed", "0", "--out", str(idx)]) == 0
    capsys.readouterr()
    assert main(["index", "query", "--index", str(idx), "--point=-0.6,0.5"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "none"


def test_index_dimension_mismatch(tmp_path, capsys):
    data = _gen(tmp_path, n=20)
    idx = tmp_path / "index.json"
    main(["index", "build", "--data", str(data), "--r", "0.2", "--c", "2.5", "--seed", "4", "--out", str(idx)])
    assert main(["index", "query", "--index", str(idx), "--point=0.1,0.1,0.1"]) == EXIT_DATA
    assert "shape" in capsys.readouterr().err


def test_index_overrides_must_pair(tmp_path):
    data = _gen(tmp_path, n=20)
    args = ["index", "build", "--data", str(data), "--r", "0.2", "--c", "2.5", "--seed", "4", "--out", str(tmp_path / "i")]
    assert main([*args, "--K", "3"]) == EXIT_USAGE
    assert main([*args, "--K", "3", "--L", "2"]) == EXIT_OK


def test_index_planted_recall(tmp_path, capsys):
    data = _gen(tmp_path, n=1000, seed=12)
    idx = tmp_path / "index.json"
    assert main(["index", "build", "--data", str(data), "--r", "0.2", "--c", "2.5", "--seed", "5", "--out", str(idx)]) == 0
    pts, _ = read_points(str(data))
    rng = np.random.default_rng(13)
    ids = rng.choice(1000, 40, replace=False)
    qs = point_at_distance(pts[ids], rng.uniform(0, 0.2, 40), rng)
    hits = 0
    for q in qs:
        capsys.readouterr()
        main(["index", "query", "--index", str(idx), "--point=" + ",".join(repr(float(v)) for v in q)])
        line = capsys.readouterr().out.strip()
        if line != "none":
            pid, dist = line.split(",")
            assert float(dist) <= 0.5
            assert distance_poincare(pts[int(pid)], q) == pytest.approx(float(dist))
            hits += 1
    assert hits / 40 >= 0.9


@pytest.mark.parametrize("which", ["integral", "alpha", "puiseux"])
def test_validate_passes(which, capsys):
    assert main(["validate", which]) == EXIT_OK
    out = capsys.readouterr().out
    assert out and "FAIL" not in out


def test_validate_alpha_prints(capsys):
    main(["validate", "alpha"])
    out = capsys.readouterr().out
    assert "0.6312" in out and "1.584" in out


def test_validate_unknown():
    with pytest.raises(SystemExit) as exc:
        main(["validate", "bogus"])
    assert exc.value.code == EXIT_USAGE


coords = st.floats(-0.7, 0.7, allow_nan=False, allow_subnormal=False)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=20))
def test_jsonl_reparse_identical(tmp_path_factory, rows):
    pts = np.array(rows)
    path = tmp_path_factory.mktemp("j") / "p.jsonl"
    path.write_text(points_to_jsonl(pts, "ball"))
    back, model = read_points(str(path))
    assert model == "ball"
    np.testing.assert_array_equal(back, pts)
