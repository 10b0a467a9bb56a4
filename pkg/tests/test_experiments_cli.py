import csv
import io
import json

import pytest

from skelbary import cli
from skelbary.experiments import (ExperimentSpec, generate, probe_infeasible, run_theorem_sweep)
from skelbary.polytope import euler_characteristic_holds, polytope_from_json


@pytest.mark.parametrize("gen,dim,fv", [
    ("simplex", 2, (3, 3)), ("cube", 3, (8, 12, 6)), ("cross_polytope", 3, (6, 12, 8)),
    ("simplex", 4, (5, 10, 10, 5)), ("cube", 1, (2,)),
])
def test_generator_f_vectors(gen, dim, fv):
    assert generate(gen, dim).f_vector() == fv


def test_random_hull_is_seeded():
    a = generate("random_hull", 3, seed=42)
    b = generate("random_hull", 3, seed=42)
    assert a.vertices == b.vertices and a.facets == b.facets
    assert a.dim == 3 and euler_characteristic_holds(a)
    assert generate("random_hull", 3, seed=43).vertices != a.vertices
    assert all(c.denominator in (1, 2, 4, 5, 8, 10, 20, 25, 40, 50, 100, 125, 200, 250, 500, 1000)
               for v in a.vertices for c in v)


def test_generator_errors():
    with pytest.raises(ValueError):
        generate("cube", 0)
    with pytest.raises(ValueError):
        generate("dodecahedron", 3)
    with pytest.raises(ValueError):
        generate("random_hull", 3, n_points=4)


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("cube", 2, (3, 2), (1, 1))
    with pytest.raises(ValueError):
        ExperimentSpec("cube", 2, (1, 2), (1, 1), trials=0)
    with pytest.raises(ValueError):
        ExperimentSpec("cube", 2, (1, 2), (1, 1), seed=-1)


def test_small_sweep():
    rep = run_theorem_sweep(ExperimentSpec("cube", 2, (2, 2), (1, 1)))
    assert len(rep.rows) == 3
    assert rep.summary() == {"success": 3, "failure": 0, "violations": 0}
    assert all(float(r["phi_max_abs"]) < 1e-9 for r in rep.rows)


def test_sweep_rejects_small_kn():
    with pytest.raises(ValueError):
        run_theorem_sweep(ExperimentSpec("cube", 3, (1, 2), (1, 1)))
    with pytest.raises(ValueError):
        probe_infeasible(ExperimentSpec("random_hull", 3, (2, 3), (1, 1)))


def test_probe_square_like():
    rep = probe_infeasible(ExperimentSpec("cube", 2, (1, 1), (1, 1), trials=2))
    assert [r["status"] for r in rep.rows] == ["infeasible", "infeasible"]


def test_csv_is_byte_identical_without_timing():
    spec = ExperimentSpec("random_hull", 2, (1, 2), (2, 2), trials=2, seed=7)
    a = run_theorem_sweep(spec).to_csv(timing=False)
    b = run_theorem_sweep(spec, parallel=True, workers=2).to_csv(timing=False)
    assert a == b
    header = a.splitlines()[0].split(",")
    assert header[:8] == ["generator", "d", "n", "k", "status", "tuples_examined",
                          "phi_max_abs", "elapsed_ms"]


def test_csv_row_replays_through_cli(tmp_path, capsys):
    spec = ExperimentSpec("random_hull", 2, (1, 2), (2, 2), seed=11)
    text = run_theorem_sweep(spec).to_csv()
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows
    for r in rows:
        code = cli.main(["decompose", "--generator", r["generator"], "--dim", r["d"],
                         "--seed", r["seed"], f"--point={r['target']}", "--n", r["n"], "--k", r["k"]])
        out = json.loads(capsys.readouterr().out)
        assert code == 0 and out["valid"]
        assert out["tuples_examined"] == int(r["tuples_examined"])


def test_cli_build_and_roundtrip(tmp_path, capsys):
    assert cli.main(["build", "--generator", "cross_polytope", "--dim", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["f_vector"] == [6, 12, 8]
    path = tmp_path / "p.json"
    path.write_text(generate("cube", 2).to_json())
    assert polytope_from_json(path.read_text()).f_vector() == (4, 4)
    out = tmp_path / "w.json"
    assert cli.main(["decompose", "--polytope", str(path), "--point", "1/2,0",
                     "--parts", "0:1/4,1:3/4", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["valid"]


def test_cli_exit_codes(tmp_path, capsys):
    # kn < d: an infeasible answer is legitimate and exits 0
    assert cli.main(["decompose", "--generator", "cube", "--dim", "2", "--point", "0,0",
                     "--n", "1", "--k", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "infeasible"
    assert cli.main(["decompose", "--generator", "cube", "--dim", "2", "--point", "3,0",
                     "--n", "2", "--k", "1"]) == 2
    assert cli.main(["decompose", "--generator", "cube", "--dim", "2", "--point", "1/0,0",
                     "--n", "2", "--k", "1"]) == 2
    assert cli.main(["decompose", "--polytope", str(tmp_path / "missing.json"),
                     "--point", "0,0", "--n", "2", "--k", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["decompose"])
    assert exc.value.code == 2
    assert cli.main(["verify-theorem", "--generator", "simplex", "--dim", "2",
                     "--n", "2", "--k", "1:2", "--no-timing"]) == 0
    assert cli.main(["probe-infeasible", "--dim", "3", "--n", "2", "--k", "1",
                     "--trials", "2"]) == 0
    assert cli.main(["dim-check", "--generator", "cube", "--dim", "2", "--n", "2", "--k", "1"]) == 0
    assert cli.main(["testmap", "--generator", "cube", "--dim", "2", "--points", "0,0;1,0",
                     "--k", "1"]) == 0
    capsys.readouterr()


def test_cli_reports_violation_when_search_exhausts(monkeypatch, capsys):
    from skelbary.solver import InfeasibilityReport

    def broken(req, **kw):
        return InfeasibilityReport(0, True, 0, 0)

    monkeypatch.setattr(cli, "decompose", broken)
    assert cli.main(["decompose", "--generator", "cube", "--dim", "2", "--point", "0,0",
                     "--n", "2", "--k", "1"]) == 1
    capsys.readouterr()
