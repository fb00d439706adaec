import json
import math
from pathlib import Path

import numpy as np
import pytest

from gaincap.cli import (
    EXIT_INADMISSIBLE,
    EXIT_INPUT,
    EXIT_LIMIT,
    EXIT_OK,
    InputError,
    load_problem,
    main,
    parse_problem,
    problem_to_dict,
)

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / f"{name}.json")


def load_fixture_dict(name: str) -> dict:
    with open(fixture(name), encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------- parsing


def test_round_trip():
    problem = load_problem(fixture("ex1"))
    serialized = problem_to_dict(problem)
    again = problem_to_dict(parse_problem(serialized))
    assert serialized == again


def test_round_trip_without_gain():
    problem = load_problem(fixture("ex6"))
    assert problem.gain is None
    serialized = problem_to_dict(problem)
    assert problem_to_dict(parse_problem(serialized)) == serialized


def test_cross_check_accepts_consistent_tables():
    for name in ("ex1", "ex2", "ex3", "ex4", "ex5"):
        problem = load_problem(fixture(name))
        assert problem.gain is not None
        assert problem.a_tilde is not None


def test_cross_check_rejects_perturbed_loop():
    data = load_fixture_dict("ex2")
    data["A_tilde"][0][0] += 1e-3
    with pytest.raises(InputError, match="disagree"):
        parse_problem(data)


def test_missing_field():
    data = load_fixture_dict("ex1")
    del data["tau0"]
    with pytest.raises(InputError, match="tau0"):
        parse_problem(data)


def test_nonpositive_epsilon_names_field():
    data = load_fixture_dict("ex1")
    data["epsilon"] = 0.0
    with pytest.raises(InputError, match="epsilon"):
        parse_problem(data)
    data["epsilon"] = -1.0
    with pytest.raises(InputError, match="epsilon"):
        parse_problem(data)


def test_dimension_mismatch():
    data = load_fixture_dict("ex1")
    data["C"] = [[1.0, 1.0, 1.0]]
    with pytest.raises(InputError, match="'C'"):
        parse_problem(data)


def test_gain_requires_input_map():
    data = load_fixture_dict("ex1")
    del data["B"]
    del data["m"]
    with pytest.raises(InputError, match="'K' requires"):
        parse_problem(data)


def test_loop_description_required():
    data = load_fixture_dict("ex6")
    del data["A_tilde"]
    with pytest.raises(InputError, match="'K' or 'A_tilde'"):
        parse_problem(data)


def test_unknown_field_rejected():
    data = load_fixture_dict("ex1")
    data["extra"] = 1
    with pytest.raises(InputError, match="extra"):
        parse_problem(data)


def test_bad_options():
    data = load_fixture_dict("ex1")
    data["options"] = {"max_iter": 0}
    with pytest.raises(InputError, match="max_iter"):
        parse_problem(data)
    data["options"] = {"mystery": 1}
    with pytest.raises(InputError, match="mystery"):
        parse_problem(data)


def test_defaults_applied():
    problem = load_problem(fixture("ex5"))
    assert problem.options.max_iter == 200
    assert problem.options.stop_tol == 1e-9
    assert problem.options.horizon == 12  # 4n


# ---------------------------------------------------------------- determine


def test_determine_text(capsys):
    code = main(["determine", fixture("ex2")])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "status: determined" in out
    assert "k0: 1" in out
    assert "unbounded" in out  # the one-row band leaves the next row free


def test_determine_json(capsys):
    code = main(["determine", fixture("ex2"), "--json"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["status"] == "determined"
    assert report["k0"] == 1
    assert report["iterations"][0]["values"] == [None, None]
    assert report["iterations"][1]["values"] == pytest.approx([0.12, 0.12], abs=1e-9)
    assert np.allclose(report["constraint_rows"], [[-1.0, 1.0], [-1.5, -0.4]])


def test_determine_iteration_limit_exit(capsys):
    code = main(["determine", fixture("ex9"), "--max-iter", "5", "--json"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_LIMIT
    assert report["status"] == "iteration_limit"
    assert report["k0"] is None
    assert len(report["iterations"]) == 5


def test_determine_max_iter_flag_overrides_file(capsys):
    code = main(["determine", fixture("ex1"), "--max-iter", "1"])
    assert code == EXIT_LIMIT


def test_determine_stop_tol_flag(capsys):
    # a huge tolerance accepts the very first bounded pass
    code = main(["determine", fixture("ex10"), "--stop-tol", "100", "--json"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["k0"] == 0


def test_determine_missing_file(capsys):
    code = main(["determine", str(FIXTURES / "nope.json")])
    assert code == EXIT_INPUT
    assert "cannot read" in capsys.readouterr().err


# ---------------------------------------------------------------- check-gain


def test_check_gain_admissible(capsys):
    code = main(["check-gain", fixture("ex1"), "--json"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["admissible"] is True
    assert report["alpha_tolerable"] is True
    assert report["beta_violations"] == []
    assert report["capacity"]["k0"] == 2


def test_check_gain_offset_violation(capsys):
    code = main(["check-gain", fixture("ex6"), "--json"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_INADMISSIBLE
    assert report["admissible"] is False
    assert report["alpha_tolerable"] is True
    (bv,) = report["beta_violations"]
    assert bv["index"] == 1
    assert bv["first_violation_step"] == 1
    assert bv["magnitude"] == pytest.approx(1.89)


def test_check_gain_nominal_violation(capsys):
    code = main(["check-gain", fixture("ex7")])
    out = capsys.readouterr().out
    assert code == EXIT_INADMISSIBLE
    assert "admissible: no" in out
    assert "leaves the band at step 0" in out


def test_check_gain_uncertified(capsys):
    # under a tiny iteration cap no violation is found, but the set is only
    # an outer truncation, so the verdict cannot be a clean pass
    code = main(["check-gain", fixture("ex1"), "--max-iter", "1", "--json"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_LIMIT
    assert report["certified"] is False
    assert report["admissible"] is True


# ---------------------------------------------------------------- analyze


def test_analyze_json(capsys):
    code = main(["analyze", fixture("ex1"), "--json"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["controllable"] is True
    assert report["observable"] is True
    assert report["spectral_radius"] == pytest.approx(0.9)
    assert report["inf_norm"] == pytest.approx(0.9)
    assert report["norm_guarantee"] and report["structural_guarantee"]
    assert report["decay_index"] == 1


def test_analyze_marginal(capsys):
    code = main(["analyze", fixture("ex4"), "--json"])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["spectral_radius"] == pytest.approx(1.0)
    assert report["structural_guarantee"] is False
    assert report["decay_index"] is None


def test_analyze_without_input_map(tmp_path, capsys):
    data = load_fixture_dict("ex6")
    del data["B"]
    del data["m"]
    path = tmp_path / "nob.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    code = main(["analyze", str(path)])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "not evaluated" in out


# ---------------------------------------------------------------- region


def test_region_csv(capsys):
    code = main([
        "region", fixture("ex1"),
        "--xmin", "-2", "--xmax", "2", "--ymin", "-2", "--ymax", "2", "--grid", "3",
    ])
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert code == EXIT_OK
    assert lines[0] == "x,y,inside"
    assert len(lines) == 1 + 9
    assert "0,0,1" in lines
    assert lines[1] == "-2,-2,0"
    # y varies in the outer loop
    assert lines[2] == "0,-2,0"


def test_region_svg(tmp_path, capsys):
    svg_path = tmp_path / "region.svg"
    code = main([
        "region", fixture("ex1"),
        "--xmin", "-2", "--xmax", "2", "--ymin", "-2", "--ymax", "2",
        "--grid", "21", "--svg", str(svg_path),
    ])
    capsys.readouterr()
    assert code == EXIT_OK
    text = svg_path.read_text(encoding="utf-8")
    assert text.startswith("<svg")
    assert "tau0" in text and "e1" in text and "e2" in text
    assert "<script" not in text


def test_region_grid_validation(capsys):
    code = main([
        "region", fixture("ex1"),
        "--xmin", "-2", "--xmax", "2", "--ymin", "-2", "--ymax", "2", "--grid", "1",
    ])
    assert code == EXIT_INPUT
    assert "--grid" in capsys.readouterr().err


def test_region_refuses_higher_dimensions(capsys):
    code = main([
        "region", fixture("ex5"),
        "--xmin", "-1", "--xmax", "1", "--ymin", "-1", "--ymax", "1", "--grid", "3",
    ])
    assert code == EXIT_INPUT
    assert "two-state" in capsys.readouterr().err


def test_region_json(capsys):
    code = main([
        "region", fixture("ex1"), "--json",
        "--xmin", "-2", "--xmax", "2", "--ymin", "-2", "--ymax", "2", "--grid", "3",
    ])
    report = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert report["raster"][1][1] == 1
    assert report["xs"] == [-2.0, 0.0, 2.0]


# ---------------------------------------------------------------- simulate


def test_simulate_csv(capsys):
    code = main(["simulate", fixture("ex1"), "--alpha", "1", "--beta", "0,0", "--steps", "1"])
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert code == EXIT_OK
    assert lines[0] == "step,x1,x2,u1,u2,y1"
    assert lines[1].startswith("0,0.29999999999999999,0.5,")
    cells = lines[2].split(",")
    assert float(cells[1]) == pytest.approx(0.27)
    assert float(cells[2]) == pytest.approx(0.11)
    assert float(cells[-1]) == pytest.approx(0.38)


def test_simulate_without_gain_omits_inputs(capsys):
    code = main(["simulate", fixture("ex6"), "--alpha", "1", "--beta", "0,0", "--steps", "0"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert out.strip().split("\n")[0] == "step,x1,x2,y1"


def test_simulate_zero_run(capsys):
    code = main(["simulate", fixture("ex1"), "--alpha", "0", "--beta", "0,0", "--steps", "2"])
    out = capsys.readouterr().out
    for line in out.strip().split("\n")[1:]:
        assert all(float(v) == 0.0 for v in line.split(",")[1:])
    assert code == EXIT_OK


def test_simulate_superposition(capsys):
    def run(alpha, beta):
        code = main([
            "simulate", fixture("ex1"), "--json",
            "--alpha", str(alpha), "--beta", beta, "--steps", "6",
        ])
        assert code == EXIT_OK
        return np.array(json.loads(capsys.readouterr().out)["states"])

    first = run(0.7, "0.2,-0.3")
    second = run(-1.1, "0.05,0.4")
    combined = run(0.7 - 1.1, "0.25,0.1")
    assert np.allclose(first + second, combined, atol=1e-12)


def test_simulate_beta_validation(capsys):
    code = main(["simulate", fixture("ex1"), "--alpha", "1", "--beta", "0,0,0", "--steps", "1"])
    assert code == EXIT_INPUT
    assert "components" in capsys.readouterr().err
    code = main(["simulate", fixture("ex1"), "--alpha", "1", "--beta", "a,b", "--steps", "1"])
    assert code == EXIT_INPUT


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["determine"])  # missing file argument
    assert exc.value.code == EXIT_INPUT
    capsys.readouterr()


def test_unknown_command(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_INPUT
    capsys.readouterr()
