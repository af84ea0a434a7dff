import csv
import io
import json
import math
import subprocess
import sys

import pytest

from vacuum_selfenergy.cli import main, parse_alpha, parse_grid, parse_list, parse_source, InputError

ELECTRIC = 23 / (16 * math.pi**2)
MAGNETIC = -7 / (16 * math.pi**2)


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def parse_csv(text):
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = value
        else:
            body.append(line)
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return meta, rows


# ---------------------------------------------------------------------------
# argument parsers

def test_parse_grid():
    assert list(parse_grid("1:3:3:linear")) == [1.0, 2.0, 3.0]
    assert parse_grid("1:100:3:log")[1] == pytest.approx(10.0)
    for bad in ("1:3:3", "3:1:3:linear", "1:3:1:linear", "0:3:3:log", "1:3:3:cubic", "a:3:3:log"):
        with pytest.raises(InputError):
            parse_grid(bad)


def test_parse_source_and_alpha():
    assert parse_source("point").kind == "point"
    assert parse_source("gaussian:0.5").a == 0.5
    assert parse_source("lorentzian2:1").kind == "lorentzian-squared"
    pol = parse_alpha("rational:2:3")
    assert (pol.kind, pol.alpha0, pol.k0) == ("rational", 2.0, 3.0)
    for bad in ("gaussian", "gaussian:-1", "cube:1", "point:1"):
        with pytest.raises(InputError):
            parse_source(bad)
    for bad in ("static", "rational:1", "dynamic:1"):
        with pytest.raises(InputError):
            parse_alpha(bad)


def test_parse_list():
    assert parse_list("0.4,0.2, 0.1") == [0.4, 0.2, 0.1]
    with pytest.raises(InputError):
        parse_list("0.4,x")


# ---------------------------------------------------------------------------
# profile

def test_profile_point(capsys):
    status, out, _ = run(capsys, "profile", "--source", "point", "--grid", "0.5:4:8:log")
    assert status == 0
    meta, rows = parse_csv(out)
    assert len(rows) == 8
    assert meta["units"] == "densities in units of alpha*hbar*c"
    for row in rows:
        assert float(row["u_electric_r7"]) == pytest.approx(ELECTRIC, rel=1e-9)
        assert float(row["u_magnetic_r7"]) == pytest.approx(MAGNETIC, rel=1e-9)
    assert list(rows[0]) == ["r", "u_electric", "u_magnetic", "u_total", "u_electric_r7",
                             "u_magnetic_r7"]


def test_profile_gaussian_finite_at_origin(capsys):
    status, out, _ = run(capsys, "profile", "--source", "gaussian:0.5", "--grid", "0:3:31:linear")
    assert status == 0
    _, rows = parse_csv(out)
    assert len(rows) == 31
    assert float(rows[0]["r"]) == 0.0
    assert float(rows[0]["u_electric"]) == pytest.approx(17.812700760820705965, rel=1e-9)
    assert all(math.isfinite(float(row["u_total"])) for row in rows)


def test_profile_point_with_cutoff(capsys):
    status, out, _ = run(capsys, "profile", "--grid", "0:1:3:linear", "--gamma", "1")
    assert status == 0
    _, rows = parse_csv(out)
    assert float(rows[0]["u_electric"]) == pytest.approx(12 / (7 * math.pi**3), rel=1e-14)


def test_profile_negative_grid(capsys):
    status, out, err = run(capsys, "profile", "--source", "point", "--grid", "-1:2:5:linear")
    assert status == 2
    assert out == ""
    assert err == "error: grid lower bound must be positive for point source\n"


def test_profile_polarizability_scales(capsys):
    _, out, _ = run(capsys, "profile", "--grid", "1:2:2:linear", "--alpha", "static:2")
    _, rows = parse_csv(out)
    assert float(rows[0]["u_electric"]) == pytest.approx(2 * ELECTRIC, rel=1e-9)


def test_profile_csv_full_precision(capsys):
    _, out, _ = run(capsys, "profile", "--grid", "1:2:2:linear")
    _, rows = parse_csv(out)
    value = rows[0]["u_electric"]
    assert len(value.replace(".", "").lstrip("0")) == 17
    assert "\r" not in out


def test_profile_json(capsys):
    status, out, _ = run(capsys, "profile", "--grid", "0.5:4:4:log", "--format", "json")
    assert status == 0
    doc = json.loads(out)
    assert set(doc) == {"metadata", "rows"}
    assert len(doc["rows"]) == 4
    assert doc["metadata"]["source"] == "point"
    assert doc["metadata"]["versions"]["vacuum_selfenergy"] == "0.1.0"
    assert doc["rows"][2]["u_electric_r7"] == pytest.approx(ELECTRIC, rel=1e-9)


def test_csv_and_json_agree(capsys):
    _, text, _ = run(capsys, "profile", "--grid", "0.5:4:4:log")
    _, doc, _ = run(capsys, "profile", "--grid", "0.5:4:4:log", "--format", "json")
    _, rows = parse_csv(text)
    for row, obj in zip(rows, json.loads(doc)["rows"]):
        for key, value in row.items():
            assert float(value) == obj[key]


def test_output_file(tmp_path, capsys):
    path = tmp_path / "profile.csv"
    status, out, _ = run(capsys, "profile", "--grid", "1:2:2:linear", "--out", str(path))
    assert status == 0 and out == ""
    _, rows = parse_csv(path.read_text())
    assert len(rows) == 2


def test_deterministic_output(capsys):
    argv = ["profile", "--source", "gaussian:0.5", "--grid", "0:2:5:linear"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


# ---------------------------------------------------------------------------
# check-global

def test_check_global_point(capsys):
    status, out, _ = run(capsys, "check-global", "--source", "point", "--eta-m", "1")
    assert status == 0
    meta, rows = parse_csv(out)
    assert meta["status"] == "PASS"
    values = {row["quantity"]: float(row["value"]) for row in rows}
    assert values["electric_total"] == pytest.approx(0.0596831, rel=1e-6)
    assert abs(values["sum_total"]) <= 1e-8


@pytest.mark.parametrize("eta_m", ["0", "-1"])
def test_check_global_refuses_missing_regulator(capsys, eta_m):
    status, out, err = run(capsys, "check-global", "--source", "point", "--eta-m", eta_m)
    assert status == 2
    assert err.startswith("error: regulator must be positive")
    assert err.count("\n") == 1


def test_check_global_gamma_route(capsys):
    status, out, _ = run(capsys, "check-global", "--gamma", "0.4,0.2,0.1")
    assert status == 0
    _, rows = parse_csv(out)
    assert len(rows) == 3
    assert all(abs(float(row["total"])) <= 1e-8 for row in rows)


def test_check_global_gaussian(capsys):
    status, out, _ = run(capsys, "check-global", "--source", "gaussian:0.5")
    assert status == 0
    meta, rows = parse_csv(out)
    assert meta["status"] == "PASS"
    assert len(rows) == 4


def test_check_global_not_converged(capsys):
    status, _, err = run(capsys, "check-global", "--source", "gaussian:0.5",
                         "--max-evaluations", "50")
    assert status == 3
    assert err.startswith("error: ")


def test_check_global_failed_check(capsys):
    # an impossible pass threshold turns a sound result into a numerical failure
    status, out, _ = run(capsys, "check-global", "--eta-m", "1", "--check-tol", "1e-30")
    assert status == 1
    assert "# status: FAIL" in out


# ---------------------------------------------------------------------------
# singular, check-coefficients, limit

def test_singular_default(capsys):
    status, out, _ = run(capsys, "singular")
    assert status == 0
    meta, rows = parse_csv(out)
    assert float(meta["gamma_slope"]) == pytest.approx(-4.0, abs=1e-8)
    assert "coefficient=-7/3" in meta["coefficient_tables.electric.terms"]
    for row in rows:
        assert abs(float(row["total"])) <= 1e-8
        assert float(row["electric_gamma4"]) == pytest.approx(0.0596831, rel=1e-6)


def test_singular_partial_report(capsys):
    status, out, err = run(capsys, "singular", "--gamma", "0.4,0.2", "--max-evaluations", "50")
    assert status == 3
    _, rows = parse_csv(out)
    assert [row["converged"] for row in rows] == ["false", "false"]
    assert all(row["message"] for row in rows)
    assert err.startswith("error: ")


def test_check_coefficients(capsys):
    status, out, _ = run(capsys, "check-coefficients", "--format", "json")
    assert status == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 4
    assert doc["metadata"]["status"] == "PASS"


def test_limit_electric(capsys):
    status, out, _ = run(capsys, "limit", "--R", "1", "--a", "0.4,0.2,0.1,0.05",
                         "--component", "electric")
    assert status == 0
    meta, rows = parse_csv(out)
    assert len(rows) == 4
    assert float(meta["limit"]) == pytest.approx(ELECTRIC, abs=1e-4)


def test_limit_magnetic(capsys):
    status, out, _ = run(capsys, "limit", "--a", "0.4,0.2,0.1,0.05", "--component", "magnetic")
    assert status == 0
    meta, _ = parse_csv(out)
    assert float(meta["limit"]) == pytest.approx(MAGNETIC, abs=1e-4)


def test_limit_needs_three_sizes(capsys):
    status, _, err = run(capsys, "limit", "--a", "0.4")
    assert status == 2
    assert err == "error: need ≥ 3 sizes\n"


# ---------------------------------------------------------------------------
# configuration and process level

def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# batch defaults\ngrid = 1:2:3:linear\nformat = json\nalpha = static:2\n")
    status, out, _ = run(capsys, "profile", "--config", str(cfg))
    assert status == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 3
    assert doc["metadata"]["polarizability"] == "static:2"
    status, out, _ = run(capsys, "profile", "--config", str(cfg), "--grid", "1:2:2:linear",
                         "--format", "csv")
    assert status == 0
    _, rows = parse_csv(out)
    assert len(rows) == 2


def test_config_file_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("grid\n")
    status, _, err = run(capsys, "profile", "--config", str(cfg))
    assert status == 2 and "expected key=value" in err
    status, _, err = run(capsys, "profile", "--config", str(tmp_path / "missing.cfg"))
    assert status == 2


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["profile"],
    ["profile", "--grid", "1:2:2:linear", "--format", "xml"],
    ["profile", "--grid", "1:2:2:linear", "--source", "gaussian"],
    ["profile", "--grid", "1:2:2:linear", "--abs-tol", "-1"],
    ["limit", "--a", "0.1,0.2,0.4"],
    ["limit", "--a", "0.4,0.2,0.1", "--alpha", "rational:1:2"],
])
def test_invalid_input_exit_status(capsys, argv):
    status, _, _ = run(capsys, *argv)
    assert status == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "vacuum_selfenergy", "profile", "--grid",
                           "1:2:2:linear"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# command: profile\n")
