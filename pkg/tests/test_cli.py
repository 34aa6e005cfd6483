import io
import json

import pytest

from cremona.cli import App, app, parse_args
from cremona.model import builtin_source


def run(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = app.run(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


def test_print_map():
    code, out, _ = run("print-map", "--system", "riccati")

    assert code == 0
    assert out == "# denominator: -x*dt + 1\nxhat = (-x) / (x*dt - 1)\n"


def test_print_inverse_map():
    code, out, _ = run("print-map", "--system", "riccati", "--inverse")

    assert code == 0
    assert "xhat = (x) / (x*dt + 1)" in out


def test_integrate_csv():
    code, out, _ = run("integrate", "--system", "wp", "--x0", "1,2", "--dt", "0.01", "--steps", "3")
    lines = out.splitlines()

    assert code == 0
    assert lines[0] == "step,t,x,y,energy"
    assert len(lines) == 5
    assert lines[1] == "0,0,1,2,0.5"


def test_integrate_exact_truncation():
    code, out, err = run(
        "integrate", "--system", "riccati", "--x0", "1", "--dt", "1/2", "--steps", "2", "--mode", "exact"
    )

    assert code == 3
    assert out.splitlines() == ["step,t,x", "0,0,1", "1,1/2,2"]
    assert "cremona: error:" in err


def test_integrate_exact_needs_rationals():
    code, _, err = run("integrate", "--system", "wp", "--x0", "1,2", "--dt", "0.5", "--steps", "2", "--mode", "exact")

    assert code == 2
    assert "--dt" in err


def test_integrate_wrong_format():
    code, _, _ = run("integrate", "--system", "wp", "--x0", "1,2", "--dt", "0.5", "--steps", "2", "--format", "json")
    assert code == 2


def test_missing_system():
    code, _, err = run("print-map")

    assert code == 2
    assert "--system" in err


def test_unknown_system():
    code, _, _ = run("print-map", "--system", "lorenz")
    assert code == 2


def test_wrong_dimension():
    code, _, _ = run("integrate", "--system", "wp", "--x0", "1", "--dt", "0.1", "--steps", "2")
    assert code == 2


def test_failed_check():
    code, _, err = run("find-steps", "--system", "wp", "--x0", "1,2")

    assert code == 2
    assert "--n is required" in err


def test_find_steps_json():
    code, out, _ = run("find-steps", "--system", "wp", "--x0", "1,2", "--n", "4", "--range", "0,2")
    payload = json.loads(out)

    assert code == 0
    assert payload["n"] == 4
    assert payload["range"] == ["0", "2"]
    assert any(abs(root["value"] - (4 / 3) ** 0.25) < 1e-3 for root in payload["roots"])


def test_find_steps_several_orders():
    code, out, _ = run("find-steps", "--system", "wp", "--x0", "1,2", "--n", "1..2", "--threads", "2")
    payload = json.loads(out)

    assert code == 0
    assert [finding["n"] for finding in payload["findings"]] == [1, 2]
    assert all(finding["roots"] == [] for finding in payload["findings"])


def test_find_steps_csv():
    code, out, _ = run("find-steps", "--system", "wp", "--x0", "1,2", "--n", "1..2", "--format", "csv")

    assert code == 0
    assert out == "n,steps\n1,\n2,\n"


def test_verify_period_failure():
    code, out, _ = run("verify-period", "--system", "wp", "--x0", "1,2", "--dt", "1", "--n", "4")
    payload = json.loads(out)

    assert code == 3
    assert payload["verified"] is False
    assert payload["float_ok"] is False


def test_equiperiodic_text():
    code, out, _ = run("equiperiodic", "--system", "wp", "--n", "2")

    assert code == 0
    assert out == "# F2: degree 0 in (x, y), degree 0 in dt\nF2 = 1\n"


def test_equiperiodic_refuses_x0():
    code, _, _ = run("equiperiodic", "--system", "wp", "--n", "2", "--x0", "1,2")
    assert code == 2


def test_with_limit_needs_jacobi():
    code, _, err = run("transition-table", "--system", "wp", "--x0", "1,2", "--n", "3", "--with-limit")

    assert code == 2
    assert "jacobi" in err


def test_out_file(tmp_path):
    target = tmp_path / "map.txt"
    code, out, _ = run("print-map", "--system", "riccati", "--out", str(target))

    assert code == 0
    assert out == ""
    assert target.read_text().endswith("xhat = (-x) / (x*dt - 1)\n")


def test_model_file(tmp_path):
    model = tmp_path / "wp.model"
    model.write_text(builtin_source("wp"))

    assert run("print-map", "--model-file", str(model))[1] == run("print-map", "--system", "wp")[1]


def test_missing_model_file(tmp_path):
    code, _, err = run("print-map", "--model-file", str(tmp_path / "missing.model"))

    assert code == 2
    assert "cannot read" in err


def test_param_override():
    code, out, _ = run("print-map", "--system", "riccati", "--param", "c=2")

    assert code == 0
    assert "xhat = (-x) / (2*x*dt - 1)" in out


@pytest.mark.asyncio
async def test_execute():
    stdout, stderr = io.StringIO(), io.StringIO()
    config = parse_args(["print-map", "--system", "linear"])

    assert await app.execute(config, stdout, stderr) == 0
    assert stdout.getvalue().count("hat = ") == 2


@pytest.mark.asyncio
async def test_system_is_checked_once():
    stdout, stderr = io.StringIO(), io.StringIO()
    config = parse_args(["print-map"])

    assert await app.execute(config, stdout, stderr) == 2
    assert stderr.getvalue().count("give exactly one of --system and --model-file") == 1


@pytest.mark.asyncio
async def test_unexpected_error_is_a_usage_error():
    stdout, stderr = io.StringIO(), io.StringIO()
    broken = App()

    @broken.command("print-map")
    async def print_map(ctx):
        raise ValueError("not a polynomial")

    code = await broken.execute(parse_args(["print-map", "--system", "riccati"]), stdout, stderr)

    assert code == 2
    assert "cremona: error: ValueError: not a polynomial" in stderr.getvalue()
    assert "Traceback" not in stderr.getvalue()
