from __future__ import annotations

import json
import pathlib
import subprocess
import sys

import pytest

from trusskit import cli, fixtures, io

FIX = pathlib.Path(fixtures.__file__).parent


def fx(name: str) -> str:
    return str(FIX / f"{name}.json")


@pytest.fixture
def run(capsysbinary):
    def go(*args):
        code = cli.main([str(a) for a in args])
        out = capsysbinary.readouterr()
        return code, out.out.decode(), out.err.decode()

    return go


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "trusskit", "validate", fx("cap")], capture_output=True)
    assert proc.returncode == 0


def test_validate(run):
    code, out, _ = run("validate", fx("pt2"))
    assert code == 0 and "tangle" in out


def test_usage_errors(run):
    assert run("frobnicate")[0] == cli.EXIT_USAGE
    assert run("glue", fx("cap"))[0] == cli.EXIT_USAGE


def test_missing_file(run):
    assert run("validate", "/nonexistent/x.json")[0] == cli.EXIT_NOINPUT


def test_bad_data(run, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run("validate", bad)[0] == cli.EXIT_DATA
    obj = json.loads(fixtures.raw("cap"))
    obj["levels"][0]["fibers"][""] = "RRS"
    bad.write_text(json.dumps(obj))
    code, _, err = run("validate", bad)
    assert code == cli.EXIT_DATA and "ValidationError" in err


def test_dual_twice_is_identity(run):
    code, out, _ = run("dual", "--twice", fx("braid"))
    assert code == 0 and out.encode() == fixtures.raw("braid")


def test_normalize(run):
    code, out, _ = run("normalize", fx("constant_rsr"))
    doc = io.parse(out)
    assert code == 0 and doc.payload.bundle.fiber(()) == "R"


def test_compactify_interior(run, tmp_path):
    code, out, _ = run("compactify", fx("pt2"))
    assert code == 0
    closed = tmp_path / "closed.json"
    closed.write_text(out)
    code, out, _ = run("interior", closed)
    assert code == 0 and io.parse(out).payload == fixtures.get("pt2")


def test_check_tangle(run):
    code, out, _ = run("check-tangle", "--json", fx("cap"))
    assert code == 0
    assert json.loads(out)["tdim"] == {"0-1": 1, "0-3": 1, "1-1": 0}
    assert run("check-tangle", fx("bifur"))[0] == cli.EXIT_REFUTED


def test_check_diagram(run):
    assert run("tstr", fx("circle"))[0] == 0
    assert run("check-diagram", fx("circle"))[0] == cli.EXIT_REFUTED


def test_link_and_cells(run):
    code, out, _ = run("link", "--json", "--stratum", "1-1", fx("pt2"))
    assert code == 0 and len(json.loads(out)["elements"]) == 12
    code, out, _ = run("cells", "--json", fx("circle"))
    assert code == 0 and json.loads(out)["euler"] == 0
    code, out, _ = run("complexity", fx("cap"))
    assert code == 0 and out.strip() == "3"


def test_enumerate(run):
    code, out, _ = run("enumerate", "--n", 1, "--max-size", 3)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 6
    assert all(json.loads(line)["kind"] == "truss" for line in lines)


def test_perturb(run):
    assert run("perturb", "verify", fx("split_1_2"))[0] == 0
    assert run("perturb", "verify", fx("vanishing_point"))[0] == cli.EXIT_REFUTED
    code, out, _ = run("perturb", "compose", fx("split_1_2"), fx("split_2_3"))
    assert code == 0 and io.parse(out).payload == fixtures.get("split_1_3")
    assert run("perturb", "compose", fx("split_2_3"), fx("split_1_2"))[0] == cli.EXIT_DATA


def test_stable(run):
    code, out, _ = run("stable", "--json", "--max-q", 3, "--max-total", 9, fx("cap"))
    assert code == 0 and json.loads(out)["verdict"] == "stable_within_bounds"
    assert run("stable", "--max-nodes", 5, fx("cap"))[0] == cli.EXIT_INCONCLUSIVE


def test_render(run, tmp_path):
    target = tmp_path / "pt2.svg"
    assert run("render", "-o", target, fx("pt2"))[0] == 0
    assert target.read_bytes().startswith(b"<?xml")
    assert run("render", fx("braid"))[0] == cli.EXIT_DATA
    code, out, _ = run("render", "--slices", fx("braid"))
    assert code == 0 and out.startswith("level 1:")
