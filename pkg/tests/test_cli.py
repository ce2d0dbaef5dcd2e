import io
import json
import pathlib
from fractions import Fraction as F

import pytest

from cbdmeasures import fileio
from cbdmeasures.cli import run_cli
from cbdmeasures.errors import InvalidPattern, ParseError, PmfNotNormalized
from cbdmeasures.oracle import FIG1_FORMAT, named_systems, random_system

DATA = pathlib.Path(__file__).parent / "data"
PRBOX = named_systems()["prbox"]


def cli(*args):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(args), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_parse_prbox_files():
    assert fileio.parse_system_file(DATA / "prbox.json") == PRBOX
    assert fileio.parse_system_file(DATA / "prbox_pm1.json") == PRBOX
    assert fileio.parse_system_file(DATA / "prbox.json", mode="float") == PRBOX.to_float()


def test_bad_pattern_reports_line_and_key():
    with pytest.raises(ParseError) as info:
        fileio.parse_system_file(DATA / "bad_pattern.json")
    assert info.value.key == "012" and info.value.line == 5


@pytest.mark.parametrize("text, error", [
    ('{"contents": ["a"], "contexts": [', ParseError),
    ('{"contents": ["a"], "contexts": [], "extra": 1}', ParseError),
    ('{"convention": "pm2"}', ParseError),
    ('{"contents": ["a"], "contexts": [{"id": "c", "contents": ["a"], '
     '"distribution": {"1": "1/3"}}]}', PmfNotNormalized),
    ('{"contents": ["a"], "contexts": [{"id": "c", "contents": ["a"], '
     '"distribution": {"11": 1}}]}', InvalidPattern),
    ('{"contents": ["a"], "contexts": [{"id": "c", "contents": ["a"], '
     '"distribution": {"1": "one"}}]}', ParseError),
])
def test_parse_errors(text, error):
    with pytest.raises(error):
        fileio.parse_system_text(text)


def test_decimal_and_fraction_values():
    text = ('{"contents": ["a"], "contexts": [{"id": "c", "contents": ["a"], '
            '"distribution": {"0": 0.1, "1": "9/10"}}]}')
    assert fileio.parse_system_text(text).bunches == ((F(1, 10), F(9, 10)),)


@pytest.mark.parametrize("system", list(named_systems().values()) +
                         [random_system(FIG1_FORMAT, s) for s in range(3)])
def test_round_trip(system):
    assert fileio.parse_system_text(fileio.emit_system(system)) == system
    approx = system.to_float()
    assert fileio.parse_system_text(fileio.emit_system(approx), mode="float") == approx


def test_measure_command():
    assert cli("measure", "--system", "prbox", "--measures", "cnt1", "--mode", "rational") == \
        (0, "cnt1 1/2 contextual\n", "")
    code, out, _ = cli("measure", "--system", str(DATA / "prbox.json"))
    assert code == 0
    assert out.splitlines() == ["cnt1 1/2 contextual", "cnt2 1/2 contextual",
                                "cnt3 1/3 contextual", "cntf 1 contextual"]
    code, out, _ = cli("measure", "--system", "coins", "--measures", "ncnt2", "--mode", "float")
    assert code == 0 and out == "ncnt2 0.25 noncontextual\n"


def test_exit_codes(monkeypatch):
    assert cli("check", "--system", "deterministic")[:2] == (1, "noncontextual\n")
    assert cli("check", "--system", "prbox")[:2] == (0, "contextual\n")
    assert cli("measure", "--measures", "ncnt2", "--system", "prbox")[0] == 4
    assert cli("measure", "--system", str(DATA / "bad_pattern.json"))[0] == 2
    assert cli("measure", "--system", "prbox", "--measures", "cnt7")[0] == 2
    assert cli("frobnicate")[0] == 2
    monkeypatch.setenv("CBD_MAX_VARS", "6")
    assert cli("check", "--system", "prbox")[0] == 3


def test_cyclic_and_random_commands(tmp_path):
    code, out, _ = cli("cyclic", "--n", "4", "--correlations", "1,1,1,-1", "--marginals", "0")
    assert code == 0 and fileio.parse_system_text(out) == PRBOX
    assert cli("cyclic", "--n", "2", "--correlations", "1,1", "--marginals", "1,-1,1,-1")[0] == 2
    target = tmp_path / "r.json"
    assert cli("random", "--format", "fig1", "--seed", "4", "--output", str(target))[0] == 0
    assert fileio.parse_system_file(target) == random_system(FIG1_FORMAT, 4)
    code, out, _ = cli("random", "--format", str(target), "--seed", "4")
    assert json.loads(out)["contexts"][0]["contents"] == ["q1", "q2"]


def test_verify_small():
    code, out, _ = cli("verify", "--suite", "small")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines())
