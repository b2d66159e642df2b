import csv
import io
import json
from types import SimpleNamespace

import pytest

from cayleyset import serialize as ser
from cayleyset.cli import (
    EXIT_INPUT,
    EXIT_NEGATIVE,
    EXIT_NUMERIC,
    EXIT_OK,
    RunConfig,
    parse_grid,
    parse_z,
    run_cli,
)


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    from cayleyset.moduli import special_pair
    from cayleyset.pencil import ConicPair, circles_pair
    import numpy as np

    d = tmp_path_factory.mktemp("pairs")
    pairs = {
        "chapple": circles_pair(3.0, 1.0, np.sqrt(3.0)),
        "negative": ConicPair(np.eye(3), np.diag([1.0, 2.0, 3.0])),
        "special": special_pair(),
    }
    out = {}
    for name, pair in pairs.items():
        path = d / f"{name}.json"
        path.write_text(ser.dumps(ser.pair_to_json(pair)))
        out[name] = str(path)
    bad = d / "bad.json"
    bad.write_text(json.dumps({"C": {"coords": [[1, 0]] * 6}}))
    out["bad"] = str(bad)
    broken = d / "broken.json"
    broken.write_text("{not json")
    out["broken"] = str(broken)
    return out


def call(*argv, environ=None):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), environ=environ or {}, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


class TestCheck:
    def test_chapple(self, files):
        code, out, _ = call("check", files["chapple"])
        data = json.loads(out)
        assert code == EXIT_OK
        assert data["satisfied"] is True and data["transverse"] is True
        assert abs(complex(*data["gamma"])) < 1e-9

    def test_strict_negative(self, files):
        code, out, _ = call("check", files["negative"], "--strict")
        assert code == EXIT_NEGATIVE
        assert json.loads(out)["satisfied"] is False
        assert call("check", files["negative"])[0] == EXIT_OK

    def test_missing_field(self, files):
        code, out, err = call("check", files["bad"])
        assert code == EXIT_INPUT and out == ""
        assert "'D'" in err

    def test_not_json(self, files):
        assert call("check", files["broken"])[0] == EXIT_INPUT

    def test_missing_file(self, tmp_path):
        assert call("check", str(tmp_path / "nope.json"))[0] == EXIT_INPUT

    def test_bad_order(self, files):
        assert call("check", files["chapple"], "--n", "2")[0] == EXIT_INPUT


class TestOtherCommands:
    def test_normalize(self, files):
        code, out, _ = call("normalize", files["negative"])
        data = json.loads(out)
        assert code == EXIT_OK and max(data["residuals"]) < 1e-10

    def test_jinv_lambda(self):
        code, out, _ = call("jinv", "--lambda", "1,2,3")
        data = json.loads(out)
        assert code == EXIT_OK
        assert abs(data["z"][0] - 1728) < 1e-9 and data["critical_class"] == "j1728"

    def test_jinv_needs_one_source(self, files):
        assert call("jinv")[0] == EXIT_INPUT
        assert call("jinv", files["negative"], "--lambda", "1,2,3")[0] == EXIT_INPUT
        assert call("jinv", "--lambda", "1,1,2")[0] == EXIT_INPUT

    def test_fiber(self, tmp_path):
        target = tmp_path / "f.json"
        code, out, _ = call("fiber", "--z", "100,0", "-o", str(target))
        assert code == EXIT_OK and out == ""
        data = json.loads(target.read_text())
        assert data["total"] == 24 and data["orbits"] == 4
        assert len(data["roots"]) == 24
        assert max(data["residual_eq7"], data["residual_eq8"]) < 1e-8

    @pytest.mark.parametrize("z", ["1728,0", "0,0", "abc"])
    def test_fiber_bad_z(self, z):
        assert call("fiber", "--z", z)[0] == EXIT_INPUT

    def test_atlas_csv_rows(self):
        code, out, _ = call("atlas", "--grid", "circle:500,0,100,3", "--format", "csv", "--jobs", "2")
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 3 * 24
        assert all(r["res_cayley"] != "" and r["res_j"] != "" for r in rows)

    def test_sample(self, files):
        code, out, _ = call("sample", "--d", files["negative"], "--count", "3")
        assert code == EXIT_OK
        assert len(json.loads(out)["samples"]) == 3

    def test_trace(self, files):
        code, out, _ = call("trace", files["chapple"], "--count", "3")
        data = json.loads(out)
        assert code == EXIT_OK and data["all_closed"]
        code, out, _ = call("trace", files["negative"], "--count", "3")
        assert not json.loads(out)["all_closed"]

    def test_gradcheck(self, files):
        code, out, _ = call("gradcheck", "--count", "3")
        assert code == EXIT_OK and json.loads(out)["passed"]

    def test_gradcheck_coarse_step_is_numerical_failure(self, files):
        code, out, _ = call("gradcheck", files["negative"], "--h", "0.3")
        assert code == EXIT_NUMERIC and json.loads(out)["passed"] is False

    def test_selftest(self):
        code, out, _ = call("selftest")
        assert code == EXIT_OK and json.loads(out)["passed"]

    def test_usage_error(self):
        assert call("frobnicate")[0] == 2


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ("sample", "--d", "{negative}", "--count", "3", "--seed", "7"),
            ("trace", "{chapple}", "--start-seed", "5", "--count", "2"),
            ("fiber", "--z", "37,-4", "--format", "csv"),
            ("check", "{special}"),
            ("gradcheck", "--count", "2", "--seed", "3"),
        ],
    )
    def test_byte_identical(self, argv, files):
        argv = [a.format(**files) for a in argv]
        first, second = call(*argv), call(*argv)
        assert first[0] == EXIT_OK
        assert first[1] == second[1] and first[1]

    def test_seed_changes_sample(self, files):
        a = call("sample", "--d", files["negative"], "--count", "1", "--seed", "1")[1]
        b = call("sample", "--d", files["negative"], "--count", "1", "--seed", "2")[1]
        assert a != b


class TestConfig:
    def _args(self, **kw):
        base = dict(abs_eps=None, rel_eps=None, cluster_eps=None, seed=42, output=None, format="json")
        base.update(kw)
        return SimpleNamespace(**base)

    def test_defaults(self):
        cfg = RunConfig.from_args(self._args(), {})
        assert cfg.seed == 42 and cfg.tol.rel_eps == 1e-8

    def test_env_then_flag(self):
        assert RunConfig.from_args(self._args(), {"PONCELET_TOL": "1e-6"}).tol.rel_eps == 1e-6
        cfg = RunConfig.from_args(self._args(rel_eps=1e-7), {"PONCELET_TOL": "1e-6"})
        assert cfg.tol.rel_eps == 1e-7

    @pytest.mark.parametrize("env", ["-1", "zero"])
    def test_bad_env(self, env):
        with pytest.raises(ValueError):
            RunConfig.from_args(self._args(), {"PONCELET_TOL": env})

    def test_bad_env_exit_code(self, files):
        assert call("check", files["chapple"], environ={"PONCELET_TOL": "-3"})[0] == EXIT_INPUT


def test_parsers():
    assert parse_z("3,-2") == 3 - 2j
    assert len(parse_grid("box:0,1,0,1,3,2")) == 6
    with pytest.raises(ser.InputError):
        parse_grid("square:1,2")
