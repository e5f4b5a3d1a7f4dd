import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jwtower import cli


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
    return p


def test_minimal_config_gets_defaults(tmp_path):
    cfg = cli.parse_config(write(tmp_path, {"kind": "tensor", "k": 1, "d": 2, "max_level": 6}))
    assert cfg.tol == 1e-9 and cfg.samples == 100 and cfg.seed == 0
    assert cfg.max_level == 6
    assert cfg.models[0].kind == "tensor" and cfg.models[0].d == 2
    assert cfg.suites == cli.su.SUITES


def test_invalid_d_reports_line(tmp_path):
    p = write(tmp_path, '{"kind": "tensor",\n "k": 1,\n "d": 0}')
    with pytest.raises(cli.ConfigError, match=r"cfg.json:3: d must be >= 1"):
        cli.parse_config(p)


def test_malformed_json_reports_position(tmp_path):
    with pytest.raises(cli.ConfigError, match=r"cfg.json:2:"):
        cli.parse_config(write(tmp_path, '{"kind": "tensor",\n ,}'))


@pytest.mark.parametrize("doc, key", [
    ({"max_level": 0}, "max_level"),
    ({"tol": 0}, "tol"),
    ({"suites": []}, "suites"),
    ({"suites": ["nope"]}, "suites"),
    ({"samples": 0}, "samples"),
    ({"colour": 1}, "colour"),
    ({"k": "two"}, "k"),
])
def test_validation_errors(tmp_path, doc, key):
    with pytest.raises(cli.ConfigError, match=key):
        cli.parse_config(write(tmp_path, doc))


def test_models_list_and_per_model_levels(tmp_path):
    cfg = cli.parse_config(write(tmp_path, {"max_level": 5, "models": [
        {"kind": "tensor", "k": 1, "d": 2, "max_level": 7}, {"kind": "tensor", "k": 2, "d": 2}]}))
    assert [cfg.level_for(m) for m in cfg.models] == [7, 5]


matrices = st.integers(1, 3).flatmap(lambda n: st.lists(
    st.lists(st.tuples(st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False)),
             min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_matrix_pairs_round_trip(rows):
    m = np.array([[complex(a, b) for a, b in row] for row in rows])
    assert np.array_equal(cli.pairs_to_matrix(cli.matrix_to_pairs(m)), m)


def test_explicit_model_round_trips_through_serialization():
    gens = tuple(np.kron(np.outer(np.eye(2)[a], np.eye(2)[b]), np.eye(2)) * (1 + 0.5j) for a in range(2) for b in range(2))
    m = cli.ModelConfig(kind="explicit", a_blocks=(4,), b_generators=gens, name="x")
    text = json.dumps(cli.serialize_model(m))
    back = cli.parse_model(json.loads(text))
    assert back.a_blocks == m.a_blocks and back.name == "x"
    for a, b in zip(back.b_generators, m.b_generators):
        assert np.array_equal(a, b)
    cfg = cli.RunConfig(models=(m,))
    assert cli.serialize_config(cli.config_from_dict(cli.serialize_config(cfg))) == cli.serialize_config(cfg)


def test_bad_matrix_entries():
    with pytest.raises(cli.ConfigError):
        cli.pairs_to_matrix([[1, 2], [3, 4]])


def test_clean_is_deterministic_and_json_safe():
    doc = {"b": float("inf"), "a": np.float64(1 / 3), "c": [np.int64(2), -0.0, float("nan")], "d": np.array([1.5])}
    assert cli.clean(doc) == {"a": 0.3333333333, "b": "inf", "c": [2, 0.0, "nan"], "d": [1.5]}
    assert cli.dumps(doc) == cli.dumps(dict(reversed(list(doc.items()))))


def small(tmp_path, **over):
    doc = {"kind": "tensor", "k": 1, "d": 2, "max_level": 4, "samples": 3, "inequality_samples": 5}
    doc.update(over)
    return write(tmp_path, doc)


def test_verify_passes_and_is_byte_reproducible(tmp_path):
    cfg = small(tmp_path, suites=["tl", "fourier", "hy", "entropy"])
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert cli.main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    report = json.loads(outs[0])
    assert report["pass"] is True
    recs = [r for rs in report["models"][0]["suites"].values() for r in rs]
    assert recs and all(r["anchor"] for r in recs)


def test_tight_tolerance_fails_in_a_controlled_way(tmp_path):
    out = tmp_path / "r.json"
    code = cli.main(["verify", "--config", str(small(tmp_path)), "--suite", "hy", "--tol", "1e-30", "--out", str(out)])
    assert code == cli.EXIT_FAIL
    report = json.loads(out.read_text())
    assert report["pass"] is False
    fails = [r for r in report["models"][0]["suites"]["hy"] if r["status"] == "fail"]
    assert fails and all(isinstance(r["value"], float) for r in fails)


def test_degenerate_model_passes_with_trivial_values(tmp_path):
    out = tmp_path / "r.json"
    cfg = write(tmp_path, {"model": {"kind": "tensor", "k": 2, "d": 1}, "max_level": 4, "samples": 3,
                           "inequality_samples": 5})
    assert cli.main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    e = json.loads(out.read_text())["models"][0]["entropy"]
    assert e["entropy"] == [0.0, 0.0, 0.0] and e["shift_entropy"] == 0.0


def test_resource_cap_exit_code(tmp_path):
    out = tmp_path / "r.json"
    cfg = write(tmp_path, {"kind": "tensor", "k": 1, "d": 2, "max_level": 9, "cap": 64})
    assert cli.main(["build", "--config", str(cfg), "--out", str(out)]) == cli.EXIT_CAP
    report = json.loads(out.read_text())
    assert report["errors"][0]["kind"] == "resource-cap"


def test_usage_errors(tmp_path, capsys):
    assert cli.main(["verify", "--suite", "bogus"]) == cli.EXIT_USAGE
    assert cli.main(["frobnicate"]) == cli.EXIT_USAGE
    assert cli.main(["build", "--config", str(tmp_path / "missing.json")]) == cli.EXIT_USAGE


def test_build_summary(tmp_path):
    out = tmp_path / "b.json"
    assert cli.main(["build", "--max-level", "3", "--out", str(out)]) == 0
    t = json.loads(out.read_text())["models"][0]["tower"]
    assert t["index"] == 4.0 and t["tau"] == 0.25
    assert t["depth"]["depth"] == 1
    assert t["outside_hypotheses"] is False
    assert [r["A'∩A_n"] for r in t["relative_commutants"]][1:] == [[2], [4], [8]]


def test_report_tables(tmp_path, capsys):
    out = tmp_path / "r.json"
    cli.main(["entropy", "--config", str(small(tmp_path)), "--out", str(out)])
    capsys.readouterr()
    report = json.loads(out.read_text())
    head, rows = cli.select_rows(report, "entropy")
    assert head == ["model", "n", "H", "slope", "log_index"] and len(rows) == 3
    text = cli.emit_table(report, "margins")
    assert text.splitlines()[0].split()[0] == "model"
    assert json.loads(cli.emit_table(report, "dims", "json"))["select"] == "dims"
    assert cli.main(["report", str(out), "--select", "failures"]) == 0
    assert capsys.readouterr().out.splitlines()[1:] == []
    with pytest.raises(cli.ConfigError):
        cli.select_rows(report, "nope")


def test_margins_are_sorted_ascending():
    rec = lambda v: {"suite": "hy", "check": "c", "params": {}, "kind": "margin", "value": v,  # noqa: E731
                     "threshold": 1e-9, "status": "pass"}
    report = {"models": [{"model": "m", "suites": {"hy": [rec(0.5), rec(-1e-16), rec(0.1)]}}]}
    _, rows = cli.select_rows(report, "margins")
    assert [r[5] for r in rows] == [-1e-16, 0.1, 0.5]


def test_empty_report_gives_header_only():
    assert cli.emit_table({"models": []}, "records").count("\n") == 1
