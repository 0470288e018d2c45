import csv
import io
import json
from collections import Counter

import pytest

from sfkahler import cli
from sfkahler.report import (
    CSV_COLUMNS,
    ConfigError,
    RunConfig,
    emit,
    load_config,
    parse,
    run,
)

CONFIG = """
[family]
name = lebrun_instanton
k = 3
m = 1.0

[grid]
z_min = -2
z_max = -1
count = 2

[sample]
count = 6
seed = 4

[checks]
select = bochner, area_growth, closed_form, holder

[tolerances]
pointwise = 1e-5

[output]
formats = csv
"""


@pytest.fixture(scope="module")
def small_report():
    return run(load_config(CONFIG))


def test_config_parsing():
    cfg = load_config(CONFIG)
    assert cfg.family == "lebrun_instanton" and cfg.params == {"k": 3, "m": 1.0}
    assert cfg.z_grid() == [-2.0, -1.0]
    assert cfg.samples == 6 and cfg.seed == 4
    assert cfg.checks == ("bochner", "area_growth", "closed_form", "holder")
    assert cfg.formats == ("csv",)


def test_flags_override_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(CONFIG)
    args = cli.make_parser().parse_args(["verify", str(path), "--z-count", "4", "--param", "m=0.5", "--tol", "evolution=1e-3", "--set", "sample.seed=9"])
    cfg = cli.build_config(args)
    assert cfg.z_count == 4 and cfg.params["m"] == 0.5 and cfg.seed == 9
    assert cfg.tolerances["evolution"] == 1e-3


def test_json_round_trip(small_report):
    data = emit(small_report, "json")
    back = parse(data)
    assert back == small_report
    assert emit(back, "json") == data


def test_rerun_is_byte_identical(small_report):
    again = run(load_config(CONFIG))
    for fmt in ("csv", "json"):
        assert emit(again, fmt) == emit(small_report, fmt)


def test_thread_count_does_not_change_output(small_report, monkeypatch):
    monkeypatch.setenv("SFKAHLER_THREADS", "4")
    threaded = run(load_config(CONFIG))
    assert emit(threaded, "json") == emit(small_report, "json")


def test_csv_columns(small_report):
    rows = list(csv.reader(io.StringIO(emit(small_report, "csv").decode())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + len(small_report.records)
    area = [r for r in rows[1:] if r[0] == "area_growth"]
    for r in area:
        assert float(r[3]) == pytest.approx(-6 * 3.141592653589793, rel=1e-8)
        assert float(r[4]) == pytest.approx(2 * 3.141592653589793 * -3, rel=1e-12)
        assert r[7] == "true"


def test_table_has_one_line_per_record(small_report):
    text = emit(small_report, "table").decode()
    body = text.split("\n\n")[0].splitlines()
    assert len(body) == 1 + len(small_report.records)


def test_each_check_once_per_grid_point(small_report):
    counts = Counter((r.name, r.where) for r in small_report.records)
    assert set(counts.values()) == {1}
    zs = {r.where for r in small_report.records if r.name == "area_growth"}
    assert zs == {"z=-2", "z=-1"}
    assert sum(1 for r in small_report.records if r.name == "bochner") == 1


def test_summary_matches_records(small_report):
    s = small_report.summary
    assert s["total"] == len(small_report.records)
    assert s["passed"] == sum(r.passed for r in small_report.records)
    assert s["failed"] == s["total"] - s["passed"]


def test_flat_summary_values():
    cfg = RunConfig(family="flat_c2", z_min=-2.0, z_max=-2.0, z_count=1, checks=("euler_numbers",))
    rep = run(cfg)
    vals = {r.name: r.lhs for r in rep.records}
    assert vals["chi_g_value"] == pytest.approx(2.0, abs=1e-9)
    assert vals["e_g_value"] == pytest.approx(-1.0, abs=1e-9)


def test_range_validation():
    with pytest.raises(ConfigError):
        run(RunConfig(family="lebrun_instanton", params={"k": 3, "m": 1.0}, z_min=-1.0, z_max=0.0, checks=("holder",)))


@pytest.mark.parametrize(
    "cfg",
    [
        RunConfig(family="nope"),
        RunConfig(checks=("nope",)),
        RunConfig(formats=("xml",)),
        RunConfig(z_count=0),
        RunConfig(output="/nonexistent/dir/out"),
        RunConfig(tolerances={"nope": 1.0}),
    ],
)
def test_config_errors(cfg):
    with pytest.raises(ConfigError):
        run(cfg)


def test_unknown_format(small_report):
    with pytest.raises(ConfigError):
        emit(small_report, "xml")


def test_main_exit_codes(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(CONFIG)
    out = io.StringIO()
    assert cli.main(["verify", str(path), "--checks", "holder", "--format", "json"], stdout=out) == 0
    assert json.loads(out.getvalue())["summary"]["failed"] == 0
    assert cli.main(["verify", str(path), "--z-max", "0"], stdout=io.StringIO()) == 2
    failing = ["verify", "--family", "lebrun_instanton", "--param", "k=2", "--z-min", "-1", "--z-max", "-1", "--z-count", "1", "--checks", "ricci_flat_relation"]
    assert cli.main(failing, stdout=io.StringIO()) == 1
    assert cli.main([], stdout=io.StringIO()) == 2


def test_output_files(tmp_path):
    prefix = tmp_path / "res"
    args = ["verify", "--family", "flat_c2", "--z-count", "1", "--checks", "euler_numbers", "--format", "csv,json,table", "--out", str(prefix)]
    assert cli.main(args, stdout=io.StringIO()) == 0
    for ext in ("csv", "json", "txt"):
        assert (tmp_path / f"res.{ext}").stat().st_size > 0


def test_scan_sweeps_parameter():
    out = io.StringIO()
    args = ["scan", "--family", "lebrun_instanton", "--param", "k=1", "--z-min", "-1", "--z-max", "-1", "--z-count", "1", "--checks", "area_growth", "--sweep", "family.m", "--values", "0.5,1.0"]
    assert cli.main(args, stdout=out) == 0
    rows = list(csv.reader(io.StringIO(out.getvalue())))
    assert [r[1] for r in rows[1:]] == ["lebrun_instanton(k=1,m=0.5)", "lebrun_instanton(k=1,m=1.0)"]


def test_self_test_flag():
    out = io.StringIO()
    assert cli.main(["--self-test"], stdout=out) == 0
    assert "0 failed" in out.getvalue()
