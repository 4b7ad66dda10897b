import json
import math

import numpy as np
import pytest

from tshape_router.emit import CHECK_COLUMN, Format, emit, emit_record, read_csv
from tshape_router.errors import IoFailureError
from tshape_router.model import ModelParams, Port
from tshape_router.sweep import SweepSpec, SweepVariable, figure_specs, run_sweep


@pytest.fixture
def p0_table(p0):
    spec = SweepSpec(
        variable=SweepVariable.INCIDENT_ENERGY,
        lo=8.0,
        hi=12.0,
        n_points=201,
        port=Port.FROM_A,
        params=p0,
    )
    return run_sweep(spec)


@pytest.fixture
def solid_fig3b_table():
    return run_sweep(figure_specs("fig3b")["solid"])


def test_csv_layout(tmp_path, p0_table):
    path = emit(p0_table, Format.CSV, tmp_path / "sweep.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    header_lines = [line for line in lines if line.startswith("#")]
    assert "# units = \"xi\"" in header_lines
    assert any(line.startswith("# params = ") for line in header_lines)
    columns = lines[len(header_lines)]
    assert columns == f"E,T_aa,R_aa,T_ab,{CHECK_COLUMN}"
    assert len(lines) == len(header_lines) + 1 + p0_table.n_rows


def test_csv_round_trip_is_bit_exact(tmp_path, p0_table):
    path = emit(p0_table, "csv", tmp_path / "sweep.csv")
    back = read_csv(path)
    assert back.x_name == "E"
    assert np.array_equal(back.x, p0_table.x)
    for name, values in p0_table.columns.items():
        assert np.array_equal(back.columns[name], values), name
    assert np.array_equal(back.unitarity_residual, p0_table.unitarity_residual)
    assert back.metadata == json.loads(json.dumps(p0_table.metadata))


def test_csv_is_deterministic(tmp_path, p0, p0_table):
    first = emit(p0_table, Format.CSV, tmp_path / "first.csv").read_bytes()
    again = run_sweep(
        SweepSpec(
            variable=SweepVariable.INCIDENT_ENERGY,
            lo=8.0,
            hi=12.0,
            n_points=201,
            port=Port.FROM_A,
            params=p0,
        )
    )
    second = emit(again, Format.CSV, tmp_path / "second.csv").read_bytes()
    assert first == second


def test_empty_quantity_csv_has_header_only(tmp_path, p0):
    spec = SweepSpec(
        variable=SweepVariable.INCIDENT_ENERGY,
        lo=9.0,
        hi=11.0,
        n_points=5,
        port=Port.FROM_A,
        params=p0,
        quantities=(),
    )
    path = emit(run_sweep(spec), Format.CSV, tmp_path / "empty.csv")
    body = [line for line in path.read_text(encoding="utf-8").splitlines() if not line.startswith("#")]
    assert body == ["E"]
    back = read_csv(path)
    assert back.columns == {}
    assert back.n_rows == 0


def test_json_is_columnar_and_deterministic(tmp_path, p0_table):
    first = emit(p0_table, Format.JSON, tmp_path / "a.json")
    second = emit(p0_table, Format.JSON, tmp_path / "b.json")
    assert first.read_bytes() == second.read_bytes()
    document = json.loads(first.read_text(encoding="utf-8"))
    assert document["x"] == "E"
    assert document["metadata"]["units"] == "xi"
    assert len(document["columns"]["T_ab"]) == p0_table.n_rows
    assert document["columns"]["E"][0] == p0_table.x[0]


def test_svg_renders_one_line_per_quantity(tmp_path, solid_fig3b_table):
    path = emit(solid_fig3b_table, Format.SVG, tmp_path / "fig3b_solid.svg")
    text = path.read_text(encoding="utf-8")
    assert text.lstrip().startswith("<?xml")
    assert "<svg" in text
    assert text.count('id="line2d_') >= 1
    assert solid_fig3b_table.columns["T_ba"].max() == pytest.approx(1.0, abs=1e-9)


def test_svg_is_reproducible(tmp_path, solid_fig3b_table):
    first = emit(solid_fig3b_table, Format.SVG, tmp_path / "a.svg").read_bytes()
    second = emit(solid_fig3b_table, Format.SVG, tmp_path / "b.svg").read_bytes()
    assert first == second


def test_unwritable_path(tmp_path, p0_table):
    with pytest.raises(IoFailureError):
        emit(p0_table, Format.CSV, tmp_path / "missing" / "sweep.csv")


def test_unknown_format_rejected(tmp_path, p0_table):
    with pytest.raises(ValueError):
        emit(p0_table, "xlsx", tmp_path / "sweep.xlsx")


@pytest.mark.parametrize(
    "content",
    [
        pytest.param("", id="empty_file"),
        pytest.param("# broken header\nE\n1.0\n", id="bad_header"),
        pytest.param("E,T_aa\n1.0,abc\n", id="non_numeric"),
    ],
)
def test_read_csv_rejects_malformed_files(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(IoFailureError):
        read_csv(path)


def test_read_csv_missing_file(tmp_path):
    with pytest.raises(IoFailureError):
        read_csv(tmp_path / "nope.csv")


def test_emit_record(tmp_path):
    path = emit_record({"b": 1, "a": [1.5, math.pi]}, tmp_path / "record.json")
    assert json.loads(path.read_text(encoding="utf-8")) == {"a": [1.5, math.pi], "b": 1}
    with pytest.raises(IoFailureError):
        emit_record({}, tmp_path / "missing" / "record.json")


def test_unequal_arm_params_serialise():
    record = ModelParams(10.0, 10.5, 1.0, 1.0, 0.3, 0.3).as_dict()
    assert json.loads(json.dumps(record))["omega_tls"] is None
