"""Command-line front door and the JSON API: same payloads, same bytes."""

import json
import re

import pytest
from fastapi.testclient import TestClient

from srgtools import __version__
from srgtools.cli import build_app, main

SAT_JSON = '{"type":"static","kind":"saturation","limit":1}'
NONLIN_JSON = (
    '{"type":"compose",'
    '"outer":{"type":"lti","num":[1],"den":[1,1]},'
    '"inner":{"type":"static","kind":"saturation","limit":1}}'
)
LOOP_JSON = (
    '{"type":"compose",'
    '"outer":{"type":"lti","num":[0,1],"den":[1]},'
    '"inner":{"type":"lti","num":[1],"den":[0,1,1]}}'
)
UNIT_LOOP_JSON = (
    '{"type":"compose",'
    '"outer":{"type":"lti","num":[1],"den":[1]},'
    '"inner":{"type":"lti","num":[1],"den":[0,1,1]}}'
)


@pytest.fixture(scope="module")
def client():
    return TestClient(build_app())


def _cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bound_of_the_saturation_sector(capsys):
    code, out, _ = _cli(capsys, ["bound", "--system", SAT_JSON])
    assert code == 0
    doc = json.loads(out)
    (prim,) = doc["primitives"]
    assert prim["kind"] == "disc"
    assert prim["center"] == [0.5, 0.0] and prim["radius"] == 0.5
    assert doc["schema_version"] == "1" and doc["exactness"] == "outer"


def test_margin_reproduces_the_printed_example(capsys):
    code, out, _ = _cli(
        capsys, ["margin", "--controller", LOOP_JSON, "--plant", NONLIN_JSON]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["separated"] is True
    assert abs(doc["r_m"] - 0.875) <= 0.02 * 0.875
    assert abs(doc["bound"] - 8.0 / 7.0) <= 0.02 * 8.0 / 7.0
    assert doc["witness"] is not None


def test_cli_and_api_margin_bytes_are_identical(capsys, client):
    code, out, _ = _cli(
        capsys, ["margin", "--controller", LOOP_JSON, "--plant", NONLIN_JSON]
    )
    assert code == 0
    resp = client.post(
        "/api/margin",
        json={"controller": json.loads(LOOP_JSON), "plant": json.loads(NONLIN_JSON)},
    )
    assert resp.status_code == 200
    assert resp.content == out.encode("utf-8")


def test_api_flags_the_unstable_configuration(client):
    resp = client.post(
        "/api/margin",
        json={"controller": json.loads(UNIT_LOOP_JSON), "plant": json.loads(NONLIN_JSON)},
    )
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["separated"] is False
    # canonical JSON forbids bare Infinity, so the sentinel is the string
    assert doc["r_m"] == 0.0 and doc["bound"] == "inf"


def test_api_health_reports_the_version(client):
    resp = client.get("/api/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "version": __version__}


def test_api_srg_of_the_sector(client):
    resp = client.post("/api/srg", json={"system": json.loads(SAT_JSON)})
    assert resp.status_code == 200
    (prim,) = resp.json()["primitives"]
    assert prim["kind"] == "disc" and prim["center"] == [0.5, 0.0] and prim["radius"] == 0.5


def test_validation_errors_exit_2_with_machine_readable_stderr(capsys):
    code, _, err = _cli(capsys, ["bound", "--system", "{not json"])
    assert code == 2
    doc = json.loads(err)
    assert doc["error"]["code"] == "validation"
    assert "system" in doc["error"]["message"]


def test_geometry_errors_exit_3_and_name_the_frequency(capsys):
    code, _, err = _cli(capsys, ["bound", "--system", '{"type":"lti","num":[1],"den":[0,1]}'])
    assert code == 3
    doc = json.loads(err)
    assert doc["error"]["code"] == "geometry"
    assert "omega" in doc["error"]["message"]


def test_api_uses_400_for_schema_and_422_for_geometry(client):
    bad = client.post("/api/srg", json={"system": {"type": "lti", "num": [1]}})
    assert bad.status_code == 400
    assert bad.json()["error"]["code"] == "validation"
    unbounded = client.post("/api/srg", json={"system": {"type": "lti", "num": [1], "den": [0, 1]}})
    assert unbounded.status_code == 422
    assert unbounded.json()["error"]["code"] == "geometry"


def test_sample_runs_are_reproducible(capsys):
    argv = ["sample", "--system", SAT_JSON, "--pairs", "20", "--seed", "6",
            "--class", '{"amplitude": 2.0, "horizon": 1.0}']
    code1, out1, _ = _cli(capsys, argv)
    code2, out2, _ = _cli(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["pair_count"] == 20 and doc["seed"] == 6
    assert doc["class"]["amplitude"] == 2.0


def test_identical_api_bodies_give_identical_responses(client):
    body = {"system": json.loads(SAT_JSON), "n_pairs": 15, "seed": 4}
    r1 = client.post("/api/sample", json=body)
    r2 = client.post("/api/sample", json=body)
    assert r1.status_code == r2.status_code == 200
    assert r1.content == r2.content


def test_sample_writes_csv_when_asked(tmp_path, capsys):
    out = tmp_path / "cloud.csv"
    code, _, _ = _cli(
        capsys,
        ["sample", "--system", SAT_JSON, "--pairs", "5", "--seed", "2", "--out", str(out)],
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "re,im,pair_id"
    assert len(lines) == 11


def test_render_places_the_disc_where_the_numbers_say(capsys):
    code, svg, _ = _cli(capsys, ["render", "--system", SAT_JSON])
    assert code == 0
    m = re.search(
        r'matrix\(([-\d.e]+) 0 0 ([-\d.e]+) ([-\d.e]+) ([-\d.e]+)\)', svg
    )
    assert m, "missing affine transform"
    sx, sy, tx, ty = (float(g) for g in m.groups())
    fills = svg.split('fill-opacity="0.4"')[1]
    c = re.search(r'<circle cx="([-\d.e]+)" cy="([-\d.e]+)" r="([-\d.e]+)"', fills)
    assert c, "missing region circle"
    cx, cy, r = (float(g) for g in c.groups())
    # world bbox of the drawn region against the known disc, in pixels
    assert abs(sx * ((cx - r) - 0.0)) <= 1.0
    assert abs(sx * ((cx + r) - 1.0)) <= 1.0
    assert abs(abs(sy) * ((cy - r) - (-0.5))) <= 1.0
    assert abs(abs(sy) * ((cy + r) - 0.5)) <= 1.0
    assert "<svg" in svg and "</svg>" in svg


def test_render_draws_the_witness_for_a_margin_pair(capsys):
    code, svg, _ = _cli(
        capsys, ["render", "--controller", LOOP_JSON, "--plant", NONLIN_JSON]
    )
    assert code == 0
    assert "stroke-dasharray" in svg  # witness segment
    assert "0.87" in svg  # labeled distance
