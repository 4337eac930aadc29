import io
import json

import numpy as np
import pytest

from blowup.cli import main
from blowup.errors import ConfigError
from blowup.io import (
    PRESETS,
    eval_number,
    load_spec,
    read_tiles,
    report_dict,
    save_spec,
    spec_from_dict,
    specs_equal,
    write_report,
    write_tiles,
)
from blowup.render import RenderStyle, render_svg
from blowup.symbolic import format_word, omega_level
from blowup.tiling import Tiling, canonical_tiling, pi_prefix


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_round_trip(tmp_path, name):
    spec = load_spec(name)
    path = tmp_path / f"{name}.json"
    save_spec(spec, path)
    assert specs_equal(load_spec(str(path)), spec)


def test_golden_preset_matrices(goldenb):
    f1, f2 = goldenb.maps
    assert np.array_equal(f1.ortho, [[0, 1], [-1, 0]]) and np.allclose(f1.trans, [0, goldenb.s])
    assert np.array_equal(f2.ortho, [[-1, 0], [0, 1]]) and np.allclose(f2.trans, [1, 0])


def test_cantor_preset_mode(cantor):
    assert not cantor.is_polygon
    assert cantor.pv.a == (1, 2, 2)


def test_expression_parsing():
    assert eval_number("1 - s^2", 0.5, "x") == 0.75
    assert eval_number(3, None, "x") == 3.0
    for bad in ("__import__('os')", "s(1)", "2 +", True):
        with pytest.raises(ConfigError):
            eval_number(bad, 0.5, "x")


def _golden_dict():
    return json.loads(json.dumps(PRESETS["goldenb"]))


def test_spec_errors_name_the_field(tmp_path):
    data = _golden_dict()
    data["maps"][1]["a"] = 2
    data["maps"][0]["a"] = 2
    with pytest.raises(ConfigError, match="gcd"):
        spec_from_dict(data)
    data = _golden_dict()
    del data["maps"][0]["translate"]
    with pytest.raises(ConfigError, match=r"maps\[0\]"):
        spec_from_dict(data)
    bad = tmp_path / "broken.json"
    bad.write_text('{"name": "x",\n "dim": 2,,}')
    with pytest.raises(ConfigError, match="broken.json:2"):
        load_spec(str(bad))
    with pytest.raises(ConfigError):
        load_spec("no-such-preset")


def test_tile_records_reconstruct_bit_exactly(goldenb):
    t = pi_prefix((1, 2, 1), goldenb)
    buf = io.StringIO()
    write_tiles(t, buf)
    back = read_tiles(buf.getvalue().splitlines(), goldenb)
    assert np.array_equal(back.orthos, t.orthos)
    assert np.array_equal(back.trans, t.trans)
    assert np.array_equal(back.powers, t.powers)
    assert back.addresses == t.addresses


def test_render_labels_and_determinism(goldenb):
    t = canonical_tiling(3, goldenb)
    svg = render_svg(t, RenderStyle(labels=True))
    assert svg.count("<polygon") == 8 and svg.count("<text") == 8
    assert svg == render_svg(canonical_tiling(3, goldenb), RenderStyle(labels=True))
    assert "#4e79a7" in svg and "#f28e2b" in svg


def test_render_empty_and_pointcloud(goldenb, cantor):
    svg = render_svg(Tiling.empty(goldenb))
    assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")
    cloud = render_svg(canonical_tiling(0, cantor))
    assert cloud.count("<circle") == 3 * 3**7


def test_report_serialisation():
    rep = report_dict("goldenb", [{"name": "x", "pass": True, "metrics": {"r": float("inf"), "v": np.float64(1.5)}}])
    buf = io.StringIO()
    write_report(rep, stream=buf)
    back = json.loads(buf.getvalue())
    assert back["checks"][0]["metrics"] == {"r": None, "v": 1.5}


def test_cli_omega(capsys, goldenb):
    assert main(["omega", "--spec", "goldenb", "-k", "2"]) == 0
    out = capsys.readouterr().out
    assert out == "".join(format_word(w) + "\n" for w in omega_level(2, goldenb.pv))
    assert len(out.split()) == 5


def test_cli_tiles(capsys, tmp_path):
    assert main(["tiles", "--theta", "121", "--spec", "goldenb"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 13
    out = tmp_path / "t.ndjson"
    assert main(["tiles", "--level", "3", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 8


def test_cli_render_and_addresses(capsys, tmp_path):
    out = tmp_path / "t.svg"
    assert main(["render", "--level", "4", "--labels", "--out", str(out)]) == 0
    assert out.read_text().count("<polygon") == 13
    assert main(["addresses", "--theta", "1"]) == 0
    table = capsys.readouterr().out.splitlines()
    assert table[0] == "index\taddress\tproto" and table[1].split("\t")[1] == "1.2"


def test_cli_verify_and_report(capsys, tmp_path):
    report = tmp_path / "r.json"
    assert main(["verify", "--spec", "goldenb", "--all", "--report", str(report)]) == 0
    data = json.loads(report.read_text())
    assert data["spec"] == "goldenb"
    assert all(c["pass"] for c in data["checks"])
    assert main(["verify", "--inject"]) == 0


def test_cli_rigidity(capsys):
    assert main(["rigidity", "--spec", "goldenb", "--strong"]) == 0
    assert "rigid" in capsys.readouterr().out
    assert main(["rigidity", "--spec", "square"]) == 1


def test_cli_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["omega", "--bogus"])
    assert exc.value.code == 2
    assert main(["tiles", "--spec", "nope", "--level", "1"]) == 2
    assert main(["tiles", "--theta", "13"]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_level_cap(monkeypatch):
    monkeypatch.setenv("BLOWUP_MAX_LEVEL", "3")
    assert main(["omega", "-k", "4"]) == 2
