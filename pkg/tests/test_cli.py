import json
import math
import re

import numpy as np
import pytest

from hconv.cli.expr import evaluate_expression, parse_angle
from hconv.cli.main import main
from hconv.cli.plot import PlotSpec, image_curves, render_svg
from hconv.cli.presets import PRESETS, Category, run_preset
from hconv.errors import ExpressionError, ParamOutOfRange
from hconv.families import DcpStatus, slanted_halfplane_prefunction
from hconv.harmonic import HarmonicMap
from hconv.series import TruncatedSeries, geometric
from hconv.verifiers import SamplingGrid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# expression language


def test_angles():
    assert parse_angle("pi/2") == math.pi / 2
    assert parse_angle("pi/2-0.7854") == pytest.approx(math.pi / 2 - 0.7854)
    assert parse_angle("-(pi)/4*2") == -math.pi / 2
    assert parse_angle("1e-1") == 0.1


def test_expression_context():
    ev = evaluate_expression("convolve(shear(f_theta(1.2), omega=mobius:a=0.3;mu=0.5, gamma=pi/3), strip)", 32)
    assert isinstance(ev.value, HarmonicMap)
    assert ev.gamma == pytest.approx(math.pi / 3)
    assert ev.omega == "mobius:a=0.3;mu=0.5"
    assert ev.weakest_status is DcpStatus.CANDIDATE
    series = evaluate_expression("convolve(koebe_shear(), identity())", 16).value
    assert series == TruncatedSeries(np.arange(17.0))
    pre = evaluate_expression("prefunction(shear(f_alpha(0.5), omega=z, gamma=pi/2))", 32).value
    assert isinstance(pre, TruncatedSeries)


@pytest.mark.parametrize(
    "text, position",
    [
        ("f_alpha(0.5", 11),
        ("foo(1)", 0),
        ("f_alpha(0.5) x", 13),
        ("shear(f_alpha(0.5), omega=q, gamma=1)", 20),
        ("shear(f_alpha(0.5), omega=z)", 0),
        ("f_alpha(pi/)", 11),
        ("convolve(f_alpha(0.5), 3)", 23),
    ],
)
def test_parse_errors_carry_positions(text, position):
    with pytest.raises(ExpressionError) as err:
        evaluate_expression(text, 16)
    assert err.value.position == position


def test_range_errors_are_not_parse_errors():
    with pytest.raises(ParamOutOfRange):
        evaluate_expression("f_alpha(2)", 16)


# families


def test_families_text(capsys):
    code, out, _ = run(capsys, "families")
    assert code == 0
    fam_block = out.split("convolvers:")[0]
    assert len([ln for ln in fam_block.splitlines()[1:] if ln.strip()]) == 5
    assert re.search(r"phi_beta \(beta \(-1, 1\)\)\s+NOT_DCP", out)


def test_families_json(capsys):
    code, out, _ = run(capsys, "families", "--json")
    data = json.loads(out)
    assert code == 0
    assert [f["name"] for f in data["families"]] == ["f_alpha", "f_theta", "koebe_shear", "slanted", "phi_beta"]
    flags = {(c["name"], c.get("beta")): c["status"] for c in data["convolvers"]}
    assert flags[("phi_beta", "(-1, 1)")] == "NOT_DCP"
    assert flags[("strip", None)] == "CANDIDATE"
    assert [d["name"] for d in data["dilatations"]] == ["zero", "z", "z2", "mobius:a=0.3"]


# verify


def test_verify_cone_example(capsys):
    code, out, _ = run(capsys, "verify", "--expr", "shear(f_alpha(0.5), omega=z, gamma=pi/2)",
                       "--check", "eq2", "--eta", "-1", "--xi", "1")
    report = json.loads(out)
    assert code == 0 and report["pass"]
    assert report["order"] == 256


def test_verify_convexity_example(capsys):
    code, out, _ = run(capsys, "verify", "--expr", "phi_beta(1.0)", "--check", "convexity")
    assert code == 0 and json.loads(out)["pass"]


def test_verify_theorem_a_example(capsys):
    code, out, _ = run(capsys, "verify", "--expr", "f_alpha(0)", "--check", "theorem_a")
    assert code == 0 and json.loads(out)["extremal_value"] > 0


def test_verify_failure_exit_code(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--expr", "phi_beta(0)", "--check", "convexity", "--out", str(path))
    assert code == 2
    assert json.loads(path.read_text())["pass"] is False


def test_verify_failing_heuristic_exits_zero(capsys):
    code, out, _ = run(capsys, "verify", "--expr", "koebe_shear()", "--check", "direction_convexity", "--gamma", "pi/2")
    report = json.loads(out)
    assert report["heuristic"] and not report["pass"]
    assert code == 0


def test_verify_parse_error(capsys):
    code, _, err = run(capsys, "verify", "--expr", "shear(f_alpha(0.5), omega=z, gamma=pi/2", "--check", "eq2")
    assert code == 4
    assert "position 39" in err and "^" in err


def test_verify_construction_error(capsys):
    code, _, err = run(capsys, "verify", "--expr", "shear(f_alpha(0.5), omega=1.5*z1, gamma=0)", "--check", "eq2")
    assert code == 3 and "construction error" in err


def test_verify_eq3_variants(capsys):
    code, out, _ = run(capsys, "verify", "--expr", "shear(f_alpha(0.5), omega=z, gamma=pi/2)", "--check", "eq3",
                       "--phi", "strip", "--r-max", "0.5")
    assert code == 0 and json.loads(out)["params"]["total"] == 64
    code, out, _ = run(capsys, "verify", "--expr", "shear(f_alpha(0.5), omega=z, gamma=pi/2)", "--check", "eq3",
                       "--beta", "cis(pi/4)", "--sigma", "-1", "--r-max", "0.5")
    assert code == 0 and json.loads(out)["check"] == "eq3_nonvanishing"


def test_usage_errors(capsys):
    assert run(capsys, "verify", "--expr", "f_alpha(0)", "--check", "nope")[0] == 4
    assert run(capsys, "verify", "--expr", "f_alpha(0)", "--check", "eq2", "--eta", "0.5")[0] == 4


# reproduce


def test_reproduce_alpha_corollary_identity(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "--item", "cor3.2", "--alpha", "0.5", "--omega", "z", "--phi", "identity",
                       "--out-dir", str(tmp_path))
    assert code == 0
    bundle = json.loads((tmp_path / "bundle.json").read_text())
    rows = {r["key"]: r for r in bundle["checks"]}
    assert rows["eq2_cone"]["pass"]
    # the identity convolver leaves everything unchanged
    assert rows["local_univalence_convolved"]["extremal_value"] == rows["local_univalence"]["extremal_value"]
    assert bundle["verdict"]["status"] == "CERTIFIED"
    assert bundle["order"] == 256
    assert bundle["params"] == {"alpha": 0.5, "beta": 0.0, "omega": "z", "phi": "identity", "phi_status": "PROVEN_DCP"}
    for row in bundle["checks"]:
        assert (tmp_path / row["file"]).exists()


def test_reproduce_remark_phi_beta(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "--item", "rem3.8", "--beta", "0", "--out-dir", str(tmp_path))
    bundle = json.loads((tmp_path / "bundle.json").read_text())
    check = bundle["checks"][0]
    assert code == 0
    assert check["pass"] is False and check["succeeded"] is True
    assert check["witness"][0] == 0.0 and check["extremal_value"] < -4
    assert "NOT_DCP confirmed" in bundle["verdict"]["conclusion"]


def test_reproduce_typically_real_example(capsys, tmp_path):
    code, _, _ = run(capsys, "reproduce", "--item", "thm3.7", "--alpha", "0.3", "--beta", "-0.4", "--omega", "z",
                     "--out-dir", str(tmp_path))
    rows = {r["key"]: r for r in json.loads((tmp_path / "bundle.json").read_text())["checks"]}
    assert code == 0
    assert rows["typically_real_zG"]["pass"]
    assert rows["theorem_a_convolved_prefunction"]["pass"]
    assert rows["local_univalence_convolved"]["category"] == "REPORTED"


def test_reproduce_is_byte_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "reproduce", "--item", "cor3.5", "--out-dir", str(a))
    run(capsys, "reproduce", "--item", "cor3.5", "--out-dir", str(b))
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_reproduce_errors(capsys, tmp_path):
    assert run(capsys, "reproduce", "--item", "cor3.2", "--alpha", "2", "--out-dir", str(tmp_path))[0] == 3
    assert run(capsys, "reproduce", "--item", "cor3.2", "--theta", "1", "--out-dir", str(tmp_path))[0] == 4
    assert run(capsys, "reproduce", "--item", "thm9.9")[0] == 4


@pytest.mark.parametrize("preset_id", sorted(PRESETS))
def test_every_preset_certifies_by_default(preset_id):
    result = run_preset(preset_id, {})
    assert result.exit_code == 0
    assert result.bundle["order"] == 256
    categories = {row["category"] for row in result.bundle["checks"]}
    assert categories <= {c.value for c in Category}
    assert "CERTIFIED" in categories


def test_conditional_convolver_is_flagged():
    result = run_preset("cor3.2", {"phi": "strip"})
    assert result.bundle["verdict"]["status"] == "CONDITIONAL"
    assert any(row["category"] == "CONDITIONAL" for row in result.bundle["checks"])


def test_failing_certified_check_gives_exit_2():
    # a 0.9 grid at N = 128 leaves tail slack of order 1e-5, too much to certify small margins
    result = run_preset("cor3.4", {}, grid=SamplingGrid.default(r_max=0.9), order=128)
    failed = [r for r in result.bundle["checks"] if r["category"] == "CERTIFIED" and not r["succeeded"]]
    assert failed
    assert result.exit_code == 2
    assert result.bundle["verdict"]["status"] == "FAILED"


# plot


def test_plot_identity_gives_circles_and_straight_spokes():
    rings, spokes = image_curves(lambda z: z, PlotSpec(rings=4, spokes=4, r_max=0.8))
    for k, ring in enumerate(rings, start=1):
        np.testing.assert_allclose(np.abs(ring), 0.2 * k, atol=1e-15)
    for s in spokes:
        angles = np.angle(s[1:])
        assert np.ptp(np.unwrap(angles)) < 1e-12


def test_plot_slanted_accumulates_near_vertical_line():
    rings, _ = image_curves(slanted_halfplane_prefunction(0.0, 256), PlotSpec(r_max=0.95))
    assert rings[-1].real.min() == pytest.approx(-0.95 / 1.95, abs=1e-5)
    assert rings[-1].real.min() > -0.5


def test_plot_f0_is_symmetric():
    f = evaluate_expression("f_alpha(0)", 256).value
    rings, _ = image_curves(f, PlotSpec())
    w = rings[-1]
    n = w.size
    k = np.arange(n)
    # sample k sits at angle 2 pi k / n: conj z is sample -k, and -z is sample k + n/2
    np.testing.assert_allclose(w[-k % n], np.conj(w), atol=1e-12)
    np.testing.assert_allclose(w[(k + n // 2) % n], -w, atol=1e-12)


def test_plot_spec_validation():
    with pytest.raises(ValueError):
        PlotSpec(rings=3)
    with pytest.raises(ValueError):
        PlotSpec(r_max=0.99)
    with pytest.raises(ValueError):
        PlotSpec(points=100)


def test_plot_command_writes_svg(capsys, tmp_path):
    out = tmp_path / "p.svg"
    code, _, _ = run(capsys, "plot", "--family", "f_alpha", "--alpha", "0.5", "--omega", "z", "--out", str(out))
    text = out.read_text(encoding="utf-8")
    assert code == 0
    assert text.startswith("<?xml") and 'version="1.1"' in text
    assert text.count("<polygon") == 8 and text.count("<polyline") == 16
    assert 'marker-end="url(#head)"' in text
    first = re.search(r'points="([^"]*)"', text).group(1)
    assert len(first.split()) >= 512
    code, _, _ = run(capsys, "plot", "--expr", "slanted(pi/4)", "--gamma", "pi/4", "--out", str(tmp_path / "q.svg"))
    assert code == 0


def test_render_svg_is_deterministic():
    spec = PlotSpec()
    assert render_svg(geometric(64), spec, "a<b") == render_svg(geometric(64), spec, "a<b")
    assert "a&lt;b" in render_svg(geometric(64), spec, "a<b")
