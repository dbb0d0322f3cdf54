"""CLI dispatch, output formats, exit codes."""

from __future__ import annotations

import json

from cuspmf import cli
from cuspmf.ring import Poly, PolyMatrix, X, XYZ, Y, Z


def run_json(capsys, argv):
    code = cli.run(["--json"] + argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_convert_band_to_loop_golden(capsys):
    code, data = run_json(capsys, [
        "convert", "band-to-loop",
        "--word", "6,0,2,-1,0,-3,0,0,5,0,-2,1,-1,3,4"])
    assert code == 0
    assert data["loop_word"] == [8, 2, 3, -1, -1, -4, -1, 0, 5, 0, -2, 1, 0, 4, 6]
    assert data["sign_word"] == [1, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 1, 1]
    assert data["correction_word"] == [2, 2, 1, 0, -1, -1, -1, 0, 0, 0, 0, 0, 1, 1, 2]
    assert data["holonomy"] == {"num": -1, "den": 1, "lam_exp": 1}
    assert data["sign_exponent"] == 1


def test_convert_loop_to_band_roundtrip(capsys):
    code, data = run_json(capsys, [
        "convert", "loop-to-band",
        "--word", "8,2,3,-1,-1,-4,-1,0,5,0,-2,1,0,4,6"])
    assert code == 0
    assert data["band_word"] == [6, 0, 2, -1, 0, -3, 0, 0, 5, 0, -2, 1, -1, 3, 4]


def test_normalize_cli(capsys):
    code = cli.run(["normalize", "--word", "2,2,2,1,2,2"])
    out = capsys.readouterr().out.strip()
    assert code == 0
    # canonical shift of (-2,-1,-1)
    assert out == "-2,-1,-1"


def test_normalize_rejects_non_essential(capsys):
    code = cli.run(["normalize", "--word", "5,0,0"])
    assert code == cli.EXIT_INPUT


def test_equiv(capsys):
    code, data = run_json(capsys, ["equiv", "--word", "2,2,2,1,2,2",
                                   "--word2=-2,-1,-1"])
    assert code == 0 and data["equivalent"] is True
    code, data = run_json(capsys, ["equiv", "--word", "1,2,3",
                                   "--word2", "3,2,1"])
    assert code == 0 and data["equivalent"] is False


def test_mf_canonical_check(capsys):
    code = cli.run(["mf", "canonical", "--word", "3,3,3", "--check"])
    out = capsys.readouterr().out
    assert code == 0
    assert "OK" in out


def test_mf_canonical_json_roundtrip(capsys):
    code, data = run_json(capsys, ["mf", "canonical", "--word", "3,-2,2"])
    assert code == 0
    from cuspmf import mfcore
    from cuspmf.words import CyclicWord
    phi = PolyMatrix.from_json(data["phi"])
    assert phi == mfcore.canonical_phi(CyclicWord((3, -2, 2), "loop"))


def test_mf_geometric_match(capsys):
    code, data = run_json(capsys, ["mf", "geometric", "--word", "2,3,2", "--match"])
    assert code == 0
    assert data["match"] is not None


def test_mf_theta(capsys):
    code, data = run_json(capsys, ["mf", "theta", "--index", "1",
                                   "--params", "2,3"])
    assert code == 0
    theta = PolyMatrix.from_json(data["theta"])
    assert theta.entries[1][1] == Y * Z


def test_mf_reduce_file(tmp_path, capsys):
    blob = {
        "phi": PolyMatrix([[X * Y, Poly.zero()], [Poly.zero(), Poly.one()]]).to_json(),
        "psi": PolyMatrix([[Z, Poly.zero()], [Poly.zero(), XYZ]]).to_json(),
        "potential": XYZ.to_json(),
    }
    f = tmp_path / "mf.json"
    f.write_text(json.dumps(blob))
    code, data = run_json(capsys, ["mf", "reduce", "--in", str(f),
                                   "--row", "2", "--col", "2"])
    assert code == 0
    assert data["verified"] is True


def test_resolve(capsys):
    code, data = run_json(capsys, ["resolve", "--word", "1,-2,0", "--trace"])
    assert code == 0
    assert data["endpoint_matches_canonical"] is True
    assert data["path"] == "mixed"
    assert all(s["ok"] for s in data["stages"])


def test_strips_cli(capsys):
    code, data = run_json(capsys, ["strips", "--word", "2,3,2", "--start", "p"])
    assert code == 0
    ends = {h["end"] for h in data["hits"]}
    assert ends == {"s", "u"}


def test_t32_cli(capsys):
    code, data = run_json(capsys, ["t32", "--m", "3", "--check"])
    assert code == 0
    assert data["product_convention"] == "+xyz"
    assert data["cofactor_matches"] is True


def test_bad_input_exit_codes(capsys):
    assert cli.run(["convert", "band-to-loop", "--word", "1,2"]) == cli.EXIT_INPUT
    assert cli.run(["convert", "band-to-loop", "--word", "a,b,c"]) == cli.EXIT_INPUT
    assert cli.run(["convert", "loop-to-band", "--word", "0,0,3"]) == cli.EXIT_INPUT
    assert cli.run(["mf", "canonical", "--word", "1,1,1",
                    "--lambda", "0,1"]) == cli.EXIT_INPUT
    assert cli.run(["nonsense"]) == cli.EXIT_INPUT


def test_pretty_and_json_agree(capsys):
    code = cli.run(["convert", "band-to-loop", "--word", "1,-2,0"])
    pretty = capsys.readouterr().out
    assert "w'     = 1,-2,0" in pretty
    code, data = run_json(capsys, ["convert", "band-to-loop", "--word", "1,-2,0"])
    assert data["loop_word"] == [1, -2, 0]


def test_reduce_trunc_env(tmp_path, capsys, monkeypatch):
    # a non-constant unit pivot takes the truncated path; the default trunc
    # comes from CUSPMF_TRUNC
    one, zero = Poly.one(), Poly.zero()
    blob = {
        "phi": PolyMatrix([[XYZ * (one + X), zero], [Y, one + X]]).to_json(),
        "psi": PolyMatrix([[one, zero], [zero, XYZ]]).to_json(),
        "potential": (XYZ * (one + X)).to_json(),
    }
    f = tmp_path / "mf.json"
    f.write_text(json.dumps(blob))
    monkeypatch.setenv("CUSPMF_TRUNC", "5")
    code, data = run_json(capsys, ["mf", "reduce", "--in", str(f),
                                   "--row", "2", "--col", "2"])
    assert code == 0
    assert data["truncated"] is True
    assert data["verified"] is None


def test_geometric_all_two_word_is_input_error(capsys):
    assert cli.run(["mf", "geometric", "--word", "2,2,2"]) == cli.EXIT_INPUT


def test_resolve_dump_includes_stage_matrices(capsys):
    code, data = run_json(capsys, ["resolve", "--word", "1,-2,0", "--dump"])
    assert code == 0
    assert "step4-pi5-phi5" in data["stage_matrices"]
    endpoint = PolyMatrix.from_json(data["endpoint_phi"])
    assert endpoint.rows == 3


def test_t32_presentation_flags(capsys):
    code, data = run_json(capsys, ["t32", "--m", "2", "--presentation", "J"])
    assert code == 0 and data["presentation"]["ok"] is True
    code, data = run_json(capsys, ["t32", "--m", "1", "--presentation", "I"])
    assert code == 0 and data["presentation"]["ok"] is True
    assert cli.run(["t32", "--m", "2", "--presentation", "I"]) == cli.EXIT_INPUT
