import json

import numpy as np
import pytest
from conftest import I2, SM, SX, SZ, rand_c

from lindblad_algebra import hamiltonian_superop, lindblad_single_superop, mat_exp
from lindblad_algebra.cli import main
from lindblad_algebra.serialization import read_matrix, write_matrix

A = np.array([[1, -4], [3, -1]])
B = np.array([[-2, 4], [2, 2]])


@pytest.fixture
def files(tmp_path):
    def put(name, m, kind="operator"):
        path = tmp_path / name
        write_matrix(path, m, kind)
        return str(path)

    return put


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_superop_hs(files, capsys):
    code, doc = run(["superop", "hs", files("sz.json", SZ)], capsys)
    assert code == 0 and doc["kind"] == "superoperator" and doc["dim"] == 2
    m = np.array(doc["entries"])
    assert np.allclose(m[..., 0] + 1j * m[..., 1], np.diag([0, -2j, 2j, 0]))


def test_superop_l1s_identity(files, tmp_path, capsys):
    out = tmp_path / "z.json"
    assert main(["superop", "l1s", files("i.json", I2), "--output", str(out)]) == 0
    assert np.allclose(read_matrix(out, "superoperator"), 0)


def test_superop_ls_matches_l1s(files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    sm = files("sm.json", SM)
    main(["superop", "l1s", sm, "--output", str(a)])
    main(["--output", str(b), "superop", "ls", sm, "--gamma", files("g.json", np.eye(1), "gamma")])
    assert a.read_text() == b.read_text()


def test_superop_errors(files, tmp_path, capsys):
    assert main(["superop", "hs", files("sm.json", SM)]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert main(["superop", "hs", str(bad)]) == 2
    assert main(["superop", "hs", files("g.json", np.eye(2), "gamma")]) == 2
    assert main(["superop", "ls", files("x.json", SX)]) == 2
    assert main(["superop", "hs", files("x.json", SX), files("z.json", SZ)]) == 2
    assert "error" in capsys.readouterr().err


def test_superop_non_hermitian_gamma(files):
    g = files("g.json", np.array([[1, 1], [0, 1]]), "gamma")
    assert main(["superop", "ls", files("x.json", SX), files("z.json", SZ), "--gamma", g]) == 3


def test_commute_golden(files, capsys):
    code, rep = run(["commute", files("a.json", A), files("b.json", B)], capsys)
    assert code == 0
    assert rep["hbar"] == 1.0 and rep["command"][0] == "commute"
    assert np.allclose(rep["projection"]["h"], [0, 14, 0], atol=1e-9)
    g = np.array(rep["projection"]["gamma"])
    assert np.linalg.norm(g) < 1e-9
    assert rep["modes_agree"]
    neg = rep["negative_rates"]
    assert not neg["has_negative"] and neg["terms_have_negative_coefficients"]
    assert "cancel" in neg["explanation"]


def test_commute_hbar_before_and_after(files, capsys):
    a, b = files("a.json", A), files("b.json", B)
    _, r1 = run(["--hbar", "2", "commute", a, b], capsys)
    _, r2 = run(["commute", a, b, "--hbar", "2"], capsys)
    assert r1["hbar"] == r2["hbar"] == 2.0
    assert np.allclose(r1["projection"]["h"], [0, 28, 0])


def test_commute_identical_inputs(files, capsys, rng):
    a = files("a.json", rand_c(rng, 3))
    _, rep = run(["commute", a, a, "--mode", "numeric"], capsys)
    m = np.array(rep["commutator"])
    assert np.allclose(m, 0)


@pytest.mark.parametrize("kinds", [("hs", "hs"), ("hs", "l1s"), ("l1s", "hs"), ("l1s", "l1s")])
def test_commute_modes_agree(files, capsys, rng, kinds):
    h = rand_c(rng, 3)
    x = h + h.conj().T if kinds[0] == "hs" else h
    k = rand_c(rng, 3)
    y = k + k.conj().T if kinds[1] == "hs" else k
    args = [files("x.json", x), files("y.json", y), "--lhs", kinds[0], "--rhs", kinds[1]]
    _, closed = run(["commute", *args, "--mode", "closed"], capsys)
    _, numeric = run(["commute", *args, "--mode", "numeric"], capsys)
    assert closed["closed_vs_numeric_deviation"] < 1e-10 and closed["modes_agree"]
    c = np.array(closed["commutator"])
    n = np.array(numeric["commutator"])
    assert np.linalg.norm(c - n) < 1e-10 * max(np.linalg.norm(n), 1)


def test_commute_reports_negative_rates(files, capsys, rng):
    _, rep = run(["commute", files("x.json", rand_c(rng, 2)), files("y.json", rand_c(rng, 2))], capsys)
    assert rep["negative_rates"]["has_negative"]
    assert rep["negative_rates"]["negative_rates"]
    assert "Lindblad form" in rep["negative_rates"]["explanation"]


def _schedule(tmp_path, segments, **extra):
    path = tmp_path / "schedule.json"
    path.write_text(json.dumps({"segments": segments, **extra}))
    return str(path)


def test_sequence_single_segment(tmp_path, files, capsys, rng):
    g = 0.2 * rand_c(rng, 4)
    files("g.json", g, "superoperator")
    code, rep = run(["sequence", _schedule(tmp_path, [{"generator": "g.json", "duration": 0.5}])], capsys)
    assert code == 0
    exact = np.array(rep["exact_generator"])
    assert np.allclose(exact[..., 0] + 1j * exact[..., 1], 0.5 * g)
    assert rep["difference_norm"] < 1e-12


def test_sequence_commuting(tmp_path, files, capsys):
    files("a.json", hamiltonian_superop(SZ), "superoperator")
    files("b.json", lindblad_single_superop(SZ), "superoperator")
    segs = [{"generator": "a.json", "duration": 0.3}, {"generator": "b.json", "duration": 0.2}]
    _, rep = run(["sequence", _schedule(tmp_path, segs), "--order", "1"], capsys)
    assert rep["difference_norm"] < 1e-12


def test_sequence_sandwich_scaling(tmp_path, files, capsys):
    hs = hamiltonian_superop(SX)
    files("p.json", -hs, "superoperator")
    files("q.json", hs, "superoperator")
    inline = {"kind": "superoperator", "dim": 2, "entries": np.stack(
        [lindblad_single_superop(SZ).real, lindblad_single_superop(SZ).imag], axis=-1).tolist()}
    segs = [
        {"generator": "p.json", "duration": 0.05},
        {"generator": inline, "duration": 1.0},
        {"generator": "q.json", "duration": 0.05},
    ]
    _, rep = run(["sequence", _schedule(tmp_path, segs, scaling_segments=[0, 2]), "--order", "2"], capsys)
    assert abs(rep["scaling_check"]["observed_exponent"] - 2) < 0.1
    assert rep["warnings"] == [] or all(isinstance(w, str) for w in rep["warnings"])


def test_sequence_norm_warning(tmp_path, files, capsys):
    files("g.json", hamiltonian_superop(SX), "superoperator")
    _, rep = run(["sequence", _schedule(tmp_path, [{"generator": "g.json", "duration": 1.0}] * 2)], capsys)
    assert rep["norm_warning"] and any("ln 2" in w for w in rep["warnings"])


def test_sequence_errors(tmp_path, files, capsys):
    assert main(["sequence", _schedule(tmp_path, [])]) == 3
    assert main(["sequence", _schedule(tmp_path, [{"generator": "nope.json", "duration": 1}])]) == 2
    files("g.json", np.eye(4), "superoperator")
    assert main(["sequence", _schedule(tmp_path, [{"generator": "g.json", "duration": "x"}])]) == 2
    assert main(["sequence", _schedule(tmp_path, [{"generator": "g.json", "duration": -1}])]) == 3
    assert main(["sequence", _schedule(tmp_path, [{"generator": "g.json", "duration": 1}], scaling_segments=[4])]) == 2


def test_extract_identity(files, capsys):
    code, rep = run(["extract", files("id.json", np.eye(4), "superoperator")], capsys)
    assert code == 0
    assert np.allclose(rep["h"], 0) and np.allclose(rep["gamma"], 0)
    assert rep["canonical"]["terms"] == [] and rep["residual_norm"] == 0


def test_extract_known_generator(files, capsys):
    g = hamiltonian_superop(0.2 * SZ) + 0.1 * lindblad_single_superop(SX)
    _, rep = run(["extract", files("t.json", mat_exp(g), "superoperator")], capsys)
    assert np.allclose(rep["h"], [0, 0, 0.2], atol=1e-8)
    gamma = np.array(rep["gamma"])
    want = np.zeros((3, 3))
    want[0, 0] = 0.1
    assert np.allclose(gamma[..., 0], want, atol=1e-8) and np.allclose(gamma[..., 1], 0, atol=1e-8)


def test_extract_non_generator(files, capsys, rng):
    t = np.eye(4) + 0.3 * rng.normal(size=(4, 4))
    code, rep = run(["extract", files("t.json", t, "superoperator")], capsys)
    assert code == 0 and rep["residual_norm"] > 1e-6
    assert any("residual" in w for w in rep["warnings"])


def test_extract_singular(files):
    assert main(["extract", files("t.json", np.zeros((4, 4)), "superoperator")]) == 4


def test_verify_small(capsys):
    code, rep = run(["verify", "identities", "--trials", "2", "--dims", "2", "--seed", "7"], capsys)
    assert code == 0 and rep["passed"] and rep["seed"] == 7
    assert all("passed" in c for c in rep["checks"])


def test_verify_bch_reports_slopes(capsys):
    _, rep = run(["verify", "bch", "--trials", "1"], capsys)
    slopes = {c["name"]: c["measured"] for c in rep["checks"] if c["name"].startswith("bch_slope")}
    assert set(slopes) == {f"bch_slope_order{k}" for k in (1, 2, 3, 4)}


def test_verify_bad_dims():
    assert main(["verify", "all", "--dims", "2,x"]) == 2
    assert main(["verify", "all", "--dims", "1"]) == 2


def test_verify_determinism(capsys):
    _, r1 = run(["verify", "projection", "--trials", "2", "--dims", "2", "--seed", "3"], capsys)
    _, r2 = run(["verify", "projection", "--trials", "2", "--dims", "2", "--seed", "3"], capsys)
    r1.pop("timing_seconds")
    r2.pop("timing_seconds")
    assert r1 == r2


def test_replay(tmp_path, capsys, monkeypatch):
    from lindblad_algebra import verify

    # tighten one check so that it fails, then replay the dumped instance
    check = verify.CHECKS["vec_roundtrip"]
    monkeypatch.setitem(verify.CHECKS, "vec_roundtrip", verify.Check(**{**check.__dict__, "tolerance": -1.0}))
    code, rep = run(["verify", "identities", "--trials", "1", "--dims", "2", "--replay-dir", tmp_path], capsys)
    assert code == 1 and not rep["passed"]
    files = sorted(tmp_path.glob("replay-*.json"))
    assert files
    code, replayed = run(["replay", files[0]], capsys)
    assert code == 1 and replayed["check"] == "vec_roundtrip"
    monkeypatch.undo()
    code, replayed = run(["replay", files[0]], capsys)
    assert code == 0 and replayed["passed"]


def test_replay_bad_file(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"check": "nope"}))
    assert main(["replay", str(p)]) == 2
