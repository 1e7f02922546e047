import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ifccr.cli import main
from ifccr.discrete import degraded_fixture
from ifccr.model import GaussianChannel, channel_to_json, get_log_base


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def unit_relay_file(tmp_path, h12, h21):
    ch = GaussianChannel(h11=1, h12=h12, h1c=1, h21=h21, h22=1, h2c=1)
    return write_json(tmp_path / "ch.json", channel_to_json(ch))


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("h12, h21, label", [(2, 0.5, "STRONG"), (1, 2, "VERY_STRONG")])
def test_gaussian_check(tmp_path, capsys, h12, h21, label):
    code, out, _ = run(["gaussian-check", "--channel", unit_relay_file(tmp_path, h12, h21)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["user1"] == label
    assert set(rep["margins"]) == {"user1", "user2"}
    assert set(rep["boundaryFlags"]["user1"]) == {"strong", "veryStrong"}


def test_gaussian_check_missing_field(tmp_path, capsys):
    obj = channel_to_json(GaussianChannel())
    del obj["h22"]
    code, _, err = run(["gaussian-check", "--channel", write_json(tmp_path / "c.json", obj)], capsys)
    assert code == 2
    assert "h22" in err


def test_gaussian_check_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["gaussian-check", "--channel", str(bad)], capsys)[0] == 2
    assert run(["gaussian-check", "--channel", str(tmp_path / "none.json")], capsys)[0] == 2
    assert run(["gaussian-check"], capsys)[0] == 2


def test_gaussian_check_raw_channel(tmp_path, capsys):
    raw = {
        "kind": "gaussian_raw", "h11": 2, "h12": 2, "h1c": 2, "h21": 1, "h22": 2, "h2c": 2,
        "P1": 1, "P2": 1, "Pc": 1, "sigma1_sq": 4, "sigma2_sq": 4,
    }
    code, out, _ = run(["gaussian-check", "--channel", write_json(tmp_path / "r.json", raw)], capsys)
    assert code == 0
    # scales to unit direct and relay gains with h12 = 1, h21 = 0.5
    assert json.loads(out)["user1"] == "STRONG"


def test_gaussian_map_full_grid(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["gaussian-map", "--out", str(a), "--jobs", "1"]) == 0
    assert main(["gaussian-map", "--out", str(b), "--jobs", "8"]) == 0
    lines = a.read_text().splitlines()
    assert lines[0] == "h12,h21,label,strongMargin,veryStrongMargin"
    assert len(lines) == 40001
    assert a.read_bytes() == b.read_bytes()


def test_gaussian_map_reversed_range(capsys):
    code, _, err = run(["gaussian-map", "--h12", "10:0:5"], capsys)
    assert code == 2 and "h12" in err


def test_gaussian_map_malformed_range(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gaussian-map", "--h12", "0:10"])
    assert exc.value.code == 2


def test_gaussian_map_user2(capsys):
    code, out, _ = run(["gaussian-map", "--h12", "0:10:2", "--h21", "0:10:2", "--user", "2"], capsys)
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()[1:]]
    # swapping users swaps which cross gain matters
    assert {(r[0], r[1]): r[2] for r in rows}[("0", "10")] == "STRONG"


def frontier_rows(text):
    return np.array([[float(v) for v in r.split(",")] for r in text.splitlines()[1:]])


def support(rows, d):
    return float(np.max(rows @ np.asarray(d)))


def test_gaussian_region_no_relay(tmp_path, capsys):
    ch = GaussianChannel(h11=1, h12=0.5, h1c=0, h21=0.5, h22=1, h2c=0)
    path = write_json(tmp_path / "c.json", channel_to_json(ch))
    code, out, _ = run(["gaussian-region", "--channel", path, "--beta-density", "50"], capsys)
    assert code == 0
    s = math.log2(1 + 1 + 0.25)
    expected = [[1.0, 0.0], [1.0, s - 1.0], [s - 1.0, 1.0], [0.0, 1.0]]
    assert np.allclose(frontier_rows(out), expected, atol=1e-11)


def test_gaussian_region_unity(tmp_path, capsys):
    path = write_json(tmp_path / "c.json", channel_to_json(GaussianChannel()))
    code, out, _ = run(["gaussian-region", "--channel", path], capsys)
    assert code == 0
    assert support(frontier_rows(out), (1, 0)) == pytest.approx(math.log2(5), abs=1e-11)


def test_gaussian_region_density_monotone(tmp_path, capsys):
    path = write_json(tmp_path / "c.json", channel_to_json(GaussianChannel()))
    _, coarse, _ = run(["gaussian-region", "--channel", path, "--beta-density", "3"], capsys)
    _, fine, _ = run(["gaussian-region", "--channel", path, "--beta-density", "300"], capsys)
    c, f = frontier_rows(coarse), frontier_rows(fine)
    for a in np.linspace(0, math.pi / 2, 91):
        d = (math.cos(a), math.sin(a))
        # CSV rounding to 12 significant digits
        assert support(f, d) >= support(c, d) - 1e-11


def test_gaussian_region_bad_density(tmp_path, capsys):
    path = write_json(tmp_path / "c.json", channel_to_json(GaussianChannel()))
    assert run(["gaussian-region", "--channel", path, "--beta-density", "1"], capsys)[0] == 2


def test_discrete_verify_very_strong(tmp_path, capsys):
    out = tmp_path / "rep.json"
    code = main(["discrete-verify", "--fixture", "VERY_STRONG", "--samples", "200", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["ok"] and all(p["passed"] for p in rep["properties"])
    assert rep["margins"]["strong"] >= -1e-12 and rep["margins"]["veryStrong"] >= -1e-12


def test_discrete_verify_strong_only(capsys):
    code, out, _ = run(["discrete-verify", "--fixture", "STRONG_ONLY", "--samples", "200"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["margins"]["veryStrong"] < 0
    assert rep["witnesses"]["veryStrong"]["p1"]
    props = {p["name"]: p for p in rep["properties"]}
    assert props["inner_equals_outer"]["asserted"] is False


def test_discrete_verify_tampered(tmp_path, capsys):
    obj = channel_to_json(degraded_fixture("VERY_STRONG"))
    n1, n2, nc, m1, m2 = obj["sizes"]
    t = np.asarray(obj["t"], dtype=float).reshape(m1, m2, n1, n2, nc)
    t[:, :, 1, 0, 1] *= 0.9
    obj["t"] = t.ravel().tolist()
    code, _, err = run(["discrete-verify", "--channel", write_json(tmp_path / "t.json", obj)], capsys)
    assert code == 2
    assert "NOT_NORMALIZED" in err


def test_discrete_verify_with_distribution(tmp_path, capsys):
    ch = write_json(tmp_path / "c.json", channel_to_json(degraded_fixture("VERY_STRONG")))
    dist = {"p1": [0.5, 0.5], "p2": [0.5, 0.5], "pc": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]}
    code, out, _ = run(
        ["discrete-verify", "--channel", ch, "--dist", write_json(tmp_path / "d.json", dist), "--samples", "20"],
        capsys,
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["distribution"]["outer"]["sum_max"] == pytest.approx(2.0, abs=1e-12)


def test_discrete_verify_deterministic(capsys):
    argv = ["discrete-verify", "--fixture", "STRONG_ONLY", "--samples", "50", "--seed", "7"]
    assert run(argv, capsys)[1] == run(argv, capsys)[1]


def test_base_flag_restored(tmp_path, capsys):
    path = write_json(tmp_path / "c.json", channel_to_json(GaussianChannel()))
    _, out, _ = run(["gaussian-region", "--channel", path, "--base", "e", "--beta-density", "3"], capsys)
    assert support(frontier_rows(out), (1, 0)) == pytest.approx(math.log(5), abs=1e-11)
    assert get_log_base() == 2.0


def test_module_entry_point(tmp_path):
    path = unit_relay_file(tmp_path, 2, 0.5)
    res = subprocess.run(
        [sys.executable, "-m", "ifccr", "gaussian-check", "--channel", path],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["user1"] == "STRONG"


def test_property_failure_exit_code(monkeypatch, capsys):
    from ifccr import discrete

    real = discrete.verify_channel

    def failing(*args, **kwargs):
        rep = real(*args, **kwargs)
        bad = discrete.PropertyResult("inner_subset_outer", True, False, 0.5)
        return discrete.VerifyReport(rep.conditions, (bad,) + rep.properties[1:], rep.tol)

    monkeypatch.setattr(discrete, "verify_channel", failing)
    code, out, _ = run(["discrete-verify", "--fixture", "VERY_STRONG", "--samples", "10"], capsys)
    assert code == 3
    assert json.loads(out)["ok"] is False  # report is still written


def test_internal_error_exit_code(monkeypatch, tmp_path, capsys):
    from ifccr import gaussian

    def boom(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr(gaussian, "classify", boom)
    assert run(["gaussian-check", "--channel", unit_relay_file(tmp_path, 2, 0.5)], capsys)[0] == 1


def test_map_piped_into_closed_reader():
    proc = subprocess.Popen(
        [sys.executable, "-m", "ifccr", "gaussian-map"],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE,
    )
    proc.stdout.readline()
    proc.stdout.close()
    err = proc.stderr.read().decode()
    proc.stderr.close()
    assert proc.wait() == 0
    assert "Traceback" not in err
