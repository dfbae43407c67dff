import json

import pytest

from kcut.cli import build_parser, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit) as e:
        main(["simulate", "--help"])
    assert e.value.code == 0
    text = capsys.readouterr().out
    for flag in ("--family", "--n", "--m", "--k", "--replicas", "--seed", "--out", "--ell",
                 "--offspring", "--workers", "--engine"):
        assert flag in text


def test_simulate_path(tmp_path, capsys):
    out = tmp_path / "run"
    code, text, _ = run(["simulate", "--family", "path", "--n", "2", "--k", "1", "--replicas", "20000",
                         "--seed", "3", "--out", str(out), "--workers", "1"], capsys)
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert abs(summary["mean"] - 1.5) < 0.02
    assert summary["predictions"]["exact"] == pytest.approx(1.5)
    assert "observed/predicted" in text
    assert (out / "samples.csv").read_text().startswith("value\n")


def test_simulate_byte_identical_across_workers(tmp_path, capsys):
    base = ["simulate", "--family", "binary", "--m", "5", "--k", "2", "--replicas", "300", "--seed", "11"]
    run(base + ["--out", str(tmp_path / "a"), "--workers", "1"], capsys)
    run(base + ["--out", str(tmp_path / "b"), "--workers", "2"], capsys)
    for name in ("samples.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize("family,extra", [
    ("star", ["--n", "20"]), ("complete", ["--n", "300"]), ("curtain", ["--n", "31", "--ell", "3"]),
    ("rrt", ["--n", "50"]), ("gw", ["--n", "30", "--offspring", "geom-half"]),
])
def test_simulate_families(tmp_path, capsys, family, extra):
    code, text, _ = run(["simulate", "--family", family, *extra, "--k", "2", "--replicas", "50",
                         "--seed", "1", "--out", str(tmp_path / family), "--workers", "1"], capsys)
    assert code == 0
    assert json.loads((tmp_path / family / "summary.json").read_text())["family"] == family


def test_simulate_direct_engine(tmp_path, capsys):
    code, _, _ = run(["simulate", "--family", "star", "--n", "5", "--k", "1", "--replicas", "4000", "--seed", "2",
                      "--engine", "direct", "--out", str(tmp_path / "d"), "--workers", "1"], capsys)
    assert code == 0
    assert abs(json.loads((tmp_path / "d" / "summary.json").read_text())["mean"] - 3.0) < 0.1


@pytest.mark.parametrize("argv", [
    ["simulate", "--family", "path", "--n", "0", "--k", "2", "--replicas", "5", "--seed", "1"],
    ["simulate", "--family", "path", "--n", "5", "--k", "2", "--replicas", "5"],
    ["simulate", "--family", "tree", "--n", "5", "--k", "2", "--replicas", "5", "--seed", "1"],
    ["simulate", "--family", "path", "--n", "5", "--k", "2", "--replicas", "5", "--seed", "1", "--bogus"],
])
def test_invalid_flags_leave_no_files(tmp_path, argv):
    out = tmp_path / "never"
    with pytest.raises(SystemExit) as e:
        main(argv + ["--out", str(out)])
    assert e.value.code == 2
    assert not out.exists()


@pytest.mark.parametrize("argv", [
    ["simulate", "--family", "binary", "--k", "2", "--replicas", "5", "--seed", "1"],
    ["simulate", "--family", "curtain", "--n", "4", "--ell", "4", "--k", "2", "--replicas", "5", "--seed", "1"],
    ["simulate", "--family", "gw", "--n", "9000", "--k", "2", "--replicas", "5", "--seed", "1"],
    ["simulate", "--family", "path", "--n", "5", "--k", "2", "--replicas", "1", "--seed", "1"],
])
def test_invalid_parameters_leave_no_files(tmp_path, capsys, argv):
    out = tmp_path / "never"
    code, _, err = run(argv + ["--out", str(out)], capsys)
    assert code == 2 and "error" in err
    assert not out.exists()


def test_constants(capsys):
    code, text, _ = run(["constants", "--k", "2"], capsys)
    assert code == 0
    rows = dict(line.split("\t") for line in text.strip().splitlines()[1:])
    assert float(rows["eta[2,1]"]) == pytest.approx(2.5066283, abs=1e-7)
    assert float(rows["lambda[2]"]) == pytest.approx(2.4674011, abs=1e-7)
    assert float(rows["var[2]"]) == pytest.approx(0.6516169, abs=1e-7)
    code, text, _ = run(["constants", "--k", "3"], capsys)
    assert "lambda[3]\t2.02746" in text
    code, _, err = run(["constants", "--k", "1"], capsys)
    assert code == 2 and "k >= 2" in err


def test_constants_deterministic(capsys):
    _, a, _ = run(["constants", "--k", "4", "--ell", "2"], capsys)
    _, b, _ = run(["constants", "--k", "4", "--ell", "2"], capsys)
    assert a == b


@pytest.mark.parametrize("argv,expect", [
    (["oracle", "--name", "dp", "--family", "path", "--n", "2", "--k", "1"], 1.5),
    (["oracle", "--name", "perm", "--n", "4"], 25 / 12),
    (["oracle", "--name", "path-mean", "--n", "3", "--k", "1"], 11 / 6),
    (["oracle", "--name", "xi2d", "--k", "2", "--a", "1", "--b", "3"], 0.6045997880780726),
    (["oracle", "--name", "hyper-cot", "--k", "4"], 1.5707963267948966),
])
def test_oracle(capsys, argv, expect):
    code, text, _ = run(argv, capsys)
    assert code == 0
    value = float(text.split("value=")[1].split()[0])
    assert value == pytest.approx(expect, rel=1e-8)


def test_oracle_exact_fraction(capsys):
    _, text, _ = run(["oracle", "--name", "dp", "--family", "star", "--n", "4", "--k", "1", "--exact"], capsys)
    assert "value=5/2" in text


def test_limit_sample(tmp_path, capsys):
    out = tmp_path / "bk"
    code, text, _ = run(["limit-sample", "--k", "5", "--samples", "2000", "--seed", "4", "--bins", "30",
                         "--out", str(out), "--workers", "1"], capsys)
    assert code == 0
    assert (out / "histogram.csv").read_text().splitlines()[0] == "bin_left,bin_right,count,normal_overlay"
    meta = json.loads((out / "moments.json").read_text())
    assert set(meta["moments"]) == {"1", "2", "3"}
    code, _, _ = run(["limit-sample", "--k", "2", "--samples", "0", "--seed", "4",
                      "--out", str(tmp_path / "none")], capsys)
    assert code == 2 and not (tmp_path / "none").exists()


def test_verify_specfun(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, text, _ = run(["verify", "--suite", "specfun", "--seed", "1", "--out", str(out), "--workers", "1"], capsys)
    assert code == 0 and "[PASS] criterion 1" in text
    assert json.loads(out.read_text())["passed"] is True


def test_verify_unknown_suite():
    with pytest.raises(SystemExit) as e:
        main(["verify", "--suite", "nope", "--seed", "1"])
    assert e.value.code == 2


def test_seed_required():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["verify", "--suite", "specfun"])


def test_dump_tree(tmp_path, capsys):
    code, text, _ = run(["dump-tree", "--family", "path", "--n", "3"], capsys)
    assert text == "0 -1 0\n1 0 1\n2 1 2\n"
    f = tmp_path / "t.txt"
    run(["dump-tree", "--family", "rrt", "--n", "30", "--seed", "5", "--out", str(f)], capsys)
    g = tmp_path / "u.txt"
    run(["dump-tree", "--family", "rrt", "--n", "30", "--seed", "5", "--out", str(g)], capsys)
    assert f.read_bytes() == g.read_bytes() and len(f.read_text().splitlines()) == 30
    code, _, _ = run(["dump-tree", "--family", "gw", "--n", "10"], capsys)
    assert code == 2
