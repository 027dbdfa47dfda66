"""CLI behaviour: pipelines, flags, exit codes, determinism."""

import json
import math

import numpy as np
import pytest

from infoplane.cli import main
from infoplane.dumps import read_dump

LN2 = math.log(2.0)


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """gen + conduct once; tests share the resulting dump directories."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    dump = root / "dump"
    assert main([
        "gen", "--out", str(data), "--seed", "7",
        "--classes", "3", "--per-class", "40",
        "--net-dims", "2,8,3", "--train", "--epochs", "50",
    ]) == 0
    assert main([
        "conduct", "--net", str(data / "net.json"),
        "--data", str(data), "--out", str(dump),
    ]) == 0
    return {"root": root, "data": data, "dump": dump}


def read_csv(path):
    lines = path.read_text().strip().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


class TestGen:
    def test_writes_dataset_and_network(self, pipeline):
        data = pipeline["data"]
        traces, records, labels, manifest = read_dump(data)
        assert [t.layer_index for t in traces] == [0]
        assert traces[0].activations.shape == (120, 2)
        assert records == []
        assert labels.class_count == 3
        assert (data / "net.json").exists()

    def test_rerun_is_byte_identical(self, pipeline, tmp_path):
        again = tmp_path / "again"
        assert main([
            "gen", "--out", str(again), "--seed", "7",
            "--classes", "3", "--per-class", "40",
            "--net-dims", "2,8,3", "--train", "--epochs", "50",
        ]) == 0
        for name in ("manifest.json", "labels.bin", "activation_000.bin", "net.json"):
            assert (again / name).read_bytes() == (pipeline["data"] / name).read_bytes()

    def test_markov_dump_shape(self, tmp_path):
        out = tmp_path / "markov"
        assert main(["gen", "--out", str(out), "--markov"]) == 0
        traces, records, labels, manifest = read_dump(out)
        assert [t.layer_index for t in traces] == [0, 1, 2]
        assert traces[0].activations.shape == (256, 1)
        # stage 2 is floor(x/2): values {0, 1}
        assert set(np.unique(traces[2].activations)) == {0.0, 1.0}
        assert labels.class_count == 2

    def test_markov_rejects_training_flags(self, tmp_path):
        assert main(["gen", "--out", str(tmp_path / "m"), "--markov", "--train"]) == 1

    def test_train_requires_dims(self, tmp_path):
        assert main(["gen", "--out", str(tmp_path / "t"), "--train"]) == 1


class TestConduct:
    def test_dump_has_both_kinds(self, pipeline):
        traces, records, labels, manifest = read_dump(pipeline["dump"])
        assert [t.layer_index for t in traces] == [0, 1, 2]
        assert [r.layer_index for r in records] == [1, 2]
        assert records[0].values.shape == (120, 8)

    def test_integrated_method_with_baseline_file(self, pipeline, tmp_path):
        base = tmp_path / "base.json"
        base.write_text("[0.0, 0.0]")
        out = tmp_path / "ig"
        assert main([
            "conduct", "--net", str(pipeline["data"] / "net.json"),
            "--data", str(pipeline["data"]), "--out", str(out),
            "--method", "integrated", "--ig-steps", "16", "--baseline", str(base),
        ]) == 0
        _, ig_records, _, _ = read_dump(out)
        _, grad_records, _, _ = read_dump(pipeline["dump"])
        # the dump format stores values only, so prove the integrated
        # route ran by its numbers: tanh is nonlinear, the path integral
        # and the local gradient disagree
        diff = np.abs(ig_records[0].values - grad_records[0].values).max()
        assert diff > 1e-3

    def test_dimension_mismatch_is_validation_error(self, pipeline, tmp_path):
        # markov data is 1-d; the blobs net expects 2 inputs
        markov = tmp_path / "markov"
        assert main(["gen", "--out", str(markov), "--markov"]) == 0
        assert main([
            "conduct", "--net", str(pipeline["data"] / "net.json"),
            "--data", str(markov), "--out", str(tmp_path / "x"),
        ]) == 1


class TestPlane:
    def test_csv_header_and_bases(self, pipeline, tmp_path):
        out = tmp_path / "plane.csv"
        assert main([
            "plane", "--data", str(pipeline["dump"]), "--out", str(out),
            "--basis", "both", "--bootstrap", "0",
        ]) == 0
        header, rows = read_csv(out)
        assert header == ["layer_index", "layer_name", "basis", "i_x", "i_y", "std_i_x", "std_i_y"]
        assert [r[2] for r in rows] == ["activation", "activation", "conductance", "conductance"]

    def test_bits_divide_nats_by_ln2(self, pipeline, tmp_path):
        nats = tmp_path / "n.csv"
        bits = tmp_path / "b.csv"
        for units, path in (("nats", nats), ("bits", bits)):
            assert main([
                "plane", "--data", str(pipeline["dump"]), "--out", str(path),
                "--units", units, "--bootstrap", "0",
            ]) == 0
        _, rn = read_csv(nats)
        _, rb = read_csv(bits)
        for a, b in zip(rn, rb):
            assert float(b[3]) == pytest.approx(float(a[3]) / LN2, abs=2e-6)
            assert float(b[4]) == pytest.approx(float(a[4]) / LN2, abs=2e-6)

    def test_estimator_flag(self, pipeline, tmp_path):
        out = tmp_path / "ksg.csv"
        assert main([
            "plane", "--data", str(pipeline["dump"]), "--out", str(out),
            "--estimator", "ksg", "--k", "3", "--bootstrap", "0",
        ]) == 0
        _, rows = read_csv(out)
        assert len(rows) == 2

    def test_dataset_without_layers_is_rejected(self, pipeline, tmp_path):
        assert main([
            "plane", "--data", str(pipeline["data"]), "--out", str(tmp_path / "p.csv"),
        ]) == 1

    def test_label_k_reaches_the_posterior(self, pipeline, tmp_path):
        # small dumps need a smaller neighbour count than the default 10
        out = tmp_path / "k3.csv"
        assert main([
            "plane", "--data", str(pipeline["dump"]), "--out", str(out),
            "--label-k", "3", "--bootstrap", "0",
        ]) == 0
        assert main([
            "plane", "--data", str(pipeline["dump"]), "--out", str(tmp_path / "big.csv"),
            "--label-k", "500", "--bootstrap", "0",
        ]) == 1


class TestITE:
    def test_header_and_weights(self, pipeline, tmp_path):
        out = tmp_path / "ite.csv"
        assert main(["ite", "--data", str(pipeline["dump"]), "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["layer_index", "entropy", "compression", "preservation", "usefulness", "efficiency"]
        assert len(rows) == 2

        # pure-compression weights make efficiency equal the compression column
        skew = tmp_path / "skew.csv"
        assert main([
            "ite", "--data", str(pipeline["dump"]), "--out", str(skew),
            "--alpha", "1", "--beta", "0", "--gamma", "0",
        ]) == 0
        _, srows = read_csv(skew)
        for base, s in zip(rows, srows):
            assert s[2] == base[2]
            assert float(s[5]) == pytest.approx(float(s[2]), abs=1e-6)


class TestDPI:
    def test_stdout_json(self, pipeline, capsys):
        assert main(["dpi", "--data", str(pipeline["dump"])]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["tolerance"] == 0.02
        bases = {(r["basis"], r["axis"]) for r in payload["reports"]}
        assert bases == {
            ("activation", "x-side"), ("activation", "y-side"),
            ("conductance", "x-side"), ("conductance", "y-side"),
        }
        for report in payload["reports"]:
            assert report["chain"][0]["layer"] == 0

    def test_markov_chain_is_clean(self, tmp_path, capsys):
        out = tmp_path / "markov"
        assert main(["gen", "--out", str(out), "--markov"]) == 0
        assert main(["dpi", "--data", str(out)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert all(r["violations"] == [] for r in payload["reports"])

    def test_out_file(self, pipeline, tmp_path):
        path = tmp_path / "dpi.json"
        assert main(["dpi", "--data", str(pipeline["dump"]), "--out", str(path)]) == 0
        assert json.loads(path.read_text())["tolerance"] == 0.02


class TestAnalyze:
    def test_writes_three_outputs(self, pipeline, tmp_path):
        out = tmp_path / "report"
        assert main([
            "analyze", "--data", str(pipeline["dump"]),
            "--out-dir", str(out), "--bootstrap", "4",
        ]) == 0
        assert (out / "plane.csv").exists()
        assert (out / "ite.csv").exists()
        assert (out / "dpi.json").exists()

    def test_rerun_is_byte_identical(self, pipeline, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out in (a, b):
            assert main([
                "analyze", "--data", str(pipeline["dump"]),
                "--out-dir", str(out), "--bootstrap", "4",
            ]) == 0
        for name in ("plane.csv", "ite.csv", "dpi.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestExitCodes:
    def test_unknown_flag(self, capsys):
        assert main(["--bogus"]) == 1

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_dump_is_io_error(self, tmp_path):
        assert main(["plane", "--data", str(tmp_path / "nope"), "--out", str(tmp_path / "p.csv")]) == 2

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert main(["plane", "--help"]) == 0
