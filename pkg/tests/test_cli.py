import json

import numpy as np
import pytest

from crpnn.cli import main, parse_cli
from crpnn.network import CrpnnModel, NetworkSpec, save_model
from crpnn.spectrum import import_spectrum


def test_parse_gen():
    args = parse_cli(
        ["gen", "--n", "5", "--degree", "14", "--items", "2772", "--seed", "1", "--out", "t.csv"]
    )
    assert args.command == "gen"
    assert (args.n, args.degree, args.items, args.seed) == (5, 14, 2772, 1)


def test_parse_train():
    args = parse_cli(
        [
            "train", "--variant", "crpnn2", "--order", "14", "--data", "d.csv",
            "--epochs", "1000", "--lr", "0.01", "--seed", "7",
            "--model-out", "m.json", "--metrics-out", "metrics.csv",
        ]
    )
    assert args.command == "train"
    assert args.variant == "crpnn2" and args.order == 14 and args.lr == 0.01


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as err:
        parse_cli(["gen", "--n", "2", "--degree", "3", "--items", "4", "--out", "t", "--bogus"])
    assert err.value.code == 2


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as err:
        parse_cli(["frobnicate"])
    assert err.value.code == 2


def test_gen_train_eval_pipeline(tmp_path, capsys):
    target = tmp_path / "target.csv"
    data = tmp_path / "data.csv"
    model = tmp_path / "model.json"
    metrics = tmp_path / "metrics.csv"
    preds = tmp_path / "preds.csv"

    rc = main(
        ["gen", "--n", "2", "--degree", "3", "--items", "6", "--seed", "3",
         "--out", str(target), "--data-out", str(data), "--samples", "80"]
    )
    assert rc == 0
    assert target.exists() and data.exists()

    rc = main(
        ["train", "--variant", "crpnn1", "--order", "3", "--data", str(data),
         "--epochs", "60", "--lr", "0.05", "--seed", "5",
         "--model-out", str(model), "--metrics-out", str(metrics)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "final_mse=" in out
    assert len(metrics.read_text().strip().split("\n")) == 61

    rc = main(["eval", "--model", str(model), "--data", str(data), "--out", str(preds)])
    assert rc == 0
    out = capsys.readouterr().out
    mse = float(out.split("final_mse=")[1].strip())
    assert np.isfinite(mse)
    lines = preds.read_text().strip().split("\n")
    assert lines[0] == "t_index,actual,predicted"
    assert len(lines) == 81


def test_train_topology_error_exits_1(tmp_path, capsys):
    data = tmp_path / "data.csv"
    main(["gen", "--n", "2", "--degree", "3", "--items", "4", "--seed", "1",
          "--out", str(tmp_path / "t.csv"), "--data-out", str(data), "--samples", "30"])
    rc = main(
        ["train", "--variant", "crpnn2", "--order", "3", "--data", str(data),
         "--model-out", str(tmp_path / "m.json")]
    )
    assert rc == 1
    err = capsys.readouterr().err
    assert "n+2" in err


def test_missing_file_exits_1(tmp_path, capsys):
    rc = main(["eval", "--model", str(tmp_path / "nope.json"), "--data", str(tmp_path / "d.csv")])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_spectrum_of_saved_toy_model(tmp_path):
    spec = NetworkSpec.crpnn2(1, 1, 5)
    toy = CrpnnModel(spec, [np.eye(2), np.eye(2), np.array([[1.0, 1.0]])])
    model_path = tmp_path / "toy.json"
    model_path.write_bytes(save_model(toy))
    out = tmp_path / "spectrum.csv"
    rc = main(["spectrum", "--model", str(model_path), "--out", str(out)])
    assert rc == 0
    parsed = import_spectrum(out.read_bytes())
    assert parsed.terms == ({(0,): 1.0, (5,): 1.0},)


def test_pipeline_outputs_are_deterministic(tmp_path):
    blobs = []
    for tag in ("a", "b"):
        target = tmp_path / f"t_{tag}.csv"
        data = tmp_path / f"d_{tag}.csv"
        model = tmp_path / f"m_{tag}.json"
        spectrum = tmp_path / f"s_{tag}.csv"
        main(["gen", "--n", "2", "--degree", "4", "--items", "8", "--seed", "11",
              "--out", str(target), "--data-out", str(data), "--samples", "50"])
        main(["train", "--variant", "crpnn1", "--order", "4", "--data", str(data),
              "--epochs", "40", "--lr", "0.03", "--seed", "2", "--model-out", str(model)])
        main(["spectrum", "--model", str(model), "--out", str(spectrum)])
        blobs.append(
            (target.read_bytes(), data.read_bytes(), model.read_bytes(), spectrum.read_bytes())
        )
    assert blobs[0] == blobs[1]


def test_bench_cli_writes_report(tmp_path):
    out = tmp_path / "report.json"
    rc = main(
        ["bench", "--n", "2", "--m", "1", "--order", "4", "--samples", "30",
         "--forward-reps", "2", "--epochs", "1", "--runs", "1", "--out", str(out)]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["protocol"]["order"] == 4
    assert len(doc["results"]) == 2


def test_compare_emits_expected_row_count(tmp_path):
    data = tmp_path / "d.csv"
    main(["gen", "--n", "2", "--degree", "4", "--items", "6", "--seed", "2",
          "--out", str(tmp_path / "t.csv"), "--data-out", str(data), "--samples", "40"])
    out = tmp_path / "table.csv"
    rc = main(
        ["compare", "--variant", "crpnn1", "--orders", "2-4", "6",
         "--seeds", "2", "--data", str(data), "--epochs", "5", "--out", str(out)]
    )
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "variant,order,seed,final_mse,seconds"
    assert len(lines) == 1 + 4 * 2  # orders {2,3,4,6} x 2 seeds


def test_compare_rows_deterministic_apart_from_seconds(tmp_path):
    data = tmp_path / "d.csv"
    main(["gen", "--n", "2", "--degree", "3", "--items", "5", "--seed", "8",
          "--out", str(tmp_path / "t.csv"), "--data-out", str(data), "--samples", "30"])
    tables = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.csv"
        main(["compare", "--variant", "crpnn1", "--orders", "2", "3",
              "--seeds", "2", "--data", str(data), "--epochs", "4", "--out", str(out)])
        rows = [line.rsplit(",", 1)[0] for line in out.read_text().strip().split("\n")]
        tables.append(rows)
    assert tables[0] == tables[1]


def test_eval_multi_output_schema(tmp_path, capsys):
    data = tmp_path / "d.csv"
    data.write_text(
        "x1,y1,y2\n" + "\n".join(f"{v},{2 * v},{v * v}" for v in (0.1, -0.4, 0.7, 0.9))
    )
    model = tmp_path / "m.json"
    assert main(["train", "--variant", "crpnn1", "--order", "2", "--data", str(data),
                 "--epochs", "3", "--model-out", str(model)]) == 0
    preds = tmp_path / "p.csv"
    assert main(["eval", "--model", str(model), "--data", str(data), "--out", str(preds)]) == 0
    lines = preds.read_text().strip().split("\n")
    assert lines[0] == "t_index,actual_1,actual_2,predicted_1,predicted_2"
    assert len(lines) == 5


def test_help_exits_zero(capsys):
    for argv in (["--help"], ["train", "--help"], ["bench", "--help"]):
        with pytest.raises(SystemExit) as err:
            parse_cli(argv)
        assert err.value.code == 0
    out = capsys.readouterr().out
    assert "--seed" in out and "default" in out


def test_env_seed_default(tmp_path, monkeypatch):
    outputs = []
    for seed_env in ("21", "21", "22"):
        monkeypatch.setenv("CRPNN_SEED", seed_env)
        target = tmp_path / f"target_{len(outputs)}.csv"
        main(["gen", "--n", "2", "--degree", "3", "--items", "5", "--out", str(target)])
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0] != outputs[2]


def test_explicit_seed_beats_env(tmp_path, monkeypatch):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    monkeypatch.setenv("CRPNN_SEED", "99")
    main(["gen", "--n", "2", "--degree", "3", "--items", "5", "--seed", "4", "--out", str(a)])
    monkeypatch.delenv("CRPNN_SEED")
    main(["gen", "--n", "2", "--degree", "3", "--items", "5", "--seed", "4", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
