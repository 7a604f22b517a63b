import json

import pytest

from gesturebot.cli import main
from gesturebot.command_map import Verb, load_mapping
from gesturebot.raster import decode_pbm, encode_pbm
from gesturebot.synth import SyntheticSpec, gen_dataset


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    lines = [json.loads(line) for line in out.splitlines() if line.startswith("{")]
    return code, lines, out


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("ds")
    code = main(["gen-dataset", "--seed", "3", "--variants", "4",
                 "-o", str(out)])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def model_dir(dataset_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("model")
    code = main(["train", str(dataset_dir / "templates"), "-o", str(out)])
    assert code == 0
    return out


def test_gen_dataset_layout(dataset_dir, capsys):
    templates = sorted((dataset_dir / "templates").glob("*.pbm"))
    probes = sorted((dataset_dir / "probes").glob("*.pbm"))
    assert len(templates) == 10
    assert len(probes) == 40
    assert (dataset_dir / "templates" / "model.json").exists()
    manifest = json.loads((dataset_dir / "dataset.json").read_text())
    assert manifest["seed"] == 3
    assert manifest["orientation"] == "bottom"
    img = decode_pbm(templates[0].read_bytes())
    assert img.bits.shape == (80, 60)


def test_gen_dataset_matches_library(dataset_dir):
    templates, _ = gen_dataset(SyntheticSpec(seed=3, variants_per_label=4))
    on_disk = decode_pbm((dataset_dir / "templates" / "0_0.pbm").read_bytes())
    assert on_disk == templates[0].image


def test_train_reports(model_dir, capsys):
    code, lines, _ = run_cli(capsys, "train", str(model_dir), "-o", str(model_dir))
    assert code == 0
    assert lines[0]["trained"] == 10
    assert lines[0]["k"] == 9
    assert lines[0]["tau"] > 0


def test_classify_known_template(model_dir, dataset_dir, capsys):
    code, lines, _ = run_cli(
        capsys, "classify", str(model_dir), str(dataset_dir / "templates" / "2_0.pbm"))
    assert code == 0
    assert lines[0]["label"] == 2
    assert lines[0]["distance"] == pytest.approx(0.0, abs=1e-6)
    assert lines[0]["name"]


def test_eval_accuracy(model_dir, dataset_dir, capsys):
    code, lines, _ = run_cli(
        capsys, "eval", str(model_dir), str(dataset_dir / "probes"))
    assert code == 0
    report = lines[0]
    assert report["n"] == 40
    assert report["accuracy"] >= 0.9


def test_eval_orientation_flag_overrides(model_dir, dataset_dir, capsys):
    code, lines, _ = run_cli(
        capsys, "eval", str(model_dir), str(dataset_dir / "probes"),
        "--orientation", "left")
    assert code == 0
    # wrong orientation mangles the probes; accuracy collapses
    assert lines[0]["accuracy"] < 0.5


def test_run_over_frame_dir(model_dir, dataset_dir, tmp_path, capsys):
    import numpy as np
    from gesturebot.raster import BinFrame, GrayFrame, encode_pgm
    from gesturebot.synth import PROBE_HEIGHT, PROBE_WIDTH

    probe = decode_pbm((dataset_dir / "probes" / "1_0000.pbm").read_bytes())
    checker = (np.indices((PROBE_HEIGHT, PROBE_WIDTH)).sum(axis=0) % 2).astype(np.uint8)
    frames_dir = tmp_path / "frames"
    frames_dir.mkdir()
    seq = 0
    for i in range(6):
        pattern = checker if i % 2 == 0 else 1 - checker
        gray = GrayFrame((pattern * 255).astype(np.uint8), seq=seq)
        (frames_dir / f"frame_{seq:06d}.pgm").write_bytes(encode_pgm(gray))
        seq += 1
    for _ in range(5):
        gray = GrayFrame((probe.bits * 255).astype(np.uint8), seq=seq)
        (frames_dir / f"frame_{seq:06d}.pgm").write_bytes(encode_pgm(gray))
        seq += 1
    log = tmp_path / "log.jsonl"
    code, lines, _ = run_cli(
        capsys, "run", str(model_dir), "--frames", str(frames_dir),
        "--orientation", "bottom", "--log", str(log))
    assert code == 0
    assert len(lines) == 1
    assert lines[0]["label"] == 1
    assert lines[0]["verb"] == "forward"
    assert log.read_text().splitlines()[0] == json.dumps(lines[0], sort_keys=True)


def test_show_mapping_round_trips(capsys):
    code = main(["show-mapping"])
    out = capsys.readouterr().out
    assert code == 0
    table = load_mapping(out)
    assert table.lookup(1).verb is Verb.FORWARD


def test_missing_model_dir_exits_1(tmp_path, capsys):
    code = main(["classify", str(tmp_path / "nope"), str(tmp_path / "img.pbm")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_no_subcommand_exits_2():
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2


def test_config_env_var(monkeypatch, tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"frame_period_ms": 125}))
    monkeypatch.setenv("GESTUREBOT_CONFIG", str(cfg_path))
    code = main(["show-mapping"])
    assert code == 0
    capsys.readouterr()


def test_classify_geometry_mismatch_exits_1(model_dir, tmp_path, capsys):
    import numpy as np
    from gesturebot.raster import BinFrame

    bad = tmp_path / "bad.pbm"
    bad.write_bytes(encode_pbm(BinFrame(np.ones((8, 8), dtype=np.uint8))))
    code = main(["classify", str(model_dir), str(bad)])
    assert code == 1
    assert "error" in capsys.readouterr().err
