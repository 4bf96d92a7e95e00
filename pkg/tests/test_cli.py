import json

import numpy as np
import pytest

from timestretch.cli import main
from timestretch.signal.io import Signal, read_wav, write_wav


@pytest.fixture
def melody_wav(tmp_path):
    path = tmp_path / "melody.wav"
    assert main(["synth", "--seed", "3", "--out", str(path)]) == 0
    return path


def test_stretch_nspv(melody_wav, tmp_path):
    output = tmp_path / "out.wav"
    plan = tmp_path / "plan.json"
    code = main(
        [
            "stretch",
            "--in",
            str(melody_wav),
            "--out",
            str(output),
            "--rate",
            "1.5",
            "--algo",
            "nspv",
            "--dump-plan",
            str(plan),
        ]
    )
    assert code == 0
    assert len(read_wav(output)) == round(1.5 * len(read_wav(melody_wav)))
    assert json.loads(plan.read_text())["rate"] == 1.5


def test_stretch_pv_with_overrides(melody_wav, tmp_path):
    output = tmp_path / "out.wav"
    argv = ["stretch", "--in", str(melody_wav), "--out", str(output)]
    argv += ["--rate", "0.75", "--algo", "pv"]
    argv += ["--pv-hop", "128", "--pv-channels", "512"]
    assert main(argv) == 0
    assert len(read_wav(output)) == round(0.75 * len(read_wav(melody_wav)))


def test_rate_out_of_range_is_a_usage_error(melody_wav, tmp_path, capsys):
    argv = ["stretch", "--in", str(melody_wav), "--out", str(tmp_path / "x.wav")]
    assert main([*argv, "--rate", "9"]) == 1
    assert "usage" in capsys.readouterr().err


def test_missing_command_is_a_usage_error():
    assert main([]) == 1


def test_missing_input_fails(tmp_path, capsys):
    argv = ["stretch", "--in", str(tmp_path / "nope.wav"), "--out", "x.wav"]
    assert main([*argv, "--rate", "2"]) == 2
    assert "IoError:" in capsys.readouterr().err


def test_invalid_override_is_a_usage_error(melody_wav, tmp_path, capsys):
    argv = ["stretch", "--in", str(melody_wav), "--out", str(tmp_path / "x.wav")]
    argv += ["--rate", "2", "--algo", "pv", "--pv-hop", "4096"]
    assert main(argv) == 1
    assert "InvalidConfig:" in capsys.readouterr().err


def test_onsets_to_stdout(tmp_path, capsys):
    samples = np.zeros(16000)
    samples[[4000, 12000]] = 1.0
    path = tmp_path / "clicks.wav"
    write_wav(path, Signal(samples, 16000))
    assert main(["onsets", "--in", str(path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "onset_sample,onset_seconds,sf_value"
    assert len(lines) == 3


def test_spectrogram(melody_wav, tmp_path):
    output = tmp_path / "spec.csv"
    argv = ["spectrogram", "--in", str(melody_wav), "--out", str(output)]
    assert main([*argv, "--hop", "256", "--channels", "1024", "--window", "1024"]) == 0
    assert output.read_text().startswith("# hop=256,channels=1024")


def test_synth_with_perfect_stretch(tmp_path):
    melody = tmp_path / "melody.wav"
    perfect = tmp_path / "perfect.wav"
    argv = ["synth", "--seed", "1", "--out", str(melody), "--rate", "2"]
    assert main([*argv, "--perfect-out", str(perfect)]) == 0
    assert len(read_wav(perfect)) == 2 * len(read_wav(melody))


def test_synth_needs_a_rate_for_the_perfect_stretch(tmp_path):
    argv = ["synth", "--seed", "1", "--out", str(tmp_path / "m.wav")]
    assert main([*argv, "--perfect-out", str(tmp_path / "p.wav")]) == 1


def test_evaluate_writes_a_report(tmp_path):
    report = tmp_path / "report.json"
    argv = ["evaluate", "--count", "1", "--rates", "1", "--no-progress"]
    assert main([*argv, "--out", str(report)]) == 0
    loaded = json.loads(report.read_text())
    assert loaded["per_signal"][0]["r"] == 1.0


def test_verbose_flag_is_accepted(melody_wav, tmp_path):
    output = tmp_path / "spec.csv"
    argv = ["spectrogram", "--in", str(melody_wav), "--out", str(output)]
    assert main(["-vv", *argv]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["synth", "--seed", "-1", "--out", "m.wav"],
        ["evaluate", "--count", "0"],
        ["evaluate", "--seed", "-3"],
        ["evaluate", "--count", "many"],
    ],
)
def test_bad_integer_flags_are_usage_errors(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 1
    assert "usage" in capsys.readouterr().err
    assert not (tmp_path / "m.wav").exists()


def test_unexpected_value_error_exits_with_processing_code(
    tmp_path, monkeypatch, capsys
):
    def broken(spec):
        raise ValueError("no melody")

    monkeypatch.setattr("timestretch.cli.synth_melody", broken)
    assert main(["synth", "--seed", "1", "--out", str(tmp_path / "m.wav")]) == 2
    assert "ValueError: no melody" in capsys.readouterr().err
