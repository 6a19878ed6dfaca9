import json

import pytest

from autq.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from autq.specfile import SpecError, parse_spec

TWO = """\
letters 2
samples 8
seed 3
translation t 1
pl double
  seg -inf inf 2 0
end
"""

IDENT = """\
letters 2
samples 6
identity e
"""


def _write(tmp_path, text, name="seq.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    spec = _write(d, TWO)
    assert main(["build", spec, "--out", str(d / "a")]) == EXIT_OK
    return d


def _files(path):
    return {f.name: f.read_bytes() for f in sorted(path.iterdir()) if f.name != "timings.json"}


def test_build_writes_artifacts(built):
    names = set(_files(built / "a"))
    assert {"spec.txt", "words.txt", "generators.txt", "manifest.json", "report.json"} <= names
    rep = json.loads((built / "a" / "report.json").read_text())
    assert rep["verdict"] is True


def test_build_is_deterministic(built):
    assert main(["build", str(built / "seq.txt"), "--out", str(built / "b")]) == EXIT_OK
    assert _files(built / "a") == _files(built / "b")


def test_verify_twice_same_report(built, capsys):
    capsys.readouterr()
    assert main(["verify", str(built / "a"), "--format", "json"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["verify", str(built / "a"), "--format", "json"]) == EXIT_OK
    assert capsys.readouterr().out == first


def test_verify_more_samples(built):
    assert main(["verify", str(built / "a"), "--samples", "20", "--seed", "9", "--literal", "0"]) == EXIT_OK


def test_corrupted_generator_names_witness(built, tmp_path, capsys):
    import shutil
    bad = tmp_path / "bad"
    shutil.copytree(built / "a", bad)
    lines = (bad / "generators.txt").read_text().splitlines()
    i = next(k for k, ln in enumerate(lines) if ln.startswith("value H "))
    _, letter, x, y = lines[i].split()
    lines[i] = f"value {letter} {x} {y}1"
    (bad / "generators.txt").write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    assert main(["verify", str(bad)]) == EXIT_FAIL
    err = capsys.readouterr().err
    assert "generator H table" in err and f" at {x}:" in err


def test_eval_translation_first(built, capsys):
    capsys.readouterr()
    assert main(["eval", str(built / "a"), "--word", "F", "--point", "0"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "2/1"     # sigma(1) = 2 for the unit translation


def test_eval_identity_first(tmp_path, capsys):
    spec = _write(tmp_path, IDENT)
    assert main(["build", spec, "--out", str(tmp_path / "a")]) == EXIT_OK
    capsys.readouterr()
    assert main(["eval", str(tmp_path / "a"), "-w", "F", "-x", "0"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1/1"


def test_eval_product_is_composition(built, capsys):
    def ev(word, x):
        capsys.readouterr()
        assert main(["eval", str(built / "a"), "-w", word, "-x", x]) == EXIT_OK
        return capsys.readouterr().out.strip()
    y = ev("F", "1/3")
    assert ev("F H", "1/3") == ev("H", y)


def test_eval_empty_word(built, capsys):
    assert main(["eval", str(built / "a"), "-w", "", "-x", "0"]) == EXIT_INPUT
    assert "empty word" in capsys.readouterr().err


def test_bad_rational_is_input_error(tmp_path):
    spec = _write(tmp_path, "translation t 1/0\n")
    assert main(["build", spec, "--out", str(tmp_path / "o")]) == EXIT_INPUT


def test_missing_artifacts(tmp_path):
    assert main(["verify", str(tmp_path)]) == EXIT_INPUT


def test_unknown_flag():
    assert main(["build", "--nope"]) == EXIT_INPUT


def test_eight_letter_build(tmp_path):
    spec = _write(tmp_path, "letters 8\nsamples 6\ntranslation t 1\n")
    assert main(["build", spec, "--out", str(tmp_path / "o")]) == EXIT_OK
    words = (tmp_path / "o" / "words.txt").read_text()
    assert "[a^(b^-1), a^(b^2 c)]^(f^2)" in words


# -- sequence files ----------------------------------------------------------


def test_spec_parses_options_and_targets():
    spec = parse_spec(TWO)
    assert spec.names == ["t", "double"]
    assert spec.options["samples"] == 8 and spec.n_max == 2


@pytest.mark.parametrize("text, where", [
    ("translation t 1\ntranslation t 2\n", "line 2"),
    ("bogus x\n", "line 1"),
    ("pl g\n  seg -inf inf 1 0\n", "missing 'end'"),
    ("letters 3\nidentity e\n", "letters must be 2 or 8"),
    ("n-max 3\nidentity e\n", "exceeds"),
    ("", "no targets"),
])
def test_spec_errors(text, where):
    with pytest.raises(SpecError, match=where):
        parse_spec(text)
