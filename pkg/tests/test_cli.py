"""Exit codes, artifact layout, and stream discipline of the CLI."""

import json
from pathlib import Path

import pytest

from ont2cm import cli, cot
from ont2cm.damlxml import import_daml
from ont2cm.model import ModelDefect

FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv):
    return cli.main(list(argv))


class TestTransform:
    def test_writes_all_four_artifacts(self, tmp_path):
        code = run("transform", str(FIXTURES / "protein-dna.cot"),
                   "--out", str(tmp_path))
        assert code == 0
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == ["protein-dna.dot", "protein-dna.model.json",
                         "protein-dna.puml", "protein-dna.report.md"]

    def test_emit_subset(self, tmp_path):
        code = run("transform", str(FIXTURES / "rule1.cot"),
                   "--out", str(tmp_path), "--emit", "json,dot")
        assert code == 0
        assert sorted(p.name for p in tmp_path.iterdir()) \
            == ["rule1.dot", "rule1.model.json"]

    def test_stdout_single_emit(self, capsys):
        code = run("transform", str(FIXTURES / "rule1.cot"),
                   "--out", "-", "--emit", "json")
        assert code == 0
        captured = capsys.readouterr()
        assert json.loads(captured.out)["name"] == "rule1"
        assert "entity type(s)" in captured.err

    def test_stdout_with_two_emits_is_usage_error(self, capsys):
        code = run("transform", str(FIXTURES / "rule1.cot"),
                   "--out", "-", "--emit", "json,dot")
        assert code == 1
        assert "exactly one" in capsys.readouterr().err

    def test_unknown_emit_format(self, capsys):
        code = run("transform", str(FIXTURES / "rule1.cot"), "--emit", "svg")
        assert code == 1
        assert "unknown emit format" in capsys.readouterr().err

    def test_validation_defects_exit_2(self, tmp_path, capsys):
        code = run("transform", str(FIXTURES / "dangling.cot"),
                   "--out", str(tmp_path))
        assert code == 2
        assert "danglingClass" in capsys.readouterr().err
        assert list(tmp_path.iterdir()) == []

    def test_missing_file_exit_1(self, capsys):
        assert run("transform", "nosuch.cot") == 1
        assert "cannot read" in capsys.readouterr().err

    def test_syntax_error_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.cot"
        bad.write_text("ontology x\nclass\n")
        assert run("transform", str(bad)) == 1
        assert "line 2" in capsys.readouterr().err

    def test_model_defect_exit_3(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setattr(cli, "check_model", lambda model: [
            ModelDefect("duplicateId", "et:X", "forced for the test")])
        code = run("transform", str(FIXTURES / "rule1.cot"),
                   "--out", str(tmp_path))
        assert code == 3
        assert "internal defect" in capsys.readouterr().err

    def test_daml_input_autodetected(self, tmp_path):
        code = run("transform", str(FIXTURES / "protein.daml"),
                   "--out", str(tmp_path))
        assert code == 0
        assert (tmp_path / "protein.model.json").exists()

    def test_format_override(self, tmp_path):
        renamed = tmp_path / "onto.txt"
        renamed.write_text((FIXTURES / "protein.daml").read_text())
        code = run("transform", str(renamed), "--format", "damlxml",
                   "--out", str(tmp_path / "out"))
        assert code == 0
        assert (tmp_path / "out" / "onto.model.json").exists()

    def test_composition_heuristics_off(self, capsys):
        run("transform", str(FIXTURES / "rule6.cot"), "--out", "-",
            "--emit", "json", "--composition-heuristics", "off")
        data = json.loads(capsys.readouterr().out)
        assert data["relationships"][0]["kind"] == "association"

    def test_no_instances(self, capsys):
        run("transform", str(FIXTURES / "rule1.cot"), "--out", "-",
            "--emit", "json", "--no-instances")
        assert json.loads(capsys.readouterr().out)["instances"] == []

    def test_two_runs_byte_identical(self, tmp_path):
        for d in ("a", "b"):
            assert run("transform", str(FIXTURES / "tambis-mini.cot"),
                       "--out", str(tmp_path / d)) == 0
        for name in ("tambis-mini.model.json", "tambis-mini.puml",
                     "tambis-mini.dot", "tambis-mini.report.md"):
            assert (tmp_path / "a" / name).read_bytes() \
                == (tmp_path / "b" / name).read_bytes()


class TestClassify:
    def test_writes_bww_json(self, tmp_path):
        code = run("classify", str(FIXTURES / "rule4.cot"),
                   "--out", str(tmp_path))
        assert code == 0
        data = json.loads((tmp_path / "rule4.bww.json").read_text())
        assert data["concepts"]["Enzyme"]["category"] == "bwwClass"

    def test_stdout(self, capsys):
        assert run("classify", str(FIXTURES / "rule1.cot"), "--out", "-") == 0
        data = json.loads(capsys.readouterr().out)
        assert set(data) == {"concepts", "properties", "notes"}

    def test_defects_exit_2(self):
        assert run("classify", str(FIXTURES / "dangling.cot")) == 2


class TestCheck:
    def test_clean_ontology(self, capsys):
        assert run("check", str(FIXTURES / "tambis-mini.cot")) == 0
        assert "no defects" in capsys.readouterr().err

    def test_defective_ontology(self, capsys):
        assert run("check", str(FIXTURES / "dangling.cot")) == 2
        assert "danglingClass" in capsys.readouterr().err


class TestImport:
    def test_stdout_round_trips(self, capsys):
        assert run("import", str(FIXTURES / "protein.daml"), "--out", "-") == 0
        captured = capsys.readouterr()
        direct = import_daml((FIXTURES / "protein.daml").read_text(),
                             source_name="protein")
        assert cot.parse(captured.out) == direct.ontology
        assert "18 element(s) translated" in captured.err

    def test_writes_cot_file(self, tmp_path):
        assert run("import", str(FIXTURES / "excess.daml"),
                   "--out", str(tmp_path)) == 0
        text = (tmp_path / "excess.cot").read_text()
        assert text.startswith("ontology excess\n")

    def test_malformed_xml_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.daml"
        bad.write_text("<rdf:RDF")
        assert run("import", str(bad)) == 1
        assert "malformed XML" in capsys.readouterr().err


class TestInvocation:
    def test_no_command(self, capsys):
        assert run() == 1
        assert "error" in capsys.readouterr().err

    def test_help_exits_zero(self, capsys):
        assert run("--help") == 0
        assert "transform" in capsys.readouterr().out

    def test_version(self, capsys):
        assert run("--version") == 0
        assert capsys.readouterr().out.startswith("ont2cm ")
