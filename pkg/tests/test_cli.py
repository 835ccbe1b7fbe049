"""The compiler driver and the interpreter front end."""

import io
import subprocess
import sys

import pytest

from pl0plus.cli import (PHASES, CompileConfig, compiler_main,
                         interpreter_main, parse_compiler_args,
                         parse_interpreter_args, run_pipeline)
from pl0plus.xmldoc import parse_document

ECHO = "var x;\nbegin\n    read x;\n    write x;\nend.\n"

MISSING_SEMI = "var x;\nbegin\n    x := 1\n    write x;\nend.\n"

UNDECLARED = "begin y := 1 end.\n"


def config_for(path, *flags):
    return parse_compiler_args([*flags, str(path)])


class TestCompilerArgs:
    def test_defaults_run_every_phase(self):
        config = parse_compiler_args(["programa.pl0+"])
        assert config.phases == PHASES
        assert config.input_path == "programa.pl0+"
        assert not config.show_result
        assert not config.xml_errors

    def test_flags(self):
        config = parse_compiler_args(["-m", "-x", "programa.pl0+"])
        assert config.show_result
        assert config.xml_errors

    def test_single_phase(self):
        config = parse_compiler_args(["--lex", "programa.pl0+"])
        assert [p.short_name for p in config.phases] == ["lex"]

    def test_consecutive_phases(self):
        config = parse_compiler_args(["--sin", "--sem", "arbol.pl0+lex"])
        assert [p.short_name for p in config.phases] == ["sin", "sem"]

    def test_phase_order_comes_from_the_registry(self):
        config = parse_compiler_args(["--sem", "--sin", "arbol.pl0+lex"])
        assert [p.short_name for p in config.phases] == ["sin", "sem"]

    def test_non_consecutive_phases_rejected(self, capsys):
        with pytest.raises(SystemExit) as info:
            parse_compiler_args(["--lex", "--sem", "programa.pl0+"])
        assert info.value.code == 2
        assert "consecutivas" in capsys.readouterr().err

    def test_unknown_extension_rejected(self, capsys):
        with pytest.raises(SystemExit) as info:
            parse_compiler_args(["programa.txt"])
        assert info.value.code == 2
        assert "extensión no reconocida" in capsys.readouterr().err

    def test_extension_must_match_first_phase(self, capsys):
        with pytest.raises(SystemExit) as info:
            parse_compiler_args(["--sem", "programa.pl0+"])
        assert info.value.code == 2
        assert ".pl0+sin" in capsys.readouterr().err

    def test_longer_extensions_win(self):
        config = parse_compiler_args(["--sin", "lista.pl0+lex"])
        assert [p.short_name for p in config.phases] == ["sin"]

    def test_help_exits_cleanly(self, capsys):
        with pytest.raises(SystemExit) as info:
            parse_compiler_args(["-a"])
        assert info.value.code == 0
        assert "compilador" in capsys.readouterr().out

    def test_input_file_is_required(self, capsys):
        with pytest.raises(SystemExit) as info:
            parse_compiler_args([])
        assert info.value.code == 2


class TestPipeline:
    def test_full_compilation(self, tmp_path, capsys):
        source = tmp_path / "eco.pl0+"
        source.write_text(ECHO, encoding="utf-8")
        assert run_pipeline(config_for(source)) == 0
        captured = capsys.readouterr()
        assert captured.out == ""
        assert captured.err == ""
        produced = tmp_path / "eco.p+"
        doc = parse_document(produced.read_text(encoding="utf-8"))
        assert doc.root.name == "codigo_pmas"
        assert doc.root.find("fuente").cdata() == ECHO

    def test_show_result_prints_the_document(self, tmp_path, capsys):
        source = tmp_path / "eco.pl0+"
        source.write_text(ECHO, encoding="utf-8")
        assert run_pipeline(config_for(source, "-m")) == 0
        rendered = capsys.readouterr().out
        assert rendered == (tmp_path / "eco.p+").read_text(encoding="utf-8")

    def test_single_phase_writes_lexemes(self, tmp_path):
        source = tmp_path / "eco.pl0+"
        source.write_text(ECHO, encoding="utf-8")
        assert run_pipeline(config_for(source, "--lex")) == 0
        doc = parse_document(
            (tmp_path / "eco.pl0+lex").read_text(encoding="utf-8"))
        assert doc.root.name == "lexemas"

    def test_staged_compilation_matches_direct(self, tmp_path):
        direct = tmp_path / "directo.pl0+"
        direct.write_text(ECHO, encoding="utf-8")
        assert run_pipeline(config_for(direct)) == 0
        staged = tmp_path / "etapas.pl0+"
        staged.write_text(ECHO, encoding="utf-8")
        assert run_pipeline(config_for(staged, "--lex", "--sin")) == 0
        assert run_pipeline(
            config_for(tmp_path / "etapas.pl0+sin", "--sem", "--gen")) == 0
        assert (tmp_path / "etapas.p+").read_text(encoding="utf-8") == \
            (tmp_path / "directo.p+").read_text(encoding="utf-8")

    def test_warnings_still_produce_output(self, tmp_path, capsys):
        source = tmp_path / "aviso.pl0+"
        source.write_text(MISSING_SEMI, encoding="utf-8")
        assert run_pipeline(config_for(source, "-x")) == 0
        assert (tmp_path / "aviso.p+").exists()
        captured = capsys.readouterr()
        assert "ADVERTENCIA" in captured.out
        assert "Falta un ';'" in captured.out
        assert "advertencias" in captured.err

    def test_errors_suppress_output(self, tmp_path, capsys):
        source = tmp_path / "malo.pl0+"
        source.write_text(UNDECLARED, encoding="utf-8")
        assert run_pipeline(config_for(source)) == 1
        assert not (tmp_path / "malo.p+").exists()
        captured = capsys.readouterr()
        assert "ERROR" in captured.out
        assert "Referencia a variable no declarada" in captured.out
        assert captured.err == ""

    def test_xml_report_goes_to_stderr(self, tmp_path, capsys):
        source = tmp_path / "malo.pl0+"
        source.write_text(UNDECLARED, encoding="utf-8")
        assert run_pipeline(config_for(source, "-x")) == 1
        report = parse_document(capsys.readouterr().err)
        assert report.root.name == "errores_y_advertencias"
        (item,) = report.root.find("errores").elements()
        assert item.find("fase").get("nombre") == "sem"

    def test_clean_compilation_emits_no_xml_report(self, tmp_path, capsys):
        source = tmp_path / "eco.pl0+"
        source.write_text(ECHO, encoding="utf-8")
        assert run_pipeline(config_for(source, "-x")) == 0
        assert capsys.readouterr().err == ""

    def test_unreadable_input(self, tmp_path, capsys):
        config = CompileConfig(str(tmp_path / "nada.pl0+"), PHASES)
        assert run_pipeline(config) == 2
        assert "no se pudo leer" in capsys.readouterr().err

    def test_malformed_intermediate_file(self, tmp_path, capsys):
        bad = tmp_path / "roto.pl0+lex"
        bad.write_text("esto no es XML", encoding="utf-8")
        assert run_pipeline(config_for(bad, "--sin")) == 2
        assert "Error" in capsys.readouterr().err

    def test_wrong_document_in_right_extension(self, tmp_path, capsys):
        bad = tmp_path / "roto.pl0+sin"
        bad.write_text("<lexemas/>", encoding="utf-8")
        assert run_pipeline(config_for(bad, "--sem")) == 2
        assert "Error" in capsys.readouterr().err

    def test_compiler_main_ties_it_together(self, tmp_path, capsys):
        source = tmp_path / "eco.pl0+"
        source.write_text(ECHO, encoding="utf-8")
        assert compiler_main([str(source)]) == 0
        assert (tmp_path / "eco.p+").exists()


def compiled_file(tmp_path, source_text, name="programa"):
    source = tmp_path / f"{name}.pl0+"
    source.write_text(source_text, encoding="utf-8")
    assert run_pipeline(config_for(source)) == 0
    return tmp_path / f"{name}.p+"


class TestInterpreter:
    def test_args_defaults(self):
        config = parse_interpreter_args(["objeto.p+"])
        assert config.input_path == "objeto.p+"
        assert not config.debug

    def test_args_debug(self):
        assert parse_interpreter_args(["-d", "objeto.p+"]).debug

    def test_args_help(self, capsys):
        with pytest.raises(SystemExit) as info:
            parse_interpreter_args(["-a"])
        assert info.value.code == 0
        assert "interprete" in capsys.readouterr().out

    def test_runs_a_compiled_program(self, tmp_path, capsys, monkeypatch):
        target = compiled_file(tmp_path, ECHO)
        monkeypatch.setattr(sys, "stdin", io.StringIO("10\n"))
        assert interpreter_main([str(target)]) == 0
        assert capsys.readouterr().out == "10\n"

    def test_missing_file(self, capsys, tmp_path):
        assert interpreter_main([str(tmp_path / "nada.p+")]) == 2
        assert "no se pudo leer" in capsys.readouterr().err

    def test_invalid_document(self, tmp_path, capsys):
        bad = tmp_path / "roto.p+"
        bad.write_text("<codigo_pmas><bailar/></codigo_pmas>",
                       encoding="utf-8")
        assert interpreter_main([str(bad)]) == 2
        assert "Error" in capsys.readouterr().err

    def test_runtime_error_exits_with_one(self, tmp_path, capsys,
                                          monkeypatch):
        target = compiled_file(
            tmp_path, "var x, y;\nbegin read x; y := y / x; end.\n")
        monkeypatch.setattr(sys, "stdin", io.StringIO("0\n"))
        assert interpreter_main([str(target)]) == 1
        assert "Error en tiempo de ejecución" in capsys.readouterr().err

    def test_debug_traces_to_stderr(self, tmp_path, capsys, monkeypatch):
        target = compiled_file(tmp_path, "begin end.\n")
        monkeypatch.setattr(sys, "stdin", io.StringIO("\n" * 10))
        assert interpreter_main(["-d", str(target)]) == 0
        err = capsys.readouterr().err
        assert "p=0 b=0 t=-1" in err
        assert "pila:" in err


class TestInstalledScripts:
    def test_compilador_round_trip(self, tmp_path):
        source = tmp_path / "eco.pl0+"
        source.write_text(ECHO, encoding="utf-8")
        compile_run = subprocess.run(["compilador", str(source)],
                                     capture_output=True, text=True)
        assert compile_run.returncode == 0, compile_run.stderr
        execute = subprocess.run(["interprete", str(tmp_path / "eco.p+")],
                                 input="37\n", capture_output=True, text=True)
        assert execute.returncode == 0, execute.stderr
        assert execute.stdout == "37\n"

    def test_compilador_reports_errors(self, tmp_path):
        source = tmp_path / "malo.pl0+"
        source.write_text(UNDECLARED, encoding="utf-8")
        result = subprocess.run(["compilador", str(source)],
                                capture_output=True, text=True)
        assert result.returncode == 1
        assert "ERROR" in result.stdout
