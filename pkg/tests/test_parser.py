"""Recursive-descent parsing, error recovery, and the tree's XML form."""

import pytest

from pl0plus.lexer import tokenize
from pl0plus.parser import (Assign, BinOp, Block, Call, Cond, ConstDecl,
                            Empty, Ident, If, Neg, Num, Program, Read,
                            Sequence, VarDecl, While, Write, ast_from_xml,
                            ast_to_xml, parse)
from pl0plus.xmldoc import XmlLoadError, canonical_equal, parse_document


def parsed(source):
    tokens, lex_diags = tokenize(source)
    assert not lex_diags
    ast, diags = parse(tokens)
    assert not diags, diags
    return ast


def parse_with_diags(source):
    tokens, _ = tokenize(source)
    return parse(tokens)


def body(source):
    return parsed(source).block.body


def first_expr(source_expr):
    return body(f"begin x := {source_expr} end.").statements[0].expr


class TestStructure:
    def test_minimal_program(self):
        ast = parsed("begin end.")
        assert isinstance(ast, Program)
        assert ast.block.constants == []
        assert ast.block.variables == []
        assert ast.block.procedures == []
        seq = ast.block.body
        assert isinstance(seq, Sequence)
        assert seq.statements == [Empty(1, 6)]

    def test_single_statement_program(self):
        assert body("x := 1.") == Assign("x", Num(1, 1, 5), 1, 0)

    def test_declarations(self):
        ast = parsed("const a=1, b=2;\nvar x, y;\nbegin end.")
        assert ast.block.constants == [
            ConstDecl("a", 1, 1, 6), ConstDecl("b", 2, 1, 11)]
        assert ast.block.variables == [
            VarDecl("x", 2, 4), VarDecl("y", 2, 7)]

    def test_signed_constant_folded(self):
        ast = parsed("const neg=-5, pos=+7;\nbegin end.")
        assert [c.value for c in ast.block.constants] == [-5, 7]

    def test_procedure_nesting(self):
        ast = parsed("procedure p;\n"
                     "    procedure q;\n"
                     "    begin end;\n"
                     "begin end;\n"
                     "begin call p end.")
        outer = ast.block.procedures[0]
        assert outer.name == "p"
        assert (outer.line, outer.column) == (1, 10)
        inner = outer.block.procedures[0]
        assert inner.name == "q"
        assert ast.block.body.statements[0] == Call("p", 5, 11)

    def test_statement_forms(self):
        seq = body("begin\n"
                   "    x := 1;\n"
                   "    call p;\n"
                   "    read a;\n"
                   "    write b;\n"
                   "    begin x := 2 end;\n"
                   "    if x = 1 then x := 2;\n"
                   "    while x < 9 do x := 9;\n"
                   "end.")
        classes = [type(s) for s in seq.statements]
        assert classes == [Assign, Call, Read, Write, Sequence, If, While]
        read = seq.statements[2]
        assert (read.variable, read.line, read.column) == ("a", 4, 9)
        write = seq.statements[3]
        assert (write.symbol, write.line, write.column) == ("b", 5, 10)

    def test_if_else(self):
        stmt = body("if odd x then y := 1 else y := 2.")
        assert isinstance(stmt, If)
        assert stmt.condition == Cond("odd", [Ident("x", 1, 7)], 1, 7)
        assert stmt.then_branch == Assign("y", Num(1, 1, 19), 1, 14)
        assert stmt.else_branch == Assign("y", Num(2, 1, 31), 1, 26)

    def test_else_binds_to_nearest_if(self):
        stmt = body("if a = 1 then if b = 2 then x := 1 else x := 2.")
        assert stmt.else_branch is None
        assert stmt.then_branch.else_branch is not None

    def test_empty_statement_between_semicolons(self):
        seq = body("begin x := 1; ; y := 2 end.")
        assert [type(s) for s in seq.statements] == [Assign, Empty, Assign]

    def test_trailing_semicolon_before_end(self):
        seq = body("begin x := 1; end.")
        assert [type(s) for s in seq.statements] == [Assign]

    def test_nothing_to_parse(self):
        ast, diags = parse([])
        assert ast is None
        assert [(d.severity, d.message) for d in diags] == [
            ("error", "Se esperaba '.'")]


class TestExpressions:
    def test_precedence(self):
        expr = first_expr("1 + 2 * 3")
        assert expr == BinOp("suma", Num(1, 1, 11),
                             BinOp("multiplicacion", Num(2, 1, 15),
                                   Num(3, 1, 19), 1, 17), 1, 13)

    def test_left_associativity(self):
        expr = first_expr("8 - 4 - 2")
        assert expr.op == "resta"
        assert expr.left.op == "resta"
        assert expr.right == Num(2, 1, 19)

    def test_parentheses_override(self):
        expr = first_expr("(1 + 2) * 3")
        assert expr.op == "multiplicacion"
        assert expr.left.op == "suma"

    def test_division_name(self):
        assert first_expr("a / b").op == "division"

    def test_leading_minus_covers_first_term_only(self):
        expr = first_expr("-a + b")
        assert expr.op == "suma"
        assert isinstance(expr.left, Neg)
        assert isinstance(expr.right, Ident)

    def test_leading_minus_wraps_whole_term(self):
        expr = first_expr("-a * b")
        assert isinstance(expr, Neg)
        assert expr.operand.op == "multiplicacion"

    def test_leading_plus_is_dropped(self):
        assert first_expr("+a") == Ident("a", 1, 12)

    def test_chained_unary_minus(self):
        expr = first_expr("- - -a")
        count = 0
        while isinstance(expr, Neg):
            count += 1
            expr = expr.operand
        assert count == 3
        assert expr == Ident("a", 1, 16)

    def test_minus_inside_factor(self):
        expr = first_expr("a * --b")
        assert expr.op == "multiplicacion"
        assert isinstance(expr.right, Neg)
        assert isinstance(expr.right.operand, Neg)

    def test_relations_map_to_operation_names(self):
        cases = [("=", "comparacion"), ("<>", "diferente"),
                 ("<", "menor_que"), (">", "mayor_que"),
                 ("<=", "menor_igual"), (">=", "mayor_igual")]
        for text, name in cases:
            stmt = body(f"if a {text} b then x := 1.")
            assert stmt.condition.op == name
            assert len(stmt.condition.operands) == 2

    def test_condition_anchor_is_first_operand(self):
        stmt = body("if  a < b then x := 1.")
        assert (stmt.condition.line, stmt.condition.column) == (1, 4)

    def test_binop_anchor_is_operator(self):
        expr = first_expr("a + b")
        assert (expr.line, expr.column) == (1, 13)


class TestRecovery:
    def test_missing_semicolon_is_warning(self):
        ast, diags = parse_with_diags(
            "begin\n    f := 9 - i * 2\n    if n<>1 then f := 1;\nend.")
        assert [(d.severity, d.phase, d.line, d.column, d.message)
                for d in diags] == [
            ("warning", "sin", 2, 18, "Falta un ';'")]
        assert [type(s) for s in ast.block.body.statements] == [Assign, If]

    def test_adjacent_operands_error_and_discard(self):
        ast, diags = parse_with_diags("begin i := 2 4; end.")
        assert [(d.severity, d.line, d.column, d.message) for d in diags] == [
            ("error", 1, 12, "Falta un operador")]
        assert ast.block.body.statements[0].expr == Num(2, 1, 11)

    def test_one_syntax_error_per_line(self):
        _, diags = parse_with_diags("begin x := 2 4 6; end.")
        assert [d.message for d in diags] == ["Falta un operador"]

    def test_errors_on_distinct_lines_all_reported(self):
        _, diags = parse_with_diags("begin x := 2 4;\ny := 3 5; end.")
        assert [(d.line, d.message) for d in diags] == [
            (1, "Falta un operador"), (2, "Falta un operador")]

    def test_missing_assign_operator(self):
        _, diags = parse_with_diags("begin x 1; end.")
        assert [d.message for d in diags] == ["Se esperaba ':='"]

    def test_missing_then(self):
        _, diags = parse_with_diags("begin if a = 1 write a; end.")
        assert [d.message for d in diags] == ["Se esperaba 'then'"]

    def test_adjacent_operand_masks_later_error_on_same_line(self):
        _, diags = parse_with_diags("begin if a = 1 x := 2; end.")
        assert [d.message for d in diags] == ["Falta un operador"]

    def test_missing_relational_operator(self):
        _, diags = parse_with_diags("begin if a then x := 2; end.")
        assert [d.message for d in diags] == [
            "Se esperaba un operador relacional"]

    def test_missing_operand(self):
        _, diags = parse_with_diags("begin x := 2 +; end.")
        assert [d.message for d in diags] == ["Se esperaba una expresión"]

    def test_missing_end(self):
        _, diags = parse_with_diags("begin x := 1.")
        assert [d.message for d in diags] == ["Se esperaba 'end'"]

    def test_missing_final_dot(self):
        _, diags = parse_with_diags("begin x := 1 end")
        assert [d.message for d in diags] == ["Se esperaba '.'"]

    def test_tokens_after_program_end(self):
        _, diags = parse_with_diags("begin x := 1 end. x")
        assert [d.message for d in diags] == [
            "Se esperaba el fin del programa"]

    def test_recovery_still_builds_tree(self):
        ast, diags = parse_with_diags(
            "var x;\nbegin\n    x 2;\n    x := 3;\nend.")
        assert diags
        statements = ast.block.body.statements
        assert statements[-1] == Assign("x", Num(3, 4, 9), 4, 4)


class TestXml:
    def test_known_tree(self):
        doc = ast_to_xml(parsed("var x;\nbegin\n    read x;\n"
                                "    if odd x then write x;\nend."))
        expected = parse_document("""
            <arbol_de_sintaxis>
              <programa>
                <bloque>
                  <variable linea="1" columna="4" nombre="x"/>
                  <secuencia linea="2" columna="0">
                    <leer linea="3" columna="9" variable="x"/>
                    <condicional linea="4" columna="4">
                      <condicion linea="4" columna="11" operacion="odd">
                        <identificador linea="4" columna="11" simbolo="x"/>
                      </condicion>
                      <escribir linea="4" columna="24" simbolo="x"/>
                    </condicional>
                  </secuencia>
                </bloque>
              </programa>
            </arbol_de_sintaxis>""")
        assert canonical_equal(doc, expected)

    def test_constant_element_carries_value(self):
        doc = ast_to_xml(parsed("const a=-3;\nbegin end."))
        const = doc.root.find("programa").find("bloque").find("constante")
        assert dict(const.attributes) == {
            "linea": "1", "columna": "6", "nombre": "a", "valor": "-3"}

    def test_fuente_present_only_with_source(self):
        ast = parsed("begin end.")
        assert ast_to_xml(ast).root.find("fuente") is None
        doc = ast_to_xml(ast, "begin end.\n")
        assert doc.root.find("fuente").cdata() == "begin end.\n"

    def test_round_trip_with_source(self):
        source = ("const c=4;\nvar x;\nprocedure p;\nbegin x := c end;\n"
                  "begin\n    read x;\n    while x > 0 do begin\n"
                  "        call p;\n        x := x - 1;\n    end;\n"
                  "    write x;\nend.")
        ast = parsed(source)
        again, source_again = ast_from_xml(ast_to_xml(ast, source))
        assert again == ast
        assert source_again == source

    def test_wrong_root_rejected(self):
        with pytest.raises(XmlLoadError):
            ast_from_xml(parse_document("<arbol/>"))

    def test_unknown_statement_element_rejected(self):
        doc = parse_document(
            '<arbol_de_sintaxis><programa><bloque>'
            '<brinco linea="1" columna="0"/>'
            "</bloque></programa></arbol_de_sintaxis>")
        with pytest.raises(XmlLoadError):
            ast_from_xml(doc)

    def test_missing_position_rejected(self):
        doc = parse_document(
            '<arbol_de_sintaxis><programa><bloque>'
            '<leer variable="x"/>'
            "</bloque></programa></arbol_de_sintaxis>")
        with pytest.raises(XmlLoadError):
            ast_from_xml(doc)

    def test_odd_with_two_operands_rejected(self):
        doc = parse_document(
            '<arbol_de_sintaxis><programa><bloque>'
            '<condicional linea="1" columna="0">'
            '<condicion linea="1" columna="3" operacion="odd">'
            '<numero linea="1" columna="3" valor="1"/>'
            '<numero linea="1" columna="5" valor="2"/>'
            "</condicion>"
            '<nada linea="1" columna="9"/>'
            "</condicional></bloque></programa></arbol_de_sintaxis>")
        with pytest.raises(XmlLoadError):
            ast_from_xml(doc)

    def test_relation_with_one_operand_rejected(self):
        doc = parse_document(
            '<arbol_de_sintaxis><programa><bloque>'
            '<condicional linea="1" columna="0">'
            '<condicion linea="1" columna="3" operacion="menor_que">'
            '<numero linea="1" columna="3" valor="1"/>'
            "</condicion>"
            '<nada linea="1" columna="9"/>'
            "</condicional></bloque></programa></arbol_de_sintaxis>")
        with pytest.raises(XmlLoadError):
            ast_from_xml(doc)

    def test_non_numeric_position_rejected(self):
        doc = parse_document(
            '<arbol_de_sintaxis><programa><bloque>'
            '<leer linea="uno" columna="0" variable="x"/>'
            "</bloque></programa></arbol_de_sintaxis>")
        with pytest.raises(XmlLoadError):
            ast_from_xml(doc)
