import pytest

from contlog.dyadic import Dyadic
from contlog import syntax as sx
from contlog.syntax import (EPS, FAtom, FBin, FConst, FUn, SComma, SEps,
                            SLeaf, SUn, Sequent, expand_dyadic_formula,
                            expand_eps, involutive_normal_form, parse,
                            parse_sequent, print_formula, print_sequent,
                            print_structure, struct_to_formula)

D = Dyadic.parse


class TestParsePrint:
    def test_spec_roundtrip_example(self):
        text = "j* a /\\ 2 b |- a + d(3/4)"
        seq = parse_sequent(text, "cflew")
        assert print_sequent(seq) == text
        assert seq.lhs == SLeaf(FBin("meet", FUn("jstar", FAtom("a")),
                                     FUn("double", FAtom("b"))))
        assert seq.rhs == FBin("oplus", FAtom("a"), FConst(D("3/4")))

    def test_illegal_connective(self):
        with pytest.raises(sx.IllegalConnective):
            parse("~ a |- b", "cflew")
        with pytest.raises(sx.IllegalConnective):
            parse("a x b |- b", "ljk")
        with pytest.raises(sx.IllegalConnective):
            parse("! a |- b", "gl")
        parse("~ a |- b", "incflew")

    def test_eps_dyadic(self):
        s = parse("eps(3/4)", "cflew")
        assert s == SEps(D("3/4"))
        assert print_structure(s) == "eps(3/4)"

    def test_precedence(self):
        f = parse("a + b /\\ c \\/ d")
        assert f == FBin("join", FBin("meet", FBin("oplus", FAtom("a"),
                                                   FAtom("b")), FAtom("c")),
                         FAtom("d"))

    def test_left_assoc_sum(self):
        assert parse("a + b - c") == FBin("ominus",
                                          FBin("oplus", FAtom("a"), FAtom("b")),
                                          FAtom("c"))

    def test_unary_binds_tightest(self):
        assert parse("2 a + b") == FBin("oplus", FUn("double", FAtom("a")),
                                        FAtom("b"))
        assert parse("2 (a + b)") == FUn("double", FBin("oplus", FAtom("a"),
                                                        FAtom("b")))

    def test_structures(self):
        s = parse("o2 a, b2 eps, (c, d)")
        assert isinstance(s, SComma)
        assert print_structure(s) == "o2 a, b2 eps, (c, d)"

    def test_keywords_not_atoms(self):
        with pytest.raises(sx.SyntaxError_):
            parse("eps + a")
        with pytest.raises(sx.SyntaxError_):
            parse("oa |- a")

    def test_parse_errors_have_positions(self):
        with pytest.raises(sx.SyntaxError_) as e:
            parse("a + + b")
        assert "column" in str(e.value)

    def test_print_parse_idempotent(self):
        for text in ["a, a |- 2 a", "2 a |- a + a", "eps |- 0",
                     "b2 eps, b2 eps |- x1",
                     "al (a /\\ b) |- bx a \\/ 0",
                     "h j* a |- d(1/16)"]:
            seq = parse_sequent(text, "cflew")
            assert parse_sequent(print_sequent(seq), "cflew") == seq

    def test_involutive_two_sided(self):
        seq = parse_sequent("a, b |- a x b", "incflew")
        assert isinstance(seq.rhs, sx.Structure)

    def test_formula_neg_vs_struct_neg(self):
        seq = parse_sequent("! ! a |- a", "incflew")
        assert seq.lhs == SLeaf(FUn("neg", FUn("neg", FAtom("a"))))
        seq2 = parse_sequent("! (a, b) |- c", "incflew")
        assert seq2.lhs == SUn("sneg", SComma(SLeaf(FAtom("a")),
                                              SLeaf(FAtom("b"))))

    def test_neg_then_binop_folds_to_formula(self):
        seq = parse_sequent("! a + b |- c", "incflew")
        assert seq.lhs == SLeaf(FBin("oplus", FUn("neg", FAtom("a")),
                                     FAtom("b")))


class TestExpansions:
    def test_eps_three_quarters(self):
        got = expand_eps(D("3/4"))
        item = SUn("oa", SUn("b2", EPS))
        assert got == SComma(SComma(item, item), item)
        assert print_structure(got) == "oa b2 eps, oa b2 eps, oa b2 eps"

    def test_eps_half(self):
        assert print_structure(expand_eps(D("1/2"))) == "b2 eps"

    def test_eps_zero_and_one(self):
        assert expand_eps(D("0")) == EPS
        assert print_structure(expand_eps(D("1"))) == "b2 eps, b2 eps"

    def test_dyadic_half(self):
        assert print_formula(expand_dyadic_formula(D("1/2"))) == "j* 0"

    def test_dyadic_three_quarters(self):
        got = expand_dyadic_formula(D("3/4"))
        unit = FUn("alpha", FUn("jstar", FConst(D("0"))))
        assert got == FBin("oplus", FBin("oplus", unit, unit), unit)

    def test_dyadic_zero(self):
        assert expand_dyadic_formula(D("0")) == FConst(D("0"))


class TestNormalForm:
    def test_mixed_double_negation_cancels(self):
        s = SUn("sim", SUn("sneg", SLeaf(FAtom("a"))))
        assert involutive_normal_form(s) == SLeaf(FAtom("a"))
        s2 = SUn("sneg", SUn("sim", SLeaf(FAtom("a"))))
        assert involutive_normal_form(s2) == SLeaf(FAtom("a"))

    def test_comma_reverses(self):
        s = SUn("sim", SComma(SLeaf(FAtom("g")), SLeaf(FAtom("d"))))
        got = involutive_normal_form(s)
        assert got == SComma(SUn("sim", SLeaf(FAtom("d"))),
                             SUn("sim", SLeaf(FAtom("g"))))

    def test_modalities_pass_through(self):
        s = SUn("sneg", SUn("o2", SLeaf(FAtom("a"))))
        got = involutive_normal_form(s)
        assert got == SUn("o2", SUn("sneg", SLeaf(FAtom("a"))))

    def test_same_negation_cancels_when_identified(self):
        s = SUn("sneg", SUn("sneg", SLeaf(FAtom("a"))))
        assert involutive_normal_form(s, identify=True) == SLeaf(FAtom("a"))
        assert involutive_normal_form(s) != SLeaf(FAtom("a"))

    def test_idempotent(self):
        s = SUn("sim", SComma(SUn("o2", SLeaf(FAtom("a"))),
                              SUn("sneg", SLeaf(FAtom("b")))))
        once = involutive_normal_form(s)
        assert involutive_normal_form(once) == once


class TestTranslation:
    def test_left_reading(self):
        s = parse("a, o2 b", "cflew")
        f = struct_to_formula(s, "left", "cflew")
        assert f == FBin("oplus", FAtom("a"), FUn("double", FAtom("b")))

    def test_right_reading_involutive(self):
        s = parse("a, b", "incflew")
        f = struct_to_formula(s, "right", "incflew")
        assert f == FBin("odot", FAtom("a"), FAtom("b"))
        assert struct_to_formula(EPS, "right", "incflew") \
            == FUn("neg", FConst(D("0")))

    def test_left_eps_d(self):
        assert struct_to_formula(SEps(D("3/4")), "left", "cflew") \
            == FConst(D("3/4"))

    def test_modalities(self):
        s = parse("oa b2 eps", "cflew")
        assert struct_to_formula(s, "left", "cflew") \
            == FUn("alpha", FUn("jstar", FConst(D("0"))))
