import random
from itertools import product

import pytest

from contlog import lattice as lt
from contlog.lattice import (FinitePoset, classify, dm_completion,
                             make_builtin, parse_lattice_file, validate)


def luk3_raw():
    els = ["0", "h", "1"]
    pairs = [("0", "h"), ("h", "1")]
    ot = {}
    vals = {"0": 0, "h": 1, "1": 2}
    names = {0: "0", 1: "h", 2: "1"}
    for a in els:
        for b in els:
            ot[(a, b)] = names[max(vals[a] + vals[b] - 2, 0)]
    return els, pairs, ot


class TestBuiltins:
    def test_luk3_fusion(self):
        lat = make_builtin("lukasiewicz_chain", 3)
        assert lat.elements == ("0", "h", "1")
        assert lat.otimes("h", "h") == "0"
        assert lat.residual("h", "0") == "h"

    def test_godel3_fusion(self):
        lat = make_builtin("godel_chain", 3)
        assert lat.otimes("h", "h") == "h"
        assert lat.residual("h", "0") == "0"

    def test_boolean_one_atom(self):
        lat = make_builtin("boolean", 1)
        assert set(lat.elements) == {"0", "1"}
        assert lat.otimes("0", "1") == "0"
        assert lat.residual("1", "0") == "0"
        assert lat.residual("0", "0") == "1"

    def test_boolean_two_atoms(self):
        lat = make_builtin("boolean", 2)
        assert set(lat.elements) == {"0", "a", "b", "1"}
        assert lat.otimes("a", "b") == "0"
        assert lat.join("a", "b") == "1"
        assert lat.residual("a", "0") == "b"

    def test_size_limits(self):
        with pytest.raises(lt.LatticeError):
            make_builtin("boolean", 7)
        with pytest.raises(lt.LatticeError):
            make_builtin("lukasiewicz_chain", 0)

    def test_luk4_names(self):
        lat = make_builtin("lukasiewicz_chain", 4)
        assert lat.elements == ("0", "1/3", "2/3", "1")


class TestValidate:
    def test_luk3_tables_ok(self):
        els, pairs, ot = luk3_raw()
        lat = validate("luk3", els, pairs, ot)
        assert lat.residual("h", "h") == "1"

    def test_not_integral(self):
        els, pairs, ot = luk3_raw()
        ot[("h", "1")] = "0"
        ot[("1", "h")] = "0"
        with pytest.raises((lt.NotIntegral, lt.NotMonotone)):
            validate("bad", els, pairs, ot)

    def test_not_commutative(self):
        els, pairs, ot = luk3_raw()
        ot[("h", "1")] = "0"
        with pytest.raises(lt.NotCommutative):
            validate("bad", els, pairs, ot)

    def test_not_lattice(self):
        # two-element antichain with top and bottom, but a and b have two
        # incomparable upper bounds once we drop the top declaration
        els = ["a", "b", "c", "d"]
        pairs = [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]
        ot = {(x, y): "a" for x in els for y in els}
        with pytest.raises(lt.NotLattice):
            validate("bad", els, pairs, ot)

    def test_residual_mismatch(self):
        els, pairs, ot = luk3_raw()
        with pytest.raises(lt.ResidualMismatch):
            validate("bad", els, pairs, ot, residual={("h", "0"): "1"})

    def test_residuation_law_exhaustive(self):
        for lat in (make_builtin("lukasiewicz_chain", 4),
                    make_builtin("godel_chain", 3),
                    make_builtin("boolean", 2)):
            for a, b, c in product(lat.elements, repeat=3):
                assert lat.leq(lat.otimes(a, b), c) \
                    == lat.leq(a, lat.residual(b, c))


class TestClassify:
    def test_luk3(self):
        c = classify(make_builtin("lukasiewicz_chain", 3))
        assert (c.is_locale, c.is_involutive) == (False, True)

    def test_godel3(self):
        c = classify(make_builtin("godel_chain", 3))
        assert (c.is_locale, c.is_involutive) == (True, False)

    def test_two_chain(self):
        c = classify(make_builtin("boolean", 1))
        assert (c.is_locale, c.is_involutive, c.is_boolean) == (True, True, True)

    def test_locale_iff_otimes_is_meet(self):
        for name, size in (("lukasiewicz_chain", 3), ("godel_chain", 4),
                           ("boolean", 2)):
            lat = make_builtin(name, size)
            is_meet = all(lat.otimes(a, b) == lat.meet(a, b)
                          for a in lat.elements for b in lat.elements)
            assert classify(lat).is_locale == is_meet


class TestLatticeFile:
    TEXT = """\
# three-element Lukasiewicz chain
lattice luk3
elements 0 h 1
bottom 0
top 1
leq 0 h
leq h 1
otimes 0 0 0
otimes 0 h 0
otimes 0 1 0
otimes h 0 0
otimes h h 0
otimes h 1 h
otimes 1 0 0
otimes 1 h h
otimes 1 1 1
end
"""

    def test_parse_roundtrip(self):
        lat = parse_lattice_file(self.TEXT)
        assert lat.name == "luk3"
        assert lat.otimes("h", "h") == "0"

    def test_unknown_directive(self):
        with pytest.raises(lt.LatticeFormatError):
            parse_lattice_file("lattice x\nfrobnicate y\nend\n")

    def test_missing_table_entry(self):
        with pytest.raises(lt.LatticeFormatError):
            parse_lattice_file("lattice x\nelements a b\nleq a b\nend\n")


def random_poset(rng, n):
    els = [f"e{i}" for i in range(n)]
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.4:
                pairs.append((els[i], els[j]))
    return FinitePoset(els, pairs)


class TestCompletion:
    def test_antichain(self):
        p = FinitePoset(["a", "b"], [])
        comp, emb = dm_completion(p)
        assert len(comp.elements) == 4
        assert emb["a"] != emb["b"]

    def test_chain_is_isomorphic(self):
        p = FinitePoset(["x", "y", "z"], [("x", "y"), ("y", "z")])
        comp, emb = dm_completion(p)
        assert len(comp.elements) == 3

    def test_lattice_fixed(self):
        lat = make_builtin("boolean", 2)
        comp, emb = dm_completion(lat)
        assert len(comp.elements) == len(lat.elements)
        for a in lat.elements:
            for b in lat.elements:
                assert lat.leq(a, b) == comp.leq(emb[a], emb[b])

    def test_densities_random(self):
        rng = random.Random(0)
        for _ in range(25):
            p = random_poset(rng, 6)
            comp, emb = dm_completion(p)
            images = [emb[e] for e in p.elements]
            # embedding preserves and reflects order
            for a in p.elements:
                for b in p.elements:
                    assert p.leq(a, b) == comp.leq(emb[a], emb[b])
            # every completion element is a join and a meet of images
            for x in comp.elements:
                below = [i for i in images if comp.leq(i, x)]
                above = [i for i in images if comp.leq(x, i)]
                assert comp.join_all(below) == x
                assert comp.meet_all(above) == x

    def test_idempotent_on_lattices(self):
        rng = random.Random(1)
        for _ in range(10):
            p = random_poset(rng, 5)
            comp, _ = dm_completion(p)
            comp2, emb2 = dm_completion(comp)
            assert len(comp2.elements) == len(comp.elements)
            for a in comp.elements:
                for b in comp.elements:
                    assert comp.leq(a, b) == comp2.leq(emb2[a], emb2[b])
