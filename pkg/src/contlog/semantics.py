"""Evaluation of formulas and sequents in USC(L), sampling, countermodels,
and the axiom-suite runner for the continuous theories.

Sequent validity follows the continuous order convention: `lhs |- rhs`
holds under a valuation when the left side's translation evaluates above
the right side's, with the constant-0 embedding at the bottom and the
constantly-bottom function at the top.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import dyadic as dy
from . import stepfn as sf
from . import syntax as sx
from .dyadic import Dyadic
from .lattice import FiniteResiduatedLattice, classify
from .stepfn import StepFunction
from .syntax import (FAtom, FBin, FConst, FUn, Formula, Sequent, Structure,
                     struct_to_formula)


class SemanticsError(ValueError):
    pass


class UnboundAtom(SemanticsError):
    pass


@dataclass
class Valuation:
    lattice: FiniteResiduatedLattice
    bindings: dict

    def __post_init__(self):
        for name, f in self.bindings.items():
            if f.lattice is not self.lattice:
                raise SemanticsError(f"binding {name} is over another lattice")

    def __str__(self):
        items = ", ".join(f"{k} = {v}" for k, v in sorted(self.bindings.items()))
        return items if items else "(no atoms)"


_UNARY_EVAL = {"double", "half", "jstar", "jmap", "alpha", "beta", "neg"}


def eval_formula(f: Formula, v: Valuation) -> StepFunction:
    lat = v.lattice
    if isinstance(f, FAtom):
        try:
            return v.bindings[f.name]
        except KeyError:
            raise UnboundAtom(f"atom {f.name!r} is not bound") from None
    if isinstance(f, FConst):
        return sf.constant(lat, f.value)
    if isinstance(f, FUn):
        if f.op not in _UNARY_EVAL:
            raise SemanticsError(f"cannot evaluate unary {f.op!r}")
        return sf.apply_unary(f.op, eval_formula(f.arg, v))
    if isinstance(f, FBin):
        left = eval_formula(f.left, v)
        right = eval_formula(f.right, v)
        if f.op == "oplus":
            return sf.oplus(left, right)
        if f.op == "ominus":
            return sf.ominus(left, right)
        if f.op == "odot":
            return sf.odot(left, right)
        if f.op in ("meet", "join"):
            return sf.lattice_pointwise(f.op, left, right)
        raise SemanticsError(f"cannot evaluate binary {f.op!r}")
    raise SemanticsError(f"not a closed formula: {f!r}")


def sequent_valid(seq: Sequent, v: Valuation) -> bool:
    """lhs |- rhs holds iff the rhs value lies below the lhs value."""
    system = seq.system or None
    lhs = eval_formula(struct_to_formula(seq.lhs, "left", system), v)
    if isinstance(seq.rhs, Structure):
        rhs = eval_formula(struct_to_formula(seq.rhs, "right", system), v)
    else:
        rhs = eval_formula(seq.rhs, v)
    return sf.leq(rhs, lhs)


def sequent_atoms(seq: Sequent) -> list[str]:
    out = set()

    def walk_f(f):
        if isinstance(f, FAtom):
            out.add(f.name)
        elif isinstance(f, FUn):
            walk_f(f.arg)
        elif isinstance(f, FBin):
            walk_f(f.left)
            walk_f(f.right)

    def walk_s(s):
        if isinstance(s, sx.SLeaf):
            walk_f(s.formula)
        elif isinstance(s, sx.SUn):
            walk_s(s.arg)
        elif isinstance(s, sx.SComma):
            walk_s(s.left)
            walk_s(s.right)

    walk_s(seq.lhs)
    if isinstance(seq.rhs, Structure):
        walk_s(seq.rhs)
    else:
        walk_f(seq.rhs)
    return sorted(out)


# ------------------------------------------------------------ sampling

@dataclass
class SamplerSpec:
    grid_exponent: int = 3
    sample_count: int = 200
    seed: int = 0
    mode: str = "random"
    exhaustive_cap: int = 20000


def random_step_function(lat, rng: random.Random, grid_exponent: int):
    """Breakpoints uniform on the grid, values a random increasing chain;
    every fifth draw is forced to an indicator or an embedded constant so
    the corner cases the discriminators need are always covered."""
    style = rng.randrange(5)
    if style == 3:
        return sf.indicator(lat, rng.choice(lat.elements))
    if style == 4:
        k = rng.randrange(2**grid_exponent + 1)
        return sf.constant(lat, Dyadic(k, 2**grid_exponent))
    interior = [Dyadic(k, 2**grid_exponent)
                for k in range(1, 2**grid_exponent)]
    n_cuts = rng.randint(0, min(3, len(interior)))
    bps = sorted(rng.sample(interior, n_cuts)) + [dy.ONE]
    vals = [rng.choice(lat.elements)]
    for _ in bps[1:]:
        ups = [vals[-1]] + lat.strict_uppers(vals[-1])
        vals.append(rng.choice(ups))
    return sf.normalize(lat, list(zip(bps, vals)))


def _monotone_grid_functions(lat, grid_exponent: int):
    """All step functions with breakpoints on the grid: monotone chains
    through the lattice of length 2^exponent."""
    pts = [Dyadic(k, 2**grid_exponent) for k in range(1, 2**grid_exponent + 1)]
    chains = [[e] for e in lat.elements]
    for _ in pts[1:]:
        chains = [c + [u] for c in chains
                  for u in [c[-1]] + lat.strict_uppers(c[-1])]
    return [sf.normalize(lat, list(zip(pts, chain))) for chain in chains]


def count_monotone_grid_functions(lat, grid_exponent: int) -> int:
    counts = {e: 1 for e in lat.elements}
    for _ in range(2**grid_exponent - 1):
        counts = {e: sum(counts[d] for d in lat.elements if lat.leq(d, e))
                  for e in lat.elements}
    return sum(counts.values())


def valuations(atoms, lat, spec: SamplerSpec):
    """Deterministic stream of valuations per the sampler spec."""
    atoms = list(atoms)
    if spec.mode == "exhaustive":
        total = count_monotone_grid_functions(lat, spec.grid_exponent)
        if total ** max(len(atoms), 1) > spec.exhaustive_cap:
            raise SemanticsError(
                f"exhaustive mode needs {total}^{len(atoms)} valuations, "
                f"over the cap {spec.exhaustive_cap}")
        pool = _monotone_grid_functions(lat, spec.grid_exponent)

        def assign(i):
            if i == len(atoms):
                yield {}
                return
            for f in pool:
                for rest in assign(i + 1):
                    yield {atoms[i]: f, **rest}

        for bindings in assign(0):
            yield Valuation(lat, bindings)
        return
    if spec.mode != "random":
        raise SemanticsError(f"unknown sampler mode {spec.mode!r}")
    for idx in range(spec.sample_count):
        rng = random.Random(f"{spec.seed}:{idx}")
        bindings = {a: random_step_function(lat, rng, spec.grid_exponent)
                    for a in atoms}
        yield Valuation(lat, bindings)


def countermodel_search(seq: Sequent, lat, spec: SamplerSpec):
    """First falsifying valuation under the spec's deterministic stream,
    or None."""
    for v in valuations(sequent_atoms(seq), lat, spec):
        if not sequent_valid(seq, v):
            return v
    return None


# ------------------------------------------------------------- theories

def _c(d) -> Formula:
    return FConst(d)


def _un(op, f) -> Formula:
    return FUn(op, f)


def _bin(op, a, b) -> Formula:
    return FBin(op, a, b)


V, U, W = FAtom("v"), FAtom("u"), FAtom("w")


@dataclass
class AxiomSchema:
    """An inequality (or property) schema checked on sampled valuations.

    kind 'leq':    lhs <= rhs pointwise in the continuous order
    kind 'iff':    two inequalities agree (residuation-style)
    kind 'mono':   each named unary operation is monotone
    """
    name: str
    kind: str
    lhs: Formula | None = None
    rhs: Formula | None = None
    ops: tuple = ()
    pairs: tuple = ()  # for iff: ((l1, r1), (l2, r2))

    def check(self, v: Valuation) -> bool:
        if self.kind == "leq":
            return sf.leq(eval_formula(self.lhs, v), eval_formula(self.rhs, v))
        if self.kind == "iff":
            (l1, r1), (l2, r2) = self.pairs
            a = sf.leq(eval_formula(l1, v), eval_formula(r1, v))
            b = sf.leq(eval_formula(l2, v), eval_formula(r2, v))
            return a == b
        if self.kind == "mono":
            f = eval_formula(FAtom("u"), v)
            g = eval_formula(FAtom("v"), v)
            if not sf.leq(f, g):
                return True
            return all(sf.leq(sf.apply_unary(op, f), sf.apply_unary(op, g))
                       for op in self.ops)
        raise SemanticsError(f"unknown schema kind {self.kind!r}")


def _eq(name, lhs, rhs):
    return [AxiomSchema(name + " (<=)", "leq", lhs, rhs),
            AxiomSchema(name + " (>=)", "leq", rhs, lhs)]


def _leq(name, lhs, rhs):
    return [AxiomSchema(name, "leq", lhs, rhs)]


def _half_const(n):
    return _c(Dyadic(1, 2**n))


def theory_axioms(theory: str, n_cap: int = 4):
    """The axiom schemas of the named theory, parameters instantiated for
    n <= n_cap and dyadics with denominator 2^n_cap."""
    zero, one = _c(Dyadic(0)), _c(Dyadic(1))
    ax = []
    dyadics = [Dyadic(k, 2**n_cap) for k in range(2**n_cap + 1)]

    def base_lattice():
        out = []
        out += _eq("1.a join-comm", _bin("join", U, V), _bin("join", V, U))
        out += _eq("1.a meet-comm", _bin("meet", U, V), _bin("meet", V, U))
        out += _eq("1.a join-assoc", _bin("join", _bin("join", U, V), W),
                   _bin("join", U, _bin("join", V, W)))
        out += _eq("1.a meet-assoc", _bin("meet", _bin("meet", U, V), W),
                   _bin("meet", U, _bin("meet", V, W)))
        out += _eq("1.a absorption", _bin("join", U, _bin("meet", U, V)), U)
        out += _leq("1.a bottom", zero, V)
        out += _leq("1.a top", V, one)
        out += _eq("1.b comm", _bin("oplus", U, V), _bin("oplus", V, U))
        out += _eq("1.b assoc", _bin("oplus", _bin("oplus", U, V), W),
                   _bin("oplus", U, _bin("oplus", V, W)))
        out += _eq("1.b unit", _bin("oplus", V, zero), V)
        out.append(AxiomSchema(
            "1.c residuation", "iff",
            pairs=((W, _bin("oplus", U, V)), (_bin("ominus", W, V), U))))
        out.append(AxiomSchema("2 monotone", "mono",
                               ops=("double", "half", "jstar", "jmap",
                                    "alpha")))
        return out

    def adjunctions():
        return (_leq("3.a.1", _un("half", _un("double", V)), V)
                + _leq("3.a.2", V, _un("double", _un("half", V)))
                + _leq("3.b.1", _un("jmap", _un("jstar", V)), V)
                + _leq("3.b.2", V, _un("jstar", _un("jmap", V))))

    def four_common():
        out = []
        out += _eq("4.b", _un("jstar", _un("double", V)),
                   _bin("oplus", V, _un("jstar", zero)))
        out += _leq("4.c.1", V, _un("double", V))
        out += _leq("4.c.2", V, _un("jstar", V))
        out += _leq("4.d.1", V, _un("alpha", _bin("meet", _un("double", V),
                                                  _un("jstar", V))))
        out += _leq("4.d.2", _un("alpha", _bin("meet", _un("double", V),
                                               _un("jstar", V))), V)
        out += _leq("4.e.1", _bin("meet", _un("double", _un("alpha", V)),
                                  _un("jstar", _un("alpha", V))), V)
        out += _leq("4.e.2", V, _bin("meet", _un("double", _un("alpha", V)),
                                     _un("jstar", _un("alpha", V))))
        for n in range(1, n_cap + 1):
            t = _un("jstar", zero)
            for _ in range(n):
                t = _un("alpha", t)
            s = _un("jstar", zero)
            for _ in range(n - 1):
                s = _un("alpha", s)
            out += _leq(f"4.g n={n}", _bin("oplus", t, t), s)
        return out

    def six():
        out = []
        for d in dyadics:
            for n in range(n_cap + 1):
                inner = _bin("oplus", V, _c(dy.ONE - d))
                for _ in range(n):
                    inner = _un("alpha", inner)
                out += _leq(f"6.a d={d} n={n}", V, _bin("oplus", _c(d), inner))
        for n in range(min(n_cap, 3) + 1):
            terms = []
            for k in range(1, 2 ** (n + 1)):
                dd = Dyadic(k, 2 ** (n + 1))
                inner = _bin("oplus", V, _c(dd))
                for _ in range(n + 1):
                    inner = _un("alpha", inner)
                terms.append(_bin("oplus", _c(dy.ONE - dd), inner))
            big = terms[0]
            for t in terms[1:]:
                big = _bin("meet", big, t)
            out += _leq(f"6.b n={n}", big,
                        _bin("oplus", V, _half_const(n)))
        return out

    if theory == "T" or theory == "Tinv":
        ax += base_lattice() + adjunctions()
        ax += _leq("4.a.1", _un("double", V), _bin("oplus", V, V))
        ax += _leq("4.a.2", _bin("oplus", _un("double", U), _un("double", V)),
                   _un("double", _bin("oplus", U, V)))
        ax += four_common()
        ax += _leq("4.f", one, _un("double", _un("jstar", zero)))
        ax += _leq("5.a", _un("double", _bin("oplus", U, V)),
                   _bin("oplus", _un("double", U), _un("double", V)))
        ax += _leq("5.b", _un("jstar", _bin("oplus", U, V)),
                   _bin("oplus", _un("jstar", U), V))
        ax += _leq("5.c", _un("alpha", _bin("oplus", U, V)),
                   _bin("oplus", _un("alpha", U), _un("double", V)))
        ax += six()
        if theory == "Tinv":
            ax += _leq("inv", V, _bin("ominus", one, _bin("ominus", one, V)))
        return ax
    if theory == "Tint" or theory == "Tclass":
        ax += base_lattice() + adjunctions()
        ax += _leq("4.a.1", _un("double", V), _bin("oplus", V, V))
        ax += _leq("4.a.2'", _bin("oplus", V, V), _un("double", V))
        ax += four_common()
        ax += _leq("5.b", _un("jstar", _bin("oplus", U, V)),
                   _bin("oplus", _un("jstar", U), V))
        ax += _leq("5.c", _un("alpha", _bin("oplus", U, V)),
                   _bin("oplus", _un("alpha", U), _un("double", V)))
        ax += six()
        if theory == "Tclass":
            ax += _leq("inv", V, _bin("ominus", one, _bin("ominus", one, V)))
        return ax
    if theory == "Tc":
        a, b, c = FAtom("a"), FAtom("b"), FAtom("c")
        neg = lambda t: _bin("ominus", one, t)
        ax += _leq("A1", _bin("ominus", a, b), a)
        ax += _leq("A2", _bin("ominus", _bin("ominus", c, a),
                              _bin("ominus", c, b)), _bin("ominus", b, a))
        ax += _leq("A3", _bin("meet", a, b), _bin("meet", b, a))
        ax += _leq("A4", _bin("ominus", a, b),
                   _bin("ominus", neg(b), neg(a)))
        ax += _leq("A5", _un("half", a), _bin("ominus", a, _un("half", a)))
        ax += _leq("A6", _bin("ominus", a, _un("half", a)), _un("half", a))
        return ax
    if theory in ("T0", "T1"):
        return _t01_axioms(theory, n_cap, dyadics)
    raise SemanticsError(f"unknown theory {theory!r}")


def _t01_axioms(theory: str, n_cap: int, dyadics):
    zero, one = _c(Dyadic(0)), _c(Dyadic(1))
    ell = lambda t: _un("ell", t)
    ax = []
    ax += _eq("1 comm", _bin("oplus", U, V), _bin("oplus", V, U))
    ax += _eq("1 assoc", _bin("oplus", _bin("oplus", U, V), W),
              _bin("oplus", U, _bin("oplus", V, W)))
    ax += _eq("1 unit", _bin("oplus", V, zero), V)
    ax += _leq("1 bounds", zero, V) + _leq("1 top", V, one)
    ax.append(AxiomSchema(
        "1 residuation", "iff",
        pairs=((W, _bin("oplus", U, V)), (_bin("ominus", W, V), U))))
    ax.append(AxiomSchema("2 monotone l/l*", "mono", ops=("ell", "ellstar")))
    ax += _leq("3.d.1", V, ell(_un("ellstar", V)))
    ax += _leq("3.d.2", _un("ellstar", ell(V)), V)
    for d in dyadics:
        ax += _eq(f"4.d l d={d}",
                  ell(_bin("oplus", _c(d), ell(V))),
                  _bin("oplus", _c(dy.ONE) if d == dy.ONE else zero, ell(V)))
    for d in dyadics[:4]:
        for d2 in dyadics[:4]:
            s = dy.add_trunc(d, d2)
            ax += _eq(f"4.e d={d},{d2}",
                      _bin("oplus", _c(d), _c(d2)), _c(s))
    ax += _eq("5.d", ell(_bin("oplus", ell(U), ell(V))),
              _bin("oplus", ell(U), ell(V)))
    for d in dyadics:
        ax += _leq(f"6.c d={d}", V,
                   _bin("oplus", _c(d), ell(_bin("oplus", V, _c(dy.ONE - d)))))
    for n in range(min(n_cap, 3) + 1):
        terms = []
        for k in range(1, 2 ** (n + 1)):
            dd = Dyadic(k - 1, 2 ** (n + 1))
            terms.append(_bin("oplus", _c(dy.ONE - dd),
                              ell(_bin("oplus", V, _c(dd)))))
        big = terms[0]
        for t in terms[1:]:
            big = _bin("meet", big, t)
        ax += _leq(f"6.d n={n}", big, _bin("oplus", V, _half_const(n)))
    if theory == "T0":
        return ax
    ax.append(AxiomSchema("2 monotone modal", "mono",
                          ops=("double", "half", "jstar", "jmap", "alpha",
                               "beta")))
    ax += _leq("3.a.1", _un("half", _un("double", V)), V)
    ax += _leq("3.a.2", V, _un("double", _un("half", V)))
    ax += _leq("3.b.1", _un("jmap", _un("jstar", V)), V)
    ax += _leq("3.b.2", V, _un("jstar", _un("jmap", V)))
    ax += _leq("3.c.1", V, _un("alpha", _un("beta", V)))
    ax += _leq("3.c.2", _un("beta", _un("alpha", V)), V)
    for d in dyadics[:5]:
        for opname, fn in (("2", dy.double), ("j*", dy.jstar),
                           ("al", dy.alpha)):
            op = {"2": "double", "j*": "jstar", "al": "alpha"}[opname]
            ax += _eq(f"4.{opname} d={d}",
                      _un(op, _bin("oplus", _c(d), ell(V))),
                      _bin("oplus", _c(fn(d)), ell(V)))
    return ax


THEORIES = ("T", "T0", "T1", "Tint", "Tinv", "Tclass", "Tc")


@dataclass
class AxiomReport:
    theory: str
    lattice: str
    results: list = field(default_factory=list)  # (name, ok, witness|None)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.results)

    def lines(self):
        out = []
        for name, ok, witness in self.results:
            status = "PASS" if ok else "FAIL"
            line = f"{status} {self.theory}/{self.lattice} {name}"
            if witness is not None:
                line += f"  witness: {witness}"
            out.append(line)
        n_fail = sum(1 for _, ok, _ in self.results if not ok)
        out.append(f"summary theory={self.theory} lattice={self.lattice} "
                   f"axioms={len(self.results)} failed={n_fail}")
        return out


def axiom_suite(theory: str, lat, spec: SamplerSpec,
                n_cap: int = 4) -> AxiomReport:
    """Check every axiom schema of the theory on sampled valuations."""
    report = AxiomReport(theory, lat.name)
    schemas = theory_axioms(theory, n_cap)
    vals = list(valuations(["a", "b", "c", "u", "v", "w"], lat, spec))
    for schema in schemas:
        witness = None
        ok = True
        for v in vals:
            if not schema.check(v):
                ok = False
                witness = str(v)
                break
        report.results.append((schema.name, ok, witness))
    return report


# ------------------------------------------------------ embedding checks

def embedding_checks(lat, spec: SamplerSpec):
    """Indicator and constant embeddings preserve their operations;
    exhaustive over lattice elements and the dyadic grid."""
    failures = []
    ind = lambda u: sf.indicator(lat, u)
    for u in lat.elements:
        for v in lat.elements:
            cases = [
                ("0_U + 0_V = 0_{U*V}", sf.oplus(ind(u), ind(v)),
                 ind(lat.otimes(u, v))),
                ("0_U - 0_V = 0_{V->U}", sf.ominus(ind(u), ind(v)),
                 ind(lat.residual(v, u))),
                ("indicator meet", sf.lattice_pointwise("meet", ind(u), ind(v)),
                 ind(lat.join(u, v))),
                ("indicator join", sf.lattice_pointwise("join", ind(u), ind(v)),
                 ind(lat.meet(u, v))),
            ]
            for name, got, want in cases:
                if got != want:
                    failures.append(f"{name} at U={u} V={v}")
            if sf.leq(ind(u), ind(v)) != lat.leq(v, u):
                failures.append(f"indicator order at U={u} V={v}")
    pts = dy.grid(spec.grid_exponent)
    con = lambda p: sf.constant(lat, p)
    for p in pts:
        for q in pts:
            cases = [
                ("p + q", sf.oplus(con(p), con(q)), con(dy.add_trunc(p, q))),
                ("p - q", sf.ominus(con(p), con(q)), con(dy.sub_trunc(p, q))),
                ("p * q = max", sf.lattice_pointwise("otimes", con(p), con(q)),
                 con(max(p, q))),
                ("p meet q = min", sf.lattice_pointwise("meet", con(p), con(q)),
                 con(min(p, q))),
            ]
            for name, got, want in cases:
                if got != want:
                    failures.append(f"constant {name} at p={p} q={q}")
        for name, op, fn in (("2", "double", dy.double), ("h", "half", dy.half),
                             ("j*", "jstar", dy.jstar), ("j", "jmap", dy.jmap)):
            got = sf.apply_unary(op, con(p))
            if got != con(fn(p)):
                failures.append(f"constant {name} at p={p}")
        for q in pts:
            if sf.leq(con(p), con(q)) != (p <= q):
                failures.append(f"constant order at p={p} q={q}")
    return failures
