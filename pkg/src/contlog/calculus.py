"""Rule schemes, the eight systems, proof checking and bounded search.

Sequents are matched modulo associativity, commutativity and unit of the
comma: structures are canonicalized into sorted comma multisets with
epsilon as the empty multiset, dyadic epsilons expanded per their official
notation, and (in involutive systems) negations pushed to the leaves.
The explicit exchange/associativity/unit rules are still registered so
hand-written proofs that use them check, but the search never needs them.

Backward search is iterative-deepening depth-first with a fixed rule
order (axioms, introduction rules, structure-shrinking structural rules,
then growing ones, cut last) and a per-branch set of visited sequents.
The infinitary rule 7.b is applied as a finitary family truncated at the
system's n_max; proofs that use it are reported as conditional.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dyadic import Dyadic
from . import syntax as sx
from .syntax import (FAtom, FBin, FConst, FUn, Formula, SComma, SEps, SLeaf,
                     SUn, Sequent, Structure, expand_eps,
                     involutive_normal_form)

D = Dyadic
HALF = Dyadic(1, 2)


class CalculusError(ValueError):
    pass


class UnknownRule(CalculusError):
    pass


class PatternMismatch(CalculusError):
    pass


class PremiseCountMismatch(CalculusError):
    pass


class CutUsedButDisallowed(CalculusError):
    pass


class NotAnalytic(CalculusError):
    pass


# ----------------------------------------------------------- system ids

@dataclass(frozen=True)
class SystemId:
    name: str
    allow_cut: bool = False
    n_max: int = 3

    def __post_init__(self):
        if self.name not in sx.SYSTEM_NAMES:
            raise CalculusError(f"unknown system {self.name!r}")

    @property
    def involutive(self) -> bool:
        return self.name in sx.INVOLUTIVE_SYSTEMS

    @property
    def single_negation(self) -> bool:
        return self.involutive and self.name != "inmgl"


def system(name: str, allow_cut: bool = False, n_max: int = 3) -> SystemId:
    return SystemId(name, allow_cut, n_max)


# ------------------------------------------------- pattern variable nodes

@dataclass(frozen=True)
class FVar(Formula):
    name: str


@dataclass(frozen=True)
class SVar(Structure):
    name: str


@dataclass(frozen=True)
class SNegVar(Structure):
    """A negated structure variable in a rule pattern; matches any part X
    and binds the variable to the inverse negation of X."""
    mark: str
    name: str


@dataclass(frozen=True)
class SCtx(Structure):
    """The context hole: matches any position, binding the shared context."""
    inner: Structure


# -------------------------------------------------------- canonical form
#
# Canonical nodes carry a precomputed structural key (used for equality,
# hashing and deterministic ordering), a variable flag and a weight; these
# sit on the innermost loops of matching and search.

def formula_key(f) -> str:
    if isinstance(f, FAtom):
        return f.name
    if isinstance(f, FConst):
        return f"d{f.value}"
    if isinstance(f, FUn):
        return f"{f.op}({formula_key(f.arg)})"
    if isinstance(f, FBin):
        return f"{f.op}({formula_key(f.left)},{formula_key(f.right)})"
    if isinstance(f, FVar):
        return f"?{f.name}"
    raise TypeError(f"not a formula: {f!r}")


def _formula_weight(f) -> int:
    if isinstance(f, FUn):
        return 1 + _formula_weight(f.arg)
    if isinstance(f, FBin):
        return 1 + _formula_weight(f.left) + _formula_weight(f.right)
    return 1


def _formula_has_vars(f) -> bool:
    if isinstance(f, FVar):
        return True
    if isinstance(f, FUn):
        return _formula_has_vars(f.arg)
    if isinstance(f, FBin):
        return _formula_has_vars(f.left) or _formula_has_vars(f.right)
    return False


class _CNode:
    __slots__ = ("skey", "has_vars", "weight")

    def __eq__(self, other):
        return isinstance(other, _CNode) and self.skey == other.skey

    def __hash__(self):
        return hash(self.skey)

    def __repr__(self):
        return self.skey


class CMulti(_CNode):
    __slots__ = ("items",)

    def __init__(self, items):
        self.items = items
        self.skey = "M(" + ",".join(it.skey for it in items) + ")"
        self.has_vars = any(it.has_vars for it in items)
        self.weight = 1 + sum(it.weight for it in items)


class CUn(_CNode):
    __slots__ = ("op", "arg")

    def __init__(self, op, arg):
        self.op = op
        self.arg = arg
        self.skey = f"U{op}({arg.skey})"
        self.has_vars = arg.has_vars
        self.weight = 1 + arg.weight


class CLeaf(_CNode):
    __slots__ = ("formula",)

    def __init__(self, formula):
        self.formula = formula
        self.skey = f"L({formula_key(formula)})"
        self.has_vars = _formula_has_vars(formula)
        self.weight = 1 + _formula_weight(formula)


class CVarN(_CNode):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name
        self.skey = f"V({name})"
        self.has_vars = True
        self.weight = 1


class CNegVarN(_CNode):
    __slots__ = ("mark", "name")

    def __init__(self, mark, name):
        self.mark = mark
        self.name = name
        self.skey = f"N{mark}({name})"
        self.has_vars = True
        self.weight = 1


class CCtxN(_CNode):
    __slots__ = ("inner",)

    def __init__(self, inner):
        self.inner = inner
        self.skey = f"C({inner.skey})"
        self.has_vars = True
        self.weight = 1 + inner.weight


EPS_C = CMulti(())


def _ckey(node) -> str:
    return node.skey


def _mk_multi(items) -> object:
    flat = []
    for it in items:
        if isinstance(it, CMulti):
            flat.extend(it.items)
        else:
            flat.append(it)
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=_ckey)
    return CMulti(tuple(flat))


def canon_struct(s: Structure, sysid: SystemId | None):
    """Canonical matching form: eps_d expanded, commas flattened and
    sorted with eps absorbed, negations normalized for involutive systems."""
    if sysid is not None and sysid.involutive:
        s = involutive_normal_form(s, identify=sysid.single_negation)
    return _canon(s)


def _canon(s: Structure):
    if isinstance(s, SLeaf):
        return CLeaf(s.formula)
    if isinstance(s, SEps):
        if s.value == D(0):
            return EPS_C
        return _canon(expand_eps(s.value))
    if isinstance(s, SComma):
        return _mk_multi([_canon(s.left), _canon(s.right)])
    if isinstance(s, SUn):
        return CUn(s.op, _canon(s.arg))
    if isinstance(s, SVar):
        return CVarN(s.name)
    if isinstance(s, SNegVar):
        return CNegVarN(s.mark, s.name)
    if isinstance(s, SCtx):
        return CCtxN(_canon(s.inner))
    raise TypeError(f"not a structure: {s!r}")


def uncanon(node) -> Structure:
    if isinstance(node, CLeaf):
        return SLeaf(node.formula)
    if isinstance(node, CMulti):
        if not node.items:
            return sx.EPS
        out = uncanon(node.items[0])
        for it in node.items[1:]:
            out = SComma(out, uncanon(it))
        return out
    if isinstance(node, CUn):
        return SUn(node.op, uncanon(node.arg))
    raise TypeError(f"cannot print pattern node {node!r}")


@dataclass(frozen=True)
class CSeq:
    lhs: object
    rhs: object  # Formula (one-sided) or canonical node (involutive)


def _expand_consts_formula(f: Formula) -> Formula:
    # dyadic constants other than 0 are official abbreviations; the rules
    # only know their expansions
    if isinstance(f, FConst):
        return f if f.value == D(0) else sx.expand_dyadic_formula(f.value)
    if isinstance(f, FUn):
        return FUn(f.op, _expand_consts_formula(f.arg))
    if isinstance(f, FBin):
        return FBin(f.op, _expand_consts_formula(f.left),
                    _expand_consts_formula(f.right))
    return f


def _expand_consts_struct(s: Structure) -> Structure:
    if isinstance(s, SLeaf):
        return SLeaf(_expand_consts_formula(s.formula))
    if isinstance(s, SUn):
        return SUn(s.op, _expand_consts_struct(s.arg))
    if isinstance(s, SComma):
        return SComma(_expand_consts_struct(s.left),
                      _expand_consts_struct(s.right))
    return s


def canon_sequent(seq: Sequent, sysid: SystemId) -> CSeq:
    lhs = canon_struct(_expand_consts_struct(seq.lhs), sysid)
    if sysid.involutive:
        if not isinstance(seq.rhs, Structure):
            raise CalculusError("involutive sequents take a structure rhs")
        return CSeq(lhs, canon_struct(_expand_consts_struct(seq.rhs), sysid))
    if isinstance(seq.rhs, Structure):
        raise CalculusError(f"system {sysid.name} takes a formula rhs")
    return CSeq(lhs, _expand_consts_formula(seq.rhs))


def uncanon_sequent(cs: CSeq, sysid: SystemId) -> Sequent:
    rhs = uncanon(cs.rhs) if not isinstance(cs.rhs, Formula) else cs.rhs
    return Sequent(uncanon(cs.lhs), rhs, sysid.name)


def sequent_key(cs: CSeq) -> str:
    rhs = (formula_key(cs.rhs) if isinstance(cs.rhs, Formula)
           else cs.rhs.skey)
    return cs.lhs.skey + " |- " + rhs


# ---------------------------------------------------------------- matching

def _apply_mark(node, mark: str, single: bool):
    s = uncanon(node)
    return _canon(involutive_normal_form(SUn(mark, s), identify=single))


def match_formula(pat: Formula, subj: Formula, bnd: dict):
    if isinstance(pat, FVar):
        seen = bnd.get(("F", pat.name))
        if seen is None:
            b2 = dict(bnd)
            b2[("F", pat.name)] = subj
            yield b2
        elif seen == subj:
            yield bnd
        return
    if isinstance(pat, FAtom) or isinstance(pat, FConst):
        if pat == subj:
            yield bnd
        return
    if isinstance(pat, FUn) and isinstance(subj, FUn) and pat.op == subj.op:
        yield from match_formula(pat.arg, subj.arg, bnd)
        return
    if isinstance(pat, FBin) and isinstance(subj, FBin) and pat.op == subj.op:
        for b2 in match_formula(pat.left, subj.left, bnd):
            yield from match_formula(pat.right, subj.right, b2)


def match_node(pat, subj, bnd: dict, single: bool):
    if isinstance(pat, CVarN):
        seen = bnd.get(("S", pat.name))
        if seen is None:
            b2 = dict(bnd)
            b2[("S", pat.name)] = subj
            yield b2
        elif seen == subj:
            yield bnd
        return
    if isinstance(pat, CNegVarN):
        inverse = "sneg" if pat.mark == "sim" else "sim"
        bound = _apply_mark(subj, inverse, single)
        seen = bnd.get(("S", pat.name))
        if seen is None:
            b2 = dict(bnd)
            b2[("S", pat.name)] = bound
            yield b2
        elif seen == bound:
            yield bnd
        return
    if isinstance(pat, CLeaf):
        if isinstance(subj, CLeaf):
            yield from match_formula(pat.formula, subj.formula, bnd)
        return
    if isinstance(pat, CUn):
        if isinstance(subj, CUn) and subj.op == pat.op:
            yield from match_node(pat.arg, subj.arg, bnd, single)
        return
    if isinstance(pat, CMulti):
        subj_items = list(subj.items) if isinstance(subj, CMulti) else [subj]
        yield from _match_multi(list(pat.items), subj_items, bnd, single)
        return
    raise TypeError(f"bad pattern node {pat!r}")


def _match_multi(pitems, sitems, bnd, single):
    # fully concrete pattern items must occur literally; consume them by
    # multiset counting so repeated epsilon expansions do not explode
    concrete = [p for p in pitems if not p.has_vars]
    if concrete:
        pool = list(sitems)
        for c in concrete:
            try:
                pool.remove(c)
            except ValueError:
                return
        pitems = [p for p in pitems if p.has_vars]
        sitems = pool
    yield from _match_multi_vars(pitems, sitems, bnd, single)


def _match_multi_vars(pitems, sitems, bnd, single):
    if not pitems:
        if not sitems:
            yield bnd
        return
    pat = pitems[0]
    rest = pitems[1:]
    if isinstance(pat, (CVarN, CNegVarN)):
        # a variable absorbs any sub-multiset, including the empty one;
        # equal choices are deduplicated by value
        n = len(sitems)
        seen = set()
        for mask in range(1 << n):
            taken = [sitems[i] for i in range(n) if mask >> i & 1]
            left = tuple(sorted((sitems[i] for i in range(n)
                                 if not mask >> i & 1), key=_ckey))
            part = _mk_multi(taken)
            sig = (_ckey(part), left)
            if sig in seen:
                continue
            seen.add(sig)
            for b2 in match_node(pat, part, bnd, single):
                yield from _match_multi_vars(rest, list(left), b2, single)
        return
    seen = set()
    for i, s in enumerate(sitems):
        k = _ckey(s)
        if k in seen:
            continue
        seen.add(k)
        for b2 in match_node(pat, s, bnd, single):
            yield from _match_multi_vars(rest, sitems[:i] + sitems[i + 1:],
                                         b2, single)


def subst_formula(pat: Formula, bnd: dict) -> Formula:
    if isinstance(pat, FVar):
        return bnd[("F", pat.name)]
    if isinstance(pat, (FAtom, FConst)):
        return pat
    if isinstance(pat, FUn):
        return FUn(pat.op, subst_formula(pat.arg, bnd))
    if isinstance(pat, FBin):
        return FBin(pat.op, subst_formula(pat.left, bnd),
                    subst_formula(pat.right, bnd))
    raise TypeError(f"bad formula pattern {pat!r}")


def subst_node(pat, bnd: dict, single: bool):
    if isinstance(pat, CVarN):
        return bnd[("S", pat.name)]
    if isinstance(pat, CNegVarN):
        return _apply_mark(bnd[("S", pat.name)], pat.mark, single)
    if isinstance(pat, CLeaf):
        return CLeaf(subst_formula(pat.formula, bnd))
    if isinstance(pat, CUn):
        return CUn(pat.op, subst_node(pat.arg, bnd, single))
    if isinstance(pat, CMulti):
        return _mk_multi([subst_node(it, bnd, single) for it in pat.items])
    raise TypeError(f"bad pattern node {pat!r}")


def _positions(node):
    """All (context builder, sub-part) pairs of a canonical node; a context
    builder maps a replacement part back into the whole structure."""
    yield (lambda repl: repl), node
    if isinstance(node, CUn):
        for cb, part in _positions(node.arg):
            yield (lambda repl, cb=cb, op=node.op: CUn(op, cb(repl))), part
    elif isinstance(node, CMulti):
        items = node.items
        n = len(items)
        # proper nonempty sub-multisets
        if n > 1:
            for mask in range(1, (1 << n) - 1):
                taken = [items[i] for i in range(n) if mask >> i & 1]
                rest = [items[i] for i in range(n) if not mask >> i & 1]
                part = _mk_multi(taken)
                yield (lambda repl, rest=tuple(rest):
                       _mk_multi(list(rest) + [repl])), part
        for i, item in enumerate(items):
            others = items[:i] + items[i + 1:]
            for cb, part in _positions(item):
                if part == item:
                    continue  # already covered by the sub-multiset case
                yield (lambda repl, cb=cb, others=tuple(others):
                       _mk_multi(list(others) + [cb(repl)])), part


# ------------------------------------------------------------ rule scheme

@dataclass
class RuleScheme:
    name: str
    premises: list          # list of (lhs pattern, rhs pattern)
    conclusion: tuple       # (lhs pattern, rhs pattern)
    kind: str               # axiom | intro | shrink | grow | cut
    contextual: bool = False
    params: dict = field(default_factory=dict)
    search: bool = True     # exchange-style rules are skipped in search
    conditional: bool = False  # truncated infinitary family

    def display(self) -> str:
        ps = "".join(f"@{k}={v}" for k, v in sorted(self.params.items()))
        return self.name + ps


def _backward_matches(rule: RuleScheme, goal: CSeq, single: bool):
    """Yield premise lists for applying `rule` backward to `goal`."""
    clhs, crhs = rule.conclusion
    rhs_bindings = []
    if isinstance(crhs, Formula):
        if not isinstance(goal.rhs, Formula):
            return
        rhs_bindings = list(match_formula(crhs, goal.rhs, {}))
    else:
        if isinstance(goal.rhs, Formula):
            return
        rhs_bindings = list(match_node(crhs, goal.rhs, {}, single))
    if not rhs_bindings:
        return
    if rule.contextual:
        ctx_inner = clhs.inner
        for cb, part in _positions(goal.lhs):
            for bnd0 in rhs_bindings:
                for bnd in match_node(ctx_inner, part, bnd0, single):
                    prems = []
                    for plhs, prhs in rule.premises:
                        if isinstance(plhs, CCtxN):
                            new_lhs = cb(subst_node(plhs.inner, bnd, single))
                        else:
                            new_lhs = subst_node(plhs, bnd, single)
                        new_rhs = (subst_formula(prhs, bnd)
                                   if isinstance(prhs, Formula)
                                   else subst_node(prhs, bnd, single))
                        prems.append(CSeq(new_lhs, new_rhs))
                    yield prems
    else:
        for bnd0 in rhs_bindings:
            for bnd in match_node(clhs, goal.lhs, bnd0, single):
                prems = []
                for plhs, prhs in rule.premises:
                    new_lhs = subst_node(plhs, bnd, single)
                    new_rhs = (subst_formula(prhs, bnd)
                               if isinstance(prhs, Formula)
                               else subst_node(prhs, bnd, single))
                    prems.append(CSeq(new_lhs, new_rhs))
                yield prems


# ---------------------------------------------------------- rule builders

def _sv(n):
    return SVar(n)


def _fv(n):
    return FVar(n)


def _lf(f):
    return SLeaf(f)


def _cm(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = SComma(out, p)
    return out


def _ctx(inner):
    return SCtx(inner)


def _c(pat, single=False):
    """Canonicalize a rule pattern (variables pass through)."""
    if isinstance(pat, SCtx):
        return CCtxN(_canon(pat.inner))
    return _canon(pat)


def _rule(name, kind, premises, conclusion, contextual=False, params=None,
          search=True, conditional=False):
    prems = [(_c(pl), pr if isinstance(pr, Formula) else _c(pr))
             for pl, pr in premises]
    cl, cr = conclusion
    concl = (_c(cl), cr if isinstance(cr, Formula) else _c(cr))
    return RuleScheme(name, prems, concl, kind, contextual,
                      params or {}, search, conditional)


def _eps_d(d) -> Structure:
    return SEps(d)


def _gl_rules():
    A, B, C = _fv("A"), _fv("B"), _fv("C")
    g, d = _sv("g"), _sv("d")
    return [
        _rule("Id", "axiom", [], (_lf(A), A)),
        _rule("R0", "axiom", [], (sx.EPS, FConst(D(0)))),
        _rule("L0", "intro", [(_ctx(sx.EPS), A)],
              (_ctx(_lf(FConst(D(0)))), A), contextual=True),
        _rule("L+", "intro", [(_ctx(_cm(_lf(A), _lf(B))), C)],
              (_ctx(_lf(FBin("oplus", A, B))), C), contextual=True),
        _rule("R+", "intro", [(g, A), (d, B)],
              (_cm(g, d), FBin("oplus", A, B))),
        _rule("L-", "intro", [(_ctx(_lf(B)), C), (g, A)],
              (_ctx(_cm(_lf(FBin("ominus", B, A)), g)), C), contextual=True),
        _rule("R-", "intro", [(_cm(g, _lf(A)), B)],
              (g, FBin("ominus", B, A))),
        _rule("Lmeet", "intro",
              [(_ctx(_lf(A)), C), (_ctx(_lf(B)), C)],
              (_ctx(_lf(FBin("meet", A, B))), C), contextual=True),
        _rule("Rmeet1", "intro", [(g, A)], (g, FBin("meet", A, B))),
        _rule("Rmeet2", "intro", [(g, B)], (g, FBin("meet", A, B))),
        _rule("Ljoin1", "intro", [(_ctx(_lf(A)), C)],
              (_ctx(_lf(FBin("join", A, B))), C), contextual=True),
        _rule("Ljoin2", "intro", [(_ctx(_lf(B)), C)],
              (_ctx(_lf(FBin("join", A, B))), C), contextual=True),
        _rule("Rjoin", "intro", [(g, A), (g, B)], (g, FBin("join", A, B))),
    ]


def _mgl_modal_rules():
    A, B = _fv("A"), _fv("B")
    g = _sv("g")
    out = []
    for mod, pos_op, neg_op in (("o2", "double", "half"),
                                ("b2", "jstar", "jmap"),
                                ("oa", "alpha", "beta")):
        tag = {"o2": "2", "b2": "j*", "oa": "al"}[mod]
        ntag = {"o2": "h", "b2": "j", "oa": "bx"}[mod]
        out.extend([
            _rule(f"L{tag}", "intro", [(_ctx(SUn(mod, _lf(A))), B)],
                  (_ctx(_lf(FUn(pos_op, A))), B), contextual=True),
            _rule(f"R{tag}", "intro", [(g, A)], (SUn(mod, g), FUn(pos_op, A))),
            _rule(f"L{ntag}", "intro", [(_ctx(_lf(A)), B)],
                  (_ctx(SUn(mod, _lf(FUn(neg_op, A)))), B), contextual=True),
            _rule(f"R{ntag}", "intro", [(SUn(mod, g), A)],
                  (g, FUn(neg_op, A))),
        ])
    return out


def _cfl_structural_rules(n_max: int, ljk: bool):
    A = _fv("A")
    g, d, p = _sv("g"), _sv("d"), _sv("p")
    eps_half = _eps_d(HALF)
    rules = [
        _rule("1.b.a", "shrink", [(_ctx(_cm(g, d)), A)],
              (_ctx(_cm(d, g)), A), contextual=True, search=False),
        _rule("1.b.b", "shrink", [(_ctx(_cm(g, SComma(d, p))), A)],
              (_ctx(_cm(SComma(g, d), p)), A), contextual=True, search=False),
        _rule("1.b.c", "shrink", [(_ctx(_cm(sx.EPS, g)), A)],
              (_ctx(g), A), contextual=True, search=False),
        _rule("w", "shrink", [(_ctx(sx.EPS), A)],
              (_ctx(g), A), contextual=True),
        _rule("top-ax", "axiom", [], (expand_eps(D(1)), A)),
        _rule("4.c.1", "shrink", [(_ctx(g), A)],
              (_ctx(SUn("o2", g)), A), contextual=True),
        _rule("4.c.2", "shrink", [(_ctx(g), A)],
              (_ctx(SUn("b2", g)), A), contextual=True),
        _rule("4.a.1", "grow", [(_ctx(SUn("o2", g)), A),
                                (_ctx(SUn("o2", d)), A)],
              (_ctx(_cm(g, d)), A), contextual=True),
        _rule("4.b.1", "shrink", [(_ctx(SUn("b2", SUn("o2", g))), A)],
              (_ctx(_cm(g, eps_half)), A), contextual=True),
        _rule("4.b.2", "shrink", [(_ctx(_cm(g, eps_half)), A)],
              (_ctx(SUn("b2", SUn("o2", g))), A), contextual=True),
        _rule("5.b", "shrink", [(_ctx(SUn("b2", _cm(g, d))), A)],
              (_ctx(_cm(SUn("b2", g), d)), A), contextual=True),
        _rule("5.c", "shrink", [(_ctx(SUn("oa", _cm(g, d))), A)],
              (_ctx(_cm(SUn("oa", g), SUn("o2", d))), A), contextual=True),
        _rule("4.d.1a", "shrink", [(_ctx(g), A)],
              (_ctx(SUn("oa", SUn("o2", g))), A), contextual=True),
        _rule("4.d.1b", "shrink", [(_ctx(g), A)],
              (_ctx(SUn("oa", SUn("b2", g))), A), contextual=True),
        _rule("4.d.2", "grow", [(_ctx(SUn("oa", SUn("o2", g))), A),
                                (_ctx(SUn("oa", SUn("b2", g))), A)],
              (_ctx(g), A), contextual=True),
        _rule("4.e.2a", "shrink", [(_ctx(g), A)],
              (_ctx(SUn("o2", SUn("oa", g))), A), contextual=True),
        _rule("4.e.2b", "shrink", [(_ctx(g), A)],
              (_ctx(SUn("b2", SUn("oa", g))), A), contextual=True),
        _rule("4.e.1", "grow", [(_ctx(SUn("o2", SUn("oa", g))), A),
                                (_ctx(SUn("b2", SUn("oa", g))), A)],
              (_ctx(g), A), contextual=True),
    ]
    if ljk:
        rules.append(_rule("4.a.2'", "grow", [(_ctx(_cm(g, g)), A)],
                           (_ctx(SUn("o2", g)), A), contextual=True))
    else:
        rules.append(_rule("5.a", "shrink", [(_ctx(SUn("o2", _cm(g, d))), A)],
                           (_ctx(_cm(SUn("o2", g), SUn("o2", d))), A),
                           contextual=True))
        rules.append(_rule("4.a.2", "shrink",
                           [(_ctx(_cm(SUn("o2", g), SUn("o2", d))), A)],
                           (_ctx(SUn("o2", _cm(g, d))), A), contextual=True))
    # parameterized families
    for n in range(n_max + 1):
        for k in range(2 ** n_max + 1):
            dd = D(k, 2 ** n_max)
            body = _cm(g, _eps_d(D(1) - dd)) if dd != D(1) else g
            inner = body
            for _ in range(n):
                inner = SUn("oa", inner)
            concl = _cm(_eps_d(dd), inner) if dd != D(0) else inner
            rules.append(_rule("6.a", "shrink", [(_ctx(g), A)],
                               (_ctx(concl), A), contextual=True,
                               params={"n": n, "d": str(dd)}))
    for n in range(2, n_max + 1):
        small = _eps_d(D(1, 2 ** n))
        rules.append(_rule("4.g", "grow",
                           [(_ctx(_cm(small, small)), A)],
                           (_ctx(_eps_d(D(1, 2 ** (n - 1)))), A),
                           contextual=True, params={"n": n}))
    for n in range(n_max + 1):
        prems = []
        for k in range(1, 2 ** (n + 1) - 1):
            dd = D(k, 2 ** (n + 1))
            inner = _cm(g, _eps_d(dd))
            for _ in range(n + 1):
                inner = SUn("oa", inner)
            prems.append((_ctx(_cm(_eps_d(D(1) - dd), inner)), A))
        rules.append(_rule("6.b", "grow", prems,
                           (_ctx(_cm(g, _eps_d(D(1, 2 ** n)))), A),
                           contextual=True, params={"n": n}))
    prems = [(_ctx(_eps_d(D(1, 2 ** n))), A) for n in range(n_max + 1)]
    rules.append(_rule("7.b", "grow", prems, (_ctx(sx.EPS), A),
                       contextual=True, conditional=True))
    return rules


def _ingl_rules(single: bool):
    A, B = _fv("A"), _fv("B")
    g, d, b = _sv("g"), _sv("d"), _sv("b")
    T = _sv("T")
    neg_mark = "sneg"
    sim_mark = "sneg" if single else "sim"
    rules = [
        _rule("Id", "axiom", [], (_lf(A), _lf(A))),
        _rule("R0", "axiom", [], (g, _lf(FConst(D(0))))),
        _rule("L0", "intro", [(sx.EPS, T)], (_lf(FConst(D(0))), T)),
        _rule("L+", "intro", [(_cm(_lf(A), _lf(B)), T)],
              (_lf(FBin("oplus", A, B)), T)),
        _rule("R+", "intro", [(g, _lf(A)), (d, _lf(B))],
              (_cm(g, d), _lf(FBin("oplus", A, B)))),
        _rule("Lmeet", "intro", [(_lf(A), T), (_lf(B), T)],
              (_lf(FBin("meet", A, B)), T)),
        _rule("Rmeet1", "intro", [(g, _lf(A))], (g, _lf(FBin("meet", A, B)))),
        _rule("Rmeet2", "intro", [(g, _lf(B))], (g, _lf(FBin("meet", A, B)))),
        _rule("Ljoin1", "intro", [(_lf(A), T)], (_lf(FBin("join", A, B)), T)),
        _rule("Ljoin2", "intro", [(_lf(B), T)], (_lf(FBin("join", A, B)), T)),
        _rule("Rjoin", "intro", [(g, _lf(A)), (g, _lf(B))],
              (g, _lf(FBin("join", A, B)))),
        _rule("negL", "shrink", [(_cm(g, d), b)],
              (d, _cm(SNegVar(sim_mark, "g"), b))),
        _rule("negR", "shrink", [(_cm(g, d), b)],
              (g, _cm(b, SNegVar(neg_mark, "d")))),
        # display-postulate converses: the rotations are equivalences in
        # the sequent space, and the derived rules of the annex (for
        # instance sim/neg exchange) are only derivable with them
        _rule("negL'", "shrink", [(d, _cm(SNegVar(sim_mark, "g"), b))],
              (_cm(g, d), b)),
        _rule("negR'", "shrink", [(g, _cm(b, SNegVar(neg_mark, "d")))],
              (_cm(g, d), b)),
        _rule("L!", "intro", [(SUn(neg_mark, _lf(A)), T)],
              (_lf(FUn("neg", A)), T)),
        _rule("R!", "intro", [(g, SUn(neg_mark, _lf(A)))],
              (g, _lf(FUn("neg", A)))),
    ]
    return rules


def _inmgl_modal_rules(single: bool):
    A = _fv("A")
    g = _sv("g")
    T = _sv("T")
    rules = [
        _rule("L2", "intro", [(SUn("o2", _lf(A)), T)],
              (_lf(FUn("double", A)), T)),
        _rule("R2", "intro", [(g, _lf(A))], (SUn("o2", g), _lf(FUn("double", A)))),
        _rule("Lj*", "intro", [(SUn("b2", _lf(A)), T)],
              (_lf(FUn("jstar", A)), T)),
        _rule("Rj*", "intro", [(g, _lf(A))],
              (SUn("b2", g), _lf(FUn("jstar", A)))),
        _rule("o2/b2", "shrink", [(SUn("o2", g), T)], (g, SUn("b2", T))),
        _rule("Lal", "intro", [(SUn("oa", _lf(A)), T)],
              (_lf(FUn("alpha", A)), T)),
        _rule("Ral", "intro", [(g, _lf(A))], (SUn("oa", g), _lf(FUn("alpha", A)))),
    ]
    if single:
        rules.append(_rule("oa/oa", "shrink", [(SUn("oa", g), T)],
                           (g, SUn("oa", T))))
    else:
        rules.extend([
            _rule("oa/ba", "shrink", [(SUn("oa", g), T)], (g, SUn("ba", T))),
            _rule("Lal2", "intro", [(SUn("ba", _lf(A)), T)],
                  (_lf(FUn("alpha", A)), T)),
            _rule("Ral2", "intro", [(g, _lf(A))],
                  (SUn("ba", g), _lf(FUn("alpha", A)))),
            _rule("oa->ba", "shrink", [(SUn("oa", g), T)], (SUn("ba", g), T)),
        ])
    return rules


def _incfl_structural_rules(n_max: int, ljk: bool):
    g, d, p = _sv("g"), _sv("d"), _sv("p")
    T = _sv("T")
    eps_half = _eps_d(HALF)
    rules = [
        _rule("1.b.a", "shrink", [(_cm(g, d), T)], (_cm(d, g), T),
              search=False),
        _rule("1.b.b", "shrink", [(_cm(g, SComma(d, p)), T)],
              (_cm(SComma(g, d), p), T), search=False),
        _rule("1.b.c", "shrink", [(_cm(sx.EPS, g), T)], (g, T), search=False),
        _rule("w", "shrink", [(sx.EPS, T)], (g, T)),
        _rule("top-ax", "axiom", [], (expand_eps(D(1)), T)),
        _rule("4.c.1", "shrink", [(g, T)], (SUn("o2", g), T)),
        _rule("4.c.2", "shrink", [(g, T)], (SUn("b2", g), T)),
        _rule("4.a.1", "grow", [(SUn("o2", g), T), (SUn("o2", d), T)],
              (_cm(g, d), T)),
        _rule("4.b.1", "shrink", [(SUn("b2", SUn("o2", g)), T)],
              (_cm(g, eps_half), T)),
        _rule("4.b.2", "shrink", [(_cm(g, eps_half), T)],
              (SUn("b2", SUn("o2", g)), T)),
        _rule("5.b", "shrink", [(SUn("b2", _cm(g, d)), T)],
              (_cm(SUn("b2", g), d), T)),
        _rule("5.c", "shrink", [(SUn("oa", _cm(g, d)), T)],
              (_cm(SUn("oa", g), SUn("o2", d)), T)),
        _rule("4.d.1a", "shrink", [(g, T)], (SUn("oa", SUn("o2", g)), T)),
        _rule("4.d.1b", "shrink", [(g, T)], (SUn("oa", SUn("b2", g)), T)),
        _rule("4.d.2", "grow", [(SUn("oa", SUn("o2", g)), T),
                                (SUn("oa", SUn("b2", g)), T)], (g, T)),
        _rule("4.e.2a", "shrink", [(g, T)], (SUn("o2", SUn("oa", g)), T)),
        _rule("4.e.2b", "shrink", [(g, T)], (SUn("b2", SUn("oa", g)), T)),
        _rule("4.e.1", "grow", [(SUn("o2", SUn("oa", g)), T),
                                (SUn("b2", SUn("oa", g)), T)], (g, T)),
    ]
    if ljk:
        rules.append(_rule("4.a.2'", "grow", [(_cm(g, g), T)],
                           (SUn("o2", g), T)))
    else:
        rules.append(_rule("5.a", "shrink", [(SUn("o2", _cm(g, d)), T)],
                           (_cm(SUn("o2", g), SUn("o2", d)), T)))
        rules.append(_rule("4.a.2", "shrink",
                           [(_cm(SUn("o2", g), SUn("o2", d)), T)],
                           (SUn("o2", _cm(g, d)), T)))
    for n in range(n_max + 1):
        for k in range(2 ** n_max + 1):
            dd = D(k, 2 ** n_max)
            body = _cm(g, _eps_d(D(1) - dd)) if dd != D(1) else g
            inner = body
            for _ in range(n):
                inner = SUn("oa", inner)
            concl = _cm(_eps_d(dd), inner) if dd != D(0) else inner
            rules.append(_rule("6.a", "shrink", [(g, T)], (concl, T),
                               params={"n": n, "d": str(dd)}))
    for n in range(2, n_max + 1):
        small = _eps_d(D(1, 2 ** n))
        rules.append(_rule("4.g", "grow", [(_cm(small, small), T)],
                           (_eps_d(D(1, 2 ** (n - 1))), T), params={"n": n}))
    for n in range(n_max + 1):
        prems = []
        for k in range(1, 2 ** (n + 1) - 1):
            dd = D(k, 2 ** (n + 1))
            inner = _cm(g, _eps_d(dd))
            for _ in range(n + 1):
                inner = SUn("oa", inner)
            prems.append((_cm(_eps_d(D(1) - dd), inner), T))
        rules.append(_rule("6.b", "grow", prems,
                           (_cm(g, _eps_d(D(1, 2 ** n))), T),
                           params={"n": n}))
    prems = [(_eps_d(D(1, 2 ** n)), T) for n in range(n_max + 1)]
    rules.append(_rule("7.b", "grow", prems, (sx.EPS, T), conditional=True))
    return rules


CUT_RULE_NAME = "cut"

_KIND_ORDER = {"axiom": 0, "intro": 1, "shrink": 2, "grow": 3, "cut": 4}


def rule_set(sysid: SystemId) -> list[RuleScheme]:
    """The rules of the named system, parameter families expanded."""
    name = sysid.name
    if name == "gl":
        rules = _gl_rules()
    elif name == "mgl":
        rules = _gl_rules() + _mgl_modal_rules()
    elif name == "cflew":
        rules = (_gl_rules() + _mgl_modal_rules()
                 + _cfl_structural_rules(sysid.n_max, ljk=False))
    elif name == "ljk":
        rules = (_gl_rules() + _mgl_modal_rules()
                 + _cfl_structural_rules(sysid.n_max, ljk=True))
    elif name == "ingl":
        rules = _ingl_rules(single=True)
    elif name == "inmgl":
        rules = _ingl_rules(single=False) + _inmgl_modal_rules(single=False)
    elif name == "incflew":
        rules = (_ingl_rules(single=True) + _inmgl_modal_rules(single=True)
                 + _incfl_structural_rules(sysid.n_max, ljk=False))
    elif name == "inljk":
        rules = (_ingl_rules(single=True) + _inmgl_modal_rules(single=True)
                 + _incfl_structural_rules(sysid.n_max, ljk=True))
    else:
        raise CalculusError(f"unknown system {name!r}")
    if sysid.allow_cut:
        rules.append(RuleScheme(CUT_RULE_NAME, [], None, "cut"))
    rules.sort(key=lambda r: _KIND_ORDER[r.kind])
    return rules


# -------------------------------------------------------------- proof trees

@dataclass
class ProofTree:
    conclusion: Sequent
    rule: str
    children: list
    params: dict = field(default_factory=dict)

    def uses_rule(self, name: str) -> bool:
        return self.rule == name or any(c.uses_rule(name)
                                        for c in self.children)

    def is_conditional(self) -> bool:
        """True when the truncated infinitary rule 7.b was applied."""
        return self.uses_rule("7.b")

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def to_sexpr(self) -> str:
        name = self.rule + "".join(f"@{k}={v}"
                                   for k, v in sorted(self.params.items()))
        parts = [name, f'"{sx.print_sequent(self.conclusion)}"']
        parts.extend(c.to_sexpr() for c in self.children)
        return "(" + " ".join(parts) + ")"


@dataclass
class NotFound:
    reason: str

    def __bool__(self):
        return False


def parse_proof_sexpr(text: str, sysname: str) -> ProofTree:
    """Proof files: `(RULE-NAME "sequent text" child ...)`."""
    tokens = re.findall(r'\(|\)|"[^"]*"|[^\s()"]+', text)
    pos = 0

    def walk():
        nonlocal pos
        if tokens[pos] != "(":
            raise CalculusError(f"expected ( at token {pos}")
        pos += 1
        name = tokens[pos]
        pos += 1
        params = {}
        if "@" in name:
            name, *opts = name.split("@")
            for opt in opts:
                k, v = opt.split("=", 1)
                params[k] = int(v) if v.isdigit() else v
        if not tokens[pos].startswith('"'):
            raise CalculusError("expected a quoted sequent")
        seq = sx.parse_sequent(tokens[pos][1:-1], sysname)
        pos += 1
        children = []
        while tokens[pos] != ")":
            children.append(walk())
        pos += 1
        return ProofTree(seq, name, children, params)

    tree = walk()
    if pos != len(tokens):
        raise CalculusError("trailing content after proof")
    return tree


import re


# ----------------------------------------------------------- proof checking

def _formula_subterms(f: Formula):
    yield f
    if isinstance(f, FUn):
        yield from _formula_subterms(f.arg)
    elif isinstance(f, FBin):
        yield from _formula_subterms(f.left)
        yield from _formula_subterms(f.right)


def _sequent_formulas(cs: CSeq):
    def walk(node):
        if isinstance(node, CLeaf):
            yield from _formula_subterms(node.formula)
        elif isinstance(node, CUn):
            yield from walk(node.arg)
        elif isinstance(node, CMulti):
            for it in node.items:
                yield from walk(it)
    yield from walk(cs.lhs)
    if isinstance(cs.rhs, Formula):
        yield from _formula_subterms(cs.rhs)
    else:
        yield from walk(cs.rhs)


def _check_cut(node: ProofTree, goal: CSeq, sysid: SystemId):
    if len(node.children) != 2:
        raise PremiseCountMismatch(
            f"cut takes two premises, found {len(node.children)}")
    c1 = canon_sequent(node.children[0].conclusion, sysid)
    c2 = canon_sequent(node.children[1].conclusion, sysid)
    if sysid.involutive:
        if c1.rhs == c2.lhs and c1.lhs == goal.lhs and c2.rhs == goal.rhs:
            return
        raise PatternMismatch("cut premises do not compose")
    if c2.rhs != goal.rhs or not isinstance(c1.rhs, Formula):
        raise PatternMismatch("cut premises do not compose")
    target = CLeaf(c1.rhs)
    for cb, part in _positions(c2.lhs):
        if part == target and cb(c1.lhs) == goal.lhs:
            return
    raise PatternMismatch("cut formula does not occur where claimed")


def check_proof(tree: ProofTree, sysid: SystemId):
    """Validate every node against its named rule scheme.

    Returns None on success; raises UnknownRule, PatternMismatch,
    PremiseCountMismatch or CutUsedButDisallowed with the failing node."""
    rules = {}
    for r in rule_set(SystemId(sysid.name, allow_cut=True, n_max=sysid.n_max)):
        rules.setdefault(r.name, []).append(r)
    _check_node(tree, rules, sysid)


def _check_node(node: ProofTree, rules: dict, sysid: SystemId):
    goal = canon_sequent(node.conclusion, sysid)
    if node.rule == CUT_RULE_NAME:
        if not sysid.allow_cut:
            raise CutUsedButDisallowed(
                f"cut used at {sx.print_sequent(node.conclusion)}")
        _check_cut(node, goal, sysid)
    else:
        candidates = [r for r in rules.get(node.rule, [])
                      if all(str(r.params.get(k)) == str(v)
                             for k, v in node.params.items())]
        if not candidates:
            raise UnknownRule(f"no rule named {node.rule!r} "
                              f"with parameters {node.params}")
        single = sysid.single_negation
        ok = False
        for rule in candidates:
            if len(rule.premises) != len(node.children):
                continue
            want = [canon_sequent(c.conclusion, sysid)
                    for c in node.children]
            for prems in _backward_matches(rule, goal, single):
                if prems == want:
                    ok = True
                    break
            if ok:
                break
        if not ok:
            if any(len(r.premises) != len(node.children) for r in candidates) \
                    and all(len(r.premises) != len(node.children)
                            for r in candidates):
                raise PremiseCountMismatch(
                    f"{node.rule} at {sx.print_sequent(node.conclusion)}: "
                    f"wrong number of premises")
            raise PatternMismatch(
                f"{node.rule} does not derive "
                f"{sx.print_sequent(node.conclusion)} from its premises")
    for child in node.children:
        _check_node(child, rules, sysid)


# ----------------------------------------------------------------- search

def _seq_weight(cs: CSeq) -> int:
    rhs = (_formula_weight(cs.rhs) if isinstance(cs.rhs, Formula)
           else cs.rhs.weight)
    return cs.lhs.weight + rhs


# Lattices over which each system's derivable sequents are always valid;
# used for sound pruning of backward search (soundness direction of the
# completeness theorems: a subgoal falsified over any such lattice cannot
# have a derivation, so the branch is dead).
_PRUNE_FAMILIES = {
    "gl": (("boolean", 1), ("lukasiewicz_chain", 3)),
    "mgl": (("boolean", 1), ("lukasiewicz_chain", 3)),
    "cflew": (("boolean", 1), ("lukasiewicz_chain", 3)),
    "ljk": (("boolean", 1), ("godel_chain", 3)),
    "ingl": (("boolean", 1), ("lukasiewicz_chain", 3)),
    "inmgl": (("boolean", 1), ("lukasiewicz_chain", 3)),
    "incflew": (("boolean", 1), ("lukasiewicz_chain", 3)),
    "inljk": (("boolean", 1), ("boolean", 2)),
}

_PRUNE_VALUATION_CAP = 48

_LEFT_OPS = {"o2": "double", "b2": "jstar", "oa": "alpha", "ba": "alpha",
             "sim": "neg", "sneg": "neg"}
_RIGHT_OPS = {"o2": "half", "b2": "jmap", "oa": "beta", "ba": "beta",
              "sim": "neg", "sneg": "neg"}


class _SemanticPruner:
    """Falsifies subgoals over small lattices; values of shared subterms
    are cached across the whole search."""

    def __init__(self, sysid: SystemId, atoms):
        from . import semantics as sem
        from . import stepfn
        from .lattice import make_builtin
        self.sem = sem
        self.sf = stepfn
        self.pools = []
        for fam, size in _PRUNE_FAMILIES[sysid.name]:
            lat = make_builtin(fam, size)
            fns = sem._monotone_grid_functions(lat, 1)
            vals = [{}]
            for a in sorted(atoms):
                vals = [{**v, a: f} for v in vals for f in fns]
                if len(vals) > _PRUNE_VALUATION_CAP:
                    vals = vals[::2][:_PRUNE_VALUATION_CAP]
            self.pools.append((lat, vals))
        self.cache = {}
        self.vcache = {}

    def _eval(self, node, side, pool_idx, val_idx):
        key = (node.skey, side, pool_idx, val_idx)
        out = self.vcache.get(key)
        if out is not None:
            return out
        sf = self.sf
        lat, vals = self.pools[pool_idx]
        if isinstance(node, CLeaf):
            out = self.sem.eval_formula(
                node.formula, self.sem.Valuation(lat, vals[val_idx]))
        elif isinstance(node, CUn):
            op = (_LEFT_OPS if side == 0 else _RIGHT_OPS)[node.op]
            out = sf.apply_unary(op, self._eval(node.arg, side,
                                                pool_idx, val_idx))
        elif isinstance(node, CMulti):
            if not node.items:
                out = (sf.bottom(lat) if side == 0 else sf.top(lat))
            else:
                out = self._eval(node.items[0], side, pool_idx, val_idx)
                for it in node.items[1:]:
                    nxt = self._eval(it, side, pool_idx, val_idx)
                    out = (sf.oplus(out, nxt) if side == 0
                           else sf.odot(out, nxt))
        else:
            raise self.sem.SemanticsError(f"cannot evaluate {node!r}")
        self.vcache[key] = out
        return out

    def possibly_derivable(self, cseq: CSeq, sysid: SystemId) -> bool:
        key = sequent_key(cseq)
        verdict = self.cache.get(key)
        if verdict is None:
            verdict = True
            try:
                for pi, (lat, vals) in enumerate(self.pools):
                    for vi in range(len(vals)):
                        lhs = self._eval(cseq.lhs, 0, pi, vi)
                        if isinstance(cseq.rhs, Formula):
                            rhs = self.sem.eval_formula(
                                cseq.rhs, self.sem.Valuation(lat, vals[vi]))
                        else:
                            rhs = self._eval(cseq.rhs, 1, pi, vi)
                        if not self.sf.leq(rhs, lhs):
                            verdict = False
                            break
                    if not verdict:
                        break
            except self.sem.SemanticsError:
                verdict = True
            self.cache[key] = verdict
        return verdict


class _Searcher:
    def __init__(self, sysid: SystemId, max_depth: int, pruner=None):
        self.sysid = sysid
        self.rules = [r for r in rule_set(sysid) if r.search]
        self.single = sysid.single_negation
        self.max_depth = max_depth
        self.failed = {}
        self.path_hits = 0
        self.size_cap = None
        self.pruner = pruner
        self.match_cache = {}
        self.expansions = 0
        self.expansion_cap = 400_000

    def prove(self, goal: CSeq):
        self.size_cap = _seq_weight(goal) + 14 + 2 * self.sysid.n_max
        for depth in range(1, self.max_depth + 1):
            tree = self._attempt(goal, depth, frozenset())
            if tree is not None:
                return tree
            if self.expansions > self.expansion_cap:
                break
        return None

    def _moves(self, goal: CSeq, key: str):
        """All backward rule applications of a goal, computed once."""
        moves = self.match_cache.get(key)
        if moves is None:
            moves = []
            for idx, rule in enumerate(self.rules):
                if rule.kind == "cut":
                    moves.append((idx, rule, None))
                    continue
                seen = set()
                for prems in _backward_matches(rule, goal, self.single):
                    if any(_seq_weight(p) > self.size_cap for p in prems):
                        continue
                    sig = tuple(sequent_key(p) for p in prems)
                    if sig in seen:
                        continue
                    seen.add(sig)
                    if self.pruner is not None and any(
                            not self.pruner.possibly_derivable(p, self.sysid)
                            for p in prems):
                        continue
                    moves.append((idx, rule, prems))
            self.match_cache[key] = moves
        return moves

    def _attempt(self, goal: CSeq, budget: int, path: frozenset):
        if budget <= 0 or self.expansions > self.expansion_cap:
            return None
        key = sequent_key(goal)
        if key in path:
            self.path_hits += 1
            return None
        if self.failed.get(key, 0) >= budget:
            return None
        if self.pruner is not None \
                and not self.pruner.possibly_derivable(goal, self.sysid):
            return None
        self.expansions += 1
        path = path | {key}
        hits_before = self.path_hits
        for _, rule, prems in self._moves(goal, key):
            if rule.kind == "cut":
                tree = self._attempt_cut(goal, budget, path)
                if tree is not None:
                    return tree
                continue
            children = self._prove_all(prems, budget - 1, path)
            if children is not None:
                return ProofTree(uncanon_sequent(goal, self.sysid),
                                 rule.name, children, dict(rule.params))
        # cache the failure only when no ancestor-loop prune occurred
        # beneath this node, otherwise the failure is path-dependent
        if self.path_hits == hits_before:
            self.failed[key] = max(self.failed.get(key, 0), budget)
        return None

    def _prove_all(self, prems, budget, path):
        children = []
        for p in prems:
            t = self._attempt(p, budget, path)
            if t is None:
                return None
            children.append(t)
        return children

    def _attempt_cut(self, goal: CSeq, budget: int, path):
        cuts = []
        seen = set()
        for f in _sequent_formulas(goal):
            k = formula_key(f)
            if k not in seen:
                seen.add(k)
                cuts.append(f)
        if self.sysid.involutive:
            for f in cuts:
                mid = CLeaf(f)
                p1 = CSeq(goal.lhs, mid)
                p2 = CSeq(mid, goal.rhs)
                children = self._prove_all([p1, p2], budget - 1, path)
                if children is not None:
                    return ProofTree(uncanon_sequent(goal, self.sysid),
                                     CUT_RULE_NAME, children)
            return None
        for cb, part in _positions(goal.lhs):
            for f in cuts:
                p1 = CSeq(part, f)
                p2 = CSeq(cb(CLeaf(f)), goal.rhs)
                children = self._prove_all([p1, p2], budget - 1, path)
                if children is not None:
                    return ProofTree(uncanon_sequent(goal, self.sysid),
                                     CUT_RULE_NAME, children)
        return None


def prove(seq: Sequent, sysid: SystemId, max_depth: int = 12,
          n_max: int | None = None, semantic_prune: bool = True):
    """Bounded backward proof search; returns a ProofTree or NotFound.

    Deterministic: fixed rule order, leftmost premise first.  A returned
    tree always passes check_proof.  Subgoals falsified over the system's
    algebra class are pruned (soundness direction); disable with
    semantic_prune=False.  NotFound carries depth_exhausted, or
    n_max_exhausted when the goal mentions dyadics finer than the system's
    parameter cap (a hint that raising n_max could help)."""
    if n_max is not None:
        sysid = SystemId(sysid.name, sysid.allow_cut, n_max)
    goal = canon_sequent(seq, sysid)
    pruner = None
    if semantic_prune:
        from . import semantics as sem
        pruner = _SemanticPruner(sysid, sem.sequent_atoms(seq))
    searcher = _Searcher(sysid, max_depth, pruner)
    tree = searcher.prove(goal)
    if tree is not None:
        return tree
    cap = D(1, 2 ** sysid.n_max)
    for f in _sequent_formulas(goal):
        if isinstance(f, FConst) and f.value.exponent > cap.exponent:
            return NotFound("n_max_exhausted")
    return NotFound("depth_exhausted")


# ------------------------------------------------------ analytic criteria

def _pattern_vars(node, out):
    if isinstance(node, CVarN):
        out.append(("S", node.name))
    elif isinstance(node, CNegVarN):
        out.append(("S", node.name))
    elif isinstance(node, CLeaf):
        if isinstance(node.formula, FVar):
            out.append(("F", node.formula.name))
        else:
            out.append(("!formula", repr(node.formula)))
    elif isinstance(node, CUn):
        _pattern_vars(node.arg, out)
    elif isinstance(node, CMulti):
        for it in node.items:
            _pattern_vars(it, out)
    elif isinstance(node, CCtxN):
        _pattern_vars(node.inner, out)
    return out


def _has_negation(node) -> bool:
    if isinstance(node, CNegVarN):
        return True
    if isinstance(node, CUn):
        return node.op in ("sim", "sneg") or _has_negation(node.arg)
    if isinstance(node, CMulti):
        return any(_has_negation(it) for it in node.items)
    if isinstance(node, CCtxN):
        return _has_negation(node.inner)
    return False


def is_analytic(rule: RuleScheme, involutive: bool = False):
    """Linearity, separation, inclusion (and positivity when involutive).

    Returns (verdict, reasons); reasons name each failing condition."""
    reasons = []
    clhs, crhs = rule.conclusion
    inner = clhs.inner if isinstance(clhs, CCtxN) else clhs
    if isinstance(crhs, Formula):
        rhs_var = ("F", crhs.name) if isinstance(crhs, FVar) else None
    else:
        rhs_var = ("S", crhs.name) if isinstance(crhs, CVarN) else None
    if rhs_var is None:
        reasons.append("linearity: the right side is not a variable")
    conc_vars = _pattern_vars(inner, [])
    if any(v[0] == "!formula" for v in conc_vars):
        reasons.append("not structural: a concrete formula occurs")
    if len(set(conc_vars)) != len(conc_vars):
        dups = sorted({v[1] for v in conc_vars if conc_vars.count(v) > 1})
        reasons.append(f"linearity: repeated variables {', '.join(dups)}")
    if rhs_var is not None and rhs_var in conc_vars:
        reasons.append("separation: the right side occurs in the conclusion")
    conc_set = set(conc_vars)
    for i, (plhs, prhs) in enumerate(rule.premises):
        pv = _pattern_vars(plhs.inner if isinstance(plhs, CCtxN) else plhs, [])
        extra = [v for v in pv if v not in conc_set and v != rhs_var]
        if extra:
            names = sorted({v[1] for v in extra})
            reasons.append(f"inclusion: premise {i + 1} mentions "
                           f"{', '.join(names)} absent from the conclusion")
        want = rhs_var if rhs_var is not None else None
        ok_rhs = ((isinstance(prhs, FVar) and ("F", prhs.name) == want)
                  or (isinstance(prhs, CVarN) and ("S", prhs.name) == want))
        if not ok_rhs:
            reasons.append(f"premise {i + 1} does not share the "
                           f"conclusion's right side")
    if involutive:
        nodes = [inner] + [p for p, _ in rule.premises]
        if any(_has_negation(n.inner if isinstance(n, CCtxN) else n)
               for n in nodes):
            reasons.append("positivity: a negation symbol appears")
    return (not reasons), reasons


def make_structural_rule(name: str, premises, conclusion,
                         contextual: bool = True) -> RuleScheme:
    """A structural rule over comma/eps/modal symbols and SVar variables.

    premises and conclusion are structures (the part inside the shared
    context for contextual rules); the shared right side is implicit."""
    A = FVar("A")
    if contextual:
        prems = [(SCtx(p), A) for p in premises]
        concl = (SCtx(conclusion), A)
    else:
        prems = [(p, A) for p in premises]
        concl = (conclusion, A)
    return _rule(name, "shrink", prems, concl, contextual=contextual)


CONTRACTION = make_structural_rule(
    "contraction", [SComma(SVar("g"), SVar("g"))], SVar("g"))
WEAKENING = make_structural_rule("weakening", [sx.EPS], SVar("g"))
MINGLE = make_structural_rule(
    "mingle", [SVar("g"), SVar("d")], SComma(SVar("g"), SVar("d")))


def _count_commas(node) -> int:
    if isinstance(node, CMulti):
        return max(len(node.items) - 1, 0) + sum(_count_commas(it)
                                                 for it in node.items)
    if isinstance(node, CUn):
        return _count_commas(node.arg)
    if isinstance(node, CCtxN):
        return _count_commas(node.inner)
    return 0


def _only_commas(node) -> bool:
    if isinstance(node, (CVarN, CLeaf)):
        return True
    if isinstance(node, CMulti):
        return all(_only_commas(it) for it in node.items)
    if isinstance(node, CCtxN):
        return _only_commas(node.inner)
    return False


def translate_rule(rule: RuleScheme) -> RuleScheme:
    """Fusion-language to continuous-language analytic rule translation:
    commas are reread as truncated addition and the conclusion is doubled
    once per fusion in the busiest premise."""
    ok, reasons = is_analytic(rule)
    if not ok:
        raise NotAnalytic("; ".join(reasons))
    nodes = [p for p, _ in rule.premises] + [rule.conclusion[0]]
    if not all(_only_commas(n) for n in nodes):
        raise NotAnalytic("not a fusion-language rule")
    k = max((_count_commas(p) for p, _ in rule.premises), default=0)
    clhs, crhs = rule.conclusion
    inner = clhs.inner if isinstance(clhs, CCtxN) else clhs
    for _ in range(k):
        inner = CUn("o2", inner)
    new_concl = (CCtxN(inner) if isinstance(clhs, CCtxN) else inner, crhs)
    return RuleScheme(rule.name + "_c", list(rule.premises), new_concl,
                      rule.kind, rule.contextual, dict(rule.params))


# ------------------------------------------- involutive proof collapsing

_TWO_TO_ONE_RULES = {"Lal2": "Lal", "Ral2": "Ral", "oa/ba": "oa/oa",
                     "negL": "negL"}


def _map_struct_single(s: Structure) -> Structure:
    if isinstance(s, SLeaf) or isinstance(s, SEps):
        return s
    if isinstance(s, SUn):
        op = {"ba": "oa", "sim": "sneg"}.get(s.op, s.op)
        return SUn(op, _map_struct_single(s.arg))
    if isinstance(s, SComma):
        return SComma(_map_struct_single(s.left), _map_struct_single(s.right))
    raise TypeError(f"not a structure: {s!r}")


def _map_sequent_single(seq: Sequent, target: str) -> Sequent:
    return Sequent(_map_struct_single(seq.lhs),
                   _map_struct_single(seq.rhs), target)


class _AssumptionSearcher(_Searcher):
    def __init__(self, sysid, max_depth, assumptions):
        super().__init__(sysid, max_depth)
        self.assumptions = {sequent_key(a): i
                            for i, a in enumerate(assumptions)}

    def _attempt(self, goal, budget, path):
        idx = self.assumptions.get(sequent_key(goal))
        if idx is not None:
            return ProofTree(uncanon_sequent(goal, self.sysid),
                             "__asm__", [], {"i": idx})
        return super()._attempt(goal, budget, path)


def _derive(goal: Sequent, premises, sysid: SystemId, max_depth: int,
            children):
    """Derive goal from open premises in sysid, splicing in children."""
    cprem = [canon_sequent(p, sysid) for p in premises]
    searcher = _AssumptionSearcher(sysid, max_depth, cprem)
    tree = searcher.prove(canon_sequent(goal, sysid))
    if tree is None:
        raise CalculusError(
            f"no derivation of {sx.print_sequent(goal)} from its premises")

    def splice(t: ProofTree) -> ProofTree:
        if t.rule == "__asm__":
            return children[t.params["i"]]
        return ProofTree(t.conclusion, t.rule,
                         [splice(c) for c in t.children], t.params)

    return splice(tree)


def collapse_involutive(tree: ProofTree, direction: str) -> ProofTree:
    """Translate between the two-negation and single-negation involutive
    modal systems; the root conclusion is preserved and the output checks
    in the target system."""
    if direction == "to_single_negation":
        target = system("incflew")
        out = _collapse_single(tree, target)
        check_proof(out, target)
        return out
    if direction == "to_two_negation":
        target = system("inmgl")
        out = _collapse_two(tree, target)
        check_proof(out, target)
        return out
    raise ValueError("direction must be to_single_negation or to_two_negation")


def _collapse_single(node: ProofTree, target: SystemId) -> ProofTree:
    seq = _map_sequent_single(node.conclusion, target.name)
    children = [_collapse_single(c, target) for c in node.children]
    rule = _TWO_TO_ONE_RULES.get(node.rule, node.rule)
    if node.rule == "oa->ba":
        # becomes the identity inference once the alphas coincide
        return children[0]
    return ProofTree(seq, rule, children, dict(node.params))


def _collapse_two(node: ProofTree, target: SystemId) -> ProofTree:
    children = [_collapse_two(c, target) for c in node.children]
    seq = Sequent(node.conclusion.lhs, node.conclusion.rhs, target.name)
    if node.rule in ("oa/oa", "negL"):
        premises = [Sequent(c.conclusion.lhs, c.conclusion.rhs, target.name)
                    for c in node.children]
        return _derive(seq, premises, target, 10, children)
    return ProofTree(seq, node.rule, children, dict(node.params))
