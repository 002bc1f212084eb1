"""Step functions: the sup-preserving maps [0,1] -> L, computed exactly.

A step function is stored as strictly increasing dyadic breakpoints
t_1 < ... < t_k = 1 together with a strictly increasing chain of lattice
values v_1 < ... < v_k; the function takes the value bottom at 0 and v_i
on the half-open segment (t_{i-1}, t_i].  Every function of this shape is
sup-preserving, and every operation below returns canonical form (equal
adjacent values merged), so equality of step functions is structural.

The order used throughout is the reverse pointwise order: f <= g iff
g(q) <= f(q) in L for every q.  Its bottom is the constant-0 embedding
(bottom at 0, top elsewhere) and its top is the function constantly
bottom.
"""

from __future__ import annotations

from . import dyadic as dy
from .dyadic import Dyadic
from .lattice import FiniteResiduatedLattice

ZERO, ONE = dy.ZERO, dy.ONE

DEBUG_CHECK_ADJUNCTION = False


class StepFunctionError(ValueError):
    pass


class NonMonotoneValues(StepFunctionError):
    pass


class BreakpointOutOfRange(StepFunctionError):
    pass


class UnsortedBreakpoints(StepFunctionError):
    pass


class LatticeMismatch(StepFunctionError):
    pass


class StepFunction:
    __slots__ = ("lattice", "breakpoints", "values")

    def __init__(self, lattice: FiniteResiduatedLattice, breakpoints, values,
                 _canonical=False):
        self.lattice = lattice
        if _canonical:
            self.breakpoints = breakpoints
            self.values = values
            return
        bps = tuple(breakpoints)
        vals = tuple(values)
        if len(bps) != len(vals) or not bps:
            raise StepFunctionError("need matching nonempty breakpoints and values")
        for t in bps:
            if not (ZERO < t <= ONE):
                raise BreakpointOutOfRange(f"breakpoint {t} outside (0, 1]")
        for a, b in zip(bps, bps[1:]):
            if not a < b:
                raise UnsortedBreakpoints(f"breakpoints not strictly increasing at {b}")
        if bps[-1] != ONE:
            raise BreakpointOutOfRange("last breakpoint must be 1")
        for v in vals:
            lattice._index(v)
        for a, b in zip(vals, vals[1:]):
            if not lattice.leq(a, b):
                raise NonMonotoneValues(f"values {a} then {b} do not increase")
        # merge equal adjacent values
        merged_b, merged_v = [], []
        for t, v in zip(bps, vals):
            if merged_v and merged_v[-1] == v:
                merged_b[-1] = t
            else:
                merged_b.append(t)
                merged_v.append(v)
        self.breakpoints = tuple(merged_b)
        self.values = tuple(merged_v)

    def __eq__(self, other):
        return (isinstance(other, StepFunction)
                and self.lattice is other.lattice
                and self.breakpoints == other.breakpoints
                and self.values == other.values)

    def __hash__(self):
        return hash((id(self.lattice), self.breakpoints, self.values))

    def __repr__(self):
        return f"StepFunction({self})"

    def __str__(self):
        parts = ", ".join(f"{t}={v}" for t, v in zip(self.breakpoints, self.values))
        return f"step({parts})"

    def eval_at(self, q: Dyadic):
        """f(q): bottom at 0, else the value of the segment containing q."""
        if not (ZERO <= q <= ONE):
            raise StepFunctionError(f"{q} outside [0, 1]")
        if q == ZERO:
            return self.lattice.bottom
        lo, hi = 0, len(self.breakpoints) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if q <= self.breakpoints[mid]:
                hi = mid
            else:
                lo = mid + 1
        return self.values[lo]

    def segments(self):
        """Yield (left, right, value) triples with left open, right closed."""
        left = ZERO
        for t, v in zip(self.breakpoints, self.values):
            yield left, t, v
            left = t


def normalize(lattice, pairs) -> StepFunction:
    """Build a step function from (breakpoint, value) pairs."""
    pairs = list(pairs)
    return StepFunction(lattice, [p[0] for p in pairs], [p[1] for p in pairs])


def indicator(lattice, u) -> StepFunction:
    """0_U: bottom at 0 and U on all of (0, 1]."""
    lattice._index(u)
    return StepFunction(lattice, (ONE,), (u,), _canonical=True)


def constant(lattice, p: Dyadic) -> StepFunction:
    """The embedded constant: top above p, bottom at or below p."""
    if not p.in_unit():
        raise StepFunctionError(f"{p} outside [0, 1]")
    if p == ONE:
        return indicator(lattice, lattice.bottom)
    if p == ZERO:
        return indicator(lattice, lattice.top)
    return StepFunction(lattice, (p, ONE), (lattice.bottom, lattice.top),
                        _canonical=True)


def bottom(lattice) -> StepFunction:
    return constant(lattice, ZERO)


def top(lattice) -> StepFunction:
    return constant(lattice, ONE)


def _require_same(f: StepFunction, g: StepFunction):
    if f.lattice is not g.lattice:
        raise LatticeMismatch("step functions over different lattices")


def _union_breakpoints(f, g):
    return tuple(sorted(set(f.breakpoints) | set(g.breakpoints)))


def leq(f: StepFunction, g: StepFunction) -> bool:
    """f <= g in the reverse pointwise order: g(q) <= f(q) everywhere."""
    _require_same(f, g)
    lat = f.lattice
    return all(lat.leq(g.eval_at(t), f.eval_at(t))
               for t in _union_breakpoints(f, g))


def lattice_pointwise(kind: str, f: StepFunction, g: StepFunction) -> StepFunction:
    """join, meet, otimes or residual, computed on the union of breakpoints.

    join is the least upper bound (pointwise lattice meet), meet the
    greatest lower bound (pointwise lattice join), otimes is pointwise
    fusion, and residual is the upper regularization of the pointwise
    residual, realized by tail meets over the union segments.
    """
    _require_same(f, g)
    lat = f.lattice
    bps = _union_breakpoints(f, g)
    fv = [f.eval_at(t) for t in bps]
    gv = [g.eval_at(t) for t in bps]
    if kind == "join":
        vals = [lat.meet(a, b) for a, b in zip(fv, gv)]
    elif kind == "meet":
        vals = [lat.join(a, b) for a, b in zip(fv, gv)]
    elif kind == "otimes":
        vals = [lat.otimes(a, b) for a, b in zip(fv, gv)]
    elif kind == "residual":
        pointwise = [lat.residual(a, b) for a, b in zip(fv, gv)]
        vals = []
        acc = lat.top
        for v in reversed(pointwise):
            acc = lat.meet(acc, v)
            vals.append(acc)
        vals.reverse()
    else:
        raise ValueError(f"unknown pointwise kind {kind!r}")
    return StepFunction(lat, bps, vals)


def oplus(f: StepFunction, g: StepFunction) -> StepFunction:
    """Truncated addition: (f + g)(q) = sup over p < q of f(p) * g(q - p).

    Exact closed form: the pair of segments i of f and j of g contributes
    v_i * w_j as soon as q exceeds the sum of their left endpoints, so the
    result is the running join of contributions sorted by that sum.
    """
    _require_same(f, g)
    lat = f.lattice
    contributions = {}
    for fl, _, fv in f.segments():
        for gl, _, gv in g.segments():
            s = fl + gl
            if s < ONE:
                prod = lat.otimes(fv, gv)
                if s in contributions:
                    contributions[s] = lat.join(contributions[s], prod)
                else:
                    contributions[s] = prod
    sums = sorted(contributions)
    bps, vals = [], []
    acc = None
    for k, s in enumerate(sums):
        acc = contributions[s] if acc is None else lat.join(acc, contributions[s])
        nxt = sums[k + 1] if k + 1 < len(sums) else ONE
        bps.append(nxt)
        vals.append(acc)
    return StepFunction(lat, bps, vals)


def _ominus_at(f, g, p: Dyadic):
    """inf over r >= p of g(r - p) -> f(r), by finite case analysis."""
    lat = f.lattice
    pts = {p, ONE}
    for t in f.breakpoints:
        if p <= t:
            pts.add(t)
    for s in g.breakpoints:
        r = p + s
        if r <= ONE:
            pts.add(r)
    pts = sorted(pts)
    acc = lat.top
    for k, r in enumerate(pts):
        acc = lat.meet(acc, lat.residual(g.eval_at(r - p), f.eval_at(r)))
        if k + 1 < len(pts):
            m = dy.midpoint(r, pts[k + 1])
            acc = lat.meet(acc, lat.residual(g.eval_at(m - p), f.eval_at(m)))
    return acc


def ominus(f: StepFunction, g: StepFunction) -> StepFunction:
    """Truncated subtraction, the residual of oplus.

    Candidate breakpoints are the clipped pairwise differences of input
    breakpoints; on each candidate segment the inner double limit is a
    constant, evaluated at the segment midpoint.
    """
    _require_same(f, g)
    lat = f.lattice
    cands = {ONE}
    for t in f.breakpoints:
        for s in list(g.breakpoints) + [ZERO]:
            d = dy.sub_trunc(t, s)
            if ZERO < d:
                cands.add(d)
    cands = sorted(cands)
    bps, vals = [], []
    left = ZERO
    for c in cands:
        bps.append(c)
        vals.append(_ominus_at(f, g, dy.midpoint(left, c)))
        left = c
    out = StepFunction(lat, bps, vals)
    if DEBUG_CHECK_ADJUNCTION:
        assert leq(f, oplus(g, out))
    return out


def apply_unary(kind: str, f: StepFunction) -> StepFunction:
    """The unary operations, all exact closed forms on breakpoints.

    double : (2f)(q) = f(q/2)
    half   : left adjoint of double; breakpoints halved
    jstar  : (j* f)(q) = f(max(2q - 1, 0))
    jmap   : left adjoint of jstar; kept segments above 1/2, shifted down
    alpha  : q -> f(beta(q)), beta(q) = min(2q, q/2 + 1/2)
    beta   : q -> f(alpha(q)), alpha(q) = max(q/2, 2q - 1)
    ell    : the indicator of f(1)
    ellstar: the indicator of the value just above 0, computed by
             iterating alpha on a probe query until it falls below the
             least breakpoint
    neg    : constant(1) - f
    """
    lat = f.lattice
    if kind == "double":
        bps, vals = [], []
        for t, v in zip(f.breakpoints, f.values):
            d = dy.double(t)
            bps.append(d)
            vals.append(v)
            if d == ONE:
                break
        return StepFunction(lat, bps, vals)
    if kind == "half":
        # least g with f <= 2g: g follows f at doubled argument up to 1/2
        # and is unconstrained (hence top) above 1/2
        bps = [dy.half(t) for t in f.breakpoints]
        vals = list(f.values)
        if vals[-1] != lat.top:
            bps.append(ONE)
            vals.append(lat.top)
        else:
            bps[-1] = ONE
        return StepFunction(lat, bps, vals)
    if kind == "jstar":
        bps, vals = [dy.HALF], [lat.bottom]
        for t, v in zip(f.breakpoints, f.values):
            bps.append(dy.jstar(t))
            vals.append(v)
        return StepFunction(lat, bps, vals)
    if kind == "jmap":
        bps, vals = [], []
        for t, v in zip(f.breakpoints, f.values):
            if t <= dy.HALF:
                continue
            bps.append(dy.jmap(t))
            vals.append(v)
        return StepFunction(lat, bps, vals)
    if kind == "alpha":
        return StepFunction(lat, [dy.alpha(t) for t in f.breakpoints], f.values)
    if kind == "beta":
        return StepFunction(lat, [dy.beta(t) for t in f.breakpoints], f.values)
    if kind == "ell":
        return indicator(lat, f.values[-1])
    if kind == "ellstar":
        probe = dy.HALF
        steps = 0
        while probe >= f.breakpoints[0] and probe < ONE:
            probe = dy.alpha(probe)
            steps += 1
            if steps > 10**6:
                raise StepFunctionError("ellstar iteration failed to converge")
        return indicator(lat, f.eval_at(probe))
    if kind == "neg":
        return ominus(constant(lat, ONE), f)
    raise ValueError(f"unknown unary kind {kind!r}")


def norm(f: StepFunction) -> Dyadic:
    """Least q with f identically top above q; 1 if f never reaches top."""
    if f.values[-1] != f.lattice.top:
        return ONE
    # canonical form merges equal values, so top occurs exactly once
    return ZERO if len(f.values) == 1 else f.breakpoints[-2]


def dist(f: StepFunction, g: StepFunction) -> Dyadic:
    _require_same(f, g)
    return max(norm(ominus(f, g)), norm(ominus(g, f)))


def leq_within(f: StepFunction, g: StepFunction, n: int) -> bool:
    """f <= g + 1/2^n."""
    _require_same(f, g)
    return leq(f, oplus(g, constant(f.lattice, Dyadic(1, 2**n))))


def odot(f: StepFunction, g: StepFunction) -> StepFunction:
    """The involutive pairing j(f/2 + g/2)."""
    return apply_unary("jmap",
                       oplus(apply_unary("half", f), apply_unary("half", g)))


def parse_step_literal(lattice, text: str) -> StepFunction:
    """`step(t1=v1, ..., 1=vk)`, `const(p)` or `ind(U)` literals."""
    text = text.strip()
    if text.startswith("const(") and text.endswith(")"):
        return constant(lattice, Dyadic.parse(text[6:-1]))
    if text.startswith("ind(") and text.endswith(")"):
        return indicator(lattice, text[4:-1].strip())
    if not (text.startswith("step(") and text.endswith(")")):
        raise StepFunctionError(f"bad step literal {text!r}")
    pairs = []
    body = text[5:-1].strip()
    if not body:
        raise StepFunctionError("empty step literal")
    for item in body.split(","):
        t, v = item.split("=", 1)
        pairs.append((Dyadic.parse(t), v.strip()))
    return normalize(lattice, pairs)
