"""Independent brute-force evaluation of the defining formulas.

Each operation of the step-function algebra is re-evaluated pointwise,
straight from its defining sup/inf formula, over a finite sample set that
provably covers every piece of the integrand:

* sups over p < q sample every master grid point below q plus one point
  inside the gap just below q (the only piece the grid can miss, since
  integrands are left-continuous and all interior piece boundaries lie on
  the grid);
* infs over r >= p sample the grid points of [p, 1] plus p itself and the
  shifted breakpoints p + s, whose pieces are right-closed;
* the convolution integrand f(p) * g(q-p) is two-sidedly discontinuous,
  so boundary points and midpoints of consecutive boundaries are sampled.

The master grid must be at least two exponents finer than the input
breakpoints, and the evaluation points must lie on it.
"""

from __future__ import annotations

from contlog import dyadic as dy
from contlog.dyadic import Dyadic


class GridOracle:
    """Tabulates f and g on the grid {k/2^exp} and evaluates formulas."""

    def __init__(self, f, g, exp: int):
        lat = f.lattice
        tabs = lat.index_tables()
        self.exp = exp
        self.n = 2**exp
        self.meet = tabs["meet"]
        self.join = tabs["join"]
        self.ot = tabs["otimes"]
        self.res = tabs["residual"]
        self.bot = tabs["bottom"]
        self.top = tabs["top"]
        self.idx = tabs["index"]
        pts = dy.grid(exp)
        self.points = pts
        self.F = [self.idx[f.eval_at(p)] for p in pts]
        self.G = [self.idx[g.eval_at(p)] for p in pts]
        self.f, self.g = f, g
        self.gap = Dyadic(1, 2 ** (exp + 1))
        self.names = lat.elements

    def fidx(self, q: Dyadic) -> int:
        return self.idx[self.f.eval_at(q)]

    def gidx(self, q: Dyadic) -> int:
        return self.idx[self.g.eval_at(q)]

    def gi(self, q: Dyadic) -> int:
        """Grid index of an on-grid dyadic."""
        return q.num << (self.exp - q.exp)

    # pointwise operations

    def o_meet(self, q):
        k = self.gi(q)
        return self.join[self.F[k]][self.G[k]]

    def o_otimes(self, q):
        k = self.gi(q)
        return self.ot[self.F[k]][self.G[k]]

    # sup over p < q: all grid points below q, plus the gap point below q

    def _sup_below(self, q, on_grid, off_grid):
        acc = self.bot
        for p in range(self.gi(q)):
            acc = self.join[acc][on_grid(p)]
        if q > dy.ZERO:
            acc = self.join[acc][off_grid(q - self.gap)]
        return acc

    def o_join(self, q):
        return self._sup_below(
            q,
            lambda p: self.meet[self.F[p]][self.G[p]],
            lambda p: self.meet[self.fidx(p)][self.gidx(p)])

    def _residual_tail(self, p: Dyadic):
        rs = {p, dy.ONE}
        for k in range(self.gi_up(p), self.n + 1):
            rs.add(self.points[k])
        acc = self.top
        for r in sorted(rs):
            acc = self.meet[acc][self.res[self.fidx(r)][self.gidx(r)]]
        return acc

    def gi_up(self, p: Dyadic) -> int:
        """Least grid index at or above p."""
        k = (p.num << (self.exp - p.exp)) if p.exp <= self.exp else None
        if k is not None:
            return k
        shift = p.exp - self.exp
        return (p.num + (1 << shift) - 1) >> shift

    def o_residual(self, q):
        return self._sup_below(
            q,
            lambda p: self._residual_tail(self.points[p]),
            lambda p: self._residual_tail(p))

    def _ominus_tail(self, p: Dyadic):
        rs = {p, dy.ONE}
        for k in range(self.gi_up(p), self.n + 1):
            rs.add(self.points[k])
        for t in self.f.breakpoints:
            if p <= t:
                rs.add(t)
        for s in self.g.breakpoints:
            r = p + s
            if r <= dy.ONE:
                rs.add(r)
        acc = self.top
        for r in sorted(rs):
            acc = self.meet[acc][self.res[self.gidx(r - p)][self.fidx(r)]]
        return acc

    def o_ominus(self, q):
        return self._sup_below(
            q,
            lambda p: self._ominus_tail(self.points[p]),
            lambda p: self._ominus_tail(p))

    def o_half(self, q):
        # least g with f <= 2g: g(p) = f(2p) below 1/2, unconstrained above
        return self._sup_below(
            q,
            lambda p: self.top if 2 * p > self.n else self.F[2 * p],
            lambda p: self.top if p > dy.HALF else self.fidx(dy.double(p)))

    def o_jmap(self, q):
        return self._sup_below(
            q,
            lambda p: self.fidx(dy.jstar(self.points[p])),
            lambda p: self.fidx(dy.jstar(p)))

    # convolution: boundaries plus midpoints, evaluated exactly

    def o_oplus(self, q):
        bounds = {dy.ZERO, q}
        for t in self.f.breakpoints:
            if t < q:
                bounds.add(t)
        for s in self.g.breakpoints:
            d = dy.sub_trunc(q, s)
            if dy.ZERO < d:
                bounds.add(d)
        pts = sorted(bounds)
        samples = []
        for i, b in enumerate(pts):
            if b < q:
                samples.append(b)
            if i + 1 < len(pts):
                samples.append(dy.midpoint(b, pts[i + 1]))
        acc = self.bot
        for p in samples:
            acc = self.join[acc][self.ot[self.fidx(p)][self.gidx(q - p)]]
        return acc

    # query-transforming unaries

    def o_double(self, q):
        return self.fidx(dy.half(q))

    def o_jstar(self, q):
        return self.fidx(dy.jmap(q))

    def o_alpha(self, q):
        return self.fidx(dy.beta(q))

    def o_beta(self, q):
        return self.fidx(dy.alpha(q))


BINARY_KINDS = ("oplus", "ominus", "join", "meet", "otimes", "residual")
UNARY_KINDS = ("double", "half", "jstar", "jmap", "alpha", "beta")


def check_op(kind: str, f, g, result, exp: int):
    """Compare `result` with the brute-forced `kind` on the eval grid plus
    the result's breakpoints.  Returns a list of mismatch descriptions."""
    oracle = GridOracle(f, g if g is not None else f, exp)
    fn = getattr(oracle, f"o_{kind}")
    eval_points = sorted(set(dy.grid(exp)) | set(result.breakpoints))
    bad = []
    for q in eval_points:
        want = fn(q)
        got = oracle.idx[result.eval_at(q)]
        if want != got:
            bad.append(f"{kind} at q={q}: oracle {oracle.names[want]}, "
                       f"symbolic {oracle.names[got]}")
    return bad
