"""Brute-force reference implementation used only by the tests.

Reads the equation tables and the support dict directly and evaluates each
world by recursive lookup.  Shares no code with the inference engine or the
kernels; ratios use math.inf for p/0 and None for 0/0.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from caudit.prop import And, Atom, Const, Not, Or

INF = math.inf


def sat(p, w) -> bool:
    if isinstance(p, Atom):
        return (w[p.var] == p.value) != p.negated
    if isinstance(p, Const):
        return p.value
    if isinstance(p, Not):
        return not sat(p.arg, w)
    if isinstance(p, And):
        return all(sat(a, w) for a in p.args)
    if isinstance(p, Or):
        return any(sat(a, w) for a in p.args)
    raise TypeError(p)


def world(model, u: dict, do=None) -> dict:
    do = do or {}
    w = dict(u)

    def val(v):
        if v not in w:
            if v in do:
                w[v] = do[v]
            else:
                e = model.equations[v]
                w[v] = e.table[tuple(val(p) for p in e.parents)]
        return w[v]

    for v in model.variables:
        val(v.id)
    return w


def worlds(pm, do=None):
    bg = pm.dist.variables
    return [(world(pm.model, dict(zip(bg, k)), do), p) for k, p in pm.dist.support.items()]


def prob(pm, phi, given=None, do=None):
    ws = worlds(pm, do)
    den = sum((p for w, p in ws if given is None or sat(given, w)), Fraction(0))
    if den == 0:
        return None
    return sum((p for w, p in ws if (given is None or sat(given, w)) and sat(phi, w)), Fraction(0)) / den


def ratio(p, q):
    if q == 0:
        return None if p == 0 else INF
    return Fraction(p) / Fraction(q)


def worst(ratios):
    best = Fraction(1)
    for r in ratios:
        if r is not None and r > best:
            best = r
    return best


def as_oracle(r):
    """Engine ratio -> oracle ratio (INFINITE becomes math.inf)."""
    from caudit.inference import INFINITE

    return INF if r is INFINITE else Fraction(r)


# -- properties ----------------------------------------------------------------


def _val_dist(f, x, a, r_marg):
    """Distribution of the output table at explicit inputs, R from r_marg."""
    m = f.model
    e = m.equations[f.output]
    out = {o: Fraction(0) for o in m.domain(f.output).values}
    for r, p in r_marg.items():
        bind = {f.sensitive_in: x, **dict(zip(f.other_in, a))}
        if f.randomness:
            bind[f.randomness] = r
        out[e.table[tuple(bind[q] for q in e.parents)]] += p
    return out


def r_marginal(pm, r):
    out = {}
    i = pm.dist.variables.index(r)
    for k, p in pm.dist.support.items():
        out[k[i]] = out.get(k[i], 0) + p
    return out


def ni_ratio(f):
    m = f.model
    r_marg = r_marginal(f.pm, f.randomness) if f.randomness else {None: Fraction(1)}
    xs = m.domain(f.sensitive_in).values
    a_space = list(itertools.product(*(m.domain(a).values for a in f.other_in)))
    rs = []
    for a in a_space:
        d = {x: _val_dist(f, x, a, r_marg) for x in xs}
        for x1, x2 in itertools.permutations(xs, 2):
            rs += [ratio(d[x1][o], d[x2][o]) for o in m.domain(f.output).values]
    return worst(rs)


def _eqo(f, o):
    return Atom(f.output, o)


def causal_ratio(f):
    m = f.model
    xs = m.domain(f.sensitive_in).values
    d = {x: {o: prob(f.pm, _eqo(f, o), do={f.sensitive_in: x}) for o in m.domain(f.output).values} for x in xs}
    return worst(ratio(d[x1][o], d[x2][o]) for x1, x2 in itertools.permutations(xs, 2) for o in d[x1])


def assoc_ratio(f):
    m = f.model
    xs = [x for x in m.domain(f.sensitive_bg).values if prob(f.pm, Atom(f.sensitive_bg, x))]
    d = {x: {o: prob(f.pm, _eqo(f, o), given=Atom(f.sensitive_bg, x)) for o in m.domain(f.output).values}
         for x in xs}
    return worst(ratio(d[x1][o], d[x2][o]) for x1, x2 in itertools.permutations(xs, 2) for o in d[x1])


def assoc_x_ratio(f):
    m = f.model
    rs = []
    for o in m.domain(f.output).values:
        if not prob(f.pm, _eqo(f, o)):
            continue
        for x in m.domain(f.sensitive_bg).values:
            post = prob(f.pm, Atom(f.sensitive_bg, x), given=_eqo(f, o))
            pri = prob(f.pm, Atom(f.sensitive_bg, x))
            rs += [ratio(post, pri), ratio(pri, post)]
    return worst(rs)


def rule80(f, positive):
    m = f.model
    rates = [prob(f.pm, _eqo(f, positive), given=Atom(f.sensitive_bg, x)) for x in m.domain(f.sensitive_bg).values
             if prob(f.pm, Atom(f.sensitive_bg, x))]
    r = ratio(max(rates), min(rates))
    return (Fraction(1) if r is None else r), min(rates) * 5 >= max(rates) * 4


def lipschitz_slack(f, k):
    m = f.model
    xs = m.domain(f.sensitive_in).values
    d = {x: {o: prob(f.pm, _eqo(f, o), do={f.sensitive_in: x}) for o in m.domain(f.output).values} for x in xs}
    return worst(ratio(d[x][o], k[(x, y)] * d[y][o]) for x, y in itertools.permutations(xs, 2) for o in d[x])


def dp_ratio(df):
    """Per-row comparison of neighbouring databases, evaluating through do() on the effective rows."""
    m = df.model
    doms = [m.domain(d).values for d in df.rows]
    rs = []
    for i in range(len(df.rows)):
        for db1 in itertools.product(*doms):
            for x2 in doms[i]:
                if x2 == db1[i]:
                    continue
                db2 = db1[:i] + (x2,) + db1[i + 1:]
                for o in m.domain(df.output).values:
                    p = prob(df.pm, Atom(df.output, o), do=dict(zip(df.rows, df.effective(db1))))
                    q = prob(df.pm, Atom(df.output, o), do=dict(zip(df.rows, df.effective(db2))))
                    rs.append(ratio(p, q))
    return worst(rs)


# -- openness --------------------------------------------------------------------


def openness(pm, context, phi):
    p = prob(pm, phi, given=context)
    if p is None:
        return "Inconsistent", None
    return ("Open" if 0 < p < 1 else "Closed"), p


def classify(f, phi):
    """The theorem's four cases, in order, computed from scratch."""
    from caudit.prop import TRUE, conj, disj, eq, ne

    pm = f.pm
    outs = f.model.domain(f.output).values
    masses = {o: prob(pm, _eqo(f, o)) for o in outs}
    if openness(pm, TRUE, phi)[0] == "Closed":
        return "PhiClosedForSE", None
    forced = [o for o in outs if masses[o] == 1]
    if forced:
        return "Uninformative", forced[0]
    for o in outs:
        if openness(pm, eq(f.output, o), phi)[0] == "Closed":
            return "TriviallyCloses", o
    ok = all(openness(pm, disj(ne(f.output, o), phi), phi)[0] == "Open"
             and openness(pm, conj(eq(f.output, o), disj(ne(f.output, o), phi)), phi)[0] == "Closed"
             for o in outs if masses[o] > 0)
    return ("WitnessForEveryOutput" if ok else "NONE"), None


def independent(pm, lhs, rhs):
    ws = worlds(pm)
    def marg(vs):
        out = {}
        for w, p in ws:
            k = tuple(w[v] for v in vs)
            out[k] = out.get(k, 0) + p
        return out
    joint, left, right = marg(lhs + rhs), marg(lhs), marg(rhs)
    return all(joint.get(l + r, 0) == pl * pr for l, pl in left.items() for r, pr in right.items())
