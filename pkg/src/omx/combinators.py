"""Derived combinators of the tree calculus.

Everything later stages need that the raw syntax does not give directly:
Cantor pairing and sequence codes, conditionals at every type, countable
and binary unions with their inclusion maps, subtree addressing (both at
runtime on tree values and as a term of the calculus), the tree recursor
enriched with access to the tree itself, the descent-counter bundle behind
the well-founded induction rule, and the parameterized recursion builders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .eval import (
    Branching, EvalBudget, FnV, LEAF, TreeV, apply_value, apply_values,
    evaluate, mk_numeral, trees_equal,
)
from .terms import (
    App, Arrow, ConstE, ConstSucc, FiniteType, FreshSupply, Lambda, NatLit,
    Pair, Product, Proj1, Proj2, RecN, RecOmega, TYPE_N, TYPE_O, Term, Var,
    app, arrow, is_pure_omega, lam, registry_fn, sub, sup, typecheck_closed,
)

_SUPPLY = FreshSupply(5 * 10 ** 8)


def _fresh(hint, ty, supply=None):
    return (supply or _SUPPLY).fresh(hint, ty)


# --------------------------------------------------------------------------
# Pairing and finite sequence codes.
#
# Sequences of naturals are coded as: empty = 0, and a nonempty sequence
# with first element i and remainder r is 1 + encode(i, r).  The first
# element of the sequence is the direction taken at the root, so one
# decoding step matches one subtree step.


def pair_encode(i: int, k: int) -> int:
    return (i + k) * (i + k + 1) // 2 + k


def pair_decode(n: int):
    w = (math.isqrt(8 * n + 1) - 1) // 2
    k = n - w * (w + 1) // 2
    return w - k, k


def seq_encode(path) -> int:
    code = 0
    for d in reversed(list(path)):
        code = 1 + pair_encode(d, code)
    return code


def seq_decode(code: int):
    out = []
    while code != 0:
        d, code = pair_decode(code - 1)
        out.append(d)
    return out


NPAIR = registry_fn("npair")
NFST = registry_fn("nfst")
NSND = registry_fn("nsnd")
PRED = registry_fn("pred")
ADD = registry_fn("add")
SUCC = ConstSucc()


def t_cons(d: Term, c: Term) -> Term:
    """Code of the sequence with first element d and remainder code c."""
    return App(SUCC, app(NPAIR, d, c))


def t_head(c: Term) -> Term:
    return app(NFST, App(PRED, c))


def t_tail(c: Term) -> Term:
    return app(NSND, App(PRED, c))


# --------------------------------------------------------------------------
# Conditionals at arbitrary type.  cond_at(ty, c, a, b) is a if c = 0 and
# b otherwise; both branches sit under a dummy binder, so only the chosen
# one is evaluated.


def cond_at(ty: FiniteType, c: Term, when_zero: Term, otherwise: Term,
            supply=None) -> Term:
    d1 = _fresh("d", TYPE_N, supply)
    d2 = _fresh("d", TYPE_N, supply)
    k = _fresh("k", TYPE_N, supply)
    p = _fresh("p", Arrow(TYPE_N, ty), supply)
    selector = RecN(Lambda(d1, when_zero), lam(k, p, Lambda(d2, otherwise)))
    return app(selector, c, NatLit(0))


# --------------------------------------------------------------------------
# The leaf discriminator: 0 at a leaf, 1 at a branching node.


def is_e_term(supply=None) -> Term:
    k = _fresh("k", Arrow(TYPE_N, TYPE_N), supply)
    return RecOmega(NatLit(0), Lambda(k, NatLit(1)))


# --------------------------------------------------------------------------
# Finite trees as closed terms (corpus and test plumbing).


def tree_term(spec, supply=None) -> Term:
    """Nested lists to a closed tree term; 'e' or None is a leaf.

    Children beyond the listed ones are leaves.
    """
    if spec is None or spec == "e":
        return ConstE()
    n = _fresh("n", TYPE_N, supply)
    body = ConstE()
    for i in reversed(range(len(spec))):
        child = tree_term(spec[i], supply)
        body = cond_at(TYPE_O, app(registry_fn("monus"), n, NatLit(i)),
                       child, body, supply)
    return sup(Lambda(n, body))


# --------------------------------------------------------------------------
# Runtime subtree addressing on tree values.


def subtree_at(tv, path, budget: EvalBudget):
    """Follow a list of directions; a leaf absorbs any remaining path."""
    for d in path:
        if tv is LEAF:
            return LEAF
        tv = tv.child(d, budget)
    return tv


# --------------------------------------------------------------------------
# Unions.  For a family t : N -> tau with tau pure, the union collects the
# k-th child of the i-th member as the encode(i,k)-th child of one tree,
# pointwise under any arrows.


class NotPureOmegaType(Exception):
    pass


def union_family(t: Term, tau: FiniteType, supply=None) -> Term:
    if not is_pure_omega(tau):
        raise NotPureOmegaType("union at non-pure type %r" % (tau,))
    if isinstance(tau, Arrow):
        x = _fresh("x", tau.domain, supply)
        i = _fresh("i", TYPE_N, supply)
        inner = union_family(Lambda(i, App(App(t, i), x)), tau.codomain, supply)
        return Lambda(x, inner)
    j = _fresh("j", TYPE_N, supply)
    return sup(Lambda(j, sub(App(t, app(NFST, j)), app(NSND, j))))


def binary_union(s: Term, t: Term, tau: FiniteType, supply=None) -> Term:
    i = _fresh("i", TYPE_N, supply)
    family = Lambda(i, cond_at(tau, i, s, t, supply))
    return union_family(family, tau, supply)


def union_injection(i: Term, supply=None) -> Term:
    """The inclusion map of family member i into the union: k -> (i,k)."""
    k = _fresh("k", TYPE_N, supply)
    return Lambda(k, app(NPAIR, i, k))


def pointwise_sub(a: Term, i: Term, tau: FiniteType, supply=None) -> Term:
    """a[i] at pure type: index under all the arrows."""
    if not is_pure_omega(tau):
        raise NotPureOmegaType("indexing at non-pure type %r" % (tau,))
    if isinstance(tau, Arrow):
        x = _fresh("x", tau.domain, supply)
        return Lambda(x, pointwise_sub(App(a, x), i, tau.codomain, supply))
    return sub(a, i)


# --------------------------------------------------------------------------
# Inclusion witnesses: a ⊑ b via an index map, checked at sampled points.


@dataclass(frozen=True)
class InclusionWitness:
    lhs: Term
    rhs: Term
    map: Term  # closed, N -> N


@dataclass
class InclusionReport:
    ok: bool
    checked: int
    mismatches: list = field(default_factory=list)


def sample_pure_value(tau, rng, depth: int = 2):
    """A throwaway value of pure type for probing: small trees, constant functions."""
    if isinstance(tau, Arrow):
        result = sample_pure_value(tau.codomain, rng, depth)
        return FnV(lambda arg, b, _r=result: _r, label="sample")
    return TreeV(_random_tree(rng, depth))


def _random_tree(rng, depth):
    if depth <= 0 or rng.random() < 0.4:
        return LEAF
    width = rng.randrange(1, 4)
    children = [_random_tree(rng, depth - 1) for _ in range(width)]

    def producer(i, budget, _c=children):
        return _c[i] if i < len(_c) else LEAF

    return Branching(producer)


def check_inclusion(w: InclusionWitness, indices, arg_tuples,
                    depth: int = 6, width: int = 4,
                    budget: EvalBudget = None) -> InclusionReport:
    budget = budget or EvalBudget()
    lhs = evaluate(w.lhs, {}, budget)
    rhs = evaluate(w.rhs, {}, budget)
    index_map = evaluate(w.map, {}, budget)
    report = InclusionReport(ok=True, checked=0)
    for args in arg_tuples:
        left_tree = apply_values(lhs, args, budget)
        right_tree = apply_values(rhs, args, budget)
        if left_tree.tree is not LEAF and right_tree.tree is LEAF:
            # all of a leaf's children are vacuous, so a branching node is
            # never included in one
            report.ok = False
            report.mismatches.append(("root", args))
            continue
        for i in indices:
            j = apply_value(index_map, mk_numeral(i), budget)
            lchild = (LEAF if left_tree.tree is LEAF
                      else left_tree.tree.child(i, budget))
            rchild = (LEAF if right_tree.tree is LEAF
                      else right_tree.tree.child(j.value, budget))
            report.checked += 1
            if not trees_equal(lchild, rchild, depth, width, budget):
                report.ok = False
                report.mismatches.append((i, args))
    return report


# --------------------------------------------------------------------------
# Tree recursion with access to the tree: F(e) = base, and at a branching
# node step receives both the child family and the recursive results.
# Implemented by pairing the recursor with a reconstruction of the tree.


def rec_omega_with_tree(tau: FiniteType, base: Term, step: Term,
                        supply=None) -> Term:
    """step : (N -> O) -> (N -> tau) -> tau; result : O -> tau.

    The underlying recursor runs at (O * tau), carrying a reconstruction
    of the subtree alongside each recursive result, so step can be handed
    the child family itself.
    """
    k = _fresh("k", Arrow(TYPE_N, Product(TYPE_O, tau)), supply)
    n1 = _fresh("n", TYPE_N, supply)
    n2 = _fresh("n", TYPE_N, supply)
    n3 = _fresh("n", TYPE_N, supply)
    rebuilt = sup(Lambda(n1, Proj1(App(k, n1))))
    children = Lambda(n2, Proj1(App(k, n2)))
    results = Lambda(n3, Proj2(App(k, n3)))
    enriched = RecOmega(
        Pair(ConstE(), base),
        Lambda(k, Pair(rebuilt, app(step, children, results))))
    a = _fresh("a", TYPE_O, supply)
    return Lambda(a, Proj2(App(enriched, a)))


# --------------------------------------------------------------------------
# Subtree addressing as a term: subtree_code_term() is a closed term
# s : O -> N -> O with s(alpha)(code of sigma) the subtree at sigma, and
# leaves absorbing any remainder.


def subtree_code_term(supply=None) -> Term:
    g = _fresh("g", Arrow(TYPE_N, TYPE_O), supply)
    r = _fresh("r", Arrow(TYPE_N, Arrow(TYPE_N, TYPE_O)), supply)
    s = _fresh("s", TYPE_N, supply)
    s2 = _fresh("s", TYPE_N, supply)
    base = Lambda(s, ConstE())
    step = lam(
        g, r,
        Lambda(s2, cond_at(TYPE_O, s2, sup(g),
                           app(r, t_head(s2), t_tail(s2)), supply)))
    return rec_omega_with_tree(Arrow(TYPE_N, TYPE_O), base, step, supply)


# --------------------------------------------------------------------------
# Appending one element at the far end of a sequence code.  The recursion
# peels from the front, so it runs on a fuel argument bounded by the code
# itself (a code is never smaller than the length of its sequence).


def append_code_term(supply=None) -> Term:
    c0 = _fresh("c", TYPE_N, supply)
    d0 = _fresh("d", TYPE_N, supply)
    f = _fresh("f", TYPE_N, supply)
    r = _fresh("r", arrow(TYPE_N, TYPE_N, TYPE_N), supply)
    c1 = _fresh("c", TYPE_N, supply)
    d1 = _fresh("d", TYPE_N, supply)
    base = lam(c0, d0, t_cons(d0, NatLit(0)))
    step = lam(f, r, lam(c1, d1, cond_at(
        TYPE_N, c1,
        t_cons(d1, NatLit(0)),
        t_cons(t_head(c1), app(r, t_tail(c1), d1)),
        supply)))
    fueled = RecN(base, step)
    c = _fresh("c", TYPE_N, supply)
    d = _fresh("d", TYPE_N, supply)
    return lam(c, d, app(fueled, c, c, d))


# --------------------------------------------------------------------------
# The descent-counter bundle (the computational content of the rule
# "phi(e,x), and phi at a selected child implies phi at the node, give
# phi everywhere").  All emitted terms are closed; the tree and the start
# value come in as lambda parameters.
#
#   k      : O -> N -> N -> (N * N)   path-code and state after n steps
#   counter: O -> (N -> N) -> N       steps to a leaf along a direction fn
#   path   : O -> N -> N -> N         direction chosen at step m
#   stage  : O -> N -> N -> N         counter from the step-m subtree on
#   search : O -> N -> N              n with the step-n subtree a leaf


@dataclass(frozen=True)
class KreiselBundle:
    k: Term
    counter: Term
    path: Term
    stage: Term
    search: Term


def counter_term(supply=None) -> Term:
    """RecOmega descent counter: 0 at a leaf, else 1 + recurse along f."""
    f0 = _fresh("f", Arrow(TYPE_N, TYPE_N), supply)
    rec = _fresh("r", Arrow(TYPE_N, Arrow(Arrow(TYPE_N, TYPE_N), TYPE_N)), supply)
    f1 = _fresh("f", Arrow(TYPE_N, TYPE_N), supply)
    n = _fresh("n", TYPE_N, supply)
    base = Lambda(f0, NatLit(0))
    step = Lambda(rec, Lambda(f1, App(SUCC, app(
        rec, App(f1, NatLit(0)),
        Lambda(n, App(f1, App(SUCC, n)))))))
    return RecOmega(base, step)


def kreisel_bundle(phi: Term, selector: Term, update: Term,
                   supply=None) -> KreiselBundle:
    """selector/update : O -> N -> N pick the child and the next state.

    phi has the same type and is only typechecked: the terms do not
    consult it, its role is in the statement being witnessed.
    """
    want = arrow(TYPE_O, TYPE_N, TYPE_N)
    for label, t in (("phi", phi), ("selector", selector), ("update", update)):
        got = typecheck_closed(t)
        if got != want:
            raise TypeError("%s must have type %r, got %r" % (label, want, got))

    subcode = subtree_code_term(supply)
    append = append_code_term(supply)
    counter = counter_term(supply)
    pair_nn = Product(TYPE_N, TYPE_N)

    alpha = _fresh("alpha", TYPE_O, supply)
    x = _fresh("x", TYPE_N, supply)
    n = _fresh("n", TYPE_N, supply)
    kn = _fresh("kn", pair_nn, supply)

    # k(0) = (empty, x); k(n+1) steps while the addressed subtree is not a leaf
    t_here = app(subcode, alpha, Proj1(kn))
    knext = Pair(
        app(append, Proj1(kn), app(selector, t_here, Proj2(kn))),
        app(update, t_here, Proj2(kn)))
    k_core = RecN(Pair(NatLit(0), x),
                  lam(n, kn, cond_at(pair_nn, App(is_e_term(supply), t_here),
                                     kn, knext, supply)))
    k_term = lam(alpha, x, k_core)

    m = _fresh("m", TYPE_N, supply)
    mm = _fresh("m", TYPE_N, supply)
    j = _fresh("j", TYPE_N, supply)

    def k_at(idx):
        return app(k_core, idx)

    path_body = app(selector, app(subcode, alpha, Proj1(k_at(m))),
                    Proj2(k_at(m)))
    path_term = lam(alpha, x, Lambda(m, path_body))

    path_open = Lambda(m, path_body)  # alpha, x free
    stage_body = app(counter,
                     app(subcode, alpha, Proj1(k_at(mm))),
                     Lambda(j, App(path_open, app(ADD, j, mm))))
    stage_term = lam(alpha, x, Lambda(mm, stage_body))

    search_term = lam(alpha, x, app(counter, alpha, path_open))

    return KreiselBundle(k=k_term, counter=counter, path=path_term,
                         stage=stage_term, search=search_term)


# --------------------------------------------------------------------------
# Parameterized recursion builders.  These realize the rules "theta(e,x),
# and theta at every child for f-modified parameters implies theta at the
# node" (tree form) and its numeric analogue.  The emitted h takes the
# node, a parameter function g : N -> tau, and a sequence code, and walks
# the code rewriting g through f at every step.


def param_rec_omega(tau: FiniteType, f: Term, supply=None) -> Term:
    """f : O -> tau -> N -> N -> tau; result h : O -> (N->tau) -> N -> (N->tau).

    h(alpha, g, empty) = g; h(e, g, sigma) = g; and at a branching node
    with sigma = (i)^sigma', h(alpha, g, sigma) =
    h(alpha[i], lam l. f(alpha, g(l0), i, l1), sigma').
    """
    g_ty = Arrow(TYPE_N, tau)
    inner_ty = arrow(g_ty, TYPE_N, g_ty)

    fam = _fresh("h", Arrow(TYPE_N, TYPE_O), supply)
    rec = _fresh("r", Arrow(TYPE_N, inner_ty), supply)
    g0 = _fresh("g", g_ty, supply)
    s0 = _fresh("s", TYPE_N, supply)
    g1 = _fresh("g", g_ty, supply)
    s1 = _fresh("s", TYPE_N, supply)
    l = _fresh("l", TYPE_N, supply)

    base = lam(g0, Lambda(s0, g0))
    here = sup(fam)
    modified = Lambda(l, app(f, here, App(g1, app(NFST, l)),
                             t_head(s1), app(NSND, l)))
    step = lam(fam, rec, lam(g1, Lambda(s1, cond_at(
        g_ty, s1, g1,
        app(rec, t_head(s1), modified, t_tail(s1)),
        supply))))
    return rec_omega_with_tree(inner_ty, base, step, supply)


def param_rec_omega_conclusion(h: Term, alpha: Term, x: Term,
                               tau: FiniteType, supply=None) -> Term:
    """The instance h(alpha, lam i. x, empty)(0) used by callers."""
    i = _fresh("i", TYPE_N, supply)
    return app(h, alpha, Lambda(i, x), NatLit(0), NatLit(0))


def param_rec_n(tau: FiniteType, f: Term, supply=None) -> Term:
    """f : tau -> N -> N -> tau; result h : N -> (N->tau) -> N -> (N->tau).

    Numeric analogue: the sequence code degenerates to a step count.
    """
    g_ty = Arrow(TYPE_N, tau)
    inner_ty = arrow(g_ty, TYPE_N, g_ty)

    n = _fresh("n", TYPE_N, supply)
    rec = _fresh("r", inner_ty, supply)
    g0 = _fresh("g", g_ty, supply)
    m0 = _fresh("m", TYPE_N, supply)
    g1 = _fresh("g", g_ty, supply)
    m1 = _fresh("m", TYPE_N, supply)
    l = _fresh("l", TYPE_N, supply)

    base = lam(g0, Lambda(m0, g0))
    modified = Lambda(l, app(f, App(g1, app(NFST, l)), n, app(NSND, l)))
    step = lam(n, rec, lam(g1, Lambda(m1, cond_at(
        g_ty, m1, g1,
        app(rec, modified, App(PRED, m1)),
        supply))))
    return RecN(base, step)
