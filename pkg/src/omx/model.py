"""Bounded truth evaluation in the intended interpretation.

Numbers are numerals, trees are the well-founded tree values the
evaluator produces, and membership in an inductively defined set is
unfolded along the tree argument.  Quantifiers over an infinite domain
cannot be decided by sampling, so evaluation is three-valued:

  * True / False are definite verdicts,
  * None means the bounded search saw no refutation and no witness.

A universal claim can only come back False (a counterexample within
the bound) or None; an existential claim only True or None.  Tests
lean on the asymmetry: the conclusion of a sound proof may evaluate
to None, never to False.
"""

from .eval import (
    Branching, EvalBudget, LEAF, Leaf, Numeral, TreeV, evaluate,
    mk_numeral,
)
from .formulas import (
    EqN, ForallN, ForallOmega, InI, InIAlpha, IsE, Not, Or, PredP,
)

_TRI_NOT = {True: False, False: True, None: None}


def _tri_or(a, b):
    if a is True or b is True:
        return True
    if a is False and b is False:
        return False
    return None


def truth(phi, env=None, defn=None, bound=8, budget=None):
    """Three-valued truth of phi under env, searching quantifiers and
    tree branching up to ``bound``.  Plain ints in env are taken as
    numerals."""
    if env is None:
        env = {}
    if budget is None:
        budget = EvalBudget()
    env = {k: mk_numeral(v) if isinstance(v, int) else v
           for k, v in env.items()}
    return _go(phi, env, defn, bound, budget)


def _go(phi, env, defn, bound, budget):
    budget.tick()
    if isinstance(phi, EqN):
        a = evaluate(phi.left, env, budget)
        b = evaluate(phi.right, env, budget)
        if not isinstance(a, Numeral) or not isinstance(b, Numeral):
            raise TypeError("equation between non-numbers")
        return a.value == b.value
    if isinstance(phi, IsE):
        v = evaluate(phi.alpha, env, budget)
        return isinstance(v.tree, Leaf)
    if isinstance(phi, Not):
        return _TRI_NOT[_go(phi.arg, env, defn, bound, budget)]
    if isinstance(phi, Or):
        a = _go(phi.left, env, defn, bound, budget)
        if a is True:
            return True
        return _tri_or(a, _go(phi.right, env, defn, bound, budget))
    if isinstance(phi, ForallN):
        return _forall(phi, (mk_numeral(i) for i in range(bound + 1)),
                       env, defn, bound, budget)
    if isinstance(phi, ForallOmega):
        return _forall(phi, sample_trees(bound), env, defn, bound, budget)
    if isinstance(phi, InIAlpha):
        t = evaluate(phi.arg, env, budget)
        a = evaluate(phi.alpha, env, budget)
        return member(t, a, defn, bound, budget)
    if isinstance(phi, InI):
        t = evaluate(phi.arg, env, budget)
        for a in sample_trees(bound):
            if member(t, a, defn, bound, budget) is True:
                return True
        return None
    if isinstance(phi, PredP):
        raise TypeError("free predicate hole has no truth value")
    raise TypeError("not a formula: %r" % (phi,))


def _forall(phi, instances, env, defn, bound, budget):
    # never True: a clean sweep proves nothing over an infinite domain
    inner = dict(env)
    for v in instances:
        inner[phi.var.name] = v
        if _go(phi.body, inner, defn, bound, budget) is False:
            return False
    return None


def member(t, a, defn, bound, budget):
    """Membership of number value t in the set generated along tree
    value a: nothing at a leaf; at a branching node, the operator body
    holds of t with the placeholder read as membership below a."""
    if defn is None:
        raise TypeError("membership needs an inductive definition")
    budget.tick()
    if isinstance(a.tree, Leaf):
        return False

    def below(tv):
        # tv belongs to some child stage?
        for i in range(bound + 1):
            child = TreeV(a.tree.child(i, budget))
            if member(tv, child, defn, bound, budget) is True:
                return True
        return None

    env = {defn.var.name: t}
    return _operator(defn.body, below, env, defn, bound, budget)


def _operator(psi, pred, env, defn, bound, budget):
    """Truth of an operator body whose placeholder atoms are decided by
    ``pred``; everything else is ordinary bounded evaluation."""

    def go(phi, env):
        if isinstance(phi, PredP):
            return pred(evaluate(phi.arg, env, budget))
        if isinstance(phi, Not):
            return _TRI_NOT[go(phi.arg, env)]
        if isinstance(phi, Or):
            a = go(phi.left, env)
            if a is True:
                return True
            return _tri_or(a, go(phi.right, env))
        if isinstance(phi, ForallN):
            inner = dict(env)
            for i in range(bound + 1):
                inner[phi.var.name] = mk_numeral(i)
                if go(phi.body, inner) is False:
                    return False
            return None
        return _go(phi, env, defn, bound, budget)

    return go(psi, dict(env))


def sample_trees(bound):
    """A small family of well-founded tree values for bounded searches:
    the leaf, then uniform towers of increasing height.  Towers reuse
    one child object, keeping them cheap to walk."""
    t = TreeV(LEAF)
    yield t
    for _ in range(min(bound, 4)):
        # producers hand back raw trees, the TreeV wrapper stays outside
        t = TreeV(Branching(lambda i, b, c=t: c.tree))
        yield t
