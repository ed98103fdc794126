"""Random generators shared across test modules.

Every draw goes through a caller-provided random.Random so seeds pin the
whole suite.
"""

from omx.formulas import (
    EqN, IsE, Not, Or, ForallN, PredP, conj, exists_n, imp,
)
from omx.terms import ConstSucc, FreshSupply, NatLit, TYPE_N, app, registry_fn


def random_arith_term(rng, scope, depth):
    """First-order term over number variables in scope."""
    if depth <= 0 or rng.random() < 0.45:
        if scope and rng.random() < 0.7:
            return rng.choice(scope)
        return NatLit(rng.randrange(5))
    op = rng.choice(("succ", "add", "add", "mul"))
    if op == "succ":
        return app(ConstSucc(), random_arith_term(rng, scope, depth - 1))
    return app(registry_fn(op),
               random_arith_term(rng, scope, depth - 1),
               random_arith_term(rng, scope, depth - 1))


def random_formula(rng, depth, scope_n, supply=None, allow_pred=False,
                   scope_o=(), sugar=True):
    """Core-connective formula over equations (plus optional placeholder
    atoms and leaf tests on tree variables in scope_o)."""
    supply = supply or FreshSupply()
    scope_n = list(scope_n)

    def atom():
        kinds = ["eq", "eq"]
        if allow_pred:
            kinds.append("pred")
        if scope_o:
            kinds.append("ise")
        k = rng.choice(kinds)
        if k == "eq":
            return EqN(random_arith_term(rng, scope_n, 2),
                       random_arith_term(rng, scope_n, 2))
        if k == "pred":
            return PredP(random_arith_term(rng, scope_n, 2))
        return IsE(rng.choice(list(scope_o)))

    def go(depth, scope_n):
        if depth <= 0 or rng.random() < 0.3:
            return atom()
        kinds = ["or", "not", "forall"]
        if sugar:
            kinds += ["imp", "and", "ex"]
        k = rng.choice(kinds)
        if k == "or":
            return Or(go(depth - 1, scope_n), go(depth - 1, scope_n))
        if k == "not":
            return Not(go(depth - 1, scope_n))
        if k == "imp":
            return imp(go(depth - 1, scope_n), go(depth - 1, scope_n))
        if k == "and":
            return conj(go(depth - 1, scope_n), go(depth - 1, scope_n))
        v = supply.fresh("q", TYPE_N)
        body = go(depth - 1, scope_n + [v])
        if k == "forall":
            return ForallN(v, body)
        return exists_n(v, body)

    return go(depth, scope_n)
