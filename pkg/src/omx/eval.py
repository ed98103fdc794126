"""Environment-based weak evaluation for the tree-recursion calculus.

Values of tree type are demand driven: a Branching value holds a producer
and materializes children only at demanded indices, memoized per index.
Evaluation is deterministic and budgeted; exceeding the budget raises
instead of hanging, which is the operational stand-in for well-foundedness
of user-supplied generators.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .terms import (
    App, ConstE, ConstSucc, ConstSup, ConstSupInv, ConstZero, Lambda, NatLit,
    Pair, PrimRecFn, Proj1, Proj2, REGISTRY, RecN, RecOmega, Var,
)

DEFAULT_BUDGET = 10 ** 7


class BudgetExhausted(Exception):
    pass


class EvalBudget:
    __slots__ = ("remaining", "spent")

    def __init__(self, limit: int = DEFAULT_BUDGET):
        self.remaining = limit
        self.spent = 0

    def tick(self, n: int = 1):
        self.remaining -= n
        self.spent += n
        if self.remaining < 0:
            raise BudgetExhausted("evaluation budget exhausted after %d steps"
                                  % self.spent)


# --------------------------------------------------------------------------
# Values


class Leaf:
    __slots__ = ()

    def __repr__(self):
        return "Leaf"


LEAF = Leaf()


class Branching:
    """A tree node with countably many children, produced on demand.

    producer(i, budget) -> tree value.  The memo is locked so that a value
    shared between threads stays consistent; within one evaluation the
    lock is uncontended.
    """

    __slots__ = ("producer", "memo", "lock")

    def __init__(self, producer):
        self.producer = producer
        self.memo = {}
        self.lock = threading.RLock()

    def child(self, i: int, budget: EvalBudget):
        with self.lock:
            hit = self.memo.get(i)
            if hit is None:
                hit = self.producer(i, budget)
                self.memo[i] = hit
            return hit

    def __repr__(self):
        return "Branching(%d materialized)" % len(self.memo)


@dataclass(frozen=True)
class Numeral:
    value: int


_SMALL = [Numeral(i) for i in range(257)]


def mk_numeral(n: int) -> Numeral:
    # interning keeps identity-keyed memo tables effective for small values
    if 0 <= n < 257:
        return _SMALL[n]
    return Numeral(n)


@dataclass(frozen=True, eq=False)
class PairV:
    left: "Value"
    right: "Value"


@dataclass(frozen=True, eq=False)
class TreeV:
    tree: object  # Leaf or Branching


class FnV:
    """Function value: either a term closure or a builtin python step.

    Applications are memoized per argument key, so that re-applying the
    same function object to the same argument returns the identical result
    object.  Later stages lean on that: identical value objects are what
    make two interpretations of a formula come out as the same object.
    """

    __slots__ = ("run", "memo", "label")

    def __init__(self, run, label=""):
        self.run = run
        self.memo = {}
        self.label = label

    def __repr__(self):
        return "FnV(%s)" % (self.label or "closure")


Value = object


def value_key(v):
    """Hashable key for memo tables: numerals by value, the rest by identity.

    Callers must keep v alive while the key is in use (memo entries store
    the value alongside the result for exactly that reason).
    """
    if isinstance(v, Numeral):
        return ("n", v.value)
    if isinstance(v, PairV):
        return ("p", value_key(v.left), value_key(v.right))
    return ("id", id(v))


def apply_value(fn: FnV, arg: Value, budget: EvalBudget) -> Value:
    budget.tick()
    key = value_key(arg)
    hit = fn.memo.get(key)
    if hit is not None:
        return hit[1]
    result = fn.run(arg, budget)
    fn.memo[key] = (arg, result)
    return result


def apply_values(fn: Value, args, budget: EvalBudget) -> Value:
    for a in args:
        fn = apply_value(fn, a, budget)
    return fn


# --------------------------------------------------------------------------
# Evaluation


def evaluate(t, env=None, budget=None) -> Value:
    if env is None:
        env = {}
    if budget is None:
        budget = EvalBudget()
    return _eval(t, env, budget)


def _eval(t, env, budget):
    budget.tick()
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise KeyError("evaluation of open term: %s unbound" % t.name)
    if isinstance(t, NatLit):
        return mk_numeral(t.value)
    if isinstance(t, ConstZero):
        return _SMALL[0]
    if isinstance(t, ConstSucc):
        return _SUCC
    if isinstance(t, PrimRecFn):
        return _registry_value(t.name)
    if isinstance(t, ConstE):
        return _TREE_LEAF
    if isinstance(t, ConstSup):
        return _SUP
    if isinstance(t, ConstSupInv):
        return _SUP_INV
    if isinstance(t, Lambda):
        binder, body = t.binder, t.body

        def run(arg, b, _binder=binder, _body=body, _env=env):
            return _eval(_body, {**_env, _binder.name: arg}, b)

        return FnV(run, label=binder.name)
    if isinstance(t, App):
        fn = _eval(t.fn, env, budget)
        arg = _eval(t.arg, env, budget)
        return apply_value(fn, arg, budget)
    if isinstance(t, Pair):
        return PairV(_eval(t.left, env, budget), _eval(t.right, env, budget))
    if isinstance(t, Proj1):
        return _eval(t.arg, env, budget).left
    if isinstance(t, Proj2):
        return _eval(t.arg, env, budget).right
    if isinstance(t, RecN):
        base = _eval(t.base, env, budget)
        step = _eval(t.step, env, budget)
        return _rec_n_value(base, step)
    if isinstance(t, RecOmega):
        base = _eval(t.base, env, budget)
        step = _eval(t.step, env, budget)
        return _rec_omega_value(base, step)
    raise TypeError("cannot evaluate %r" % (t,))


_SUCC = FnV(lambda v, b: mk_numeral(v.value + 1), label="succ")
_TREE_LEAF = TreeV(LEAF)


def _sup_run(h, budget):
    def producer(i, b, _h=h):
        child = apply_value(_h, mk_numeral(i), b)
        return child.tree

    return TreeV(Branching(producer))


_SUP = FnV(_sup_run, label="sup")


def _sup_inv_run(v, budget):
    tree = v.tree

    def run(idx, b, _tree=tree):
        if _tree is LEAF:
            return _TREE_LEAF
        return TreeV(_tree.child(idx.value, b))

    return FnV(run, label="sup_inv")


_SUP_INV = FnV(_sup_inv_run, label="sup_inv")


def _registry_value(name):
    entry = REGISTRY[name]

    def curried(collected):
        def run(arg, b):
            args = collected + (arg.value,)
            if len(args) == entry.arity:
                b.tick()
                return mk_numeral(entry.fn(*args))
            return FnV(curried(args), label=entry.name)

        return run

    return FnV(curried(()), label=name)


def _rec_n_value(base, step):
    # cache[k] is the value at argument k; computed iteratively so deep
    # numerals do not recurse in python
    cache = [base]

    def run(arg, b):
        n = arg.value
        while len(cache) <= n:
            k = len(cache) - 1
            fk = apply_value(step, mk_numeral(k), b)
            cache.append(apply_value(fk, cache[k], b))
        return cache[n]

    return FnV(run, label="rec_n")


def _rec_omega_value(base, step):
    memo = {}

    def recurse(tv, b):
        key = id(tv)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if tv is LEAF:
            result = base
        else:
            def family(idx, bb, _tv=tv):
                return recurse(_tv.child(idx.value, bb), bb)

            result = apply_value(step, FnV(family, label="rec_omega_children"), b)
        memo[key] = (tv, result)
        return result

    def run(arg, b):
        return recurse(arg.tree, b)

    return FnV(run, label="rec_omega")


# --------------------------------------------------------------------------
# Observational comparison and finite trees (test/report plumbing, never
# part of extracted terms: the calculus has no equality at tree type)


def finite_tree(children):
    """Build a tree value from nested lists; None or 'e' is a leaf."""
    if children is None or children == "e":
        return LEAF
    materialized = [finite_tree(c) for c in children]

    def producer(i, budget, _m=materialized):
        if i < len(_m):
            return _m[i]
        return LEAF

    return Branching(producer)


def trees_equal(a, b, depth: int, width: int, budget: EvalBudget) -> bool:
    """Synchronized probing to the given depth/width bounds."""
    if a is LEAF or b is LEAF:
        return a is b or (a is LEAF and b is LEAF)
    if depth <= 0:
        return True
    for i in range(width):
        if not trees_equal(a.child(i, budget), b.child(i, budget),
                           depth - 1, width, budget):
            return False
    return True


def values_equal(a, b, depth: int, width: int, budget: EvalBudget) -> bool:
    if isinstance(a, Numeral) and isinstance(b, Numeral):
        return a.value == b.value
    if isinstance(a, PairV) and isinstance(b, PairV):
        return (values_equal(a.left, b.left, depth, width, budget)
                and values_equal(a.right, b.right, depth, width, budget))
    if isinstance(a, TreeV) and isinstance(b, TreeV):
        return trees_equal(a.tree, b.tree, depth, width, budget)
    return False


def tree_to_spec(tv, depth: int, width: int, budget: EvalBudget):
    """Materialize a tree into nested lists for display, probed to bounds."""
    if tv is LEAF:
        return "e"
    if depth <= 0:
        return "..."
    return [tree_to_spec(tv.child(i, budget), depth - 1, width, budget)
            for i in range(width)]
