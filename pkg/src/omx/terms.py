"""Finite types and terms of the tree-recursion calculus.

The calculus is Goedel's T extended with a base type O of well-founded
countably-branching trees: a leaf constant `e`, a branching constructor
`sup : (N -> O) -> O`, its inverse `sup_inv : O -> (N -> O)`, and a
recursor over O alongside the usual recursor over N.  Terms are immutable;
equality of term objects is identity, structural comparison goes through
`alpha_eq`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional


# --------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class BaseN:
    def __repr__(self):
        return "N"


@dataclass(frozen=True)
class BaseOmega:
    def __repr__(self):
        return "O"


@dataclass(frozen=True)
class Arrow:
    domain: "FiniteType"
    codomain: "FiniteType"

    def __repr__(self):
        return "(%r -> %r)" % (self.domain, self.codomain)


@dataclass(frozen=True)
class Product:
    left: "FiniteType"
    right: "FiniteType"

    def __repr__(self):
        return "(%r * %r)" % (self.left, self.right)


FiniteType = object  # BaseN | BaseOmega | Arrow | Product

TYPE_N = BaseN()
TYPE_O = BaseOmega()


def arrow(*tys):
    """arrow(a, b, c) = a -> (b -> c)."""
    if len(tys) < 2:
        raise ValueError("arrow needs at least two types")
    result = tys[-1]
    for ty in reversed(tys[:-1]):
        result = Arrow(ty, result)
    return result


def is_pure_omega(ty) -> bool:
    """Pure tree types: O itself and arrows between pure types."""
    if isinstance(ty, BaseOmega):
        return True
    if isinstance(ty, Arrow):
        return is_pure_omega(ty.domain) and is_pure_omega(ty.codomain)
    return False


def pure_decompose(ty):
    """Split a pure type as (sigma_1, ..., sigma_k) with codomain O."""
    if not is_pure_omega(ty):
        raise ValueError("not a pure tree type: %r" % (ty,))
    args = []
    while isinstance(ty, Arrow):
        args.append(ty.domain)
        ty = ty.codomain
    return tuple(args)


# --------------------------------------------------------------------------
# Terms
#
# Term dataclasses use identity equality (eq=False): terms appear as
# dictionary keys in evaluator memos, and accidental deep comparison of
# large recursor terms would be quadratic.  alpha_eq below is the
# structural comparison.


@dataclass(frozen=True, eq=False)
class Var:
    name: str
    ty: FiniteType


@dataclass(frozen=True, eq=False)
class NatLit:
    value: int


@dataclass(frozen=True, eq=False)
class ConstZero:
    pass


@dataclass(frozen=True, eq=False)
class ConstSucc:
    pass


@dataclass(frozen=True, eq=False)
class PrimRecFn:
    name: str
    arity: int


@dataclass(frozen=True, eq=False)
class ConstE:
    pass


@dataclass(frozen=True, eq=False)
class ConstSup:
    pass


@dataclass(frozen=True, eq=False)
class ConstSupInv:
    pass


@dataclass(frozen=True, eq=False)
class Lambda:
    binder: Var
    body: "Term"


@dataclass(frozen=True, eq=False)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True, eq=False)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True, eq=False)
class Proj1:
    arg: "Term"


@dataclass(frozen=True, eq=False)
class Proj2:
    arg: "Term"


@dataclass(frozen=True, eq=False)
class RecN:
    """Recursor over N: (rec_n a g)(0) = a, (rec_n a g)(x+1) = g x ((rec_n a g) x)."""

    base: "Term"
    step: "Term"


@dataclass(frozen=True, eq=False)
class RecOmega:
    """Recursor over O: F(e) = a, F(sup h) = g (lambda n. F(h n))."""

    base: "Term"
    step: "Term"


Term = object

TERM_NODES = (Var, NatLit, ConstZero, ConstSucc, PrimRecFn, ConstE, ConstSup,
              ConstSupInv, Lambda, App, Pair, Proj1, Proj2, RecN, RecOmega)


def app(fn, *args):
    """Left-nested application."""
    for a in args:
        fn = App(fn, a)
    return fn


def lam(*parts):
    """lam(x, y, body) = Lambda(x, Lambda(y, body))."""
    *binders, body = parts
    for v in reversed(binders):
        body = Lambda(v, body)
    return body


def numeral(n: int) -> Term:
    if n < 0:
        raise ValueError("numerals are naturals")
    return NatLit(n)


def sup(t: Term) -> Term:
    return App(ConstSup(), t)


def sub(t: Term, idx: Term) -> Term:
    """The idx-th immediate subtree, sup_inv(t)(idx)."""
    return App(App(ConstSupInv(), t), idx)


E = ConstE


# --------------------------------------------------------------------------
# Fresh variables
#
# Parsers and proof transformations rename every binder through a supply,
# so bound names are globally unique within a run and substitution rarely
# needs on-the-fly renaming.  Generated names carry a tilde; user binders
# are renamed on parse, so the two namespaces cannot collide.


class FreshSupply:
    def __init__(self, start: int = 0):
        self.counter = start

    def fresh(self, hint: str, ty) -> Var:
        self.counter += 1
        base = hint.split("~", 1)[0] or "v"
        return Var("%s~%d" % (base, self.counter), ty)


# --------------------------------------------------------------------------
# Structural traversal


def free_vars(t: Term) -> dict:
    """Free variables of t, keyed by name."""
    out: dict = {}

    def go(t, bound):
        if isinstance(t, Var):
            if t.name not in bound:
                out.setdefault(t.name, t)
        elif isinstance(t, Lambda):
            go(t.body, bound | {t.binder.name})
        elif isinstance(t, App):
            go(t.fn, bound)
            go(t.arg, bound)
        elif isinstance(t, Pair):
            go(t.left, bound)
            go(t.right, bound)
        elif isinstance(t, (Proj1, Proj2)):
            go(t.arg, bound)
        elif isinstance(t, (RecN, RecOmega)):
            go(t.base, bound)
            go(t.step, bound)
        # constants and literals bind nothing

    go(t, frozenset())
    return out


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Lambda):
        yield from subterms(t.body)
    elif isinstance(t, App):
        yield from subterms(t.fn)
        yield from subterms(t.arg)
    elif isinstance(t, Pair):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, (Proj1, Proj2)):
        yield from subterms(t.arg)
    elif isinstance(t, (RecN, RecOmega)):
        yield from subterms(t.base)
        yield from subterms(t.step)


def subst(t: Term, name: str, replacement: Term,
          supply: Optional[FreshSupply] = None) -> Term:
    """Capture-avoiding substitution of `replacement` for Var(name)."""
    if name not in free_vars(t):
        return t
    if supply is None:
        supply = _SUBST_SUPPLY
    repl_free = free_vars(replacement)

    def go(t, ren):
        if isinstance(t, Var):
            if t.name == name:
                return replacement
            if t.name in ren:
                return ren[t.name]
            return t
        if isinstance(t, Lambda):
            b = t.binder
            if b.name == name:
                return t
            if b.name in repl_free:
                nb = supply.fresh(b.name, b.ty)
                return Lambda(nb, go(t.body, {**ren, b.name: nb}))
            return Lambda(b, go(t.body, ren))
        if isinstance(t, App):
            return App(go(t.fn, ren), go(t.arg, ren))
        if isinstance(t, Pair):
            return Pair(go(t.left, ren), go(t.right, ren))
        if isinstance(t, Proj1):
            return Proj1(go(t.arg, ren))
        if isinstance(t, Proj2):
            return Proj2(go(t.arg, ren))
        if isinstance(t, RecN):
            return RecN(go(t.base, ren), go(t.step, ren))
        if isinstance(t, RecOmega):
            return RecOmega(go(t.base, ren), go(t.step, ren))
        return t

    return go(t, {})


# Renaming inside subst only ever has to dodge names already present in the
# argument terms, so a shared supply is fine even across runs.
_SUBST_SUPPLY = FreshSupply(10 ** 9)


def alpha_eq(s: Term, t: Term) -> bool:
    def go(s, t, env_s, env_t):
        if isinstance(s, Var) and isinstance(t, Var):
            a = env_s.get(s.name, s.name)
            b = env_t.get(t.name, t.name)
            return a == b and (s.name in env_s) == (t.name in env_t)
        if type(s) is not type(t):
            # a numeral literal and an unapplied zero constant denote the
            # same term for comparison purposes
            if isinstance(s, NatLit) and s.value == 0 and isinstance(t, ConstZero):
                return True
            if isinstance(t, NatLit) and t.value == 0 and isinstance(s, ConstZero):
                return True
            return False
        if isinstance(s, NatLit):
            return s.value == t.value
        if isinstance(s, (ConstZero, ConstSucc, ConstE, ConstSup, ConstSupInv)):
            return True
        if isinstance(s, PrimRecFn):
            return s.name == t.name
        if isinstance(s, Lambda):
            tag = object()
            return go(s.body, t.body,
                      {**env_s, s.binder.name: tag},
                      {**env_t, t.binder.name: tag})
        if isinstance(s, App):
            return go(s.fn, t.fn, env_s, env_t) and go(s.arg, t.arg, env_s, env_t)
        if isinstance(s, Pair):
            return go(s.left, t.left, env_s, env_t) and go(s.right, t.right, env_s, env_t)
        if isinstance(s, (Proj1, Proj2)):
            return go(s.arg, t.arg, env_s, env_t)
        if isinstance(s, (RecN, RecOmega)):
            return (go(s.base, t.base, env_s, env_t)
                    and go(s.step, t.step, env_s, env_t))
        raise TypeError("not a term: %r" % (s,))

    return go(s, t, {}, {})


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


# --------------------------------------------------------------------------
# Typechecking


class TermTypeError(Exception):
    def __init__(self, message, subterm=None):
        super().__init__(message)
        self.subterm = subterm


class UnboundVariable(TermTypeError):
    pass


def typecheck(t: Term, ctx: Optional[dict] = None) -> FiniteType:
    """Infer the unique type of t.

    ctx maps variable names to types; free variables not in ctx fall back
    to their annotation (every Var carries one), which keeps internal
    callers from re-deriving contexts they already know.
    """
    ctx = {} if ctx is None else dict(ctx)
    return _infer(t, ctx, strict=ctx != {})


def typecheck_closed(t: Term) -> FiniteType:
    """Typecheck requiring t to be closed."""
    return _infer(t, {}, strict=True)


def _infer(t, ctx, strict):
    if isinstance(t, Var):
        if t.name in ctx:
            ty = ctx[t.name]
            if ty != t.ty:
                raise TermTypeError(
                    "variable %s annotated %r but bound at %r" % (t.name, t.ty, ty), t)
            return ty
        if strict:
            raise UnboundVariable("unbound variable %s" % t.name, t)
        return t.ty
    if isinstance(t, NatLit) or isinstance(t, ConstZero):
        return TYPE_N
    if isinstance(t, ConstSucc):
        return Arrow(TYPE_N, TYPE_N)
    if isinstance(t, PrimRecFn):
        entry = REGISTRY.get(t.name)
        if entry is None:
            raise TermTypeError("unknown primitive recursive symbol %s" % t.name, t)
        return entry.ty
    if isinstance(t, ConstE):
        return TYPE_O
    if isinstance(t, ConstSup):
        return Arrow(Arrow(TYPE_N, TYPE_O), TYPE_O)
    if isinstance(t, ConstSupInv):
        return Arrow(TYPE_O, Arrow(TYPE_N, TYPE_O))
    if isinstance(t, Lambda):
        body = _infer(t.body, {**ctx, t.binder.name: t.binder.ty}, strict)
        return Arrow(t.binder.ty, body)
    if isinstance(t, App):
        fn = _infer(t.fn, ctx, strict)
        arg = _infer(t.arg, ctx, strict)
        if not isinstance(fn, Arrow):
            raise TermTypeError("applied term of non-arrow type %r" % (fn,), t)
        if fn.domain != arg:
            raise TermTypeError(
                "argument type %r where %r expected" % (arg, fn.domain), t)
        return fn.codomain
    if isinstance(t, Pair):
        return Product(_infer(t.left, ctx, strict), _infer(t.right, ctx, strict))
    if isinstance(t, Proj1):
        ty = _infer(t.arg, ctx, strict)
        if not isinstance(ty, Product):
            raise TermTypeError("projection from non-product %r" % (ty,), t)
        return ty.left
    if isinstance(t, Proj2):
        ty = _infer(t.arg, ctx, strict)
        if not isinstance(ty, Product):
            raise TermTypeError("projection from non-product %r" % (ty,), t)
        return ty.right
    if isinstance(t, RecN):
        base = _infer(t.base, ctx, strict)
        step = _infer(t.step, ctx, strict)
        want = arrow(TYPE_N, base, base)
        if step != want:
            raise TermTypeError(
                "recursor step has type %r, expected %r" % (step, want), t)
        return Arrow(TYPE_N, base)
    if isinstance(t, RecOmega):
        base = _infer(t.base, ctx, strict)
        step = _infer(t.step, ctx, strict)
        want = Arrow(Arrow(TYPE_N, base), base)
        if step != want:
            raise TermTypeError(
                "tree recursor step has type %r, expected %r" % (step, want), t)
        return Arrow(TYPE_O, base)
    raise TermTypeError("not a term: %r" % (t,), t)


# --------------------------------------------------------------------------
# Primitive recursive function registry
#
# The calculus does not fix a function alphabet, so we commit to a small
# registry sufficient for pairing, sequence coding, and decidable
# comparisons.  Each entry carries the python semantics used by the
# evaluator and the defining equations used by equation certificates.


def _cantor_encode(i: int, k: int) -> int:
    return (i + k) * (i + k + 1) // 2 + k


def _cantor_decode(n: int):
    # row index by integer sqrt, no floats: codes go beyond 2**53
    w = (_isqrt(8 * n + 1) - 1) // 2
    k = n - w * (w + 1) // 2
    return w - k, k


def _isqrt(n: int) -> int:
    import math
    return math.isqrt(n)


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    arity: int
    ty: FiniteType
    fn: Callable
    # defining equations (params, lhs, rhs); certificate steps may use
    # either orientation
    schemata: tuple = ()


def _nary(n):
    return arrow(*([TYPE_N] * (n + 1)))


def _build_registry():
    def v(name):
        return Var(name, TYPE_N)

    x, y, z, a, b, c = v("x"), v("y"), v("z"), v("a"), v("b"), v("c")

    def fnsym(name):
        return PrimRecFn(name, REGISTRY_ARITIES[name])

    S = ConstSucc()

    def schod(name, params, lhs_args, rhs):
        return (params, app(fnsym(name), *lhs_args), rhs)

    entries = [
        RegistryEntry(
            "pred", 1, _nary(1), lambda n: max(n - 1, 0),
            (
                ((), app(fnsym("pred"), NatLit(0)), NatLit(0)),
                ((x,), app(fnsym("pred"), App(S, x)), x),
            )),
        RegistryEntry(
            "add", 2, _nary(2), lambda m, n: m + n,
            (
                ((x,), app(fnsym("add"), x, NatLit(0)), x),
                ((x, y), app(fnsym("add"), x, App(S, y)),
                 App(S, app(fnsym("add"), x, y))),
            )),
        RegistryEntry(
            "mul", 2, _nary(2), lambda m, n: m * n,
            (
                ((x,), app(fnsym("mul"), x, NatLit(0)), NatLit(0)),
                ((x, y), app(fnsym("mul"), x, App(S, y)),
                 app(fnsym("add"), app(fnsym("mul"), x, y), x)),
            )),
        RegistryEntry(
            "monus", 2, _nary(2), lambda m, n: max(m - n, 0),
            (
                ((x,), app(fnsym("monus"), x, NatLit(0)), x),
                ((x, y), app(fnsym("monus"), x, App(S, y)),
                 app(fnsym("pred"), app(fnsym("monus"), x, y))),
            )),
        RegistryEntry(
            "npair", 2, _nary(2), _cantor_encode,
            (
                ((z,), app(fnsym("npair"), app(fnsym("nfst"), z),
                           app(fnsym("nsnd"), z)), z),
            )),
        RegistryEntry(
            "nfst", 1, _nary(1), lambda n: _cantor_decode(n)[0],
            (
                ((x, y), app(fnsym("nfst"), app(fnsym("npair"), x, y)), x),
            )),
        RegistryEntry(
            "nsnd", 1, _nary(1), lambda n: _cantor_decode(n)[1],
            (
                ((x, y), app(fnsym("nsnd"), app(fnsym("npair"), x, y)), y),
            )),
        RegistryEntry(
            "eq", 2, _nary(2), lambda m, n: 1 if m == n else 0,
            (
                ((x,), app(fnsym("eq"), x, x), NatLit(1)),
            )),
        RegistryEntry("lt", 2, _nary(2), lambda m, n: 1 if m < n else 0),
        RegistryEntry("le", 2, _nary(2), lambda m, n: 1 if m <= n else 0),
        RegistryEntry(
            "ifz", 3, _nary(3), lambda c, a, b: a if c == 0 else b,
            (
                ((a, b), app(fnsym("ifz"), NatLit(0), a, b), a),
                ((c, a, b), app(fnsym("ifz"), App(S, c), a, b), b),
            )),
    ]
    return {e.name: e for e in entries}


REGISTRY_ARITIES = {
    "pred": 1, "add": 2, "mul": 2, "monus": 2,
    "npair": 2, "nfst": 1, "nsnd": 1,
    "eq": 2, "lt": 2, "le": 2, "ifz": 3,
}

REGISTRY = _build_registry()


def registry_fn(name: str) -> Term:
    if name == "succ":
        return ConstSucc()
    if name not in REGISTRY:
        raise KeyError("unknown primitive recursive symbol %r" % name)
    return PrimRecFn(name, REGISTRY[name].arity)


def all_schemata():
    for entry in REGISTRY.values():
        for sch in entry.schemata:
            yield sch


# --------------------------------------------------------------------------
# First-order matching against registry schemata (used by certificates)


def match_schema(params, pattern, t, binding=None):
    """Match t against pattern, binding the given parameter variables.

    Returns the binding dict or None.  Patterns contain no binders.
    """
    if binding is None:
        binding = {}
    names = {p.name for p in params}

    def go(p, t):
        if isinstance(p, Var) and p.name in names:
            seen = binding.get(p.name)
            if seen is None:
                binding[p.name] = t
                return True
            return alpha_eq(seen, t)
        if isinstance(p, NatLit):
            return (isinstance(t, NatLit) and t.value == p.value) or (
                p.value == 0 and isinstance(t, ConstZero))
        if isinstance(p, ConstZero):
            return isinstance(t, ConstZero) or (
                isinstance(t, NatLit) and t.value == 0)
        if type(p) is not type(t):
            return False
        if isinstance(p, (ConstSucc, ConstE, ConstSup, ConstSupInv)):
            return True
        if isinstance(p, PrimRecFn):
            return p.name == t.name
        if isinstance(p, App):
            return go(p.fn, t.fn) and go(p.arg, t.arg)
        return False

    if go(pattern, t):
        return binding
    return None


def instantiate(t: Term, binding: dict) -> Term:
    out = t
    for name, repl in binding.items():
        out = subst(out, name, repl)
    return out
