"""Formulas of the three theories in the pipeline.

One connective core (forall, or, not) over per-dialect atoms:

  base theory      atoms  s = t  and  t in I
  tree-indexed     atoms  s = t,  t in I_alpha,  alpha = e
  quantifier-free  atoms  s = t,  t in I_alpha  (alpha = e is elaborated)

The placeholder predicate P appears only inside inductive-definition
bodies.  Conjunction and the existential quantifiers exist as real
constructors, but only negation-normal forms produced by `nnf` contain
them; source formulas and proof conclusions use the core connectives,
with (and ...), (ex-n ...), (imp ...) expanded classically by the reader.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import sexpr as sx
from .terms import (
    App, ConstE, ConstSucc, ConstSupInv, ConstZero, FreshSupply, Lambda,
    NatLit, Pair, PrimRecFn, Proj1, Proj2, REGISTRY, RecN, RecOmega, TYPE_N,
    TYPE_O, Term, TermTypeError, Var, free_vars, subst, typecheck,
)


@dataclass(frozen=True, eq=False)
class EqN:
    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class InI:
    arg: Term


@dataclass(frozen=True, eq=False)
class InIAlpha:
    alpha: Term
    arg: Term


@dataclass(frozen=True, eq=False)
class IsE:
    alpha: Term


@dataclass(frozen=True, eq=False)
class PredP:
    arg: Term


@dataclass(frozen=True, eq=False)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, eq=False)
class Not:
    arg: "Formula"


@dataclass(frozen=True, eq=False)
class ForallN:
    var: Var
    body: "Formula"


@dataclass(frozen=True, eq=False)
class ForallOmega:
    var: Var
    body: "Formula"


# negation-normal-form constructors; `nnf` output only


@dataclass(frozen=True, eq=False)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, eq=False)
class ExistsN:
    var: Var
    body: "Formula"


@dataclass(frozen=True, eq=False)
class ExistsOmega:
    var: Var
    body: "Formula"


Formula = object

ATOMS = (EqN, InI, InIAlpha, IsE, PredP)
QUANTIFIERS = (ForallN, ForallOmega, ExistsN, ExistsOmega)


# --------------------------------------------------------------------------
# Classical sugar over the core connectives


def imp(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def conj(a: Formula, b: Formula) -> Formula:
    return Not(Or(Not(a), Not(b)))


def exists_n(v: Var, body: Formula) -> Formula:
    return Not(ForallN(v, Not(body)))


def exists_omega(v: Var, body: Formula) -> Formula:
    return Not(ForallOmega(v, Not(body)))


# --------------------------------------------------------------------------
# Traversal


def formula_children(phi):
    if isinstance(phi, (Or, And)):
        return (phi.left, phi.right)
    if isinstance(phi, Not):
        return (phi.arg,)
    if isinstance(phi, QUANTIFIERS):
        return (phi.body,)
    return ()


def or_units(phi):
    """Leaves of the top disjunction tree, left to right.

    Anything that is not an Or node counts as one unit, so a negated
    disjunction stays whole.
    """
    if isinstance(phi, Or):
        return or_units(phi.left) + or_units(phi.right)
    return (phi,)


def formula_terms(phi):
    if isinstance(phi, EqN):
        return (phi.left, phi.right)
    if isinstance(phi, (InI, PredP)):
        return (phi.arg,)
    if isinstance(phi, InIAlpha):
        return (phi.alpha, phi.arg)
    if isinstance(phi, IsE):
        return (phi.alpha,)
    return ()


def free_vars_formula(phi) -> dict:
    out: dict = {}

    def go(phi, bound):
        if isinstance(phi, ATOMS):
            for t in formula_terms(phi):
                for name, v in free_vars(t).items():
                    if name not in bound:
                        out.setdefault(name, v)
            return
        if isinstance(phi, QUANTIFIERS):
            go(phi.body, bound | {phi.var.name})
            return
        for child in formula_children(phi):
            go(child, bound)

    go(phi, frozenset())
    return out


def map_terms(phi, fn):
    """Rebuild phi applying fn to every atom-level term."""
    if isinstance(phi, EqN):
        return EqN(fn(phi.left), fn(phi.right))
    if isinstance(phi, InI):
        return InI(fn(phi.arg))
    if isinstance(phi, InIAlpha):
        return InIAlpha(fn(phi.alpha), fn(phi.arg))
    if isinstance(phi, IsE):
        return IsE(fn(phi.alpha))
    if isinstance(phi, PredP):
        return PredP(fn(phi.arg))
    if isinstance(phi, Or):
        return Or(map_terms(phi.left, fn), map_terms(phi.right, fn))
    if isinstance(phi, And):
        return And(map_terms(phi.left, fn), map_terms(phi.right, fn))
    if isinstance(phi, Not):
        return Not(map_terms(phi.arg, fn))
    if isinstance(phi, ForallN):
        return ForallN(phi.var, map_terms(phi.body, fn))
    if isinstance(phi, ForallOmega):
        return ForallOmega(phi.var, map_terms(phi.body, fn))
    if isinstance(phi, ExistsN):
        return ExistsN(phi.var, map_terms(phi.body, fn))
    if isinstance(phi, ExistsOmega):
        return ExistsOmega(phi.var, map_terms(phi.body, fn))
    raise TypeError("not a formula: %r" % (phi,))


def subst_formula(phi, name: str, replacement: Term,
                  supply: Optional[FreshSupply] = None) -> Formula:
    """Capture-avoiding substitution of a term for a free variable."""
    supply = supply or _SUBST_SUPPLY
    repl_free = free_vars(replacement)

    def go(phi, ren):
        if isinstance(phi, ATOMS):
            def on_term(t):
                out = t
                for old, new in ren.items():
                    out = subst(out, old, new, supply)
                return subst(out, name, replacement, supply)
            return map_terms(phi, on_term)
        if isinstance(phi, QUANTIFIERS):
            v = phi.var
            if v.name == name:
                # renaming pending on outer binders still applies inside,
                # but the substituted variable is shadowed here
                if not ren:
                    return phi
                body = go_shadowed(phi.body, ren)
                return type(phi)(v, body)
            if v.name in repl_free:
                nv = supply.fresh(v.name, v.ty)
                return type(phi)(nv, go(phi.body, {**ren, v.name: nv}))
            return type(phi)(v, go(phi.body, ren))
        if isinstance(phi, (Or, And)):
            return type(phi)(go(phi.left, ren), go(phi.right, ren))
        if isinstance(phi, Not):
            return Not(go(phi.arg, ren))
        raise TypeError("not a formula: %r" % (phi,))

    def go_shadowed(phi, ren):
        if isinstance(phi, ATOMS):
            def on_term(t):
                out = t
                for old, new in ren.items():
                    out = subst(out, old, new, supply)
                return out
            return map_terms(phi, on_term)
        if isinstance(phi, QUANTIFIERS):
            inner = {k: v for k, v in ren.items() if k != phi.var.name}
            if not inner:
                return phi
            return type(phi)(phi.var, go_shadowed(phi.body, inner))
        if isinstance(phi, (Or, And)):
            return type(phi)(go_shadowed(phi.left, ren), go_shadowed(phi.right, ren))
        if isinstance(phi, Not):
            return Not(go_shadowed(phi.arg, ren))
        raise TypeError("not a formula: %r" % (phi,))

    return go(phi, {})


def freshen_formula(phi, supply: FreshSupply) -> Formula:
    """Rename every bound variable (terms included) to a fresh name."""

    def go(phi, ren):
        if isinstance(phi, ATOMS):
            def on_term(t):
                out = t
                for old, new in ren.items():
                    out = subst(out, old, new, supply)
                return out
            return map_terms(phi, on_term)
        if isinstance(phi, QUANTIFIERS):
            nv = supply.fresh(phi.var.name, phi.var.ty)
            return type(phi)(nv, go(phi.body, {**ren, phi.var.name: nv}))
        if isinstance(phi, (Or, And)):
            return type(phi)(go(phi.left, ren), go(phi.right, ren))
        if isinstance(phi, Not):
            return Not(go(phi.arg, ren))
        raise TypeError("not a formula: %r" % (phi,))

    return go(phi, {})


_SUBST_SUPPLY = FreshSupply(7 * 10 ** 8)


def alpha_eq_formula(a, b) -> bool:
    return formula_key(a) == formula_key(b)


def _canon_term_binders(t, ren, counter):
    if isinstance(t, Var):
        return ren.get(t.name, t)
    if isinstance(t, Lambda):
        nv = Var("_l%d" % counter[0], t.binder.ty)
        counter[0] += 1
        return Lambda(nv, _canon_term_binders(
            t.body, {**ren, t.binder.name: nv}, counter))
    if isinstance(t, App):
        return App(_canon_term_binders(t.fn, ren, counter),
                   _canon_term_binders(t.arg, ren, counter))
    if isinstance(t, Pair):
        return Pair(_canon_term_binders(t.left, ren, counter),
                    _canon_term_binders(t.right, ren, counter))
    if isinstance(t, Proj1):
        return Proj1(_canon_term_binders(t.arg, ren, counter))
    if isinstance(t, Proj2):
        return Proj2(_canon_term_binders(t.arg, ren, counter))
    if isinstance(t, (RecN, RecOmega)):
        return type(t)(_canon_term_binders(t.base, ren, counter),
                       _canon_term_binders(t.step, ren, counter))
    return t


def formula_key(phi) -> str:
    """Canonical string, stable under renaming of bound variables.

    Formula binders are renamed in traversal order by one counter,
    term-level lambda binders by another, then the result is printed.
    """
    counter = [0]
    tcounter = [0]

    def go(phi, ren):
        if isinstance(phi, ATOMS):
            def on_term(t):
                out = t
                for old, new in ren.items():
                    out = subst(out, old, new)
                return _canon_term_binders(out, {}, tcounter)
            return map_terms(phi, on_term)
        if isinstance(phi, QUANTIFIERS):
            nv = Var("_b%d" % counter[0], phi.var.ty)
            counter[0] += 1
            return type(phi)(nv, go(phi.body, {**ren, phi.var.name: nv}))
        if isinstance(phi, (Or, And)):
            return type(phi)(go(phi.left, ren), go(phi.right, ren))
        if isinstance(phi, Not):
            return Not(go(phi.arg, ren))
        raise TypeError("not a formula: %r" % (phi,))

    return print_formula(go(phi, {}))


# --------------------------------------------------------------------------
# Negation-normal form


def nnf(phi) -> Formula:
    if isinstance(phi, ATOMS):
        return phi
    if isinstance(phi, Or):
        return Or(nnf(phi.left), nnf(phi.right))
    if isinstance(phi, And):
        return And(nnf(phi.left), nnf(phi.right))
    if isinstance(phi, ForallN):
        return ForallN(phi.var, nnf(phi.body))
    if isinstance(phi, ForallOmega):
        return ForallOmega(phi.var, nnf(phi.body))
    if isinstance(phi, ExistsN):
        return ExistsN(phi.var, nnf(phi.body))
    if isinstance(phi, ExistsOmega):
        return ExistsOmega(phi.var, nnf(phi.body))
    if isinstance(phi, Not):
        inner = phi.arg
        if isinstance(inner, ATOMS):
            return phi
        if isinstance(inner, Not):
            return nnf(inner.arg)
        if isinstance(inner, Or):
            return And(nnf(Not(inner.left)), nnf(Not(inner.right)))
        if isinstance(inner, And):
            return Or(nnf(Not(inner.left)), nnf(Not(inner.right)))
        if isinstance(inner, ForallN):
            return ExistsN(inner.var, nnf(Not(inner.body)))
        if isinstance(inner, ForallOmega):
            return ExistsOmega(inner.var, nnf(Not(inner.body)))
        if isinstance(inner, ExistsN):
            return ForallN(inner.var, nnf(Not(inner.body)))
        if isinstance(inner, ExistsOmega):
            return ForallOmega(inner.var, nnf(Not(inner.body)))
    raise TypeError("not a formula: %r" % (phi,))


def check_positive(phi) -> bool:
    """True iff the placeholder P never occurs under a negation in nnf."""

    def go(phi):
        if isinstance(phi, Not):
            # nnf negations sit on atoms only
            return not _mentions_p(phi.arg)
        if isinstance(phi, ATOMS):
            return True
        return all(go(c) for c in formula_children(phi))

    return go(nnf(phi))


def _mentions_p(phi) -> bool:
    if isinstance(phi, PredP):
        return True
    if isinstance(phi, ATOMS):
        return False
    return any(_mentions_p(c) for c in formula_children(phi))


def mentions_p(phi) -> bool:
    return _mentions_p(phi)


# --------------------------------------------------------------------------
# Predicate substitution: psi(theta/P)


def subst_predicate(psi, hole: Var, theta,
                    supply: Optional[FreshSupply] = None) -> Formula:
    """Replace each P(t) in psi by theta with t for its hole variable.

    Each inserted copy of theta has its bound variables freshened first,
    so binders of theta can never capture variables of t and repeated
    insertions stay independent.
    """
    supply = supply or _SUBST_SUPPLY

    def go(phi):
        if isinstance(phi, PredP):
            copy = freshen_formula(theta, supply)
            return subst_formula(copy, hole.name, phi.arg, supply)
        if isinstance(phi, ATOMS):
            return phi
        if isinstance(phi, QUANTIFIERS):
            return type(phi)(phi.var, go(phi.body))
        if isinstance(phi, (Or, And)):
            return type(phi)(go(phi.left), go(phi.right))
        if isinstance(phi, Not):
            return Not(go(phi.arg))
        raise TypeError("not a formula: %r" % (phi,))

    return go(psi)


# --------------------------------------------------------------------------
# Inductive definitions


@dataclass(frozen=True)
class InductiveDefinition:
    var: Var          # the distinguished number variable
    body: Formula     # arithmetic with the placeholder P
    params: tuple = ()  # extra free number variables, tolerated and flagged

    def apply_to(self, predicate_hole: Var, predicate_body: Formula,
                 arg: Term, supply: FreshSupply) -> Formula:
        """body(theta/P) with the distinguished variable set to arg."""
        replaced = subst_predicate(self.body, predicate_hole, predicate_body,
                                   supply)
        return subst_formula(replaced, self.var.name, arg, supply)


def validate_inductive_definition(defn: InductiveDefinition):
    problems = []
    if not check_positive(defn.body):
        problems.append("placeholder occurs negatively in the operator body")
    rep = check_dialect(defn.body, "id1", allow_pred=True)
    if not rep.ok:
        problems.extend("operator body: " + p for p in rep.problems)
    extra = [n for n in free_vars_formula(defn.body)
             if n != defn.var.name and n not in {p.name for p in defn.params}]
    if extra:
        problems.append("undeclared parameters in operator body: %s"
                        % ", ".join(sorted(extra)))
    return problems


# --------------------------------------------------------------------------
# Dialect checking


@dataclass
class DialectReport:
    ok: bool
    problems: list = field(default_factory=list)
    has_omega_quantifier: bool = False


def has_omega_quantifier(phi) -> bool:
    if isinstance(phi, (ForallOmega, ExistsOmega)):
        return True
    if isinstance(phi, ATOMS):
        return False
    return any(has_omega_quantifier(c) for c in formula_children(phi))


def _arith_term_ok(t, problems, ctx, what):
    """First-order arithmetic terms: variables of type N, numerals,
    successor, and registry symbols, fully applied."""
    head = t
    args = []
    while isinstance(head, App):
        args.append(head.arg)
        head = head.fn
    args.reverse()
    if isinstance(head, Var):
        if head.ty != TYPE_N or args:
            problems.append("%s: number variables are the only head variables"
                            % what)
            return
        return
    if isinstance(head, (NatLit, ConstZero)):
        if args:
            problems.append("%s: numeral applied to arguments" % what)
        return
    if isinstance(head, ConstSucc):
        if len(args) != 1:
            problems.append("%s: successor takes one argument" % what)
            return
        _arith_term_ok(args[0], problems, ctx, what)
        return
    if isinstance(head, PrimRecFn):
        entry = REGISTRY.get(head.name)
        if entry is None or len(args) != entry.arity:
            problems.append("%s: bad registry application %r" % (what, head))
            return
        for a in args:
            _arith_term_ok(a, problems, ctx, what)
        return
    problems.append("%s: term %r outside the first-order fragment"
                    % (what, type(head).__name__))


def _alpha_term_ok(t, problems, what):
    """Tree-sort terms of the indexed theory: variables, the leaf, and
    child selection beta[i] with i first-order."""
    if isinstance(t, Var):
        if t.ty != TYPE_O:
            problems.append("%s: tree position holds non-tree variable" % what)
        return
    if isinstance(t, ConstE):
        return
    if (isinstance(t, App) and isinstance(t.fn, App)
            and isinstance(t.fn.fn, ConstSupInv)):
        _alpha_term_ok(t.fn.arg, problems, what)
        _arith_term_ok(t.arg, problems, {}, what + " (child index)")
        return
    problems.append("%s: tree position %r outside the indexed grammar"
                    % (what, type(t).__name__))


def _q0t_term_ok(t, ty, problems, ctx, what):
    try:
        got = typecheck(t, ctx)
    except TermTypeError as exc:
        problems.append("%s: ill-typed term (%s)" % (what, exc))
        return
    if got != ty:
        problems.append("%s: term of type %r where %r expected"
                        % (what, got, ty))


def check_dialect(phi, dialect: str, allow_pred: bool = False,
                  ctx: Optional[dict] = None) -> DialectReport:
    problems: list = []
    ctx = dict(ctx or {})
    for name, v in free_vars_formula(phi).items():
        ctx.setdefault(name, v.ty)

    def go(phi, ctx):
        if isinstance(phi, PredP):
            if not allow_pred:
                problems.append("placeholder predicate outside an operator body")
            if dialect == "q0t":
                _q0t_term_ok(phi.arg, TYPE_N, problems, ctx, "placeholder argument")
            else:
                _arith_term_ok(phi.arg, problems, ctx, "placeholder argument")
            return
        if isinstance(phi, EqN):
            if dialect == "q0t":
                _q0t_term_ok(phi.left, TYPE_N, problems, ctx, "equation")
                _q0t_term_ok(phi.right, TYPE_N, problems, ctx, "equation")
            else:
                _arith_term_ok(phi.left, problems, ctx, "equation")
                _arith_term_ok(phi.right, problems, ctx, "equation")
            return
        if isinstance(phi, InI):
            if dialect != "id1":
                problems.append("bare membership atom outside the base theory")
            _arith_term_ok(phi.arg, problems, ctx, "membership argument")
            return
        if isinstance(phi, InIAlpha):
            if dialect == "id1":
                problems.append("indexed membership atom in the base theory")
            elif dialect == "q0t":
                _q0t_term_ok(phi.alpha, TYPE_O, problems, ctx, "membership index")
                _q0t_term_ok(phi.arg, TYPE_N, problems, ctx, "membership argument")
            else:
                _alpha_term_ok(phi.alpha, problems, "membership index")
                _arith_term_ok(phi.arg, problems, ctx, "membership argument")
            return
        if isinstance(phi, IsE):
            if dialect != "oid1":
                problems.append("leaf atom belongs to the indexed theory only")
            else:
                _alpha_term_ok(phi.alpha, problems, "leaf atom")
            return
        if isinstance(phi, (Or, And)):
            go(phi.left, ctx)
            go(phi.right, ctx)
            return
        if isinstance(phi, Not):
            go(phi.arg, ctx)
            return
        if isinstance(phi, (ForallN, ExistsN)):
            if phi.var.ty != TYPE_N:
                problems.append("number quantifier binds non-number variable")
            go(phi.body, {**ctx, phi.var.name: phi.var.ty})
            return
        if isinstance(phi, (ForallOmega, ExistsOmega)):
            if dialect == "id1":
                problems.append("tree quantifier in the base theory")
            if dialect == "q0t":
                problems.append("tree quantifier in the quantifier-free theory")
            if phi.var.ty != TYPE_O:
                problems.append("tree quantifier binds non-tree variable")
            go(phi.body, {**ctx, phi.var.name: phi.var.ty})
            return
        problems.append("not a formula: %r" % (phi,))

    go(phi, ctx)
    return DialectReport(ok=not problems, problems=problems,
                         has_omega_quantifier=has_omega_quantifier(phi))


def is_arithmetic(phi) -> bool:
    """No tree material and no membership atoms of either kind."""
    if isinstance(phi, (InI, InIAlpha, IsE)):
        return False
    if isinstance(phi, (ForallOmega, ExistsOmega)):
        return False
    if isinstance(phi, ATOMS):
        return True
    return all(is_arithmetic(c) for c in formula_children(phi))


# --------------------------------------------------------------------------
# S-expression syntax


def formula_from_sexpr(form, scope: dict, supply: FreshSupply) -> Formula:
    if not isinstance(form, list) or not form:
        raise sx.SexprError("bad formula syntax: %r" % (form,))
    head = form[0]

    def term(s):
        return sx.elaborate_term(s, scope, supply)

    def rec(s):
        return formula_from_sexpr(s, scope, supply)

    if head == "=":
        _arity(form, 3)
        return EqN(term(form[1]), term(form[2]))
    if head == "in-I":
        _arity(form, 2)
        return InI(term(form[1]))
    if head == "in-I-at":
        _arity(form, 3)
        return InIAlpha(term(form[1]), term(form[2]))
    if head == "is-e":
        _arity(form, 2)
        return IsE(term(form[1]))
    if head == "P":
        _arity(form, 2)
        return PredP(term(form[1]))
    if head == "or":
        if len(form) < 3:
            raise sx.SexprError("(or ...) needs two parts")
        out = rec(form[1])
        for part in form[2:]:
            out = Or(out, rec(part))
        return out
    if head == "not":
        _arity(form, 2)
        return Not(rec(form[1]))
    if head == "and":
        if len(form) < 3:
            raise sx.SexprError("(and ...) needs two parts")
        out = rec(form[1])
        for part in form[2:]:
            out = conj(out, rec(part))
        return out
    if head == "imp":
        if len(form) < 3:
            raise sx.SexprError("(imp ...) needs two parts")
        parts = [form[i] for i in range(1, len(form))]
        out = rec(parts[-1])
        for p in reversed(parts[:-1]):
            out = imp(rec(p), out)
        return out
    if head in ("all-n", "all-o", "ex-n", "ex-o"):
        if len(form) != 3 or not isinstance(form[1], list) or not form[1]:
            raise sx.SexprError("(%s (vars) body)" % head)
        ty = TYPE_N if head.endswith("-n") else TYPE_O
        inner = dict(scope)
        bound = []
        for name in form[1]:
            if not isinstance(name, str):
                raise sx.SexprError("bad binder %r" % (name,))
            v = supply.fresh(name, ty)
            inner[name] = v
            bound.append(v)
        body = formula_from_sexpr(form[2], inner, supply)
        for v in reversed(bound):
            if head == "all-n":
                body = ForallN(v, body)
            elif head == "all-o":
                body = ForallOmega(v, body)
            elif head == "ex-n":
                body = exists_n(v, body)
            else:
                body = exists_omega(v, body)
        return body
    raise sx.SexprError("bad formula syntax: %r" % (form,))


def _arity(form, n):
    if len(form) != n:
        raise sx.SexprError("%s takes %d parts, got %r" % (form[0], n - 1, form))


def formula_to_sexpr(phi):
    if isinstance(phi, EqN):
        return ["=", sx.term_to_sexpr(phi.left), sx.term_to_sexpr(phi.right)]
    if isinstance(phi, InI):
        return ["in-I", sx.term_to_sexpr(phi.arg)]
    if isinstance(phi, InIAlpha):
        return ["in-I-at", sx.term_to_sexpr(phi.alpha), sx.term_to_sexpr(phi.arg)]
    if isinstance(phi, IsE):
        return ["is-e", sx.term_to_sexpr(phi.alpha)]
    if isinstance(phi, PredP):
        return ["P", sx.term_to_sexpr(phi.arg)]
    if isinstance(phi, Or):
        return ["or", formula_to_sexpr(phi.left), formula_to_sexpr(phi.right)]
    if isinstance(phi, Not):
        return ["not", formula_to_sexpr(phi.arg)]
    if isinstance(phi, And):
        return ["and", formula_to_sexpr(phi.left), formula_to_sexpr(phi.right)]
    if isinstance(phi, ForallN):
        return ["all-n", [phi.var.name], formula_to_sexpr(phi.body)]
    if isinstance(phi, ForallOmega):
        return ["all-o", [phi.var.name], formula_to_sexpr(phi.body)]
    if isinstance(phi, ExistsN):
        return ["ex-n", [phi.var.name], formula_to_sexpr(phi.body)]
    if isinstance(phi, ExistsOmega):
        return ["ex-o", [phi.var.name], formula_to_sexpr(phi.body)]
    raise sx.SexprError("bad formula: %r" % (phi,))


def parse_formula(text: str, scope=None, supply=None) -> Formula:
    return formula_from_sexpr(sx.parse_one(text), dict(scope or {}),
                              supply or FreshSupply())


def print_formula(phi) -> str:
    return sx.to_text(formula_to_sexpr(phi))
