"""Hilbert-style derivations for the three theories, with a checker.

A Proof node records its rule, its conclusion, premise subproofs, and
rule-specific data.  Builders construct nodes with the conclusion
computed from the data; check_proof revalidates every node from scratch,
so a hand-assembled or deserialized proof gets no trust.

The logical core is the classical one-sided system over forall, or,
not: excluded middle, the two substitution axiom schemes, expansion,
contraction, associativity, cut, and forall-introduction.  On top sit
equality axioms, defining equations for the registered functions,
induction and transfinite induction in rule form, and the axioms about
the stagewise membership predicate.  Equations between arbitrary terms
are accepted only with an explicit conversion certificate, or by closed
evaluation at type N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import sexpr as sx
from .combinators import is_e_term
from .eval import BudgetExhausted, EvalBudget, Numeral, evaluate
from .formulas import (
    EqN, ForallN, ForallOmega, Formula, InI, InIAlpha,
    InductiveDefinition, IsE, Not, Or, PredP, check_dialect, conj,
    exists_n, exists_omega, formula_from_sexpr, formula_key,
    formula_to_sexpr, free_vars_formula, has_omega_quantifier, imp,
    or_units, subst_formula, subst_predicate,
)
from .terms import (
    App, ConstE, ConstSucc, ConstSup, ConstSupInv, ConstZero, FreshSupply,
    Lambda, NatLit, Pair, Proj1, Proj2, RecN, RecOmega, REGISTRY,
    TERM_NODES, TYPE_N, TYPE_O, Term, TermTypeError, Var, all_schemata,
    alpha_eq, app, free_vars, instantiate, match_schema, registry_fn,
    subst, sub,
)

THEORIES = ("id1", "oid1", "q0t")

RULES = frozenset({
    "ExcludedMiddle", "SubstN", "SubstOmega", "Expansion", "Contraction",
    "OrPerm", "Cut", "ForallIntroN", "ForallIntroOmega", "EqualityAxiom",
    "PrimRecDefAxiom", "InductionN", "TransfiniteInduction", "OmegaBounding",
    "AxSubtreeE", "IsEAxiom", "AxOmegaInhabited", "AxI_Empty",
    "AxI_FixedPoint", "AxI_Closure", "AxI_Leastness", "AxI_TermEq",
    "TOmegaEq",
})


@dataclass(frozen=True, eq=False)
class Proof:
    rule: str
    conclusion: Formula
    premises: tuple = ()
    data: dict = field(default_factory=dict)


class ProofError(Exception):
    pass


_SUPPLY = FreshSupply(3 * 10 ** 8)


def proof_size(p: Proof) -> int:
    return 1 + sum(proof_size(q) for q in p.premises)


# --------------------------------------------------------------------------
# The leaf test.  In the tree-indexed theory it is an atom of its own;
# at the quantifier-free level it is spelled out as an equation.


def is_e_formula(alpha: Term, theory: str) -> Formula:
    if theory == "q0t":
        return EqN(App(is_e_term(), alpha), NatLit(0))
    return IsE(alpha)


def prec_membership(alpha: Term, t: Term, idx_hint: str = "i") -> Formula:
    """Membership in the union of the children: exists i (t in I_{alpha[i]})."""
    i = _SUPPLY.fresh(idx_hint, TYPE_N)
    return exists_n(i, InIAlpha(sub(alpha, i), t))


def operator_at_children(defn: InductiveDefinition, alpha: Term,
                         t: Term) -> Formula:
    """psi(t, I_{<alpha}): the operator body with the placeholder read as
    membership in some child stage."""
    hole = _SUPPLY.fresh("z", TYPE_N)
    theta = prec_membership(alpha, hole)
    replaced = subst_predicate(defn.body, hole, theta, _SUPPLY)
    return subst_formula(replaced, defn.var.name, t, _SUPPLY)


def operator_with(defn: InductiveDefinition, theta_var: Var, theta: Formula,
                  t: Term) -> Formula:
    """psi(t, theta/P): the operator body with the placeholder read as theta."""
    replaced = subst_predicate(defn.body, theta_var, theta, _SUPPLY)
    return subst_formula(replaced, defn.var.name, t, _SUPPLY)


# --------------------------------------------------------------------------
# Builders: logical rules


def excluded_middle(phi: Formula) -> Proof:
    return Proof("ExcludedMiddle", Or(Not(phi), phi), (), {"formula": phi})


def subst_n(forall_formula: ForallN, term: Term) -> Proof:
    if not isinstance(forall_formula, ForallN):
        raise ProofError("SubstN wants a number-quantified formula")
    inst = subst_formula(forall_formula.body, forall_formula.var.name, term,
                         _SUPPLY)
    return Proof("SubstN", Or(Not(forall_formula), inst), (),
                 {"formula": forall_formula, "term": term})


def subst_omega(forall_formula: ForallOmega, term: Term) -> Proof:
    if not isinstance(forall_formula, ForallOmega):
        raise ProofError("SubstOmega wants a tree-quantified formula")
    inst = subst_formula(forall_formula.body, forall_formula.var.name, term,
                         _SUPPLY)
    return Proof("SubstOmega", Or(Not(forall_formula), inst), (),
                 {"formula": forall_formula, "term": term})


def expansion(p: Proof, added: Formula) -> Proof:
    return Proof("Expansion", Or(p.conclusion, added), (p,), {"formula": added})


def contraction(p: Proof) -> Proof:
    c = p.conclusion
    if not isinstance(c, Or) or formula_key(c.left) != formula_key(c.right):
        raise ProofError("Contraction wants a disjunction of twins")
    return Proof("Contraction", c.left, (p,), {})


def or_perm(p: Proof, target: Formula) -> Proof:
    """Rearrange a disjunction: reorder, regroup, drop duplicates, or
    tack on fresh disjuncts, all in one step.

    Sound because the premise forces some unit true and every premise
    unit reappears in the target.  Subsumes the one-step commute and
    associate moves, which are hopeless on their own: no sequence of
    top-level swaps and regroups reaches more than a sliver of the
    rearrangements once four units are in play.
    """
    have = {formula_key(u) for u in or_units(p.conclusion)}
    want = {formula_key(u) for u in or_units(target)}
    if not have <= want:
        raise ProofError("OrPerm target is missing a premise disjunct")
    return Proof("OrPerm", target, (p,), {"formula": target})


def cut(p1: Proof, p2: Proof) -> Proof:
    c1, c2 = p1.conclusion, p2.conclusion
    if not isinstance(c1, Or) or not isinstance(c2, Or) \
            or not isinstance(c2.left, Not):
        raise ProofError("Cut wants (phi or psi) and (not phi or theta)")
    if formula_key(c1.left) != formula_key(c2.left.arg):
        raise ProofError("Cut premises disagree on the cut formula")
    return Proof("Cut", Or(c1.right, c2.right), (p1, p2), {})


def forall_intro_n(p: Proof, var: Var) -> Proof:
    return _forall_intro(p, var, ForallN, "ForallIntroN")


def forall_intro_omega(p: Proof, var: Var) -> Proof:
    return _forall_intro(p, var, ForallOmega, "ForallIntroOmega")


def _forall_intro(p, var, quant, tag):
    c = p.conclusion
    if not isinstance(c, Or):
        raise ProofError("%s wants a disjunctive premise" % tag)
    if var.name in free_vars_formula(c.right):
        raise ProofError("%s: eigenvariable %s free in the passive disjunct"
                         % (tag, var.name))
    return Proof(tag, Or(quant(var, c.left), c.right), (p,), {"var": var})


# --------------------------------------------------------------------------
# Builders: equality and defining equations

EQ_KINDS = ("refl", "sym", "trans", "cong-fn", "cong-in-arg", "cong-in-index",
            "cong-ise-index", "cong-i")


def equality_axiom(kind: str, *terms: Term, fn_name: str = None) -> Proof:
    concl = _equality_conclusion(kind, terms, fn_name)
    data = {"kind": kind, "terms": tuple(terms)}
    if fn_name is not None:
        data["name"] = fn_name
    return Proof("EqualityAxiom", concl, (), data)


def _equality_conclusion(kind, terms, fn_name=None):
    if kind == "refl":
        (t,) = terms
        return EqN(t, t)
    if kind == "sym":
        s, t = terms
        return imp(EqN(s, t), EqN(t, s))
    if kind == "trans":
        s, t, u = terms
        return imp(EqN(s, t), imp(EqN(t, u), EqN(s, u)))
    if kind == "cong-fn":
        if fn_name is None or len(terms) % 2 != 0:
            raise ProofError("cong-fn wants a function name and paired "
                             "arguments")
        n = len(terms) // 2
        ss, ts = terms[:n], terms[n:]
        f = ConstSucc() if fn_name == "succ" else registry_fn(fn_name)
        return imp_chain(
            [EqN(s, t) for s, t in zip(ss, ts)],
            EqN(app(f, *ss), app(f, *ts)))
    if kind == "cong-in-arg":
        alpha, s, t = terms
        return imp(EqN(s, t), imp(InIAlpha(alpha, s), InIAlpha(alpha, t)))
    if kind == "cong-in-index":
        alpha, s, t, x = terms
        return imp(EqN(s, t),
                   imp(InIAlpha(sub(alpha, s), x), InIAlpha(sub(alpha, t), x)))
    if kind == "cong-ise-index":
        alpha, s, t = terms
        return imp(EqN(s, t), imp(IsE(sub(alpha, s)), IsE(sub(alpha, t))))
    if kind == "cong-i":
        s, t = terms
        return imp(EqN(s, t), imp(InI(s), InI(t)))
    raise ProofError("unknown equality axiom kind %r" % (kind,))


def imp_chain(antecedents, consequent):
    out = consequent
    for a in reversed(antecedents):
        out = imp(a, out)
    return out


def prim_rec_def_axiom(name: str, eq_index: int, substitution: dict) -> Proof:
    params, lhs, rhs = _schema_at(name, eq_index)
    binding = {v.name: substitution[v.name] for v in params}
    concl = EqN(instantiate(lhs, binding), instantiate(rhs, binding))
    return Proof("PrimRecDefAxiom", concl, (),
                 {"name": name, "eq_index": eq_index,
                  "terms": tuple(binding[v.name] for v in params)})


def _schema_at(name, index):
    entry = REGISTRY.get(name)
    if entry is None or index >= len(entry.schemata):
        raise ProofError("no defining equation %s/%d" % (name, index))
    return entry.schemata[index]


# --------------------------------------------------------------------------
# Builders: induction rules


def induction_n(base: Proof, step: Proof, var: Var, motive: Formula,
                term: Term) -> Proof:
    concl = subst_formula(motive, var.name, term, _SUPPLY)
    return Proof("InductionN", concl, (base, step),
                 {"var": var, "motive": motive, "term": term})


def transfinite_induction(base: Proof, step: Proof, var: Var, motive: Formula,
                          term: Term, guarded: bool = False) -> Proof:
    concl = subst_formula(motive, var.name, term, _SUPPLY)
    return Proof("TransfiniteInduction", concl, (base, step),
                 {"var": var, "motive": motive, "term": term,
                  "guarded": guarded})


def induction_premises(var: Var, motive: Formula):
    """Expected (base, step) conclusions for induction over N."""
    base = subst_formula(motive, var.name, NatLit(0), _SUPPLY)
    step = imp(motive,
               subst_formula(motive, var.name, app(ConstSucc(), var), _SUPPLY))
    return base, step


def transfinite_premises(var: Var, motive: Formula, guarded: bool,
                         theory: str, idx_hint: str = "n"):
    """Expected (base, step) conclusions for induction over trees."""
    base = subst_formula(motive, var.name, ConstE(), _SUPPLY)
    n = _SUPPLY.fresh(idx_hint, TYPE_N)
    at_children = ForallN(
        n, subst_formula(motive, var.name, sub(var, n), _SUPPLY))
    if guarded:
        hyp = conj(Not(is_e_formula(var, theory)), at_children)
    else:
        hyp = at_children
    return base, imp(hyp, motive)


# --------------------------------------------------------------------------
# Builders: tree and membership axioms


def ax_subtree_e(alpha: Term, idx: Term, theory: str = "oid1") -> Proof:
    concl = imp(is_e_formula(alpha, theory),
                is_e_formula(sub(alpha, idx), theory))
    return Proof("AxSubtreeE", concl, (),
                 {"alpha": alpha, "index": idx, "theory": theory})


def is_e_axiom() -> Proof:
    return Proof("IsEAxiom", IsE(ConstE()), (), {})


def ax_omega_inhabited() -> Proof:
    beta = _SUPPLY.fresh("beta", TYPE_O)
    return Proof("AxOmegaInhabited", exists_omega(beta, Not(IsE(beta))), (),
                 {"var": beta})


def omega_bounding(matrix: Formula, var_x: Var, var_alpha: Var, var_beta: Var,
                   var_i: Var) -> Proof:
    """forall x exists alpha phi  ->  exists beta forall x exists i
    phi[alpha := beta[i]], for phi without tree quantifiers."""
    inner = subst_formula(matrix, var_alpha.name, sub(var_beta, var_i), _SUPPLY)
    concl = imp(
        ForallN(var_x, exists_omega(var_alpha, matrix)),
        exists_omega(var_beta, ForallN(var_x, exists_n(var_i, inner))))
    return Proof("OmegaBounding", concl, (),
                 {"matrix": matrix, "var_x": var_x, "var_alpha": var_alpha,
                  "var_beta": var_beta, "var_i": var_i})


def ax_empty(alpha: Term, t: Term, theory: str = "oid1") -> Proof:
    concl = imp(is_e_formula(alpha, theory), Not(InIAlpha(alpha, t)))
    return Proof("AxI_Empty", concl, (), {"alpha": alpha, "term": t,
                                          "theory": theory})


def ax_fixed_point(defn: InductiveDefinition, alpha: Term, t: Term,
                   direction: str, theory: str = "oid1") -> Proof:
    """Curried stage equation.  unfold: membership at a branching stage
    gives the operator over the children; fold: the converse."""
    if direction not in ("unfold", "fold"):
        raise ProofError("direction must be unfold or fold")
    guard = Not(is_e_formula(alpha, theory))
    body = operator_at_children(defn, alpha, t)
    member = InIAlpha(alpha, t)
    if direction == "unfold":
        concl = imp(guard, imp(member, body))
    else:
        concl = imp(guard, imp(body, member))
    return Proof("AxI_FixedPoint", concl, (),
                 {"alpha": alpha, "term": t, "direction": direction,
                  "theory": theory})


def ax_closure(defn: InductiveDefinition, t: Term) -> Proof:
    hole = _SUPPLY.fresh("z", TYPE_N)
    body = operator_with(defn, hole, InI(hole), t)
    return Proof("AxI_Closure", imp(body, InI(t)), (), {"term": t})


def ax_leastness(defn: InductiveDefinition, premise: Proof, theta_var: Var,
                 theta: Formula) -> Proof:
    x = _SUPPLY.fresh("x", TYPE_N)
    concl = ForallN(x, imp(InI(x),
                           subst_formula(theta, theta_var.name, x, _SUPPLY)))
    return Proof("AxI_Leastness", concl, (premise,),
                 {"var": theta_var, "theta": theta})


def leastness_premise(defn: InductiveDefinition, theta_var: Var,
                      theta: Formula) -> Formula:
    """forall x (psi(x, theta/P) -> theta(x)), the rule's premise shape."""
    x = _SUPPLY.fresh("x", TYPE_N)
    return ForallN(x, imp(operator_with(defn, theta_var, theta, x),
                          subst_formula(theta, theta_var.name, x, _SUPPLY)))


def leastness_axiom_motive(defn: InductiveDefinition, theta_var: Var,
                           theta: Formula) -> Formula:
    """The self-strengthened motive that turns the leastness rule back into
    the axiom schema: theta'(x) is
    (forall z (psi(z, theta/P) -> theta(z))) -> theta(x)."""
    z = _SUPPLY.fresh("z", TYPE_N)
    closure_hyp = ForallN(z, imp(operator_with(defn, theta_var, theta, z),
                                 subst_formula(theta, theta_var.name, z,
                                               _SUPPLY)))
    return imp(closure_hyp, theta)


# --------------------------------------------------------------------------
# Equation certificates.  A certificate is a sequence of intermediate
# terms, each one conversion away from its neighbour, or the single step
# ("eval",) for closed terms of type N.

CERT_STEPS = ("conv", "eval")


class ChainBroken(Exception):
    def __init__(self, index, message):
        super().__init__("step %d: %s" % (index, message))
        self.index = index


def t_omega_eq(s: Term, t: Term, cert: tuple) -> Proof:
    return Proof("TOmegaEq", EqN(s, t), (), {"left": s, "right": t,
                                             "cert": tuple(cert)})


def ax_term_eq(alpha: Term, beta: Term, s: Term, t: Term, cert_n: tuple,
               cert_o: tuple) -> Proof:
    concl = imp(InIAlpha(alpha, s), InIAlpha(beta, t))
    return Proof("AxI_TermEq", concl, (),
                 {"alpha": alpha, "beta": beta, "left": s, "right": t,
                  "cert_n": tuple(cert_n), "cert_o": tuple(cert_o)})


def _one_step_rewrites(t: Term):
    """All results of a single head conversion somewhere inside t."""
    results = []

    def at_head(u):
        out = []
        if isinstance(u, App):
            fn, arg = u.fn, u.arg
            if isinstance(fn, Lambda):
                out.append(subst(fn.body, fn.binder.name, arg, _SUPPLY))
            if isinstance(fn, RecN):
                if isinstance(arg, (NatLit, ConstZero)):
                    v = arg.value if isinstance(arg, NatLit) else 0
                    if v == 0:
                        out.append(fn.base)
                    else:
                        prev = NatLit(v - 1)
                        out.append(app(fn.step, prev, App(fn, prev)))
                if isinstance(arg, App) and isinstance(arg.fn, ConstSucc):
                    out.append(app(fn.step, arg.arg, App(fn, arg.arg)))
            if isinstance(fn, RecOmega):
                if isinstance(arg, ConstE):
                    out.append(fn.base)
                if isinstance(arg, App) and isinstance(arg.fn, ConstSup):
                    h = arg.arg
                    n = _SUPPLY.fresh("n", TYPE_N)
                    out.append(App(fn.step,
                                   Lambda(n, App(fn, App(h, n)))))
            if isinstance(fn, Proj1) and isinstance(arg, App) \
                    and isinstance(arg.fn, App) \
                    and isinstance(arg.fn.fn, Pair):
                out.append(arg.fn.arg)
            if isinstance(fn, Proj2) and isinstance(arg, App) \
                    and isinstance(arg.fn, App) \
                    and isinstance(arg.fn.fn, Pair):
                out.append(arg.arg)
            if isinstance(fn, App) and isinstance(fn.fn, ConstSupInv):
                tree = fn.arg
                if isinstance(tree, ConstE):
                    out.append(ConstE())
                if isinstance(tree, App) and isinstance(tree.fn, ConstSup):
                    out.append(App(tree.arg, arg))
        for params, lhs, rhs in all_schemata():
            binding = match_schema(params, lhs, u)
            if binding is not None:
                out.append(instantiate(rhs, binding))
            binding = match_schema(params, rhs, u)
            if binding is not None:
                out.append(instantiate(lhs, binding))
        return out

    def walk(u, rebuild):
        results.extend(rebuild(r) for r in at_head(u))
        if isinstance(u, App):
            walk(u.fn, lambda r: rebuild(App(r, u.arg)))
            walk(u.arg, lambda r: rebuild(App(u.fn, r)))
        elif isinstance(u, Lambda):
            walk(u.body, lambda r: rebuild(Lambda(u.binder, r)))
        elif isinstance(u, RecN):
            walk(u.base, lambda r: rebuild(RecN(r, u.step)))
            walk(u.step, lambda r: rebuild(RecN(u.base, r)))
        elif isinstance(u, RecOmega):
            walk(u.base, lambda r: rebuild(RecOmega(r, u.step)))
            walk(u.step, lambda r: rebuild(RecOmega(u.base, r)))

    walk(t, lambda r: r)
    return results


def check_equation_certificate(cert, s: Term, t: Term,
                               budget_limit: int = 10 ** 6) -> bool:
    """Accept when the chain of conversion steps connects s and t, or when
    a single eval step is given and both closed type-N sides evaluate to
    the same numeral.  Raises ChainBroken on a bad step."""
    cert = tuple(cert)
    if not cert:
        if alpha_eq(s, t):
            return True
        raise ChainBroken(0, "sides differ and no steps were given")
    if len(cert) == 1 and cert[0] == ("eval",):
        try:
            lv = evaluate(s, budget=EvalBudget(budget_limit))
            rv = evaluate(t, budget=EvalBudget(budget_limit))
        except BudgetExhausted as exc:
            raise ChainBroken(0, "evaluation budget exhausted: %s" % exc)
        except TermTypeError as exc:
            raise ChainBroken(0, "evaluation failed: %s" % exc)
        if isinstance(lv, Numeral) and isinstance(rv, Numeral) \
                and lv.value == rv.value:
            return True
        raise ChainBroken(0, "closed evaluation gives distinct values")
    current = s
    for i, step in enumerate(cert):
        if not isinstance(step, tuple) or not step or step[0] != "conv":
            raise ChainBroken(i, "unknown step %r" % (step,))
        nxt = step[1]
        candidates = _one_step_rewrites(current)
        backwards = _one_step_rewrites(nxt)
        if not any(alpha_eq(nxt, c) for c in candidates) \
                and not any(alpha_eq(current, c) for c in backwards):
            raise ChainBroken(i, "no single conversion relates the sides")
        current = nxt
    if not alpha_eq(current, t):
        raise ChainBroken(len(cert), "chain does not end at the right side")
    return True


# --------------------------------------------------------------------------
# The checker


@dataclass
class ProofReport:
    ok: bool
    problems: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_proof(p: Proof, theory: str,
                defn: Optional[InductiveDefinition] = None) -> ProofReport:
    if theory not in THEORIES:
        raise ProofError("unknown theory %r" % (theory,))
    problems: list = []

    def bad(path, msg):
        problems.append((path, msg))

    def expect(path, got, want, what):
        if formula_key(got) != formula_key(want):
            bad(path, "%s: expected %s, found %s"
                % (what, formula_key(want), formula_key(got)))

    def go(p, path):
        if p.rule not in RULES:
            bad(path, "unknown rule %r" % (p.rule,))
            return
        rep = check_dialect(p.conclusion, theory)
        for msg in rep.problems:
            bad(path, "conclusion outside the %s language: %s" % (theory, msg))
        checker = _NODE_CHECKS.get(p.rule)
        if checker is None:
            bad(path, "rule %s not available" % p.rule)
        else:
            try:
                checker(p, theory, defn, path, bad, expect)
            except ProofError as exc:
                bad(path, str(exc))
        for i, q in enumerate(p.premises):
            go(q, "%s.%d" % (path, i))

    go(p, "root")
    return ProofReport(ok=not problems, problems=problems)


def _need_premises(p, n, path, bad):
    if len(p.premises) != n:
        bad(path, "%s wants %d premises, found %d"
            % (p.rule, n, len(p.premises)))
        return False
    return True


def _chk_excluded_middle(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    phi = p.data.get("formula")
    expect(path, p.conclusion, Or(Not(phi), phi), "excluded middle")


def _chk_subst(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    fa = p.data.get("formula")
    term = p.data.get("term")
    want_cls = ForallN if p.rule == "SubstN" else ForallOmega
    if not isinstance(fa, want_cls):
        bad(path, "%s: data formula is not the right quantifier" % p.rule)
        return
    inst = subst_formula(fa.body, fa.var.name, term, _SUPPLY)
    expect(path, p.conclusion, Or(Not(fa), inst), "substitution instance")


def _chk_expansion(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 1, path, bad):
        return
    expect(path, p.conclusion,
           Or(p.premises[0].conclusion, p.data.get("formula")), "expansion")


def _chk_contraction(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 1, path, bad):
        return
    c = p.premises[0].conclusion
    if not isinstance(c, Or) \
            or formula_key(c.left) != formula_key(c.right):
        bad(path, "contraction premise is not a disjunction of twins")
        return
    expect(path, p.conclusion, c.left, "contraction")


def _chk_or_perm(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 1, path, bad):
        return
    target = p.data.get("formula")
    if target is None:
        bad(path, "or-perm node has no target")
        return
    have = {formula_key(u) for u in or_units(p.premises[0].conclusion)}
    want = {formula_key(u) for u in or_units(target)}
    if not have <= want:
        bad(path, "or-perm target is missing a premise disjunct")
        return
    expect(path, p.conclusion, target, "or-perm")


def _chk_cut(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 2, path, bad):
        return
    c1, c2 = (q.conclusion for q in p.premises)
    if not isinstance(c1, Or) or not isinstance(c2, Or) \
            or not isinstance(c2.left, Not):
        bad(path, "cut premises have the wrong shapes")
        return
    if formula_key(c1.left) != formula_key(c2.left.arg):
        bad(path, "cut premises disagree on the cut formula")
        return
    expect(path, p.conclusion, Or(c1.right, c2.right), "cut")


def _chk_forall_intro(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 1, path, bad):
        return
    v = p.data.get("var")
    c = p.premises[0].conclusion
    quant = ForallN if p.rule == "ForallIntroN" else ForallOmega
    if not isinstance(c, Or):
        bad(path, "%s premise is not a disjunction" % p.rule)
        return
    if not isinstance(v, Var):
        bad(path, "%s: missing eigenvariable" % p.rule)
        return
    if v.name in free_vars_formula(c.right):
        bad(path, "eigenvariable %s is free in the passive disjunct" % v.name)
    expect(path, p.conclusion, Or(quant(v, c.left), c.right),
           "forall introduction")


def _chk_equality(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    kind = p.data.get("kind")
    terms = p.data.get("terms", ())
    if kind in ("cong-in-arg", "cong-in-index", "cong-ise-index") \
            and theory == "id1":
        bad(path, "stagewise congruence outside the indexed theories")
    if kind == "cong-i" and theory != "id1":
        bad(path, "plain membership congruence outside the base theory")
    if kind == "cong-ise-index" and theory == "q0t":
        bad(path, "leaf-atom congruence outside the indexed theory")
    try:
        want = _equality_conclusion(kind, terms, p.data.get("name"))
    except ProofError as exc:
        bad(path, str(exc))
        return
    expect(path, p.conclusion, want, "equality axiom")


def _chk_prim_rec(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    try:
        params, lhs, rhs = _schema_at(p.data.get("name"),
                                      p.data.get("eq_index"))
    except ProofError as exc:
        bad(path, str(exc))
        return
    terms = p.data.get("terms", ())
    if len(terms) != len(params):
        bad(path, "defining equation wants %d instance terms" % len(params))
        return
    binding = {v.name: t for v, t in zip(params, terms)}
    expect(path, p.conclusion,
           EqN(instantiate(lhs, binding), instantiate(rhs, binding)),
           "defining equation")


def _chk_induction(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 2, path, bad):
        return
    v, motive, term = (p.data.get(k) for k in ("var", "motive", "term"))
    if not isinstance(v, Var) or v.ty != TYPE_N:
        bad(path, "induction variable must have type N")
        return
    base, step = induction_premises(v, motive)
    expect(path + " (base)", p.premises[0].conclusion, base, "induction base")
    expect(path + " (step)", p.premises[1].conclusion, step, "induction step")
    expect(path, p.conclusion,
           subst_formula(motive, v.name, term, _SUPPLY), "induction")


def _chk_transfinite(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 2, path, bad):
        return
    if theory == "id1":
        bad(path, "transfinite induction outside the tree theories")
    v, motive, term = (p.data.get(k) for k in ("var", "motive", "term"))
    guarded = bool(p.data.get("guarded"))
    if not isinstance(v, Var) or v.ty != TYPE_O:
        bad(path, "transfinite induction variable must range over trees")
        return
    base, step = transfinite_premises(v, motive, guarded, theory)
    expect(path + " (base)", p.premises[0].conclusion, base,
           "transfinite base")
    expect(path + " (step)", p.premises[1].conclusion, step,
           "transfinite step")
    expect(path, p.conclusion,
           subst_formula(motive, v.name, term, _SUPPLY),
           "transfinite induction")


def _chk_subtree_e(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    if theory == "id1":
        bad(path, "tree axiom outside the tree theories")
        return
    alpha, idx = p.data.get("alpha"), p.data.get("index")
    expect(path, p.conclusion,
           imp(is_e_formula(alpha, theory),
               is_e_formula(sub(alpha, idx), theory)),
           "leaf propagation")


def _chk_is_e_axiom(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    if theory != "oid1":
        bad(path, "the bare leaf axiom lives in the indexed theory")
        return
    expect(path, p.conclusion, IsE(ConstE()), "leaf axiom")


def _chk_omega_inhabited(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    if theory != "oid1":
        bad(path, "tree inhabitation belongs to the indexed theory")
        return
    v = p.data.get("var")
    expect(path, p.conclusion, exists_omega(v, Not(IsE(v))),
           "tree inhabitation")


def _chk_omega_bounding(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    if theory != "oid1":
        bad(path, "the bounding schema belongs to the indexed theory")
        return
    matrix = p.data.get("matrix")
    vx, va, vb, vi = (p.data.get(k) for k in
                      ("var_x", "var_alpha", "var_beta", "var_i"))
    if has_omega_quantifier(matrix):
        bad(path, "bounding matrix has a tree quantifier")
    inner = subst_formula(matrix, va.name, sub(vb, vi), _SUPPLY)
    want = imp(ForallN(vx, exists_omega(va, matrix)),
               exists_omega(vb, ForallN(vx, exists_n(vi, inner))))
    expect(path, p.conclusion, want, "bounding schema")


def _chk_ax_empty(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    if theory == "id1":
        bad(path, "stage axioms outside the tree theories")
        return
    alpha, t = p.data.get("alpha"), p.data.get("term")
    expect(path, p.conclusion,
           imp(is_e_formula(alpha, theory), Not(InIAlpha(alpha, t))),
           "empty stage")


def _chk_fixed_point(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    if theory == "id1":
        bad(path, "stage axioms outside the tree theories")
        return
    if defn is None:
        bad(path, "no inductive definition in scope")
        return
    alpha, t = p.data.get("alpha"), p.data.get("term")
    direction = p.data.get("direction")
    guard = Not(is_e_formula(alpha, theory))
    body = operator_at_children(defn, alpha, t)
    member = InIAlpha(alpha, t)
    if direction == "unfold":
        want = imp(guard, imp(member, body))
    elif direction == "fold":
        want = imp(guard, imp(body, member))
    else:
        bad(path, "fixed point direction must be unfold or fold")
        return
    expect(path, p.conclusion, want, "stage fixed point")


def _chk_closure(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    if theory != "id1":
        bad(path, "closure belongs to the base theory")
        return
    if defn is None:
        bad(path, "no inductive definition in scope")
        return
    t = p.data.get("term")
    hole = _SUPPLY.fresh("z", TYPE_N)
    want = imp(operator_with(defn, hole, InI(hole), t), InI(t))
    expect(path, p.conclusion, want, "closure")


def _chk_leastness(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 1, path, bad):
        return
    if theory != "id1":
        bad(path, "leastness belongs to the base theory")
        return
    if defn is None:
        bad(path, "no inductive definition in scope")
        return
    v, theta = p.data.get("var"), p.data.get("theta")
    expect(path + " (premise)", p.premises[0].conclusion,
           leastness_premise(defn, v, theta), "leastness premise")
    x = _SUPPLY.fresh("x", TYPE_N)
    want = ForallN(x, imp(InI(x),
                          subst_formula(theta, v.name, x, _SUPPLY)))
    expect(path, p.conclusion, want, "leastness")


def _chk_t_omega_eq(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    if theory != "q0t":
        bad(path, "certified equations belong to the quantifier-free theory")
        return
    s, t = p.data.get("left"), p.data.get("right")
    expect(path, p.conclusion, EqN(s, t), "certified equation")
    try:
        check_equation_certificate(p.data.get("cert", ()), s, t)
    except ChainBroken as exc:
        bad(path, "equation certificate: %s" % exc)


def _chk_term_eq(p, theory, defn, path, bad, expect):
    if not _need_premises(p, 0, path, bad):
        return
    if theory != "q0t":
        bad(path, "certified membership transport belongs to the "
                  "quantifier-free theory")
        return
    alpha, beta = p.data.get("alpha"), p.data.get("beta")
    s, t = p.data.get("left"), p.data.get("right")
    expect(path, p.conclusion, imp(InIAlpha(alpha, s), InIAlpha(beta, t)),
           "membership transport")
    try:
        check_equation_certificate(p.data.get("cert_n", ()), s, t)
    except ChainBroken as exc:
        bad(path, "argument certificate: %s" % exc)
    try:
        check_equation_certificate(p.data.get("cert_o", ()), alpha, beta)
    except ChainBroken as exc:
        bad(path, "index certificate: %s" % exc)


_NODE_CHECKS = {
    "ExcludedMiddle": _chk_excluded_middle,
    "SubstN": _chk_subst,
    "SubstOmega": _chk_subst,
    "Expansion": _chk_expansion,
    "Contraction": _chk_contraction,
    "OrPerm": _chk_or_perm,
    "Cut": _chk_cut,
    "ForallIntroN": _chk_forall_intro,
    "ForallIntroOmega": _chk_forall_intro,
    "EqualityAxiom": _chk_equality,
    "PrimRecDefAxiom": _chk_prim_rec,
    "InductionN": _chk_induction,
    "TransfiniteInduction": _chk_transfinite,
    "AxSubtreeE": _chk_subtree_e,
    "IsEAxiom": _chk_is_e_axiom,
    "AxOmegaInhabited": _chk_omega_inhabited,
    "OmegaBounding": _chk_omega_bounding,
    "AxI_Empty": _chk_ax_empty,
    "AxI_FixedPoint": _chk_fixed_point,
    "AxI_Closure": _chk_closure,
    "AxI_Leastness": _chk_leastness,
    "AxI_TermEq": _chk_term_eq,
    "TOmegaEq": _chk_t_omega_eq,
}


# --------------------------------------------------------------------------
# Substitution into proofs.  Admissible because every rule is closed
# under substitution; eigenvariables are renamed out of the way first.


def subst_proof(p: Proof, name: str, replacement: Term,
                supply: Optional[FreshSupply] = None) -> Proof:
    supply = supply or _SUPPLY
    repl_free = set(free_vars(replacement))

    def on_formula(phi):
        return subst_formula(phi, name, replacement, supply)

    def on_term(t):
        return subst(t, name, replacement, supply)

    def go(p):
        rule = p.rule
        data = dict(p.data)
        if rule in ("ForallIntroN", "ForallIntroOmega"):
            v = data["var"]
            if v.name == name:
                # bound in the conclusion, so nothing to replace
                return p
            if v.name in repl_free:
                p = _rename_induction_var(p, supply)
                v = p.data["var"]
            prem = go(p.premises[0])
            return _forall_intro(prem, v,
                                 ForallN if rule == "ForallIntroN"
                                 else ForallOmega, rule)
        if rule in ("InductionN", "TransfiniteInduction"):
            v = data["var"]
            if v.name == name or v.name in repl_free:
                p = _rename_induction_var(p, supply)
                data = dict(p.data)
                v = data["var"]
            motive = on_formula(data["motive"])
            term = on_term(data["term"])
            prems = tuple(go(q) for q in p.premises)
            new_data = {**data, "motive": motive, "term": term}
            concl = subst_formula(motive, v.name, term, supply)
            return Proof(rule, concl, prems, new_data)
        if rule == "AxI_Leastness":
            v = data["var"]
            theta = data["theta"]
            if v.name == name or v.name in repl_free:
                nv = supply.fresh(v.name, v.ty)
                theta = subst_formula(theta, v.name, nv, supply)
                v = nv
            theta = subst_formula(theta, name, replacement, supply)
            prem = go(p.premises[0])
            new_data = {**data, "var": v, "theta": theta}
            x = supply.fresh("x", TYPE_N)
            concl = ForallN(x, imp(InI(x),
                                   subst_formula(theta, v.name, x, supply)))
            return Proof(rule, concl, (prem,), new_data)
        if rule == "OmegaBounding":
            binders = [data[k] for k in ("var_x", "var_alpha", "var_beta",
                                         "var_i")]
            matrix = data["matrix"]
            for j, v in enumerate(binders):
                if v.name == name or v.name in repl_free:
                    nv = supply.fresh(v.name, v.ty)
                    matrix = subst_formula(matrix, v.name, nv, supply)
                    binders[j] = nv
            matrix = subst_formula(matrix, name, replacement, supply)
            return omega_bounding(matrix, *binders)
        if rule == "AxOmegaInhabited":
            return p
        # binder-carrying rules never reach this branch, so a Var here
        # is an ordinary term position
        new_data = {}
        for k, val in data.items():
            if _is_formula(val):
                new_data[k] = on_formula(val)
            elif isinstance(val, TERM_NODES):
                new_data[k] = on_term(val)
            elif isinstance(val, tuple) and k == "terms":
                new_data[k] = tuple(
                    on_term(x) if isinstance(x, TERM_NODES) else x
                    for x in val)
            else:
                new_data[k] = val
        return Proof(rule, on_formula(p.conclusion),
                     tuple(go(q) for q in p.premises), new_data)

    return go(p)


def _rename_induction_var(p: Proof, supply: FreshSupply) -> Proof:
    """Give the rule's distinguished variable a fresh name; the premises
    carry it as an actual free variable, so this is plain substitution."""
    v = p.data["var"]
    nv = supply.fresh(v.name, v.ty)
    if p.rule in ("ForallIntroN", "ForallIntroOmega"):
        prem = subst_proof(p.premises[0], v.name, nv, supply)
        return _forall_intro(prem, nv,
                             ForallN if p.rule == "ForallIntroN"
                             else ForallOmega, p.rule)
    motive = subst_formula(p.data["motive"], v.name, nv, supply)
    prems = tuple(subst_proof(q, v.name, nv, supply) for q in p.premises)
    data = {**p.data, "var": nv, "motive": motive}
    concl = subst_formula(motive, nv.name, p.data["term"], supply)
    return Proof(p.rule, concl, prems, data)


def _is_formula(v):
    return isinstance(v, (EqN, InI, InIAlpha, IsE, PredP, Or, Not, ForallN,
                          ForallOmega))


# --------------------------------------------------------------------------
# Serialization

_DATA_KINDS = {
    "formula": "formula", "motive": "formula", "theta": "formula",
    "matrix": "formula",
    "term": "term", "alpha": "term", "beta": "term", "left": "term",
    "right": "term", "index": "term",
    "var": "var", "var_x": "var", "var_alpha": "var", "var_beta": "var",
    "var_i": "var",
    "kind": "str", "name": "str", "direction": "str", "theory": "str",
    "guarded": "flag", "eq_index": "nat",
    "terms": "terms", "cert": "cert", "cert_n": "cert", "cert_o": "cert",
}


def proof_to_sexpr(p: Proof, declared=frozenset()):
    decl = set(declared)
    entries = []
    needed = dict(free_vars_formula(p.conclusion))
    for q in p.premises:
        needed.update(free_vars_formula(q.conclusion))
    for v in p.data.values():
        if isinstance(v, Var):
            needed.setdefault(v.name, v)
    for name in sorted(n for n in needed if n not in decl):
        v = needed[name]
        entries.append(["var", v.name, sx.type_to_sexpr(v.ty)])
        decl.add(name)
    for k in sorted(p.data):
        v = p.data[k]
        kind = _DATA_KINDS.get(k)
        if kind == "formula":
            entries.append([k, "formula", formula_to_sexpr(v)])
        elif kind == "term":
            entries.append([k, "term", sx.term_to_sexpr(v)])
        elif kind == "var":
            entries.append([k, "binder", v.name, sx.type_to_sexpr(v.ty)])
        elif kind == "str":
            entries.append([k, "str", v])
        elif kind == "flag":
            entries.append([k, "flag", 1 if v else 0])
        elif kind == "nat":
            entries.append([k, "nat", v])
        elif kind == "terms":
            entries.append([k, "terms"] + [sx.term_to_sexpr(t) for t in v])
        elif kind == "cert":
            entries.append([k, "cert"] + [_cert_step_to_sexpr(s) for s in v])
        else:
            raise ProofError("cannot serialize data key %r" % (k,))
    form = ["rule", p.rule, ["data"] + entries]
    for q in p.premises:
        form.append(proof_to_sexpr(q, frozenset(decl)))
    return form


def _cert_step_to_sexpr(step):
    if step == ("eval",):
        return ["eval"]
    kind, term = step
    return [kind, sx.term_to_sexpr(term)]


def proof_from_sexpr(form, scope, supply):
    if not isinstance(form, list) or len(form) < 3 or form[0] != "rule":
        raise sx.SexprError("bad proof node: %r" % (form,))
    rule = form[1]
    if rule not in RULES:
        raise sx.SexprError("unknown rule %r" % (rule,))
    data_form = form[2]
    if not isinstance(data_form, list) or not data_form \
            or data_form[0] != "data":
        raise sx.SexprError("missing data block in %r" % (rule,))
    scope = dict(scope)
    data = {}
    for entry in data_form[1:]:
        key = entry[0]
        if key == "var" and len(entry) == 3 and isinstance(entry[1], str) \
                and entry[1] not in _DATA_KINDS:
            ty = sx.elaborate_type(entry[2])
            scope[entry[1]] = Var(entry[1], ty)
            continue
        tag = entry[1]
        if tag == "formula":
            data[key] = formula_from_sexpr(entry[2], scope, supply)
        elif tag == "term":
            data[key] = sx.elaborate_term(entry[2], scope, supply)
        elif tag == "binder":
            v = Var(entry[2], sx.elaborate_type(entry[3]))
            scope[v.name] = v
            data[key] = v
        elif tag == "str":
            data[key] = entry[2]
        elif tag == "flag":
            data[key] = bool(entry[2])
        elif tag == "nat":
            data[key] = entry[2]
        elif tag == "terms":
            data[key] = tuple(
                sx.elaborate_term(t, scope, supply) for t in entry[2:])
        elif tag == "cert":
            data[key] = tuple(_cert_step_from_sexpr(s, scope, supply)
                              for s in entry[2:])
        else:
            raise sx.SexprError("bad data entry %r" % (entry,))
    premises = tuple(proof_from_sexpr(f, scope, supply) for f in form[3:])
    return _rebuild(rule, data, premises)


def _cert_step_from_sexpr(form, scope, supply):
    if form == ["eval"]:
        return ("eval",)
    kind, term = form
    return (kind, sx.elaborate_term(term, scope, supply))


def _rebuild(rule, data, premises):
    """Reconstruct a node from parsed pieces, recomputing the conclusion."""
    if rule == "ExcludedMiddle":
        return excluded_middle(data["formula"])
    if rule == "SubstN":
        return subst_n(data["formula"], data["term"])
    if rule == "SubstOmega":
        return subst_omega(data["formula"], data["term"])
    if rule == "Expansion":
        return expansion(premises[0], data["formula"])
    if rule == "Contraction":
        return contraction(premises[0])
    if rule == "OrPerm":
        return or_perm(premises[0], data["formula"])
    if rule == "Cut":
        return cut(premises[0], premises[1])
    if rule == "ForallIntroN":
        return forall_intro_n(premises[0], data["var"])
    if rule == "ForallIntroOmega":
        return forall_intro_omega(premises[0], data["var"])
    if rule == "EqualityAxiom":
        return equality_axiom(data["kind"], *data["terms"],
                              fn_name=data.get("name"))
    if rule == "PrimRecDefAxiom":
        params, _, _ = _schema_at(data["name"], data["eq_index"])
        binding = {v.name: t for v, t in zip(params, data["terms"])}
        return prim_rec_def_axiom(data["name"], data["eq_index"], binding)
    if rule == "InductionN":
        return induction_n(premises[0], premises[1], data["var"],
                           data["motive"], data["term"])
    if rule == "TransfiniteInduction":
        return transfinite_induction(premises[0], premises[1], data["var"],
                                     data["motive"], data["term"],
                                     bool(data.get("guarded")))
    if rule == "AxSubtreeE":
        return ax_subtree_e(data["alpha"], data["index"],
                            data.get("theory", "oid1"))
    if rule == "IsEAxiom":
        return is_e_axiom()
    if rule == "AxOmegaInhabited":
        v = data["var"]
        return Proof("AxOmegaInhabited", exists_omega(v, Not(IsE(v))), (),
                     {"var": v})
    if rule == "OmegaBounding":
        return omega_bounding(data["matrix"], data["var_x"],
                              data["var_alpha"], data["var_beta"],
                              data["var_i"])
    if rule == "AxI_Empty":
        return ax_empty(data["alpha"], data["term"],
                        data.get("theory", "oid1"))
    if rule == "AxI_FixedPoint":
        return ax_fixed_point(_ambient_defn(), data["alpha"], data["term"],
                              data["direction"], data.get("theory", "oid1"))
    if rule == "AxI_Closure":
        return ax_closure(_ambient_defn(), data["term"])
    if rule == "AxI_Leastness":
        return ax_leastness(_ambient_defn(), premises[0], data["var"],
                            data["theta"])
    if rule == "AxI_TermEq":
        return ax_term_eq(data["alpha"], data["beta"], data["left"],
                          data["right"], data.get("cert_n", ()),
                          data.get("cert_o", ()))
    if rule == "TOmegaEq":
        return t_omega_eq(data["left"], data["right"], data.get("cert", ()))
    raise sx.SexprError("cannot rebuild rule %r" % (rule,))


_PENDING_DEFN: list = []


class definition_scope:
    """Binds the ambient inductive definition for parsing; the nodes that
    mention the operator body recompute their conclusions from it."""

    def __init__(self, defn: InductiveDefinition):
        self.defn = defn

    def __enter__(self):
        _PENDING_DEFN.append(self.defn)
        return self.defn

    def __exit__(self, *exc):
        _PENDING_DEFN.pop()
        return False


def _ambient_defn():
    if not _PENDING_DEFN:
        raise sx.SexprError("no inductive definition in scope for parsing")
    return _PENDING_DEFN[-1]
