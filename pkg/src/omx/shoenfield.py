"""Derived inference rules over the base proof calculus.

The base rules move one connective at a time, and composing them by
hand is miserable: every rearrangement deeper than the top disjunction
has to be threaded through cuts against excluded-middle instances.
This module packages those derivations once.  The translation stages
can then ask for modus ponens, case analysis, implication chaining,
quantifier monotonicity, or a whole propositional tautology without
spelling out the cut structure each time.

Everything here emits plain base-rule proof trees; nothing extends the
calculus.  The workhorses are

  * ``prop_taut``: a sequent-style prover for propositional
    consequences, treating quantified subformulas as opaque atoms, and
  * ``mono_pred``: implication under a positive predicate hole, the
    engine behind monotonicity arguments about inductive operators.
"""

from .formulas import (
    ForallN, ForallOmega, Formula, Not, Or, PredP, alpha_eq_formula,
    conj, exists_n, exists_omega, formula_key, imp, mentions_p,
    or_units, print_formula, subst_formula, subst_predicate,
)
from .proofs import (
    Proof, ProofError, contraction, cut, excluded_middle,
    forall_intro_n, forall_intro_omega, or_perm, subst_n, subst_omega,
    subst_proof,
)
from .terms import TYPE_N, TYPE_O, FreshSupply, Term, Var

_SUPPLY = FreshSupply(4 * 10**8)


class TautologyError(ProofError):
    """Raised when the sequent prover bottoms out on an open sequent."""


def imp_parts(phi: Formula):
    """Split ``not A or B`` into (A, B)."""
    if not isinstance(phi, Or) or not isinstance(phi.left, Not):
        raise ProofError("not an implication shape: %s" % print_formula(phi))
    return phi.left.arg, phi.right


def right_nested(units) -> Formula:
    units = list(units)
    if not units:
        raise ProofError("empty disjunction")
    out = units[-1]
    for u in reversed(units[:-1]):
        out = Or(u, out)
    return out


# --------------------------------------------------------------------------
# Small combinators


def mp(p_imp: Proof, p: Proof) -> Proof:
    """From ``not A or B`` and ``A`` conclude ``B``."""
    a, b = imp_parts(p_imp.conclusion)
    if formula_key(p.conclusion) != formula_key(a):
        raise ProofError("modus ponens premise does not match the antecedent")
    widened = or_perm(p, Or(a, b))
    return contraction(cut(widened, p_imp))


def cases(pivot: Formula, goal: Formula, p_pos: Proof, p_neg: Proof) -> Proof:
    """From ``pivot or goal`` and ``not pivot or goal`` conclude goal.

    Premises may arrive in any arrangement; they are reshaped here.
    """
    s1 = or_perm(p_pos, Or(pivot, goal))
    s2 = or_perm(p_neg, Or(Not(pivot), goal))
    return contraction(cut(s1, s2))


def unit_map(p: Proof, p_imp: Proof, goal: Formula) -> Proof:
    """Rewrite one disjunct of ``p`` along the implication ``p_imp``.

    ``p`` proves a disjunction containing the antecedent of ``p_imp`` as
    a unit; the goal is any arrangement whose units cover the rest of
    ``p`` plus the consequent.
    """
    old, new = imp_parts(p_imp.conclusion)
    s = or_perm(p, Or(old, goal))
    return or_perm(cut(s, p_imp), goal)


def imp_refl(phi: Formula) -> Proof:
    return excluded_middle(phi)


def imp_trans(p: Proof, q: Proof) -> Proof:
    """Chain ``not A or B`` and ``not B or C`` into ``not A or C``."""
    a, b = imp_parts(p.conclusion)
    b2, c = imp_parts(q.conclusion)
    if formula_key(b) != formula_key(b2):
        raise ProofError("implication chain does not line up")
    return cut(or_perm(p, Or(b, Not(a))), q)


def or_mono(pa: Proof, pb: Proof) -> Proof:
    """From ``A -> A2`` and ``B -> B2`` conclude ``A or B -> A2 or B2``.

    The derivation keeps every intermediate stage a cyclic rotation of
    three blocks, which is the one kind of regrouping the base moves
    would have handled even without OrPerm.
    """
    a, a2 = imp_parts(pa.conclusion)
    b, b2 = imp_parts(pb.conclusion)
    w = Not(Or(a, b))
    s = or_perm(excluded_middle(Or(a, b)), Or(a, Or(b, w)))
    s = or_perm(cut(s, pa), Or(b, Or(w, a2)))
    s = cut(s, pb)
    return or_perm(s, Or(w, Or(a2, b2)))


def dn_intro_imp(phi: Formula) -> Proof:
    """``phi -> not not phi``."""
    return or_perm(excluded_middle(Not(phi)), Or(Not(phi), Not(Not(phi))))


def dn_elim_imp(phi: Formula) -> Proof:
    """``not not phi -> phi``."""
    step = cut(excluded_middle(phi), dn_intro_imp(Not(phi)))
    return or_perm(step, Or(Not(Not(Not(phi))), phi))


def dn_intro(p: Proof) -> Proof:
    return mp(dn_intro_imp(p.conclusion), p)


def dn_elim(p: Proof) -> Proof:
    c = p.conclusion
    if not isinstance(c, Not) or not isinstance(c.arg, Not):
        raise ProofError("double negation elimination wants a not-not")
    return mp(dn_elim_imp(c.arg.arg), p)


def contrapose(p: Proof) -> Proof:
    """From ``A -> B`` conclude ``not B -> not A``."""
    a, b = imp_parts(p.conclusion)
    s = cut(or_perm(p, Or(b, Not(a))), dn_intro_imp(b))
    return or_perm(s, Or(Not(Not(b)), Not(a)))


# --------------------------------------------------------------------------
# Propositional consequence

# The prover runs the usual sequent saturation: strip double negations,
# split negated disjunctions, close on a complementary pair.  Disjuncts
# with a quantifier or an atom at the head are opaque.  Premises are
# folded in up front as extra negated disjuncts discharged by cut.


def prop_taut(goal: Formula, premises=()) -> Proof:
    q = _taut(list(or_units(goal)), list(premises))
    if formula_key(q.conclusion) == formula_key(goal):
        return q
    return or_perm(q, goal)


def _taut(units, premises) -> Proof:
    goal = right_nested(units)
    if premises:
        p0 = premises[0]
        c0 = p0.conclusion
        q = _taut([Not(c0)] + units, premises[1:])
        return cases(c0, goal, or_perm(p0, Or(c0, goal)),
                     or_perm(q, Or(Not(c0), goal)))

    keys = {formula_key(u) for u in units}
    for u in units:
        if isinstance(u, Not) and formula_key(u.arg) in keys:
            return or_perm(excluded_middle(u.arg), goal)

    for i, u in enumerate(units):
        if isinstance(u, Not) and isinstance(u.arg, Not):
            inner = u.arg.arg
            rest = units[:i] + units[i + 1:]
            q = _taut(rest + list(or_units(inner)), [])
            s = or_perm(q, Or(inner, goal))
            return or_perm(cut(s, dn_intro_imp(inner)), goal)

    for i, u in enumerate(units):
        if isinstance(u, Not) and isinstance(u.arg, Or):
            e, f = u.arg.left, u.arg.right
            rest = units[:i] + units[i + 1:]
            q1 = _taut(rest + [Not(e)], [])
            q2 = _taut(rest + [Not(f)], [])
            sub = Or(e, goal)
            p_pos = or_perm(excluded_middle(u.arg), Or(f, sub))
            step = cases(f, sub, p_pos, or_perm(q2, Or(Not(f), sub)))
            return cases(e, goal, step, or_perm(q1, Or(Not(e), goal)))

    raise TautologyError(
        "open sequent: %s" % " | ".join(print_formula(u) for u in units))


def and_intro(p: Proof, q: Proof) -> Proof:
    return prop_taut(conj(p.conclusion, q.conclusion), [p, q])


def and_elim_left(p: Proof) -> Proof:
    l, _ = _conj_parts(p.conclusion)
    return prop_taut(l, [p])


def and_elim_right(p: Proof) -> Proof:
    _, r = _conj_parts(p.conclusion)
    return prop_taut(r, [p])


def _conj_parts(c: Formula):
    if not isinstance(c, Not) or not isinstance(c.arg, Or) \
            or not isinstance(c.arg.left, Not) \
            or not isinstance(c.arg.right, Not):
        raise ProofError("not a conjunction shape: %s" % print_formula(c))
    return c.arg.left.arg, c.arg.right.arg


# --------------------------------------------------------------------------
# Quantifiers
#
# Each helper dispatches on the bound variable's type, so one entry
# point serves both the number and the tree quantifier.


def _quant_ops(v: Var):
    if v.ty == TYPE_O:
        return ForallOmega, subst_omega, forall_intro_omega, exists_omega
    if v.ty == TYPE_N:
        return ForallN, subst_n, forall_intro_n, exists_n
    raise ProofError("quantified variable must be a number or a tree")


def forall_elim(p: Proof, t: Term) -> Proof:
    """From ``forall v phi`` conclude ``phi[t]``."""
    c = p.conclusion
    if not isinstance(c, (ForallN, ForallOmega)):
        raise ProofError("forall elimination wants a quantified conclusion")
    _, inst, _, _ = _quant_ops(c.var)
    return mp(inst(c, t), p)


def forall_simple(p: Proof, v: Var) -> Proof:
    """From ``phi`` conclude ``forall v phi``."""
    quant, _, intro, _ = _quant_ops(v)
    widened = Or(p.conclusion, quant(v, p.conclusion))
    return contraction(intro(or_perm(p, widened), v))


def forall_imp_intro(p: Proof, v: Var) -> Proof:
    """From ``psi -> phi`` with v not free in psi, ``psi -> forall v phi``."""
    psi, phi = imp_parts(p.conclusion)
    _, _, intro, _ = _quant_ops(v)
    flipped = intro(or_perm(p, Or(phi, Not(psi))), v)
    return or_perm(flipped, imp(psi, flipped.conclusion.left))


def forall_mono(p: Proof, v: Var) -> Proof:
    """From ``A -> B`` conclude ``forall v A -> forall v B``."""
    a, b = imp_parts(p.conclusion)
    quant, inst, _, _ = _quant_ops(v)
    return forall_imp_intro(imp_trans(inst(quant(v, a), v), p), v)


def exists_intro_imp(phi: Formula, v: Var, t: Term) -> Proof:
    """``phi[v := t] -> exists v phi``."""
    quant, inst, _, ex = _quant_ops(v)
    ax = inst(quant(v, Not(phi)), t)
    goal = imp(subst_formula(phi, v.name, t, _SUPPLY), ex(v, phi))
    return or_perm(ax, goal)


def exists_elim_imp(p: Proof, v: Var) -> Proof:
    """From ``phi -> theta`` with v not free in theta,
    ``exists v phi -> theta``."""
    phi, theta = imp_parts(p.conclusion)
    quant, _, intro, ex = _quant_ops(v)
    lifted = intro(or_perm(p, Or(Not(phi), theta)), v)
    closed = quant(v, Not(phi))
    goal = imp(ex(v, phi), theta)
    return unit_map(lifted, dn_intro_imp(closed), goal)


def exists_mono(p: Proof, v: Var) -> Proof:
    """From ``A -> B`` conclude ``exists v A -> exists v B``."""
    a, b = imp_parts(p.conclusion)
    return exists_elim_imp(imp_trans(p, exists_intro_imp(b, v, v)), v)


# --------------------------------------------------------------------------
# Implication under a positive predicate hole


def mono_pred(eta: Formula, p_imp: Proof, z: Var) -> Proof:
    """From ``theta1(z) -> theta2(z)`` (z free in the premise) conclude
    ``eta(theta1/P) -> eta(theta2/P)`` for eta with only positive P.

    Recurses on eta's shape, flipping direction under each negation; a
    flipped occurrence of P would need the converse premise, so
    positivity is exactly what makes the recursion total.
    """
    th1z, th2z = imp_parts(p_imp.conclusion)

    def go(phi, sign):
        if isinstance(phi, PredP):
            if not sign:
                raise ProofError("predicate hole in a negative position")
            return subst_proof(p_imp, z.name, phi.arg, _SUPPLY)
        if not mentions_p(phi):
            return imp_refl(phi)
        if isinstance(phi, Or):
            return or_mono(go(phi.left, sign), go(phi.right, sign))
        if isinstance(phi, Not):
            return contrapose(go(phi.arg, not sign))
        if isinstance(phi, (ForallN, ForallOmega)):
            return forall_mono(go(phi.body, sign), phi.var)
        raise ProofError("predicate hole inside an atom")

    out = go(eta, True)
    want = imp(subst_predicate(eta, z, th1z, _SUPPLY),
               subst_predicate(eta, z, th2z, _SUPPLY))
    if not alpha_eq_formula(out.conclusion, want):
        # same formula up to bound renaming, realign on the nose
        out = or_perm(out, want)
    return out


def mono_pred_under(hyp: Formula, eta: Formula, p_imp: Proof,
                    z: Var) -> Proof:
    """``mono_pred`` with a side condition carried along: from
    ``hyp -> (theta1(z) -> theta2(z))`` conclude
    ``hyp -> (eta(theta1/P) -> eta(theta2/P))``.

    The induction steps need this shape: the pointwise implication only
    holds under the induction hypothesis, which must survive untouched
    while the hole recursion runs.  hyp may not contain z free, nor any
    variable bound in eta; freshen eta first if in doubt.
    """
    _, inner = imp_parts(p_imp.conclusion)
    th1z, th2z = imp_parts(inner)

    # Every recursive result has the shape hyp -> (A -> B), with the
    # inner implication flipped under negative signs, so the parents
    # can read A and B back off the conclusion.
    def parts(q):
        _, r = imp_parts(q.conclusion)
        return imp_parts(r)

    def go(phi, sign):
        if isinstance(phi, PredP):
            if not sign:
                raise ProofError("predicate hole in a negative position")
            return subst_proof(p_imp, z.name, phi.arg, _SUPPLY)
        if not mentions_p(phi):
            return prop_taut(imp(hyp, imp(phi, phi)))
        if isinstance(phi, Or):
            qa, qb = go(phi.left, sign), go(phi.right, sign)
            (a1, a2), (b1, b2) = parts(qa), parts(qb)
            return prop_taut(imp(hyp, imp(Or(a1, b1), Or(a2, b2))),
                             [qa, qb])
        if isinstance(phi, Not):
            q = go(phi.arg, not sign)
            a, b = parts(q)
            return prop_taut(imp(hyp, imp(Not(b), Not(a))), [q])
        if isinstance(phi, (ForallN, ForallOmega)):
            q = go(phi.body, sign)
            a, b = parts(q)
            quant, inst, intro, _ = _quant_ops(phi.var)
            ax = inst(quant(phi.var, a), phi.var)
            h1 = prop_taut(imp(hyp, imp(quant(phi.var, a), b)), [q, ax])
            spread = or_perm(h1, Or(b, Or(Not(hyp),
                                          Not(quant(phi.var, a)))))
            lifted = intro(spread, phi.var)
            return or_perm(lifted, imp(hyp, imp(quant(phi.var, a),
                                                lifted.conclusion.left)))
        raise ProofError("predicate hole inside an atom")

    out = go(eta, True)
    want = imp(hyp, imp(subst_predicate(eta, z, th1z, _SUPPLY),
                        subst_predicate(eta, z, th2z, _SUPPLY)))
    if not alpha_eq_formula(out.conclusion, want):
        out = or_perm(out, want)
    return out
