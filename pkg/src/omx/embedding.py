"""Rereading proofs about the inductive set as proofs about its stages.

The base theory treats the inductively defined set as a finished
totality: one membership predicate, a closure axiom, a leastness rule.
The tree-indexed theory only ever sees the stages I_alpha along
well-founded trees.  This module rereads the first language in the
second.  Membership becomes membership in some stage, and the two
set-specific rules are discharged by honest staged derivations:

  * closure: a true operator instance mentions the set only in
    positive positions, so every occurrence can be pushed below some
    stage; the bounding schema merges that family of stages into a
    single tree, and the stage equation folds the instance in.
  * leastness: transfinite induction on the stage index.  Whatever
    sits in a stage got there from strictly smaller stages, so a
    predicate closed under the operator swallows stage after stage.

``hat_formula`` rereads a formula, ``hat_proof`` a whole proof.
Arithmetic rules pass through with their side formulas rereread, which
is the point of the exercise: on set-free conclusions the output proof
proves the very same sentence, inside a theory the later stages know
how to interpret.
"""

from .formulas import (
    EqN, ForallN, ForallOmega, Formula, InI, InIAlpha,
    InductiveDefinition, IsE, Not, Or, PredP, alpha_eq_formula,
    exists_n, exists_omega, freshen_formula, imp, mentions_p,
    subst_formula, subst_predicate,
)
from .proofs import (
    Proof, ProofError, ax_empty, ax_fixed_point, ax_omega_inhabited,
    ax_subtree_e, contraction, cut, equality_axiom, excluded_middle,
    expansion, forall_intro_n, induction_n, is_e_axiom, omega_bounding,
    operator_at_children, operator_with, or_perm, prec_membership,
    subst_n, transfinite_induction,
)
from .shoenfield import (
    exists_elim_imp, exists_intro_imp, exists_mono, forall_elim,
    forall_imp_intro, forall_mono, forall_simple, imp_refl, imp_trans,
    mono_pred, mono_pred_under, mp, prop_taut,
)
from .terms import (
    ConstE, FreshSupply, NatLit, TYPE_N, TYPE_O, Term, Var, sub,
)


class EmbeddingError(ProofError):
    """A proof or operator shape with no staged reading."""


# Rules a base-theory proof may use.  Everything else is refused up
# front rather than half-translated.
BASE_RULES = frozenset({
    "ExcludedMiddle", "SubstN", "Expansion", "Contraction", "OrPerm",
    "Cut", "ForallIntroN", "EqualityAxiom", "PrimRecDefAxiom",
    "InductionN", "AxI_Closure", "AxI_Leastness",
})


def hat_formula(phi: Formula, supply: FreshSupply) -> Formula:
    """Reread a base formula over stages: membership in the set becomes
    membership in some stage, everything else is left alone."""
    if isinstance(phi, InI):
        beta = supply.fresh("beta", TYPE_O)
        return exists_omega(beta, InIAlpha(beta, phi.arg))
    if isinstance(phi, Or):
        return Or(hat_formula(phi.left, supply),
                  hat_formula(phi.right, supply))
    if isinstance(phi, Not):
        return Not(hat_formula(phi.arg, supply))
    if isinstance(phi, (ForallN, ForallOmega)):
        return type(phi)(phi.var, hat_formula(phi.body, supply))
    if isinstance(phi, (EqN, InIAlpha, IsE, PredP)):
        return phi
    raise EmbeddingError("no staged reading for %s" % type(phi).__name__)


class EmbeddingContext:
    """One rereading run: the ambient definition, a name supply, and
    the stage lemmas every discharge shares."""

    def __init__(self, defn: InductiveDefinition, supply=None):
        self.defn = defn
        self.supply = supply if supply is not None else \
            FreshSupply(11 * 10**8)
        self._proof_memo = {}
        self._stage_monotone = None
        self._below_subset = None

    def hat(self, phi: Formula) -> Formula:
        return hat_formula(phi, self.supply)

    def fresh(self, hint: str, ty=TYPE_N) -> Var:
        return self.supply.fresh(hint, ty)

    def member_somewhere(self, t: Term) -> Formula:
        """The hat of plain membership: t sits in some stage."""
        beta = self.fresh("beta", TYPE_O)
        return exists_omega(beta, InIAlpha(beta, t))

    def freshened_body_at(self, t: Term) -> Formula:
        """The operator body at t, all binders renamed fresh so the
        monotonicity recursions cannot trip over user names."""
        body = freshen_formula(self.defn.body, self.supply)
        return subst_formula(body, self.defn.var.name, t, self.supply)


# --------------------------------------------------------------------------
# Stage lemmas


def stage_monotone(ctx: EmbeddingContext) -> Proof:
    """forall beta j x: membership at a child stage persists at the
    parent, by transfinite induction on the parent.

    Nothing inhabits any stage below a leaf.  At a branching stage, a
    member of the child unfolds to the operator over the grandchild
    stages, the induction hypothesis moves each grandchild up to a
    child of the parent, and folding at the parent closes the loop.
    """
    if ctx._stage_monotone is not None:
        return ctx._stage_monotone
    defn = ctx.defn
    b = ctx.fresh("beta", TYPE_O)
    j, x = ctx.fresh("j"), ctx.fresh("x")
    motive = ForallN(j, ForallN(x, imp(InIAlpha(sub(b, j), x),
                                       InIAlpha(b, x))))

    leaf_child = mp(ax_subtree_e(ConstE(), j), is_e_axiom())
    no_member = mp(ax_empty(sub(ConstE(), j), x), leaf_child)
    base = prop_taut(imp(InIAlpha(sub(ConstE(), j), x),
                         InIAlpha(ConstE(), x)), [no_member])
    base = forall_simple(forall_simple(base, x), j)

    n = ctx.fresh("n")
    ih = ForallN(n, subst_formula(motive, b.name, sub(b, n), ctx.supply))
    j2, x2, k, z = (ctx.fresh(h) for h in ("j", "x", "k", "z"))

    # pointwise: under ih, sitting below b[j2] means sitting below b
    at_j2 = subst_formula(motive, b.name, sub(b, j2), ctx.supply)
    at_k = subst_formula(at_j2.body, at_j2.var.name, k, ctx.supply)
    iv = ctx.fresh("i")
    up = exists_intro_imp(InIAlpha(sub(b, iv), z), iv, j2)
    below_b = up.conclusion.right
    point = prop_taut(imp(ih, imp(InIAlpha(sub(sub(b, j2), k), z),
                                  below_b)),
                      [subst_n(ih, j2), subst_n(at_j2, k),
                       subst_n(at_k, z), up])
    flip = or_perm(point, imp(InIAlpha(sub(sub(b, j2), k), z),
                              Or(Not(ih), below_b)))
    gone = exists_elim_imp(flip, k)
    p_imp = or_perm(gone, imp(ih, imp(gone.conclusion.left.arg, below_b)))

    carry = mono_pred_under(ih, ctx.freshened_body_at(x2), p_imp, z)
    glue = prop_taut(imp(ih, imp(InIAlpha(sub(b, j2), x2),
                                 InIAlpha(b, x2))),
                     [ax_empty(sub(b, j2), x2),
                      ax_fixed_point(defn, sub(b, j2), x2, "unfold"),
                      carry,
                      ax_fixed_point(defn, b, x2, "fold"),
                      ax_subtree_e(b, j2)])
    step = forall_imp_intro(forall_imp_intro(glue, x2), j2)

    out = forall_simple(transfinite_induction(base, step, b, motive, b), b)
    ctx._stage_monotone = out
    return out


def below_subset(ctx: EmbeddingContext) -> Proof:
    """forall beta i z: sitting below a child means sitting below the
    parent.  Corollary of the stage lemma at the child."""
    if ctx._below_subset is not None:
        return ctx._below_subset
    stage = stage_monotone(ctx)
    b = ctx.fresh("beta", TYPE_O)
    i, z, k = ctx.fresh("i"), ctx.fresh("z"), ctx.fresh("k")
    inst = forall_elim(forall_elim(forall_elim(stage, sub(b, i)), k), z)
    iv = ctx.fresh("i")
    up = exists_intro_imp(InIAlpha(sub(b, iv), z), iv, i)
    gone = exists_elim_imp(imp_trans(inst, up), k)
    out = forall_simple(forall_simple(forall_simple(gone, z), i), b)
    ctx._below_subset = out
    return out


# --------------------------------------------------------------------------
# Closure


def _strictly_positive(phi) -> bool:
    # stricter than positivity: the placeholder never sits under any
    # negation at all, so the bounding recursion needs no sign flips
    if isinstance(phi, Not):
        return not mentions_p(phi.arg)
    if isinstance(phi, Or):
        return _strictly_positive(phi.left) and _strictly_positive(phi.right)
    if isinstance(phi, (ForallN, ForallOmega)):
        return _strictly_positive(phi.body)
    return True


def _read_below(ctx, chi: Formula, alpha) -> Formula:
    """chi with the placeholder read as membership below alpha."""
    z = ctx.fresh("z")
    return subst_predicate(chi, z, prec_membership(alpha, z), ctx.supply)


def pos_bound(ctx: EmbeddingContext, t: Term) -> Proof:
    """If the operator instance at t holds with the set read as
    membership-somewhere, one stage already accounts for all of it:
    psi(t, somewhere) -> exists alpha psi(t, below alpha).

    Recursion on the body.  Set-free parts bound themselves by the
    leaf; a membership atom is bounded by its witness stage wrapped
    through the bounding schema; a disjunction borrows the bound of
    whichever side holds; a universal bounds each instance, merges the
    family through the bounding schema, and flattens child stages into
    the merged tree with the below-subset lemma.
    """
    if not _strictly_positive(ctx.defn.body):
        raise EmbeddingError(
            "closure discharge needs the placeholder clear of negations "
            "in the operator body")

    def bound(chi):
        if not mentions_p(chi):
            a = ctx.fresh("alpha", TYPE_O)
            return exists_intro_imp(chi, a, ConstE())
        if isinstance(chi, PredP):
            s = chi.arg
            xd = ctx.fresh("x")
            a6, b6 = ctx.fresh("alpha", TYPE_O), ctx.fresh("beta", TYPE_O)
            i6 = ctx.fresh("i")
            anywhere = ctx.member_somewhere(s)
            spread = forall_imp_intro(imp_refl(anywhere), xd)
            merged = imp_trans(spread,
                               omega_bounding(InIAlpha(a6, s),
                                              xd, a6, b6, i6))
            # the dummy quantifier has served; strip it at zero
            inner = ForallN(xd, exists_n(i6, InIAlpha(sub(b6, i6), s)))
            strip = subst_n(inner, NatLit(0))
            return imp_trans(merged, exists_mono(strip, b6))
        if isinstance(chi, Or):
            qa, qb = bound(chi.left), bound(chi.right)
            g = ctx.fresh("alpha", TYPE_O)
            la = _read_below(ctx, chi.left, g)
            lb = _read_below(ctx, chi.right, g)
            both = Or(la, lb)
            ca = imp_trans(qa, exists_mono(prop_taut(imp(la, both)), g))
            cb = imp_trans(qb, exists_mono(prop_taut(imp(lb, both)), g))
            return prop_taut(imp(Or(_hat_read(ctx, chi.left),
                                    _hat_read(ctx, chi.right)),
                                 ca.conclusion.right), [ca, cb])
        if not isinstance(chi, ForallN):
            raise EmbeddingError(
                "no bounding recursion for %s" % type(chi).__name__)
        v, c = chi.var, chi.body
        qc = bound(c)
        a7, b7 = ctx.fresh("alpha", TYPE_O), ctx.fresh("beta", TYPE_O)
        i7 = ctx.fresh("i")
        matrix = _read_below(ctx, c, a7)
        family = imp_trans(forall_mono(qc, v),
                           omega_bounding(matrix, v, a7, b7, i7))
        zm = ctx.fresh("z")
        point = forall_elim(forall_elim(forall_elim(
            below_subset(ctx), b7), i7), zm)
        collapse = exists_elim_imp(mono_pred(c, point, zm), i7)
        return imp_trans(family,
                         exists_mono(forall_mono(collapse, v), b7))

    return bound(ctx.freshened_body_at(t))


def _hat_read(ctx, chi: Formula) -> Formula:
    """chi with the placeholder read as membership-somewhere."""
    z = ctx.fresh("z")
    return subst_predicate(chi, z, ctx.member_somewhere(z), ctx.supply)


def fold_below(ctx: EmbeddingContext, t: Term):
    """From the operator over the children of a free stage variable a,
    membership in some stage; returns (proof, a).

    At a branching a the stage equation folds directly.  A leaf a
    supports the instance only vacuously, so the whole instance
    transports to any branching tree, and one exists.
    """
    defn = ctx.defn
    a2 = ctx.fresh("alpha", TYPE_O)
    b3 = ctx.fresh("beta", TYPE_O)
    i8, z8 = ctx.fresh("i"), ctx.fresh("z")
    hat_t = ctx.member_somewhere(t)

    mem_b = prec_membership(b3, z8)
    empty_leaf = prop_taut(
        imp(IsE(a2), imp(InIAlpha(sub(a2, i8), z8), mem_b)),
        [ax_subtree_e(a2, i8), ax_empty(sub(a2, i8), z8)])
    flip = or_perm(empty_leaf,
                   imp(InIAlpha(sub(a2, i8), z8),
                       Or(Not(IsE(a2)), mem_b)))
    gone = exists_elim_imp(flip, i8)
    transport = or_perm(gone, imp(IsE(a2),
                                  imp(gone.conclusion.left.arg, mem_b)))
    moved = mono_pred_under(IsE(a2), ctx.freshened_body_at(t),
                            transport, z8)

    bv, bw = ctx.fresh("beta", TYPE_O), ctx.fresh("beta", TYPE_O)
    psi_a = operator_at_children(defn, a2, t)
    goal = prop_taut(
        imp(Not(IsE(b3)), imp(psi_a, hat_t)),
        [ax_fixed_point(defn, a2, t, "fold"),
         exists_intro_imp(InIAlpha(bv, t), bv, a2),
         moved,
         ax_fixed_point(defn, b3, t, "fold"),
         exists_intro_imp(InIAlpha(bw, t), bw, b3)])
    out = mp(exists_elim_imp(goal, b3), ax_omega_inhabited())
    return out, a2


def _discharge_closure(ctx: EmbeddingContext, p: Proof) -> Proof:
    t = p.data["term"]
    fold_p, a2 = fold_below(ctx, t)
    chain = imp_trans(pos_bound(ctx, t), exists_elim_imp(fold_p, a2))
    target = ctx.hat(p.conclusion)
    if not alpha_eq_formula(chain.conclusion, target):
        chain = or_perm(chain, target)
    return chain


# --------------------------------------------------------------------------
# Leastness


def _discharge_leastness(ctx: EmbeddingContext, p: Proof,
                         hat_premise: Proof) -> Proof:
    defn = ctx.defn
    tv, theta = p.data["var"], p.data["theta"]
    theta_hat = ctx.hat(theta)

    def th_at(s):
        return subst_formula(theta_hat, tv.name, s, ctx.supply)

    g = ctx.fresh("gamma", TYPE_O)
    xl = ctx.fresh("x")
    tx = th_at(xl)
    motive = ForallN(xl, imp(InIAlpha(g, xl), tx))

    none = mp(ax_empty(ConstE(), xl), is_e_axiom())
    base = forall_simple(
        prop_taut(imp(InIAlpha(ConstE(), xl), tx), [none]), xl)

    n = ctx.fresh("n")
    ih = ForallN(n, subst_formula(motive, g.name, sub(g, n), ctx.supply))
    kl, zl, x2 = ctx.fresh("k"), ctx.fresh("z"), ctx.fresh("x")
    at_k = subst_formula(motive, g.name, sub(g, kl), ctx.supply)
    tz = th_at(zl)
    point = prop_taut(imp(ih, imp(InIAlpha(sub(g, kl), zl), tz)),
                      [subst_n(ih, kl), subst_n(at_k, zl)])
    flip = or_perm(point, imp(InIAlpha(sub(g, kl), zl),
                              Or(Not(ih), tz)))
    gone = exists_elim_imp(flip, kl)
    p_imp = or_perm(gone, imp(ih, imp(gone.conclusion.left.arg, tz)))

    carry = mono_pred_under(ih, ctx.freshened_body_at(x2), p_imp, zl)
    glue = prop_taut(imp(ih, imp(InIAlpha(g, x2), th_at(x2))),
                     [ax_empty(g, x2),
                      ax_fixed_point(defn, g, x2, "unfold"),
                      carry,
                      forall_elim(hat_premise, x2)])
    step = forall_imp_intro(glue, x2)

    ti = transfinite_induction(base, step, g, motive, g)
    xf = ctx.fresh("x")
    out = forall_simple(exists_elim_imp(forall_elim(ti, xf), g), xf)
    target = ctx.hat(p.conclusion)
    if not alpha_eq_formula(out.conclusion, target):
        out = or_perm(out, target)
    return out


# --------------------------------------------------------------------------
# Membership congruence


def _discharge_congruence(ctx: EmbeddingContext, p: Proof) -> Proof:
    s, t = p.data["terms"]
    a9 = ctx.fresh("alpha", TYPE_O)
    bv = ctx.fresh("beta", TYPE_O)
    up = exists_intro_imp(InIAlpha(bv, t), bv, a9)
    stagewise = prop_taut(
        imp(InIAlpha(a9, s), Or(Not(EqN(s, t)), up.conclusion.right)),
        [equality_axiom("cong-in-arg", a9, s, t), up])
    gone = exists_elim_imp(stagewise, a9)
    return or_perm(gone, ctx.hat(p.conclusion))


# --------------------------------------------------------------------------
# The proof rereading


def hat_proof(p: Proof, ctx: EmbeddingContext) -> Proof:
    """Reread a base-theory proof rule by rule.  Arithmetic rules are
    rebuilt with their side formulas rereread; the set-specific leaves
    are discharged by the staged derivations above."""
    memo = ctx._proof_memo
    out = memo.get(id(p))
    if out is None:
        memo[id(p)] = out = _hat_proof(p, ctx)
    return out


def _hat_proof(p, ctx):
    rule = p.rule
    sub_proofs = [hat_proof(q, ctx) for q in p.premises]
    if rule == "ExcludedMiddle":
        return excluded_middle(ctx.hat(p.data["formula"]))
    if rule == "SubstN":
        return subst_n(ctx.hat(p.data["formula"]), p.data["term"])
    if rule == "Expansion":
        return expansion(sub_proofs[0], ctx.hat(p.data["formula"]))
    if rule == "Contraction":
        return contraction(sub_proofs[0])
    if rule == "OrPerm":
        return or_perm(sub_proofs[0], ctx.hat(p.data["formula"]))
    if rule == "Cut":
        return cut(sub_proofs[0], sub_proofs[1])
    if rule == "ForallIntroN":
        return forall_intro_n(sub_proofs[0], p.data["var"])
    if rule == "InductionN":
        return induction_n(sub_proofs[0], sub_proofs[1], p.data["var"],
                           ctx.hat(p.data["motive"]), p.data["term"])
    if rule == "EqualityAxiom":
        if p.data["kind"] == "cong-i":
            return _discharge_congruence(ctx, p)
        return p
    if rule == "PrimRecDefAxiom":
        return p
    if rule == "AxI_Closure":
        return _discharge_closure(ctx, p)
    if rule == "AxI_Leastness":
        return _discharge_leastness(ctx, p, sub_proofs[0])
    raise EmbeddingError('no staged reading for rule "%s"' % rule)
