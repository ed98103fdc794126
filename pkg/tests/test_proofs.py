"""Checker, certificates, substitution, and serialization for proofs."""

import random

import pytest

from omx.eval import EvalBudget, mk_numeral
from omx.formulas import (
    EqN, ForallN, ForallOmega, InI, InIAlpha, IsE, Not, Or, PredP,
    InductiveDefinition, formula_key, imp, subst_formula,
)
from omx.model import truth
from omx import proofs as P
from omx.proofs import Proof, ProofError
from omx.sexpr import SexprError
from omx import shoenfield as S
from omx.terms import (
    App, ConstE, ConstSucc, ConstSup, FreshSupply, Lambda, NatLit,
    TYPE_N, TYPE_O, Var, app, registry_fn, sub,
)

from helpers import random_formula


def nvar(name):
    return Var(name, TYPE_N)


def ovar(name):
    return Var(name, TYPE_O)


X, Y, Z = nvar("x"), nvar("y"), nvar("z")
AL, BE = ovar("al"), ovar("be")


def acc_defn():
    """x is in when every predecessor y with succ y = x already is."""
    body = ForallN(Y, Or(Not(EqN(App(ConstSucc(), Y), X)), PredP(Y)))
    return InductiveDefinition(var=X, body=body, params=())


def assert_checks(p, theory, defn=None):
    rep = P.check_proof(p, theory, defn)
    assert rep.ok, rep.problems


def assert_rejected(p, theory, defn=None, fragment=None):
    rep = P.check_proof(p, theory, defn)
    assert not rep.ok
    if fragment is not None:
        assert any(fragment in msg for _, msg in rep.problems), rep.problems


# --------------------------------------------------------------------------
# Logical rules


class TestLogicalRules:
    def test_excluded_middle_all_theories(self):
        phi = EqN(X, NatLit(0))
        p = P.excluded_middle(phi)
        for theory in P.THEORIES:
            assert_checks(p, theory)

    def test_cut_agreement_enforced(self):
        a = EqN(X, NatLit(0))
        flipped = P.or_perm(P.excluded_middle(a), Or(a, Not(a)))
        good = P.cut(flipped, P.excluded_middle(a))
        assert_checks(good, "oid1")
        assert formula_key(good.conclusion) == formula_key(Or(Not(a), a))

    def test_cut_mismatch_rejected(self):
        a, b = EqN(X, NatLit(0)), EqN(X, NatLit(1))
        # raw node gluing premises that disagree on the cut formula
        bad = Proof("Cut", Or(a, b),
                    (P.excluded_middle(a), P.excluded_middle(b)), {})
        assert_rejected(bad, "oid1", fragment="cut")

    def test_builder_rejects_cut_mismatch(self):
        a, b = EqN(X, NatLit(0)), EqN(X, NatLit(1))
        with pytest.raises(ProofError):
            P.cut(P.excluded_middle(a), P.excluded_middle(b))

    def test_contraction_needs_twins(self):
        a, b = EqN(X, NatLit(0)), EqN(X, NatLit(1))
        bad = Proof("Contraction", a, (P.excluded_middle(a),), {})
        assert_rejected(bad, "oid1", fragment="contraction")
        with pytest.raises(ProofError):
            P.contraction(P.excluded_middle(b))

    def test_or_perm_covers_and_rejects(self):
        a, b, c = (EqN(X, NatLit(i)) for i in range(3))
        em = P.excluded_middle(Or(a, Or(b, c)))
        spread = Or(Or(c, b), Or(Not(Or(a, Or(b, c))), Or(a, a)))
        assert_checks(P.or_perm(em, spread), "oid1")
        with pytest.raises(ProofError):
            P.or_perm(em, Or(a, b))
        bad = Proof("OrPerm", Or(a, b), (em,), {"formula": Or(a, b)})
        assert_rejected(bad, "oid1", fragment="or-perm")

    def test_eigenvariable_condition(self):
        a = EqN(X, NatLit(0))
        p = P.or_perm(P.excluded_middle(a), Or(a, Not(a)))
        with pytest.raises(ProofError):
            P.forall_intro_n(p, X)  # x free in the passive disjunct
        spread = P.expansion(P.excluded_middle(EqN(Y, NatLit(0))), a)
        lifted = P.forall_intro_n(spread, Y)  # y absent from the right
        assert_checks(lifted, "oid1")
        bad = Proof("ForallIntroN", Or(ForallN(X, a), Not(a)),
                    (p,), {"var": X})
        assert_rejected(bad, "oid1", fragment="eigenvariable")

    def test_forall_intro_omega_eigencondition(self):
        phi = IsE(AL)
        p = P.or_perm(P.excluded_middle(phi), Or(phi, Not(phi)))
        with pytest.raises(ProofError):
            P.forall_intro_omega(p, AL)
        bad = Proof("ForallIntroOmega", Or(ForallOmega(AL, phi), Not(phi)),
                    (p,), {"var": AL})
        assert_rejected(bad, "oid1", fragment="eigenvariable")

    def test_subst_axioms(self):
        phi = ForallN(X, EqN(X, X))
        inst = P.subst_n(phi, app(registry_fn("add"), NatLit(2), NatLit(3)))
        assert_checks(inst, "id1")
        psi = ForallOmega(AL, IsE(AL))
        inst2 = P.subst_omega(psi, ConstE())
        assert_checks(inst2, "oid1")
        # an omega quantifier is not id1 material
        assert_rejected(inst2, "id1")


# --------------------------------------------------------------------------
# Theory gating


class TestTheoryGating:
    def test_is_e_axiom_only_oid1(self):
        p = P.is_e_axiom()
        assert_checks(p, "oid1")
        assert_rejected(p, "id1")
        assert_rejected(p, "q0t")

    def test_omega_inhabited_only_oid1(self):
        p = P.ax_omega_inhabited()
        assert_checks(p, "oid1")
        assert_rejected(p, "q0t")

    def test_closure_only_id1(self):
        defn = acc_defn()
        p = P.ax_closure(defn, NatLit(0))
        assert_checks(p, "id1", defn)
        assert_rejected(p, "oid1", defn)

    def test_transfinite_rejected_in_id1(self):
        motive = IsE(AL)
        b = Proof("IsEAxiom", IsE(ConstE()), (), {})
        # stub premises: the gate fires regardless of their content
        p = Proof("TransfiniteInduction", IsE(ConstE()), (b, b),
                  {"var": AL, "motive": motive, "term": ConstE(),
                   "guarded": False})
        assert_rejected(p, "id1", fragment="tree theories")

    def test_cong_i_only_id1(self):
        p = P.equality_axiom("cong-i", X, Y)
        assert_checks(p, "id1")
        assert_rejected(p, "oid1")

    def test_cong_in_arg_not_id1(self):
        p = P.equality_axiom("cong-in-arg", AL, X, Y)
        assert_checks(p, "oid1")
        assert_rejected(p, "id1")


# --------------------------------------------------------------------------
# Tree axioms and the bounding schema


class TestTreeAxioms:
    def test_subtree_e(self):
        p = P.ax_subtree_e(AL, X, "oid1")
        assert_checks(p, "oid1")
        q = P.ax_subtree_e(AL, X, "q0t")
        assert_checks(q, "q0t")
        assert_rejected(p, "id1")

    def test_omega_bounding_accepts_arithmetic_matrix(self):
        matrix = Or(Not(InIAlpha(AL, X)), InIAlpha(BE, X))
        i = nvar("i")
        p = P.omega_bounding(matrix, X, AL, BE, i)
        assert_checks(p, "oid1")
        assert_rejected(p, "q0t")

    def test_omega_bounding_rejects_omega_quantifier(self):
        ga = ovar("ga")
        matrix = Or(Not(InIAlpha(AL, X)),
                    ForallOmega(ga, InIAlpha(ga, X)))
        i = nvar("i")
        p = P.omega_bounding(matrix, X, AL, BE, i)
        assert_rejected(p, "oid1", fragment="quantifier")

    def test_fixed_point_directions(self):
        defn = acc_defn()
        un = P.ax_fixed_point(defn, AL, X, "unfold", "oid1")
        fo = P.ax_fixed_point(defn, AL, X, "fold", "oid1")
        assert_checks(un, "oid1", defn)
        assert_checks(fo, "oid1", defn)
        # both carry the leaf guard up front
        for p in (un, fo):
            guard, _ = p.conclusion.left.arg, p.conclusion.right
            assert formula_key(guard) == formula_key(Not(IsE(AL)))

    def test_empty_stage(self):
        p = P.ax_empty(AL, X, "oid1")
        assert_checks(p, "oid1")
        assert formula_key(p.conclusion) == formula_key(
            imp(IsE(AL), Not(InIAlpha(AL, X))))

    def test_leastness_shape(self):
        defn = acc_defn()
        theta = EqN(Z, Z)
        prem = P.leastness_premise(defn, Z, theta)
        # fake the premise with a raw stub to test the node check alone
        stub = Proof("ExcludedMiddle", prem, (), {"formula": prem})
        p = P.ax_leastness(defn, stub, Z, theta)
        rep = P.check_proof(p, "id1", defn)
        # the stub itself is bogus, so the only complaint is at its path
        assert all("excluded middle" in msg for _, msg in rep.problems)

    def test_closure_unfolds_operator(self):
        defn = acc_defn()
        p = P.ax_closure(defn, NatLit(2))
        want = imp(
            ForallN(Y, Or(Not(EqN(App(ConstSucc(), Y), NatLit(2))),
                          InI(Y))),
            InI(NatLit(2)))
        assert formula_key(p.conclusion) == formula_key(want)


# --------------------------------------------------------------------------
# Induction


class TestInduction:
    def test_induction_n(self):
        motive = EqN(app(registry_fn("add"), X, NatLit(0)), X)
        base_f, step_f = P.induction_premises(X, motive)
        base = Proof("ExcludedMiddle", base_f, (), {"formula": base_f})
        step = Proof("ExcludedMiddle", step_f, (), {"formula": step_f})
        p = P.induction_n(base, step, X, motive, NatLit(5))
        rep = P.check_proof(p, "id1")
        assert all("excluded middle" in m for _, m in rep.problems)
        assert formula_key(p.conclusion) == formula_key(
            EqN(app(registry_fn("add"), NatLit(5), NatLit(0)), NatLit(5)))

    def test_induction_premise_mismatch_rejected(self):
        motive = EqN(X, X)
        base_f, _ = P.induction_premises(X, motive)
        base = P.excluded_middle(EqN(NatLit(0), NatLit(0)))
        step = P.excluded_middle(EqN(NatLit(1), NatLit(1)))
        p = Proof("InductionN", EqN(NatLit(5), NatLit(5)), (base, step),
                  {"var": X, "motive": motive, "term": NatLit(5)})
        assert_rejected(p, "id1", fragment="induction")

    def test_transfinite_guarded_vs_plain(self):
        motive = Not(InIAlpha(AL, NatLit(0)))
        for guarded, theory in ((False, "oid1"), (True, "q0t")):
            base_f, step_f = P.transfinite_premises(AL, motive, guarded,
                                                    theory)
            base = Proof("ExcludedMiddle", base_f, (), {"formula": base_f})
            step = Proof("ExcludedMiddle", step_f, (), {"formula": step_f})
            p = P.transfinite_induction(base, step, AL, motive, BE, guarded)
            rep = P.check_proof(p, theory)
            assert all("excluded middle" in m for _, m in rep.problems), \
                (guarded, rep.problems)

    def test_guard_flag_changes_step(self):
        motive = Not(InIAlpha(AL, NatLit(0)))
        _, plain = P.transfinite_premises(AL, motive, False, "oid1")
        _, guarded = P.transfinite_premises(AL, motive, True, "q0t")
        assert formula_key(plain) != formula_key(guarded)


# --------------------------------------------------------------------------
# Equation certificates


def ident_app():
    v = nvar("v")
    return App(Lambda(v, v), NatLit(0))


class TestCertificates:
    def test_alpha_certificate(self):
        t = app(registry_fn("add"), X, NatLit(1))
        p = P.t_omega_eq(t, t, ())
        assert_checks(p, "q0t")

    def test_conversion_chain(self):
        p = P.t_omega_eq(ident_app(), NatLit(0), (("conv", NatLit(0)),))
        assert_checks(p, "q0t")

    def test_eval_certificate(self):
        a = app(registry_fn("add"), NatLit(2), NatLit(2))
        b = app(registry_fn("mul"), NatLit(2), NatLit(2))
        p = P.t_omega_eq(a, b, (("eval",),))
        assert_checks(p, "q0t")

    def test_eval_certificate_rejects_unequal(self):
        a = app(registry_fn("add"), NatLit(2), NatLit(2))
        p = P.t_omega_eq(a, NatLit(5), (("eval",),))
        assert_rejected(p, "q0t", fragment="equation certificate")

    def test_broken_chain_reports_index(self):
        t = ident_app()
        with pytest.raises(P.ChainBroken) as info:
            P.check_equation_certificate((("conv", NatLit(1)),), t, NatLit(1))
        assert info.value.index == 0

    def test_leaf_vs_tower_not_convertible(self):
        n = nvar("n")
        tower = App(ConstSup(), Lambda(n, ConstE()))
        with pytest.raises(P.ChainBroken):
            P.check_equation_certificate((("conv", ConstE()),),
                                         tower, ConstE())

    def test_rec_unfold_chain(self):
        # add's defining equation applied once: add(3, succ 1) ~> succ(add(3, 1))
        lhs = app(registry_fn("add"), NatLit(3),
                  App(ConstSucc(), NatLit(1)))
        mid = App(ConstSucc(), app(registry_fn("add"), NatLit(3), NatLit(1)))
        p = P.t_omega_eq(lhs, mid, (("conv", mid),))
        assert_checks(p, "q0t")

    def test_sub_of_sup_chain(self):
        n = nvar("n")
        h = Lambda(n, ConstE())
        lhs = sub(App(ConstSup(), h), NatLit(4))
        assert P.check_equation_certificate(
            (("conv", App(h, NatLit(4))),), lhs, App(h, NatLit(4)))

    def test_index_certificate_through_transport(self):
        # tree-side conversions ride on membership transport, whose
        # conclusion stays inside the quantifier-free dialect
        n = nvar("n")
        h = Lambda(n, ConstE())
        alpha = sub(App(ConstSup(), h), NatLit(4))
        beta = App(h, NatLit(4))
        p = P.ax_term_eq(alpha, beta, NatLit(3), NatLit(3),
                         (), (("conv", beta),))
        assert_checks(p, "q0t")

    def test_certificates_only_q0t(self):
        p = P.t_omega_eq(NatLit(1), NatLit(1), ())
        assert_rejected(p, "oid1")


# --------------------------------------------------------------------------
# Rejection stability: mutating a good proof breaks it loudly


class TestRejectionStability:
    def _good_proof(self):
        a = EqN(X, NatLit(0))
        return S.prop_taut(imp(Not(Not(a)), a))

    def test_rule_tag_corruption(self):
        p = self._good_proof()
        bad = Proof("NoSuchRule", p.conclusion, p.premises, p.data)
        assert_rejected(bad, "oid1", fragment="unknown rule")

    def test_conclusion_corruption(self):
        p = self._good_proof()
        bad = Proof(p.rule, Not(p.conclusion), p.premises, p.data)
        assert_rejected(bad, "oid1")

    def test_deep_premise_corruption(self):
        p = self._good_proof()

        def poison(q):
            if not q.premises:
                return Proof(q.rule, Not(q.conclusion), (), q.data)
            return Proof(q.rule, q.conclusion,
                         (poison(q.premises[0]),) + q.premises[1:], q.data)

        assert_rejected(poison(p), "oid1")

    def test_problem_paths_point_into_tree(self):
        a = EqN(X, NatLit(0))
        bad = Proof("Contraction", a, (P.excluded_middle(Or(a, Not(a))),), {})
        outer = P.expansion(bad, a)
        rep = P.check_proof(outer, "oid1")
        assert any(path.startswith("root.0") for path, _ in rep.problems)


# --------------------------------------------------------------------------
# Proof substitution


class TestSubstProof:
    def test_preserves_checking(self):
        rng = random.Random(71)
        for _ in range(25):
            phi = random_formula(rng, 3, [X, Y])
            p = S.prop_taut(Or(Not(phi), phi))
            q = P.subst_proof(p, "x", app(ConstSucc(), Z))
            assert_checks(q, "oid1")
            assert formula_key(q.conclusion) == formula_key(
                subst_formula(p.conclusion, "x", app(ConstSucc(), Z),
                              FreshSupply(6 * 10**8)))

    def test_eigenvariable_capture_renames(self):
        a = EqN(X, Y)
        b = EqN(Y, NatLit(0))
        p = P.forall_intro_n(
            P.or_perm(P.excluded_middle(b), Or(a, Or(Not(b), b))), X)
        # substituting y := x would capture without a rename
        q = P.subst_proof(p, "y", X)
        assert_checks(q, "oid1")
        body = q.conclusion.left
        assert isinstance(body, ForallN)
        assert body.var.name != "x"

    def test_bound_name_left_alone(self):
        a = EqN(X, NatLit(0))
        b = EqN(Y, NatLit(0))
        p = P.forall_intro_n(
            P.or_perm(P.excluded_middle(b), Or(a, Or(Not(b), b))), X)
        q = P.subst_proof(p, "x", NatLit(7))
        # x is bound in the conclusion, so nothing may change there
        assert formula_key(q.conclusion.left) == formula_key(
            ForallN(X, a))

    def test_induction_var_renamed_on_collision(self):
        motive = EqN(X, Y)
        base_f, step_f = P.induction_premises(X, motive)
        base = Proof("ExcludedMiddle", base_f, (), {"formula": base_f})
        step = Proof("ExcludedMiddle", step_f, (), {"formula": step_f})
        p = P.induction_n(base, step, X, motive, NatLit(2))
        q = P.subst_proof(p, "y", X)
        assert q.data["var"].name != "x"
        assert formula_key(q.conclusion) == formula_key(EqN(NatLit(2), X))


# --------------------------------------------------------------------------
# Serialization


class TestSerialization:
    def roundtrip(self, p, theory, defn=None):
        form = P.proof_to_sexpr(p)
        supply = FreshSupply(9 * 10**8)
        if defn is None:
            q = P.proof_from_sexpr(form, {}, supply)
        else:
            with P.definition_scope(defn):
                q = P.proof_from_sexpr(form, {}, supply)
        rep = P.check_proof(q, theory, defn)
        assert rep.ok, rep.problems
        assert formula_key(q.conclusion) == formula_key(p.conclusion)
        return q

    def test_roundtrip_taut(self):
        rng = random.Random(5)
        for _ in range(10):
            phi = random_formula(rng, 3, [X])
            self.roundtrip(S.prop_taut(Or(Not(phi), phi)), "oid1")

    def test_roundtrip_quantifier_toolkit(self):
        a, b = EqN(X, NatLit(0)), EqN(X, NatLit(1))
        p = S.forall_mono(S.prop_taut(imp(a, Or(a, b))), X)
        self.roundtrip(p, "oid1")
        self.roundtrip(S.exists_mono(S.prop_taut(imp(a, Or(a, b))), X),
                       "oid1")

    def test_roundtrip_certificates(self):
        p = P.t_omega_eq(ident_app(), NatLit(0), (("conv", NatLit(0)),))
        self.roundtrip(p, "q0t")

    def test_roundtrip_induction(self):
        motive = EqN(app(registry_fn("add"), X, NatLit(0)), X)
        _, step_f = P.induction_premises(X, motive)
        base = P.prim_rec_def_axiom("add", 0, {"x": NatLit(0)})
        at_succ = P.prim_rec_def_axiom("add", 0,
                                       {"x": App(ConstSucc(), X)})
        step = S.prop_taut(step_f, [at_succ])
        p = P.induction_n(base, step, X, motive, NatLit(3))
        self.roundtrip(p, "id1")

    def test_roundtrip_leastness_needs_scope(self):
        defn = acc_defn()
        theta = EqN(Z, NatLit(0))
        prem_f = P.leastness_premise(defn, Z, theta)
        stub = Proof("ExcludedMiddle", prem_f, (), {"formula": prem_f})
        p = P.ax_leastness(defn, stub, Z, theta)
        form = P.proof_to_sexpr(p)
        with pytest.raises(SexprError):
            P.proof_from_sexpr(form, {}, FreshSupply(7 * 10**8))
        with P.definition_scope(defn):
            q = P.proof_from_sexpr(form, {}, FreshSupply(7 * 10**8))
        assert formula_key(q.conclusion) == formula_key(p.conclusion)

    def test_scope_declarations_cover_free_vars(self):
        p = P.excluded_middle(EqN(X, Y))
        form = P.proof_to_sexpr(p)
        flat = repr(form)
        assert "var" in flat and "x" in flat and "y" in flat


# --------------------------------------------------------------------------
# Soundness harness: accepted proofs never evaluate to a definite falsehood


class TestSoundnessHarness:
    def test_tautologies_never_refuted(self):
        rng = random.Random(1009)
        budget = EvalBudget(10**7)
        for _ in range(40):
            phi = random_formula(rng, 3, [X, Y], sugar=True)
            p = S.prop_taut(Or(Not(phi), phi))
            assert_checks(p, "oid1")
            for _ in range(5):
                env = {"x": mk_numeral(rng.randrange(12)),
                       "y": mk_numeral(rng.randrange(12))}
                assert truth(p.conclusion, env, bound=6,
                             budget=budget) is not False

    def test_equality_axioms_never_refuted(self):
        rng = random.Random(77)
        budget = EvalBudget(10**7)
        t1 = app(registry_fn("add"), X, Y)
        t2 = app(registry_fn("mul"), Y, X)
        cases = [
            P.equality_axiom("refl", t1),
            P.equality_axiom("sym", t1, t2),
            P.equality_axiom("trans", t1, t2, app(ConstSucc(), X)),
            P.equality_axiom("cong-fn", t1, t2, fn_name="succ"),
        ]
        for p in cases:
            assert_checks(p, "oid1")
            for _ in range(20):
                env = {"x": mk_numeral(rng.randrange(9)),
                       "y": mk_numeral(rng.randrange(9))}
                assert truth(p.conclusion, env, bound=5,
                             budget=budget) is not False

    def test_accepted_membership_axioms_never_refuted(self):
        defn = acc_defn()
        budget = EvalBudget(10**7)
        closure = P.ax_closure(defn, NatLit(1))
        assert_checks(closure, "id1", defn)
        assert truth(closure.conclusion, {}, defn, bound=4,
                     budget=budget) is not False
        empty = P.ax_empty(ConstE(), NatLit(0), "oid1")
        assert truth(empty.conclusion, {}, defn, bound=4,
                     budget=budget) is not False
