import random

import pytest

from omx.combinators import (
    InclusionWitness, KreiselBundle, NotPureOmegaType, append_code_term,
    binary_union, check_inclusion, cond_at, counter_term, is_e_term,
    kreisel_bundle, pair_decode, pair_encode, param_rec_n, param_rec_omega,
    param_rec_omega_conclusion, pointwise_sub, rec_omega_with_tree,
    sample_pure_value, seq_decode, seq_encode, subtree_at, subtree_code_term,
    tree_term, union_family, union_injection,
)
from omx.eval import (
    EvalBudget, FnV, LEAF, Numeral, PairV, TreeV, apply_value, apply_values,
    evaluate, finite_tree, mk_numeral, trees_equal,
)
from omx.terms import (
    App, Arrow, ConstE, Lambda, NatLit, TYPE_N, TYPE_O, Var, app, arrow, lam,
    registry_fn, typecheck_closed,
)


def ev(t, env=None, budget=None):
    return evaluate(t, env or {}, budget or EvalBudget())


# --------------------------------------------------------------------------
# Pairing and sequence codes


def test_pair_encode_base_cases():
    assert pair_encode(0, 0) == 0
    # evaluate the closed form: (1+2)(1+2+1)/2 + 2 = 8
    assert pair_encode(1, 2) == 8


def test_pair_codec_roundtrip_small():
    for i in range(101):
        for k in range(0, 101, 7):
            assert pair_decode(pair_encode(i, k)) == (i, k)


def test_pair_codec_as_terms():
    rng = random.Random(3)
    for _ in range(20):
        i, k = rng.randrange(200), rng.randrange(200)
        code = ev(app(registry_fn("npair"), NatLit(i), NatLit(k)))
        assert code == Numeral(pair_encode(i, k))
        assert ev(app(registry_fn("nfst"), NatLit(code.value))) == Numeral(i)
        assert ev(app(registry_fn("nsnd"), NatLit(code.value))) == Numeral(k)


def test_seq_codes_roundtrip():
    rng = random.Random(11)
    assert seq_encode([]) == 0
    for _ in range(50):
        path = [rng.randrange(6) for _ in range(rng.randrange(6))]
        assert seq_decode(seq_encode(path)) == path


def test_seq_code_head_is_first_direction():
    code = seq_encode([3, 1])
    d, rest = pair_decode(code - 1)
    assert d == 3 and rest == seq_encode([1])


# --------------------------------------------------------------------------
# Conditionals


def test_cond_at_numeric():
    t0 = cond_at(TYPE_N, NatLit(0), NatLit(10), NatLit(20))
    t1 = cond_at(TYPE_N, NatLit(5), NatLit(10), NatLit(20))
    assert ev(t0) == Numeral(10)
    assert ev(t1) == Numeral(20)


def test_cond_at_tree_type():
    from omx.terms import sup
    n = Var("n", TYPE_N)
    leafy = cond_at(TYPE_O, NatLit(0), ConstE(), sup(Lambda(n, ConstE())))
    branchy = cond_at(TYPE_O, NatLit(2), ConstE(), sup(Lambda(n, ConstE())))
    assert ev(leafy).tree is LEAF
    assert ev(branchy).tree is not LEAF


def test_cond_does_not_force_untaken_branch():
    # the untaken branch is a diverging-ish loop at huge cost; with a small
    # budget the taken branch must still win
    x, p = Var("x", TYPE_N), Var("p", TYPE_N)
    from omx.terms import RecN, ConstSucc
    slow = App(RecN(NatLit(0), lam(x, p, App(ConstSucc(), p))), NatLit(10 ** 6))
    t = cond_at(TYPE_N, NatLit(0), NatLit(1), slow)
    assert ev(t, budget=EvalBudget(10 ** 4)) == Numeral(1)


# --------------------------------------------------------------------------
# Finite trees and subtree addressing


def test_tree_term_shape():
    b = EvalBudget()
    t = ev(tree_term([["e", "e"], "e"]), budget=b)
    root = t.tree
    assert root is not LEAF
    assert root.child(1, b) is LEAF
    assert root.child(0, b) is not LEAF
    assert root.child(0, b).child(0, b) is LEAF
    # children beyond the listed ones are leaves
    assert root.child(7, b) is LEAF


def test_subtree_at_empty_path_is_identity():
    b = EvalBudget()
    t = finite_tree([["e"], "e"])
    assert subtree_at(t, [], b) is t


def test_subtree_at_leaf_absorbs():
    b = EvalBudget()
    assert subtree_at(LEAF, [1, 2], b) is LEAF


def test_subtree_at_all_children_leaves():
    b = EvalBudget()
    t = finite_tree(["e", "e"])
    assert subtree_at(t, [3], b) is LEAF


def test_subtree_code_term_matches_runtime_walker():
    rng = random.Random(23)
    b = EvalBudget(10 ** 8)
    sc = ev(subtree_code_term(), budget=b)
    for _ in range(15):
        spec = random_tree_spec(rng, depth=3)
        tv = finite_tree(spec)
        path = [rng.randrange(4) for _ in range(rng.randrange(4))]
        got = apply_values(sc, [TreeV(tv), mk_numeral(seq_encode(path))], b)
        want = subtree_at(tv, path, b)
        assert trees_equal(got.tree, want, depth=5, width=4, budget=b)


def random_tree_spec(rng, depth):
    if depth == 0 or rng.random() < 0.35:
        return "e"
    return [random_tree_spec(rng, depth - 1)
            for _ in range(rng.randrange(1, 4))]


def test_append_code_term_matches_python_append():
    rng = random.Random(5)
    b = EvalBudget(10 ** 8)
    ap = ev(append_code_term(), budget=b)
    for _ in range(20):
        path = [rng.randrange(5) for _ in range(rng.randrange(4))]
        d = rng.randrange(5)
        got = apply_values(ap, [mk_numeral(seq_encode(path)), mk_numeral(d)], b)
        assert got == Numeral(seq_encode(path + [d]))


# --------------------------------------------------------------------------
# Unions and inclusions


def family_term(specs):
    """A term N -> O selecting among finite trees, leaves beyond the list."""
    i = Var("i", TYPE_N)
    body = ConstE()
    for idx in reversed(range(len(specs))):
        body = cond_at(TYPE_O, app(registry_fn("monus"), i, NatLit(idx)),
                       tree_term(specs[idx]), body)
    return Lambda(i, body)


def test_union_law_sampled():
    rng = random.Random(17)
    b = EvalBudget(10 ** 8)
    for _ in range(20):
        specs = [random_tree_spec(rng, 2) for _ in range(3)]
        fam = family_term(specs)
        union = union_family(fam, TYPE_O)
        i, k = rng.randrange(4), rng.randrange(4)
        member = ev(App(fam, NatLit(i)), budget=b).tree
        member_child = LEAF if member is LEAF else member.child(k, b)
        uv = ev(union, budget=b).tree
        union_child = uv.child(pair_encode(i, k), b)
        assert trees_equal(member_child, union_child, 5, 4, b)


def test_union_at_higher_pure_type():
    # family of functions O -> O; union is pointwise
    rng = random.Random(29)
    b = EvalBudget(10 ** 8)
    a = Var("a", TYPE_O)
    i = Var("i", TYPE_N)
    # t(i) = \a. a for all i
    fam = Lambda(i, Lambda(a, a))
    union = union_family(fam, Arrow(TYPE_O, TYPE_O))
    assert typecheck_closed(union) == Arrow(TYPE_O, TYPE_O)
    arg = finite_tree([["e"], "e"])
    uv = apply_value(ev(union, budget=b), TreeV(arg), b)
    # (union arg)[encode(i,k)] = (t(i) arg)[k] = arg[k]
    for idx in range(3):
        for k in range(3):
            child = uv.tree.child(pair_encode(idx, k), b)
            want = subtree_at(arg, [k], b)
            assert trees_equal(child, want, 5, 4, b)


def test_union_rejects_impure_type():
    i = Var("i", TYPE_N)
    with pytest.raises(NotPureOmegaType):
        union_family(Lambda(i, NatLit(0)), TYPE_N)


def test_member_included_in_union_via_injection():
    rng = random.Random(31)
    specs = [random_tree_spec(rng, 2) for _ in range(2)]
    fam = family_term(specs)
    union = union_family(fam, TYPE_O)
    for i in range(3):
        w = InclusionWitness(lhs=App(fam, NatLit(i)), rhs=union,
                             map=union_injection(NatLit(i)))
        report = check_inclusion(w, indices=range(5), arg_tuples=[()])
        assert report.ok, report.mismatches


def test_binary_union_inclusions():
    s = tree_term([["e"], "e"])
    t = tree_term(["e", ["e", "e"]])
    u = binary_union(s, t, TYPE_O)
    ws = InclusionWitness(lhs=s, rhs=u, map=union_injection(NatLit(0)))
    wt = InclusionWitness(lhs=t, rhs=u, map=union_injection(NatLit(1)))
    assert check_inclusion(ws, range(5), [()]).ok
    assert check_inclusion(wt, range(5), [()]).ok


def test_identity_inclusion():
    s = tree_term([["e"], "e"])
    k = Var("k", TYPE_N)
    w = InclusionWitness(lhs=s, rhs=s, map=Lambda(k, k))
    assert check_inclusion(w, range(4), [()]).ok


def test_inclusion_mismatch_reported():
    n = Var("n", TYPE_N)
    from omx.terms import sup
    k = Var("k", TYPE_N)
    w = InclusionWitness(lhs=sup(Lambda(n, ConstE())), rhs=ConstE(),
                         map=Lambda(k, k))
    report = check_inclusion(w, range(1), [()])
    # a branching tree is not included in a leaf: the roots already differ,
    # which surfaces as a child mismatch at every index
    assert not report.ok and report.mismatches


def test_pointwise_sub_types():
    a = Var("a", Arrow(TYPE_O, TYPE_O))
    t = pointwise_sub(a, NatLit(2), Arrow(TYPE_O, TYPE_O))
    from omx.terms import typecheck
    assert typecheck(t, {"a": Arrow(TYPE_O, TYPE_O)}) == Arrow(TYPE_O, TYPE_O)


# --------------------------------------------------------------------------
# Tree recursion with the tree in scope


def test_rec_omega_with_tree_computes_and_rebuilds():
    # height along path 0, written against the enriched recursor
    b = EvalBudget(10 ** 8)
    h = Var("h", Arrow(TYPE_N, TYPE_O))
    r = Var("r", Arrow(TYPE_N, TYPE_N))
    from omx.terms import ConstSucc
    step = lam(h, r, App(ConstSucc(), App(r, NatLit(0))))
    height = rec_omega_with_tree(TYPE_N, NatLit(0), step)
    assert typecheck_closed(height) == Arrow(TYPE_O, TYPE_N)
    t = tree_term([[["e"]], "e"])
    assert ev(App(height, t), budget=b) == Numeral(3)
    assert ev(App(height, ConstE()), budget=b) == Numeral(0)


def test_rec_omega_with_tree_step_sees_children():
    # step discriminates the first child: is_e(h 0) + 10 * rec 0
    b = EvalBudget(10 ** 8)
    h = Var("h", Arrow(TYPE_N, TYPE_O))
    r = Var("r", Arrow(TYPE_N, TYPE_N))
    step = lam(h, r, app(registry_fn("add"),
                         App(is_e_term(), App(h, NatLit(0))),
                         app(registry_fn("mul"), NatLit(10), App(r, NatLit(0)))))
    f = rec_omega_with_tree(TYPE_N, NatLit(0), step)
    # tree: root -> child0 branching -> grandchild0 leaf
    t = tree_term([["e"]])
    # at child0: grandchild0 is a leaf, so is_e = 0 and rec = 0, value 0;
    # at the root: child0 branches, so is_e = 1, value 1 + 10*0
    assert ev(App(f, t), budget=b) == Numeral(1)


# --------------------------------------------------------------------------
# Descent counter and bound search


def trivial_phi():
    a = Var("a", TYPE_O)
    x = Var("x", TYPE_N)
    return lam(a, x, NatLit(1))


def test_kreisel_types_checked():
    with pytest.raises(TypeError):
        kreisel_bundle(NatLit(0), trivial_phi(), trivial_phi())


def test_kreisel_k_at_zero():
    bundle = kreisel_bundle(trivial_phi(), trivial_phi(), trivial_phi())
    b = EvalBudget(10 ** 8)
    kv = ev(bundle.k, budget=b)
    tv = TreeV(finite_tree([["e"], "e"]))
    got = apply_values(kv, [tv, mk_numeral(9), mk_numeral(0)], b)
    assert isinstance(got, PairV)
    assert got.left == Numeral(0)
    assert got.right == Numeral(9)


def test_kreisel_search_on_leaf_is_zero():
    bundle = kreisel_bundle(trivial_phi(), trivial_phi(), trivial_phi())
    b = EvalBudget(10 ** 8)
    sv = ev(bundle.search, budget=b)
    assert apply_values(sv, [TreeV(LEAF), mk_numeral(0)], b) == Numeral(0)


def test_counter_one_level_tree():
    # one unfolding of the counter recursion on sup(\n. e), constant f
    b = EvalBudget(10 ** 8)
    cv = ev(counter_term(), budget=b)
    f = FnV(lambda arg, bb: mk_numeral(0), label="const0")
    got = apply_values(cv, [TreeV(finite_tree(["e", "e"])), f], b)
    assert got == Numeral(1)


def test_kreisel_search_small_tree():
    # selector always 0, so the search follows the 0-path
    from omx.terms import ConstSucc
    a = Var("a", TYPE_O)
    x = Var("x", TYPE_N)
    sel = lam(a, x, NatLit(0))
    upd = lam(a, x, App(ConstSucc(), x))
    bundle = kreisel_bundle(trivial_phi(), sel, upd)
    b = EvalBudget(10 ** 8)
    sv = ev(bundle.search, budget=b)
    kv = ev(bundle.k, budget=b)
    tv = TreeV(finite_tree([[["e"], "e"], "e"]))
    n_star = apply_values(sv, [tv, mk_numeral(0)], b)
    assert n_star == Numeral(3)  # 0-path: root -> [["e"],"e"] -> ["e"] -> e
    end = apply_values(kv, [tv, mk_numeral(0), n_star], b)
    path = seq_decode(end.left.value)
    assert subtree_at(tv.tree, path, b) is LEAF
    # update ran once per step
    assert end.right == Numeral(3)


# --------------------------------------------------------------------------
# Parameterized recursion builders


def omega_rule_f():
    # f(alpha, x, i, j) = x + i + j, ignoring the tree
    a = Var("a", TYPE_O)
    x, i, j = Var("x", TYPE_N), Var("i", TYPE_N), Var("j", TYPE_N)
    add = registry_fn("add")
    return lam(a, x, i, j, app(add, x, app(add, i, j)))


def test_param_rec_omega_base_cases():
    b = EvalBudget(10 ** 8)
    h = param_rec_omega(TYPE_N, omega_rule_f())
    hv = ev(h, budget=b)
    g = FnV(lambda arg, bb: mk_numeral(arg.value * arg.value), label="sq")
    # empty code: g back, at any tree
    tv = TreeV(finite_tree([["e"], "e"]))
    out = apply_values(hv, [tv, g, mk_numeral(0)], b)
    for v in (0, 3, 7):
        assert apply_value(out, mk_numeral(v), b) == Numeral(v * v)
    # leaf node: g back for any code
    out2 = apply_values(hv, [TreeV(LEAF), g, mk_numeral(seq_encode([2, 1]))], b)
    assert apply_value(out2, mk_numeral(5), b) == Numeral(25)


def test_param_rec_omega_one_step_unfold():
    # h(alpha, g, (i)^sigma') against h(alpha[i], \l. f(alpha, g(l0), i, l1), sigma')
    rng = random.Random(41)
    b = EvalBudget(10 ** 9)
    f_term = omega_rule_f()
    h = param_rec_omega(TYPE_N, f_term)
    hv = ev(h, budget=b)
    fv = ev(f_term, budget=b)
    for _ in range(10):
        spec = [random_tree_spec(rng, 2) for _ in range(2)]
        tv = finite_tree(spec)
        path = [rng.randrange(3) for _ in range(rng.randrange(1, 4))]
        i, rest = path[0], path[1:]
        code = seq_encode(path)
        g = FnV(lambda arg, bb: mk_numeral(2 * arg.value + 1), label="g")

        lhs = apply_values(hv, [TreeV(tv), g, mk_numeral(code)], b)

        def modified(arg, bb, _g=g, _i=i, _tv=tv):
            l0, l1 = pair_decode(arg.value)
            gx = apply_value(_g, mk_numeral(l0), bb)
            return apply_values(fv, [TreeV(_tv), gx, mk_numeral(_i),
                                     mk_numeral(l1)], bb)

        child = tv.child(i, b)
        rhs = apply_values(hv, [TreeV(child), FnV(modified, label="mod"),
                                mk_numeral(seq_encode(rest))], b)
        for v in (0, 1, 5, 12):
            got = apply_value(lhs, mk_numeral(v), b)
            want = apply_value(rhs, mk_numeral(v), b)
            assert got == want, (spec, path, v)


def test_param_rec_omega_conclusion_shape():
    b = EvalBudget(10 ** 8)
    h = param_rec_omega(TYPE_N, omega_rule_f())
    inst = param_rec_omega_conclusion(h, tree_term([["e"]]), NatLit(6), TYPE_N)
    # h(alpha, \i. x, empty)(0) = x
    assert ev(inst, budget=b) == Numeral(6)


def test_param_rec_n_base_and_unfold():
    b = EvalBudget(10 ** 8)
    x, n, j = Var("x", TYPE_N), Var("n", TYPE_N), Var("j", TYPE_N)
    add = registry_fn("add")
    f_term = lam(x, n, j, app(add, x, app(add, n, j)))
    h = param_rec_n(TYPE_N, f_term)
    hv = ev(h, budget=b)
    fv = ev(f_term, budget=b)
    g = FnV(lambda arg, bb: mk_numeral(arg.value + 10), label="g")
    # base: n = 0 gives g back
    out = apply_values(hv, [mk_numeral(0), g, mk_numeral(3)], b)
    assert apply_value(out, mk_numeral(4), b) == Numeral(14)
    # count 0 gives g back
    out0 = apply_values(hv, [mk_numeral(5), g, mk_numeral(0)], b)
    assert apply_value(out0, mk_numeral(4), b) == Numeral(14)
    # unfold: h(n+1, g, m+1) = h(n, \l. f(g(l0), n, l1), m)
    nval, mval = 4, 2
    lhs = apply_values(hv, [mk_numeral(nval + 1), g, mk_numeral(mval + 1)], b)

    def modified(arg, bb):
        l0, l1 = pair_decode(arg.value)
        gx = apply_value(g, mk_numeral(l0), bb)
        return apply_values(fv, [gx, mk_numeral(nval), mk_numeral(l1)], bb)

    rhs = apply_values(hv, [mk_numeral(nval), FnV(modified), mk_numeral(mval)], b)
    for v in (0, 2, 9):
        assert apply_value(lhs, mk_numeral(v), b) == apply_value(rhs, mk_numeral(v), b)


# --------------------------------------------------------------------------
# Sampling helper


def test_sample_pure_value_shapes():
    rng = random.Random(2)
    v = sample_pure_value(TYPE_O, rng)
    assert isinstance(v, TreeV)
    f = sample_pure_value(Arrow(TYPE_O, TYPE_O), rng)
    b = EvalBudget()
    assert isinstance(apply_value(f, TreeV(LEAF), b), TreeV)
