import pytest

from omx.terms import (
    App, Arrow, ConstE, ConstSucc, ConstSup, ConstZero, FreshSupply, Lambda,
    NatLit, Pair, Product, Proj1, RecN, RecOmega, TYPE_N, TYPE_O,
    TermTypeError, UnboundVariable, Var, alpha_eq, app, arrow, free_vars,
    is_pure_omega, lam, pure_decompose, registry_fn, subst, typecheck,
    typecheck_closed,
)
from omx.sexpr import parse_term, print_term


def test_constants_have_declared_types():
    assert typecheck_closed(ConstE()) == TYPE_O
    n = Var("n", TYPE_N)
    assert typecheck_closed(App(ConstSup(), Lambda(n, ConstE()))) == TYPE_O


def test_application_of_non_arrow_rejected():
    with pytest.raises(TermTypeError):
        typecheck_closed(App(ConstZero(), ConstE()))


def test_unbound_variable_detected():
    with pytest.raises(UnboundVariable):
        typecheck_closed(Var("x", TYPE_N))
    # with a context the variable checks
    assert typecheck(Var("x", TYPE_N), {"x": TYPE_N}) == TYPE_N


def test_annotation_context_mismatch():
    with pytest.raises(TermTypeError):
        typecheck(Var("x", TYPE_N), {"x": TYPE_O})


def test_recursor_types():
    x, p = Var("x", TYPE_N), Var("p", TYPE_N)
    r = RecN(NatLit(0), lam(x, p, App(ConstSucc(), p)))
    assert typecheck_closed(r) == Arrow(TYPE_N, TYPE_N)
    k = Var("k", Arrow(TYPE_N, TYPE_N))
    r2 = RecOmega(NatLit(0), Lambda(k, App(ConstSucc(), App(k, NatLit(0)))))
    assert typecheck_closed(r2) == Arrow(TYPE_O, TYPE_N)
    # step of the wrong shape is pinpointed
    with pytest.raises(TermTypeError):
        typecheck_closed(RecN(NatLit(0), Lambda(x, x)))


def test_pure_omega_predicate():
    assert is_pure_omega(TYPE_O)
    assert is_pure_omega(Arrow(TYPE_O, TYPE_O))
    assert is_pure_omega(Arrow(Arrow(TYPE_O, TYPE_O), TYPE_O))
    assert not is_pure_omega(TYPE_N)
    assert not is_pure_omega(Arrow(TYPE_N, TYPE_O))
    assert not is_pure_omega(Product(TYPE_O, TYPE_O))


def test_pure_decomposition_is_argument_list():
    ty = arrow(TYPE_O, Arrow(TYPE_O, TYPE_O), TYPE_O)
    assert pure_decompose(ty) == (TYPE_O, Arrow(TYPE_O, TYPE_O))
    assert pure_decompose(TYPE_O) == ()


def test_alpha_equality_ignores_binder_names():
    x, y = Var("x", TYPE_N), Var("y", TYPE_N)
    assert alpha_eq(Lambda(x, x), Lambda(y, y))
    a1 = lam(x, y, x)
    a2 = lam(x, y, y)
    assert not alpha_eq(a1, a2)
    # free variables compare by name
    assert alpha_eq(x, Var("x", TYPE_N))
    assert not alpha_eq(x, y)


def test_subst_avoids_capture():
    x, y = Var("x", TYPE_N), Var("y", TYPE_N)
    t = Lambda(y, x)  # \y. x
    out = subst(t, "x", y)
    # must not become \y. y
    assert isinstance(out, Lambda)
    assert out.binder.name != "y"
    assert isinstance(out.body, Var) and out.body.name == "y"


def test_subst_under_unrelated_binder():
    x, y, z = Var("x", TYPE_N), Var("y", TYPE_N), Var("z", TYPE_N)
    t = Lambda(z, app(registry_fn("add"), x, z))
    out = subst(t, "x", y)
    assert alpha_eq(out, Lambda(z, app(registry_fn("add"), y, z)))


def test_free_vars():
    x, y = Var("x", TYPE_N), Var("y", TYPE_N)
    t = Lambda(x, app(registry_fn("add"), x, y))
    assert set(free_vars(t)) == {"y"}


def test_fresh_supply_unique():
    s = FreshSupply()
    names = {s.fresh("x", TYPE_N).name for _ in range(100)}
    assert len(names) == 100


def test_sexpr_roundtrip():
    source = "(lam (x N) (lam (f (-> N N)) (app f (add x 1))))"
    t = parse_term(source)
    again = parse_term(print_term(t))
    assert alpha_eq(t, again)


def test_sexpr_roundtrip_tree_forms():
    t = parse_term("(lam (a O) (sup (lam (n N) (sub a n))))")
    assert typecheck_closed(t) == Arrow(TYPE_O, TYPE_O)
    assert alpha_eq(t, parse_term(print_term(t)))


def test_sexpr_binders_freshened():
    t = parse_term("(lam (x N) (lam (x N) x))")
    assert isinstance(t, Lambda) and isinstance(t.body, Lambda)
    assert t.binder.name != t.body.binder.name
    # inner occurrence refers to the inner binder
    assert t.body.body.name == t.body.binder.name


def test_sexpr_pair_forms():
    t = parse_term("(p1 (pair 3 (e)))")
    assert isinstance(t, Proj1)
    assert isinstance(t.arg, Pair)
    assert typecheck_closed(t) == TYPE_N
