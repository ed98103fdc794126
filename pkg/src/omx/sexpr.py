"""S-expression reader/printer and the term layer of the file formats.

All on-disk artifacts (proof files, witness files, reports) are UTF-8
s-expressions.  The reader produces nested lists of symbols (str) and
integers; elaborators turn those into terms, types, formulas, and proofs.
Binders are freshened during elaboration, so every parse yields globally
unique bound names.
"""

from __future__ import annotations

from . import terms
from .terms import (
    App, Arrow, BaseN, BaseOmega, ConstE, ConstSucc, ConstZero, FreshSupply,
    Lambda, NatLit, Pair, PrimRecFn, Product, Proj1, Proj2, REGISTRY, RecN,
    RecOmega, ConstSup, ConstSupInv, TYPE_N, TYPE_O, Var, app,
)


class SexprError(Exception):
    pass


# --------------------------------------------------------------------------
# Reading


def tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            tokens.append(c)
            i += 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def _atom(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def parse_all(text: str):
    """Parse a file into a list of toplevel s-expressions."""
    tokens = tokenize(text)
    pos = 0

    def parse_one():
        nonlocal pos
        if pos >= len(tokens):
            raise SexprError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while True:
                if pos >= len(tokens):
                    raise SexprError("unbalanced parenthesis")
                if tokens[pos] == ")":
                    pos += 1
                    return items
                items.append(parse_one())
        if tok == ")":
            raise SexprError("unexpected )")
        return _atom(tok)

    out = []
    while pos < len(tokens):
        out.append(parse_one())
    return out


def parse_one(text: str):
    forms = parse_all(text)
    if len(forms) != 1:
        raise SexprError("expected a single s-expression, found %d" % len(forms))
    return forms[0]


# --------------------------------------------------------------------------
# Printing.  Deterministic layout: a node breaks onto multiple lines only
# when its flat printing exceeds the wrap column, and then always in the
# same way.  Reports and witness files rely on this for byte equality.

WRAP = 100


def to_text(sx, indent: int = 0) -> str:
    flat = _flat(sx)
    if len(flat) + indent <= WRAP or not isinstance(sx, list) or len(sx) <= 1:
        return flat
    head = _flat(sx[0])
    lines = ["(" + head]
    for item in sx[1:]:
        body = to_text(item, indent + 2)
        lines.append(" " * (indent + 2) + body)
    return "\n".join(lines) + ")"


def _flat(sx) -> str:
    if isinstance(sx, list):
        return "(" + " ".join(_flat(x) for x in sx) + ")"
    return str(sx)


def write_file(path, forms):
    text = "\n".join(to_text(f) for f in forms) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


# --------------------------------------------------------------------------
# Types


def elaborate_type(sx):
    if sx == "N":
        return TYPE_N
    if sx == "O":
        return TYPE_O
    if isinstance(sx, list) and sx and sx[0] == "->":
        if len(sx) < 3:
            raise SexprError("(-> ...) needs at least two types")
        tys = [elaborate_type(s) for s in sx[1:]]
        return terms.arrow(*tys)
    if isinstance(sx, list) and sx and sx[0] == "*":
        if len(sx) != 3:
            raise SexprError("(* a b) is binary")
        return Product(elaborate_type(sx[1]), elaborate_type(sx[2]))
    raise SexprError("bad type syntax: %r" % (sx,))


def type_to_sexpr(ty):
    if isinstance(ty, BaseN):
        return "N"
    if isinstance(ty, BaseOmega):
        return "O"
    if isinstance(ty, Arrow):
        parts = []
        while isinstance(ty, Arrow):
            parts.append(ty.domain)
            ty = ty.codomain
        parts.append(ty)
        return ["->"] + [type_to_sexpr(p) for p in parts]
    if isinstance(ty, Product):
        return ["*", type_to_sexpr(ty.left), type_to_sexpr(ty.right)]
    raise SexprError("bad type: %r" % (ty,))


# --------------------------------------------------------------------------
# Terms


def elaborate_term(sx, scope: dict, supply: FreshSupply):
    """Elaborate an s-expression into a term.

    scope maps source names to Vars; binders extend it with freshened
    variables, so bound names in the result never collide.
    """
    if isinstance(sx, int):
        if sx < 0:
            raise SexprError("negative numeral %d" % sx)
        return NatLit(sx)
    if isinstance(sx, str):
        if sx in scope:
            return scope[sx]
        if sx == "e":
            return ConstE()
        if sx == "succ":
            return ConstSucc()
        if sx == "sup-fn":
            return ConstSup()
        if sx == "sub-fn":
            return ConstSupInv()
        if sx in REGISTRY:
            return PrimRecFn(sx, REGISTRY[sx].arity)
        raise SexprError("unbound symbol %r" % sx)
    if not isinstance(sx, list) or not sx:
        raise SexprError("bad term syntax: %r" % (sx,))
    head = sx[0]
    if head == "lam":
        if len(sx) < 3:
            raise SexprError("(lam (x TY) ... body)")
        *binders, body_sx = sx[1:]
        vars_new = []
        inner = dict(scope)
        for b in binders:
            if not (isinstance(b, list) and len(b) == 2 and isinstance(b[0], str)):
                raise SexprError("bad binder: %r" % (b,))
            v = supply.fresh(b[0], elaborate_type(b[1]))
            inner[b[0]] = v
            vars_new.append(v)
        body = elaborate_term(body_sx, inner, supply)
        for v in reversed(vars_new):
            body = Lambda(v, body)
        return body
    if head == "app":
        if len(sx) < 3:
            raise SexprError("(app f a ...)")
        parts = [elaborate_term(s, scope, supply) for s in sx[1:]]
        return app(*parts)
    if head == "rec-n":
        _expect(sx, 3)
        return RecN(elaborate_term(sx[1], scope, supply),
                    elaborate_term(sx[2], scope, supply))
    if head == "rec-omega":
        _expect(sx, 3)
        return RecOmega(elaborate_term(sx[1], scope, supply),
                        elaborate_term(sx[2], scope, supply))
    if head == "sup":
        _expect(sx, 2)
        return App(ConstSup(), elaborate_term(sx[1], scope, supply))
    if head == "sub":
        _expect(sx, 3)
        return App(App(ConstSupInv(), elaborate_term(sx[1], scope, supply)),
                   elaborate_term(sx[2], scope, supply))
    if head == "e":
        _expect(sx, 1)
        return ConstE()
    if head == "pair":
        _expect(sx, 3)
        return Pair(elaborate_term(sx[1], scope, supply),
                    elaborate_term(sx[2], scope, supply))
    if head == "p1":
        _expect(sx, 2)
        return Proj1(elaborate_term(sx[1], scope, supply))
    if head == "p2":
        _expect(sx, 2)
        return Proj2(elaborate_term(sx[1], scope, supply))
    if isinstance(head, str) and (head == "succ" or head in REGISTRY):
        # application sugar for registry symbols
        fn = elaborate_term(head, scope, supply)
        parts = [elaborate_term(s, scope, supply) for s in sx[1:]]
        return app(fn, *parts)
    raise SexprError("bad term syntax: %r" % (sx,))


def _expect(sx, n):
    if len(sx) != n:
        raise SexprError("%s takes %d parts, got %r" % (sx[0], n - 1, sx))


def term_to_sexpr(t):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, NatLit):
        return t.value
    if isinstance(t, ConstZero):
        return 0
    if isinstance(t, ConstSucc):
        return "succ"
    if isinstance(t, PrimRecFn):
        return t.name
    if isinstance(t, ConstE):
        return "e"
    if isinstance(t, App):
        # peel special forms back to their sugar
        if isinstance(t.fn, ConstSup):
            return ["sup", term_to_sexpr(t.arg)]
        if isinstance(t.fn, App) and isinstance(t.fn.fn, ConstSupInv):
            return ["sub", term_to_sexpr(t.fn.arg), term_to_sexpr(t.arg)]
        parts = []
        while isinstance(t, App):
            parts.append(t.arg)
            t = t.fn
        parts.append(t)
        parts.reverse()
        return ["app"] + [term_to_sexpr(p) for p in parts]
    if isinstance(t, ConstSup):
        return "sup-fn"
    if isinstance(t, ConstSupInv):
        return "sub-fn"
    if isinstance(t, Lambda):
        return ["lam", [t.binder.name, type_to_sexpr(t.binder.ty)],
                term_to_sexpr(t.body)]
    if isinstance(t, Pair):
        return ["pair", term_to_sexpr(t.left), term_to_sexpr(t.right)]
    if isinstance(t, Proj1):
        return ["p1", term_to_sexpr(t.arg)]
    if isinstance(t, Proj2):
        return ["p2", term_to_sexpr(t.arg)]
    if isinstance(t, RecN):
        return ["rec-n", term_to_sexpr(t.base), term_to_sexpr(t.step)]
    if isinstance(t, RecOmega):
        return ["rec-omega", term_to_sexpr(t.base), term_to_sexpr(t.step)]
    raise SexprError("bad term: %r" % (t,))


def parse_term(text: str, scope=None, supply=None):
    scope = {} if scope is None else scope
    supply = supply if supply is not None else FreshSupply()
    return elaborate_term(parse_one(text), scope, supply)


def print_term(t) -> str:
    return to_text(term_to_sexpr(t))
