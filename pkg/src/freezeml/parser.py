"""Concrete syntax: lexing, parsing, and pretty-printing.

Grammar sketch (application binds tighter than the infix list/arith
operators; ``@`` and ``$`` bind tighter than application)::

    type  := 'forall' ident+ '.' type | arrow
    arrow := tatom ('->' type)?
    tatom := ident | 'Int' | 'Bool' | '[' type ']'
           | '(' type ',' type ')' | '(' type ')' | 'ST' tatom tatom

    term  := lam | let | op
    op    := sum (('::' | '++') op)?
    sum   := app ('+' app)*
    app   := post+
    post  := prefix '@'*
    prefix:= '$'? atom
    atom  := '~'? ident | int | 'True' | 'False'
           | '(' term (',' term)? ')' | '[' (term (',' term)*)? ']'
    lam   := '\\' binder+ '.' term
    binder:= ident | '(' ident ':' type ')'
    let   := 'let' binder '=' term 'in' term

List, pair, and arithmetic forms elaborate to the prelude constants
``::``, ``[]``, ``pair`` and ``+``, keeping the core calculus free of
literals other than Int/Bool constants.

Programs are ``name (: type)? = term ;`` declarations followed by a
final term; declarations nest into let/let-annotated bindings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .syntax import (
    BUILTIN_CONS,
    Con,
    Forall,
    Freeze,
    Gen,
    Inst,
    INTERNAL_PREFIX,
    App,
    Lam,
    LamAnn,
    Let,
    LetAnn,
    Lit,
    Span,
    Term,
    TVar,
    Type,
    Var,
    all_type_names,
    arrow,
    ftv_ordered,
    is_internal_name,
    list_of,
    pair_of,
    t_bool,
    t_int,
)

MAX_DEPTH = 400


class SyntaxError_(Exception):
    """Parse failure with a source span."""

    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


class ArityError(SyntaxError_):
    pass


class MissingFinalTerm(SyntaxError_):
    pass


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'int', 'punct', 'eof'
    text: str
    span: Span


PUNCT = (
    "->", "::", "++", "/\\", "(", ")", "[", "]", ",", ".", "\\", "~", "$",
    "@", "+", "=", ";", ":",
)

KEYWORDS = {"let", "in", "forall", "True", "False", "Int", "Bool", "ST"}


def _ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_" or ch == INTERNAL_PREFIX


def _ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_'"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    line_start = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            line_start = i
            continue
        if ch.isspace():
            i += 1
            continue
        col = i - line_start + 1
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if _ident_start(ch):
            j = i + 1
            while j < n and _ident_char(text[j]):
                j += 1
            tokens.append(Token("ident", text[i:j], Span(i, j, line, col)))
            i = j
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], Span(i, j, line, col)))
            i = j
            continue
        for punct in PUNCT:
            if text.startswith(punct, i):
                j = i + len(punct)
                tokens.append(Token("punct", punct, Span(i, j, line, col)))
                i = j
                break
        else:
            raise SyntaxError_(
                f"unexpected character {ch!r}", Span(i, i + 1, line, col)
            )
    tokens.append(Token("eof", "", Span(n, n, line, n - line_start + 1)))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.depth = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def at_ident(self, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and (text is None or tok.text == text)

    def expect_punct(self, text: str) -> Token:
        if not self.at_punct(text):
            raise SyntaxError_(
                f"expected {text!r}, found {self.peek().text!r}", self.peek().span
            )
        return self.advance()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise SyntaxError_(
                f"expected identifier, found {tok.text!r}", tok.span
            )
        if is_internal_name(tok.text):
            raise SyntaxError_(
                f"identifiers may not start with {INTERNAL_PREFIX!r}", tok.span
            )
        return self.advance()

    def _enter(self) -> None:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise SyntaxError_("too deeply nested", self.peek().span)

    def _exit(self) -> None:
        self.depth -= 1

    # -- types ---------------------------------------------------------------

    def type_(self) -> Type:
        self._enter()
        try:
            if self.at_ident("forall"):
                self.advance()
                names = [self.expect_ident().text]
                while self.at_ident() and not self.at_punct("."):
                    if self.peek().text in KEYWORDS:
                        break
                    names.append(self.expect_ident().text)
                if len(set(names)) != len(names):
                    raise SyntaxError_(
                        "duplicate binder in forall", self.peek().span
                    )
                self.expect_punct(".")
                body = self.type_()
                for name in reversed(names):
                    body = Forall(name, body)
                return body
            return self.arrow_type()
        finally:
            self._exit()

    def arrow_type(self) -> Type:
        dom = self.type_atom()
        if self.at_punct("->"):
            self.advance()
            return arrow(dom, self.type_())
        return dom

    def type_atom(self) -> Type:
        self._enter()
        try:
            tok = self.peek()
            if tok.kind == "ident":
                if tok.text == "Int":
                    self.advance()
                    return t_int
                if tok.text == "Bool":
                    self.advance()
                    return t_bool
                if tok.text == "ST":
                    self.advance()
                    if not self._at_type_atom_start():
                        raise ArityError("ST expects two arguments", tok.span)
                    first = self.type_atom()
                    if not self._at_type_atom_start():
                        raise ArityError("ST expects two arguments", tok.span)
                    second = self.type_atom()
                    return Con(BUILTIN_CONS["ST"], (first, second))
                if tok.text == "forall":
                    raise SyntaxError_(
                        "quantified type needs parentheses here", tok.span
                    )
                name = self.expect_ident()
                return TVar(name.text)
            if self.at_punct("["):
                self.advance()
                elem = self.type_()
                self.expect_punct("]")
                return list_of(elem)
            if self.at_punct("("):
                self.advance()
                first = self.type_()
                if self.at_punct(","):
                    self.advance()
                    second = self.type_()
                    self.expect_punct(")")
                    return pair_of(first, second)
                self.expect_punct(")")
                return first
            raise SyntaxError_(
                f"expected a type, found {tok.text!r}", tok.span
            )
        finally:
            self._exit()

    def _at_type_atom_start(self) -> bool:
        tok = self.peek()
        if tok.kind == "ident":
            return tok.text not in ("forall", "let", "in")
        return tok.kind == "punct" and tok.text in ("(", "[")

    # -- terms ---------------------------------------------------------------

    def term(self) -> Term:
        self._enter()
        try:
            if self.at_punct("\\"):
                return self.lam()
            if self.at_ident("let"):
                return self.let()
            return self.op_chain()
        finally:
            self._exit()

    def binder(self) -> tuple[str, Optional[Type], Span]:
        if self.at_punct("("):
            start = self.advance()
            name = self.expect_ident()
            self.expect_punct(":")
            ann = self.type_()
            self.expect_punct(")")
            return name.text, ann, start.span
        name = self.expect_ident()
        return name.text, None, name.span

    def lam(self) -> Term:
        start = self.expect_punct("\\")
        binders = [self.binder()]
        while not self.at_punct("."):
            binders.append(self.binder())
        self.expect_punct(".")
        body = self.term()
        for name, ann, span in reversed(binders):
            if ann is None:
                body = Lam(name, body, span)
            else:
                body = LamAnn(name, ann, body, span)
        return body

    def let(self) -> Term:
        start = self.advance()  # 'let'
        name, ann, _ = self.binder()
        self.expect_punct("=")
        bound = self.term()
        if not self.at_ident("in"):
            raise SyntaxError_(
                f"expected 'in', found {self.peek().text!r}", self.peek().span
            )
        self.advance()
        body = self.term()
        if ann is None:
            return Let(name, bound, body, start.span)
        return LetAnn(name, ann, bound, body, start.span)

    def op_chain(self) -> Term:
        left = self.sum_chain()
        if self.at_punct("::") or self.at_punct("++"):
            op = self.advance()
            right = self.op_chain()
            return App(App(Var(op.text, op.span), left, op.span), right, op.span)
        return left

    def sum_chain(self) -> Term:
        left = self.app_chain()
        while self.at_punct("+"):
            op = self.advance()
            right = self.app_chain()
            left = App(App(Var("+", op.span), left, op.span), right, op.span)
        return left

    def app_chain(self) -> Term:
        fn = self.postfix()
        while self._at_term_start():
            arg = self.postfix()
            fn = App(fn, arg, fn.span)
        return fn

    def _at_term_start(self) -> bool:
        tok = self.peek()
        if tok.kind == "int":
            return True
        if tok.kind == "ident":
            return tok.text not in ("in", "let", "forall")
        if tok.kind == "punct":
            return tok.text in ("(", "[", "~", "$", "\\")
        return False

    def postfix(self) -> Term:
        if self.at_punct("\\"):
            # Allow a trailing lambda as the last argument only via parens;
            # a bare lambda here would swallow the rest of the input.
            raise SyntaxError_(
                "lambda must be parenthesised in application position",
                self.peek().span,
            )
        term = self.prefix()
        while self.at_punct("@"):
            tok = self.advance()
            term = Inst(term, tok.span)
        return term

    def prefix(self) -> Term:
        if self.at_punct("$"):
            tok = self.advance()
            return Gen(self.atom(), tok.span)
        return self.atom()

    def atom(self) -> Term:
        self._enter()
        try:
            tok = self.peek()
            if self.at_punct("~"):
                self.advance()
                name = self.expect_ident()
                return Freeze(name.text, tok.span)
            if tok.kind == "int":
                self.advance()
                return Lit(int(tok.text), tok.span)
            if self.at_ident("True"):
                self.advance()
                return Lit(True, tok.span)
            if self.at_ident("False"):
                self.advance()
                return Lit(False, tok.span)
            if tok.kind == "ident":
                name = self.expect_ident()
                return Var(name.text, name.span)
            if self.at_punct("("):
                self.advance()
                first = self.term()
                if self.at_punct(","):
                    op = self.advance()
                    second = self.term()
                    self.expect_punct(")")
                    return App(
                        App(Var("pair", op.span), first, op.span),
                        second,
                        op.span,
                    )
                self.expect_punct(")")
                return first
            if self.at_punct("["):
                self.advance()
                elems = []
                if not self.at_punct("]"):
                    elems.append(self.term())
                    while self.at_punct(","):
                        self.advance()
                        elems.append(self.term())
                close = self.expect_punct("]")
                result: Term = Var("[]", close.span)
                for elem in reversed(elems):
                    result = App(
                        App(Var("::", close.span), elem, close.span),
                        result,
                        close.span,
                    )
                return result
            raise SyntaxError_(
                f"expected a term, found {tok.text!r}", tok.span
            )
        finally:
            self._exit()

    # -- programs --------------------------------------------------------

    def program(self) -> Term:
        decls: list[tuple[str, Optional[Type], Term, Span]] = []
        final: Optional[Term] = None
        while self.peek().kind != "eof":
            checkpoint = self.pos
            decl = self._try_declaration()
            if decl is not None:
                decls.append(decl)
                continue
            self.pos = checkpoint
            final = self.term()
            if self.at_punct(";"):
                self.advance()
            break
        tok = self.peek()
        if tok.kind != "eof":
            raise SyntaxError_(f"unexpected {tok.text!r}", tok.span)
        if final is None:
            raise MissingFinalTerm("program has no final term", tok.span)
        for name, ann, bound, span in reversed(decls):
            if ann is None:
                final = Let(name, bound, final, span)
            else:
                final = LetAnn(name, ann, bound, final, span)
        return final

    def _try_declaration(self) -> Optional[tuple[str, Optional[Type], Term, Span]]:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            return None
        lookahead = self.tokens[self.pos + 1]
        if lookahead.kind != "punct" or lookahead.text not in ("=", ":"):
            return None
        name = self.expect_ident()
        ann: Optional[Type] = None
        if self.at_punct(":"):
            self.advance()
            ann = self.type_()
        self.expect_punct("=")
        bound = self.term()
        self.expect_punct(";")
        return name.text, ann, bound, name.span


def parse_type(text: str) -> Type:
    parser = _Parser(text)
    ty = parser.type_()
    tok = parser.peek()
    if tok.kind != "eof":
        raise SyntaxError_(f"unexpected {tok.text!r}", tok.span)
    return ty


def parse_term(text: str) -> Term:
    parser = _Parser(text)
    term = parser.term()
    tok = parser.peek()
    if tok.kind != "eof":
        raise SyntaxError_(f"unexpected {tok.text!r}", tok.span)
    return term


def parse_program(text: str) -> Term:
    return _Parser(text).program()


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_DISPLAY_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _display_names(count: int, taken: set[str]) -> list[str]:
    names: list[str] = []
    i = 0
    while len(names) < count:
        letter = _DISPLAY_LETTERS[i % 26]
        suffix = i // 26
        name = letter if suffix == 0 else f"{letter}{suffix}"
        i += 1
        if name in taken:
            continue
        taken.add(name)
        names.append(name)
    return names


def normalize_type_names(a: Type) -> Type:
    """Rename internal (%-prefixed) variables for display.

    Free internal variables are renamed first, in first-occurrence
    order, then bound ones; names already present in the type are never
    reused, so e.g. a residual next to ``forall a`` becomes ``b``.
    """
    internals: list[str] = []
    for v in ftv_ordered(a):
        if is_internal_name(v) and v not in internals:
            internals.append(v)

    def bound_internals(t: Type) -> None:
        if isinstance(t, Forall):
            if is_internal_name(t.var) and t.var not in internals:
                internals.append(t.var)
            bound_internals(t.body)
        elif isinstance(t, Con):
            for arg in t.args:
                bound_internals(arg)

    bound_internals(a)
    if not internals:
        return a
    taken = {n for n in all_type_names(a) if not is_internal_name(n)}
    mapping = dict(zip(internals, _display_names(len(internals), taken)))

    def rename(t: Type) -> Type:
        if isinstance(t, TVar):
            return TVar(mapping.get(t.name, t.name))
        if isinstance(t, Con):
            return Con(t.con, tuple(rename(arg) for arg in t.args))
        if isinstance(t, Forall):
            return Forall(mapping.get(t.var, t.var), rename(t.body))
        raise TypeError(f"not a type: {t!r}")

    return rename(a)


def render_type(a: Type, normalize: bool = True, unicode: bool = False) -> str:
    if normalize:
        a = normalize_type_names(a)
    arrow_sym = " → " if unicode else " -> "

    def atom(t: Type) -> str:
        if isinstance(t, TVar):
            return t.name
        if isinstance(t, Con):
            if t.con.name == "Int":
                return "Int"
            if t.con.name == "Bool":
                return "Bool"
            if t.con.name == "List":
                return f"[{top(t.args[0])}]"
            if t.con.name == "Pair":
                return f"({top(t.args[0])}, {top(t.args[1])})"
        return f"({top(t)})"

    def applied(t: Type) -> str:
        if isinstance(t, Con) and t.con.name == "ST":
            return f"ST {atom(t.args[0])} {atom(t.args[1])}"
        return atom(t)

    def arrow_part(t: Type) -> str:
        if isinstance(t, Con) and t.con.name == "->":
            return f"{applied(t.args[0])}{arrow_sym}{arrow_part(t.args[1])}"
        if isinstance(t, Forall):
            return atom(t)
        return applied(t)

    def top(t: Type) -> str:
        if isinstance(t, Forall):
            names = []
            while isinstance(t, Forall):
                names.append(t.var)
                t = t.body
            binder = (
                "∀" + " ".join(names) + ". "
                if unicode
                else "forall " + " ".join(names) + ". "
            )
            return binder + arrow_part(t)
        return arrow_part(t)

    return top(a)


def render_term(m: Term, unicode: bool = False) -> str:
    freeze_sym = "⌈{}⌉" if unicode else "~{}"

    def is_internal_let_sugar(t: Term) -> Optional[str]:
        if isinstance(t, Let) and is_internal_name(t.var):
            if isinstance(t.body, Freeze) and t.body.name == t.var:
                return "gen"
            if isinstance(t.body, Var) and t.body.name == t.var:
                return "inst"
        return None

    def atom(t: Term) -> str:
        if isinstance(t, Var):
            return t.name
        if isinstance(t, Freeze):
            return freeze_sym.format(t.name)
        if isinstance(t, Lit):
            if t.value is True:
                return "True"
            if t.value is False:
                return "False"
            return str(t.value)
        if isinstance(t, Gen):
            return f"${atom(t.body)}"
        if isinstance(t, Inst):
            return f"{atom(t.body)}@"
        sugar = is_internal_let_sugar(t)
        if sugar == "gen":
            return f"${atom(t.bound)}"
        if sugar == "inst":
            return f"{atom(t.bound)}@"
        return f"({top(t)})"

    def app(t: Term) -> str:
        if isinstance(t, App):
            return f"{app(t.fn)} {atom(t.arg)}"
        return atom(t)

    def top(t: Term) -> str:
        if isinstance(t, Lam):
            return f"\\{t.var}. {top(t.body)}"
        if isinstance(t, LamAnn):
            return f"\\({t.var} : {render_type(t.ann, normalize=False, unicode=unicode)}). {top(t.body)}"
        if isinstance(t, Let):
            sugar = is_internal_let_sugar(t)
            if sugar is not None:
                return atom(t)
            return f"let {t.var} = {top(t.bound)} in {top(t.body)}"
        if isinstance(t, LetAnn):
            return (
                f"let ({t.var} : {render_type(t.ann, normalize=False, unicode=unicode)})"
                f" = {top(t.bound)} in {top(t.body)}"
            )
        return app(t)

    return top(m)
