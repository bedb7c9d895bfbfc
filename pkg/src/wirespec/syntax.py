"""Parser for protocol specification source.

A specification consists of a message module (message, record, type,
codec and enum declarations) and an interactions module (actor state
machines).  Parsing produces a plain AST; name resolution and actor
compilation live in :mod:`wirespec.resolve`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bits import BitString
from .errors import SpecSyntaxError

KEYWORDS = {
    "message", "module", "interactions", "record", "type", "codec", "enum",
    "of", "with", "as", "is", "end", "actor", "init", "state", "where",
    "anytime", "on", "do", "send", "next", "continue", "quit", "or",
}

PUNCT = set("()=,+-*%!")


# --- AST -----------------------------------------------------------------

@dataclass
class IntLit:
    value: int


@dataclass
class TextLit:
    value: str


@dataclass
class BitsLit:
    bits: BitString


@dataclass
class RegexLit:
    source: str


@dataclass
class NameRef:
    name: str


@dataclass
class Unary:
    op: str
    operand: object


@dataclass
class Binary:
    op: str
    left: object
    right: object


@dataclass
class InstExpr:
    """A name with optional named arguments: ``Integer(min=0, max=500)``."""

    name: str
    args: list = field(default_factory=list)  # list of (arg name, expr)


@dataclass
class FieldDecl:
    name: str
    type_expr: InstExpr
    codec_expr: InstExpr | None = None


@dataclass
class MessageDecl:
    name: str
    fields: list


@dataclass
class RecordDecl:
    name: str
    params: list
    fields: list


@dataclass
class TypeDecl:
    name: str
    expr: InstExpr


@dataclass
class CodecDecl:
    name: str
    expr: InstExpr


@dataclass
class EnumDecl:
    name: str
    base: InstExpr
    constants: list  # list of (constant name, literal expr)


@dataclass
class Alternative:
    sends: list
    terminator: tuple  # ('next', state) | ('continue',) | ('quit',)


@dataclass
class Clause:
    trigger: str | None  # message type for 'on', None for 'anytime'
    alternatives: list


@dataclass
class StateDecl:
    name: str
    init: bool
    clauses: list


@dataclass
class ActorDecl:
    name: str
    states: list


@dataclass
class MessageModule:
    name: str
    decls: list


@dataclass
class InteractionModule:
    name: str
    actors: list


@dataclass
class SpecAST:
    message_modules: list
    interaction_modules: list


# --- lexer -----------------------------------------------------------------

@dataclass
class Token:
    kind: str  # NAME KEYWORD INT TEXT BITS HEX REGEX PUNCT EOF
    value: object
    line: int
    col: int


_TEXT_ESCAPES = {"n": "\n", "r": "\r", "t": "\t", "\\": "\\", "'": "'"}


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    n = len(source)

    def err(msg):
        return SpecSyntaxError(msg, line, col)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            if word in ("b", "X", "x") and j < n and source[j] == "'":
                # bit / hex literal
                k = j + 1
                lit_start = k
                while k < n and source[k] != "'":
                    k += 1
                if k >= n:
                    raise err("unterminated bit literal")
                body = source[lit_start:k]
                try:
                    bits = (
                        BitString.from_bits(body)
                        if word == "b"
                        else BitString.from_hex(body)
                    )
                except ValueError as e:
                    raise err(str(e)) from None
                tokens.append(Token("BITS", bits, start_line, start_col))
                col += k + 1 - i
                i = k + 1
                continue
            kind = "KEYWORD" if word in KEYWORDS else "NAME"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("INT", int(source[i:j]), start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "'":
            j = i + 1
            out = []
            while j < n and source[j] != "'":
                c = source[j]
                if c == "\\":
                    j += 1
                    if j >= n:
                        raise err("unterminated text literal")
                    esc = source[j]
                    if esc not in _TEXT_ESCAPES:
                        raise err(f"unknown escape \\{esc} in text literal")
                    out.append(_TEXT_ESCAPES[esc])
                elif c == "\n":
                    raise err("unterminated text literal")
                else:
                    out.append(c)
                j += 1
            if j >= n:
                raise err("unterminated text literal")
            tokens.append(Token("TEXT", "".join(out), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch == "/":
            j = i + 1
            while j < n and source[j] != "/":
                if source[j] == "\n":
                    raise err("unterminated regular expression")
                if source[j] == "\\":
                    j += 1
                    if j >= n:
                        raise err("unterminated regular expression")
                j += 1
            if j >= n:
                raise err("unterminated regular expression")
            raw = source[i + 1 : j].replace("\\/", "/")
            tokens.append(Token("REGEX", raw, start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch in PUNCT:
            tokens.append(Token("PUNCT", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise err(f"unexpected character {ch!r}")
    tokens.append(Token("EOF", None, line, col))
    return tokens


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def error(self, msg: str) -> SpecSyntaxError:
        t = self.cur
        shown = "end of input" if t.kind == "EOF" else repr(t.value)
        return SpecSyntaxError(f"{msg}, got {shown}", t.line, t.col)

    def advance(self) -> Token:
        t = self.cur
        self.pos += 1
        return t

    def at_keyword(self, *words) -> bool:
        return self.cur.kind == "KEYWORD" and self.cur.value in words

    def expect_keyword(self, word: str) -> None:
        if not self.at_keyword(word):
            raise self.error(f"expected '{word}'")
        self.advance()

    def expect_punct(self, ch: str) -> None:
        if not (self.cur.kind == "PUNCT" and self.cur.value == ch):
            raise self.error(f"expected {ch!r}")
        self.advance()

    def at_punct(self, ch: str) -> bool:
        return self.cur.kind == "PUNCT" and self.cur.value == ch

    def name(self, what="a name") -> str:
        if self.cur.kind != "NAME":
            raise self.error(f"expected {what}")
        return self.advance().value

    # modules ---------------------------------------------------------------

    def spec(self) -> SpecAST:
        msg_mods, int_mods = [], []
        while self.cur.kind != "EOF":
            if self.at_keyword("message"):
                msg_mods.append(self.message_module())
            elif self.at_keyword("interactions"):
                int_mods.append(self.interaction_module())
            else:
                raise self.error("expected 'message module' or 'interactions module'")
        return SpecAST(msg_mods, int_mods)

    def message_module(self) -> MessageModule:
        self.expect_keyword("message")
        self.expect_keyword("module")
        name = self.name("a module name")
        decls = []
        while not self.at_keyword("end"):
            decls.append(self.declaration())
        self.advance()
        return MessageModule(name, decls)

    def interaction_module(self) -> InteractionModule:
        self.expect_keyword("interactions")
        self.expect_keyword("module")
        name = self.name("a module name")
        actors = []
        while not self.at_keyword("end"):
            actors.append(self.actor())
        self.advance()
        return InteractionModule(name, actors)

    def declaration(self):
        if self.at_keyword("message"):
            self.advance()
            name = self.name("a message name")
            fields = []
            if self.at_keyword("with"):
                self.advance()
                fields = self.fields()
            self.expect_keyword("end")
            return MessageDecl(name, fields)
        if self.at_keyword("record"):
            self.advance()
            name = self.name("a record name")
            params = []
            if self.at_punct("("):
                self.advance()
                params.append(self.name("a parameter name"))
                while self.at_punct(","):
                    self.advance()
                    params.append(self.name("a parameter name"))
                self.expect_punct(")")
            self.expect_keyword("with")
            fields = self.fields()
            self.expect_keyword("end")
            return RecordDecl(name, params, fields)
        if self.at_keyword("type"):
            self.advance()
            name = self.name("a type name")
            self.expect_keyword("is")
            return TypeDecl(name, self.instantiation())
        if self.at_keyword("codec"):
            self.advance()
            name = self.name("a codec name")
            self.expect_keyword("is")
            return CodecDecl(name, self.instantiation())
        if self.at_keyword("enum"):
            self.advance()
            name = self.name("an enum name")
            self.expect_keyword("of")
            base = self.instantiation()
            self.expect_keyword("with")
            constants = []
            while not self.at_keyword("end"):
                cname = self.name("an enum constant name")
                self.expect_keyword("as")
                constants.append((cname, self.atom()))
            self.advance()
            return EnumDecl(name, base, constants)
        raise self.error("expected a declaration")

    def fields(self) -> list:
        fields = []
        while self.cur.kind == "NAME":
            fname = self.advance().value
            self.expect_keyword("is")
            type_expr = self.instantiation()
            codec_expr = None
            if self.at_keyword("as"):
                self.advance()
                codec_expr = self.instantiation()
            fields.append(FieldDecl(fname, type_expr, codec_expr))
        return fields

    def instantiation(self) -> InstExpr:
        name = self.name("a type or codec name")
        args = []
        if self.at_punct("("):
            self.advance()
            if not self.at_punct(")"):
                args.append(self.argument())
                while self.at_punct(","):
                    self.advance()
                    args.append(self.argument())
            self.expect_punct(")")
        return InstExpr(name, args)

    def argument(self) -> tuple:
        name = self.name("an argument name")
        self.expect_punct("=")
        return (name, self.expression())

    # expressions -------------------------------------------------------------

    def expression(self):
        node = self.term()
        while self.at_punct("+") or self.at_punct("-"):
            op = self.advance().value
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.at_punct("*") or self.at_punct("%"):
            op = self.advance().value
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        if self.at_punct("!"):
            self.advance()
            return Unary("!", self.factor())
        if self.at_punct("-"):
            self.advance()
            return Unary("-", self.factor())
        return self.atom()

    def atom(self):
        t = self.cur
        if t.kind == "INT":
            self.advance()
            return IntLit(t.value)
        if t.kind == "TEXT":
            self.advance()
            return TextLit(t.value)
        if t.kind == "BITS":
            self.advance()
            return BitsLit(t.value)
        if t.kind == "REGEX":
            self.advance()
            return RegexLit(t.value)
        if t.kind == "NAME":
            name = self.advance().value
            if self.at_punct("("):
                self.pos -= 1
                return self.instantiation()
            return NameRef(name)
        if self.at_punct("("):
            self.advance()
            node = self.expression()
            self.expect_punct(")")
            return node
        raise self.error("expected a value")

    # actors -------------------------------------------------------------------

    def actor(self) -> ActorDecl:
        self.expect_keyword("actor")
        name = self.name("an actor name")
        self.expect_keyword("with")
        states = []
        while not self.at_keyword("end"):
            states.append(self.state())
        self.advance()
        return ActorDecl(name, states)

    def state(self) -> StateDecl:
        init = False
        if self.at_keyword("init"):
            self.advance()
            init = True
        self.expect_keyword("state")
        name = self.name("a state name")
        self.expect_keyword("where")
        clauses = []
        while not self.at_keyword("end"):
            clauses.append(self.clause())
        self.advance()
        return StateDecl(name, init, clauses)

    def clause(self) -> Clause:
        if self.at_keyword("anytime"):
            self.advance()
            trigger = None
        elif self.at_keyword("on"):
            self.advance()
            trigger = self.name("a message type")
        else:
            raise self.error("expected 'anytime' or 'on'")
        alternatives = [self.alternative()]
        while self.at_keyword("or"):
            self.advance()
            alternatives.append(self.alternative())
        return Clause(trigger, alternatives)

    def alternative(self) -> Alternative:
        self.expect_keyword("do")
        sends = []
        while self.at_keyword("send"):
            self.advance()
            sends.append(self.name("a message type"))
        if self.at_keyword("next"):
            self.advance()
            terminator = ("next", self.name("a state name"))
        elif self.at_keyword("continue"):
            self.advance()
            terminator = ("continue",)
        elif self.at_keyword("quit"):
            self.advance()
            terminator = ("quit",)
        else:
            raise self.error("expected 'next', 'continue' or 'quit'")
        return Alternative(sends, terminator)


def parse_spec(source: str) -> SpecAST:
    return _Parser(tokenize(source)).spec()


# --- pretty printer ----------------------------------------------------------

def _fmt_text(value: str) -> str:
    out = value.replace("\\", "\\\\").replace("'", "\\'")
    out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
    return f"'{out}'"


def format_expr(node) -> str:
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, TextLit):
        return _fmt_text(node.value)
    if isinstance(node, BitsLit):
        return repr(node.bits)
    if isinstance(node, RegexLit):
        return "/" + node.source.replace("/", "\\/") + "/"
    if isinstance(node, NameRef):
        return node.name
    if isinstance(node, Unary):
        return f"{node.op}{_wrap(node.operand, 3)}"
    if isinstance(node, Binary):
        prec = 2 if node.op in "*%" else 1
        return f"{_wrap(node.left, prec)} {node.op} {_wrap(node.right, prec + 1)}"
    if isinstance(node, InstExpr):
        if not node.args:
            return node.name
        args = ", ".join(f"{k}={format_expr(v)}" for k, v in node.args)
        return f"{node.name}({args})"
    raise TypeError(f"cannot format {node!r}")


def _prec(node) -> int:
    if isinstance(node, Binary):
        return 2 if node.op in "*%" else 1
    if isinstance(node, Unary):
        return 3
    return 4


def _wrap(node, minimum: int) -> str:
    text = format_expr(node)
    return f"({text})" if _prec(node) < minimum else text


def pretty(ast: SpecAST) -> str:
    lines = []
    for mod in ast.message_modules:
        lines.append(f"message module {mod.name}")
        for d in mod.decls:
            lines.extend(_pretty_decl(d))
        lines.append("end")
    for mod in ast.interaction_modules:
        lines.append(f"interactions module {mod.name}")
        for actor in mod.actors:
            lines.append(f"  actor {actor.name} with")
            for st in actor.states:
                prefix = "init state" if st.init else "state"
                lines.append(f"    {prefix} {st.name} where")
                for cl in st.clauses:
                    head = "anytime" if cl.trigger is None else f"on {cl.trigger}"
                    alts = " or ".join(_pretty_alt(a) for a in cl.alternatives)
                    lines.append(f"      {head} {alts}")
                lines.append("    end")
            lines.append("  end")
        lines.append("end")
    return "\n".join(lines) + "\n"


def _pretty_alt(alt: Alternative) -> str:
    words = ["do"]
    for s in alt.sends:
        words.append(f"send {s}")
    if alt.terminator[0] == "next":
        words.append(f"next {alt.terminator[1]}")
    else:
        words.append(alt.terminator[0])
    return " ".join(words)


def _pretty_decl(d) -> list:
    if isinstance(d, MessageDecl):
        if not d.fields:
            return [f"  message {d.name} end"]
        out = [f"  message {d.name} with"]
        out.extend(_pretty_field(f) for f in d.fields)
        out.append("  end")
        return out
    if isinstance(d, RecordDecl):
        params = f"({', '.join(d.params)})" if d.params else ""
        out = [f"  record {d.name}{params} with"]
        out.extend(_pretty_field(f) for f in d.fields)
        out.append("  end")
        return out
    if isinstance(d, TypeDecl):
        return [f"  type {d.name} is {format_expr(d.expr)}"]
    if isinstance(d, CodecDecl):
        return [f"  codec {d.name} is {format_expr(d.expr)}"]
    if isinstance(d, EnumDecl):
        consts = "  ".join(f"{n} as {format_expr(v)}" for n, v in d.constants)
        return [f"  enum {d.name} of {format_expr(d.base)} with {consts} end"]
    raise TypeError(f"cannot format {d!r}")


def _pretty_field(f: FieldDecl) -> str:
    text = f"    {f.name} is {format_expr(f.type_expr)}"
    if f.codec_expr is not None:
        text += f" as {format_expr(f.codec_expr)}"
    return text
