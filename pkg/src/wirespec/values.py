"""Semantic values and the evaluator for value-level expressions.

Values are what the generator produces, the codec serializes, and the
checker validates.  Field types are dependent: their arguments are
expressions over earlier fields of the same record, evaluated against an
:class:`Env` of already-known field values.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import BitString
from .errors import DivisionByZero, TypeMismatch, UnboundName
from . import syntax
from .patterns import alphabet_for_charset


# --- value model ---------------------------------------------------------------

@dataclass(frozen=True)
class IntVal:
    value: int


@dataclass(frozen=True)
class TextVal:
    text: str
    charset: str = "ascii"


@dataclass(frozen=True)
class BitsVal:
    bits: BitString


@dataclass(frozen=True)
class BoolVal:
    value: bool


@dataclass(frozen=True)
class ListVal:
    items: tuple


@dataclass(frozen=True)
class EnumVal:
    enum: str
    constant: str


@dataclass(frozen=True)
class RecordVal:
    type_name: str
    entries: tuple  # ordered (field name, value) pairs

    def get(self, name: str):
        for k, v in self.entries:
            if k == name:
                return v
        raise KeyError(name)

    def names(self):
        return [k for k, _ in self.entries]


class _Absent:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "absent"


ABSENT = _Absent()


# --- environments ----------------------------------------------------------------

class Env:
    """Field/parameter bindings for the record instance under evaluation.

    Enum constants are globally visible; `true` and `false` are built in.
    """

    def __init__(self, constants: dict | None = None, bindings: dict | None = None):
        self.constants = constants or {}
        self.bindings = dict(bindings or {})

    def child(self) -> "Env":
        return Env(self.constants, {})

    def bind(self, name: str, value) -> None:
        self.bindings[name] = value

    def lookup(self, name: str):
        if name in self.bindings:
            return self.bindings[name]
        if name == "true":
            return BoolVal(True)
        if name == "false":
            return BoolVal(False)
        if name in self.constants:
            return self.constants[name]
        raise UnboundName(name)


def eval_expr(expr, env: Env):
    if isinstance(expr, syntax.IntLit):
        return IntVal(expr.value)
    if isinstance(expr, syntax.TextLit):
        return TextVal(expr.value)
    if isinstance(expr, syntax.BitsLit):
        return BitsVal(expr.bits)
    if isinstance(expr, syntax.NameRef):
        return env.lookup(expr.name)
    if isinstance(expr, syntax.Unary):
        operand = eval_expr(expr.operand, env)
        if expr.op == "!":
            if not isinstance(operand, BoolVal):
                raise TypeMismatch(f"! applied to {operand!r}")
            return BoolVal(not operand.value)
        if not isinstance(operand, IntVal):
            raise TypeMismatch(f"unary - applied to {operand!r}")
        return IntVal(-operand.value)
    if isinstance(expr, syntax.Binary):
        left = eval_expr(expr.left, env)
        right = eval_expr(expr.right, env)
        if not isinstance(left, IntVal) or not isinstance(right, IntVal):
            raise TypeMismatch(f"{expr.op} applied to {left!r} and {right!r}")
        if expr.op == "+":
            return IntVal(left.value + right.value)
        if expr.op == "-":
            return IntVal(left.value - right.value)
        if expr.op == "*":
            return IntVal(left.value * right.value)
        if right.value == 0:
            raise DivisionByZero(syntax.format_expr(expr))
        return IntVal(left.value % right.value)
    raise TypeMismatch(f"not a value expression: {syntax.format_expr(expr)}")


def eval_int(expr, env: Env) -> int:
    v = eval_expr(expr, env)
    if not isinstance(v, IntVal):
        raise TypeMismatch(f"expected an integer, got {v!r}")
    return v.value


def eval_bool(expr, env: Env) -> bool:
    v = eval_expr(expr, env)
    if not isinstance(v, BoolVal):
        raise TypeMismatch(f"expected a boolean, got {v!r}")
    return v.value


# --- dependent-type checking ------------------------------------------------------

def check_value(value, rtype, env: Env, spec) -> str | None:
    """Returns None when the value satisfies the type, else a reason string."""
    base = rtype.base
    args = rtype.args

    if base == "Integer":
        if not isinstance(value, IntVal):
            return f"expected an integer, got {value!r}"
        if "value" in args and value.value != eval_int(args["value"], env):
            return f"must equal {eval_int(args['value'], env)}, got {value.value}"
        if "min" in args and value.value < eval_int(args["min"], env):
            return f"{value.value} below minimum {eval_int(args['min'], env)}"
        if "max" in args and value.value > eval_int(args["max"], env):
            return f"{value.value} above maximum {eval_int(args['max'], env)}"
        return None

    if base == "Text":
        if not isinstance(value, TextVal):
            return f"expected text, got {value!r}"
        charset = args.get("charset", "ascii")
        alphabet = alphabet_for_charset(charset)
        for ch in value.text:
            if ch not in alphabet:
                return f"character {ch!r} outside charset {charset!r}"
        if "value" in args:
            expected = eval_expr(args["value"], env)
            if not isinstance(expected, TextVal) or value.text != expected.text:
                return f"must equal {expected!r}, got {value.text!r}"
        if "max_count" in args and len(value.text) > eval_int(args["max_count"], env):
            return f"{len(value.text)} characters exceeds max_count"
        if "pattern" in args and not args["pattern"].fullmatch(value.text):
            return f"{value.text!r} does not match {args['pattern']!r}"
        if "exclude_pattern" in args and args["exclude_pattern"].search(value.text):
            return f"{value.text!r} contains a substring matching {args['exclude_pattern']!r}"
        return None

    if base == "Binary":
        if not isinstance(value, BitsVal):
            return f"expected bits, got {value!r}"
        if "value" in args:
            expected = eval_expr(args["value"], env)
            if value.bits != expected.bits:
                return f"must equal {expected.bits!r}, got {value.bits!r}"
        if "length" in args and value.bits.length != eval_int(args["length"], env):
            return (
                f"length {value.bits.length} bits, expected "
                f"{eval_int(args['length'], env)}"
            )
        if "char8_pattern" in args and not args["char8_pattern"].fullmatch(value.bits.to_bits()):
            return f"bits {value.bits.to_bits()!r} do not match {args['char8_pattern']!r}"
        return None

    if base == "Bool":
        if not isinstance(value, BoolVal):
            return f"expected a boolean, got {value!r}"
        if "value" in args and value.value != eval_bool(args["value"], env):
            return "boolean has the wrong fixed value"
        return None

    if base == "List":
        if not isinstance(value, ListVal):
            return f"expected a list, got {value!r}"
        if "max_length" in args and len(value.items) > eval_int(args["max_length"], env):
            return f"{len(value.items)} elements exceeds max_length"
        elem = args["elem"]
        for i, item in enumerate(value.items):
            reason = check_value(item, elem, env, spec)
            if reason:
                return f"element {i}: {reason}"
        return None

    if base == "Optional":
        empty = eval_bool(args["is_empty"], env)
        if empty:
            return None if value is ABSENT else "value must be absent"
        if value is ABSENT:
            return "value is required but absent"
        return check_value(value, args["subject"], env, spec)

    if base == "Record":
        record = spec.records[rtype.record]
        if not isinstance(value, RecordVal) or value.type_name != record.name:
            return f"expected a {record.name} record, got {value!r}"
        if value.names() != [f.name for f in record.fields]:
            return f"field set mismatch for {record.name}"
        inner = bind_record_env(rtype, record, env, spec)
        for fld in record.fields:
            v = value.get(fld.name)
            reason = check_value(v, effective_field_type(rtype, fld), inner, spec)
            if reason:
                return f"{record.name}.{fld.name}: {reason}"
            inner.bind(fld.name, v)
        return None

    if base == "Enum":
        enum = spec.enums[rtype.enum]
        if not isinstance(value, EnumVal) or value.enum != enum.name:
            return f"expected a {enum.name} constant, got {value!r}"
        if value.constant not in enum.constants:
            return f"{value.constant!r} is not a constant of {enum.name}"
        if "value" in args:
            expected = eval_expr(args["value"], env)
            if not isinstance(expected, EnumVal) or expected.constant != value.constant:
                return f"must be {expected!r}, got {value.constant}"
        return None

    return f"unknown base type {base!r}"


def bind_record_env(rtype, record, outer: Env, spec) -> Env:
    """Evaluate a record instantiation's parameter arguments in the outer env."""
    inner = outer.child()
    for param in record.params:
        if param in rtype.args:
            inner.bind(param, eval_expr(rtype.args[param], outer))
    return inner


def effective_field_type(rtype, fld):
    """Apply instantiation pins (``Header(flag=1)``) to a field's type."""
    if fld.name in rtype.args:
        pinned = dict(fld.type.args)
        pinned["value"] = rtype.args[fld.name]
        return fld.type.replace_args(pinned)
    return fld.type


def dependency_order(record) -> list[str]:
    """Field generation/decoding order; resolution guarantees declaration
    order is already topological."""
    return [f.name for f in record.fields]


# --- value literals (CLI surface) -------------------------------------------------

def format_value(value) -> str:
    if isinstance(value, IntVal):
        return str(value.value)
    if isinstance(value, TextVal):
        return syntax._fmt_text(value.text)
    if isinstance(value, BitsVal):
        return repr(value.bits)
    if isinstance(value, BoolVal):
        return "true" if value.value else "false"
    if isinstance(value, ListVal):
        return "[" + ", ".join(format_value(v) for v in value.items) + "]"
    if isinstance(value, EnumVal):
        return value.constant
    if isinstance(value, RecordVal):
        inner = ", ".join(f"{k} = {format_value(v)}" for k, v in value.entries)
        return "{ " + inner + " }"
    if value is ABSENT:
        return "absent"
    raise TypeError(f"cannot format {value!r}")


def parse_value_text(text: str):
    """Parse the textual value notation printed by :func:`format_value`.

    Record braces carry no type name; the codec layer re-types them against
    the message definition when encoding.
    """
    return _ValueParser(text).parse()


class _ValueParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def fail(self, msg):
        raise ValueError(f"bad value literal at {self.pos}: {msg}")

    def parse(self):
        v = self.value()
        self.skip_ws()
        if self.pos != len(self.text):
            self.fail("trailing input")
        return v

    def value(self):
        self.skip_ws()
        if self.pos >= len(self.text):
            self.fail("expected a value")
        ch = self.text[self.pos]
        if ch == "{":
            return self.record()
        if ch == "[":
            return self.list()
        if ch == "'":
            return TextVal(self.quoted())
        if ch.isdigit() or ch == "-":
            return IntVal(self.integer())
        word = self.word()
        if word == "true":
            return BoolVal(True)
        if word == "false":
            return BoolVal(False)
        if word == "absent":
            return ABSENT
        if word in ("b", "X", "x") and self.pos < len(self.text) and self.text[self.pos] == "'":
            body = self.quoted()
            return BitsVal(
                BitString.from_bits(body) if word == "b" else BitString.from_hex(body)
            )
        if word:
            return EnumVal("", word)  # enum constant; typed during encode
        self.fail(f"unexpected {ch!r}")

    def record(self):
        self.pos += 1  # '{'
        entries = []
        self.skip_ws()
        while self.text[self.pos : self.pos + 1] != "}":
            name = self.word()
            if not name:
                self.fail("expected a field name")
            self.skip_ws()
            if self.text[self.pos : self.pos + 1] != "=":
                self.fail("expected '='")
            self.pos += 1
            entries.append((name, self.value()))
            self.skip_ws()
            if self.text[self.pos : self.pos + 1] == ",":
                self.pos += 1
                self.skip_ws()
        self.pos += 1
        return RecordVal("", tuple(entries))

    def list(self):
        self.pos += 1  # '['
        items = []
        self.skip_ws()
        while self.text[self.pos : self.pos + 1] != "]":
            items.append(self.value())
            self.skip_ws()
            if self.text[self.pos : self.pos + 1] == ",":
                self.pos += 1
                self.skip_ws()
        self.pos += 1
        return ListVal(tuple(items))

    def quoted(self) -> str:
        self.pos += 1  # opening quote
        out = []
        while self.pos < len(self.text) and self.text[self.pos] != "'":
            c = self.text[self.pos]
            if c == "\\":
                self.pos += 1
                c = {"n": "\n", "r": "\r", "t": "\t"}.get(
                    self.text[self.pos], self.text[self.pos]
                )
            out.append(c)
            self.pos += 1
        if self.pos >= len(self.text):
            self.fail("unterminated quote")
        self.pos += 1
        return "".join(out)

    def integer(self) -> int:
        start = self.pos
        if self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start : self.pos])

    def word(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        return self.text[start : self.pos]
