"""Name resolution: from parsed AST to a fully-expanded protocol description.

Expands user type/codec aliases with argument-override semantics, validates
field dependency graphs (arguments may only reference earlier fields or
record parameters), and compiles actor declarations into IOLTS form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax
from .errors import (
    CyclicDependency,
    DuplicateName,
    ForwardReference,
    ResolutionError,
    UnknownName,
)
from .lts import IOLTS, QUIT, QUIT_STATE, TAU, Edge, recv, send
from .patterns import compile_pattern
from .values import BitsVal, EnumVal, IntVal, TextVal

BASE_TYPES = {
    "Integer": {"min", "max", "value"},
    "Text": {"charset", "pattern", "exclude_pattern", "max_count", "value"},
    "Binary": {"value", "length", "char8_pattern"},
    "Bool": {"value"},
    "List": {"elem", "max_length"},
    "Optional": {"is_empty", "subject"},
}

BASE_CODECS = {
    "BigEndian": {"signed", "length"},
    "BoolBits": {"truth_string", "falsehood_string"},
    "TerminatedText": {"encoding", "terminator"},
    "FixedCountText": {"encoding"},
    "CountPrefixList": {"count_codec"},
    "TextInteger": {"text_codec"},
    "RawBinary": set(),
}

_TYPE_ARG_KINDS = {
    "elem": "type",
    "subject": "type",
    "pattern": "regex",
    "exclude_pattern": "regex",
    "char8_pattern": "regex",
    "charset": "text",
}

_CODEC_ARG_KINDS = {
    "count_codec": "codec",
    "text_codec": "codec",
    "encoding": "text",
    "terminator": "text",
    "truth_string": "bits",
    "falsehood_string": "bits",
}

_REQUIRED_TYPE_ARGS = {
    "List": {"elem"},
    "Optional": {"is_empty", "subject"},
}

_REQUIRED_CODEC_ARGS = {
    "BigEndian": {"length"},
    "BoolBits": {"truth_string", "falsehood_string"},
    "TerminatedText": {"terminator"},
    "CountPrefixList": {"count_codec"},
    "TextInteger": {"text_codec"},
}


@dataclass
class RType:
    """A fully-expanded type instance."""

    base: str  # a BASE_TYPES key, or 'Record' / 'Enum'
    args: dict
    record: str | None = None
    enum: str | None = None

    def replace_args(self, args: dict) -> "RType":
        return RType(self.base, args, self.record, self.enum)


@dataclass
class RCodec:
    base: str
    args: dict


@dataclass
class RField:
    name: str
    type: RType
    codec: RCodec | None
    deps: tuple  # names of earlier fields / parameters referenced


@dataclass
class RecordDef:
    name: str
    params: tuple
    fields: list
    is_message: bool


@dataclass
class EnumDef:
    name: str
    base: RType
    constants: dict  # constant name -> underlying Value (ordered)


@dataclass
class ResolvedSpec:
    name: str
    records: dict  # record and message definitions by name
    message_types: list  # declaration order
    enums: dict
    actors: dict  # actor name -> IOLTS
    constants: dict  # enum constant name -> EnumVal

    def message_record(self, name: str) -> RecordDef:
        rec = self.records.get(name)
        if rec is None or not rec.is_message:
            raise UnknownName(f"no message type named {name!r}")
        return rec


def resolve(ast: syntax.SpecAST) -> ResolvedSpec:
    return _Resolver(ast).run()


def load_spec(path) -> ResolvedSpec:
    with open(path, "r", encoding="utf-8") as f:
        return resolve(syntax.parse_spec(f.read()))


class _Resolver:
    def __init__(self, ast: syntax.SpecAST):
        self.ast = ast
        self.type_aliases = {}
        self.codec_aliases = {}
        self.record_decls = {}
        self.enum_decls = {}
        self.message_order = []
        self.records = {}
        self.enums = {}
        self.constants = {}

    def run(self) -> ResolvedSpec:
        name = self._collect()
        for ename, decl in self.enum_decls.items():
            self.enums[ename] = self._resolve_enum(decl)
        for rname, decl in self.record_decls.items():
            self.records[rname] = self._resolve_record(decl)
        actors = {}
        for mod in self.ast.interaction_modules:
            for actor in mod.actors:
                if actor.name in actors:
                    raise DuplicateName(f"actor {actor.name!r} declared twice")
                actors[actor.name] = compile_actor(actor, set(self.message_order))
        return ResolvedSpec(
            name=name,
            records=self.records,
            message_types=self.message_order,
            enums=self.enums,
            actors=actors,
            constants=self.constants,
        )

    def _collect(self) -> str:
        names = set()
        module_name = ""

        def claim(kind, name):
            if name in names:
                raise DuplicateName(f"{kind} {name!r} conflicts with an earlier declaration")
            names.add(name)

        for mod in self.ast.message_modules:
            module_name = module_name or mod.name
            for d in mod.decls:
                if isinstance(d, syntax.MessageDecl):
                    claim("message", d.name)
                    self.record_decls[d.name] = syntax.RecordDecl(d.name, [], d.fields)
                    self.message_order.append(d.name)
                elif isinstance(d, syntax.RecordDecl):
                    claim("record", d.name)
                    self.record_decls[d.name] = d
                elif isinstance(d, syntax.TypeDecl):
                    claim("type", d.name)
                    self.type_aliases[d.name] = d
                elif isinstance(d, syntax.CodecDecl):
                    claim("codec", d.name)
                    self.codec_aliases[d.name] = d
                elif isinstance(d, syntax.EnumDecl):
                    claim("enum", d.name)
                    self.enum_decls[d.name] = d
        for mod in self.ast.interaction_modules:
            module_name = module_name or mod.name
        return module_name

    # --- enums ----------------------------------------------------------------

    def _resolve_enum(self, decl: syntax.EnumDecl) -> EnumDef:
        base = self._expand_type(decl.base, stack=())
        constants = {}
        for cname, literal in decl.constants:
            if cname in constants:
                raise DuplicateName(f"enum constant {cname!r} declared twice in {decl.name}")
            if cname in self.constants:
                raise DuplicateName(
                    f"enum constant {cname!r} appears in more than one enum"
                )
            constants[cname] = _literal_value(literal, decl.name)
            self.constants[cname] = EnumVal(decl.name, cname)
        return EnumDef(decl.name, base, constants)

    # --- types and codecs ---------------------------------------------------------

    def _expand_type(self, inst: syntax.InstExpr, stack: tuple) -> RType:
        if inst.name in stack:
            raise CyclicDependency(
                "type alias cycle: " + " -> ".join(stack + (inst.name,))
            )
        if inst.name in BASE_TYPES:
            return RType(inst.name, self._type_args(inst.name, inst.args, stack))
        if inst.name in self.record_decls:
            decl = self.record_decls[inst.name]
            allowed = set(decl.params) | {f.name for f in decl.fields}
            args = {}
            for aname, expr in inst.args:
                if aname not in allowed:
                    raise UnknownName(
                        f"{inst.name} has no parameter or field named {aname!r}"
                    )
                args[aname] = expr
            return RType("Record", args, record=inst.name)
        if inst.name in self.enum_decls:
            for aname, _ in inst.args:
                if aname != "value":
                    raise UnknownName(f"enum {inst.name} has no argument named {aname!r}")
            return RType("Enum", {k: v for k, v in inst.args}, enum=inst.name)
        if inst.name in self.type_aliases:
            alias = self.type_aliases[inst.name]
            inner = self._expand_type(alias.expr, stack + (inst.name,))
            merged = dict(inner.args)
            if inner.base in BASE_TYPES:
                merged.update(self._type_args(inner.base, inst.args, stack))
            else:
                merged.update({k: v for k, v in inst.args})
            return inner.replace_args(merged)
        raise UnknownName(f"unknown type {inst.name!r}")

    def _type_args(self, base: str, args: list, stack: tuple) -> dict:
        out = {}
        for aname, expr in args:
            if aname not in BASE_TYPES[base]:
                raise UnknownName(f"{base} has no argument named {aname!r}")
            kind = _TYPE_ARG_KINDS.get(aname, "expr")
            if kind == "type":
                if not isinstance(expr, syntax.InstExpr):
                    if isinstance(expr, syntax.NameRef):
                        expr = syntax.InstExpr(expr.name, [])
                    else:
                        raise ResolutionError(f"argument {aname!r} must name a type")
                out[aname] = self._expand_type(expr, stack)
            elif kind == "regex":
                if not isinstance(expr, syntax.RegexLit):
                    raise ResolutionError(f"argument {aname!r} must be a /regex/")
                out[aname] = compile_pattern(expr.source)
            elif kind == "text":
                if not isinstance(expr, syntax.TextLit):
                    raise ResolutionError(f"argument {aname!r} must be a text literal")
                out[aname] = expr.value
            else:
                out[aname] = expr
        return out

    def _expand_codec(self, inst: syntax.InstExpr, stack: tuple) -> RCodec:
        if inst.name in stack:
            raise CyclicDependency(
                "codec alias cycle: " + " -> ".join(stack + (inst.name,))
            )
        if inst.name in BASE_CODECS:
            return RCodec(inst.name, self._codec_args(inst.name, inst.args, stack))
        if inst.name in self.codec_aliases:
            alias = self.codec_aliases[inst.name]
            inner = self._expand_codec(alias.expr, stack + (inst.name,))
            merged = dict(inner.args)
            merged.update(self._codec_args(inner.base, inst.args, stack))
            return RCodec(inner.base, merged)
        raise UnknownName(f"unknown codec {inst.name!r}")

    def _codec_args(self, base: str, args: list, stack: tuple) -> dict:
        out = {}
        for aname, expr in args:
            if aname not in BASE_CODECS[base]:
                raise UnknownName(f"codec {base} has no argument named {aname!r}")
            kind = _CODEC_ARG_KINDS.get(aname, "expr")
            if kind == "codec":
                if isinstance(expr, syntax.NameRef):
                    expr = syntax.InstExpr(expr.name, [])
                if not isinstance(expr, syntax.InstExpr):
                    raise ResolutionError(f"argument {aname!r} must name a codec")
                out[aname] = self._expand_codec(expr, stack)
            elif kind == "text":
                if not isinstance(expr, syntax.TextLit):
                    raise ResolutionError(f"argument {aname!r} must be a text literal")
                out[aname] = expr.value
            elif kind == "bits":
                if not isinstance(expr, syntax.BitsLit):
                    raise ResolutionError(f"argument {aname!r} must be a bit or hex literal")
                out[aname] = expr.bits
            else:
                out[aname] = expr
        return out

    # --- records --------------------------------------------------------------------

    def _resolve_record(self, decl: syntax.RecordDecl) -> RecordDef:
        fields = []
        seen = []
        params = tuple(decl.params)
        for f in decl.fields:
            if f.name in seen:
                raise DuplicateName(f"field {f.name!r} declared twice in {decl.name}")
            if f.name in params:
                raise DuplicateName(
                    f"field {f.name!r} shadows a parameter of {decl.name}"
                )
            rtype = self._expand_type(f.type_expr, stack=())
            rcodec = self._expand_codec(f.codec_expr, stack=()) if f.codec_expr else None
            deps = self._check_references(decl, f.name, seen, params, rtype, rcodec)
            fields.append(RField(f.name, rtype, rcodec, tuple(deps)))
            seen.append(f.name)
        self._check_codecs(decl.name, fields)
        return RecordDef(decl.name, params, fields, decl.name in self.message_order)

    def _check_references(self, decl, fname, earlier, params, rtype, rcodec) -> list:
        deps = []
        later = {f.name for f in decl.fields} - set(earlier)

        def walk_expr(expr):
            if isinstance(expr, syntax.NameRef):
                name = expr.name
                if name in ("true", "false") or name in self.constants:
                    return
                if name == fname:
                    raise CyclicDependency(
                        f"{decl.name}.{fname} depends on itself"
                    )
                if name in later:
                    raise ForwardReference(
                        f"{decl.name}.{fname} references later field {name!r}"
                    )
                if name not in earlier and name not in params:
                    raise UnknownName(
                        f"{decl.name}.{fname} references unknown name {name!r}"
                    )
                if name not in deps:
                    deps.append(name)
            elif isinstance(expr, syntax.Unary):
                walk_expr(expr.operand)
            elif isinstance(expr, syntax.Binary):
                walk_expr(expr.left)
                walk_expr(expr.right)
            elif isinstance(expr, syntax.InstExpr):
                for _, sub in expr.args:
                    walk_expr(sub)

        def walk_args(args: dict):
            for value in args.values():
                if isinstance(value, RType) or isinstance(value, RCodec):
                    walk_args(value.args)
                elif isinstance(
                    value,
                    (syntax.IntLit, syntax.TextLit, syntax.BitsLit, syntax.NameRef,
                     syntax.Unary, syntax.Binary, syntax.InstExpr),
                ):
                    walk_expr(value)

        walk_args(rtype.args)
        if rcodec is not None:
            walk_args(rcodec.args)
        return deps

    def _check_codecs(self, record_name: str, fields: list) -> None:
        for f in fields:
            where = f"{record_name}.{f.name}"
            subject = f.type
            while subject.base == "Optional":
                self._require_args(subject, where)
                subject = subject.args["subject"]
            self._require_args(subject, where)
            if f.codec is None:
                if subject.base in ("Integer", "Text", "Bool", "List", "Enum"):
                    raise ResolutionError(f"{where}: a {subject.base} field needs a codec")
                continue
            missing = _REQUIRED_CODEC_ARGS.get(f.codec.base, set()) - set(f.codec.args)
            if missing:
                raise ResolutionError(
                    f"{where}: codec {f.codec.base} is missing {sorted(missing)}"
                )
            if f.codec.base == "BoolBits":
                t = f.codec.args["truth_string"]
                fa = f.codec.args["falsehood_string"]
                if t == fa or t.length != fa.length:
                    raise ResolutionError(
                        f"{where}: BoolBits strings must be distinct and equal-length"
                    )

    def _require_args(self, rtype: RType, where: str) -> None:
        missing = _REQUIRED_TYPE_ARGS.get(rtype.base, set()) - set(rtype.args)
        if missing:
            raise ResolutionError(f"{where}: {rtype.base} is missing {sorted(missing)}")


def _literal_value(expr, enum_name: str):
    if isinstance(expr, syntax.TextLit):
        return TextVal(expr.value)
    if isinstance(expr, syntax.IntLit):
        return IntVal(expr.value)
    if isinstance(expr, syntax.BitsLit):
        return BitsVal(expr.bits)
    raise ResolutionError(f"enum {enum_name}: constants must map to literals")


# --- actor compilation ----------------------------------------------------------------

def compile_actor(decl: syntax.ActorDecl, message_types: set) -> IOLTS:
    named = []
    initial = None
    for st in decl.states:
        if st.name in named:
            raise DuplicateName(f"state {st.name!r} declared twice in actor {decl.name}")
        if st.name == QUIT_STATE:
            raise DuplicateName(f"state name {QUIT_STATE!r} is reserved")
        named.append(st.name)
        if st.init:
            if initial is not None:
                raise ResolutionError(f"actor {decl.name} has more than one init state")
            initial = st.name
    if initial is None:
        raise ResolutionError(f"actor {decl.name} has no init state")

    edges = []
    anon = []
    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        name = f"u{counter}"
        while name in named:
            counter += 1
            name = f"u{counter}"
        anon.append(name)
        return name

    def check_message(m: str):
        if m not in message_types:
            raise UnknownName(f"actor {decl.name}: unknown message type {m!r}")

    def target_of(term: tuple, enclosing: str) -> str:
        if term[0] == "next":
            if term[1] not in named:
                raise UnknownName(
                    f"actor {decl.name}: 'next {term[1]}' names no declared state"
                )
            return term[1]
        if term[0] == "continue":
            return enclosing
        return QUIT_STATE

    def chain(src: str, labels: list, final: str):
        """Lay a label sequence from src, ending at final; empty -> tau edge."""
        if not labels:
            edges.append(Edge(src, TAU, final))
            return
        cur = src
        for i, label in enumerate(labels):
            dst = final if i == len(labels) - 1 else fresh()
            edges.append(Edge(cur, label, dst))
            cur = dst

    for st in decl.states:
        for cl in st.clauses:
            alternatives = cl.alternatives
            if cl.trigger is None:
                for alt in alternatives:
                    for m in alt.sends:
                        check_message(m)
                    labels = [send(m) for m in alt.sends]
                    if alt.terminator[0] == "quit":
                        labels.append(QUIT)
                    chain(st.name, labels, target_of(alt.terminator, st.name))
            else:
                check_message(cl.trigger)
                for m in (m for alt in alternatives for m in alt.sends):
                    check_message(m)
                sole = alternatives[0] if len(alternatives) == 1 else None
                if sole is not None and not sole.sends and sole.terminator[0] != "quit":
                    edges.append(
                        Edge(st.name, recv(cl.trigger), target_of(sole.terminator, st.name))
                    )
                    continue
                hub = fresh()
                edges.append(Edge(st.name, recv(cl.trigger), hub))
                for alt in alternatives:
                    labels = [send(m) for m in alt.sends]
                    if alt.terminator[0] == "quit":
                        labels.append(QUIT)
                    chain(hub, labels, target_of(alt.terminator, st.name))

    states = named + anon + [QUIT_STATE]
    return IOLTS(decl.name, states, named, initial, edges)
