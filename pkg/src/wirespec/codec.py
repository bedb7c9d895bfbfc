"""Bidirectional translation between values and bitstrings.

Each field pairs a (dependent) type with a codec; records encode as the
concatenation of their fields in declaration order.  Decoding is
incremental: running out of input raises an :class:`IncompleteInput`
subclass so that callers feeding a growing stream buffer can distinguish
"wait for more bytes" from a malformed message.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import EMPTY, BitString
from .errors import (
    ConstraintViolation,
    IncompleteInput,
    MissingTerminator,
    NotByteAligned,
    TerminatorInPayload,
    Underrun,
    Unrepresentable,
)
from .resolve import RCodec, RType, ResolvedSpec
from .values import (
    ABSENT,
    BitsVal,
    BoolVal,
    Env,
    EnumVal,
    IntVal,
    ListVal,
    RecordVal,
    TextVal,
    bind_record_env,
    check_value,
    effective_field_type,
    eval_bool,
    eval_expr,
    eval_int,
)

RAW_BINARY = RCodec("RawBinary", {})


def signed_range(width: int, signed: bool) -> tuple[int, int]:
    if signed:
        return -(1 << (width - 1)), (1 << (width - 1)) - 1
    return 0, (1 << width) - 1


def _encode_text_bytes(text: str, encoding: str) -> bytes:
    try:
        return text.encode("ascii" if encoding == "ascii" else "latin-1")
    except UnicodeEncodeError as e:
        raise Unrepresentable(f"text {text!r} not encodable as {encoding}") from e


# --- field encoding -----------------------------------------------------------

def encode_field(value, rtype: RType, rcodec: RCodec | None, env: Env, spec: ResolvedSpec) -> BitString:
    base = rtype.base

    if base == "Optional":
        if eval_bool(rtype.args["is_empty"], env):
            return EMPTY
        return encode_field(value, rtype.args["subject"], rcodec, env, spec)

    if base == "Record":
        return _encode_record(value, rtype, env, spec)

    if base == "Binary":
        return value.bits

    if base == "Enum":
        enum = spec.enums[rtype.enum]
        return encode_field(enum.constants[value.constant], enum.base, rcodec, env, spec)

    if rcodec is None:
        raise Unrepresentable(f"{base} field has no codec")

    if rcodec.base == "BigEndian":
        width = eval_int(rcodec.args["length"], env)
        signed = eval_bool(rcodec.args["signed"], env) if "signed" in rcodec.args else False
        lo, hi = signed_range(width, signed)
        if not lo <= value.value <= hi:
            raise Unrepresentable(
                f"{value.value} does not fit {width}-bit {'signed' if signed else 'unsigned'}"
            )
        return BitString(value.value & ((1 << width) - 1), width)

    if rcodec.base == "BoolBits":
        return rcodec.args["truth_string" if value.value else "falsehood_string"]

    if rcodec.base == "TerminatedText":
        encoding = rcodec.args.get("encoding", "ascii")
        terminator = rcodec.args["terminator"]
        if terminator in value.text:
            raise TerminatorInPayload(
                f"text {value.text!r} contains its terminator {terminator!r}"
            )
        data = _encode_text_bytes(value.text + terminator, encoding)
        return BitString.from_bytes(data)

    if rcodec.base == "FixedCountText":
        encoding = rcodec.args.get("encoding", "ascii")
        count = _fixed_text_count(rtype, env)
        if len(value.text) != count:
            raise Unrepresentable(
                f"fixed-count text must be exactly {count} characters, got {len(value.text)}"
            )
        return BitString.from_bytes(_encode_text_bytes(value.text, encoding))

    if rcodec.base == "TextInteger":
        text = TextVal(str(value.value))
        return encode_field(text, RType("Text", {}), rcodec.args["text_codec"], env, spec)

    if rcodec.base == "CountPrefixList":
        count = encode_field(
            IntVal(len(value.items)), RType("Integer", {}), rcodec.args["count_codec"], env, spec
        )
        parts = [count]
        elem = rtype.args["elem"]
        for item in value.items:
            parts.append(encode_field(item, elem, None, env, spec))
        return BitString.concat(parts)

    if rcodec.base == "RawBinary":
        return value.bits

    raise Unrepresentable(f"no encoding rule for {base} as {rcodec.base}")


def _fixed_text_count(rtype: RType, env: Env) -> int:
    if "max_count" in rtype.args:
        return eval_int(rtype.args["max_count"], env)
    if "value" in rtype.args:
        fixed = eval_expr(rtype.args["value"], env)
        return len(fixed.text)
    raise Unrepresentable("FixedCountText needs the type's max_count or value")


def _encode_record(value: RecordVal, rtype: RType, outer: Env, spec: ResolvedSpec) -> BitString:
    record = spec.records[rtype.record]
    env = bind_record_env(rtype, record, outer, spec)
    parts = []
    for fld in record.fields:
        v = value.get(fld.name)
        parts.append(encode_field(v, effective_field_type(rtype, fld), fld.codec, env, spec))
        env.bind(fld.name, v)
    return BitString.concat(parts)


# --- field decoding -----------------------------------------------------------

def decode_field(bs: BitString, rtype: RType, rcodec: RCodec | None, env: Env, spec: ResolvedSpec):
    """Returns (value, rest).  Raises IncompleteInput subclasses when the
    buffer may simply be short, ConstraintViolation when the input
    contradicts the type."""
    base = rtype.base

    if base == "Optional":
        if eval_bool(rtype.args["is_empty"], env):
            return ABSENT, bs
        return decode_field(bs, rtype.args["subject"], rcodec, env, spec)

    if base == "Record":
        return _decode_record(bs, rtype, env, spec)

    if base == "Enum":
        enum = spec.enums[rtype.enum]
        raw, rest = decode_field(bs, enum.base, rcodec, env, spec)
        constant = None
        for cname, cval in enum.constants.items():
            if cval == raw:
                constant = cname
                break
        if constant is None:
            raise ConstraintViolation(f"{raw!r} is not a {enum.name} constant")
        value = EnumVal(enum.name, constant)
        _checked(value, rtype, env, spec)
        return value, rest

    if base == "Binary":
        value_arg = rtype.args.get("value")
        if value_arg is not None:
            expected = eval_expr(value_arg, env).bits
            length = expected.length
        elif "length" in rtype.args:
            length = eval_int(rtype.args["length"], env)
        else:
            raise ConstraintViolation("Binary field needs a length or a fixed value")
        head, rest = bs.take(length)
        value = BitsVal(head)
        _checked(value, rtype, env, spec)
        return value, rest

    if rcodec is None:
        raise ConstraintViolation(f"{base} field has no codec")

    if rcodec.base == "BigEndian":
        width = eval_int(rcodec.args["length"], env)
        signed = eval_bool(rcodec.args["signed"], env) if "signed" in rcodec.args else False
        head, rest = bs.take(width)
        raw = head.value
        if signed and raw >> (width - 1):
            raw -= 1 << width
        value = IntVal(raw)
        _checked(value, rtype, env, spec)
        return value, rest

    if rcodec.base == "BoolBits":
        truth = rcodec.args["truth_string"]
        falsehood = rcodec.args["falsehood_string"]
        head, rest = bs.take(truth.length)
        if head == truth:
            value = BoolVal(True)
        elif head == falsehood:
            value = BoolVal(False)
        else:
            raise ConstraintViolation(f"bits {head!r} are neither truth nor falsehood pattern")
        _checked(value, rtype, env, spec)
        return value, rest

    if rcodec.base == "TerminatedText":
        encoding = rcodec.args.get("encoding", "ascii")
        terminator = rcodec.args["terminator"]
        text, rest = _scan_terminated(bs, terminator, encoding)
        value = TextVal(text, rtype.args.get("charset", "ascii"))
        _checked(value, rtype, env, spec)
        return value, rest

    if rcodec.base == "FixedCountText":
        count = _fixed_text_count(rtype, env)
        chars = []
        rest = bs
        for _ in range(count):
            head, rest = rest.take(8)
            chars.append(chr(head.value))
        value = TextVal("".join(chars), rtype.args.get("charset", "ascii"))
        _checked(value, rtype, env, spec)
        return value, rest

    if rcodec.base == "TextInteger":
        raw, rest = decode_field(bs, RType("Text", {}), rcodec.args["text_codec"], env, spec)
        text = raw.text
        body = text[1:] if text.startswith("-") else text
        if not body or not body.isdigit():
            raise ConstraintViolation(f"{text!r} is not a decimal integer")
        value = IntVal(int(text))
        _checked(value, rtype, env, spec)
        return value, rest

    if rcodec.base == "CountPrefixList":
        count_val, rest = decode_field(
            bs, RType("Integer", {}), rcodec.args["count_codec"], env, spec
        )
        count = count_val.value
        if count < 0:
            raise ConstraintViolation(f"negative list count {count}")
        if "max_length" in rtype.args and count > eval_int(rtype.args["max_length"], env):
            raise ConstraintViolation(f"list count {count} exceeds max_length")
        items = []
        elem = rtype.args["elem"]
        for _ in range(count):
            item, rest = decode_field(rest, elem, None, env, spec)
            items.append(item)
        return ListVal(tuple(items)), rest

    raise ConstraintViolation(f"no decoding rule for {base} as {rcodec.base}")


def _checked(value, rtype: RType, env: Env, spec: ResolvedSpec):
    reason = check_value(value, rtype, env, spec)
    if reason:
        raise ConstraintViolation(reason)


def _scan_terminated(bs: BitString, terminator: str, encoding: str) -> tuple[str, BitString]:
    term = terminator
    out = []
    rest = bs
    while True:
        if len(out) >= len(term) and "".join(out[-len(term):]) == term:
            return "".join(out[: -len(term)]), rest
        if rest.length < 8:
            raise MissingTerminator(f"terminator {terminator!r} not found")
        head, rest = rest.take(8)
        code = head.value
        if encoding == "ascii" and code > 127:
            raise ConstraintViolation(f"byte {code:#x} is not ASCII")
        out.append(chr(code))


def _decode_record(bs: BitString, rtype: RType, outer: Env, spec: ResolvedSpec):
    record = spec.records[rtype.record]
    env = bind_record_env(rtype, record, outer, spec)
    entries = []
    rest = bs
    for fld in record.fields:
        value, rest = decode_field(rest, effective_field_type(rtype, fld), fld.codec, env, spec)
        entries.append((fld.name, value))
        env.bind(fld.name, value)
    return RecordVal(record.name, tuple(entries)), rest


# --- whole messages ---------------------------------------------------------------

def record_type(spec: ResolvedSpec, name: str) -> RType:
    return RType("Record", {}, record=name)


def encode_message(msg_type: str, value: RecordVal, spec: ResolvedSpec) -> bytes:
    record = spec.message_record(msg_type)
    rtype = record_type(spec, record.name)
    env = Env(spec.constants)
    reason = check_value(value, rtype, env, spec)
    if reason:
        raise ConstraintViolation(f"{msg_type}: {reason}")
    bits = _encode_record(value, rtype, env, spec)
    if bits.length % 8:
        raise NotByteAligned(
            f"{msg_type} encodes to {bits.length} bits for this value"
        )
    return bits.to_bytes()


@dataclass
class Classified:
    msg_type: str
    value: RecordVal
    consumed: int  # bytes
    also_matched: list | None = None


class NeedMoreBytes:
    def __repr__(self):
        return "NeedMoreBytes"


NEED_MORE = NeedMoreBytes()


@dataclass
class InvalidFormat:
    diagnostics: dict  # candidate -> failure reason


def decode_message(
    buf: bytes,
    candidates,
    spec: ResolvedSpec,
    report_ambiguity: bool = False,
):
    """Classify the front of a byte buffer against candidate message types.

    Candidates are attempted in specification declaration order; the first
    full decode wins.  Returns Classified, NEED_MORE, or InvalidFormat.
    """
    ordered = [m for m in spec.message_types if m in set(candidates)]
    if not ordered:
        raise ValueError("no candidate message types")
    bits = BitString.from_bytes(buf)
    diagnostics = {}
    incomplete = False
    winner = None
    for name in ordered:
        if winner is not None and not report_ambiguity:
            break
        try:
            value, rest = _decode_record(
                bits, record_type(spec, name), Env(spec.constants), spec
            )
            if rest.length % 8:
                raise ConstraintViolation("message does not end on a byte boundary")
            if winner is None:
                winner = Classified(name, value, (bits.length - rest.length) // 8)
                if report_ambiguity:
                    winner.also_matched = []
            else:
                winner.also_matched.append(name)
        except IncompleteInput as e:
            incomplete = True
            diagnostics[name] = f"incomplete: {e}"
        except ConstraintViolation as e:
            diagnostics[name] = str(e)
    if winner is not None:
        return winner
    if incomplete:
        return NEED_MORE
    return InvalidFormat(diagnostics)
