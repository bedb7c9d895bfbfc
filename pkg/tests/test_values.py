import pytest

from wirespec.bits import BitString
from wirespec.errors import DivisionByZero, TypeMismatch, UnboundName
from wirespec.resolve import resolve
from wirespec.syntax import parse_spec
from wirespec.values import (
    ABSENT,
    BitsVal,
    BoolVal,
    Env,
    EnumVal,
    IntVal,
    ListVal,
    RecordVal,
    TextVal,
    check_value,
    eval_expr,
    format_value,
    parse_value_text,
)


def expr(text):
    """Parse an expression by planting it in a throwaway field argument."""
    ast = parse_spec(f"message module M record R with f is Binary(length={text}) end end")
    return ast.message_modules[0].decls[0].fields[0].type_expr.args[0][1]


def env(**bindings):
    e = Env()
    for k, v in bindings.items():
        e.bind(k, v)
    return e


def test_modulo_expression():
    # 5 % 4 = 1; 4 - 1 = 3; 8 * 3 = 24, checked by hand
    assert eval_expr(expr("8*(4 - n%4)"), env(n=IntVal(5))) == IntVal(24)


def test_boolean_negation():
    assert eval_expr(expr("!hasfoot"), env(hasfoot=BoolVal(False))) == BoolVal(True)


def test_zero_case():
    assert eval_expr(expr("8*n"), env(n=IntVal(0))) == IntVal(0)


def test_eval_matches_python_arithmetic():
    cases = [("2+3*4", 14), ("(2+3)*4", 20), ("7%3", 1), ("10-4-3", 3), ("-n", -6)]
    for text, expected in cases:
        assert eval_expr(expr(text), env(n=IntVal(6))) == IntVal(expected)


def test_eval_errors():
    with pytest.raises(UnboundName):
        eval_expr(expr("missing"), env())
    with pytest.raises(TypeMismatch):
        eval_expr(expr("!n"), env(n=IntVal(1)))
    with pytest.raises(DivisionByZero):
        eval_expr(expr("5 % z"), env(z=IntVal(0)))


def test_true_false_builtins():
    assert eval_expr(expr("!true"), env()) == BoolVal(False)


# --- check_value ------------------------------------------------------------------

SPEC_SRC = """
message module M
  message Wrap with
    n is Integer(min=0, max=500) as BigEndian(signed=false, length=32)
    hasfoot is Bool as BoolBits(truth_string=X'ff', falsehood_string=X'00')
    foot is Optional(is_empty=!hasfoot, subject=Text(charset='ascii', max_count=5))
         as TerminatedText(terminator='\\n')
    pad is Binary(length=8, char8_pattern=/\\0*\\1/)
    tags is List(elem=Item, max_length=2) as CountPrefixList(count_codec=BigEndian(length=8))
    status is Status as TerminatedText(terminator=' ')
  end
  record Item with v is Integer(min=0, max=9) as BigEndian(length=8) end
  type Tag is Text(charset='ascii', pattern=/[0-9a-zA-Z]+/, max_count=20)
  enum Status of Text with ok as 'OK'  no as 'NO' end
end
"""


@pytest.fixture(scope="module")
def spec():
    return resolve(parse_spec(SPEC_SRC))


def field_type(spec, name):
    return next(f.type for f in spec.records["Wrap"].fields if f.name == name)


def test_integer_bounds(spec):
    t = field_type(spec, "n")
    assert check_value(IntVal(500), t, Env(), spec) is None
    assert "above maximum" in check_value(IntVal(501), t, Env(), spec)
    assert check_value(IntVal(-1), t, Env(), spec) is not None


def test_text_pattern_and_count():
    src = (
        "message module T "
        "message W with t is Tag as TerminatedText(terminator=' ') end "
        "type Tag is Text(charset='ascii', pattern=/[0-9a-zA-Z]+/, max_count=20) "
        "end"
    )
    wspec = resolve(parse_spec(src))
    tag_rtype = wspec.records["W"].fields[0].type
    assert check_value(TextVal("ABC12"), tag_rtype, Env(), wspec) is None
    assert check_value(TextVal(""), tag_rtype, Env(), wspec) is not None
    assert check_value(TextVal("a" * 21), tag_rtype, Env(), wspec) is not None
    assert check_value(TextVal("no spaces"), tag_rtype, Env(), wspec) is not None


def test_optional_exclusivity(spec):
    t = field_type(spec, "foot")
    present_env = env(hasfoot=BoolVal(True))
    absent_env = env(hasfoot=BoolVal(False))
    # guard true: the footer is required
    assert check_value(ABSENT, t, present_env, spec) is not None
    assert check_value(TextVal("hi"), t, present_env, spec) is None
    # guard false: the footer must be absent
    assert check_value(ABSENT, t, absent_env, spec) is None
    assert check_value(TextVal("hi"), t, absent_env, spec) is not None


def test_binary_bit_pattern(spec):
    t = field_type(spec, "pad")
    assert check_value(BitsVal(BitString.from_bits("00000001")), t, Env(), spec) is None
    assert check_value(BitsVal(BitString.from_bits("00000000")), t, Env(), spec) is not None
    assert check_value(BitsVal(BitString.from_bits("001")), t, Env(), spec) is not None


def test_list_elements_checked(spec):
    t = field_type(spec, "tags")
    good = ListVal((RecordVal("Item", (("v", IntVal(3)),)),))
    bad = ListVal((RecordVal("Item", (("v", IntVal(10)),)),))
    over = ListVal(tuple(RecordVal("Item", (("v", IntVal(1)),)) for _ in range(3)))
    assert check_value(good, t, Env(), spec) is None
    assert "element 0" in check_value(bad, t, Env(), spec)
    assert "max_length" in check_value(over, t, Env(), spec)


def test_enum_constants(spec):
    t = field_type(spec, "status")
    assert check_value(EnumVal("Status", "ok"), t, Env(spec.constants), spec) is None
    assert check_value(EnumVal("Status", "maybe"), t, Env(spec.constants), spec) is not None


def test_value_literals_roundtrip():
    v = RecordVal(
        "",
        (
            ("n", IntVal(7)),
            ("t", TextVal("hi there")),
            ("b", BitsVal(BitString.from_bits("0101"))),
            ("flag", BoolVal(True)),
            ("xs", ListVal((IntVal(1), IntVal(2)))),
            ("e", EnumVal("", "ok")),
            ("gone", ABSENT),
        ),
    )
    assert parse_value_text(format_value(v)) == v
