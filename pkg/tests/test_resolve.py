import pytest

from wirespec.errors import (
    CyclicDependency,
    DuplicateName,
    ForwardReference,
    ResolutionError,
    UnknownName,
)
from wirespec.resolve import resolve
from wirespec.syntax import parse_spec
from wirespec.values import dependency_order


def rs(body, interactions=""):
    source = f"message module M {body} end"
    if interactions:
        source += f" interactions module M {interactions} end"
    return resolve(parse_spec(source))


IDENTIFIER_DEFS = """
type Identifier is Text(charset='ascii', pattern=/[!-~]+/,
                        exclude_pattern=/ |\\r\\n|\\*/, max_count=20)
type Tag is Identifier(pattern=/[0-9a-zA-Z]+/)
codec SpaceTerminated is TerminatedText(encoding='ascii', terminator=' ')
"""


def test_alias_layering_overrides_pattern():
    spec = rs(
        IDENTIFIER_DEFS
        + "message T with t is Tag as SpaceTerminated end"
    )
    rtype = spec.records["T"].fields[0].type
    assert rtype.base == "Text"
    assert rtype.args["charset"] == "ascii"
    assert rtype.args["max_count"].value == 20
    assert rtype.args["pattern"].source == "[0-9a-zA-Z]+"  # overridden by Tag
    assert rtype.args["exclude_pattern"].source == " |\\r\\n|\\*"  # kept from Identifier


def test_codec_alias_expansion():
    spec = rs(IDENTIFIER_DEFS + "message T with t is Tag as SpaceTerminated end")
    codec = spec.records["T"].fields[0].codec
    assert codec.base == "TerminatedText"
    assert codec.args["terminator"] == " "


def test_dependency_edges_and_order():
    spec = rs(
        """
        record DataItem with
          n is Integer(min=0, max=500) as BigEndian(signed=false, length=32)
          data is Binary(length=8*n)
          padding is Binary(length=8*((4 - n%4)%4), char8_pattern=/(\\0*\\1)?/)
        end
        """
    )
    record = spec.records["DataItem"]
    assert dependency_order(record) == ["n", "data", "padding"]
    assert record.fields[1].deps == ("n",)
    assert record.fields[0].deps == ()


def test_declaration_order_preserved_for_independent_fields():
    spec = rs(
        """
        record R with
          a is Integer as BigEndian(length=8)
          b is Integer as BigEndian(length=8)
          c is Integer as BigEndian(length=8)
        end
        """
    )
    assert dependency_order(spec.records["R"]) == ["a", "b", "c"]


def test_forward_reference_rejected():
    with pytest.raises(ForwardReference):
        rs(
            """
            record R with
              a is Binary(length=8*b)
              b is Integer as BigEndian(length=8)
            end
            """
        )


def test_self_reference_is_a_cycle():
    with pytest.raises(CyclicDependency):
        rs("record R with a is Binary(length=8*a) end")


def test_alias_cycle_detected():
    with pytest.raises(CyclicDependency):
        rs("type A is B type B is A message X with f is A as SpaceTerminated end"
           " codec SpaceTerminated is TerminatedText(terminator=' ')")


def test_unknown_names():
    with pytest.raises(UnknownName):
        rs("message X with f is Mystery end")
    with pytest.raises(UnknownName):
        rs("record R with a is Binary(length=8*nope) end")
    with pytest.raises(UnknownName):
        rs("record R with a is Integer(bogus_arg=1) as BigEndian(length=8) end")


def test_duplicates_rejected():
    with pytest.raises(DuplicateName):
        rs("message X end message X end")
    with pytest.raises(DuplicateName):
        rs("record R with a is Bool as BoolBits(truth_string=b'1', falsehood_string=b'0')"
           " a is Bool as BoolBits(truth_string=b'1', falsehood_string=b'0') end")


def test_codec_required_for_coded_types():
    with pytest.raises(ResolutionError):
        rs("message X with n is Integer end")


def test_boolbits_strings_must_differ():
    with pytest.raises(ResolutionError):
        rs("message X with b is Bool as BoolBits(truth_string=b'1', falsehood_string=b'1') end")


def test_record_instantiation_arg_must_name_param_or_field():
    with pytest.raises(UnknownName):
        rs(
            """
            record H with flag is Integer as BigEndian(length=2) end
            message A with h is H(nope=1) end
            """
        )


def test_field_pin_merges_value_constraint():
    spec = rs(
        """
        record H with flag is Integer as BigEndian(length=2) end
        message A with h is H(flag=1) end
        """
    )
    h = spec.records["A"].fields[0]
    assert h.type.base == "Record" and h.type.record == "H"
    assert "flag" in h.type.args


# --- actor compilation -----------------------------------------------------------

MYP_INTERACTIONS = """
actor Client with
  init state Starting where anytime do send Ask next Waiting or do quit end
  state Waiting where on Data do send Ask continue
                            or do send Done next Starting end
end
actor Server with
  init state Serving where on Ask do send Data continue
                           on Done do continue end
end
"""

MYP_MESSAGES = """
message Ask with h is Header(flag=1) end
message Done with h is Header(flag=3) end
message Data with h is Header(flag=0) end
record Header with
  flag is Integer as BigEndian(signed=false, length=2)
  reserved is Binary(value=b'000000')
end
"""


@pytest.fixture(scope="module")
def myp():
    return rs(MYP_MESSAGES, MYP_INTERACTIONS)


def edge_set(lts):
    return {(e.src, e.label, e.dst) for e in lts.edges}


def test_server_compiles_to_three_edges(myp):
    server = myp.actors["Server"]
    assert set(server.states) == {"Serving", "u1", "Quit"}
    assert edge_set(server) == {
        ("Serving", ("?", "Ask"), "u1"),
        ("u1", ("!", "Data"), "Serving"),
        ("Serving", ("?", "Done"), "Serving"),
    }


def test_client_compiles_with_shared_receive_state(myp):
    client = myp.actors["Client"]
    assert edge_set(client) == {
        ("Starting", ("!", "Ask"), "Waiting"),
        ("Starting", ("quit", None), "Quit"),
        ("Waiting", ("?", "Data"), "u1"),
        ("u1", ("!", "Ask"), "Waiting"),
        ("u1", ("!", "Done"), "Starting"),
    }


def test_edge_count_matches_sends_ons_and_quits(myp):
    # client: 3 sends + 1 on + 1 quit; server: 1 send + 2 on
    assert len(myp.actors["Client"].edges) == 5
    assert len(myp.actors["Server"].edges) == 3


def test_empty_actor():
    spec = rs(MYP_MESSAGES, "actor A with init state S where end end")
    lts = spec.actors["A"]
    assert lts.edges == []
    assert lts.states == ["S", "Quit"]


def test_next_target_must_exist():
    with pytest.raises(UnknownName):
        rs(MYP_MESSAGES, "actor A with init state S where anytime do send Ask next Missing end end")


def test_message_types_must_exist():
    with pytest.raises(UnknownName):
        rs(MYP_MESSAGES, "actor A with init state S where on Nope do continue end end")


def test_exactly_one_init_state():
    with pytest.raises(ResolutionError):
        rs(MYP_MESSAGES, "actor A with state S where end end")


def test_bare_alternative_becomes_tau_edge():
    spec = rs(
        MYP_MESSAGES,
        """
        actor A with
          init state S where on Ask do next T or do send Done continue end
          state T where end
        end
        """,
    )
    lts = spec.actors["A"]
    assert ("u1", ("tau", None), "T") in edge_set(lts)
    assert ("S", ("?", "Ask"), "u1") in edge_set(lts)


def test_resolve_is_idempotent_on_ast():
    ast = parse_spec(f"message module M {MYP_MESSAGES} end")
    a = resolve(ast)
    b = resolve(ast)
    assert a.message_types == b.message_types
    assert {n: [f.name for f in r.fields] for n, r in a.records.items()} == {
        n: [f.name for f in r.fields] for n, r in b.records.items()
    }
