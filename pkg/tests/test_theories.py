import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monadlab import terms
from monadlab.terms import (
    App,
    NoProcedureError,
    OpSymbol,
    Var,
    decide_eq,
    normalize,
    parse_term,
    rewrite_steps,
)
from monadlab.theories import (
    BOOM_EXTENDED,
    BOOM_FULL,
    BOOM_ORIGINAL,
    BandProc,
    BoomFlags,
    PropertyId,
    PropertyStatus,
    TheoryEntry,
    abides_holds,
    boom_theory,
    check_property,
    exception_theory,
    load_theory_file,
    lookup_theory,
    narytree_theory,
    registry,
    ring_entry,
    theory_ids,
    validate_procedure_against_rewrites,
)


def pt(theory_id, text):
    return lookup_theory(theory_id).presentation.parse(text)


# ---------------------------------------------------------------------------
# registry shape


def test_registry_contents():
    ids = theory_ids()
    boom = [t for t in ids if t.startswith("boom:")]
    assert len(boom) == 16
    for expected in ("pointed", "exception:{a}", "exception:{a,b}", "abgroup",
                     "convex", "reader:2"):
        assert expected in ids
    assert "ring" not in ids  # available as an entry, deliberately unregistered


def test_aliases_resolve():
    assert lookup_theory("monoid").theory_id == "boom:UA--"
    assert lookup_theory("jsl").theory_id == "boom:UACI"
    assert lookup_theory("comm-monoid").theory_id == "boom:UAC-"
    assert lookup_theory("band").theory_id == "boom:-A-I"
    assert lookup_theory("L").theory_id == "boom:UA--"
    assert lookup_theory("P+").theory_id == "boom:-ACI"
    assert lookup_theory("T").label == "T"


def test_unknown_theory_suggests():
    with pytest.raises(KeyError) as err:
        lookup_theory("monoidd")
    assert "monoid" in str(err.value)


def test_exception_theories_on_demand():
    entry = lookup_theory("exception:{p,q,r}")
    assert entry.presentation.signature.constants == (
        OpSymbol("p", 0), OpSymbol("q", 0), OpSymbol("r", 0),
    )
    assert exception_theory(("q", "p", "r")) is entry  # sorted, deduped id


def test_boom_axioms_exactly_flagged():
    monoid = boom_theory(BoomFlags(True, True, False, False))
    assert [a.name for a in monoid.equations] == ["unitl", "unitr", "assoc"]
    magma = boom_theory(BoomFlags(False, False, False, False))
    assert magma.equations == ()
    assert not magma.signature.has("e")
    jsl = boom_theory(BoomFlags(True, True, True, True))
    assert [a.name for a in jsl.equations] == [
        "unitl", "unitr", "assoc", "comm", "idem",
    ]


def test_boom_label_orders():
    assert BOOM_ORIGINAL == ("T", "L", "M", "P")
    assert BOOM_EXTENDED == ("T", "I", "C", "CI", "L", "AI", "M", "P")
    assert len(BOOM_FULL) == 16 and BOOM_FULL[8:] == tuple(
        x + "+" for x in BOOM_EXTENDED
    )


# ---------------------------------------------------------------------------
# decision procedures


def test_monoid_procedure():
    tid = "boom:UA--"
    assert decide_eq(tid, pt(tid, "mul(mul(x,y),z)"), pt(tid, "mul(x,mul(y,z))"))
    assert decide_eq(tid, pt(tid, "mul(e,x)"), pt(tid, "x"))
    assert not decide_eq(tid, pt(tid, "mul(x,y)"), pt(tid, "mul(y,x)"))
    assert normalize(tid, pt(tid, "mul(mul(x,e),y)")) == pt(tid, "mul(x,y)")


def test_comm_monoid_procedure():
    tid = "boom:UAC-"
    assert decide_eq(tid, pt(tid, "mul(x,y)"), pt(tid, "mul(y,x)"))
    assert not decide_eq(tid, pt(tid, "mul(x,x)"), pt(tid, "x"))
    assert normalize(tid, pt(tid, "mul(y,mul(x,e))")) == pt(tid, "mul(x,y)")


def test_jsl_procedure():
    tid = "boom:UACI"
    assert decide_eq(tid, pt(tid, "mul(x,mul(y,x))"), pt(tid, "mul(y,x)"))
    assert decide_eq(tid, pt(tid, "mul(mul(x,x),e)"), pt(tid, "x"))
    assert not decide_eq(tid, pt(tid, "mul(x,y)"), pt(tid, "x"))
    assert normalize(tid, pt(tid, "mul(y,mul(x,y))")) == pt(tid, "mul(x,y)")


def test_tree_procedures():
    t = "boom:U---"
    assert decide_eq(t, pt(t, "mul(e,x)"), pt(t, "x"))
    assert not decide_eq(t, pt(t, "mul(mul(x,y),z)"), pt(t, "mul(x,mul(y,z))"))
    c = "boom:--C-"
    assert decide_eq(c, pt(c, "mul(x,y)"), pt(c, "mul(y,x)"))
    assert not decide_eq(c, pt(c, "mul(mul(x,y),z)"), pt(c, "mul(x,mul(y,z))"))
    i = "boom:---I"
    assert decide_eq(i, pt(i, "mul(mul(x,x),y)"), pt(i, "mul(x,y)"))
    assert not decide_eq(i, pt(i, "mul(x,y)"), pt(i, "mul(y,x)"))


def test_band_procedure_facts():
    tid = "boom:-A-I"
    # xyxyx = xyx is the classic collapse
    assert decide_eq(
        tid,
        pt(tid, "mul(x,mul(y,mul(x,mul(y,x))))"),
        pt(tid, "mul(x,mul(y,x))"),
    )
    assert decide_eq(tid, pt(tid, "mul(mul(x,y),mul(x,y))"), pt(tid, "mul(x,y)"))
    assert not decide_eq(tid, pt(tid, "mul(x,y)"), pt(tid, "mul(y,x)"))
    assert not decide_eq(tid, pt(tid, "mul(x,mul(y,x))"), pt(tid, "mul(x,y)"))
    with pytest.raises(NoProcedureError):
        normalize(tid, pt(tid, "mul(x,y)"))  # decide-only


def test_unital_band_unit():
    tid = "boom:UA-I"
    assert decide_eq(tid, pt(tid, "mul(e,mul(x,x))"), pt(tid, "x"))
    assert not decide_eq(tid, pt(tid, "mul(x,y)"), pt(tid, "e"))


def free_band_size(n):
    # oracle: sum over content sizes k of C(n,k) * prod_{i=1..k} (k-i+1)^(2^i)
    total = 0
    for k in range(1, n + 1):
        prod = 1
        for i in range(1, k + 1):
            prod *= (k - i + 1) ** (2**i)
        total += math.comb(n, k) * prod
    return total


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 6), (3, 159)])
def test_free_band_closure_matches_counting_oracle(n, expected):
    # oracle values frozen from the classical counting formula above
    assert free_band_size(n) == expected
    proc = BandProc()
    mul = OpSymbol("mul", 2)
    elems = {proc.var_key(f"g{i}") for i in range(n)}
    while True:
        fresh = {
            proc.app_key(mul, (a, b))
            for a in elems
            for b in elems
        } - elems
        if not fresh:
            break
        elems |= fresh
    assert len(elems) == expected


def test_abgroup_procedure():
    tid = "abgroup"
    assert decide_eq(tid, pt(tid, "mul(x,inv(x))"), pt(tid, "e"))
    assert decide_eq(tid, pt(tid, "inv(mul(x,y))"), pt(tid, "mul(inv(y),inv(x))"))
    assert decide_eq(tid, pt(tid, "inv(inv(x))"), pt(tid, "x"))
    assert not decide_eq(tid, pt(tid, "mul(x,x)"), pt(tid, "x"))
    assert normalize(tid, pt(tid, "mul(x,mul(x,inv(y)))")) == pt(
        tid, "mul(x,mul(x,inv(y)))"
    )
    assert normalize(tid, pt(tid, "mul(inv(x),x)")) == pt(tid, "e")


def test_convex_procedure():
    tid = "convex"
    assert decide_eq(
        tid,
        pt(tid, "mix(mix(a,b),mix(c,d))"),
        pt(tid, "mix(mix(a,c),mix(b,d))"),
    )
    # both sides weigh x at 5/8 and y at 3/8
    assert decide_eq(
        tid,
        pt(tid, "mix(x,mix(y,mix(y,x)))"),
        pt(tid, "mix(mix(x,y),mix(x,mix(x,y)))"),
    )
    assert not decide_eq(tid, pt(tid, "mix(x,mix(x,y))"), pt(tid, "mix(x,y)"))
    assert normalize(tid, pt(tid, "mix(x,x)")) == Var("x")
    two_one = normalize(tid, pt(tid, "mix(x,mix(x,mix(y,x)))"))
    proc = terms.procedure_for(tid)
    assert proc.term_key(two_one) == proc.term_key(pt(tid, "mix(x,mix(x,mix(y,x)))"))


def test_reader_procedure():
    tid = "reader:2"
    assert decide_eq(tid, pt(tid, "mul(x,mul(y,x))"), pt(tid, "x"))
    assert decide_eq(tid, pt(tid, "mul(mul(x,y),z)"), pt(tid, "mul(x,z)"))
    assert not decide_eq(tid, pt(tid, "mul(x,y)"), pt(tid, "mul(y,x)"))
    assert normalize(tid, pt(tid, "mul(x,mul(y,x))")) == Var("x")


def test_ring_entry_procedure():
    entry = ring_entry()
    pres = entry.presentation
    assert decide_eq(
        "ring",
        pres.parse("times(plus(x,y),z)"),
        pres.parse("plus(times(x,z),times(y,z))"),
    )
    assert decide_eq("ring", pres.parse("times(x,zero)"), pres.parse("zero"))
    assert not decide_eq("ring", pres.parse("one"), pres.parse("zero"))
    assert not decide_eq(
        "ring", pres.parse("times(x,y)"), pres.parse("times(y,x)")
    )
    assert normalize(
        "ring", pres.parse("times(plus(x,one),y)")
    ) == pres.parse("plus(times(x,y),y)")


def test_narytree_theory_units():
    entry = narytree_theory(3)
    pres = entry.presentation
    assert decide_eq(entry.theory_id, pres.parse("node(e,x,e)"), pres.parse("x"))
    assert decide_eq(entry.theory_id, pres.parse("node(e,e,e)"), pres.parse("e"))
    assert not decide_eq(
        entry.theory_id, pres.parse("node(x,y,e)"), pres.parse("node(x,e,y)")
    )
    # the derived binary is unital on both sides
    assert check_property(entry, PropertyId.S4A).status is PropertyStatus.HOLDS


# ---------------------------------------------------------------------------
# soundness: random one-step rewrites never change the procedure key


def _term_strategy(entry, var_names=("x", "y", "z"), max_leaves=8):
    sig = entry.presentation.signature
    atoms = [Var(v) for v in var_names] + [App(c, ()) for c in sig.constants]
    builders = [op for op in sig.ops if op.arity >= 1]

    def extend(inner):
        choices = [
            st.builds(
                lambda *args, op=op: App(op, tuple(args)), *([inner] * op.arity)
            )
            for op in builders
        ]
        return st.one_of(choices)

    return st.recursive(st.sampled_from(atoms), extend, max_leaves=max_leaves)


@pytest.mark.parametrize(
    "tid",
    ["boom:UA--", "boom:UACI", "boom:-A-I", "boom:U-CI", "boom:---I",
     "abgroup", "convex", "reader:2"],
)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_one_step_rewrites_preserve_keys(tid, data):
    entry = lookup_theory(tid)
    t = data.draw(_term_strategy(entry))
    pool = (Var("x"), Var("y"), Var("z")) + tuple(
        App(c, ()) for c in entry.presentation.signature.constants
    )
    for u in rewrite_steps(entry.presentation, t, pool)[:25]:
        assert decide_eq(tid, t, u), f"{u} should equal {t}"


# ---------------------------------------------------------------------------
# structural properties


def status_of(tid, prop, **kw):
    return check_property(lookup_theory(tid), prop, **kw).status


def test_monoid_property_row():
    ok = (PropertyStatus.HOLDS, PropertyStatus.HOLDS_BOUNDED)
    for prop in (PropertyId.S1, PropertyId.S2, PropertyId.S3, PropertyId.S4A,
                 PropertyId.T1, PropertyId.T2, PropertyId.T3, PropertyId.T4A,
                 PropertyId.T4B):
        assert status_of("monoid", prop) in ok, prop
    assert status_of("monoid", PropertyId.S4B) is PropertyStatus.FAILS


def test_jsl_property_row():
    ok = (PropertyStatus.HOLDS, PropertyStatus.HOLDS_BOUNDED)
    for prop in (PropertyId.S1, PropertyId.S2, PropertyId.S3, PropertyId.S4A,
                 PropertyId.S4B, PropertyId.T1, PropertyId.T2, PropertyId.T3,
                 PropertyId.T4A):
        assert status_of("jsl", prop) in ok, prop
    # the interchange law is provable, so "lacks abides" fails
    cert = check_property(lookup_theory("jsl"), PropertyId.T4B)
    assert cert.status is PropertyStatus.FAILS
    assert "provable" in cert.detail


def test_exception_property_row():
    tid = "exception:{a,b}"
    ok = (PropertyStatus.HOLDS, PropertyStatus.HOLDS_BOUNDED)
    for prop in (PropertyId.S1, PropertyId.S2, PropertyId.T1, PropertyId.T2,
                 PropertyId.T3):
        assert status_of(tid, prop) in ok, prop
    cert = check_property(lookup_theory(tid), PropertyId.S3)
    assert cert.status is PropertyStatus.HOLDS
    assert cert.method == "vacuous"
    for prop in (PropertyId.S4A, PropertyId.S4B, PropertyId.T4A, PropertyId.T4B):
        assert status_of(tid, prop) is PropertyStatus.FAILS, prop


def test_abgroup_fails_s3():
    cert = check_property(lookup_theory("abgroup"), PropertyId.S3)
    assert cert.status is PropertyStatus.FAILS
    assert "inv" in cert.detail


def test_pointed_properties():
    assert status_of("pointed", PropertyId.T3) is PropertyStatus.HOLDS
    assert status_of("pointed", PropertyId.T4A) is PropertyStatus.FAILS


def test_reader_fails_variable_purity():
    # a sandwich like mul(x1,mul(x2,x1)) collapses to x1 but mentions x2
    cert = check_property(lookup_theory("reader:2"), PropertyId.S2)
    assert cert.status is PropertyStatus.FAILS
    _, foreign = cert.witness
    assert terms.term_vars(foreign) - {"x1"}


def test_plotkin_side_properties():
    ok = (PropertyStatus.HOLDS, PropertyStatus.HOLDS_BOUNDED)
    for tid in ("boom:U-CI", "boom:UACI"):
        for prop in (PropertyId.P1, PropertyId.P2, PropertyId.P3):
            assert status_of(tid, prop) in ok, (tid, prop)
    # not commutative, so it cannot play the P side
    assert status_of("boom:U--I", PropertyId.P1) is PropertyStatus.FAILS
    for tid in ("boom:U--I", "boom:U-CI", "boom:UACI", "convex"):
        for prop in (PropertyId.V1, PropertyId.V2, PropertyId.V3):
            assert status_of(tid, prop) in ok, (tid, prop)
    # a monoid's binary is not idempotent, so it cannot play the V side
    assert status_of("monoid", PropertyId.V1) is PropertyStatus.FAILS


def test_ring_fails_closed_class_purity():
    # times(x, zero) sits in the class of zero, an open term equal to a
    # closed one
    entry = ring_entry()
    cert = check_property(entry, PropertyId.T1, depth=2, num_vars=2)
    assert cert.status is PropertyStatus.FAILS
    closed, open_member = cert.witness
    assert terms.term_vars(closed) == frozenset()
    assert terms.term_vars(open_member)


def test_abides_holds_matrix():
    assert abides_holds(lookup_theory("comm-monoid"))
    assert abides_holds(lookup_theory("jsl"))
    assert abides_holds(lookup_theory("boom:-AC-"))
    assert abides_holds(lookup_theory("boom:-ACI"))
    for label in ("T", "I", "L", "AI", "T+", "I+", "L+", "AI+"):
        assert not abides_holds(lookup_theory(label)), label
    for label in ("C", "CI", "C+", "CI+"):
        assert not abides_holds(lookup_theory(label)), label


def test_certificate_describe_strings():
    cert = check_property(lookup_theory("monoid"), PropertyId.T4B)
    assert cert.describe() == "Holds(analytic via decide_eq)"
    bounded = check_property(lookup_theory("monoid"), PropertyId.S1)
    assert bounded.describe().startswith("HoldsBounded(depth=3,vars=4)")


def test_certificates_cached():
    entry = lookup_theory("boom:--CI")
    a = check_property(entry, PropertyId.S1)
    b = check_property(entry, PropertyId.S1)
    assert a is b


# ---------------------------------------------------------------------------
# cross-validation of procedures against the axioms


@pytest.mark.parametrize(
    "tid",
    [
        "boom:U---", "boom:U--I", "boom:U-C-", "boom:U-CI",
        "boom:----", "boom:---I", "boom:--C-", "boom:--CI",
        "convex", "reader:2",
    ],
)
def test_procedures_match_rewrite_classes_three_vars(tid):
    report = validate_procedure_against_rewrites(
        lookup_theory(tid), depth=3, num_vars=3
    )
    assert report.ok, (report.soundness_violations[:3],
                       report.disconnected_classes[:3])
    assert report.term_count == 21612


def test_validation_catches_broken_procedure():
    flags = BoomFlags(False, False, False, False)
    pres = boom_theory(flags)

    class Wrong(terms.Procedure):
        def var_key(self, name):
            return name

        def app_key(self, op, child_keys):
            return tuple(sorted(child_keys, key=repr))  # pretends mul is comm

    entry = TheoryEntry("test:wrong-magma", pres, "wrong")
    terms.register_procedure("test:wrong-magma", Wrong())
    report = validate_procedure_against_rewrites(entry, depth=2, num_vars=2)
    assert not report.ok
    assert report.disconnected_classes  # mul(x,y) and mul(y,x) share a key


# ---------------------------------------------------------------------------
# loading theory definitions


def test_load_theory_file(tmp_path):
    path = tmp_path / "leftzero.json"
    path.write_text(json.dumps({
        "id": "test:leftzero",
        "ops": [["mul", 2]],
        "axioms": [["mul(x,y)", "x", "leftzero"]],
        "designated_binary": "mul(y1,y2)",
    }))
    entry = load_theory_file(str(path))
    assert lookup_theory("test:leftzero") is entry
    assert not entry.has_procedure
    # bounded fallback: the class of x1 contains mul(x1,x2)
    cert = check_property(entry, PropertyId.S2, depth=2, num_vars=2)
    assert cert.status is PropertyStatus.FAILS
    # mul(x,x) = x is a one-step consequence, provable within the bound
    v1 = check_property(entry, PropertyId.V1)
    assert v1.status is PropertyStatus.HOLDS_BOUNDED
    assert "eq_bounded" in v1.method
    # commutativity is false but bounded search cannot refute, so Unknown
    p1 = check_property(entry, PropertyId.P1)
    assert p1.status is PropertyStatus.UNKNOWN
