import json

import numpy as np
import pytest
from hypothesis import given

from dfalc import Grounding, Signature, eval_concept, fuzzy_inclusion_check, fuzzy_success_rate, parse_ontology
from dfalc.errors import EmptyTBox, GroundingFormatError, ShapeMismatch, UnknownName
from dfalc.parser import parse_concept as P
from dfalc.syntax import And, Bottom, Exists, Forall, Name, Not, Or, Top

from conftest import concepts, groundings


def test_example_1_values(ex1):
    assert eval_concept(ex1, P("only r . A")).tolist() == pytest.approx([0.1, 1.0], abs=1e-15)
    assert eval_concept(ex1, P("some r . A")).tolist() == [0.0, 0.0]


def test_example_2_value(ex2):
    assert eval_concept(ex2, P("some r . A")).tolist() == [0.9, 0.0]


def test_universal_with_empty_role_is_one(ex3):
    # an all-zero role makes every universal restriction vacuously true
    assert eval_concept(ex3, P("only r . A")).tolist() == [1.0, 1.0]
    assert eval_concept(ex3, P("some r . A")).tolist() == [0.0, 0.0]


def test_inclusion_examples(ex1, ex2):
    ok, v = fuzzy_inclusion_check(ex1, P("some r . A"), P("B"))
    assert ok and v.tolist() == [0.0, 0.0]
    ok, v = fuzzy_inclusion_check(ex2, P("some r . A"), P("B"))
    assert not ok and v.tolist() == [0.9, 0.0]


@given(concepts(max_depth=3), groundings())
def test_inclusion_is_reflexive(c, g):
    ok, v = fuzzy_inclusion_check(g, c, c)
    assert ok and not v.any()


def test_unknown_name(ex1):
    with pytest.raises(UnknownName):
        eval_concept(ex1, P("Z"))
    with pytest.raises(UnknownName):
        eval_concept(ex1, P("some q . A"))


def _naive(g, c, a):
    """Pointwise Gödel value by direct recursion over individuals."""
    n = g.n_individuals
    if isinstance(c, Name):
        return g.concept(c.name)[a]
    if isinstance(c, Top):
        return 1.0
    if isinstance(c, Bottom):
        return 0.0
    if isinstance(c, Not):
        return 1.0 - _naive(g, c.arg, a)
    if isinstance(c, And):
        return min(_naive(g, c.left, a), _naive(g, c.right, a))
    if isinstance(c, Or):
        return max(_naive(g, c.left, a), _naive(g, c.right, a))
    r = g.role(c.role)
    if isinstance(c, Exists):
        return max((min(r[a, b], _naive(g, c.filler, b)) for b in range(n)), default=0.0)
    return min((max(1.0 - r[a, b], _naive(g, c.filler, b)) for b in range(n)), default=1.0)


@given(concepts(max_depth=3), groundings(max_n=4))
def test_matches_pointwise_recursion(c, g):
    got = eval_concept(g, c)
    assert np.array_equal(got, [_naive(g, c, a) for a in range(g.n_individuals)])


def _classical(g, c, a):
    """Set-based classical semantics on a 0/1 grounding."""
    n = g.n_individuals
    if isinstance(c, Name):
        return g.concept(c.name)[a] == 1.0
    if isinstance(c, Top):
        return True
    if isinstance(c, Bottom):
        return False
    if isinstance(c, Not):
        return not _classical(g, c.arg, a)
    if isinstance(c, And):
        return _classical(g, c.left, a) and _classical(g, c.right, a)
    if isinstance(c, Or):
        return _classical(g, c.left, a) or _classical(g, c.right, a)
    succ = [b for b in range(n) if g.role(c.role)[a, b] == 1.0]
    if isinstance(c, Exists):
        return any(_classical(g, c.filler, b) for b in succ)
    return all(_classical(g, c.filler, b) for b in succ)


@given(concepts(max_depth=3), groundings(max_n=4, grid=True))
def test_crisp_groundings_follow_classical_semantics(c, g):
    g = g.replace(np.round(g.concepts), np.round(g.roles))
    expected = [1.0 if _classical(g, c, a) else 0.0 for a in range(g.n_individuals)]
    assert eval_concept(g, c).tolist() == expected


# algebraic properties of Gödel semantics

C, D, E = P("A"), P("B"), P("C")
IDENTITIES = [
    (And(C, C), C),
    (Or(C, C), C),
    (Not(Not(C)), C),
    (Not(And(C, D)), Or(Not(C), Not(D))),
    (Not(Or(C, D)), And(Not(C), Not(D))),
    (And(C, Or(D, E)), Or(And(C, D), And(C, E))),
    (Or(C, And(D, E)), And(Or(C, D), Or(C, E))),
    (Forall("r", C), Not(Exists("r", Not(C)))),
]


@pytest.mark.parametrize("lhs, rhs", IDENTITIES, ids=[str(i) for i in range(len(IDENTITIES))])
@given(g=groundings(max_n=8))
def test_identities(lhs, rhs, g):
    np.testing.assert_allclose(eval_concept(g, lhs), eval_concept(g, rhs), rtol=0, atol=1e-12)


@given(c=concepts(max_depth=2), g=groundings(max_n=8))
def test_excluded_middle_bounds(c, g):
    assert np.all(eval_concept(g, Or(c, Not(c))) >= 0.5)
    assert np.all(eval_concept(g, And(c, Not(c))) <= 0.5)


def test_excluded_middle_is_not_an_identity():
    g = Grounding.from_tables(["a"], {"A": [0.3]})
    assert eval_concept(g, Or(C, Not(C)))[0] == pytest.approx(0.7)
    assert eval_concept(g, And(C, Not(C)))[0] == pytest.approx(0.3)


# construction and files


def test_range_is_validated():
    with pytest.raises(GroundingFormatError):
        Grounding.from_tables(["a"], {"A": [1.2]})
    with pytest.raises(GroundingFormatError):
        Grounding.from_tables(["a"], {"A": [float("nan")]})


def test_groundings_are_read_only(ex1):
    with pytest.raises(ValueError):
        ex1.concepts[0, 0] = 1.0


def test_with_concept(ex1):
    g = ex1.with_concept("A", [1.0, 0.5])
    assert g.concept("A").tolist() == [1.0, 0.5] and ex1.concept("A").tolist() == [0.0, 0.0]
    g = ex1.with_concept("X", [0.2, 0.3])
    assert g.signature.concepts == ("A", "B", "X")
    with pytest.raises(ShapeMismatch):
        ex1.with_concept("X", [0.2])


def test_reindex_restricts(ex1):
    sig = Signature(("B",), ("r",), ("s2", "s1"))
    g = ex1.reindex(sig)
    assert g.concept("B").tolist() == [0.0, 0.9]
    assert g.role("r").tolist() == [[0.0, 0.0], [0.9, 0.0]]
    with pytest.raises(UnknownName):
        ex1.reindex(Signature(("Z",)))


def test_from_abox():
    o = parse_ontology("assert A(s1) = 0.25\nassert r(s1, s2)\nassert (not B)(s2) = 1")
    g = Grounding.from_abox(o, fill=0.5)
    assert g.concept("A").tolist() == [0.25, 0.5]
    assert g.concept("B").tolist() == [0.5, 0.5]  # compound assertion ignored
    assert g.role("r").tolist() == [[0.5, 1.0], [0.5, 0.5]]


@given(groundings(max_n=4))
def test_json_round_trip_is_exact(g):
    back = Grounding.loads(g.dumps())
    assert back.allclose(g, atol=0.0)


def test_json_layout(ex1, tmp_path):
    data = json.loads(ex1.dumps())
    assert data == {
        "individuals": ["s1", "s2"],
        "concepts": {"A": [0.0, 0.0], "B": [0.9, 0.0]},
        "roles": {"r": [[0.0, 0.9], [0.0, 0.0]]},
    }
    path = tmp_path / "g.json"
    ex1.save(path)
    assert Grounding.load(path).allclose(ex1)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"concepts": {}}',
        '{"individuals": ["a"], "concepts": {"A": [0.1, 0.2]}}',
        '{"individuals": ["a", "b"], "roles": {"r": [0.1, 0.2]}}',
        '{"individuals": ["a"], "concepts": {"A": [2.0]}}',
    ],
)
def test_json_format_errors(text):
    with pytest.raises(GroundingFormatError):
        Grounding.loads(text)


def test_fuzzy_success_rate(ex2):
    tbox = parse_ontology("axiom some r . A SubClassOf B\naxiom B SubClassOf B").tbox
    assert fuzzy_success_rate(ex2, tbox) == 50.0
    with pytest.raises(EmptyTBox):
        fuzzy_success_rate(ex2, ())
