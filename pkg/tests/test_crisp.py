import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfalc import (
    ConceptAssertion,
    CrispConfig,
    Grounding,
    Inclusion,
    Ontology,
    Signature,
    ThreeValued,
    brute_force_models,
    crisp_eval_axiom,
    crisp_eval_concept,
    crispify,
    eval_concept,
    parse_ontology,
    success_rate,
)
from dfalc.crisp import classical_eval, decode, encode, model_codes, threshold
from dfalc.errors import EmptyTBox, TooLarge
from dfalc.parser import parse_concept as P
from dfalc.syntax import BOTTOM, TOP, Name, Not, RoleAssertion

from conftest import concepts, groundings
from entailment import crisp_entails, fuzzy_entails

T, U, F = ThreeValued.TRUE, ThreeValued.UNKNOWN, ThreeValued.FALSE


@pytest.mark.parametrize(
    "n, alpha, expected",
    [
        (0.9, 0.8, T),
        (0.1, 0.8, F),
        (0.5, 0.5, U),
        (0.5, 0.8, U),
        (0.5, 1.0, U),
        (0.8, 0.8, U),
        (0.2, 0.8, U),
        (0.7, 0.7, U),
        (0.3, 0.7, U),
        (0.50001, 0.5, T),
        (0.49999, 0.5, F),
        (1.0, 1.0, U),
        (0.0, 1.0, U),
    ],
)
def test_threshold_branches(n, alpha, expected):
    assert threshold(n, alpha) == expected


@given(st.floats(0, 1), st.floats(0.5, 1))
def test_threshold_matches_definition(n, alpha):
    want = T if n > alpha else F if 1 - n > alpha else U
    assert threshold(n, alpha) == want
    assert threshold(1 - n, alpha) == {T: F, F: T, U: U}[want]


def test_crisp_config_range():
    CrispConfig(0.5), CrispConfig(1.0)
    for bad in (0.49, 1.01):
        with pytest.raises(ValueError):
            CrispConfig(bad)


def test_crispify_applies_to_roles(ex1):
    ci = crispify(ex1, CrispConfig(0.8))
    assert ci.concept("B").tolist() == [T, F]
    assert ci.role("r").tolist() == [[F, T], [F, F]]


def _ci(concepts, roles=None):
    g = Grounding.from_tables(["a", "b"], concepts, roles or {})
    return crispify(g, 0.5)


def test_axiom_true_when_all_memberships_true():
    ci = _ci({"C": [1, 1], "D": [1, 1]})
    assert crisp_eval_axiom(ci, Inclusion(P("C"), P("D"))) == T


def test_axiom_false_on_definite_counterexample():
    ci = _ci({"C": [1, 0], "D": [0, 0]})
    assert crisp_eval_axiom(ci, Inclusion(P("C"), P("D"))) == F


def test_axiom_unknown_when_completion_decides():
    ci = _ci({"C": [1, 0], "D": [0.5, 0]})
    ax = Inclusion(P("C"), P("D"))
    assert crisp_eval_axiom(ci, ax) == U
    # both completions of the unknown entry disagree
    outcomes = {crisp_eval_axiom(_ci({"C": [1, 0], "D": [d, 0]}), ax) for d in (0, 1)}
    assert outcomes == {T, F}


def test_equivalence_takes_the_worse_half():
    ci = _ci({"C": [1, 0], "D": [1, 1]})
    assert crisp_eval_axiom(ci, parse_ontology("axiom C EquivalentTo D").tbox[0]) == F
    assert crisp_eval_axiom(ci, Inclusion(P("C"), P("D"))) == T


def _completions(ci):
    """Every classical completion of the unknown entries of ci, as 0/1 groundings."""
    flat = np.concatenate([ci.concepts.ravel(), ci.roles.ravel()])
    unknown = np.flatnonzero(flat == U)
    base = (flat == T).astype(float)
    nc = ci.concepts.size
    for bits in itertools.product((0.0, 1.0), repeat=len(unknown)):
        vals = base.copy()
        vals[unknown] = bits
        yield Grounding(ci.signature, vals[:nc], vals[nc:])


@given(concepts(max_depth=3, roles=("r",)), groundings(max_n=2, roles=("r",), grid=True))
def test_kleene_values_are_sound_for_completions(c, g):
    """A definite three-valued verdict agrees with every classical completion."""
    ci = crispify(g, 0.5)
    if np.count_nonzero(ci.concepts == U) + np.count_nonzero(ci.roles == U) > 8:
        return
    verdict = crisp_eval_concept(ci, c)
    for full in _completions(ci):
        truth = eval_concept(full, c)
        assert np.all(truth[verdict == T] == 1.0)
        assert np.all(truth[verdict == F] == 0.0)


@given(concepts(max_depth=3), groundings(max_n=4, grid=True))
def test_kleene_on_crisp_input_is_classical(c, g):
    g = g.replace(np.round(g.concepts), np.round(g.roles))
    ci = crispify(g, 0.5)
    got = crisp_eval_concept(ci, c)
    assert set(got.tolist()) <= {T, F}
    assert np.array_equal(got == T, eval_concept(g, c) == 1.0)


def test_success_rate_counts_definite_violations():
    ci = _ci({"A": [1, 0], "B": [0, 0], "C": [1, 1], "D": [0.5, 0.5]})
    tbox = [Inclusion(P(l), P(r)) for l, r in (("A", "C"), ("B", "A"), ("A", "B"), ("C", "D"))]
    assert success_rate(ci, tbox) == 75.0
    assert success_rate(ci, tbox, policy="unknown-fails") == 50.0
    with pytest.raises(ValueError):
        success_rate(ci, tbox, policy="maybe")
    with pytest.raises(EmptyTBox):
        success_rate(ci, [])


def test_brute_force_identity():
    o = parse_ontology("axiom C SubClassOf C")
    assert len(brute_force_models(o.signature, o, 1)) == 2


@pytest.mark.parametrize("d", [1, 2, 3])
def test_brute_force_contradiction(d):
    o = Ontology((Inclusion(P("C"), BOTTOM), Inclusion(TOP, P("C"))))
    assert brute_force_models(o.signature, o, d) == []


def test_brute_force_excludes_only_the_counterexample():
    o = parse_ontology("axiom A SubClassOf B")
    models = brute_force_models(o.signature, o, 1)
    got = sorted((m.concept("A")[0], m.concept("B")[0]) for m in models)
    assert got == [(0, 0), (0, 1), (1, 1)]


def test_brute_force_respects_abox():
    o = parse_ontology("axiom A SubClassOf B\nassert A(a)\nassert r(a, b) = 0")
    models = brute_force_models(o.signature, o, 2)
    assert models and all(m.concept("B")[0] == 1.0 and m.role("r")[0, 1] == 0.0 for m in models)
    # b takes any of the 3 classical models of A SubClassOf B; 3 role entries are free
    assert len(models) == 3 * 8


def test_brute_force_limit():
    sig = Signature(("A", "B", "C"), ("r", "s"), ())
    with pytest.raises(TooLarge):
        model_codes(sig, (), 3)  # 9 + 18 bits
    assert len(model_codes(sig, (), 2)) == 2 ** (3 * 2 + 2 * 4)


@given(concepts(max_depth=3, names=("A", "B"), roles=("r",)), st.integers(0, 2**15 - 1))
def test_classical_eval_agrees_with_fuzzy_on_crisp_values(c, code):
    sig = Signature(("A", "B"), ("r",), ("x", "y", "z"))
    cs, rs = decode(sig, 3, np.array([code], dtype=np.int64))
    assert encode(cs, rs)[0] == code
    g = Grounding(sig, cs[0].astype(float), rs[0].astype(float))
    assert np.array_equal(classical_eval(c, sig, cs, rs)[0], eval_concept(g, c) == 1.0)


# consistency of fuzzy and crisp entailment

SIG = Signature(("A", "B"), ("r",), ("a", "b"))
_lit = st.sampled_from([Name("A"), Name("B"), Not(Name("A")), Not(Name("B"))])
_any = concepts(max_depth=2, names=("A", "B"), roles=("r",))
_degree = st.sampled_from([0.0, 0.2, 0.5, 0.8, 1.0])


def _assertions(concept_strategy):
    return st.one_of(
        st.builds(ConceptAssertion, st.sampled_from(SIG.individuals), concept_strategy, _degree),
        st.builds(RoleAssertion, st.sampled_from(SIG.individuals), st.sampled_from(SIG.individuals), st.just("r"), _degree),
    )


@given(
    st.lists(st.builds(Inclusion, _any, _any), max_size=2),
    st.lists(_assertions(_lit), max_size=3),
    st.builds(ConceptAssertion, st.sampled_from(SIG.individuals), _any, st.sampled_from([0.0, 1.0])),
)
def test_fuzzy_entailment_implies_crisp_entailment(tbox, abox, query):
    o = Ontology(tuple(tbox), tuple(abox), SIG)
    if fuzzy_entails(o, query):
        assert crisp_entails(o, query)


_horn_lhs = st.sampled_from([P("A"), P("B"), P("A and B"), P("some r . A"), P("some r . B")])
_horn_rhs = st.sampled_from([P("A"), P("B"), P("A and B"), P("only r . A"), P("only r . B")])


@given(
    st.lists(st.builds(Inclusion, _horn_lhs, _horn_rhs), max_size=3),
    st.lists(
        st.one_of(
            st.builds(ConceptAssertion, st.sampled_from(SIG.individuals), st.sampled_from([Name("A"), Name("B")])),
            st.builds(RoleAssertion, st.sampled_from(SIG.individuals), st.sampled_from(SIG.individuals), st.just("r")),
        ),
        max_size=3,
    ),
    st.builds(ConceptAssertion, st.sampled_from(SIG.individuals), st.sampled_from([Name("A"), Name("B")])),
)
def test_crisp_entailment_implies_fuzzy_entailment_for_horn_ontologies(tbox, abox, query):
    o = Ontology(tuple(tbox), tuple(abox), SIG)
    assert crisp_entails(o, query) == fuzzy_entails(o, query)


def test_crisp_entailment_by_cases_is_not_fuzzy():
    # B follows classically by case analysis on A, but A = B = 0.5 is a fuzzy model
    o = Ontology((Inclusion(P("A"), P("B")), Inclusion(P("not A"), P("B"))), (), Signature(("A", "B"), (), ("a",)))
    query = ConceptAssertion("a", P("B"))
    assert crisp_entails(o, query)
    assert not fuzzy_entails(o, query)


def test_entailment_examples():
    o = Ontology(
        (Inclusion(P("some r . A"), P("B")),),
        (RoleAssertion("a", "b", "r"), ConceptAssertion("b", P("A"))),
        SIG,
    )
    q = ConceptAssertion("a", P("B"))
    assert crisp_entails(o, q) and fuzzy_entails(o, q)
    q = ConceptAssertion("b", P("B"))
    assert not crisp_entails(o, q) and not fuzzy_entails(o, q)
