"""Differentiable fuzzy ALC: normalize an ontology, ground it, revise the grounding."""

from .crisp import (
    CrispConfig,
    CrispInterpretation,
    ThreeValued,
    brute_force_models,
    crisp_eval_axiom,
    crisp_eval_concept,
    crispify,
    success_rate,
)
from .errors import *  # noqa: F401,F403
from .grounding import Grounding, eval_concept, fuzzy_inclusion_check, fuzzy_success_rate
from .losses import GradientSet, hierarchical_loss, rule_loss
from .normalize import (
    Literal,
    NormalAxiom,
    NormalizedTBox,
    classify_form,
    normalize,
    seed_fresh_assertions,
    to_nnf,
)
from .parser import parse_concept, parse_ontology, render_concept, render_ontology
from .syntax import (
    BOTTOM,
    TOP,
    And,
    Bottom,
    ConceptAssertion,
    Equivalence,
    Exists,
    Forall,
    Inclusion,
    Name,
    Not,
    Ontology,
    Or,
    RoleAssertion,
    Signature,
    Top,
    signature_of,
)
from .train import AdamState, History, TrainConfig, adam_step, train

__version__ = "0.1.0"
