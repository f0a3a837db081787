"""Finite-model oracle: satisfiability, entailment, documented limits."""

from __future__ import annotations

from modalguard.models import entails, satisfiable
from modalguard.parser import parse_formula
from modalguard.prover import prove

import corpus

SIG = corpus.corpus_signature()


def F(text: str):
    return parse_formula(text, SIG)


def load(name: str):
    prob = next(p for p in corpus.PROBLEMS if p.name == name)
    return prob.load(SIG)


# ---------------------------------------------------------------------------
# satisfiability

def test_empty_theory_has_empty_model():
    assert satisfiable([], SIG) == []


def test_model_lists_true_atoms_sorted():
    model = satisfiable([F("(rains)"), F("(implies (rains) (pours))")], SIG)
    assert model == ["(pours)", "(rains)"]


def test_contradiction_unsat():
    assert satisfiable([F("(rains)"), F("(not (rains))")], SIG) is None


def test_falsum_is_pinned_false():
    assert satisfiable([F("(false)")], SIG) is None
    model = satisfiable([F("(or (rains) (false))")], SIG)
    assert model == ["(rains)"]


def test_grounding_universal_over_named_agents():
    model = satisfiable([F("(forall x : Agent (P x))")], SIG)
    assert model is not None
    for name in ("alice", "bob", "carol"):
        assert f"(P {name})" in model


def test_existential_needs_one_named_witness():
    model = satisfiable([F("(exists x : Agent (P x))")], SIG)
    assert model is not None
    assert any(a.startswith("(P ") for a in model)


# ---------------------------------------------------------------------------
# entailment

def test_entails_modus_ponens():
    fs, g = load("modus-ponens")
    ok, cm = entails(fs, g, SIG)
    assert ok and cm is None


def test_countermodel_on_failure():
    fs, g = load("belief-not-veridical")
    ok, cm = entails(fs, g, SIG)
    assert not ok
    assert cm is not None
    # belief is not veridical: the believed fact is absent from the model
    assert "(rains)" not in cm


def test_modal_closure_runs_inside_oracle():
    ok, _ = entails([F("(knows alice 1 (rains))")], F("(rains)"), SIG)
    assert ok


def test_universal_modal_fact_splits_into_instances():
    # grounding a universal yields a conjunction; the closure must still
    # reach inside it to apply the modal rules per instance
    fs, g = load("forall-knows")
    ok, _ = entails(fs, g, SIG)
    assert ok
    fs, g = load("forall-knows-instance")
    ok, _ = entails(fs, g, SIG)
    assert ok


def test_depth_limits_modal_closure():
    fs, g = load("k-nested")
    assert entails(fs, g, SIG, depth=1)[0] is False
    assert entails(fs, g, SIG, depth=2)[0] is True


# ---------------------------------------------------------------------------
# documented limits, pinned so a change shows up as a test failure

def test_limit_universal_goal_over_finite_domain():
    # the oracle grounds the goal over named agents and accepts; the prover
    # must not, because unnamed agents could falsify it
    fs, g = load("forall-goal-finite")
    assert entails(fs, g, SIG)[0] is True
    assert prove(fs, g, sig=SIG).status == "no_proof"


def test_limit_disjunction_of_modal_atoms():
    # a grounded existential of epistemic facts becomes a disjunction of
    # shadow atoms; the oracle cannot case-split knowers, the prover can
    fs, g = load("exists-knows")
    assert entails(fs, g, SIG)[0] is False
    assert prove(fs, g, sig=SIG).status == "proof"
