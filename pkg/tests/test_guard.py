"""Adjudication: verdicts, prevention ablations, queries, fail-safes."""

from __future__ import annotations

import dataclasses

import pytest

from modalguard.guard import (
    ALLOW,
    LOCK,
    InconsistentTheory,
    adjudicate,
    adjudication_theory,
    base_theory,
    epistemic_query,
    intention_query,
    obligation_goal,
    prevents_holds,
)
from modalguard.proofs import verify_proof
from modalguard.prover import Budget
from modalguard.scenario import load_bundled_scenario, parse_scenario
from modalguard.syntax import (
    App,
    Atom,
    Const,
    Not,
    moment,
    print_formula,
)

SIM1 = load_bundled_scenario("sim1")
SIM2 = load_bundled_scenario("sim2")

SHOOTER = Const("shooter", "Agent")
VICTIM = Const("victim", "Agent")
G_LIVE = Const("g_live", "Goal")
FIRE = Const("fire", "ActionType")
RANGER1 = Const("ranger1", "Agent")
SHOOT = Const("shoot", "ActionType")


def drop_facts(sc, *fragments):
    keep = [f for f in sc.facts
            if not any(fr in print_formula(f) for fr in fragments)]
    assert len(keep) < len(sc.facts), f"nothing matched {fragments}"
    return dataclasses.replace(sc, facts=keep)


# ---------------------------------------------------------------------------
# verdicts

def test_sim1_locks_with_verified_obligation():
    v = adjudicate(SIM1)
    assert v.decision == LOCK
    assert v.prove_status == "proof"
    assert v.proof_verified is True
    assumptions, _ = adjudication_theory(SIM1)
    assert verify_proof(v.proof, assumptions, v.obligation, SIM1.sig)
    assert v.dde is not None and not v.dde.compliant
    failing = {k for k, c in v.dde.clauses.items() if c.status == "fail"}
    assert failing == {"C1", "C2", "C3"}
    assert v.dde.clauses["C4"].status == "pass"
    assert "C1, C2, C3" in v.reason


def test_sim2_allows_with_full_compliance():
    v = adjudicate(SIM2)
    assert v.decision == ALLOW
    assert v.prove_status == "proof"
    assert v.proof_verified is True
    assert v.dde is not None and v.dde.compliant
    assert all(c.status == "pass" for c in v.dde.clauses.values())
    assert v.dde.net_utility == 3
    assert "overridden" in v.reason


def test_obligation_goal_shape():
    g = obligation_goal(SIM1)
    assert print_formula(g) == (
        "(obligated shooter 1 sigma_default"
        " (not (happens (action shooter fire) 1)))"
    )


def test_clause_starved_adjudication_fails_safe():
    v = adjudicate(SIM1, Budget(max_clauses=1))
    assert v.decision == LOCK
    assert v.prove_status == "timeout"
    assert "failing safe" in v.reason
    assert v.proof is None


# ---------------------------------------------------------------------------
# theories

def test_base_theory_carries_no_norms():
    assumptions, trace = base_theory(SIM1)
    assert all("obligated" not in print_formula(f) for f in assumptions)
    # trace atoms cover states and the request occurrence
    assert any(print_formula(f) == "(holds (alive victim) 0)" for f in assumptions)
    assert any(
        print_formula(f) == "(happens (action shooter fire) 1)"
        for f in assumptions
    )
    assert not trace.holds(App("alive", (VICTIM,), "Fluent"), 2)


def test_adjudication_theory_adds_rule_and_bridges():
    base, _ = base_theory(SIM1)
    adj, _ = adjudication_theory(SIM1)
    extra = [print_formula(f) for f in adj[len(base):]]
    # one deprivation rule plus one bridge per other agent and goal
    assert len(extra) == 3
    assert sum("obligated" in t for t in extra) == 1
    assert sum("(Prevents shooter" in t for t in extra) == 2


# ---------------------------------------------------------------------------
# the prevention condition and its ablations

def test_prevention_holds_on_sim1():
    r = prevents_holds(SIM1, SHOOTER, VICTIM, G_LIVE, FIRE, 1)
    assert r.answer == "yes"
    assert r.proof is not None


ABLATIONS = {
    "first-ordering-fact": lambda: drop_facts(SIM1, "(prior 1 2)"),
    "second-ordering-fact": lambda: drop_facts(SIM1, "(prior 2 3)"),
    "victim-attitudes": lambda: drop_facts(
        SIM1, "(desires victim", "(intends victim"),
    "nested-knowledge": lambda: drop_facts(SIM1, "(knows ai 1"),
    "blocking-knowledge": lambda: drop_facts(SIM1, "(Block shooter"),
    "occurrence": lambda: dataclasses.replace(
        SIM1,
        theory=SIM1.theory.without(
            App("action", (SHOOTER, FIRE), "Action"), 1
        ),
    ),
}


@pytest.mark.parametrize("name", sorted(ABLATIONS))
def test_prevention_ablation_refuted(name):
    sc = ABLATIONS[name]()
    r = prevents_holds(sc, SHOOTER, VICTIM, G_LIVE, FIRE, 1)
    assert r.answer == "no"
    assert r.countermodel is not None


def test_prevention_positive_on_sim2():
    # the defensive shot still meets the prevention condition; that is
    # exactly why an obligation arises before the override weighs in
    assailant = Const("assailant", "Agent")
    g_harm = Const("g_harm", "Goal")
    r = prevents_holds(SIM2, RANGER1, assailant, g_harm, SHOOT, 1)
    assert r.answer == "yes"


def test_prevention_unknown_outside_oracle_bounds():
    # six agents exceed the bounded-countermodel domain, so a failing
    # query degrades to unknown rather than claiming no
    ranger2 = Const("ranger2", "Agent")
    g_harm = Const("g_harm", "Goal")
    r = prevents_holds(SIM2, RANGER1, ranger2, g_harm, SHOOT, 1)
    assert r.answer == "unknown"
    assert r.countermodel is None


# ---------------------------------------------------------------------------
# attitude queries

def test_kill_intention_provable_in_sim1():
    alive = App("alive", (VICTIM,), "Fluent")
    pos, neg = intention_query(SHOOTER, 1, Not(Atom("holds", (alive, moment(2)))))
    r = epistemic_query(SIM1, pos, neg)
    assert r.answer == "yes"
    assert r.proof is not None


def test_safety_intention_provable_in_sim2():
    safe = App("safe", (Const("ranger2", "Agent"),), "Fluent")
    pos, neg = intention_query(RANGER1, 1, Atom("holds", (safe, moment(2))))
    assert epistemic_query(SIM2, pos, neg).answer == "yes"


def test_obligation_answers_no_for_the_dual():
    act = App("action", (RANGER1, SHOOT), "Action")
    pos, neg = intention_query(RANGER1, 1, Atom("happens", (act, moment(1))))
    assert epistemic_query(SIM2, pos, neg).answer == "no"


def test_unsettled_query_is_unknown():
    alive = App("alive", (SHOOTER,), "Fluent")
    pos, neg = intention_query(SHOOTER, 1, Atom("holds", (alive, moment(2))))
    assert epistemic_query(SIM1, pos, neg).answer == "unknown"


def test_inconsistent_theory_detected():
    sc = parse_scenario(
        """
        (constants (a Agent) (go ActionType) (f Fluent))
        (facts (intends a 0 (holds f 1))
               (obligated a 0 (not (holds f 1))))
        (horizon 2)
        (hierarchy (categories forbidden neutral))
        (request a go 0)
        """,
        "contra",
    )
    pos, neg = intention_query(
        Const("a", "Agent"), 0, Atom("holds", (Const("f", "Fluent"), moment(1)))
    )
    with pytest.raises(InconsistentTheory):
        epistemic_query(sc, pos, neg)
