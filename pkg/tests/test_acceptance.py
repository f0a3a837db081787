"""Acceptance gate: one test per promised behavior.

Each test checks one claim from the README's release checklist end to
end, through public entry points only.  The shared helpers
(corpus, corruptions, ddeoracle) supply the problem sets and the
independent oracles; nothing here reuses the code paths under test
to decide what the right answer is.
"""

from __future__ import annotations

import time

import corpus
import corruptions
import ddeoracle
from test_guard import ABLATIONS, FIRE, G_LIVE, SHOOTER, SIM1, VICTIM
from test_parser import RandomFormulas, round_trip_sig

from modalguard.ethics import check_dde
from modalguard.guard import (
    ALLOW,
    LOCK,
    adjudicate,
    adjudication_theory,
    prevents_holds,
)
from modalguard.models import entails
from modalguard.parser import parse_formula
from modalguard.proofs import verify_proof
from modalguard.prover import prove
from modalguard.report import render_json, render_text
from modalguard.scenario import load_bundled_scenario
from modalguard.syntax import print_formula


def test_malevolent_request_locks_with_verified_proof_under_one_second():
    t0 = time.perf_counter()
    sc = load_bundled_scenario("sim1")
    verdict = adjudicate(sc)
    elapsed_ms = (time.perf_counter() - t0) * 1000
    assert verdict.decision == LOCK
    assert verdict.prove_status == "proof"
    assert verdict.proof_verified
    # the proof object must stand on its own: re-check it from scratch
    # against the theory it was derived from
    assumptions, _ = adjudication_theory(sc)
    assert verify_proof(verdict.proof, assumptions, verdict.obligation, sc.sig)
    assert elapsed_ms < 1000, f"took {elapsed_ms:.1f} ms"


def test_defensive_request_allows_with_compliant_clauses_within_three_seconds():
    t0 = time.perf_counter()
    sc = load_bundled_scenario("sim2")
    verdict = adjudicate(sc)
    elapsed_ms = (time.perf_counter() - t0) * 1000
    assert verdict.decision == ALLOW
    assert verdict.dde is not None
    assert verdict.dde.compliant
    statuses = {k: c.status for k, c in verdict.dde.clauses.items()}
    assert statuses == {"C1": "pass", "C2": "pass", "C3": "pass", "C4": "pass"}
    assert elapsed_ms <= 3000, f"took {elapsed_ms:.1f} ms"


def test_checker_accepts_every_machine_proof_and_rejects_every_corruption():
    sig = corpus.corpus_signature()
    provable = corpus.provable_problems()
    assert len(provable) >= 50
    for p in provable:
        assumptions, goal = p.load(sig)
        res = prove(assumptions, goal, sig=sig)
        assert res.status == "proof", p.name
        assert verify_proof(res.proof, assumptions, goal, sig), p.name
    cases = corruptions.corruption_cases(sig)
    assert len(cases) >= 20
    for label, proof, assumptions, goal in cases:
        assert not verify_proof(proof, assumptions, goal, sig), label


def test_prover_agrees_with_exhaustive_model_enumeration():
    sig = corpus.corpus_signature()
    problems = corpus.oracle_problems()
    assert problems
    disagreements = []
    for p in problems:
        assumptions, goal = p.load(sig)
        proved = prove(assumptions, goal, sig=sig).status == "proof"
        entailed, _ = entails(assumptions, goal, sig)
        if proved != entailed:
            disagreements.append(p.name)
    assert disagreements == []


def test_double_effect_clauses_match_brute_force_recomputation():
    # fresh seeds, disjoint from the per-module agreement test
    seeds = range(1000, 1040)
    assert len(seeds) >= 30
    disagreements = []
    for seed in seeds:
        case = ddeoracle.random_case(seed)
        v = check_dde(case.theory, case.agent, case.atype, 0,
                      case.hierarchy, case.utilities, case.assumptions)
        expected, net = ddeoracle.oracle_verdict(case)
        got = {k: c.status for k, c in v.clauses.items()}
        if got != expected or v.net_utility != net:
            disagreements.append(seed)
    assert disagreements == []


def test_prevention_proof_depends_on_every_conjunct():
    base = prevents_holds(SIM1, SHOOTER, VICTIM, G_LIVE, FIRE, 1)
    assert base.answer == "yes"
    flipped = 0
    for name in sorted(ABLATIONS):
        r = prevents_holds(ABLATIONS[name](), SHOOTER, VICTIM, G_LIVE, FIRE, 1)
        assert r.answer in ("no", "unknown"), name
        flipped += 1
    assert flipped == 6


def test_parse_print_round_trip_is_identity():
    sig = round_trip_sig()
    gen = RandomFormulas(seed=424242)
    checked = 0
    for i in range(220):
        f = gen.formula([], depth=1 + i % 4)
        sig.check_formula(f)
        assert parse_formula(print_formula(f), sig) == f
        checked += 1
    for name in ("sim1", "sim2"):
        sc = load_bundled_scenario(name)
        assert sc.facts
        for f in sc.facts:
            assert parse_formula(print_formula(f), sc.sig) == f
            checked += 1
    assert checked >= 200


def _strip_elapsed(report: str) -> str:
    return "\n".join(ln for ln in report.splitlines() if "elapsed" not in ln)


def test_reports_are_deterministic_modulo_elapsed_time():
    for name in ("sim1", "sim2"):
        sc = load_bundled_scenario(name)
        first = adjudicate(sc)
        second = adjudicate(sc)
        a = _strip_elapsed(render_text(sc, first, include_proof=True))
        b = _strip_elapsed(render_text(sc, second, include_proof=True))
        assert a == b, name
        assert _strip_elapsed(render_json(sc, first)) == _strip_elapsed(
            render_json(sc, second)
        ), name
