"""Clausification: CNF, skolemization, canonical clause forms."""

from __future__ import annotations

from modalguard.clauses import (
    Clause,
    Literal,
    canonical_clause,
    clause_vars,
    clausify,
    is_tautology,
)
from modalguard.parser import parse_formula
from modalguard.syntax import AGENT, App, Atom, Const, Signature, Var


def make_sig() -> Signature:
    sig = Signature()
    sig.declare_constant("a", AGENT)
    sig.declare_constant("b", AGENT)
    for p in ("p", "q", "r"):
        sig.declare_predicate(p, ())
    sig.declare_predicate("P", (AGENT,))
    sig.declare_predicate("R", (AGENT, AGENT))
    return sig


SIG = make_sig()


def cl(text: str, salt: str | None = None) -> list[Clause]:
    return clausify(parse_formula(text, SIG), salt=salt)


def lits(c: Clause) -> set[tuple[bool, str]]:
    return {(l.positive, l.atom.pred) for l in c.literals}


def test_implication_becomes_one_clause():
    cs = cl("(implies (p) (q))")
    assert len(cs) == 1
    assert lits(cs[0]) == {(False, "p"), (True, "q")}


def test_iff_becomes_two_clauses():
    cs = cl("(iff (p) (q))")
    assert len(cs) == 2
    assert {frozenset(lits(c)) for c in cs} == {
        frozenset({(False, "p"), (True, "q")}),
        frozenset({(False, "q"), (True, "p")}),
    }


def test_conjunction_splits():
    cs = cl("(and (p) (q))")
    assert [lits(c) for c in cs] == [{(True, "p")}, {(True, "q")}]


def test_disjunction_distributes_over_conjunction():
    cs = cl("(or (p) (and (q) (r)))")
    assert {frozenset(lits(c)) for c in cs} == {
        frozenset({(True, "p"), (True, "q")}),
        frozenset({(True, "p"), (True, "r")}),
    }


def test_universal_variables_renamed_canonically():
    c = cl("(forall x : Agent (P x))")[0]
    (lit,) = c.literals
    assert lit.atom.args == (Var("V0", AGENT),)
    assert clause_vars(c) == [Var("V0", AGENT)]


def test_existential_skolemizes_to_constant():
    c = cl("(exists x : Agent (P x))")[0]
    (lit,) = c.literals
    sk = lit.atom.args[0]
    assert isinstance(sk, Const)
    assert sk.name.startswith("sk_")
    assert sk.sort == AGENT


def test_skolem_under_universal_becomes_function():
    c = cl("(forall x : Agent (exists y : Agent (R x y)))")[0]
    (lit,) = c.literals
    x, fy = lit.atom.args
    assert isinstance(x, Var)
    assert isinstance(fy, App)
    assert fy.fn.startswith("sk_")
    assert fy.args == (x,)


def test_skolem_names_derive_from_salt():
    plain = cl("(exists x : Agent (P x))")
    again = cl("(exists x : Agent (P x))")
    other = cl("(exists x : Agent (P x))", salt="other")
    name = plain[0].literals[0].atom.args[0].name
    assert again[0].literals[0].atom.args[0].name == name
    assert other[0].literals[0].atom.args[0].name != name


def test_alpha_variants_share_skolem_names():
    a = cl("(exists x : Agent (P x))")
    b = cl("(exists y : Agent (P y))")
    assert a == b


def test_negated_existential_is_a_universal_clause():
    c = cl("(not (exists x : Agent (P x)))")[0]
    (lit,) = c.literals
    assert not lit.positive
    assert isinstance(lit.atom.args[0], Var)


def test_tautologies_are_dropped():
    assert cl("(or (p) (not (p)))") == []
    assert cl("(implies (p) (p))") == []


def test_is_tautology_direct():
    p = Atom("p", ())
    assert is_tautology(Clause((Literal(True, p), Literal(False, p))))
    assert not is_tautology(Clause((Literal(True, p),)))


def test_canonical_clause_dedups_and_orders():
    p = Atom("P", (Var("zz", AGENT),))
    c = canonical_clause([Literal(True, p), Literal(True, p)])
    assert len(c.literals) == 1
    assert clause_vars(c) == [Var("V0", AGENT)]


def test_duplicate_literal_collapse_via_clausify():
    cs = cl("(or (p) (p))")
    assert len(cs) == 1
    assert len(cs[0].literals) == 1


def test_nested_negation_normalizes():
    cs = cl("(not (not (p)))")
    assert [lits(c) for c in cs] == [{(True, "p")}]


def test_negated_conjunction_de_morgan():
    cs = cl("(not (and (p) (q)))")
    assert len(cs) == 1
    assert lits(cs[0]) == {(False, "p"), (False, "q")}


def test_deterministic_order():
    a = cl("(and (implies (p) (q)) (iff (q) (r)) (forall x : Agent (P x)))")
    b = cl("(and (implies (p) (q)) (iff (q) (r)) (forall x : Agent (P x)))")
    assert a == b
