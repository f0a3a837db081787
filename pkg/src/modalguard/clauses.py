"""Clausification of shadowed (modal-free) formulas.

The pipeline is conventional: rewrite iff/implies, push negations to
literals, rename binders apart, skolemize existentials on the
universal prefix, drop universals, distribute or over and.  Skolem
symbol names are derived from the source formula's alpha-normal print
plus a running index, so clausifying the same formula twice -- by the
prover or by an independent proof checker -- yields identical clauses.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

from .syntax import (
    And,
    App,
    Atom,
    Const,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Var,
    canonical_key,
    print_term,
    substitute_term,
)


@dataclass(frozen=True, slots=True)
class Literal:
    positive: bool
    atom: Atom

    def negated(self) -> "Literal":
        return Literal(not self.positive, self.atom)

    def key(self) -> str:
        sign = "" if self.positive else "not "
        args = " ".join(print_term(a) for a in self.atom.args)
        return f"({sign}{self.atom.pred}{' ' + args if args else ''})"


@dataclass(frozen=True, slots=True)
class Clause:
    literals: tuple[Literal, ...]

    @property
    def empty(self) -> bool:
        return not self.literals

    def key(self) -> str:
        return " | ".join(l.key() for l in self.literals)

    def weight(self) -> int:
        total = 0
        for l in self.literals:
            total += 1 + sum(_term_size(a) for a in l.atom.args)
        return total


def _term_size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(_term_size(a) for a in t.args)
    return 1


def clause_vars(c: Clause) -> list[Var]:
    out: list[Var] = []

    def walk(t: Term) -> None:
        if isinstance(t, Var):
            if t not in out:
                out.append(t)
        elif isinstance(t, App):
            for a in t.args:
                walk(a)

    for l in c.literals:
        for a in l.atom.args:
            walk(a)
    return out


def _literal_shape(l: Literal) -> str:
    """Print with variables anonymized, for canonical literal ordering."""

    def walk(t: Term) -> str:
        if isinstance(t, Var):
            return "_"
        if isinstance(t, Const):
            return t.name
        return f"({t.fn} {' '.join(walk(a) for a in t.args)})"

    args = " ".join(walk(a) for a in l.atom.args)
    sign = "" if l.positive else "not "
    return f"({sign}{l.atom.pred}{' ' + args if args else ''})"


def canonical_clause(literals: list[Literal]) -> Clause:
    """Deduplicate, order, and rename variables canonically."""
    ordered = sorted(set(literals), key=lambda l: (_literal_shape(l), l.key()))
    ren: dict[Var, Term] = {}

    def walk(t: Term) -> Term:
        if isinstance(t, Var):
            if t not in ren:
                ren[t] = Var(f"V{len(ren)}", t.sort)
            return ren[t]
        if isinstance(t, App):
            return App(t.fn, tuple(walk(a) for a in t.args), t.sort)
        return t

    renamed = [
        Literal(l.positive, Atom(l.atom.pred, tuple(walk(a) for a in l.atom.args)))
        for l in ordered
    ]
    final = sorted(set(renamed), key=lambda l: l.key())
    return Clause(tuple(final))


def is_tautology(c: Clause) -> bool:
    pos = {l.key() for l in c.literals if l.positive}
    for l in c.literals:
        if not l.positive and l.key().replace("(not ", "(", 1) in pos:
            return True
    return False


# ---------------------------------------------------------------------------
# Formula -> clauses


def _expand_connectives(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(_expand_connectives(f.body))
    if isinstance(f, And):
        return And(tuple(_expand_connectives(p) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(_expand_connectives(p) for p in f.parts))
    if isinstance(f, Implies):
        return Or((Not(_expand_connectives(f.left)), _expand_connectives(f.right)))
    if isinstance(f, Iff):
        l = _expand_connectives(f.left)
        r = _expand_connectives(f.right)
        return And((Or((Not(l), r)), Or((Not(r), l))))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, _expand_connectives(f.body))
    raise TypeError(f"clausify applies to shadowed formulas only: {f!r}")


def _nnf(f: Formula, negate: bool) -> Formula:
    if isinstance(f, Atom):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return _nnf(f.body, not negate)
    if isinstance(f, And):
        parts = tuple(_nnf(p, negate) for p in f.parts)
        return Or(parts) if negate else And(parts)
    if isinstance(f, Or):
        parts = tuple(_nnf(p, negate) for p in f.parts)
        return And(parts) if negate else Or(parts)
    if isinstance(f, Forall):
        inner = _nnf(f.body, negate)
        return Exists(f.var, inner) if negate else Forall(f.var, inner)
    if isinstance(f, Exists):
        inner = _nnf(f.body, negate)
        return Forall(f.var, inner) if negate else Exists(f.var, inner)
    raise TypeError(f"unexpected node in NNF: {f!r}")


def clausify(f: Formula, salt: Optional[str] = None) -> list[Clause]:
    """Clauses of a shadowed formula, in a deterministic order.

    salt defaults to the formula's own alpha-normal print; it seeds the
    skolem symbol names.
    """
    if salt is None:
        salt = canonical_key(f)
    tag = hashlib.blake2b(salt.encode(), digest_size=5).hexdigest()
    counter = [0]

    nnf = _nnf(_expand_connectives(f), False)

    # rename binders apart and skolemize in one pass
    used_names = [0]

    def walk(g: Formula, universals: list[Var], ren: dict[Var, Term]) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(substitute_term(a, ren) for a in g.args))
        if isinstance(g, Not):
            return Not(walk(g.body, universals, ren))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(walk(p, universals, ren) for p in g.parts))
        if isinstance(g, Forall):
            nv = Var(f"u{used_names[0]}", g.var.sort)
            used_names[0] += 1
            inner = dict(ren)
            inner[g.var] = nv
            return Forall(nv, walk(g.body, universals + [nv], inner))
        if isinstance(g, Exists):
            idx = counter[0]
            counter[0] += 1
            if universals:
                sk: Term = App(
                    f"sk_{tag}_{idx}", tuple(universals), g.var.sort
                )
            else:
                sk = Const(f"sk_{tag}_{idx}", g.var.sort)
            inner = dict(ren)
            inner[g.var] = sk
            return walk(g.body, universals, inner)
        raise TypeError(f"unexpected node in skolemization: {g!r}")

    matrix = walk(nnf, [], {})

    # distribute or over and -> list of literal lists
    def distribute(g: Formula) -> list[list[Literal]]:
        if isinstance(g, Atom):
            return [[Literal(True, g)]]
        if isinstance(g, Not):
            assert isinstance(g.body, Atom)
            return [[Literal(False, g.body)]]
        if isinstance(g, And):
            out: list[list[Literal]] = []
            for p in g.parts:
                out.extend(distribute(p))
            return out
        if isinstance(g, Or):
            branches = [distribute(p) for p in g.parts]
            out = [[]]
            for br in branches:
                out = [acc + d for acc in out for d in br]
            return out
        if isinstance(g, Forall):
            return distribute(g.body)
        raise TypeError(f"unexpected node in distribution: {g!r}")

    clauses: list[Clause] = []
    seen: set[str] = set()
    for lits in distribute(matrix):
        c = canonical_clause(lits)
        if is_tautology(c):
            continue
        k = c.key()
        if k not in seen:
            seen.add(k)
            clauses.append(c)
    return clauses
